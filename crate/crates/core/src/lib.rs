pub mod assignment;
pub mod fl;
pub mod harness;
pub mod llm;
pub mod mutation;
pub mod repair;
pub mod solver;
pub mod syntax;
pub mod verify;
pub mod num;

/// Line scores over `f64`.
pub type LineScores = fl::combine::LineScores<f64>;
/// Ranked fault-localization result over `f64` scores.
pub type AugmentedCorrectionSubset = fl::combine::AugmentedCorrectionSubset<f64>;

//! Numeric abstractions shared by the matching and scoring code.

use std::fmt::Debug;

use num_traits::{Bounded, Float, Num, Signed};

/// An ordered, signed, bounded number usable as an assignment cost.
pub trait Scalar: Num + Signed + Bounded + PartialOrd + Copy + Debug + Send + Sync + 'static {}

impl<T> Scalar for T where T: Num + Signed + Bounded + PartialOrd + Copy + Debug + Send + Sync + 'static {}

/// A floating-point line score.
pub trait Score: Scalar + Float {}

impl<T> Score for T where T: Scalar + Float {}

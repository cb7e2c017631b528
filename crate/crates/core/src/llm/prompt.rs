use std::fmt::Write;

use serde::{Deserialize, Serialize};

/// Which model a request is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    FaultLocalization,
    Repair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlPrompt {
    pub problem: String,
    pub reference_program: String,
    pub incorrect_program: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairPrompt {
    pub problem: String,
    pub reference_program: String,
    pub incorrect_program: String,
    pub fl: Vec<usize>,
    pub missing_lines: bool,
}

fn section(out: &mut String, marker: &str, body: &str) {
    let _ = writeln!(out, "<|{marker}|>");
    out.push_str(body);
    if !body.is_empty() && !body.ends_with('\n') {
        out.push('\n');
    }
}

impl FlPrompt {
    /// Marker-delimited text form; byte-stable for fixed inputs.
    pub fn render(&self) -> String {
        let mut out = String::new();
        section(&mut out, "problem", &self.problem);
        section(&mut out, "reference_program", &self.reference_program);
        section(&mut out, "incorrect_program", &self.incorrect_program);
        out
    }
}

impl RepairPrompt {
    /// Marker-delimited text form ending with the empty completion slot.
    pub fn render(&self) -> String {
        let mut out = String::new();
        section(&mut out, "problem", &self.problem);
        section(&mut out, "reference_program", &self.reference_program);
        section(&mut out, "incorrect_program", &self.incorrect_program);
        let fl: Vec<String> = self.fl.iter().map(usize::to_string).collect();
        section(&mut out, "fl", &fl.join(" "));
        section(&mut out, "missing_lines", if self.missing_lines { "1" } else { "0" });
        let _ = writeln!(out, "<|correction|>");
        out
    }
}

/// JSON body posted to the inference service.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmRequest {
    pub task: Task,
    pub model: String,
    pub problem: String,
    pub reference_program: String,
    pub incorrect_program: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fl: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing_lines: Option<bool>,
    pub prompt: String,
}

impl LlmRequest {
    pub fn fault_localization(model: &str, p: &FlPrompt) -> Self {
        LlmRequest {
            task: Task::FaultLocalization,
            model: model.to_owned(),
            problem: p.problem.clone(),
            reference_program: p.reference_program.clone(),
            incorrect_program: p.incorrect_program.clone(),
            fl: None,
            missing_lines: None,
            prompt: p.render(),
        }
    }

    pub fn repair(model: &str, p: &RepairPrompt) -> Self {
        LlmRequest {
            task: Task::Repair,
            model: model.to_owned(),
            problem: p.problem.clone(),
            reference_program: p.reference_program.clone(),
            incorrect_program: p.incorrect_program.clone(),
            fl: Some(p.fl.clone()),
            missing_lines: Some(p.missing_lines),
            prompt: p.render(),
        }
    }

    /// Content hash used by the replay backend.
    pub fn key(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&self.task).expect("task serializes"));
        h.update(self.model.as_bytes());
        h.update(b"\0");
        h.update(self.prompt.as_bytes());
        hex::encode(h.finalize())
    }
}

/// JSON body returned by the inference service.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmResponse {
    pub completion: String,
}

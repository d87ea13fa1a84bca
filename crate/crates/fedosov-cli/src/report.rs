//! Command reports: named verdicts with witnesses plus exact artifacts.

use serde_json::{Map, Value};

/// Failure modes that map onto exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

pub struct Report {
    command: String,
    verdicts: Vec<(String, bool)>,
    witnesses: Map<String, Value>,
    artifacts: Vec<(String, Value, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            verdicts: Vec::new(),
            witnesses: Map::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn verdict(&mut self, name: &str, passed: bool, witness: Option<String>) {
        self.verdicts.push((name.to_string(), passed));
        if let Some(w) = witness.filter(|_| !passed) {
            self.witnesses.insert(name.to_string(), Value::String(w));
        }
    }

    /// An artifact with its JSON value and a text rendering.
    pub fn artifact(&mut self, name: &str, json: Value, text: String) {
        self.artifacts.push((name.to_string(), json, text));
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| *v)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        root.insert("command".into(), Value::String(self.command.clone()));
        root.insert("passed".into(), Value::Bool(self.all_passed()));
        let verdicts: Map<String, Value> = self
            .verdicts
            .iter()
            .map(|(k, v)| (k.clone(), Value::Bool(*v)))
            .collect();
        root.insert("verdicts".into(), Value::Object(verdicts));
        root.insert("witnesses".into(), Value::Object(self.witnesses.clone()));
        for (k, v, _) in &self.artifacts {
            root.insert(k.clone(), v.clone());
        }
        serde_json::to_string_pretty(&Value::Object(root)).expect("serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.command);
        for (k, v) in &self.verdicts {
            out.push_str(&format!(
                "  {:<28} {}\n",
                k,
                if *v { "pass" } else { "FAIL" }
            ));
            if let Some(Value::String(w)) = self.witnesses.get(k) {
                out.push_str(&format!("    witness: {}\n", w));
            }
        }
        for (k, _, text) in &self.artifacts {
            out.push_str(&format!("{}:\n", k));
            for line in text.lines() {
                out.push_str(&format!("  {}\n", line));
            }
        }
        out
    }
}

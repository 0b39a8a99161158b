use serde::Serialize;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    MalformedInput,
    PreconditionFailed,
    VerificationFailed,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::MalformedInput => 1,
            Status::PreconditionFailed => 2,
            Status::VerificationFailed => 3,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::MalformedInput => "malformed_input",
            Status::PreconditionFailed => "precondition_failed",
            Status::VerificationFailed => "verification_failed",
        }
    }
}

/// One run's output. `lines` is the human-readable rendering, `result` the
/// structured payload; the two are built side by side by each command.
#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub status: Status,
    pub lines: Vec<String>,
    pub result: Map<String, Value>,
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, status: Status::Ok, lines: Vec::new(), result: Map::new(), error: None }
    }

    pub fn failed(command: &'static str, status: Status, message: String) -> Self {
        Report { status, error: Some(message), ..Report::new(command) }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    /// Stores a field; non-finite floats become `null` so the document
    /// re-parses to the same value.
    pub fn field(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.result.insert(key.to_string(), v);
    }

    pub fn to_value(&self) -> Value {
        let mut doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "status": self.status.as_str(),
            "exit_code": self.status.exit_code(),
            "result": Value::Object(self.result.clone()),
        });
        if let Some(e) = &self.error {
            doc["error"] = Value::String(e.clone());
        }
        doc
    }

    pub fn render_structured(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("JSON values always serialize")
    }
}

pub fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

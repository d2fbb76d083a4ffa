//! Machine-readable run reports for the CLI.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Violated,
    Incomplete,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Verified => 0,
            Status::Violated => 1,
            Status::Error => 2,
            Status::Incomplete => 3,
        }
    }
}

/// The single JSON document every CLI invocation emits on the data stream.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub command: String,
    pub parameters: Value,
    pub status: Status,
    pub payload: Value,
    pub witnesses: Vec<Value>,
    pub elapsed_ms: u128,
    pub tool_version: String,
}

impl RunReport {
    pub fn new(command: &str, parameters: Value) -> Self {
        RunReport {
            command: command.to_string(),
            parameters,
            status: Status::Verified,
            payload: Value::Null,
            witnesses: Vec::new(),
            elapsed_ms: 0,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

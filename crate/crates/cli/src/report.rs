use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Wraps command outputs in the common report envelope.
pub fn envelope(command: &str, inputs: Value, outputs: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "argv": std::iter::once("elastica".to_string()).chain(std::env::args().skip(1)).collect::<Vec<_>>(),
        "inputs": inputs,
        "outputs": outputs,
        "tool_version": env!("CARGO_PKG_VERSION"),
    })
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    fs::write(path, text + "\n").map_err(|e| Failure {
        status: crate::EXIT_USAGE,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure {
        status: crate::EXIT_USAGE,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

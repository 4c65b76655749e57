use std::path::Path;

use serde_json::Value;

use crate::error::CliError;

/// Shortest round-trip decimal form, as in the JSON artifacts.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        serde_json::Number::from_f64(v)
            .map(|n| n.to_string())
            .unwrap_or_else(|| v.to_string())
    } else {
        v.to_string()
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    write_text(path, &to_json_text(v))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

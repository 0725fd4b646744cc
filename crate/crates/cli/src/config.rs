//! Merging of a JSON config file with command-line flags.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

pub fn load(path: &Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::Config(format!(
            "{}: expected a JSON object",
            path.display()
        ))),
        Err(e) => Err(CliError::Config(format!("{}: {e}", path.display()))),
    }
}

/// Overlays the flags that were given on top of the file values. Keys unknown
/// to `T` are ignored, so one file can serve several subcommands.
pub fn merge<T: Serialize + DeserializeOwned>(
    flags: &T,
    file: &Map<String, Value>,
) -> CliResult<T> {
    let mut base = file.clone();
    if let Value::Object(given) = serde_json::to_value(flags)? {
        base.extend(given);
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| CliError::Config(e.to_string()))
}

/// Joins several serialized structs into one JSON object.
pub fn echo(parts: &[Value]) -> Value {
    let mut out = Map::new();
    for p in parts {
        if let Value::Object(m) = p {
            out.extend(m.clone());
        }
    }
    Value::Object(out)
}

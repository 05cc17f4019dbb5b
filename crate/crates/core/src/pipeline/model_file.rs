//! Versioned JSON model file with a CRC32 trailer line.
//!
//! Floats are written with 17 significant digits so every value parses back
//! to the identical `f64`. The trailer `crc32 xxxxxxxx` covers every byte
//! before it.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{FrameworkModel, FusionModel, PipelineConfig};
use crate::error::{Error, Result};

pub const MODEL_VERSION: u32 = 1;
const TRAILER: &str = "crc32 ";

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    created: u64,
    config: PipelineConfig,
    frameworks: Vec<FrameworkModel>,
    weights: Vec<f64>,
}

fn write_float(out: &mut String, v: f64) {
    out.push_str(&format!("{v:.16e}"));
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => write_float(out, f),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

/// Serializes `model`; `created` is the Unix timestamp recorded in the file.
pub fn model_to_string(model: &FusionModel, created: u64) -> Result<String> {
    let file = ModelFile {
        version: MODEL_VERSION,
        created,
        config: model.config,
        frameworks: model.frameworks.clone(),
        weights: model.weights.clone(),
    };
    let value = serde_json::to_value(&file).map_err(|e| Error::CorruptModel(e.to_string()))?;
    let mut body = String::new();
    write_value(&mut body, &value, 0);
    body.push('\n');
    let crc = crc32fast::hash(body.as_bytes());
    body.push_str(&format!("{TRAILER}{crc:08x}\n"));
    Ok(body)
}

pub fn model_from_str(text: &str) -> Result<FusionModel> {
    let trimmed = text.strip_suffix('\n').unwrap_or(text);
    let split = trimmed
        .rfind('\n')
        .ok_or_else(|| Error::CorruptModel("missing checksum trailer".into()))?;
    let (body, trailer) = (&text[..=split], &trimmed[split + 1..]);
    let stored = trailer
        .strip_prefix(TRAILER)
        .and_then(|h| u32::from_str_radix(h, 16).ok())
        .ok_or_else(|| Error::CorruptModel(format!("malformed checksum trailer {trailer:?}")))?;
    let value: Value = serde_json::from_str(body).map_err(|e| Error::CorruptModel(e.to_string()))?;
    let version = value
        .get("version")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::CorruptModel("missing version field".into()))?;
    if version != u64::from(MODEL_VERSION) {
        return Err(Error::VersionMismatch {
            expected: MODEL_VERSION,
            found: version,
        });
    }
    let actual = crc32fast::hash(body.as_bytes());
    if actual != stored {
        return Err(Error::CorruptModel(format!(
            "checksum mismatch: stored {stored:08x}, computed {actual:08x}"
        )));
    }
    let file: ModelFile = serde_json::from_value(value).map_err(|e| Error::CorruptModel(e.to_string()))?;
    let model = FusionModel::from_frameworks(file.config, file.frameworks)?;
    if model.weights != file.weights {
        return Err(Error::CorruptModel("weights differ from framework accuracies".into()));
    }
    Ok(model)
}

pub fn save_model(model: &FusionModel, path: impl AsRef<Path>, created: u64) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model_to_string(model, created)?).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<FusionModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}

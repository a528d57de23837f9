use std::fs;
use std::io::Write;
use std::path::Path;

use bloch_hfh::numfmt::round_sig;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = bloch_hfh::hfh::SCHEMA_VERSION;

/// Rounds every float in a JSON tree to 9 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().map(|x| round_sig(x, 9)).and_then(serde_json::Number::from_f64) {
                *n = x;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Writes `{"schema_version": 1, ...body}` with rounded floats.
pub fn write_json<T: Serialize>(path: &Path, body: &T) -> std::io::Result<()> {
    let mut v = serde_json::to_value(body).map_err(std::io::Error::other)?;
    round_floats(&mut v);
    let mut doc = serde_json::Map::new();
    doc.insert("schema_version".into(), SCHEMA_VERSION.into());
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                if k != "schema_version" {
                    doc.insert(k, x);
                }
            }
        }
        other => {
            doc.insert("data".into(), other);
        }
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

pub fn write_text(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> std::io::Result<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    fs::File::create(path)?.write_all(&buf)
}

/// Config echo: exact values, no schema field, so it loads back unchanged.
pub fn write_config<T: Serialize>(path: &Path, cfg: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(cfg).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

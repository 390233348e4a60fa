//! Stable JSON emission and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

use adaptsym::fock::SectorConstraints;

use crate::Failure;

/// Significant digits kept for every float in emitted JSON.
pub const SIG_DIGITS: usize = 12;

fn round_float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("formatted float parses");
    // normalize −0 so identical runs cannot differ in sign of zero
    Number::from_f64(if r == 0.0 { 0.0 } else { r }).map_or(Value::Null, Value::Number)
}

/// Round all floats and return a value whose objects serialize with sorted keys.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => round_float(n.as_f64().expect("f64 number")),
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonical(v))).collect::<Map<_, _>>()),
        v => v,
    }
}

pub fn to_json<T: Serialize>(x: &T) -> Value {
    canonical(serde_json::to_value(x).expect("serializable output"))
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub fixture: String,
    pub fixture_sha256: String,
    pub pool: Option<String>,
    pub enforce_spatial: Option<bool>,
    pub sector: SectorConstraints,
    pub config: Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Destination of a command's output; checked before any work is done.
pub struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    pub fn new(path: Option<&Path>, force: bool) -> Result<Self, Failure> {
        if let Some(p) = path {
            if p.exists() && !force {
                return Err(Failure::config(format!("{} already exists (pass --force to overwrite)", p.display())));
            }
        }
        Ok(Sink { path: path.map(Path::to_path_buf) })
    }

    pub fn write(&self, text: &str) -> Result<(), Failure> {
        match &self.path {
            Some(p) => fs::write(p, text).map_err(|e| Failure::io(format!("cannot write {}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// One JSON document per line.
pub fn json_lines(values: &[Value]) -> String {
    values.iter().map(|v| serde_json::to_string(v).expect("json") + "\n").collect()
}

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

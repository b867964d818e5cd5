use std::ffi::OsString;
use std::fmt;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::args::{Command, Format, Tolerances};

/// Bad input: unreadable or malformed files, invalid flags or parameters.
/// Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Digest of an input file the run depends on.
#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &Path, bytes: &[u8]) -> Self {
        Self {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

/// The fully resolved configuration of one run. Its hash is embedded in
/// every output; the output path is not part of it.
#[derive(Debug, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub params: Value,
    pub seed: u64,
    pub format: Format,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<InputDigest>,
}

impl ExperimentConfig {
    pub fn new(command: &Command, seed: u64, format: Format, tolerances: Tolerances, inputs: Vec<InputDigest>) -> Self {
        let params = match serde_json::to_value(command).expect("commands serialize") {
            Value::Object(mut m) => m.remove("params").unwrap_or(Value::Null),
            _ => Value::Null,
        };
        Self {
            command: command.name().to_string(),
            params,
            seed,
            format,
            tolerances,
            inputs,
        }
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }
}

/// Appends `config_hash` and `seed` columns to every row of a CSV table.
pub fn stamp_csv(csv: &str, hash: &str, seed: u64) -> String {
    let mut out = String::with_capacity(csv.len() + 80 * csv.lines().count());
    for (i, line) in csv.lines().enumerate() {
        out.push_str(line);
        if i == 0 {
            out.push_str(",config_hash,seed\n");
        } else {
            out.push_str(&format!(",{hash},{seed}\n"));
        }
    }
    out
}

pub fn stamp_json(result: Value, cfg: &ExperimentConfig, hash: &str) -> String {
    let doc = serde_json::json!({
        "config_hash": hash,
        "seed": cfg.seed,
        "config": cfg,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json output");
    s.push('\n');
    s
}

/// Replaces `--config FILE` by the flags the file describes, placed so that
/// flags given on the command line still win.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let mut path = None;
    let mut rest = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter();
    let prog = it.next().unwrap_or_else(|| "arcmarkov".into());
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().ok_or_else(|| ConfigError("--config needs a file".into()))?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.into());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        let mut out = vec![prog];
        out.extend(rest);
        return Ok(out);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", Path::new(&path).display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| ConfigError(format!("config is not valid JSON: {e}")))?;
    let Value::Object(map) = doc else {
        return Err(ConfigError("config must be a JSON object".into()));
    };
    let mut out = vec![prog];
    let command = map
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| ConfigError("config needs a \"command\" string".into()))?;
    out.push(command.into());
    for (key, value) in &map {
        match key.as_str() {
            "command" => {}
            "params" | "tolerances" => match value {
                Value::Object(params) => {
                    for (k, v) in params {
                        push_flag(&mut out, k, v)?;
                    }
                }
                Value::Null => {}
                _ => return Err(ConfigError(format!("\"{key}\" must be an object"))),
            },
            "seed" | "format" | "output" => push_flag(&mut out, key, value)?,
            other => return Err(ConfigError(format!("unknown config key \"{other}\""))),
        }
    }
    out.extend(rest);
    Ok(out)
}

fn push_flag(out: &mut Vec<OsString>, key: &str, v: &Value) -> Result<(), ConfigError> {
    let flag = format!("--{}", key.replace('_', "-"));
    let scalar = |v: &Value| -> Result<String, ConfigError> {
        match v {
            Value::Number(n) => Ok(n.to_string()),
            Value::String(s) => Ok(s.clone()),
            Value::Bool(b) => Ok(b.to_string()),
            _ => Err(ConfigError(format!("{key}: unsupported value {v}"))),
        }
    };
    match v {
        Value::Null | Value::Bool(false) => {}
        Value::Bool(true) => out.push(flag.into()),
        Value::Array(items) if items.iter().any(Value::is_array) => {
            out.push(flag.into());
            out.push(v.to_string().into());
        }
        Value::Array(items) => {
            if items.is_empty() {
                return Ok(());
            }
            let joined = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?.join(",");
            out.push(flag.into());
            out.push(joined.into());
        }
        Value::Object(_) => return Err(ConfigError(format!("{key}: nested objects are not supported"))),
        _ => {
            out.push(flag.into());
            out.push(scalar(v)?.into());
        }
    }
    Ok(())
}

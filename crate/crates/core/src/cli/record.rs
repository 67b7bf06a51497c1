//! Run records and parameter resolution (flags > config file > defaults).

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub results: Value,
    pub seed: Option<u64>,
    pub version: String,
    /// Seconds since the Unix epoch; outside the reproducibility contract.
    pub timestamp: u64,
    pub wall_time_seconds: f64,
}

impl RunRecord {
    /// First 16 hex digits of SHA-256 over `{command, parameters}`.
    pub fn hash(&self) -> String {
        params_hash(&self.command, &self.parameters)
    }

    /// Writes `<out>/<command>/<hash>.json` and, if given, the sibling CSV.
    pub fn write(&self, out: &Path, csv: Option<&str>) -> Result<PathBuf> {
        let dir = out.join(self.command.replace(' ', "-"));
        std::fs::create_dir_all(&dir)?;
        let stem = self.hash();
        let path = dir.join(format!("{stem}.json"));
        std::fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        if let Some(csv) = csv {
            std::fs::write(dir.join(format!("{stem}.csv")), csv)?;
        }
        Ok(path)
    }
}

pub fn params_hash(command: &str, parameters: &Map<String, Value>) -> String {
    // serde_json maps are ordered by key, so the encoding is canonical
    let doc = serde_json::json!({ "command": command, "parameters": parameters });
    let digest = Sha256::digest(doc.to_string().as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Looks parameters up in command-line flags, then the config document, then
/// defaults, and records every resolved value.
pub struct Resolver {
    config: Map<String, Value>,
    pub params: Map<String, Value>,
}

impl Resolver {
    /// `config` is a JSON object; keys under `command` override top-level keys.
    pub fn new(config: Option<Value>, command: &str) -> Result<Self> {
        let mut merged = Map::new();
        match config {
            None => {}
            Some(Value::Object(top)) => {
                for (k, v) in &top {
                    if !v.is_object() || k == "shape" {
                        merged.insert(k.clone(), v.clone());
                    }
                }
                if let Some(Value::Object(section)) = top.get(command) {
                    for (k, v) in section {
                        merged.insert(k.clone(), v.clone());
                    }
                }
            }
            Some(_) => return Err(Error::InvalidInput("config must be a JSON object".into())),
        }
        Ok(Self {
            config: merged,
            params: Map::new(),
        })
    }

    pub fn optional<T: DeserializeOwned + Serialize>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.config.get(key) {
                Some(v) => Some(serde_json::from_value(v.clone()).map_err(|e| {
                    Error::InvalidInput(format!("config key {key}: {e}"))
                })?),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.params.insert(key.to_string(), serde_json::to_value(v)?);
        }
        Ok(value)
    }

    pub fn get<T: DeserializeOwned + Serialize>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        match self.optional(key, flag)? {
            Some(v) => Ok(v),
            None => {
                self.params.insert(key.to_string(), serde_json::to_value(&default)?);
                Ok(default)
            }
        }
    }

    pub fn raw(&self, key: &str) -> Option<&Value> {
        self.config.get(key)
    }

    pub fn record(&mut self, key: &str, value: Value) {
        self.params.insert(key.to_string(), value);
    }
}

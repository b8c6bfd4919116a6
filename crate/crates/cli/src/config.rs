//! Option resolution: command-line flag, then the TOML config file, then the
//! built-in default. Every resolved value is recorded for the manifest.
//!
//! The config file may hold plain keys (`seed = 7`) and per-command tables
//! (`[gmc.moment]` with `reps = 500`); the command table wins. Keys use the
//! flag spelling, with `-` or `_`.

use std::path::Path;

use serde_json::{Map, Value};

use crate::error::CliError;

pub trait ConfigValue: Sized + Clone {
    fn from_toml(v: &toml::Value) -> Option<Self>;
    fn to_json(&self) -> Value;
}

impl ConfigValue for f64 {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_float().or_else(|| v.as_integer().map(|i| i as f64))
    }
    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self).map_or(Value::Null, Value::Number)
    }
}

impl ConfigValue for u64 {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_integer().and_then(|i| u64::try_from(i).ok())
    }
    fn to_json(&self) -> Value {
        Value::from(*self)
    }
}

impl ConfigValue for usize {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_integer().and_then(|i| usize::try_from(i).ok())
    }
    fn to_json(&self) -> Value {
        Value::from(*self)
    }
}

impl ConfigValue for String {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_str().map(String::from)
    }
    fn to_json(&self) -> Value {
        Value::from(self.clone())
    }
}

impl ConfigValue for Vec<f64> {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        match v {
            toml::Value::Array(a) => a.iter().map(f64::from_toml).collect(),
            toml::Value::String(s) => s.split(',').map(|x| x.trim().parse().ok()).collect(),
            other => f64::from_toml(other).map(|x| vec![x]),
        }
    }
    fn to_json(&self) -> Value {
        Value::Array(self.iter().map(f64::to_json).collect())
    }
}

impl ConfigValue for Vec<String> {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        match v {
            toml::Value::Array(a) => a.iter().map(String::from_toml).collect(),
            toml::Value::String(s) => Some(vec![s.clone()]),
            _ => None,
        }
    }
    fn to_json(&self) -> Value {
        Value::Array(self.iter().map(|s| Value::from(s.clone())).collect())
    }
}

#[derive(Debug, Default)]
pub struct Settings {
    file: toml::Table,
    section: Vec<String>,
    pub effective: Map<String, Value>,
}

impl Settings {
    pub fn load(path: Option<&Path>, command: &str) -> Result<Self, CliError> {
        let file = match path {
            None => toml::Table::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p.display(), e))?;
                text.parse::<toml::Table>().map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
            }
        };
        Ok(Settings { file, section: command.split(' ').map(String::from).collect(), effective: Map::new() })
    }

    fn lookup(&self, key: &str) -> Option<&toml::Value> {
        let alt = key.replace('-', "_");
        let mut section = Some(&self.file);
        for part in &self.section {
            section = section.and_then(|t| t.get(part)).and_then(|v| v.as_table());
        }
        [section, Some(&self.file)]
            .into_iter()
            .flatten()
            .find_map(|t| t.get(key).or_else(|| t.get(&alt)))
    }

    fn read_key<T: ConfigValue>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.lookup(key) {
            None => Ok(None),
            Some(v) => T::from_toml(v)
                .map(Some)
                .ok_or_else(|| CliError::Input(format!("config key `{key}` has the wrong type: {v}"))),
        }
    }

    /// Flag, else config, else `default`.
    pub fn get<T: ConfigValue>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        let v = match flag {
            Some(v) => v,
            None => self.read_key(key)?.unwrap_or(default),
        };
        self.effective.insert(key.to_string(), v.to_json());
        Ok(v)
    }

    /// Flag, else config; missing in both is an input error.
    pub fn require<T: ConfigValue>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError> {
        let v = match flag {
            Some(v) => v,
            None => self.read_key(key)?.ok_or_else(|| CliError::Input(format!("missing required option --{key}")))?,
        };
        self.effective.insert(key.to_string(), v.to_json());
        Ok(v)
    }

    /// Flag, else config, else nothing.
    pub fn optional<T: ConfigValue>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        let v = match flag {
            Some(v) => Some(v),
            None => self.read_key(key)?,
        };
        if let Some(x) = &v {
            self.effective.insert(key.to_string(), x.to_json());
        }
        Ok(v)
    }

    pub fn record(&mut self, key: &str, v: Value) {
        self.effective.insert(key.to_string(), v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(text: &str, cmd: &str) -> Settings {
        Settings { file: text.parse().unwrap(), section: cmd.split(' ').map(String::from).collect(), ..Default::default() }
    }

    #[test]
    fn precedence() {
        let mut s = settings("seed = 3\nreps = 10\n[gmc.moment]\nreps = 20\nhalf_width = 15", "gmc moment");
        assert_eq!(s.get("seed", Some(9u64), 0).unwrap(), 9);
        assert_eq!(s.get("seed", None, 0u64).unwrap(), 3);
        assert_eq!(s.get("reps", None, 1usize).unwrap(), 20);
        assert_eq!(s.get("half-width", None, 20.0).unwrap(), 15.0);
        assert_eq!(s.get("grid", None, 4096usize).unwrap(), 4096);
        assert_eq!(s.effective["reps"], 20);
    }

    #[test]
    fn wrong_type_and_missing() {
        let mut s = settings("gamma = \"one\"", "params");
        assert!(matches!(s.get("gamma", None, 1.0), Err(CliError::Input(_))));
        assert!(matches!(s.require::<f64>("theta", None), Err(CliError::Input(_))));
    }

    #[test]
    fn lists() {
        let mut s = settings("betas = [2, 2.5, 1]\nmus = \"0.5, 1\"", "x");
        assert_eq!(s.get("betas", None, Vec::<f64>::new()).unwrap(), vec![2.0, 2.5, 1.0]);
        assert_eq!(s.get("mus", None, Vec::<f64>::new()).unwrap(), vec![0.5, 1.0]);
    }
}

//! `name:key=value,key=value` descriptors shared by the equation, solution and
//! map registries.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamMap {
    entries: BTreeMap<String, String>,
}

impl ParamMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{item}'")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse(format!("empty key in '{item}'")));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::Parse(format!("duplicate key '{key}'")));
            }
        }
        Ok(Self { entries })
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get_str(&self, aliases: &[&str]) -> Option<&str> {
        aliases
            .iter()
            .find_map(|k| self.entries.get(*k).map(String::as_str))
    }

    /// First of `aliases` present, parsed as a float.
    pub fn get_f64(&self, aliases: &[&str]) -> Result<Option<f64>> {
        match aliases.iter().find_map(|k| self.entries.get(*k).map(|v| (k, v))) {
            None => Ok(None),
            Some((k, v)) => parse_number(v)
                .map(Some)
                .ok_or_else(|| Error::Parse(format!("'{k}={v}' is not a number"))),
        }
    }

    pub fn f64_or(&self, aliases: &[&str], default: f64) -> Result<f64> {
        Ok(self.get_f64(aliases)?.unwrap_or(default))
    }

    pub fn require_f64(&self, aliases: &[&str]) -> Result<f64> {
        self.get_f64(aliases)?
            .ok_or_else(|| Error::Parse(format!("missing parameter '{}'", aliases[0])))
    }

    /// Rejects keys outside `allowed`.
    pub fn ensure_only(&self, context: &str, allowed: &[&str]) -> Result<()> {
        match self.entries.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Parse(format!(
                "unknown parameter '{k}' for {context} (allowed: {})",
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }
}

impl std::fmt::Display for ParamMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let items: Vec<String> = self.entries.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&items.join(","))
    }
}

/// Finite floats as accepted by `f64::from_str`.
fn parse_number(text: &str) -> Option<f64> {
    text.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Splits `name:params` into the name and its parameters.
pub fn split_descriptor(text: &str) -> Result<(String, ParamMap)> {
    let text = text.trim();
    match text.split_once(':') {
        Some((name, rest)) => Ok((name.trim().to_string(), ParamMap::parse(rest)?)),
        None => Ok((text.to_string(), ParamMap::default())),
    }
}

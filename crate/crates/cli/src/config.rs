//! `key = value` run configuration.
//!
//! One setting per line, `#` starts a comment, keys may be dotted
//! (`npg.eta = 0.1`). Commands pull the keys they understand; whatever is
//! left over afterwards is reported as unknown.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};

pub const SEED_KEY: &str = "seed";

#[derive(Debug, Default)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
    used: Mutex<BTreeSet<String>>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected `key = value`", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let valid = !key.is_empty()
                && key
                    .split('.')
                    .all(|part| !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'));
            if !valid {
                bail!("config line {}: bad key {key:?}", i + 1);
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                bail!("config line {}: duplicate key {key:?}", i + 1);
            }
        }
        Ok(RunConfig { entries, used: Mutex::default() })
    }

    /// Command-line flags take precedence over the file.
    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), value);
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.used.lock().unwrap().insert(key.to_string());
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e| anyhow!("config key {key}: cannot parse {v:?}: {e}")),
        }
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str, default: Vec<T>) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .split(',')
                .map(|item| {
                    let item = item.trim();
                    item.parse().map_err(|e| anyhow!("config key {key}: cannot parse {item:?}: {e}"))
                })
                .collect(),
        }
    }

    pub fn reject_unknown(&self) -> Result<()> {
        let used = self.used.lock().unwrap();
        let unknown: Vec<&str> = self.entries.keys().filter(|k| !used.contains(*k)).map(String::as_str).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            bail!("unknown config keys: {}", unknown.join(", "))
        }
    }

    /// SHA-256 of the normalised settings, independent of comments, spacing,
    /// key order and the seed.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.entries.iter().filter(|(k, _)| k.as_str() != SEED_KEY) {
            h.update(format!("{k} = {v}\n"));
        }
        hex::encode(h.finalize())
    }
}

pub fn load(path: Option<&std::path::Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            RunConfig::parse(&text)
        }
    }
}

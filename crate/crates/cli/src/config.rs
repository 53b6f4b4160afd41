//! Flat `key = value` scenario configuration.
//!
//! Values are merged in order: built-in defaults, then the config file, then
//! command-line flags. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use raman_cqed::{Level, ModeFamily};

use crate::error::CliError;

/// Every accepted key with its default value.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("atom.init", "a"),
    ("cnot.n_prime", "4"),
    ("cutoff.leak_tol", "1e-12"),
    ("disentanglement.j", "0"),
    ("epr.outcome", "a"),
    ("ghz.order", "0"),
    ("ghz.sign", "+"),
    ("out.path", "-"),
    ("q.resolution", "201"),
    ("q.times", "both"),
    ("q.window", "auto"),
    ("state1.family", "coherent"),
    ("state1.nbar", "150"),
    ("state1.r", "1"),
    ("state2.family", "coherent"),
    ("state2.nbar", "50"),
    ("state2.r", "1"),
    ("sweep.gt_max", "25"),
    ("sweep.kind", "atomic"),
    ("sweep.markers", "false"),
    ("sweep.steps", "500"),
    ("times.j_max", "2"),
    ("times.k", "1"),
    ("times.kappa", "3"),
    ("times.l", "3"),
    ("times.revivals", "3"),
];

/// Resolved key/value pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            values: DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }
}

fn check_key(key: &str) -> Result<(), CliError> {
    if DEFAULTS.iter().any(|(k, _)| *k == key) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("unknown config key {key:?}")))
    }
}

impl Config {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn merge_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("{origin}:{}: expected key = value", lineno + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        self.merge_text(&text, &path.display().to_string())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        check_key(key)?;
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).expect("every key has a default")
    }

    /// Scenario parameters, i.e. everything except the output location, so
    /// the same run written to two paths yields identical files.
    pub fn entries(&self) -> impl Iterator<Item = (&String, &String)> {
        self.values.iter().filter(|(k, _)| k.as_str() != "out.path")
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let v = self.get(key);
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::Usage(format!("{key}: expected a finite number, got {v:?}")))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        let v = self.get(key);
        v.parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{key}: expected a non-negative integer, got {v:?}")))
    }

    pub fn u32(&self, key: &str) -> Result<u32, CliError> {
        let v = self.get(key);
        v.parse::<u32>()
            .map_err(|_| CliError::Usage(format!("{key}: expected a non-negative integer, got {v:?}")))
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        match self.get(key) {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            v => Err(CliError::Usage(format!("{key}: expected true or false, got {v:?}"))),
        }
    }

    pub fn level(&self, key: &str) -> Result<Level, CliError> {
        let v = self.get(key);
        let mut chars = v.chars();
        match (chars.next().and_then(Level::from_symbol), chars.next()) {
            (Some(l), None) => Ok(l),
            _ => Err(CliError::Usage(format!("{key}: expected a or b, got {v:?}"))),
        }
    }

    /// Mode family and target mean for `state1` or `state2`.
    pub fn mode(&self, idx: usize) -> Result<(ModeFamily, f64), CliError> {
        let fam_key = format!("state{idx}.family");
        let nbar_key = format!("state{idx}.nbar");
        let nbar = self.f64(&nbar_key)?;
        if nbar < 0.0 {
            return Err(CliError::Usage(format!("{nbar_key}: must be non-negative")));
        }
        let family = match self.get(&fam_key) {
            "coherent" => ModeFamily::Coherent,
            "squeezed" => ModeFamily::Squeezed {
                r: self.f64(&format!("state{idx}.r"))?,
            },
            v => return Err(CliError::Usage(format!("{fam_key}: expected coherent or squeezed, got {v:?}"))),
        };
        Ok((family, nbar))
    }
}

//! Pinned ratio baselines.
//!
//! The theorems only assert that some constant exists, so the first recorded ratio of each scenario
//! is written to a checked-in table and later runs must stay within [`TOLERANCE`] of it.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::report::BaselineCheck;

pub const TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Entry {
    pub ratio: f64,
    /// Where the value came from, e.g. "first run" or "closed form".
    #[serde(default)]
    pub source: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct BaselineTable {
    pub entries: BTreeMap<String, Entry>,
}

impl BaselineTable {
    /// A missing file is an empty table.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        match fs::read_to_string(path) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    /// Compares `ratio` with the pinned entry, pinning it when absent.
    pub fn check_or_pin(&mut self, scenario: &str, ratio: f64) -> BaselineCheck {
        match self.entries.get(scenario) {
            Some(e) => {
                let rel_diff = if e.ratio == 0.0 { ratio.abs() } else { (ratio - e.ratio).abs() / e.ratio.abs() };
                BaselineCheck { pinned: e.ratio, rel_diff, tolerance: TOLERANCE, pass: rel_diff <= TOLERANCE, newly_pinned: false }
            }
            None => {
                self.entries.insert(scenario.to_string(), Entry { ratio, source: String::from("first run") });
                BaselineCheck { pinned: ratio, rel_diff: 0.0, tolerance: TOLERANCE, pass: true, newly_pinned: true }
            }
        }
    }
}

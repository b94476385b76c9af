use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Flagged,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Pass, detail: None, witness: None }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Fail, detail: Some(detail.into()), witness: None }
    }

    pub fn flagged(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Flagged, detail: Some(detail.into()), witness: None }
    }

    /// Pass when `ok`, otherwise fail with `detail`.
    pub fn expect(name: impl Into<String>, ok: bool, detail: impl FnOnce() -> String) -> Self {
        if ok {
            Check::pass(name)
        } else {
            Check::fail(name, detail())
        }
    }

    pub fn with_witness(mut self, witness: impl Into<Option<serde_json::Value>>) -> Self {
        self.witness = witness.into();
        self
    }
}

/// A data file produced by a scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, contents: impl Into<Vec<u8>>) -> Self {
        Artifact { name: name.into(), contents: contents.into() }
    }

    pub fn json(name: impl Into<String>, value: &impl Serialize) -> Self {
        let mut text = serde_json::to_string_pretty(value).expect("artifact values serialize");
        text.push('\n');
        Artifact::new(name, text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    pub checks: Vec<Check>,
    pub elapsed_ms: u128,
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
}

impl ScenarioReport {
    pub fn new(scenario: impl Into<String>, params: BTreeMap<String, String>) -> Self {
        ScenarioReport { scenario: scenario.into(), params, status: Status::Pass, checks: Vec::new(), elapsed_ms: 0, artifacts: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.status = self.status.max(check.status);
        self.checks.push(check);
    }

    pub fn attach(&mut self, artifact: Artifact) {
        self.artifacts.push(artifact);
    }

    /// True iff some check failed; flagged checks do not count.
    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: String,
    pub files: Vec<ManifestEntry>,
}

pub const REPORT_FILE: &str = "report.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes the data files, `report.json` and `manifest.json` into `dir`.
/// The manifest hashes the data files only; the report carries timings and is not listed.
pub fn export_artifacts(report: &ScenarioReport, dir: &Path) -> Result<Manifest, CliError> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut sorted: Vec<&Artifact> = report.artifacts.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    for a in sorted {
        fs::write(dir.join(&a.name), &a.contents)?;
        files.push(ManifestEntry { name: a.name.clone(), bytes: a.contents.len(), sha256: hex::encode(Sha256::digest(&a.contents)) });
    }
    let manifest = Manifest { scenario: report.scenario.clone(), files };
    write_json(&dir.join(REPORT_FILE), report)?;
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_is_the_worst_check() {
        let mut r = ScenarioReport::new("x", BTreeMap::new());
        r.push(Check::pass("a"));
        assert_eq!(r.status, Status::Pass);
        r.push(Check::flagged("b", "known"));
        assert_eq!(r.status, Status::Flagged);
        assert!(!r.failed());
        r.push(Check::fail("c", "bad"));
        r.push(Check::pass("d"));
        assert!(r.failed());
    }
}

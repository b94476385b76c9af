use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{CliError, Params};

pub const OUTPUT_DIR_VAR: &str = "ZALG_OUTPUT_DIR";
pub const CACHE_DIR_VAR: &str = "ZALG_CACHE_DIR";
pub const CONFIG_VAR: &str = "ZALG_CONFIG";
pub const DEFAULT_OUTPUT_DIR: &str = "zalg-out";

/// Config file schema:
///
/// ```toml
/// output_dir = "results"
/// cache_dir = "cache"
/// workers = 2
///
/// [params.rank]
/// type = "D4-3"
/// max-n = 8
/// ```
///
/// Every `[params.<scenario>]` value is passed to that scenario as a string.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub output_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    #[serde(default)]
    pub params: BTreeMap<String, BTreeMap<String, toml::Value>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parameters configured for `scenario`, rendered as strings.
    pub fn params_for(&self, scenario: &str) -> Params {
        let Some(table) = self.params.get(scenario) else {
            return Params::new();
        };
        table
            .iter()
            .map(|(k, v)| {
                let s = match v {
                    toml::Value::String(s) => s.clone(),
                    toml::Value::Array(items) => items.iter().map(render).collect::<Vec<_>>().join(","),
                    other => render(other),
                };
                (k.clone(), s)
            })
            .collect()
    }
}

fn render(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Resolved directories and pool size. Precedence: command-line flag, environment, config file, default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    pub output_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub workers: usize,
}

impl Settings {
    pub fn resolve(out_flag: Option<PathBuf>, cache_flag: Option<PathBuf>, workers_flag: Option<usize>, config: &ConfigFile) -> Self {
        let env = |var: &str| std::env::var_os(var).filter(|v| !v.is_empty()).map(PathBuf::from);
        let output_dir = out_flag
            .or_else(|| env(OUTPUT_DIR_VAR))
            .or_else(|| config.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        let cache_dir = cache_flag.or_else(|| env(CACHE_DIR_VAR)).or_else(|| config.cache_dir.clone());
        let workers = workers_flag.or(config.workers).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
        Settings { output_dir, cache_dir, workers }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_are_stringified() {
        let cfg = ConfigFile::parse("workers = 3\n[params.rank]\ntype = \"D4-3\"\nmax-n = 8\na = [1, 2]\n").unwrap();
        assert_eq!(cfg.workers, Some(3));
        let p = cfg.params_for("rank");
        assert_eq!(p["type"], "D4-3");
        assert_eq!(p["max-n"], "8");
        assert_eq!(p["a"], "1,2");
        assert!(cfg.params_for("kernel").is_empty());
    }

    #[test]
    fn unknown_top_level_keys_are_rejected() {
        assert!(matches!(ConfigFile::parse("outputdir = \"x\"\n"), Err(CliError::Config(_))));
    }
}

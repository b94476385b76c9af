//! Batch front-end: named verification scenarios with JSON reports and hashed artifacts.

pub mod config;
pub mod report;
pub mod scenarios;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub use config::{ConfigFile, Settings};
pub use report::{export_artifacts, Artifact, Check, Manifest, ScenarioReport, Status};
pub use scenarios::{run_scenario, Context, SCENARIOS};

/// Scenario parameters as key-value strings, e.g. `max-n = "60"`.
pub type Params = BTreeMap<String, String>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("scenario `{scenario}` has no parameter `{key}`")]
    UnknownParam { scenario: String, key: String },
    #[error("scenario `{scenario}`: invalid {key} `{value}`: {reason}")]
    InvalidParam { scenario: String, key: String, value: String, reason: String },
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code: 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownScenario(_)
            | CliError::UnknownParam { .. }
            | CliError::InvalidParam { .. }
            | CliError::Usage(_)
            | CliError::Config(_) => 2,
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }
}

/// Runs `jobs` on a pool of `workers` threads; results come back in job order.
pub fn run_many(jobs: &[(String, Params)], ctx: &Context, workers: usize) -> Vec<Result<ScenarioReport, CliError>> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<ScenarioReport, CliError>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, jobs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((name, params)) = jobs.get(i) else { break };
                let result = run_scenario(name, params, ctx);
                slots.lock().expect("result slots")[i] = Some(result);
            });
        }
    });
    slots.into_inner().expect("result slots").into_iter().map(|r| r.expect("every job ran")).collect()
}

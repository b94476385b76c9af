use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zalg_cli::config::CONFIG_VAR;
use zalg_cli::{export_artifacts, run_many, CliError, ConfigFile, Context, Params, ScenarioReport, Settings, Status, SCENARIOS};

/// Exact verification scenarios for partition identities, q-difference recurrences and
/// twisted Z-operator algebras.
#[derive(Debug, Parser)]
#[command(name = "zalg", version)]
struct Cli {
    /// Output directory; each scenario writes into `<out>/<scenario>/` (env ZALG_OUTPUT_DIR).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cache directory for relation verdicts (env ZALG_CACHE_DIR).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// TOML config file with defaults and per-scenario parameters (env ZALG_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Scenario worker threads for `--all`.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Run every scenario with its default parameters.
    #[arg(long)]
    all: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare partition counts of two sets (all reference pairs by default).
    PtEquiv {
        #[arg(long)]
        lhs: Option<String>,
        #[arg(long)]
        rhs: Option<String>,
        #[arg(long)]
        max_n: Option<String>,
        #[arg(long)]
        brute_n: Option<String>,
    },
    /// Compare the KR_a triple sums with brute-force bivariate counts.
    TripleSum {
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        order: Option<String>,
    },
    /// Build the L_a avoidance automata and compare L_3 with the reference table.
    Automaton {
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        check_n: Option<String>,
    },
    /// Derive scalar recurrences for L_a by uncoupling the automaton system.
    QdiffDerive {
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        order: Option<String>,
    },
    /// Check the published L_a recurrences against the generating functions.
    QdiffVerifyPaper {
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        order: Option<String>,
    },
    /// Verify the Fourier identities of the relation series.
    Fourier {
        #[arg(long)]
        identity: Option<String>,
        #[arg(long)]
        radius: Option<String>,
    },
    /// Verify the four Z-operator relations on the vacuum space.
    Relations {
        #[arg(long)]
        relation: Option<String>,
        #[arg(long)]
        bound: Option<String>,
        #[arg(long)]
        max_deg: Option<String>,
    },
    /// Check the kernels of the D4-3 highest-weight vectors.
    Kernel {
        #[arg(long)]
        max_mode: Option<String>,
    },
    /// Compare partition counts with ranks of Z-monomial families.
    Rank {
        #[arg(long = "type")]
        kind: Option<String>,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        max_n: Option<String>,
    },
    /// Reproduce the cyclotomic and straightening constants.
    Constants,
}

fn params<const N: usize>(pairs: [(&str, Option<String>); N]) -> Params {
    pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))).collect()
}

impl Command {
    fn into_job(self) -> (&'static str, Params) {
        match self {
            Command::PtEquiv { lhs, rhs, max_n, brute_n } => {
                ("pt-equiv", params([("lhs", lhs), ("rhs", rhs), ("max-n", max_n), ("brute-n", brute_n)]))
            }
            Command::TripleSum { a, order } => ("triple-sum", params([("a", a), ("order", order)])),
            Command::Automaton { a, check_n } => ("automaton", params([("a", a), ("check-n", check_n)])),
            Command::QdiffDerive { a, order } => ("qdiff-derive", params([("a", a), ("order", order)])),
            Command::QdiffVerifyPaper { a, order } => ("qdiff-verify-paper", params([("a", a), ("order", order)])),
            Command::Fourier { identity, radius } => ("fourier", params([("identity", identity), ("radius", radius)])),
            Command::Relations { relation, bound, max_deg } => {
                ("relations", params([("relation", relation), ("bound", bound), ("max-deg", max_deg)]))
            }
            Command::Kernel { max_mode } => ("kernel", params([("max-mode", max_mode)])),
            Command::Rank { kind, a, max_n } => ("rank", params([("type", kind), ("a", a), ("max-n", max_n)])),
            Command::Constants => ("constants", Params::new()),
        }
    }
}

fn print_report(report: &ScenarioReport) {
    let label = match report.status {
        Status::Pass => "PASS",
        Status::Flagged => "PASS (flagged)",
        Status::Fail => "FAIL",
    };
    let passed = report.checks.iter().filter(|c| c.status != Status::Fail).count();
    println!("{}: {label} ({passed}/{} checks, {} ms)", report.scenario, report.checks.len(), report.elapsed_ms);
    for c in report.checks.iter().filter(|c| c.status != Status::Pass) {
        let tag = if c.status == Status::Fail { "FAIL" } else { "FLAGGED" };
        println!("  {tag} {}: {}", c.name, c.detail.as_deref().unwrap_or(""));
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let config_path = cli.config.clone().or_else(|| std::env::var_os(CONFIG_VAR).filter(|v| !v.is_empty()).map(PathBuf::from));
    let config = match &config_path {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let settings = Settings::resolve(cli.out, cli.cache, cli.workers, &config);
    let jobs: Vec<(String, Params)> = match (cli.all, cli.command) {
        (true, Some(_)) => return Err(CliError::Usage("--all takes no scenario".into())),
        (true, None) => SCENARIOS.iter().map(|s| (s.to_string(), config.params_for(s))).collect(),
        (false, Some(cmd)) => {
            let (name, flags) = cmd.into_job();
            let mut merged = config.params_for(name);
            merged.extend(flags);
            vec![(name.to_string(), merged)]
        }
        (false, None) => return Err(CliError::Usage("give a scenario or --all".into())),
    };
    let ctx = Context { cache_dir: settings.cache_dir.clone() };
    let mut ok = true;
    for result in run_many(&jobs, &ctx, settings.workers) {
        let report = result?;
        export_artifacts(&report, &settings.output_dir.join(&report.scenario))?;
        print_report(&report);
        ok &= !report.failed();
    }
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("zalg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        super::Cli::command().debug_assert();
    }
}

//! `hitemp`: command-line front end to the `hitemp_core` campaigns.
//!
//! Exit status: 0 on success, 1 when a campaign assertion or acceptance
//! criterion fails, 2 on usage or configuration errors.

mod args;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use hitemp_core::acceptance::{run_criterion, CriterionOutcome, CRITERIA};
use hitemp_core::analytic::quadrature::QuadratureSpec;
use hitemp_core::analytic::evaluate_rate;
use hitemp_core::eig::{default_tol, full_spectrum};
use hitemp_core::experiments::csv::{esd_csv, partition_csv, rate_csv, real, sweep_csv, tail_csv};
use hitemp_core::experiments::{
    all_passed, run_esd_check, run_tail_sweep, run_tailbound_check, Assertion, ExperimentConfig,
};
use hitemp_core::model::{EnsembleParams, RegimeSchedule};
use hitemp_core::partition::ratio_sweep;
use hitemp_core::sampler::{sample_matrix, SeededStream, TridiagonalMatrix};

use args::{Cli, Command, ConfigArgs, OutputArgs};

#[derive(Debug)]
enum Failure {
    /// Bad flags, unreadable or invalid configuration: exit 2.
    Usage(String),
    /// A computation failed at run time: exit 1.
    Runtime(String),
}

impl From<hitemp_core::Error> for Failure {
    fn from(e: hitemp_core::Error) -> Self {
        match e {
            hitemp_core::Error::QuadratureFailure { .. } => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

#[derive(Debug, Serialize, Deserialize)]
struct RunManifest {
    command: String,
    version: String,
    master_seed: u64,
    timestamp: String,
    config: ExperimentConfig,
    outputs: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    command: &'a str,
    passed: bool,
    assertions: &'a [T],
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Sample(a) => {
            let params = EnsembleParams::with_convention(a.n, a.beta, a.alpha_convention.into())?;
            let t = sample_matrix(&params, &mut SeededStream::new(a.seed, a.stream))?;
            let cfg = ExperimentConfig {
                schedule: RegimeSchedule::from_name("const", a.beta)?,
                n_values: vec![a.n],
                replicas: 1,
                master_seed: a.seed,
                alpha_convention: a.alpha_convention.into(),
                ..Default::default()
            };
            finish("sample", &cfg, &a.output, &t.to_text(), None::<&[Assertion]>)
        }
        Command::Eig(a) => {
            let text = read_input(&a.matrix)?;
            let t = TridiagonalMatrix::from_text(&text)?;
            let tol = a.tol.unwrap_or_else(|| default_tol(&t));
            let spec = full_spectrum(&t, tol)?;
            let mut out = String::from("k,lambda\n");
            for (k, l) in spec.eigenvalues.iter().enumerate() {
                out.push_str(&format!("{k},{}\n", real(*l)));
            }
            finish("eig", &ExperimentConfig::default(), &a.output, &out, None::<&[Assertion]>)
        }
        Command::Rate(a) => {
            let mut cfg = resolve_config(&a.config)?;
            if let Some(x) = a.x {
                cfg.x_grid = x.0;
            }
            let spec = QuadratureSpec::default();
            let rows = cfg
                .x_grid
                .iter()
                .map(|&x| evaluate_rate(x, a.method.into(), &spec))
                .collect::<Result<Vec<_>, _>>()?;
            finish("rate", &cfg, &a.output, &rate_csv(&rows), None::<&[Assertion]>)
        }
        Command::Partition(a) => {
            let cfg = resolve_config(&a.config)?;
            let rows = ratio_sweep(&cfg.schedule, &cfg.n_values)?;
            finish("partition", &cfg, &a.output, &partition_csv(&rows), None::<&[Assertion]>)
        }
        Command::Tail(a) => {
            let mut cfg = resolve_config(&a.config)?;
            if let Some(t) = a.t {
                cfg.t_grid = t.0;
            }
            let report = run_tailbound_check(&cfg)?;
            finish("tail", &cfg, &a.output, &tail_csv(&report.rows), Some(&report.assertions))
        }
        Command::Sweep(a) => {
            let mut cfg = resolve_config(&a.config)?;
            if let Some(x) = a.x {
                cfg.x_grid = x.0;
            }
            let report = run_tail_sweep(&cfg)?;
            finish("sweep", &cfg, &a.output, &sweep_csv(&report.rows), Some(&report.assertions))
        }
        Command::Esd(a) => {
            let cfg = resolve_config(&a.config)?;
            let report = run_esd_check(&cfg)?;
            finish("esd", &cfg, &a.output, &esd_csv(&report.rows), Some(&report.assertions))
        }
        Command::Check(a) => {
            let workers = a.workers.unwrap_or_else(default_workers);
            let ids: Vec<u8> = if a.criteria.is_empty() {
                CRITERIA.iter().map(|c| c.0).collect()
            } else {
                a.criteria
            };
            let mut outcomes: Vec<CriterionOutcome> = Vec::new();
            for id in ids {
                let outcome = run_criterion(id, workers)
                    .ok_or_else(|| Failure::Usage(format!("unknown criterion {id}; valid ids are 1 to 10")))?;
                // Progress goes to stderr when stdout is the report.
                eprintln!("{}", outcome.line());
                outcomes.push(outcome);
            }
            let report: String = outcomes.iter().map(|o| o.line() + "\n").collect();
            let cfg = ExperimentConfig {
                workers,
                ..Default::default()
            };
            let passed = outcomes.iter().all(|o| o.passed);
            write_outputs("check", &cfg, &a.output, &report, passed, Some(&outcomes))?;
            Ok(passed)
        }
    }
}

fn finish(
    command: &str,
    cfg: &ExperimentConfig,
    output: &OutputArgs,
    body: &str,
    assertions: Option<&[Assertion]>,
) -> Outcome {
    let passed = assertions.is_none_or(all_passed);
    for a in assertions.unwrap_or_default().iter().filter(|a| !a.passed) {
        eprintln!("assertion failed: {}: {}", a.name, a.detail);
    }
    write_outputs(command, cfg, output, body, passed, assertions)?;
    Ok(passed)
}

fn write_outputs<T: Serialize>(
    command: &str,
    cfg: &ExperimentConfig,
    output: &OutputArgs,
    body: &str,
    passed: bool,
    assertions: Option<&[T]>,
) -> Result<(), Failure> {
    let mut outputs = Vec::new();
    match &output.out {
        Some(path) => {
            write_file(path, body)?;
            outputs.push(path.clone());
        }
        None => io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Failure::Runtime(format!("writing stdout: {e}")))?,
    }
    if let Some(path) = &output.summary {
        let summary = Summary {
            command,
            passed,
            assertions: assertions.unwrap_or_default(),
        };
        write_file(path, &to_json(&summary)?)?;
        outputs.push(path.clone());
    }
    if let Some(path) = &output.manifest {
        let manifest = RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: cfg.master_seed,
            timestamp: chrono::Utc::now().to_rfc3339(),
            config: cfg.clone(),
            outputs,
        };
        write_file(path, &to_json(&manifest)?)?;
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Runtime(format!("serializing JSON: {e}")))
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Defaults, then the config file, then flags.
fn resolve_config(a: &ConfigArgs) -> Result<ExperimentConfig, Failure> {
    let (mut cfg, file_sets_workers) = match &a.config {
        Some(path) => load_config(path)?,
        None => (ExperimentConfig::default(), false),
    };
    if a.schedule.is_some() || a.c.is_some() {
        let name = a.schedule.clone().unwrap_or_else(|| cfg.schedule.name.clone());
        let c = a.c.unwrap_or_else(|| if a.config.is_some() { cfg.schedule.rule.c() } else { 1.0 });
        cfg.schedule = RegimeSchedule::from_name(&name, c)?;
    }
    if let Some(n) = &a.n {
        cfg.n_values = n.0.clone();
    }
    if let Some(r) = a.replicas {
        cfg.replicas = r;
    }
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    if let Some(t) = a.solver_tol {
        cfg.solver_tol = t;
    }
    if let Some(c) = a.alpha_convention {
        cfg.alpha_convention = c.into();
    }
    cfg.workers = match a.workers {
        Some(w) => w,
        None if file_sets_workers => cfg.workers,
        None => default_workers(),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// A bare ExperimentConfig or a RunManifest; also reports whether the file
/// pins the worker count.
fn load_config(path: &Path) -> Result<(ExperimentConfig, bool), Failure> {
    let text = read_input(path)?;
    let bad = |e: serde_json::Error| Failure::Usage(format!("invalid config {}: {e}", path.display()));
    let mut value: Value = serde_json::from_str(&text).map_err(bad)?;
    if let Some(inner) = value.get_mut("config") {
        value = inner.take();
    }
    let sets_workers = value.get("workers").is_some();
    let cfg = serde_json::from_value(value).map_err(bad)?;
    Ok((cfg, sets_workers))
}

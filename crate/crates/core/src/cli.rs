//! Batch front end: `simulate`, `verify` and `sweep`.
//!
//! Exit codes: 0 success, 1 failed verification property, 2 invalid
//! configuration or arguments, 3 simulation divergence, 4 I/O failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::config::{self, ConfigError};
use crate::error::Error;
use crate::fuzzy::{FuzzyPartition, MembershipFunction};
use crate::lyapunov;
use crate::metrics;
use crate::sim::{run_closed_loop, SimConfig, SimRecord, SimRun};
use crate::timeseries;
use crate::verify::{self, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Parameters accepted by `sweep --param`.
pub const SWEEP_PARAMS: [&str; 8] = ["kappa", "phi", "lambda", "delta_l", "delta_r", "mu", "m", "b"];

#[derive(Debug, Parser)]
#[command(name = "dzfuzzy", version, about = "Adaptive fuzzy dead-zone compensation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one closed-loop experiment and write timeseries.csv + manifest.txt
    Simulate(SimulateArgs),
    /// Run the property suite and report pass/fail per property
    Verify(VerifyArgs),
    /// Repeat an experiment over a list of values of one parameter
    Sweep(SweepArgs),
}

/// Per-key overrides; they win over the config file.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long, value_name = "S")]
    pub t_end: Option<String>,
    #[arg(long, value_name = "HZ")]
    pub plant_rate: Option<String>,
    #[arg(long, value_name = "HZ")]
    pub control_rate: Option<String>,
    #[arg(long, value_name = "X,XDOT", allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta_l: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta_r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    #[arg(long, value_name = "C1,C2,...", allow_hyphen_values = true)]
    pub centers: Option<String>,
    #[arg(long, value_name = "BOOL")]
    pub log_dhat: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("t_end", &self.t_end),
            ("plant_rate", &self.plant_rate),
            ("control_rate", &self.control_rate),
            ("x0", &self.x0),
            ("mu", &self.mu),
            ("b", &self.b),
            ("m", &self.m),
            ("delta_l", &self.delta_l),
            ("delta_r", &self.delta_r),
            ("lambda", &self.lambda),
            ("kappa", &self.kappa),
            ("phi", &self.phi),
            ("centers", &self.centers),
            ("log_dhat", &self.log_dhat),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Config file; defaults apply when omitted
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing)
    #[arg(long)]
    pub out: PathBuf,
    /// Extra RMS window `T0:T1` for the manifest (repeatable)
    #[arg(long = "window", value_name = "T0:T1")]
    pub windows: Vec<String>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Mutation hook: flip the sign of the adaptation law
    #[arg(long, hide = true)]
    pub inject_sign_flip: bool,
    /// Mutation hook: use a partition that leaves a gap around zero
    #[arg(long, hide = true)]
    pub inject_gap: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// One of kappa, phi, lambda, delta_l, delta_r, mu, m, b
    #[arg(long)]
    pub param: String,
    /// Comma-separated values; may be empty
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub values: String,
    /// Output CSV; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Sweep(args) => cmd_sweep(&args),
    }
}

fn config_failure(e: &ConfigError) -> i32 {
    eprintln!("error: {e}");
    EXIT_CONFIG
}

/// Loads, overrides and validates a configuration.
pub fn resolve_config(path: Option<&Path>, overrides: &Overrides) -> Result<SimConfig, ConfigError> {
    let mut cfg = match path {
        Some(p) => config::load(p)?,
        None => SimConfig::default(),
    };
    for (k, v) in overrides.pairs() {
        config::set(&mut cfg, k, v)?;
    }
    config::validate(&cfg)?;
    Ok(cfg)
}

fn parse_window(s: &str) -> Option<(f64, f64)> {
    let (a, b) = s.split_once(':')?;
    let (a, b) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
    (a <= b).then_some((a, b))
}

fn unix_seconds() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn fmt(v: f64) -> String {
    config::format_value(v)
}

/// Metric lines for the manifest.
pub fn summary(run: &SimRun, cfg: &SimConfig, windows: &[(f64, f64)]) -> Vec<(String, String)> {
    let records = &run.records;
    let mut out = vec![("records".to_string(), records.len().to_string())];
    for &(a, b) in windows {
        out.push((
            format!("rms_xtilde_{}_{}", fmt(a), fmt(b)),
            fmt(metrics::rms_tracking_error(records, a, b)),
        ));
    }
    out.push(("max_abs_epsilon".into(), fmt(metrics::max_abs_epsilon(records))));
    out.push(("max_abs_u".into(), fmt(metrics::max_abs_control(records))));
    out.push(("epsilon_converged".into(), metrics::epsilon_converged(records).to_string()));
    let v_final = (|| -> crate::Result<f64> {
        let fit = lyapunov::fit_rule_outputs(run.controller.partition(), &cfg.dead_zone()?, lyapunov::DEFAULT_GRID)?;
        let eps = records.last().map_or(0.0, |r| r.epsilon);
        lyapunov::surrogate(eps, run.controller.rule_outputs().as_slice(), &fit.rule_outputs, &cfg.gains()?)
    })();
    out.push((
        "final_v_surrogate".into(),
        match v_final {
            Ok(v) => fmt(v),
            Err(e) => format!("undefined ({e})"),
        },
    ));
    out
}

pub fn cmd_simulate(args: &SimulateArgs) -> i32 {
    let cfg = match resolve_config(args.config.as_deref(), &args.overrides) {
        Ok(c) => c,
        Err(e) => return config_failure(&e),
    };
    let mut windows = Vec::new();
    for w in &args.windows {
        match parse_window(w) {
            Some(win) => windows.push(win),
            None => {
                eprintln!("error: invalid window `{w}`, expected T0:T1");
                return EXIT_CONFIG;
            }
        }
    }
    if windows.is_empty() {
        let q = cfg.t_end / 4.0;
        windows = vec![(0.0, q), (cfg.t_end - q, cfg.t_end)];
    }

    let started = unix_seconds();
    let run = match run_closed_loop(&cfg) {
        Ok(r) => r,
        Err(Error::Divergence { t }) => {
            eprintln!("error: simulation diverged at t = {t} s");
            return EXIT_DIVERGED;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let finished = unix_seconds();

    let csv_path = args.out.join("timeseries.csv");
    let manifest_path = args.out.join("manifest.txt");
    let written = (|| -> Result<(), Box<dyn std::error::Error>> {
        fs::create_dir_all(&args.out)?;
        let rules = if cfg.log_dhat { run.controller.partition().len() } else { 0 };
        let file = std::io::BufWriter::new(fs::File::create(&csv_path)?);
        timeseries::write(file, &run.records, rules)?;

        let mut m = std::io::BufWriter::new(fs::File::create(&manifest_path)?);
        for (k, v) in config::echo(&cfg) {
            writeln!(m, "{k} = {v}")?;
        }
        writeln!(m, "started_unix = {started:.3}")?;
        writeln!(m, "finished_unix = {finished:.3}")?;
        writeln!(m, "timeseries = {}", csv_path.display())?;
        writeln!(m, "manifest = {}", manifest_path.display())?;
        for (k, v) in summary(&run, &cfg, &windows) {
            writeln!(m, "{k} = {v}")?;
        }
        m.flush()?;
        Ok(())
    })();
    if let Err(e) = written {
        eprintln!("error: writing outputs: {e}");
        return EXIT_IO;
    }
    println!(
        "wrote {} records to {} ({})",
        run.records.len(),
        csv_path.display(),
        manifest_path.display()
    );
    EXIT_OK
}

/// Partition with no rule covering `(-0.05, 0.05)`.
fn gapped_partition() -> FuzzyPartition {
    let members = vec![
        MembershipFunction::left_shoulder(-0.5, -0.1).expect("valid"),
        MembershipFunction::triangular(-0.5, -0.1, -0.05).expect("valid"),
        MembershipFunction::triangular(0.05, 0.1, 0.5).expect("valid"),
        MembershipFunction::right_shoulder(0.1, 0.5).expect("valid"),
    ];
    FuzzyPartition::from_members(members).expect("centers increase")
}

pub fn cmd_verify(args: &VerifyArgs) -> i32 {
    let cfg = match resolve_config(args.config.as_deref(), &Overrides::default()) {
        Ok(c) => c,
        Err(e) => return config_failure(&e),
    };
    let opts = VerifyOptions {
        config: cfg,
        invert_adaptation: args.inject_sign_flip,
        partition: args.inject_gap.then(gapped_partition),
    };
    let results = verify::run_suite(&opts);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        println!("all {} properties passed", results.len());
        EXIT_OK
    } else {
        println!("failed: {}", failed.join(", "));
        EXIT_VERIFY_FAILED
    }
}

/// One sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub rms_xtilde: f64,
    pub max_abs_u: f64,
    pub epsilon_converged: bool,
}

fn sweep_row(value: f64, records: Option<&[SimRecord]>, t_end: f64) -> SweepRow {
    match records {
        Some(r) => SweepRow {
            value,
            rms_xtilde: metrics::rms_tracking_error(r, 0.75 * t_end, t_end),
            max_abs_u: metrics::max_abs_control(r),
            epsilon_converged: metrics::epsilon_converged(r),
        },
        None => SweepRow {
            value,
            rms_xtilde: f64::NAN,
            max_abs_u: f64::NAN,
            epsilon_converged: false,
        },
    }
}

/// Runs `base` once per value of `param`. Divergent runs yield NaN metrics.
pub fn sweep(base: &SimConfig, param: &str, values: &[f64]) -> Result<Vec<SweepRow>, ConfigError> {
    if !SWEEP_PARAMS.contains(&param) {
        return Err(ConfigError::Key {
            key: param.to_string(),
            reason: format!("not a sweep parameter; expected one of {}", SWEEP_PARAMS.join(", ")),
        });
    }
    let configs = values
        .iter()
        .map(|&v| {
            let mut cfg = base.clone();
            config::set(&mut cfg, param, &fmt(v))?;
            config::validate(&cfg)?;
            Ok(cfg)
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    Ok(configs
        .par_iter()
        .zip(values.par_iter())
        .map(|(cfg, &v)| {
            let run = run_closed_loop(cfg).ok();
            sweep_row(v, run.as_ref().map(|r| r.records.as_slice()), cfg.t_end)
        })
        .collect())
}

pub fn write_sweep<W: Write>(out: W, param: &str, rows: &[SweepRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([param, "rms_xtilde", "max_abs_u", "epsilon_converged"])?;
    for r in rows {
        w.write_record([
            fmt(r.value),
            timeseries::format_float(r.rms_xtilde),
            timeseries::format_float(r.max_abs_u),
            r.epsilon_converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs) -> i32 {
    let base = match resolve_config(args.config.as_deref(), &Overrides::default()) {
        Ok(c) => c,
        Err(e) => return config_failure(&e),
    };
    let values: Result<Vec<f64>, _> = args
        .values
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse::<f64>)
        .collect();
    let values = match values {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: --values: {e}");
            return EXIT_CONFIG;
        }
    };
    let rows = match sweep(&base, &args.param, &values) {
        Ok(r) => r,
        Err(e) => return config_failure(&e),
    };
    let result = match &args.out {
        Some(path) => fs::File::create(path)
            .map_err(csv::Error::from)
            .and_then(|f| write_sweep(f, &args.param, &rows)),
        None => write_sweep(std::io::stdout().lock(), &args.param, &rows),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: writing sweep table: {e}");
            EXIT_IO
        }
    }
}

//! `ergoshift`: runs one experiment, writes a JSON report and CSV tables to `--out`.
//!
//! Exit codes: 0 all checks passed, 1 a check failed (or internal error), 2 bad
//! configuration or input, 3 precision or frequency budget exhausted.

mod config;
mod experiments;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ergoshift::battery::{run_battery, BatteryOptions, Check, Scale, DEFAULT_SEED};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use serde_with::skip_serializing_none;

use config::{merge, ConfigFile};
use experiments::{Arithmetic, DomainKind, Env, Outcome, System};

// Summary lines go to stdout; a closed pipe (`| head`) is not an error once the report is written.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] ergoshift::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use ergoshift::Error as E;
        match self {
            Self::Config(_) => 2,
            Self::Io(_) => 1,
            Self::Core(e) => match e {
                E::PrecisionExhausted(_) | E::FrequencyOverflow { .. } | E::WindowExhausted | E::DegreeCap { .. } => 3,
                E::Internal(_) => 1,
                _ => 2,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "ergoshift", version, about = "Convergence-rate experiments for ergodic means of shift operators")]
struct Cli {
    /// TOML file with `kind = "..."` and the experiment parameters; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for the report and tables.
    #[arg(long, global = true, default_value = "ergoshift-out")]
    out: PathBuf,
    /// Seed for randomized experiments (required by them).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Exact rational arithmetic.
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,
    /// Floating-point or fixed-point arithmetic where the experiment supports it.
    #[arg(long, global = true)]
    float: bool,
    #[arg(long, global = true, hide = true)]
    negative_control: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral class of an integer matrix.
    Classify(ClassifyArgs),
    /// Shell labels and orbit representatives on a ball of frequencies.
    Orbits(OrbitsArgs),
    /// Shortest vectors of A^k Z^2, checked against brute force.
    Delta(DeltaArgs),
    /// Weighted deviation profile of ergodic means along one orbit.
    Rate(RateArgs),
    /// Shift covariance of a Walsh function under the baker map.
    Walsh(WalshArgs),
    /// Exact mean-norm bound for a Laguerre expansion.
    Laguerre(LaguerreArgs),
    /// Exact mean-norm bound for a shift coefficient vector.
    Norm(NormArgs),
    /// Modulus of continuity and the dyadic log-weight bound.
    Modulus(ModulusArgs),
    /// Visiting frequency of a domain along a toral orbit.
    Discrepancy(DiscrepancyArgs),
    /// Weighted maximal functions S and S~ of a sequence.
    Maximal(MaximalArgs),
    /// Exact norm ratios of the Banach-space witness.
    Witness(WitnessArgs),
    /// The fixed property battery.
    Suite(SuiteArgs),
}

impl Command {
    fn kind(&self) -> &'static str {
        match self {
            Self::Classify(_) => "classify",
            Self::Orbits(_) => "orbits",
            Self::Delta(_) => "delta",
            Self::Rate(_) => "rate",
            Self::Walsh(_) => "walsh",
            Self::Laguerre(_) => "laguerre",
            Self::Norm(_) => "norm",
            Self::Modulus(_) => "modulus",
            Self::Discrepancy(_) => "discrepancy",
            Self::Maximal(_) => "maximal",
            Self::Witness(_) => "witness",
            Self::Suite(_) => "suite",
        }
    }
}

#[skip_serializing_none]
#[derive(Args, Serialize, Default)]
struct ClassifyArgs {
    /// Integer matrix as JSON rows, e.g. '[[1,1],[1,0]]'.
    #[arg(long)]
    matrix: Option<String>,
}

#[skip_serializing_none]
#[derive(Args, Serialize, Default)]
struct OrbitsArgs {
    #[arg(long)]
    matrix: Option<String>,
    #[arg(long)]
    radius: Option<i64>,
}

#[skip_serializing_none]
#[derive(Args, Serialize, Default)]
struct DeltaArgs {
    #[arg(long)]
    matrix: Option<String>,
    #[arg(long)]
    k_max: Option<u32>,
    #[arg(long)]
    brute_force_budget: Option<u64>,
}

#[skip_serializing_none]
#[derive(Args, Serialize, Default)]
struct RateArgs {
    #[arg(long, value_enum)]
    system: Option<System>,
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    matrix: Option<String>,
    /// Fourier coefficient file (toral system).
    #[arg(long)]
    fourier: Option<String>,
    /// Frequency of a single character, e.g. 1,0.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    /// Starting point as rationals, e.g. 1/3,2/7; random when absent.
    #[arg(long)]
    point: Option<String>,
    #[arg(long)]
    point_bits: Option<u64>,
    #[arg(long)]
    fixed_bits: Option<u64>,
    /// Walsh expansion file (baker system).
    #[arg(long)]
    walsh: Option<String>,
    /// Signed Walsh indices, e.g. -2,1,3.
    #[arg(long, allow_hyphen_values = true)]
    indices: Option<String>,
    /// Laguerre coefficient file.
    #[arg(long)]
    laguerre: Option<String>,
    /// Degree of a single Laguerre polynomial.
    #[arg(long)]
    degree: Option<usize>,
    /// Laguerre evaluation point, a positive rational.
    #[arg(long)]
    x: Option<String>,
}

#[skip_serializing_none]
#[derive(Args, Serialize, Default)]
struct WalshArgs {
    #[arg(long, allow_hyphen_values = true)]
    indices: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
}

#[skip_serializing_none]
#[derive(Args, Serialize, Default)]
struct LaguerreArgs {
    #[arg(long)]
    laguerre: Option<String>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    n_max: Option<u64>,
}

#[skip_serializing_none]
#[derive(Args, Serialize, Default)]
struct NormArgs {
    /// Coefficient vector file.
    #[arg(long)]
    coeffs: Option<String>,
    #[arg(long)]
    n_max: Option<u64>,
}

#[skip_serializing_none]
#[derive(Args, Serialize, Default)]
struct ModulusArgs {
    #[arg(long)]
    fourier: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    /// Lower corner of a box indicator, e.g. 1/10,1/5.
    #[arg(long)]
    lo: Option<String>,
    #[arg(long)]
    hi: Option<String>,
    #[arg(long)]
    trunc: Option<i64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Dyadic depths J, e.g. 8,16.
    #[arg(long)]
    depths: Option<String>,
    #[arg(long)]
    directions: Option<usize>,
}

#[skip_serializing_none]
#[derive(Args, Serialize, Default)]
struct DiscrepancyArgs {
    #[arg(long)]
    matrix: Option<String>,
    #[arg(long, value_enum)]
    domain: Option<DomainKind>,
    #[arg(long)]
    lo: Option<String>,
    #[arg(long)]
    hi: Option<String>,
    #[arg(long)]
    center: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    /// Polygon vertices x1,y1,x2,y2,... counter-clockwise.
    #[arg(long)]
    vertices: Option<String>,
    #[arg(long)]
    point: Option<String>,
    #[arg(long)]
    point_bits: Option<u64>,
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Boundary shell widths, e.g. 1/100,1/50.
    #[arg(long)]
    shell_t: Option<String>,
    #[arg(long)]
    shell_samples: Option<usize>,
}

#[skip_serializing_none]
#[derive(Args, Serialize, Default)]
struct MaximalArgs {
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
}

#[skip_serializing_none]
#[derive(Args, Serialize, Default)]
struct WitnessArgs {
    #[arg(long)]
    n: Option<u64>,
    /// Values of H, e.g. 10,100,1000.
    #[arg(long)]
    h: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum SuiteLevel {
    Quick,
    Acceptance,
}

#[skip_serializing_none]
#[derive(Args, Serialize, Default)]
struct SuiteArgs {
    #[arg(value_enum)]
    level: Option<SuiteLevel>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SuiteParams {
    level: SuiteLevel,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self { level: SuiteLevel::Quick }
    }
}

/// Arithmetic each kind supports; the first entry is the default.
fn supported(kind: &str) -> &'static [Arithmetic] {
    match kind {
        "rate" => &[Arithmetic::Exact, Arithmetic::Float],
        "modulus" | "maximal" => &[Arithmetic::Float],
        "suite" => &[Arithmetic::Exact, Arithmetic::Float],
        _ => &[Arithmetic::Exact],
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    schema: u32,
    kind: &'a str,
    config: Value,
    arithmetic: Arithmetic,
    passed: bool,
    checks: &'a [Check],
    measured: &'a Value,
    outputs: Vec<String>,
    wall_clock_seconds: f64,
}

fn params_and_run<P, A>(file: &toml::Table, flags: &A, run: impl FnOnce(&P) -> Result<Outcome, CliError>) -> Result<(Value, Outcome), CliError>
where
    P: for<'de> Deserialize<'de> + Serialize,
    A: Serialize,
{
    let p: P = merge(file, flags)?;
    let echo = serde_json::to_value(&p).expect("parameters serialize");
    Ok((echo, run(&p)?))
}

/// Flags of the kind named in a config file when no subcommand was given.
fn default_command(kind: &str) -> Result<Command, CliError> {
    Ok(match kind {
        "classify" => Command::Classify(Default::default()),
        "orbits" => Command::Orbits(Default::default()),
        "delta" => Command::Delta(Default::default()),
        "rate" => Command::Rate(Default::default()),
        "walsh" => Command::Walsh(Default::default()),
        "laguerre" => Command::Laguerre(Default::default()),
        "norm" => Command::Norm(Default::default()),
        "modulus" => Command::Modulus(Default::default()),
        "discrepancy" => Command::Discrepancy(Default::default()),
        "maximal" => Command::Maximal(Default::default()),
        "witness" => Command::Witness(Default::default()),
        "suite" => Command::Suite(Default::default()),
        other => return Err(CliError::Config(format!("unknown experiment kind {other:?}"))),
    })
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let command = match (cli.command, &file.kind) {
        (Some(c), Some(kind)) if c.kind() != kind => {
            return Err(CliError::Config(format!("config is for {kind:?} but the command is {:?}", c.kind())));
        }
        (Some(c), _) => c,
        (None, Some(kind)) => default_command(kind)?,
        (None, None) => return Err(CliError::Config("no experiment given: use a subcommand or a config with `kind`".into())),
    };
    let kind = command.kind();
    let arithmetic = {
        let allowed = supported(kind);
        let wanted = match (cli.exact, cli.float) {
            (true, _) => Some(Arithmetic::Exact),
            (_, true) => Some(Arithmetic::Float),
            _ => None,
        };
        match wanted {
            Some(a) if !allowed.contains(&a) => {
                return Err(CliError::Config(format!("{kind} does not support --{a}")));
            }
            Some(a) => a,
            None => allowed[0],
        }
    };
    if cli.threads == 0 {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    let seed = cli.seed.or(file.seed);
    let mut env = Env { rng: seed.map(ChaCha8Rng::seed_from_u64), arithmetic, threads: cli.threads };
    let start = Instant::now();
    let params = &file.params;

    let (echo, outcome) = match &command {
        Command::Classify(a) => params_and_run(params, a, experiments::classify_run)?,
        Command::Orbits(a) => params_and_run(params, a, experiments::orbits_run)?,
        Command::Delta(a) => params_and_run(params, a, experiments::delta_run)?,
        Command::Rate(a) => params_and_run(params, a, |p| experiments::rate_run(p, &mut env))?,
        Command::Walsh(a) => params_and_run(params, a, |p| experiments::walsh_run(p, &mut env))?,
        Command::Laguerre(a) => params_and_run(params, a, experiments::laguerre_run)?,
        Command::Norm(a) => params_and_run(params, a, experiments::norm_run)?,
        Command::Modulus(a) => params_and_run(params, a, |p| experiments::modulus_run(p, &mut env))?,
        Command::Discrepancy(a) => params_and_run(params, a, |p| experiments::discrepancy_run(p, &mut env))?,
        Command::Maximal(a) => params_and_run(params, a, |p| experiments::maximal_run(p, &mut env))?,
        Command::Witness(a) => params_and_run(params, a, experiments::witness_run)?,
        Command::Suite(a) => {
            let p: SuiteParams = merge(params, a)?;
            let echo = serde_json::to_value(&p).expect("parameters serialize");
            (echo, suite_run(&p, seed.unwrap_or(DEFAULT_SEED), &env, cli.negative_control))
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    let passed = outcome.checks.iter().all(|c| c.holds);

    std::fs::create_dir_all(&cli.out)?;
    let mut outputs = Vec::new();
    for (name, contents) in &outcome.files {
        write(&cli.out, name, contents)?;
        outputs.push(name.clone());
    }
    let config = json!({
        "kind": kind,
        "seed": if kind == "suite" { Some(seed.unwrap_or(DEFAULT_SEED)) } else { seed },
        "threads": env.threads,
        "arithmetic": arithmetic,
        "params": echo,
    });
    let report = RunReport {
        schema: 1,
        kind,
        config,
        arithmetic,
        passed,
        checks: &outcome.checks,
        measured: &outcome.measured,
        outputs,
        wall_clock_seconds: seconds,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    write(&cli.out, "report.json", &(text + "\n"))?;

    say!("{kind}: {} ({seconds:.2}s)", if passed { "PASS" } else { "FAIL" });
    for c in &outcome.checks {
        say!("  {} {c}", if c.holds { "ok  " } else { "FAIL" });
    }
    if kind != "suite" {
        say!("  measured: {}", outcome.measured);
    }
    say!("  report: {}", cli.out.join("report.json").display());
    Ok(passed)
}

fn suite_run(p: &SuiteParams, seed: u64, env: &Env, negative_control: bool) -> Outcome {
    let scale = match p.level {
        SuiteLevel::Quick => Scale::Quick,
        SuiteLevel::Acceptance => Scale::Full,
    };
    let opts = BatteryOptions { scale, seed, threads: env.threads, negative_control };
    let report = run_battery(&opts);
    let mut checks = Vec::new();
    let mut files = Vec::new();
    for c in &report.criteria {
        say!("{}", c.summary_line());
        checks.extend(c.checks.iter().cloned().map(|mut check| {
            check.label = format!("criterion {}: {}", c.id, check.label);
            check
        }));
        if let Some(e) = &c.error {
            checks.push(Check::decided(format!("criterion {}: error {e}", c.id), 1.0, ergoshift::battery::Relation::Eq, 0.0, false));
        }
        files.extend(c.artifacts.iter().map(|a| (format!("criterion{}_{}", c.id, a.name), a.contents.clone())));
    }
    let criteria = serde_json::to_value(&report.criteria).expect("criteria serialize");
    Outcome { checks, measured: json!({"criteria": criteria}), files }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(ergoshift::Error::SingularMatrix).exit_code(), 2);
        assert_eq!(CliError::Core(ergoshift::Error::PrecisionExhausted("p".into())).exit_code(), 3);
        assert_eq!(CliError::Core(ergoshift::Error::FrequencyOverflow { bits: 9 }).exit_code(), 3);
        assert_eq!(CliError::Core(ergoshift::Error::Internal("i".into())).exit_code(), 1);
    }

    #[test]
    fn every_kind_has_a_default_command() {
        for kind in ["classify", "orbits", "delta", "rate", "walsh", "laguerre", "norm", "modulus", "discrepancy", "maximal", "witness", "suite"] {
            assert_eq!(default_command(kind).unwrap().kind(), kind);
        }
        assert!(default_command("nope").is_err());
    }

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

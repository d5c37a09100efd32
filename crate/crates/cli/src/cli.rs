//! Command-line definitions and config resolution: JSON file values are
//! overridden by flags, and the merged object is validated against the
//! experiment's parameter schema.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};
use crate::experiments::{
    AvgQfi, BsEquiv, CircuitConverge, Concentration, EnsembleChoice, Experiment, Futility, Loss, MzFi,
    ObservableChoice, SpaceChoice, StartChoice,
};
use crate::output::{sidecar, sidecar_path, RunInfo, Table};

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Parser)]
#[command(
    name = "metroscope",
    version = env!("METROSCOPE_VERSION"),
    about = "Monte Carlo experiments on the metrological usefulness of random quantum states",
    long_about = "Runs one named experiment, writes its results as CSV plus a JSON sidecar \
                  (config, seed, version, timing) and, with --check, exits with status 2 \
                  if any acceptance tolerance is violated."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every experiment.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// JSON file with parameters; flags given on the command line win.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// CSV output path; the sidecar goes next to it with a .json extension.
    #[arg(long, short, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Exit with status 2 if an acceptance tolerance is violated.
    #[arg(long)]
    #[serde(skip)]
    pub check: bool,
    /// Master seed of the per-sample random streams.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads (0: available parallelism); results do not depend on it.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

const AVG_QFI_HELP: &str = "CSV columns: space, N, d, D (Hilbert-space dimension), samples, skipped, mean, \
std_error, analytic (closed-form Haar average), z_score, rel_deviation, lambda (spectrum mixedness factor).";
const FUTILITY_HELP: &str = "CSV columns: quantity (mean_qfi or lu_qfi_<i>), N, value, std_error, reference \
(analytic mean, or the unoptimized QFI for lu rows), bound (local-unitary upper bound on the average).";
const LOSS_HELP: &str = "CSV columns: quantity (avg_qfi or ghz_qfi), N, k (particles lost), value, std_error, \
lower, upper (bounds on the average for pure initial states).";
const BS_EQUIV_HELP: &str = "CSV columns: comparison, N, parameter (η for the loss comparison), max_deviation, \
tolerance, pass.";
const MZ_FI_HELP: &str = "CSV columns: kind (mean_fi or scan_fraction_above_floor), N, phi, value, std_error, \
lower, upper (band for the Haar average; for scans lower is the floor), reference (N(N+1)/6, or the lowest scanned \
minimum).";
const CIRCUIT_HELP: &str = "CSV columns: K, mean_qfi, std_error_qfi, mean_fi_pi_2, std_error_fi_pi_2, \
mean_fi_pi_3, std_error_fi_pi_3, target_qfi (N(N+1)/3), target_fi (N(N+1)/6).";
const CONCENTRATION_HELP: &str = "CSV columns: N, eps, eps_relative (eps over the analytic mean), empirical \
(fraction with |f − mean| ≥ eps), std_error, bound, vacuous (bound ≥ 1), mean, std_dev, relative_std.";

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Average QFI over Haar-random pure, isospectral or depolarized states.
    #[command(name = "avg-qfi", after_help = AVG_QFI_HELP)]
    AvgQfi(AvgQfiArgs),
    /// Full-space states: average QFI against the local-unitary bound.
    #[command(after_help = FUTILITY_HELP)]
    Futility(FutilityArgs),
    /// Average QFI after losing k particles, and GHZ fragility.
    #[command(after_help = LOSS_HELP)]
    Loss(LossArgs),
    /// Beam-splitter loss vs partial trace, and the other exact oracle comparisons.
    #[command(name = "bs-equiv", after_help = BS_EQUIV_HELP)]
    BsEquiv(BsEquivArgs),
    /// Mach-Zehnder Fisher information of random symmetric states.
    #[command(name = "mz-fi", after_help = MZ_FI_HELP)]
    MzFi(MzFiArgs),
    /// QFI and FI of random-circuit states as the depth grows.
    #[command(name = "circuit-converge", after_help = CIRCUIT_HELP)]
    CircuitConverge(CircuitArgs),
    /// Empirical deviation tails against the concentration bounds.
    #[command(after_help = CONCENTRATION_HELP)]
    Concentration(ConcentrationArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct AvgQfiArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceChoice>,
    /// Particle numbers, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    /// Modes per particle.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Pure states (the default when no spectrum is given).
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub pure: bool,
    /// Depolarization weight.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Explicit spectrum, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
    /// Spectrum p_i ∝ exp(−decay·i).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Agreement threshold in standard errors.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    /// Relative tolerance for pure ensembles.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct FutilityArgs {
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Qubits in the local-unitary spot checks.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lu_n: Option<usize>,
    /// Number of spot-checked states (0 disables).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lu_states: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lu_sweeps: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct LossArgs {
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Lost particle counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ghz_tol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct BsEquivArgs {
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Transmissivities, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_states: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lift_n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct MzFiArgs {
    #[arg(long = "N", value_delimiter = ',')]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Phases, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<f64>>,
    /// States to scan over a full phase grid.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_states: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    /// Scan floor as a multiple of N².
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_threshold: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjecture_tol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct CircuitArgs {
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Circuit depths, comma separated.
    #[arg(long = "K", value_delimiter = ',')]
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub depths: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<StartChoice>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sufficiency_tol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct ConcentrationArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleChoice>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<ObservableChoice>,
    #[arg(long = "N", value_delimiter = ',')]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Deviations relative to the analytic mean, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

/// Merges the config file (if any) with the flags and validates the result.
pub fn resolve<P: Experiment>(flags: &impl Serialize, config: Option<&Path>) -> CliResult<P> {
    let mut merged = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::new(format!("cannot read config {}: {e}", path.display())))?;
            match serde_json::from_str::<Value>(&text)? {
                Value::Object(map) => map,
                _ => return Err(CliError::new("config file must hold a JSON object")),
            }
        }
        None => Map::new(),
    };
    if let Some(name) = merged.remove("experiment") {
        if name != Value::String(P::NAME.into()) {
            return Err(CliError::new(format!("config is for experiment {name}, not \"{}\"", P::NAME)));
        }
    }
    if let Value::Object(overrides) = serde_json::to_value(flags)? {
        merged.extend(overrides);
    }
    Ok(serde_json::from_value(Value::Object(merged))?)
}

/// Result of one invocation, before it is turned into an exit status.
pub struct Run {
    pub table: Table,
    pub csv_path: PathBuf,
    pub sidecar_path: PathBuf,
}

/// Resolves, runs and writes one experiment.
pub fn execute<P: Experiment>(flags: &impl Serialize, common: &Common) -> CliResult<Run> {
    let params: P = resolve(flags, common.config.as_deref())?;
    let start = Instant::now();
    let table = params.run()?;
    let elapsed = start.elapsed().as_secs_f64();
    let csv_path = common.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", P::NAME)));
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&csv_path, table.to_csv()?)?;
    let info = RunInfo {
        experiment: P::NAME,
        config: serde_json::to_value(&params)?,
        seed: params.seed(),
        wall_clock_seconds: elapsed,
        csv_path: &csv_path,
        checked: common.check,
    };
    let side = sidecar_path(&csv_path);
    std::fs::write(&side, serde_json::to_string_pretty(&sidecar(&info, &table))? + "\n")?;
    Ok(Run {
        table,
        csv_path,
        sidecar_path: side,
    })
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::AvgQfi(a) => &a.common,
            Command::Futility(a) => &a.common,
            Command::Loss(a) => &a.common,
            Command::BsEquiv(a) => &a.common,
            Command::MzFi(a) => &a.common,
            Command::CircuitConverge(a) => &a.common,
            Command::Concentration(a) => &a.common,
        }
    }

    pub fn execute(&self) -> CliResult<Run> {
        let common = self.common();
        match self {
            Command::AvgQfi(a) => execute::<AvgQfi>(a, common),
            Command::Futility(a) => execute::<Futility>(a, common),
            Command::Loss(a) => execute::<Loss>(a, common),
            Command::BsEquiv(a) => execute::<BsEquiv>(a, common),
            Command::MzFi(a) => execute::<MzFi>(a, common),
            Command::CircuitConverge(a) => execute::<CircuitConverge>(a, common),
            Command::Concentration(a) => execute::<Concentration>(a, common),
        }
    }
}

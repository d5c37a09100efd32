//! The named experiments. Each takes a fully resolved parameter set and
//! returns a table plus its acceptance checks.

use std::f64::consts::PI;

use metroscope::circuits::{circuit_convergence, StartState};
use metroscope::dicke::{dicke_embed, dicke_project, dicke_state, sym_power_lift, DickeBasis};
use metroscope::fisher::{
    analytic_avg_qfi, fi_avg_bounds, lambda_of_spectrum, loss_avg_bounds, lu_upper_bound, qfi, SpaceKind, Spectrum,
};
use metroscope::hamiltonian::{angular_momentum, Axis, LocalHamiltonian};
use metroscope::interferometer::{uniform_grid, MachZehnder};
use metroscope::linalg::{kron, max_abs_diff};
use metroscope::loss::{partial_trace_bruteforce, partial_trace_dicke, verify_bs_trace_equivalence};
use metroscope::lu::lu_optimize_qfi;
use metroscope::sampling::{
    concentration_report, derive_seed, ginibre_density, haar_unitary, haar_vector, mc_estimate, mc_estimate_multi,
    sample_state, stream_rng, EnsembleSpec, McConfig, Observable,
};
use metroscope::state::{full_dim, FullState, Payload, QuantumState, SymmetricState};
use metroscope::{CMat, CVec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::{Cell, CheckResult, Table};

/// A named experiment with its resolved parameters.
pub trait Experiment: DeserializeOwned + Serialize {
    const NAME: &'static str;
    fn seed(&self) -> u64;
    fn run(&self) -> CliResult<Table>;
}

/// Local generator used throughout: spin-(d−1)/2 `J_z`, which is `σ_z/2`
/// for qubits.
pub fn local_generator(d: usize) -> CliResult<LocalHamiltonian> {
    Ok(LocalHamiltonian::spin_z(d)?)
}

fn config(samples: usize, seed: u64, workers: usize) -> McConfig {
    McConfig::new(samples, seed).workers(workers)
}

fn require(cond: bool, msg: impl Into<String>) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::new(msg))
    }
}

fn non_empty<T>(v: &[T], what: &str) -> CliResult<()> {
    require(!v.is_empty(), format!("{what} must not be empty"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SpaceChoice {
    Sym,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StartChoice {
    Polarized,
    Balanced,
    Noon,
}

impl From<StartChoice> for StartState {
    fn from(s: StartChoice) -> Self {
        match s {
            StartChoice::Polarized => StartState::Polarized,
            StartChoice::Balanced => StartState::Balanced,
            StartChoice::Noon => StartState::Noon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleChoice {
    SymPure,
    SymIsospectral,
    SymDepolarized,
    FullPure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableChoice {
    Qfi,
    MzFi,
}

/// Spectrum `p_i ∝ exp(−decay·i)`.
fn decaying_spectrum(dim: usize, decay: f64) -> CliResult<Spectrum> {
    require(decay.is_finite() && decay >= 0.0, "decay must be a non-negative number")?;
    let w: Vec<f64> = (0..dim).map(|i| (-decay * i as f64).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(Spectrum::new(w.into_iter().map(|x| x / total).collect())?)
}

// ---------------------------------------------------------------- avg-qfi

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AvgQfi {
    pub space: SpaceChoice,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub d: usize,
    pub pure: bool,
    /// Depolarization weight of the symmetric ensemble.
    pub p: Option<f64>,
    /// Explicit spectrum (length must equal the symmetric dimension).
    pub spectrum: Option<Vec<f64>>,
    /// Exponentially decaying spectrum with this rate.
    pub decay: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub z_max: f64,
    /// Relative tolerance for pure ensembles.
    pub rel_tol: f64,
}

impl Default for AvgQfi {
    fn default() -> Self {
        Self {
            space: SpaceChoice::Sym,
            n: vec![20],
            d: 2,
            pure: false,
            p: None,
            spectrum: None,
            decay: None,
            samples: 2000,
            seed: 1,
            workers: 0,
            z_max: 3.0,
            rel_tol: 0.02,
        }
    }
}

impl Experiment for AvgQfi {
    const NAME: &'static str = "avg-qfi";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self) -> CliResult<Table> {
        non_empty(&self.n, "N")?;
        let choices = [self.p.is_some(), self.spectrum.is_some(), self.decay.is_some()];
        let mixed_choices = choices.iter().filter(|&&c| c).count();
        require(mixed_choices <= 1, "give at most one of p, spectrum and decay")?;
        require(!(self.pure && mixed_choices > 0), "--pure conflicts with p, spectrum and decay")?;
        let h = local_generator(self.d)?;
        let mut table = Table::new(&[
            "space", "N", "d", "D", "samples", "skipped", "mean", "std_error", "analytic", "z_score", "rel_deviation",
            "lambda",
        ]);
        for (i, &n) in self.n.iter().enumerate() {
            let (spec, kind, spectrum) = match self.space {
                SpaceChoice::Full => {
                    require(mixed_choices == 0, "the full-space ensemble supports pure states only")?;
                    let spec = EnsembleSpec::haar_full_pure(n, self.d)?;
                    (spec, SpaceKind::Full, Spectrum::pure(full_dim(n, self.d)?))
                }
                SpaceChoice::Sym => {
                    let dim = DickeBasis::new(n, self.d)?.dim();
                    if let Some(p) = self.p {
                        let spec = EnsembleSpec::haar_sym_depolarized(n, self.d, p)?;
                        (spec, SpaceKind::Symmetric, Spectrum::depolarized(dim, p)?)
                    } else {
                        let spectrum = match (&self.spectrum, self.decay) {
                            (Some(s), _) => Spectrum::new(s.clone())?,
                            (None, Some(rate)) => decaying_spectrum(dim, rate)?,
                            (None, None) => Spectrum::pure(dim),
                        };
                        let spec = EnsembleSpec::haar_sym_isospectral(n, self.d, spectrum.clone())?;
                        (spec, SpaceKind::Symmetric, spectrum)
                    }
                }
            };
            let dim = spectrum.len();
            let big = spec.collective(&h)?;
            let r = mc_estimate(|s| qfi(s, &big), &spec, &config(self.samples, derive_seed(self.seed, i as u64), self.workers))?;
            let analytic = analytic_avg_qfi(kind, n, self.d, &spectrum, h.tr_h2())?;
            let lambda = if dim >= 2 { lambda_of_spectrum(&spectrum, dim)?.lambda } else { 0.0 };
            let z = r.z_score(analytic);
            let rel = if analytic != 0.0 { (r.mean - analytic).abs() / analytic } else { r.mean.abs() };
            table.push(vec![
                Cell::from(format!("{:?}", self.space).to_lowercase()),
                n.into(),
                self.d.into(),
                dim.into(),
                r.n_samples.into(),
                r.skipped.into(),
                r.mean.into(),
                r.std_error.into(),
                analytic.into(),
                z.into(),
                rel.into(),
                lambda.into(),
            ]);
            table.checks.push(CheckResult::hard(
                format!("N={n} mean within {} std errors", self.z_max),
                z <= self.z_max,
                format!("mean {:.6} ± {:.6}, analytic {analytic:.6}, z {z:.3}", r.mean, r.std_error),
            ));
            if spectrum.values()[0] == 1.0 {
                table.checks.push(CheckResult::hard(
                    format!("N={n} mean within {}%", 100.0 * self.rel_tol),
                    rel <= self.rel_tol,
                    format!("relative deviation {rel:.5}"),
                ));
            }
        }
        Ok(table)
    }
}

// --------------------------------------------------------------- futility

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Futility {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub samples: usize,
    /// Qubit count of the local-unitary spot checks.
    pub lu_n: usize,
    pub lu_states: usize,
    pub lu_sweeps: usize,
    pub seed: u64,
    pub workers: usize,
    pub z_max: f64,
}

impl Default for Futility {
    fn default() -> Self {
        Self {
            n: 10,
            d: 2,
            samples: 2000,
            lu_n: 8,
            lu_states: 10,
            lu_sweeps: 2,
            seed: 1,
            workers: 0,
            z_max: 3.0,
        }
    }
}

impl Experiment for Futility {
    const NAME: &'static str = "futility";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self) -> CliResult<Table> {
        let h = local_generator(self.d)?;
        let spec = EnsembleSpec::haar_full_pure(self.n, self.d)?;
        let big = spec.collective(&h)?;
        let r = mc_estimate(|s| qfi(s, &big), &spec, &config(self.samples, derive_seed(self.seed, 0), self.workers))?;
        let dim = full_dim(self.n, self.d)?;
        let analytic = analytic_avg_qfi(SpaceKind::Full, self.n, self.d, &Spectrum::pure(dim), h.tr_h2())?;
        let bound = lu_upper_bound(self.n, self.d, h.norm());
        let mut table = Table::new(&["quantity", "N", "value", "std_error", "reference", "bound"]);
        table.push(vec![
            "mean_qfi".into(),
            self.n.into(),
            r.mean.into(),
            r.std_error.into(),
            analytic.into(),
            bound.into(),
        ]);
        let z = r.z_score(analytic);
        table.checks.push(CheckResult::hard(
            format!("N={} mean within {} std errors", self.n, self.z_max),
            z <= self.z_max,
            format!("mean {:.6} ± {:.6}, analytic {analytic:.6}, z {z:.3}", r.mean, r.std_error),
        ));
        table.checks.push(CheckResult::hard(
            format!("N={} mean below local-unitary bound", self.n),
            r.mean < bound,
            format!("mean {:.6}, bound {bound:.6}", r.mean),
        ));
        if self.lu_states > 0 {
            require(self.d == 2, "local-unitary spot checks need d = 2")?;
            let lu_bound = lu_upper_bound(self.lu_n, 2, h.norm());
            let lu_dim = full_dim(self.lu_n, 2)?;
            let mut worst: f64 = 0.0;
            for i in 0..self.lu_states as u64 {
                let psi = haar_vector(lu_dim, &mut stream_rng(derive_seed(self.seed, 1), i));
                let state = FullState::pure(self.lu_n, 2, psi)?;
                let res = lu_optimize_qfi(&state, &h, self.lu_sweeps, stream_rng(derive_seed(self.seed, 2), i))?;
                worst = worst.max(res.qfi);
                table.push(vec![
                    format!("lu_qfi_{i}").into(),
                    self.lu_n.into(),
                    res.qfi.into(),
                    Cell::Empty,
                    res.history[0].into(),
                    lu_bound.into(),
                ]);
            }
            table.checks.push(CheckResult::hard(
                format!("N={} optimized QFI never exceeds the bound", self.lu_n),
                worst <= lu_bound,
                format!("largest {worst:.6}, bound {lu_bound:.6}"),
            ));
        }
        Ok(table)
    }
}

// ------------------------------------------------------------------- loss

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Loss {
    #[serde(rename = "N")]
    pub n: usize,
    pub k: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub z_max: f64,
    pub ghz_tol: f64,
}

impl Default for Loss {
    fn default() -> Self {
        Self {
            n: 30,
            k: vec![1, 2, 3],
            samples: 1000,
            seed: 1,
            workers: 0,
            z_max: 3.0,
            ghz_tol: 1e-10,
        }
    }
}

impl Experiment for Loss {
    const NAME: &'static str = "loss";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self) -> CliResult<Table> {
        non_empty(&self.k, "k")?;
        let n = self.n;
        let spec = EnsembleSpec::haar_sym_pure(n, 2)?;
        let ghz = StartState::Noon.state(n);
        let mut table = Table::new(&["quantity", "N", "k", "value", "std_error", "lower", "upper"]);
        for &k in &self.k {
            require(k < n, format!("k = {k} must be below N = {n}"))?;
            let jz = angular_momentum(Axis::Z, n - k);
            let r = mc_estimate(
                |s| {
                    let s = s.as_symmetric().expect("symmetric ensemble");
                    qfi(&partial_trace_dicke(s, k)?, &jz)
                },
                &spec,
                &config(self.samples, derive_seed(self.seed, k as u64), self.workers),
            )?;
            let (lo, hi) = loss_avg_bounds(n, k, 1.0)?;
            table.push(vec!["avg_qfi".into(), n.into(), k.into(), r.mean.into(), r.std_error.into(), lo.into(), hi.into()]);
            let slack = self.z_max * r.std_error;
            table.checks.push(CheckResult::hard(
                format!("N={n} k={k} mean within bounds"),
                r.mean >= lo - slack && r.mean <= hi + slack,
                format!("mean {:.6} ± {:.6} in [{lo:.6}, {hi:.6}]", r.mean, r.std_error),
            ));
            let g = qfi(&partial_trace_dicke(&ghz, k)?, &jz)?;
            table.push(vec!["ghz_qfi".into(), n.into(), k.into(), g.into(), Cell::Empty, Cell::Empty, Cell::Empty]);
            if k == 1 {
                table.checks.push(CheckResult::hard(
                    format!("GHZ N={n} loses its QFI after one loss"),
                    g <= self.ghz_tol,
                    format!("QFI {g:.3e}"),
                ));
            }
        }
        Ok(table)
    }
}

// --------------------------------------------------------------- bs-equiv

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BsEquiv {
    #[serde(rename = "N")]
    pub n: usize,
    pub eta: Vec<f64>,
    /// Random pure states per η.
    pub states: usize,
    /// Largest N of the qubit-picture partial-trace comparison.
    pub oracle_n: usize,
    /// Random states per (N, k) in that comparison.
    pub oracle_states: usize,
    /// Largest N of the lift vs tensor-power comparison.
    pub lift_n: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for BsEquiv {
    fn default() -> Self {
        Self {
            n: 12,
            eta: (1..=9).map(|i| i as f64 / 10.0).collect(),
            states: 5,
            oracle_n: 8,
            oracle_states: 50,
            lift_n: 6,
            tolerance: 1e-12,
            seed: 1,
            workers: 0,
        }
    }
}

impl Experiment for BsEquiv {
    const NAME: &'static str = "bs-equiv";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self) -> CliResult<Table> {
        non_empty(&self.eta, "eta")?;
        let mut table = Table::new(&["comparison", "N", "parameter", "max_deviation", "tolerance", "pass"]);
        let push = |table: &mut Table, what: &str, n: usize, param: Cell, dev: f64| {
            let ok = dev <= self.tolerance;
            table.push(vec![what.into(), n.into(), param, dev.into(), self.tolerance.into(), ok.into()]);
        };

        let basis = DickeBasis::two_mode(self.n);
        let mut worst_bs: f64 = 0.0;
        for &eta in &self.eta {
            let mut worst: f64 = 0.0;
            for i in 0..self.states as u64 {
                let psi = haar_vector(self.n + 1, &mut stream_rng(derive_seed(self.seed, 0), i));
                let s = SymmetricState::pure(basis.clone(), psi)?;
                worst = worst.max(verify_bs_trace_equivalence(&s, eta, self.tolerance)?.max_deviation());
            }
            worst_bs = worst_bs.max(worst);
            push(&mut table, "bs_loss_vs_partial_trace", self.n, eta.into(), worst);
        }
        table.checks.push(CheckResult::hard(
            format!("beam-splitter loss equals binomial partial traces, N={}", self.n),
            worst_bs <= self.tolerance,
            format!("max deviation {worst_bs:.3e}"),
        ));

        let mut worst_trace: f64 = 0.0;
        let mut rng = stream_rng(derive_seed(self.seed, 1), 0);
        for n in 1..=self.oracle_n {
            let basis = DickeBasis::two_mode(n);
            let mut worst: f64 = 0.0;
            for j in 0..self.oracle_states {
                let s = if j % 2 == 0 {
                    SymmetricState::pure(basis.clone(), haar_vector(n + 1, &mut rng))?
                } else {
                    SymmetricState::density(basis.clone(), ginibre_density(n + 1, 1 + j % (n + 1), &mut rng))?
                };
                let full = dicke_embed(&s)?;
                for k in 0..=n {
                    let fast = partial_trace_dicke(&s, k)?;
                    let slow = dicke_project(&partial_trace_bruteforce(&full, k)?)?;
                    worst = worst.max(max_abs_diff(&fast.density(), &slow.density()));
                }
            }
            worst_trace = worst_trace.max(worst);
            push(&mut table, "dicke_trace_vs_qubit_trace", n, Cell::Empty, worst);
        }
        if self.oracle_n > 0 {
            table.checks.push(CheckResult::hard(
                format!("Dicke partial trace equals qubit partial trace, N ≤ {}", self.oracle_n),
                worst_trace <= self.tolerance,
                format!("max deviation {worst_trace:.3e}"),
            ));
        }

        let mut worst_lift: f64 = 0.0;
        let mut rng = stream_rng(derive_seed(self.seed, 2), 0);
        for n in 1..=self.lift_n {
            let cols: Vec<CVec> = (0..=n)
                .map(|m| match dicke_embed(&dicke_state(n, m)?)?.into_payload() {
                    Payload::Pure(v) => Ok(v),
                    Payload::Density(_) => unreachable!("embedding keeps pure states pure"),
                })
                .collect::<metroscope::Result<_>>()?;
            let w = CMat::from_columns(&cols);
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let v = haar_unitary(2, &mut rng);
                let power = (0..n).fold(CMat::identity(1, 1), |acc, _| kron(&acc, &v));
                let oracle = w.adjoint() * power * &w;
                worst = worst.max(max_abs_diff(&sym_power_lift(&v, n)?, &oracle));
            }
            worst_lift = worst_lift.max(worst);
            push(&mut table, "lift_vs_tensor_power", n, Cell::Empty, worst);
        }
        if self.lift_n > 0 {
            table.checks.push(CheckResult::hard(
                format!("symmetric lift equals tensor power, N ≤ {}", self.lift_n),
                worst_lift <= self.tolerance,
                format!("max deviation {worst_lift:.3e}"),
            ));
        }
        Ok(table)
    }
}

// ------------------------------------------------------------------ mz-fi

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MzFi {
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub samples: usize,
    pub phi: Vec<f64>,
    /// States whose FI is scanned over a full phase grid (0 disables).
    pub scan_states: usize,
    pub grid_points: usize,
    /// Scan floor as a multiple of N².
    pub scan_threshold: f64,
    pub seed: u64,
    pub workers: usize,
    pub z_max: f64,
    /// Band around N(N+1)/6, reported but not enforced.
    pub conjecture_tol: f64,
}

impl Default for MzFi {
    fn default() -> Self {
        Self {
            n: vec![40, 100],
            samples: 150,
            phi: vec![0.0, PI / 3.0, PI / 2.0],
            scan_states: 0,
            grid_points: 128,
            scan_threshold: 0.05,
            seed: 1,
            workers: 0,
            z_max: 3.0,
            conjecture_tol: 0.10,
        }
    }
}

impl Experiment for MzFi {
    const NAME: &'static str = "mz-fi";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self) -> CliResult<Table> {
        non_empty(&self.n, "N")?;
        non_empty(&self.phi, "phi")?;
        let mut table = Table::new(&["kind", "N", "phi", "value", "std_error", "lower", "upper", "reference"]);
        for &n in &self.n {
            let mz = MachZehnder::new(n);
            let spec = EnsembleSpec::haar_sym_pure(n, 2)?;
            let rs = mc_estimate_multi(
                |s| {
                    let s = s.as_symmetric().expect("symmetric ensemble");
                    self.phi.iter().map(|&phi| mz.fi(s, phi)).collect()
                },
                &spec,
                &config(self.samples, derive_seed(self.seed, n as u64), self.workers),
                self.phi.len(),
            )?;
            let (lo, hi) = fi_avg_bounds(n);
            let conj = (n * (n + 1)) as f64 / 6.0;
            for (&phi, r) in self.phi.iter().zip(&rs) {
                table.push(vec![
                    "mean_fi".into(),
                    n.into(),
                    phi.into(),
                    r.mean.into(),
                    r.std_error.into(),
                    lo.into(),
                    hi.into(),
                    conj.into(),
                ]);
                let slack = self.z_max * r.std_error;
                table.checks.push(CheckResult::hard(
                    format!("N={n} φ={phi:.6} mean FI inside the band"),
                    r.mean >= lo - slack && r.mean <= hi + slack,
                    format!("mean {:.4} ± {:.4} in [{lo:.4}, {hi:.4}]", r.mean, r.std_error),
                ));
                let rel = (r.mean - conj).abs() / conj;
                table.checks.push(CheckResult::soft(
                    format!("N={n} φ={phi:.6} mean FI near N(N+1)/6"),
                    rel <= self.conjecture_tol,
                    format!("relative deviation {rel:.4}"),
                ));
            }
            for i in 0..rs.len() {
                for j in (i + 1)..rs.len() {
                    let combined = (rs[i].std_error.powi(2) + rs[j].std_error.powi(2)).sqrt();
                    let diff = (rs[i].mean - rs[j].mean).abs();
                    table.checks.push(CheckResult::hard(
                        format!("N={n} mean FI equal at φ={:.6} and φ={:.6}", self.phi[i], self.phi[j]),
                        diff <= self.z_max * combined,
                        format!("difference {diff:.4}, combined std error {combined:.4}"),
                    ));
                }
            }
            if self.scan_states > 0 {
                let grid = uniform_grid(self.grid_points);
                let floor = self.scan_threshold * (n * n) as f64;
                let mut above = 0usize;
                let mut lowest = f64::INFINITY;
                for i in 0..self.scan_states as u64 {
                    let s = sample_state(&spec, &mut stream_rng(derive_seed(self.seed, 1_000_000 + n as u64), i))?;
                    let scan = mz.fi_scan(s.as_symmetric().expect("symmetric ensemble"), &grid)?;
                    lowest = lowest.min(scan.min);
                    if scan.min >= floor {
                        above += 1;
                    }
                }
                let q = above as f64 / self.scan_states as f64;
                table.push(vec![
                    "scan_fraction_above_floor".into(),
                    n.into(),
                    Cell::Empty,
                    q.into(),
                    (q * (1.0 - q) / self.scan_states as f64).sqrt().into(),
                    floor.into(),
                    Cell::Empty,
                    lowest.into(),
                ]);
            }
        }
        Ok(table)
    }
}

// ------------------------------------------------------- circuit-converge

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CircuitConverge {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub depths: Vec<usize>,
    pub samples: usize,
    pub start: StartChoice,
    /// Relative band that defines the sufficient depth.
    pub sufficiency_tol: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for CircuitConverge {
    fn default() -> Self {
        Self {
            n: 100,
            depths: vec![0, 5, 10, 15, 20, 30, 40, 60, 80, 100],
            samples: 150,
            start: StartChoice::Balanced,
            sufficiency_tol: 0.10,
            seed: 1,
            workers: 0,
        }
    }
}

impl Experiment for CircuitConverge {
    const NAME: &'static str = "circuit-converge";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self) -> CliResult<Table> {
        non_empty(&self.depths, "K")?;
        let t = circuit_convergence(
            self.n,
            &self.depths,
            self.samples,
            self.start.into(),
            self.seed,
            self.sufficiency_tol,
            self.workers,
        )?;
        let mut table = Table::new(&[
            "K",
            "mean_qfi",
            "std_error_qfi",
            "mean_fi_pi_2",
            "std_error_fi_pi_2",
            "mean_fi_pi_3",
            "std_error_fi_pi_3",
            "target_qfi",
            "target_fi",
        ]);
        for r in &t.rows {
            table.push(vec![
                r.depth.into(),
                r.qfi.mean.into(),
                r.qfi.std_error.into(),
                r.fi_half_pi.mean.into(),
                r.fi_half_pi.std_error.into(),
                r.fi_third_pi.mean.into(),
                r.fi_third_pi.std_error.into(),
                t.target_qfi.into(),
                t.target_fi.into(),
            ]);
            let bands = match r.depth {
                60 => Some((0.05, 0.10)),
                20 => Some((0.10, 0.10)),
                _ => None,
            };
            if let Some((tq, tf)) = bands {
                let rq = (r.qfi.mean - t.target_qfi).abs() / t.target_qfi;
                let rf = (r.fi_half_pi.mean - t.target_fi).abs() / t.target_fi;
                table.checks.push(CheckResult::hard(
                    format!("K={} mean QFI within {}%", r.depth, 100.0 * tq),
                    rq <= tq,
                    format!("mean {:.3} ± {:.3}, target {:.3}, rel {rq:.4}", r.qfi.mean, r.qfi.std_error, t.target_qfi),
                ));
                table.checks.push(CheckResult::hard(
                    format!("K={} mean FI(π/2) within {}%", r.depth, 100.0 * tf),
                    rf <= tf,
                    format!(
                        "mean {:.3} ± {:.3}, target {:.3}, rel {rf:.4}",
                        r.fi_half_pi.mean, r.fi_half_pi.std_error, t.target_fi
                    ),
                ));
            }
        }
        let fmt = |k: Option<usize>| k.map_or("not reached".to_string(), |k| k.to_string());
        table.checks.push(CheckResult::soft(
            "sufficient depth",
            t.sufficient_depth_qfi.is_some() && t.sufficient_depth_fi.is_some(),
            format!(
                "QFI within {}% from K = {}, FI(π/2) from K = {}",
                100.0 * self.sufficiency_tol,
                fmt(t.sufficient_depth_qfi),
                fmt(t.sufficient_depth_fi)
            ),
        ));
        Ok(table)
    }
}

// ---------------------------------------------------------- concentration

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Concentration {
    pub ensemble: EnsembleChoice,
    pub observable: ObservableChoice,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub d: usize,
    pub samples: usize,
    /// Deviations as fractions of the analytic mean.
    pub eps: Vec<f64>,
    /// Depolarization weight for `sym-depolarized`.
    pub p: f64,
    /// Spectrum decay rate for `sym-isospectral`.
    pub decay: f64,
    /// Phase of the Mach-Zehnder observable.
    pub phi: f64,
    pub seed: u64,
    pub workers: usize,
    pub z_max: f64,
}

impl Default for Concentration {
    fn default() -> Self {
        Self {
            ensemble: EnsembleChoice::SymPure,
            observable: ObservableChoice::Qfi,
            n: vec![20, 40, 80],
            d: 2,
            samples: 500,
            eps: vec![0.02, 0.05, 0.1, 0.2, 0.4],
            p: 0.3,
            decay: 0.5,
            phi: PI / 2.0,
            seed: 1,
            workers: 0,
            z_max: 3.0,
        }
    }
}

impl Experiment for Concentration {
    const NAME: &'static str = "concentration";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self) -> CliResult<Table> {
        non_empty(&self.n, "N")?;
        non_empty(&self.eps, "eps")?;
        let h = local_generator(self.d)?;
        let mut table = Table::new(&[
            "N", "eps", "eps_relative", "empirical", "std_error", "bound", "vacuous", "mean", "std_dev", "relative_std",
        ]);
        let mut rel_std = Vec::new();
        for (i, &n) in self.n.iter().enumerate() {
            let (spec, kind, spectrum) = match self.ensemble {
                EnsembleChoice::SymPure => {
                    let dim = DickeBasis::new(n, self.d)?.dim();
                    (EnsembleSpec::haar_sym_pure(n, self.d)?, SpaceKind::Symmetric, Spectrum::pure(dim))
                }
                EnsembleChoice::SymIsospectral => {
                    let dim = DickeBasis::new(n, self.d)?.dim();
                    let s = decaying_spectrum(dim, self.decay)?;
                    (EnsembleSpec::haar_sym_isospectral(n, self.d, s.clone())?, SpaceKind::Symmetric, s)
                }
                EnsembleChoice::SymDepolarized => {
                    let dim = DickeBasis::new(n, self.d)?.dim();
                    (
                        EnsembleSpec::haar_sym_depolarized(n, self.d, self.p)?,
                        SpaceKind::Symmetric,
                        Spectrum::depolarized(dim, self.p)?,
                    )
                }
                EnsembleChoice::FullPure => {
                    let dim = full_dim(n, self.d)?;
                    (EnsembleSpec::haar_full_pure(n, self.d)?, SpaceKind::Full, Spectrum::pure(dim))
                }
            };
            let (observable, scale) = match self.observable {
                ObservableChoice::Qfi => (Observable::Qfi(h.clone()), analytic_avg_qfi(kind, n, self.d, &spectrum, h.tr_h2())?),
                ObservableChoice::MzFi => (Observable::MzFi { phi: self.phi }, (n * (n + 1)) as f64 / 6.0),
            };
            require(scale > 0.0, "the analytic mean is zero, so relative deviations are undefined")?;
            let grid: Vec<f64> = self.eps.iter().map(|e| e * scale).collect();
            let report = concentration_report(
                &spec,
                &observable,
                &config(self.samples, derive_seed(self.seed, i as u64), self.workers),
                &grid,
            )?;
            let m = &report.samples;
            let rs = m.std_dev / m.mean;
            rel_std.push((n, rs));
            let mut ok = true;
            for (row, rel) in report.rows.iter().zip(&self.eps) {
                ok &= row.empirical <= row.bound + self.z_max * row.std_error;
                table.push(vec![
                    n.into(),
                    row.eps.into(),
                    (*rel).into(),
                    row.empirical.into(),
                    row.std_error.into(),
                    row.bound.into(),
                    row.vacuous.into(),
                    m.mean.into(),
                    m.std_dev.into(),
                    rs.into(),
                ]);
            }
            table.checks.push(CheckResult::hard(
                format!("N={n} empirical tails within bound + {} std errors", self.z_max),
                ok,
                format!("{} of {} bounds vacuous", report.rows.iter().filter(|r| r.vacuous).count(), report.rows.len()),
            ));
        }
        if self.ensemble == EnsembleChoice::SymPure && self.observable == ObservableChoice::Qfi && rel_std.len() > 1 {
            let mut sorted = rel_std.clone();
            sorted.sort_by_key(|x| x.0);
            let decreasing = sorted.windows(2).all(|w| w[1].1 < w[0].1);
            table.checks.push(CheckResult::hard(
                "relative spread of the QFI shrinks with N",
                decreasing,
                format!("{sorted:?}"),
            ));
        }
        Ok(table)
    }
}

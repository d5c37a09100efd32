//! Haar-random unitaries and states, random-state ensembles, and a
//! deterministic parallel Monte Carlo driver.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::circuits::{apply_circuit, sample_circuit, GateSet, StartState};
use crate::dicke::DickeBasis;
use crate::error::{arg, Error, Result};
use crate::fisher::{analytic_avg_qfi, fidelity_bures, qfi, SpaceKind, Spectrum};
use crate::hamiltonian::{collective_full, collective_sym_in, CollectiveHamiltonian, LocalHamiltonian};
use crate::interferometer::MachZehnder;
use crate::linalg::{CMat, CVec, C64};
use crate::state::{full_dim, AnyState, FullState, Payload, SymmetricState};

/// Standard complex normal: real and imaginary parts with variance 1/2.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random element of U(D): QR of a Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| complex_normal(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Uniformly random unit vector: `U|0⟩` for Haar `U`, i.e. the first
/// column of [`haar_unitary`], without building the other columns.
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVec {
    CVec::from_fn(dim, |_, _| complex_normal(rng)).normalize()
}

/// Random density matrix `GG†/tr(GG†)` with `G` a `dim × rank` Ginibre
/// matrix (the induced measure; `rank = dim` gives Hilbert-Schmidt).
pub fn ginibre_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(dim, rank.max(1), |_, _| complex_normal(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    let rho = rho / tr;
    (&rho + rho.adjoint()) * C64::new(0.5, 0.0)
}

/// A distribution over random states.
#[derive(Debug, Clone)]
pub enum EnsembleSpec {
    /// `U|ψ₀⟩` with Haar `U` on `(C^d)^⊗N`.
    HaarFullPure { n: usize, d: usize },
    /// `U diag(p) U†` with Haar `U` on the symmetric subspace.
    HaarSymIsospectral { basis: Arc<DickeBasis>, spectrum: Spectrum },
    /// `(1−p) U|ψ₀⟩⟨ψ₀|U† + p·1/D` on the symmetric subspace.
    HaarSymDepolarized { basis: Arc<DickeBasis>, p: f64 },
    /// Random circuits of fixed depth applied to a start state.
    Circuit {
        gates: Arc<GateSet>,
        depth: usize,
        start: StartState,
        start_state: SymmetricState,
    },
}

impl EnsembleSpec {
    pub fn haar_full_pure(n: usize, d: usize) -> Result<Self> {
        full_dim(n, d)?;
        Ok(Self::HaarFullPure { n, d })
    }

    pub fn haar_sym_isospectral(n: usize, d: usize, spectrum: Spectrum) -> Result<Self> {
        let basis = Arc::new(DickeBasis::new(n, d)?);
        if spectrum.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: spectrum.len(),
            });
        }
        Ok(Self::HaarSymIsospectral { basis, spectrum })
    }

    /// Haar-random pure symmetric states.
    pub fn haar_sym_pure(n: usize, d: usize) -> Result<Self> {
        let dim = DickeBasis::new(n, d)?.dim();
        Self::haar_sym_isospectral(n, d, Spectrum::pure(dim))
    }

    pub fn haar_sym_depolarized(n: usize, d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return arg(format!("depolarization weight {p} outside [0, 1]"));
        }
        Ok(Self::HaarSymDepolarized {
            basis: Arc::new(DickeBasis::new(n, d)?),
            p,
        })
    }

    pub fn circuit(gates: Arc<GateSet>, depth: usize, start: StartState) -> Self {
        let start_state = start.state(gates.n());
        Self::Circuit {
            gates,
            depth,
            start,
            start_state,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::HaarFullPure { .. } => "haar_full_pure",
            Self::HaarSymIsospectral { .. } => "haar_sym_isospectral",
            Self::HaarSymDepolarized { .. } => "haar_sym_depolarized",
            Self::Circuit { .. } => "circuit",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Self::HaarFullPure { n, .. } => *n,
            Self::HaarSymIsospectral { basis, .. } | Self::HaarSymDepolarized { basis, .. } => basis.n(),
            Self::Circuit { gates, .. } => gates.n(),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Self::HaarFullPure { d, .. } => *d,
            Self::HaarSymIsospectral { basis, .. } | Self::HaarSymDepolarized { basis, .. } => basis.d(),
            Self::Circuit { .. } => 2,
        }
    }

    /// Collective generator of `h` on this ensemble's space.
    pub fn collective(&self, h: &LocalHamiltonian) -> Result<CollectiveHamiltonian> {
        if h.d() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: h.d(),
            });
        }
        match self {
            Self::HaarFullPure { n, .. } => collective_full(h, *n),
            Self::HaarSymIsospectral { basis, .. } | Self::HaarSymDepolarized { basis, .. } => {
                Ok(collective_sym_in(h, basis))
            }
            Self::Circuit { start_state, .. } => Ok(collective_sym_in(h, start_state.basis())),
        }
    }
}

/// Draws one state from the ensemble.
pub fn sample_state<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<AnyState> {
    match spec {
        EnsembleSpec::HaarFullPure { n, d } => {
            let dim = full_dim(*n, *d)?;
            Ok(AnyState::Full(FullState::new_trusted(*n, *d, Payload::Pure(haar_vector(dim, rng)))))
        }
        EnsembleSpec::HaarSymIsospectral { basis, spectrum } => {
            let dim = basis.dim();
            let payload = if spectrum.values()[0] == 1.0 {
                Payload::Pure(haar_vector(dim, rng))
            } else {
                let u = haar_unitary(dim, rng);
                let mut scaled = u.clone();
                for (j, &p) in spectrum.values().iter().enumerate() {
                    for i in 0..dim {
                        scaled[(i, j)] *= p;
                    }
                }
                let rho = scaled * u.adjoint();
                Payload::Density((&rho + rho.adjoint()) * C64::new(0.5, 0.0))
            };
            Ok(AnyState::Symmetric(SymmetricState::new_trusted(basis.clone(), payload)))
        }
        EnsembleSpec::HaarSymDepolarized { basis, p } => {
            let dim = basis.dim();
            let v = haar_vector(dim, rng);
            let mut rho = crate::linalg::outer(&v) * C64::new(1.0 - p, 0.0);
            for i in 0..dim {
                rho[(i, i)] += C64::new(p / dim as f64, 0.0);
            }
            Ok(AnyState::Symmetric(SymmetricState::new_trusted(basis.clone(), Payload::Density(rho))))
        }
        EnsembleSpec::Circuit {
            gates,
            depth,
            start_state,
            ..
        } => {
            let circuit = sample_circuit(gates.n(), *depth, rng);
            Ok(AnyState::Symmetric(apply_circuit(start_state, &circuit, gates)?))
        }
    }
}

/// SplitMix64 finalizer over `master ⊕ tag`, for deriving independent
/// master seeds (e.g. one per circuit depth).
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut z = master ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x6A09_E667_F3BC_C908);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for sample `stream`: ChaCha keyed by the master seed, with the
/// sample index as the 64-bit stream id.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    pub master_seed: u64,
    /// Worker threads; 0 means the available parallelism.
    pub workers: usize,
    pub keep_values: bool,
}

impl McConfig {
    pub fn new(samples: usize, master_seed: u64) -> Self {
        Self {
            samples,
            master_seed,
            workers: 0,
            keep_values: false,
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn keep_values(mut self, keep: bool) -> Self {
        self.keep_values = keep;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub n_samples: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 normalization).
    pub std_dev: f64,
    pub std_error: f64,
    pub skipped: usize,
    pub master_seed: u64,
    pub sample_values: Option<Vec<f64>>,
}

impl McResult {
    /// `|mean − target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target).abs() / self.std_error
        }
    }
}

/// Fraction of failed samples above which an estimate is rejected.
pub const MAX_SKIP_FRACTION: f64 = 0.01;

/// Mean and standard error of `functional` over `config.samples` draws.
pub fn mc_estimate<F>(functional: F, spec: &EnsembleSpec, config: &McConfig) -> Result<McResult>
where
    F: Fn(&AnyState) -> Result<f64> + Sync,
{
    let mut out = mc_estimate_multi(|s| functional(s).map(|v| vec![v]), spec, config, 1)?;
    Ok(out.remove(0))
}

/// Like [`mc_estimate`] for a vector-valued functional with `outputs`
/// components evaluated on the same states.
pub fn mc_estimate_multi<F>(functional: F, spec: &EnsembleSpec, config: &McConfig, outputs: usize) -> Result<Vec<McResult>>
where
    F: Fn(&AnyState) -> Result<Vec<f64>> + Sync,
{
    if config.samples < 2 {
        return arg("Monte Carlo needs at least two samples");
    }
    let run = || {
        (0..config.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(config.master_seed, i as u64);
                let state = sample_state(spec, &mut rng)?;
                let values = functional(&state)?;
                if values.len() != outputs || values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidState(format!("functional returned {values:?}")));
                }
                Ok(values)
            })
            .collect::<Vec<Result<Vec<f64>>>>()
    };
    let results = with_workers(config.workers, run)?;
    let mut columns = vec![Vec::with_capacity(config.samples); outputs];
    let mut skipped = 0;
    let mut first_error = None;
    for r in results {
        match r {
            Ok(values) => {
                for (col, v) in columns.iter_mut().zip(values) {
                    col.push(v);
                }
            }
            Err(e) => {
                skipped += 1;
                first_error.get_or_insert(e);
            }
        }
    }
    if skipped as f64 > MAX_SKIP_FRACTION * config.samples as f64 || config.samples - skipped < 2 {
        return Err(Error::TooManySkips {
            skipped,
            total: config.samples,
            first: first_error.map(|e| e.to_string()).unwrap_or_default(),
        });
    }
    Ok(columns
        .into_iter()
        .map(|values| {
            let (mean, std_dev) = mean_std(&values);
            McResult {
                n_samples: values.len(),
                mean,
                std_dev,
                std_error: std_dev / (values.len() as f64).sqrt(),
                skipped,
                master_seed: config.master_seed,
                sample_values: config.keep_values.then_some(values),
            }
        })
        .collect())
}

/// Runs `f` on a pool with the requested number of threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        builder = builder.num_threads(workers);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Argument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Mean and sample standard deviation, summed in index order.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Quantity whose concentration is examined.
#[derive(Debug, Clone)]
pub enum Observable {
    /// QFI for the collective lift of the local generator.
    Qfi(LocalHamiltonian),
    /// Mach-Zehnder FI at a fixed phase.
    MzFi { phi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailRow {
    pub eps: f64,
    /// Fraction of samples with `|f − mean| ≥ ε`.
    pub empirical: f64,
    /// Binomial standard error of `empirical`.
    pub std_error: f64,
    /// Two-sided concentration bound at this `ε`.
    pub bound: f64,
    /// The bound is at least 1 and so carries no information.
    pub vacuous: bool,
}

#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    pub samples: McResult,
    pub rows: Vec<TailRow>,
}

/// Empirical deviation tails of `observable` over the ensemble, with the
/// matching Lévy-type bound for each `ε`.
pub fn concentration_report(
    spec: &EnsembleSpec,
    observable: &Observable,
    config: &McConfig,
    eps_grid: &[f64],
) -> Result<ConcentrationReport> {
    if eps_grid.is_empty() || eps_grid[0] <= 0.0 || eps_grid.windows(2).any(|w| w[1] <= w[0]) {
        return arg("epsilon grid must be positive and strictly ascending");
    }
    let bound = tail_bound(spec, observable)?;
    let config = config.keep_values(true);
    let samples = match observable {
        Observable::Qfi(h) => {
            let big_h = spec.collective(h)?;
            mc_estimate(|s| qfi(s, &big_h), spec, &config)?
        }
        Observable::MzFi { phi } => {
            let mz = MachZehnder::new(spec.n());
            mc_estimate(
                |s| mz.fi(s.as_symmetric().expect("symmetric ensemble"), *phi),
                spec,
                &config,
            )?
        }
    };
    let values = samples.sample_values.as_deref().expect("values retained");
    let n = values.len() as f64;
    let rows = eps_grid
        .iter()
        .map(|&eps| {
            let hits = values.iter().filter(|v| (*v - samples.mean).abs() >= eps).count();
            let q = hits as f64 / n;
            let b = bound(eps);
            TailRow {
                eps,
                empirical: q,
                std_error: (q * (1.0 - q) / n).sqrt(),
                bound: b,
                vacuous: b >= 1.0,
            }
        })
        .collect();
    Ok(ConcentrationReport { samples, rows })
}

type Bound = Box<dyn Fn(f64) -> f64>;

fn tail_bound(spec: &EnsembleSpec, observable: &Observable) -> Result<Bound> {
    let n = spec.n() as f64;
    let d = spec.d() as f64;
    match (observable, spec) {
        (Observable::Qfi(h), EnsembleSpec::HaarFullPure { n: nn, d: dd }) => {
            let dim = full_dim(*nn, *dd)? as f64;
            let h4 = h.norm().powi(4);
            Ok(Box::new(move |eps| 2.0 * (-eps * eps * dim / (4096.0 * h4 * n.powi(4))).exp()))
        }
        (Observable::Qfi(h), EnsembleSpec::HaarSymIsospectral { basis, spectrum }) => {
            let dim = basis.dim();
            let mixed = Payload::Density(CMat::identity(dim, dim) / C64::new(dim as f64, 0.0));
            let diag = Payload::Density(CMat::from_diagonal(&CVec::from_iterator(
                dim,
                spectrum.values().iter().map(|&p| C64::new(p, 0.0)),
            )));
            let bures = fidelity_bures(&diag, &mixed)?.1;
            let c = (8.0 * bures).min(1.0);
            let h4 = h.norm().powi(4);
            let s = dim as f64;
            Ok(Box::new(move |eps| {
                if c == 0.0 {
                    return 0.0;
                }
                2.0 * (-eps * eps * s / (4096.0 * c * h4 * n.powi(4))).exp()
            }))
        }
        (Observable::Qfi(h), EnsembleSpec::HaarSymDepolarized { basis, p }) => {
            let s = basis.dim() as f64;
            let mean = analytic_avg_qfi(
                SpaceKind::Symmetric,
                basis.n(),
                basis.d(),
                &Spectrum::depolarized(basis.dim(), *p)?,
                h.tr_h2(),
            )?;
            let rate = h.tr_h2().powi(2) * (n + d).powi(2) * s * s / (64.0 * h.norm().powi(4) * (d * (d + 1.0) * n * (1.0 + s)).powi(2)) * s;
            Ok(Box::new(move |eps| {
                if mean == 0.0 {
                    return 0.0;
                }
                let rel = eps / mean;
                2.0 * (-rel * rel * rate).exp()
            }))
        }
        (Observable::MzFi { .. }, EnsembleSpec::HaarSymIsospectral { basis, spectrum })
            if basis.d() == 2 && spectrum.values()[0] == 1.0 =>
        {
            Ok(Box::new(move |eps| 2.0 * (-eps * eps * (n + 1.0) / (144.0 * n.powi(4))).exp()))
        }
        _ => arg(format!(
            "no concentration bound for this observable on a {} ensemble",
            spec.kind_name()
        )),
    }
}

//! Particle loss on two-mode bosonic states: partial traces in the Dicke
//! basis and in the qubit picture, and the beam-splitter loss channel.

use crate::binom::{ln_binom, ln_pow};
use crate::dicke::DickeBasis;
use crate::error::{arg, Error, Result};
use crate::linalg::{self, CMat, CVec, C64};
use crate::state::{full_dim, FullState, Payload, QuantumState, SymmetricState};

/// `g(n, u) = sqrt(C(k,u) C(N−k,n) / C(N,n+u))`: the amplitude of
/// `|D_n^{N−k}⟩|D_u^k⟩` inside `|D_{n+u}^N⟩`.
fn split_weights(n_total: usize, k: usize) -> Vec<Vec<f64>> {
    let (nn, kk) = (n_total as u64, k as u64);
    (0..=(n_total - k) as u64)
        .map(|n| {
            (0..=kk)
                .map(|u| (0.5 * (ln_binom(kk, u) + ln_binom(nn - kk, n) - ln_binom(nn, n + u))).exp())
                .collect()
        })
        .collect()
}

/// Trace out `k` of the `N` particles of a two-mode symmetric state.
///
/// With `g` as above, `ρ'_{nm} = Σ_u g(n,u) g(m,u) ρ_{n+u, m+u}`; for a pure
/// state `ρ_{ij} = α_i α_j*`.
pub fn partial_trace_dicke(state: &SymmetricState, k: usize) -> Result<SymmetricState> {
    if state.d() != 2 {
        return arg("Dicke-basis partial trace is implemented for two modes");
    }
    let n_total = state.n();
    if k > n_total {
        return arg(format!("cannot trace out {k} of {n_total} particles"));
    }
    let g = split_weights(n_total, k);
    let dim = n_total - k + 1;
    let mut out = CMat::zeros(dim, dim);
    match state.payload() {
        Payload::Pure(alpha) => {
            for u in 0..=k {
                let v = CVec::from_iterator(dim, (0..dim).map(|n| alpha[n + u] * g[n][u]));
                out += linalg::outer(&v);
            }
        }
        Payload::Density(rho) => {
            for n in 0..dim {
                for m in 0..dim {
                    let mut acc = C64::new(0.0, 0.0);
                    for u in 0..=k {
                        acc += rho[(n + u, m + u)] * (g[n][u] * g[m][u]);
                    }
                    out[(n, m)] = acc;
                }
            }
        }
    }
    SymmetricState::density(DickeBasis::two_mode(n_total - k), out)
}

/// Literal partial trace over the last `k` tensor factors.
pub fn partial_trace_bruteforce(state: &FullState, k: usize) -> Result<FullState> {
    let (n, d) = (state.n(), state.d());
    if k > n {
        return arg(format!("cannot trace out {k} of {n} particles"));
    }
    let keep = full_dim(n - k, d)?;
    let env = full_dim(k, d)?;
    let out = match state.payload() {
        Payload::Pure(psi) => {
            let m = CMat::from_fn(keep, env, |a, t| psi[a * env + t]);
            &m * m.adjoint()
        }
        Payload::Density(rho) => CMat::from_fn(keep, keep, |a, b| {
            (0..env).map(|t| rho[(a * env + t, b * env + t)]).sum()
        }),
    };
    FullState::density(n - k, d, out)
}

/// One sector of the loss channel output: `l` particles lost with
/// probability `p_l`, leaving `state` (absent when `p_l = 0`).
#[derive(Debug, Clone)]
pub struct LossBlock {
    pub lost: usize,
    pub probability: f64,
    pub state: Option<SymmetricState>,
}

/// Block-diagonal output `⊕_l p_l ρ_l` of the beam-splitter loss channel.
#[derive(Debug, Clone)]
pub struct LossBlocks {
    pub blocks: Vec<LossBlock>,
}

impl LossBlocks {
    pub fn total_probability(&self) -> f64 {
        self.blocks.iter().map(|b| b.probability).sum()
    }

    /// Blocks with nonzero probability.
    pub fn nonzero(&self) -> impl Iterator<Item = &LossBlock> {
        self.blocks.iter().filter(|b| b.probability > 0.0)
    }
}

/// Loss through fictitious beam splitters of transmissivity `eta_a`, `eta_b`
/// on the two modes, for a pure two-mode state.
pub fn bs_loss(state: &SymmetricState, eta_a: f64, eta_b: f64) -> Result<LossBlocks> {
    for eta in [eta_a, eta_b] {
        if !(0.0..=1.0).contains(&eta) {
            return arg(format!("transmissivity {eta} outside [0, 1]"));
        }
    }
    if state.d() != 2 {
        return arg("beam-splitter loss is defined for two modes");
    }
    let Payload::Pure(alpha) = state.payload() else {
        return arg("beam-splitter loss expects a pure state");
    };
    let n_total = state.n();
    let nn = n_total as u64;
    let mut blocks = Vec::with_capacity(n_total + 1);
    for l in 0..=n_total {
        let dim = n_total - l + 1;
        let mut rho = CMat::zeros(dim, dim);
        for la in 0..=l {
            let lb = l - la;
            let (la64, lb64) = (la as u64, lb as u64);
            // ξ̃_{n−la} = α_n sqrt(b_n^{(la,lb)}), n particles in mode a.
            let mut xi = CVec::zeros(dim);
            for n in la..=(n_total - lb) {
                let n64 = n as u64;
                let ln_b = ln_binom(n64, la64)
                    + ln_pow(eta_a, n64 - la64)
                    + ln_pow(1.0 - eta_a, la64)
                    + ln_binom(nn - n64, lb64)
                    + ln_pow(eta_b, nn - n64 - lb64)
                    + ln_pow(1.0 - eta_b, lb64);
                xi[n - la] = alpha[n] * (0.5 * ln_b).exp();
            }
            rho += linalg::outer(&xi);
        }
        let p = linalg::trace(&rho).re;
        let state = if p > 0.0 {
            let rho = rho.unscale(p);
            Some(SymmetricState::new_trusted(
                DickeBasis::two_mode(n_total - l),
                Payload::Density(rho),
            ))
        } else {
            None
        };
        blocks.push(LossBlock {
            lost: l,
            probability: p,
            state,
        });
    }
    Ok(LossBlocks { blocks })
}

/// Largest deviations between `bs_loss(ψ, η, η)` and the binomially
/// weighted partial traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport {
    pub max_state_deviation: f64,
    pub max_probability_deviation: f64,
    pub tolerance: f64,
}

impl EquivalenceReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_state_deviation.max(self.max_probability_deviation)
    }

    pub fn within_tolerance(&self) -> bool {
        self.max_deviation() <= self.tolerance
    }
}

/// Checks that symmetric beam-splitter loss equals `tr_l` with binomial
/// weights `C(N,l) η^{N−l} (1−η)^l`, block by block.
pub fn verify_bs_trace_equivalence(state: &SymmetricState, eta: f64, tolerance: f64) -> Result<EquivalenceReport> {
    let blocks = bs_loss(state, eta, eta)?;
    let nn = state.n() as u64;
    let mut report = EquivalenceReport {
        max_state_deviation: 0.0,
        max_probability_deviation: 0.0,
        tolerance,
    };
    for block in &blocks.blocks {
        let l = block.lost as u64;
        let expected = (ln_binom(nn, l) + ln_pow(eta, nn - l) + ln_pow(1.0 - eta, l)).exp();
        report.max_probability_deviation = report
            .max_probability_deviation
            .max((block.probability - expected).abs());
        if let Some(bs_state) = &block.state {
            let traced = partial_trace_dicke(state, block.lost)?;
            let dev = linalg::max_abs_diff(&bs_state.density(), &traced.density());
            report.max_state_deviation = report.max_state_deviation.max(dev);
        }
    }
    if !report.max_deviation().is_finite() {
        return Err(Error::InvalidState("non-finite deviation in loss comparison".into()));
    }
    Ok(report)
}

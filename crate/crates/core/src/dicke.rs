//! Generalized Dicke bases, the qubit-picture correspondence and symmetric
//! powers of single-particle unitaries.

use std::collections::HashMap;
use std::sync::Arc;

use crate::binom::{binom_exact, ln_binom, ln_factorial, ln_multinomial};
use crate::error::{arg, Error, Result};
use crate::hamiltonian::second_quantize;
use crate::linalg::{self, CMat, CVec, HermitianEigen, C64, ZERO};
use crate::state::{full_dim, FullState, Payload, QuantumState, SymmetricState};

/// Leakage out of the symmetric subspace tolerated by [`dicke_project`].
pub const PROJECT_TOL: f64 = 1e-10;

/// Dimension `C(N+d−1, N)` of the symmetric subspace, exact in 128 bits.
pub fn sym_dim(n: usize, d: usize) -> Result<u128> {
    if d == 0 {
        return arg("mode count d must be at least 1");
    }
    binom_exact((n + d - 1) as u64, n as u64).ok_or_else(|| Error::Capacity {
        what: format!("symmetric space with N = {n}, d = {d}"),
        dim: u128::MAX,
        limit: u128::MAX,
    })
}

/// `ln C(N+d−1, N)`, usable far beyond the 128-bit range.
pub fn ln_sym_dim(n: usize, d: usize) -> Result<f64> {
    if d == 0 {
        return arg("mode count d must be at least 1");
    }
    Ok(ln_binom((n + d - 1) as u64, n as u64))
}

/// Occupation-number basis of `N` bosons in `d` modes.
///
/// Occupation vectors are ordered lexicographically, so for `d = 2` the
/// position of `(n, N−n)` is `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeBasis {
    n: usize,
    d: usize,
    occupations: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

/// Refuse to materialize bases larger than this.
const BASIS_LIMIT: u128 = 1 << 22;

impl DickeBasis {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        let dim = sym_dim(n, d)?;
        if dim > BASIS_LIMIT {
            return Err(Error::Capacity {
                what: format!("Dicke basis with N = {n}, d = {d}"),
                dim,
                limit: BASIS_LIMIT,
            });
        }
        let mut occupations = Vec::with_capacity(dim as usize);
        let mut current = vec![0; d];
        enumerate(n, 0, &mut current, &mut occupations);
        let index = occupations
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        Ok(Self {
            n,
            d,
            occupations,
            index,
        })
    }

    /// Shared two-mode basis, the common case.
    pub fn two_mode(n: usize) -> Arc<Self> {
        Arc::new(Self::new(n, 2).expect("two-mode bases always fit"))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.occupations.len()
    }

    pub fn occupation(&self, i: usize) -> &[usize] {
        &self.occupations[i]
    }

    pub fn occupations(&self) -> &[Vec<usize>] {
        &self.occupations
    }

    pub fn index_of(&self, k: &[usize]) -> Option<usize> {
        self.index.get(k).copied()
    }
}

fn enumerate(remaining: usize, mode: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let d = current.len();
    if mode == d - 1 {
        current[mode] = remaining;
        out.push(current.clone());
        return;
    }
    for k in 0..=remaining {
        current[mode] = k;
        enumerate(remaining - k, mode + 1, current, out);
    }
    current[mode] = 0;
}

/// Dicke state `|D_n^N⟩ = |n, N−n⟩`.
pub fn dicke_state(n_total: usize, n: usize) -> Result<SymmetricState> {
    if n > n_total {
        return arg(format!("Dicke index {n} exceeds N = {n_total}"));
    }
    let basis = DickeBasis::two_mode(n_total);
    let mut v = CVec::zeros(n_total + 1);
    v[n] = C64::new(1.0, 0.0);
    Ok(SymmetricState::new_trusted(basis, Payload::Pure(v)))
}

/// For each full-space basis string: its Dicke index and the coefficient
/// `1/sqrt(multinomial)` of the symmetric isometry.
fn isometry(basis: &DickeBasis) -> Result<Vec<(usize, f64)>> {
    let (n, d) = (basis.n(), basis.d());
    let dim = full_dim(n, d)?;
    let mut out = Vec::with_capacity(dim);
    let mut k = vec![0usize; d];
    for x in 0..dim {
        k.iter_mut().for_each(|c| *c = 0);
        let mut rest = x;
        for _ in 0..n {
            k[rest % d] += 1;
            rest /= d;
        }
        let idx = basis.index_of(&k).expect("occupation vector in basis");
        out.push((idx, (-0.5 * ln_multinomial(&k)).exp()));
    }
    Ok(out)
}

fn isometry_matrix(basis: &DickeBasis) -> Result<CMat> {
    let iso = isometry(basis)?;
    let mut w = CMat::zeros(iso.len(), basis.dim());
    for (x, &(idx, c)) in iso.iter().enumerate() {
        w[(x, idx)] = C64::new(c, 0.0);
    }
    Ok(w)
}

/// Symmetric state written out in the distinguishable-particle picture.
pub fn dicke_embed(state: &SymmetricState) -> Result<FullState> {
    let basis = state.basis();
    let iso = isometry(basis)?;
    let payload = match state.payload() {
        Payload::Pure(alpha) => {
            Payload::Pure(CVec::from_iterator(iso.len(), iso.iter().map(|&(i, c)| alpha[i] * c)))
        }
        Payload::Density(rho) => {
            let w = isometry_matrix(basis)?;
            Payload::Density(&w * rho * w.adjoint())
        }
    };
    Ok(FullState::new_trusted(basis.n(), basis.d(), payload))
}

/// Inverse of [`dicke_embed`]; fails if more than [`PROJECT_TOL`] of the
/// weight lies outside the symmetric subspace.
pub fn dicke_project(state: &FullState) -> Result<SymmetricState> {
    let basis = Arc::new(DickeBasis::new(state.n(), state.d())?);
    let w = isometry_matrix(&basis)?;
    let payload = match state.payload() {
        Payload::Pure(c) => {
            let alpha = w.adjoint() * c;
            let kept = alpha.norm_squared();
            let leaked = (1.0 - kept).max(0.0);
            if leaked > PROJECT_TOL {
                return Err(Error::NotSymmetric { leaked });
            }
            Payload::Pure(alpha.unscale(kept.sqrt()))
        }
        Payload::Density(rho) => {
            let p = w.adjoint() * rho * &w;
            let kept = linalg::trace(&p).re;
            let leaked = (1.0 - kept).max(0.0);
            if leaked > PROJECT_TOL {
                return Err(Error::NotSymmetric { leaked });
            }
            Payload::Density(p.unscale(kept))
        }
    };
    SymmetricState::new(basis, payload)
}

/// Amplification of round-off in the closed-form lift above which the
/// spectral route is used instead.
const CLOSED_FORM_MAX_GROWTH: f64 = 1e3;

/// Matrix of `V^⊗N` on the two-mode symmetric subspace, in the Dicke basis.
pub fn sym_power_lift(v: &CMat, n: usize) -> Result<CMat> {
    if v.shape() != (2, 2) {
        return arg("lift needs a 2x2 single-particle matrix");
    }
    let defect = linalg::unitarity_defect(v);
    if defect > 1e-12 {
        return arg(format!("matrix is not unitary (defect {defect:.3e})"));
    }
    // The alternating binomial sums lose about growth * eps in absolute
    // accuracy, with growth = ‖|V|‖^N for the entrywise modulus |V|.
    let growth = abs_norm(v).ln() * n as f64;
    if growth <= CLOSED_FORM_MAX_GROWTH.ln() {
        Ok(lift_closed_form(v, n))
    } else {
        Ok(lift_spectral(v, n))
    }
}

fn abs_norm(v: &CMat) -> f64 {
    let (a, b, c, d) = (v[(0, 0)].norm(), v[(0, 1)].norm(), v[(1, 0)].norm(), v[(1, 1)].norm());
    // Largest eigenvalue of MᵀM for M = [[a, b], [c, d]].
    let p = a * a + c * c;
    let q = b * b + d * d;
    let r = a * b + c * d;
    let lambda = 0.5 * (p + q) + (0.25 * (p - q).powi(2) + r * r).sqrt();
    lambda.sqrt()
}

/// `⟨D_m|V^⊗N|D_n⟩ = sqrt(C(N,n)/C(N,m)) Σ_{p+q=m} C(n,p) C(N−n,q)
/// V00^p V10^(n−p) V01^q V11^(N−n−q)`.
pub(crate) fn lift_closed_form(v: &CMat, n_total: usize) -> CMat {
    let nn = n_total as u64;
    let polar = |z: C64| (z.norm().ln(), z.arg(), z.norm() == 0.0);
    let entries = [v[(0, 0)], v[(1, 0)], v[(0, 1)], v[(1, 1)]].map(polar);
    let ln_fact: Vec<f64> = (0..=nn).map(ln_factorial).collect();
    let lnb = |a: u64, b: u64| ln_fact[a as usize] - ln_fact[b as usize] - ln_fact[(a - b) as usize];
    let mut out = CMat::zeros(n_total + 1, n_total + 1);
    for n in 0..=nn {
        for m in 0..=nn {
            let scale = 0.5 * (lnb(nn, n) - lnb(nn, m));
            let mut acc = ZERO;
            let p_lo = m.saturating_sub(nn - n);
            let p_hi = m.min(n);
            for p in p_lo..=p_hi {
                let q = m - p;
                let powers = [p, n - p, q, nn - n - q];
                let mut ln_mag = scale + lnb(n, p) + lnb(nn - n, q);
                let mut phase = 0.0;
                let mut vanishes = false;
                for (&(ln_abs, arg, zero), &e) in entries.iter().zip(powers.iter()) {
                    if e == 0 {
                        continue;
                    }
                    if zero {
                        vanishes = true;
                        break;
                    }
                    ln_mag += e as f64 * ln_abs;
                    phase += e as f64 * arg;
                }
                if !vanishes {
                    acc += C64::from_polar(ln_mag.exp(), phase);
                }
            }
            out[(m as usize, n as usize)] = acc;
        }
    }
    out
}

/// Lift through the Lie algebra: `V = e^{iθ} exp(−iG)` with `G` traceless
/// Hermitian, so the lift is `e^{iNθ} exp(−i Ĝ)` for the collective `Ĝ`.
pub(crate) fn lift_spectral(v: &CMat, n_total: usize) -> CMat {
    let det = v[(0, 0)] * v[(1, 1)] - v[(0, 1)] * v[(1, 0)];
    let theta = 0.5 * det.arg();
    let w = v * C64::from_polar(1.0, -theta);
    // W = cos ω − i sin ω (n·σ); A = (i/2)(W − W†) = sin ω (n·σ).
    let a = (&w - w.adjoint()) * C64::new(0.0, 0.5);
    let s = (a[(0, 0)].re.powi(2) + a[(1, 0)].norm_sqr()).sqrt();
    let c = 0.5 * (w[(0, 0)] + w[(1, 1)]).re;
    let global = C64::from_polar(1.0, n_total as f64 * theta);
    let dim = n_total + 1;
    if s == 0.0 {
        let sign = if c >= 0.0 || n_total % 2 == 0 { 1.0 } else { -1.0 };
        return linalg::identity(dim) * (global * sign);
    }
    let omega = s.atan2(c);
    let g = a * C64::new(omega / s, 0.0);
    let basis = DickeBasis::new(n_total, 2).expect("two-mode basis");
    let g_hat = second_quantize(&g, &basis);
    HermitianEigen::new(&g_hat).apply_fn(|x| C64::from_polar(1.0, -x)) * global
}

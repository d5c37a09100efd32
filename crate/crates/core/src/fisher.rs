//! Quantum and classical Fisher information, fidelity, the spectrum
//! functional Λ, analytic Haar averages and the associated bounds.

use crate::error::{arg, Error, Result};
use crate::hamiltonian::CollectiveHamiltonian;
use crate::linalg::{self, CMat, CVec, HermitianEigen, C64, I};
use crate::state::{Payload, QuantumState};

/// Relative eigenvalue threshold for pairs in the mixed-state QFI sum.
pub const QFI_PAIR_THRESHOLD: f64 = 1e-12;
/// Outcome probabilities below this are treated as zeros of `p_n(φ)`.
pub const FI_ZERO_PROBABILITY: f64 = 1e-12;
/// Below this `|dp/dφ|` a vanishing outcome is a removable singularity.
pub const FI_ZERO_DERIVATIVE: f64 = 1e-9;
/// Amplitude below which a rank-one outcome of a pure state is treated as
/// an exact zero of `p(φ)`.
pub const FI_ZERO_AMPLITUDE: f64 = 1e-10;

/// `1/36 − 4/(3e⁶)`: the lower-bound functional `1/(6Δ) − e^{−Δ}(2+Δ)/Δ`
/// evaluated at its near-optimal point `Δ = 6`.
pub fn c_minus() -> f64 {
    1.0 / 36.0 - 4.0 / (3.0 * 6f64.exp())
}

/// `−5/6 + 3/e`: the upper-bound functional at `Δ = 1`.
pub fn c_plus() -> f64 {
    -5.0 / 6.0 + 3.0 / std::f64::consts::E
}

/// Eigenvalues of a density matrix: nonnegative, normalized, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    p: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return arg("spectrum must not be empty");
        }
        if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < -1e-12) {
            return arg(format!("spectrum entry {bad} is negative or not finite"));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return arg(format!("spectrum sums to {sum}, not 1"));
        }
        p.iter_mut().for_each(|x| *x = x.max(0.0));
        p.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { p })
    }

    pub fn pure(dim: usize) -> Self {
        let mut p = vec![0.0; dim.max(1)];
        p[0] = 1.0;
        Self { p }
    }

    pub fn uniform(dim: usize) -> Self {
        let dim = dim.max(1);
        Self {
            p: vec![1.0 / dim as f64; dim],
        }
    }

    /// Spectrum of `(1−q)|ψ⟩⟨ψ| + q·1/D`.
    pub fn depolarized(dim: usize, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return arg(format!("depolarization weight {q} outside [0, 1]"));
        }
        let dim = dim.max(1);
        let mut p = vec![q / dim as f64; dim];
        p[0] += 1.0 - q;
        Ok(Self { p })
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// `Σ p_j²`.
    pub fn purity(&self) -> f64 {
        self.p.iter().map(|x| x * x).sum()
    }
}

/// Measurement on a common Hilbert space.
#[derive(Debug, Clone)]
pub struct Povm {
    kind: PovmKind,
}

#[derive(Debug, Clone)]
enum PovmKind {
    Elements(Vec<CMat>),
    /// Π_n = |b_n⟩⟨b_n| with `b_n` the columns.
    RankOne(CMat),
}

impl Povm {
    pub fn new(elements: Vec<CMat>) -> Result<Self> {
        let dim = match elements.first() {
            Some(e) => e.nrows(),
            None => return arg("POVM needs at least one element"),
        };
        let mut sum = CMat::zeros(dim, dim);
        for (i, e) in elements.iter().enumerate() {
            if e.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.nrows(),
                });
            }
            if linalg::hermiticity_defect(e) > 1e-12 {
                return arg(format!("POVM element {i} is not Hermitian"));
            }
            let min = HermitianEigen::new(e).values[0];
            if min < -1e-12 {
                return arg(format!("POVM element {i} has eigenvalue {min:.3e}"));
            }
            sum += e;
        }
        check_completeness(&sum)?;
        Ok(Self {
            kind: PovmKind::Elements(elements),
        })
    }

    /// Rank-one POVM `{|b_n⟩⟨b_n|}` from the columns of `vectors`.
    pub fn rank_one(vectors: CMat) -> Result<Self> {
        check_completeness(&(&vectors * vectors.adjoint()))?;
        Ok(Self {
            kind: PovmKind::RankOne(vectors),
        })
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            PovmKind::Elements(e) => e.len(),
            PovmKind::RankOne(v) => v.ncols(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            PovmKind::Elements(e) => e[0].nrows(),
            PovmKind::RankOne(v) => v.nrows(),
        }
    }

    pub fn element(&self, i: usize) -> CMat {
        match &self.kind {
            PovmKind::Elements(e) => e[i].clone(),
            PovmKind::RankOne(v) => {
                let b = v.column(i);
                b * b.adjoint()
            }
        }
    }

    pub fn elements(&self) -> Vec<CMat> {
        (0..self.len()).map(|i| self.element(i)).collect()
    }

    /// Outcome probabilities `tr(Π_n ρ)` without any time evolution.
    pub fn probabilities(&self, payload: &Payload) -> Vec<f64> {
        let terms = self.moments(payload, None);
        terms.into_iter().map(|t| t.p).collect()
    }

    /// Per-outcome `p`, `dp/dφ` and the pieces of `d²p/dφ²` or the stable
    /// rank-one contribution, for the evolved payload.
    fn moments(&self, payload: &Payload, h: Option<&CMat>) -> Vec<Moments> {
        let zero_h;
        let h = match h {
            Some(h) => h,
            None => {
                zero_h = CMat::zeros(payload.dim(), payload.dim());
                &zero_h
            }
        };
        match (payload, &self.kind) {
            (Payload::Pure(psi), PovmKind::RankOne(b)) => {
                let h_psi = h * psi;
                let a = b.adjoint() * psi;
                let c = b.adjoint() * &h_psi;
                a.iter()
                    .zip(c.iter())
                    .map(|(&a, &c)| {
                        let p = a.norm_sqr();
                        let z = a.conj() * c;
                        let d = 2.0 * z.im;
                        // d²/p = 4|c|² sin²(arg c − arg a). Below roundoff the phase of
                        // `a` is noise; a crossing through zero has the limit 4|c|².
                        let stable = if a.norm() > FI_ZERO_AMPLITUDE {
                            d * d / p
                        } else {
                            4.0 * c.norm_sqr()
                        };
                        Moments {
                            p,
                            d,
                            second: f64::NAN,
                            stable: Some(stable),
                        }
                    })
                    .collect()
            }
            (Payload::Pure(psi), PovmKind::Elements(es)) => {
                let h_psi = h * psi;
                let h2_psi = h * &h_psi;
                es.iter()
                    .map(|e| {
                        let p = psi.dotc(&(e * psi)).re;
                        let d = 2.0 * psi.dotc(&(e * &h_psi)).im;
                        let second = 2.0 * h_psi.dotc(&(e * &h_psi)).re
                            - 2.0 * psi.dotc(&(e * &h2_psi)).re;
                        Moments {
                            p,
                            d,
                            second,
                            stable: None,
                        }
                    })
                    .collect()
            }
            (Payload::Density(rho), kind) => {
                // dρ/dφ = −i[H, ρ], d²ρ/dφ² = −[H, [H, ρ]].
                let comm = linalg::commutator(h, rho);
                let first = &comm * (-I);
                let second = -linalg::commutator(h, &comm);
                let tr = |m: &CMat, e: &CMat| (e * m).trace().re;
                match kind {
                    PovmKind::Elements(es) => es
                        .iter()
                        .map(|e| Moments {
                            p: tr(rho, e),
                            d: tr(&first, e),
                            second: tr(&second, e),
                            stable: None,
                        })
                        .collect(),
                    PovmKind::RankOne(b) => (0..b.ncols())
                        .map(|i| {
                            let v = b.column(i).into_owned();
                            let q = |m: &CMat| v.dotc(&(m * &v)).re;
                            Moments {
                                p: q(rho),
                                d: q(&first),
                                second: q(&second),
                                stable: None,
                            }
                        })
                        .collect(),
                }
            }
        }
    }
}

fn check_completeness(sum: &CMat) -> Result<()> {
    let defect = linalg::max_abs_diff(sum, &linalg::identity(sum.nrows()));
    if defect > 1e-10 {
        return arg(format!("POVM elements do not sum to identity (defect {defect:.3e})"));
    }
    Ok(())
}

struct Moments {
    p: f64,
    d: f64,
    second: f64,
    stable: Option<f64>,
}

fn check_space<S: QuantumState + ?Sized>(state: &S, h: &CollectiveHamiltonian) -> Result<()> {
    if state.space() != h.space() || state.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: state.dim(),
        });
    }
    Ok(())
}

/// Quantum Fisher information of `state` for the phase generator `h`.
pub fn qfi<S: QuantumState + ?Sized>(state: &S, h: &CollectiveHamiltonian) -> Result<f64> {
    check_space(state, h)?;
    Ok(qfi_payload(state.payload(), h.matrix(), QFI_PAIR_THRESHOLD))
}

/// QFI of a payload for an arbitrary Hermitian generator matrix; `tau` is
/// the relative eigenvalue-pair threshold for mixed states.
pub fn qfi_payload(payload: &Payload, h: &CMat, tau: f64) -> f64 {
    match payload {
        Payload::Pure(psi) => qfi_pure(psi, h),
        Payload::Density(rho) => qfi_density(rho, h, tau),
    }
}

/// `4 Var_ψ(H)`.
pub fn qfi_pure(psi: &CVec, h: &CMat) -> f64 {
    let h_psi = h * psi;
    let mean = psi.dotc(&h_psi).re;
    let second = h_psi.norm_squared();
    (4.0 * (second - mean * mean)).max(0.0)
}

/// `2 Σ (p_i − p_j)²/(p_i + p_j) |⟨e_i|H|e_j⟩|²` over pairs with
/// `p_i + p_j > tau · max p`.
pub fn qfi_density(rho: &CMat, h: &CMat, tau: f64) -> f64 {
    let eig = HermitianEigen::new(rho);
    let p: Vec<f64> = eig.values.iter().map(|x| x.max(0.0)).collect();
    let cutoff = tau * p.iter().fold(0.0f64, |a, &b| a.max(b));
    let h_eig = eig.vectors.adjoint() * h * &eig.vectors;
    let n = p.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let s = p[i] + p[j];
            if s > cutoff && s > 0.0 {
                let diff = p[i] - p[j];
                acc += diff * diff / s * h_eig[(i, j)].norm_sqr();
            }
        }
    }
    // Each unordered pair appears twice in the symmetric sum.
    (4.0 * acc).max(0.0)
}

/// Classical Fisher information of `povm` on `e^{−iHφ} ρ e^{iHφ}`.
pub fn classical_fi<S: QuantumState + ?Sized>(
    povm: &Povm,
    state: &S,
    h: &CollectiveHamiltonian,
    phi: f64,
) -> Result<f64> {
    check_space(state, h)?;
    if povm.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: povm.dim(),
        });
    }
    let evolved = evolve(state.payload(), h.matrix(), phi);
    fisher_from_moments(&povm.moments(&evolved, Some(h.matrix())))
}

/// `e^{−iHφ}` applied to a payload, with a shortcut for diagonal `H`.
pub(crate) fn evolve(payload: &Payload, h: &CMat, phi: f64) -> Payload {
    let n = h.nrows();
    let diagonal = (0..n).all(|r| (0..n).all(|c| r == c || h[(r, c)] == C64::new(0.0, 0.0)));
    let u = if diagonal {
        CMat::from_diagonal(&CVec::from_iterator(
            n,
            (0..n).map(|i| C64::from_polar(1.0, -phi * h[(i, i)].re)),
        ))
    } else {
        linalg::expm_hermitian(h, phi)
    };
    match payload {
        Payload::Pure(psi) => Payload::Pure(&u * psi),
        Payload::Density(rho) => Payload::Density(&u * rho * u.adjoint()),
    }
}

fn fisher_from_moments(moments: &[Moments]) -> Result<f64> {
    let mut total = 0.0;
    for (index, m) in moments.iter().enumerate() {
        if let Some(stable) = m.stable {
            total += stable;
            continue;
        }
        if m.p >= FI_ZERO_PROBABILITY {
            total += m.d * m.d / m.p;
        } else if m.d.abs() < FI_ZERO_DERIVATIVE {
            // At a zero of p(φ), p ≈ p''δ²/2 and p' ≈ p''δ, so p'²/p → 2p''.
            total += 2.0 * m.second.max(0.0);
        } else if m.p > 0.0 {
            total += m.d * m.d / m.p;
        } else {
            return Err(Error::Singularity {
                index,
                probability: m.p,
                derivative: m.d,
            });
        }
    }
    Ok(total)
}

/// Uhlmann fidelity and Bures distance `sqrt(2(1 − F))`.
pub fn fidelity_bures(a: &Payload, b: &Payload) -> Result<(f64, f64)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let f = match (a, b) {
        (Payload::Pure(x), Payload::Pure(y)) => x.dotc(y).norm(),
        (Payload::Pure(x), Payload::Density(s)) | (Payload::Density(s), Payload::Pure(x)) => {
            check_psd(s)?;
            linalg::expectation(x, s).max(0.0).sqrt()
        }
        (Payload::Density(r), Payload::Density(s)) => {
            check_psd(r)?;
            check_psd(s)?;
            let root = linalg::sqrt_psd(r);
            let inner = &root * s * &root;
            HermitianEigen::new(&inner)
                .values
                .iter()
                .map(|x| x.max(0.0).sqrt())
                .sum()
        }
    };
    let f = f.clamp(0.0, 1.0);
    Ok((f, (2.0 * (1.0 - f)).sqrt()))
}

fn check_psd(m: &CMat) -> Result<()> {
    let min = HermitianEigen::new(m).values.first().copied().unwrap_or(0.0);
    if min < -1e-10 {
        return Err(Error::InvalidState(format!("matrix has eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// `(‖[H,ρ]‖₁², ‖[H,ρ]‖_HS²)`, both lower bounds on the QFI.
pub fn asymmetry_bounds(rho: &CMat, h: &CMat) -> (f64, f64) {
    let comm = linalg::commutator(h, rho);
    // i[H, ρ] is Hermitian, so its singular values are |eigenvalues|.
    let trace_norm: f64 = HermitianEigen::new(&(&comm * I)).values.iter().map(|x| x.abs()).sum();
    (trace_norm * trace_norm, linalg::frobenius_sq(&comm))
}

/// Λ and its lower bound `(D/(D−1)) d_B(diag p, 1/D)²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaValue {
    pub lambda: f64,
    pub lower_bound: f64,
}

pub fn lambda_of_spectrum(p: &Spectrum, dim: usize) -> Result<LambdaValue> {
    if p.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p.len(),
        });
    }
    if dim < 2 {
        return arg("the spectrum functional needs dimension at least 2");
    }
    let v = p.values();
    let mut acc = 0.0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let s = v[i] + v[j];
            if s > 0.0 {
                acc += (v[i] - v[j]).powi(2) / s;
            }
        }
    }
    let scale = dim as f64 / (dim as f64 - 1.0);
    let fidelity: f64 = v.iter().map(|x| x.sqrt()).sum::<f64>() / (dim as f64).sqrt();
    let bures_sq = 2.0 * (1.0 - fidelity.min(1.0));
    Ok(LambdaValue {
        lambda: 2.0 * acc / (2.0 * (dim as f64 - 1.0)),
        lower_bound: scale * bures_sq / 2.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Full,
    Symmetric,
}

/// Haar average of the QFI over an isospectral ensemble:
/// `4 tr(H²) Λ / (D + 1)`.
pub fn avg_qfi_isospectral(tr_big_h2: f64, dim: usize, lambda: f64) -> f64 {
    4.0 * tr_big_h2 * lambda / (dim as f64 + 1.0)
}

/// Closed-form Haar-average QFI of the isospectral ensemble on the full or
/// symmetric space.
pub fn analytic_avg_qfi(space: SpaceKind, n: usize, d: usize, p: &Spectrum, tr_h2: f64) -> Result<f64> {
    let nf = n as f64;
    let df = d as f64;
    match space {
        SpaceKind::Full => {
            let dim = crate::state::full_dim(n, d)?;
            let lambda = lambda_of_spectrum(p, dim)?.lambda;
            let big = df.powi(n as i32);
            Ok(4.0 * nf * tr_h2 * big / (df * (big + 1.0)) * lambda)
        }
        SpaceKind::Symmetric => {
            let dim = crate::dicke::sym_dim(n, d)?;
            let lambda = lambda_of_spectrum(p, dim as usize)?.lambda;
            let s = dim as f64;
            Ok(4.0 * nf * (nf + df) * tr_h2 / (df * (df + 1.0)) * s / (s + 1.0) * lambda)
        }
    }
}

/// Bounds on the average QFI of `N`-boson two-mode states after losing `k`
/// particles, for `tr h² = 1/2` and initial purity `purity`.
pub fn loss_avg_bounds(n: usize, k: usize, purity: f64) -> Result<(f64, f64)> {
    if k >= n {
        return arg(format!("lost particles k = {k} must be below N = {n}"));
    }
    let nf = n as f64;
    let kf = k as f64;
    let min_purity = 1.0 / (nf + 1.0);
    if !(min_purity - 1e-12..=1.0 + 1e-12).contains(&purity) {
        return arg(format!("purity {purity} outside [1/(N+1), 1]"));
    }
    let lower = (nf - kf) * (nf + 1.0) / ((kf + 1.0) * (kf + 2.0)) * ((nf + 1.0) * purity - 1.0) / nf / 3.0;
    let upper = (nf - kf) * (nf - kf + 2.0) / 3.0;
    Ok((lower.max(0.0), upper))
}

/// `(c₋ N², c₊ N² + N)`, the band for the Haar-averaged Mach-Zehnder FI.
pub fn fi_avg_bounds(n: usize) -> (f64, f64) {
    let nf = n as f64;
    (c_minus() * nf * nf, c_plus() * nf * nf + nf)
}

/// Upper bound on the Haar average of the locally optimized QFI on the full
/// space: `4N‖h‖² [1 + (N−1) d² / sqrt(d^N)]`.
pub fn lu_upper_bound(n: usize, d: usize, h_norm: f64) -> f64 {
    let nf = n as f64;
    let df = d as f64;
    let root = (0.5 * nf * df.ln()).exp();
    4.0 * nf * h_norm * h_norm * (1.0 + (nf - 1.0) * df * df / root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((c_minus() - 0.0244).abs() < 1e-4);
        assert!((c_plus() - 0.270).abs() < 5e-4);
        // The constants are the two Δ-families evaluated at Δ = 6 and Δ = 1.
        let lower = |x: f64| 1.0 / (6.0 * x) - (-x).exp() * (2.0 + x) / x;
        let upper = |x: f64| 1.0 / (6.0 * x) + (x - 2.0 + (x + 2.0) * (-x).exp()) / x;
        assert!((lower(6.0) - c_minus()).abs() < 1e-15);
        assert!((upper(1.0) - c_plus()).abs() < 1e-15);
        let (lo, hi) = fi_avg_bounds(100);
        assert!((lo - 244.73).abs() < 0.01, "{lo}");
        assert!((hi - 2803.05).abs() < 0.01, "{hi}");
    }

    #[test]
    fn conjectured_mean_inside_band() {
        for n in 1..500 {
            let (lo, hi) = fi_avg_bounds(n);
            let mid = (n * (n + 1)) as f64 / 6.0;
            assert!(lo < mid && mid < hi, "N = {n}");
        }
    }

    #[test]
    fn lu_bound_values() {
        assert!((lu_upper_bound(10, 2, 0.5) - 21.25).abs() < 1e-12);
        assert!((lu_upper_bound(1, 3, 0.7) - 4.0 * 0.49).abs() < 1e-12);
        let big = lu_upper_bound(200, 2, 0.5) / 200.0;
        assert!((big - 1.0).abs() < 1e-9);
    }

    #[test]
    fn loss_bound_values() {
        let (lo, hi) = loss_avg_bounds(10, 1, 1.0).unwrap();
        assert!((lo - 5.5).abs() < 1e-12 && (hi - 33.0).abs() < 1e-12);
        let (lo, _) = loss_avg_bounds(12, 0, 1.0).unwrap();
        assert!((lo - 12.0 * 13.0 / 6.0).abs() < 1e-12);
        let (lo, _) = loss_avg_bounds(12, 3, 1.0 / 13.0).unwrap();
        assert!(lo.abs() < 1e-12);
        assert!(loss_avg_bounds(12, 3, 0.01).is_err());
        assert!(loss_avg_bounds(12, 12, 1.0).is_err());
    }

    #[test]
    fn analytic_average_values() {
        let v = analytic_avg_qfi(SpaceKind::Symmetric, 20, 2, &Spectrum::pure(21), 0.5).unwrap();
        assert!((v - 140.0).abs() < 1e-10);
        let v = analytic_avg_qfi(SpaceKind::Full, 10, 2, &Spectrum::pure(1024), 0.5).unwrap();
        assert!((v - 10.0 * 1024.0 / 1025.0).abs() < 1e-12);
        let v = analytic_avg_qfi(SpaceKind::Symmetric, 5, 2, &Spectrum::uniform(6), 0.5).unwrap();
        assert_eq!(v, 0.0);
        assert!(analytic_avg_qfi(SpaceKind::Symmetric, 5, 2, &Spectrum::pure(7), 0.5).is_err());
    }

    #[test]
    fn lambda_special_spectra() {
        let l = lambda_of_spectrum(&Spectrum::pure(7), 7).unwrap();
        assert!((l.lambda - 1.0).abs() < 1e-15);
        assert!(l.lower_bound <= l.lambda + 1e-15);
        let l = lambda_of_spectrum(&Spectrum::uniform(7), 7).unwrap();
        assert!(l.lambda.abs() < 1e-15);
        for (dim, q) in [(5usize, 0.3), (11, 0.9), (2, 0.5)] {
            let l = lambda_of_spectrum(&Spectrum::depolarized(dim, q).unwrap(), dim).unwrap();
            let want = (1.0 - q).powi(2) / (1.0 - q + 2.0 * q / dim as f64);
            assert!((l.lambda - want).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_validation() {
        assert!(Spectrum::new(vec![0.5, 0.6]).is_err());
        assert!(Spectrum::new(vec![1.2, -0.2]).is_err());
        assert_eq!(Spectrum::new(vec![0.25, 0.75]).unwrap().values(), &[0.75, 0.25]);
    }

    #[test]
    fn povm_validation() {
        let id = linalg::identity(2);
        assert!(Povm::new(vec![id.clone() * C64::new(0.5, 0.0)]).is_err());
        assert!(Povm::new(vec![id]).is_ok());
    }
}

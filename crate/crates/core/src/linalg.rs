//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Eigendecomposition of a Hermitian matrix with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `values`.
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn new(m: &CMat) -> Self {
        assert!(m.is_square(), "eigendecomposition of a non-square matrix");
        let n = m.nrows();
        if n == 0 {
            return Self {
                values: Vec::new(),
                vectors: CMat::zeros(0, 0),
            };
        }
        // Symmetrize first so round-off asymmetry cannot leak into the solver.
        let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    /// `V f(Λ) V†` for a complex-valued spectral function.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, &v) in self.values.iter().enumerate() {
            let fv = f(v);
            for r in 0..n {
                scaled[(r, c)] *= fv;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// `exp(−i t H)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMat, t: f64) -> CMat {
    HermitianEigen::new(h).apply_fn(|x| C64::from_polar(1.0, -t * x))
}

/// Principal square root of a positive semidefinite matrix; negative
/// round-off eigenvalues are clipped to zero.
pub fn sqrt_psd(m: &CMat) -> CMat {
    HermitianEigen::new(m).apply_fn(|x| C64::new(x.max(0.0).sqrt(), 0.0))
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn unitarity_defect(u: &CMat) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.ncols()))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn outer(v: &CVec) -> CMat {
    v * v.adjoint()
}

/// Operator norm of a Hermitian matrix.
pub fn hermitian_norm(m: &CMat) -> f64 {
    let values = HermitianEigen::new(m).values;
    values.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
}

pub fn frobenius_sq(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Expectation `⟨v|M|v⟩` (real part, for Hermitian `M`).
pub fn expectation(v: &CVec, m: &CMat) -> f64 {
    v.dotc(&(m * v)).re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_hermitian() -> CMat {
        CMat::from_row_slice(
            3,
            3,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.3, 0.2),
                C64::new(-0.1, 0.5),
                C64::new(0.3, -0.2),
                C64::new(-0.4, 0.0),
                C64::new(0.0, 0.7),
                C64::new(-0.1, -0.5),
                C64::new(0.0, -0.7),
                C64::new(0.2, 0.0),
            ],
        )
    }

    #[test]
    fn eigen_reconstructs_and_sorts() {
        let h = sample_hermitian();
        let eig = HermitianEigen::new(&h);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let back = eig.apply_fn(|x| C64::new(x, 0.0));
        assert!(max_abs_diff(&back, &h) < 1e-13);
    }

    #[test]
    fn expm_is_unitary_and_composes() {
        let h = sample_hermitian();
        let u = expm_hermitian(&h, 0.7);
        assert!(unitarity_defect(&u) < 1e-13);
        let uu = expm_hermitian(&h, 1.4);
        assert!(max_abs_diff(&(&u * &u), &uu) < 1e-13);
    }

    #[test]
    fn sqrt_squares_back() {
        let h = sample_hermitian();
        let psd = &h * &h;
        let s = sqrt_psd(&psd);
        assert!(max_abs_diff(&(&s * &s), &psd) < 1e-12);
    }
}

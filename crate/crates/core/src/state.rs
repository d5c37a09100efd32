//! Pure and mixed states on the full and symmetric spaces.

use std::sync::Arc;

use crate::dicke::DickeBasis;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, HermitianEigen, C64};

/// Pure states must have unit norm to this tolerance.
pub const NORM_TOL: f64 = 1e-12;
/// Density matrices: Hermiticity, trace and eigenvalue floor tolerance.
pub const DENSITY_TOL: f64 = 1e-12;
/// Largest full (distinguishable-particle) space we represent densely.
pub const FULL_DIM_LIMIT: u128 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Pure(CVec),
    Density(CMat),
}

impl Payload {
    pub fn dim(&self) -> usize {
        match self {
            Payload::Pure(v) => v.len(),
            Payload::Density(m) => m.nrows(),
        }
    }

    /// Density matrix, promoting a pure vector to its projector.
    pub fn density(&self) -> CMat {
        match self {
            Payload::Pure(v) => linalg::outer(v),
            Payload::Density(m) => m.clone(),
        }
    }

    pub fn is_pure_payload(&self) -> bool {
        matches!(self, Payload::Pure(_))
    }

    pub fn purity(&self) -> f64 {
        match self {
            Payload::Pure(_) => 1.0,
            Payload::Density(m) => linalg::frobenius_sq(m),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Payload::Pure(v) => {
                let norm = v.norm();
                if (norm - 1.0).abs() > NORM_TOL {
                    return Err(Error::InvalidState(format!(
                        "pure state norm {norm:.15} differs from 1"
                    )));
                }
            }
            Payload::Density(m) => {
                validate_density_cheap(m)?;
                let min_eig = HermitianEigen::new(m).values.first().copied().unwrap_or(0.0);
                if min_eig < -DENSITY_TOL {
                    return Err(Error::InvalidState(format!(
                        "density matrix has negative eigenvalue {min_eig:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn validate_density_cheap(m: &CMat) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidState("density matrix is not square".into()));
    }
    let herm = linalg::hermiticity_defect(m);
    if herm > DENSITY_TOL {
        return Err(Error::InvalidState(format!(
            "density matrix not Hermitian (defect {herm:.3e})"
        )));
    }
    let tr = linalg::trace(m);
    if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
        return Err(Error::InvalidState(format!("density matrix trace {tr}")));
    }
    Ok(())
}

/// Which Hilbert space an object lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// `(C^d)^⊗N`, distinguishable particles.
    Full { n: usize, d: usize },
    /// The symmetric (bosonic) subspace of `(C^d)^⊗N`.
    Symmetric { n: usize, d: usize },
}

impl Space {
    pub fn n(&self) -> usize {
        match *self {
            Space::Full { n, .. } | Space::Symmetric { n, .. } => n,
        }
    }

    pub fn d(&self) -> usize {
        match *self {
            Space::Full { d, .. } | Space::Symmetric { d, .. } => d,
        }
    }
}

/// Common read access to [`SymmetricState`] and [`FullState`].
pub trait QuantumState {
    fn space(&self) -> Space;
    fn payload(&self) -> &Payload;

    fn dim(&self) -> usize {
        self.payload().dim()
    }

    fn density(&self) -> CMat {
        self.payload().density()
    }
}

/// State of `N` bosons in `d` modes, in the generalized Dicke basis.
#[derive(Debug, Clone)]
pub struct SymmetricState {
    basis: Arc<DickeBasis>,
    payload: Payload,
}

impl SymmetricState {
    pub fn new(basis: Arc<DickeBasis>, payload: Payload) -> Result<Self> {
        if payload.dim() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: payload.dim(),
            });
        }
        payload.validate()?;
        Ok(Self { basis, payload })
    }

    /// Skips the eigenvalue check; for states that are valid by construction.
    pub(crate) fn new_trusted(basis: Arc<DickeBasis>, payload: Payload) -> Self {
        debug_assert_eq!(payload.dim(), basis.dim());
        Self { basis, payload }
    }

    pub fn pure(basis: Arc<DickeBasis>, amplitudes: CVec) -> Result<Self> {
        Self::new(basis, Payload::Pure(amplitudes))
    }

    /// Two-mode state from amplitudes `α_0..α_N`, normalizing them.
    pub fn two_mode(amplitudes: &[C64]) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Argument("empty amplitude list".into()));
        }
        let basis = Arc::new(DickeBasis::new(amplitudes.len() - 1, 2)?);
        let v = CVec::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero amplitude vector".into()));
        }
        Self::pure(basis, v.unscale(norm))
    }

    pub fn density(basis: Arc<DickeBasis>, rho: CMat) -> Result<Self> {
        Self::new(basis, Payload::Density(rho))
    }

    pub fn basis(&self) -> &DickeBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> &Arc<DickeBasis> {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn d(&self) -> usize {
        self.basis.d()
    }

    pub fn into_payload(self) -> Payload {
        self.payload
    }

    pub fn amplitudes(&self) -> Option<&CVec> {
        match &self.payload {
            Payload::Pure(v) => Some(v),
            Payload::Density(_) => None,
        }
    }
}

impl QuantumState for SymmetricState {
    fn space(&self) -> Space {
        Space::Symmetric {
            n: self.basis.n(),
            d: self.basis.d(),
        }
    }

    fn payload(&self) -> &Payload {
        &self.payload
    }
}

/// State on `(C^d)^⊗N` with `d^N ≤ 4096`. Tensor factor 1 is the most
/// significant digit of the basis index.
#[derive(Debug, Clone)]
pub struct FullState {
    n: usize,
    d: usize,
    payload: Payload,
}

/// `d^N`, or a capacity error above [`FULL_DIM_LIMIT`].
pub fn full_dim(n: usize, d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::Argument("mode count d must be at least 1".into()));
    }
    let mut dim: u128 = 1;
    for _ in 0..n {
        dim = dim.saturating_mul(d as u128);
        if dim > FULL_DIM_LIMIT {
            return Err(Error::Capacity {
                what: format!("full space with N = {n}, d = {d}"),
                dim: (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX),
                limit: FULL_DIM_LIMIT,
            });
        }
    }
    Ok(dim as usize)
}

impl FullState {
    pub fn new(n: usize, d: usize, payload: Payload) -> Result<Self> {
        let dim = full_dim(n, d)?;
        if payload.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: payload.dim(),
            });
        }
        payload.validate()?;
        Ok(Self { n, d, payload })
    }

    pub(crate) fn new_trusted(n: usize, d: usize, payload: Payload) -> Self {
        Self { n, d, payload }
    }

    pub fn pure(n: usize, d: usize, v: CVec) -> Result<Self> {
        Self::new(n, d, Payload::Pure(v))
    }

    pub fn density(n: usize, d: usize, rho: CMat) -> Result<Self> {
        Self::new(n, d, Payload::Density(rho))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn into_payload(self) -> Payload {
        self.payload
    }
}

impl QuantumState for FullState {
    fn space(&self) -> Space {
        Space::Full {
            n: self.n,
            d: self.d,
        }
    }

    fn payload(&self) -> &Payload {
        &self.payload
    }
}

/// Either kind of state, as produced by ensemble sampling.
#[derive(Debug, Clone)]
pub enum AnyState {
    Symmetric(SymmetricState),
    Full(FullState),
}

impl QuantumState for AnyState {
    fn space(&self) -> Space {
        match self {
            AnyState::Symmetric(s) => s.space(),
            AnyState::Full(s) => s.space(),
        }
    }

    fn payload(&self) -> &Payload {
        match self {
            AnyState::Symmetric(s) => s.payload(),
            AnyState::Full(s) => s.payload(),
        }
    }
}

impl AnyState {
    pub fn as_symmetric(&self) -> Option<&SymmetricState> {
        match self {
            AnyState::Symmetric(s) => Some(s),
            AnyState::Full(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized_pure() {
        let basis = Arc::new(DickeBasis::new(2, 2).unwrap());
        let v = CVec::from_element(3, C64::new(1.0, 0.0));
        assert!(SymmetricState::pure(basis, v).is_err());
    }

    #[test]
    fn rejects_non_psd_density() {
        let basis = Arc::new(DickeBasis::new(1, 2).unwrap());
        let rho = CMat::from_diagonal(&CVec::from_vec(vec![
            C64::new(1.5, 0.0),
            C64::new(-0.5, 0.0),
        ]));
        assert!(matches!(
            SymmetricState::density(basis, rho),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn full_space_cap() {
        assert_eq!(full_dim(12, 2).unwrap(), 4096);
        assert!(matches!(full_dim(13, 2), Err(Error::Capacity { .. })));
        assert!(matches!(full_dim(20, 2), Err(Error::Capacity { .. })));
        assert_eq!(full_dim(7, 3).unwrap(), 2187);
    }
}

//! Mach-Zehnder readout: photon counting after a balanced beam splitter.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::{arg, Error, Result};
use crate::fisher::{classical_fi, Povm};
use crate::hamiltonian::{angular_momentum, beam_splitter, Axis, CollectiveHamiltonian};
use crate::linalg::{CMat, HermitianEigen, C64};
use crate::state::{Payload, QuantumState, Space, SymmetricState};

/// Default number of points in a phase scan over `[0, 2π)`.
pub const DEFAULT_GRID_POINTS: usize = 128;

/// Cached operators of the `N`-particle interferometer.
#[derive(Debug, Clone)]
pub struct MachZehnder {
    n: usize,
    b: CMat,
    povm: Povm,
    jz: CollectiveHamiltonian,
    jy: HermitianEigen,
}

impl MachZehnder {
    pub fn new(n: usize) -> Self {
        let b = beam_splitter(n);
        // Π_n = B†|D_n⟩⟨D_n|B: the vectors are the columns of B†.
        let povm = Povm::rank_one(b.adjoint()).expect("beam splitter is unitary");
        let jz = angular_momentum(Axis::Z, n);
        let jy = HermitianEigen::new(angular_momentum(Axis::Y, n).matrix());
        Self { n, b, povm, jz, jy }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn beam_splitter(&self) -> &CMat {
        &self.b
    }

    pub fn jz(&self) -> &CollectiveHamiltonian {
        &self.jz
    }

    fn check(&self, state: &SymmetricState) -> Result<()> {
        if state.space() != (Space::Symmetric { n: self.n, d: 2 }) {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                got: state.dim(),
            });
        }
        Ok(())
    }

    /// `p_n(φ) = tr(Π_n e^{−iJ_zφ} ρ e^{iJ_zφ})`.
    pub fn probabilities(&self, state: &SymmetricState, phi: f64) -> Result<Vec<f64>> {
        self.check(state)?;
        let evolved = crate::fisher::evolve(state.payload(), self.jz.matrix(), phi);
        Ok(dicke_populations(&evolved, &self.b))
    }

    /// Same probabilities through `B e^{−iJ_zφ} B† = e^{iJ_yφ}`: the state is
    /// sent through `B` first and then rotated about `J_y`.
    pub fn probabilities_via_jy(&self, state: &SymmetricState, phi: f64) -> Result<Vec<f64>> {
        self.check(state)?;
        let rot = self.jy.apply_fn(|x| C64::from_polar(1.0, phi * x));
        Ok(dicke_populations(state.payload(), &(rot * &self.b)))
    }

    pub fn fi(&self, state: &SymmetricState, phi: f64) -> Result<f64> {
        self.check(state)?;
        classical_fi(&self.povm, state, &self.jz, phi)
    }

    /// FI on every grid point, evaluated in parallel.
    pub fn fi_scan(&self, state: &SymmetricState, grid: &[f64]) -> Result<FiScan> {
        if grid.is_empty() {
            return arg("phase grid must not be empty");
        }
        if grid.windows(2).any(|w| w[1] < w[0]) || grid[0] < 0.0 || grid[grid.len() - 1] > TAU {
            return arg("phase grid must be ascending within [0, 2π]");
        }
        let values = grid
            .par_iter()
            .map(|&phi| self.fi(state, phi))
            .collect::<Result<Vec<f64>>>()?;
        let (mut imin, mut imax) = (0, 0);
        for (i, v) in values.iter().enumerate() {
            if *v < values[imin] {
                imin = i;
            }
            if *v > values[imax] {
                imax = i;
            }
        }
        Ok(FiScan {
            min: values[imin],
            argmin: grid[imin],
            max: values[imax],
            argmax: grid[imax],
            values,
        })
    }
}

/// `|⟨D_n|U|ψ⟩|²`, or the diagonal of `UρU†`, clamped at zero.
fn dicke_populations(payload: &Payload, u: &CMat) -> Vec<f64> {
    match payload {
        Payload::Pure(psi) => (u * psi).iter().map(|z| z.norm_sqr()).collect(),
        Payload::Density(rho) => {
            let r = u * rho * u.adjoint();
            (0..r.nrows()).map(|i| r[(i, i)].re.max(0.0)).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiScan {
    pub min: f64,
    pub argmin: f64,
    pub max: f64,
    pub argmax: f64,
    pub values: Vec<f64>,
}

/// `N + 1` uniform points on `[0, 2π)`.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| TAU * i as f64 / points as f64).collect()
}

pub fn mz_povm(n: usize) -> Povm {
    MachZehnder::new(n).povm
}

pub fn mz_probabilities(state: &SymmetricState, phi: f64) -> Result<Vec<f64>> {
    MachZehnder::new(state.n()).probabilities(state, phi)
}

pub fn mz_fi(state: &SymmetricState, phi: f64) -> Result<f64> {
    MachZehnder::new(state.n()).fi(state, phi)
}

pub fn mz_fi_scan(state: &SymmetricState, grid: &[f64]) -> Result<FiScan> {
    MachZehnder::new(state.n()).fi_scan(state, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binom::binom;
    use crate::dicke::{dicke_state, sym_power_lift};
    use crate::hamiltonian::pauli;
    use crate::linalg::{self, CVec};

    fn balanced(n: usize) -> SymmetricState {
        let amps: Vec<C64> = (0..=n)
            .map(|k| C64::new((binom(n as u64, k as u64) / 2f64.powi(n as i32)).sqrt(), 0.0))
            .collect();
        SymmetricState::two_mode(&amps).unwrap()
    }

    #[test]
    fn povm_is_complete_rank_one() {
        let mz = MachZehnder::new(6);
        let sum = mz.povm().elements().iter().fold(CMat::zeros(7, 7), |a, e| a + e);
        assert!(linalg::max_abs_diff(&sum, &linalg::identity(7)) < 1e-10);
        for e in mz.povm().elements() {
            let ev = HermitianEigen::new(&e).values;
            assert!((ev[6] - 1.0).abs() < 1e-10);
            assert!(ev[..6].iter().all(|x| x.abs() < 1e-10));
        }
    }

    #[test]
    fn single_particle_povm_is_sigma_y_projector() {
        let mz = MachZehnder::new(1);
        // B = exp(−iπσ_x/4) maps |D_0⟩ = |1⟩ back to an eigenvector of σ_y.
        let pi0 = mz.povm().element(0);
        let sy = pauli(Axis::Y);
        let expected_plus = (linalg::identity(2) + &sy) * C64::new(0.5, 0.0);
        let expected_minus = (linalg::identity(2) - &sy) * C64::new(0.5, 0.0);
        let b1 = linalg::expm_hermitian(&(pauli(Axis::X) * C64::new(0.5, 0.0)), std::f64::consts::FRAC_PI_2);
        let lifted = sym_power_lift(&b1, 1).unwrap();
        assert!(linalg::max_abs_diff(&lifted, mz.beam_splitter()) < 1e-14);
        let d_plus = linalg::max_abs_diff(&pi0, &expected_plus);
        let d_minus = linalg::max_abs_diff(&pi0, &expected_minus);
        assert!(d_plus.min(d_minus) < 1e-12);
    }

    #[test]
    fn measuring_b_dagger_dicke_at_zero_phase() {
        let n = 5;
        let mz = MachZehnder::new(n);
        for k in 0..=n {
            let v: CVec = mz.beam_splitter().adjoint().column(k).into_owned();
            let s = SymmetricState::pure(crate::dicke::DickeBasis::two_mode(n), v).unwrap();
            let p = mz.probabilities(&s, 0.0).unwrap();
            for (i, pi) in p.iter().enumerate() {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((pi - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dicke_input_gives_phase_independent_binomial() {
        let n = 6;
        let s = dicke_state(n, 0).unwrap();
        let p0 = mz_probabilities(&s, 0.0).unwrap();
        for (k, p) in p0.iter().enumerate() {
            let want = binom(n as u64, k as u64) / 2f64.powi(n as i32);
            assert!((p - want).abs() < 1e-12);
        }
        let p1 = mz_probabilities(&s, 1.234).unwrap();
        assert!(p0.iter().zip(&p1).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(mz_fi(&s, 0.7).unwrap().abs() < 1e-12);
    }

    #[test]
    fn single_qubit_equator_state_has_unit_fi() {
        let s = balanced(1);
        for phi in [0.0, 0.4, 1.0, 2.5, -1.3] {
            let p = mz_probabilities(&s, phi).unwrap();
            let (lo, hi) = ((1.0 - phi.sin()) / 2.0, (1.0 + phi.sin()) / 2.0);
            assert!((p[0] - lo).abs() < 1e-12 || (p[0] - hi).abs() < 1e-12);
            assert!((mz_fi(&s, phi).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn balanced_state_scan_is_flat_at_n() {
        let n = 9;
        let scan = mz_fi_scan(&balanced(n), &uniform_grid(32)).unwrap();
        assert!((scan.min - n as f64).abs() < 1e-9);
        assert!((scan.max - n as f64).abs() < 1e-9);
    }

    #[test]
    fn zero_probability_outcome_uses_limit() {
        // At φ = −π/2 outcome probability vanishes exactly for one outcome.
        let s = balanced(1);
        let fi = mz_fi(&s, -std::f64::consts::FRAC_PI_2).unwrap();
        assert!((fi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scan_single_point_and_bad_grids() {
        let s = balanced(4);
        let scan = mz_fi_scan(&s, &[0.3]).unwrap();
        assert_eq!(scan.min, scan.max);
        assert!(mz_fi_scan(&s, &[]).is_err());
        assert!(mz_fi_scan(&s, &[1.0, 0.5]).is_err());
        assert!(mz_fi_scan(&s, &[7.0]).is_err());
    }
}

//! Random linear-optics circuits with a cross-Kerr gate, acting on the
//! two-mode symmetric subspace.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;

use crate::binom::binom;
use crate::dicke::{sym_power_lift, DickeBasis};
use crate::error::{Error, Result};
use crate::fisher::qfi;
use crate::interferometer::MachZehnder;
use crate::linalg::{CMat, CVec, C64};
use crate::sampling::{mc_estimate_multi, EnsembleSpec, McConfig, McResult};
use crate::state::{Payload, QuantumState, SymmetricState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    V1,
    V2,
    V3,
    /// Cross-Kerr phase `exp(−iπ n_a n_b / 3)`.
    Xk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub dagger: bool,
}

/// The eight gates drawn uniformly by [`sample_circuit`].
pub const GATE_SET: [Gate; 8] = {
    use GateKind::*;
    [
        Gate { kind: V1, dagger: false },
        Gate { kind: V1, dagger: true },
        Gate { kind: V2, dagger: false },
        Gate { kind: V2, dagger: true },
        Gate { kind: V3, dagger: false },
        Gate { kind: V3, dagger: true },
        Gate { kind: Xk, dagger: false },
        Gate { kind: Xk, dagger: true },
    ]
};

impl Gate {
    fn slot(self) -> usize {
        GATE_SET.iter().position(|g| *g == self).expect("gate in set")
    }
}

/// Single-particle 2×2 matrix of a linear-optics gate.
pub fn single_particle_matrix(kind: GateKind) -> Option<CMat> {
    let r = 5f64.sqrt().recip();
    let c = |re: f64, im: f64| C64::new(re * r, im * r);
    let entries = match kind {
        GateKind::V1 => [c(1.0, 0.0), c(0.0, 2.0), c(0.0, 2.0), c(1.0, 0.0)],
        GateKind::V2 => [c(1.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)],
        GateKind::V3 => [c(1.0, 2.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, -2.0)],
        GateKind::Xk => return None,
    };
    Some(CMat::from_row_slice(2, 2, &entries))
}

/// Gate on the `N`-particle sector in the Dicke basis.
pub fn gate_matrix(gate: Gate, n: usize) -> CMat {
    let m = match single_particle_matrix(gate.kind) {
        Some(v) => sym_power_lift(&v, n).expect("gate matrices are unitary"),
        // |D_k⟩ = |k, N−k⟩ has n_a n_b = k(N−k).
        None => CMat::from_diagonal(&CVec::from_iterator(
            n + 1,
            (0..=n).map(|k| C64::from_polar(1.0, -PI * (k * (n - k)) as f64 / 3.0)),
        )),
    };
    if gate.dagger {
        m.adjoint()
    } else {
        m
    }
}

/// Gate matrices for one `N`, computed once.
#[derive(Debug, Clone)]
pub struct GateSet {
    n: usize,
    matrices: Vec<CMat>,
}

impl GateSet {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            matrices: GATE_SET.iter().map(|&g| gate_matrix(g, n)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self, gate: Gate) -> &CMat {
        &self.matrices[gate.slot()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n: usize,
    /// Applied first to last.
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn identity(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    /// The inverse circuit: reversed order, each gate daggered.
    pub fn inverse(&self) -> Self {
        Self {
            n: self.n,
            gates: self
                .gates
                .iter()
                .rev()
                .map(|g| Gate {
                    kind: g.kind,
                    dagger: !g.dagger,
                })
                .collect(),
        }
    }
}

/// `K` gates drawn independently and uniformly from [`GATE_SET`].
pub fn sample_circuit<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Circuit {
    Circuit {
        n,
        gates: (0..k).map(|_| GATE_SET[rng.random_range(0..GATE_SET.len())]).collect(),
    }
}

/// Applies the circuit gate by gate; mixed states are conjugated.
pub fn apply_circuit(state: &SymmetricState, circuit: &Circuit, gates: &GateSet) -> Result<SymmetricState> {
    if state.d() != 2 || state.n() != circuit.n || gates.n() != circuit.n {
        return Err(Error::DimensionMismatch {
            expected: circuit.n + 1,
            got: state.dim(),
        });
    }
    let payload = match state.payload() {
        Payload::Pure(v) => {
            let mut v = v.clone();
            for g in &circuit.gates {
                v = gates.matrix(*g) * v;
            }
            Payload::Pure(v)
        }
        Payload::Density(rho) => {
            let mut rho = rho.clone();
            for g in &circuit.gates {
                let u = gates.matrix(*g);
                rho = u * rho * u.adjoint();
            }
            Payload::Density(rho)
        }
    };
    Ok(SymmetricState::new_trusted(state.basis_arc().clone(), payload))
}

/// Initial states used in convergence experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartState {
    /// `|D_0⟩`: all particles in one mode.
    Polarized,
    /// `α_n = sqrt(C(N,n)/2^N)`, the product state `|+⟩^⊗N`.
    Balanced,
    /// `(|D_0⟩ + |D_N⟩)/√2`.
    Noon,
}

impl StartState {
    pub fn state(self, n: usize) -> SymmetricState {
        let mut amps = vec![C64::new(0.0, 0.0); n + 1];
        match self {
            StartState::Polarized => amps[0] = C64::new(1.0, 0.0),
            StartState::Balanced => {
                let ln2n = n as f64 * 2f64.ln();
                for (k, a) in amps.iter_mut().enumerate() {
                    *a = C64::new((0.5 * (binom(n as u64, k as u64).ln() - ln2n)).exp(), 0.0);
                }
            }
            StartState::Noon => {
                amps[0] += C64::new(1.0, 0.0);
                amps[n] += C64::new(1.0, 0.0);
            }
        }
        let v = CVec::from_vec(amps).normalize();
        SymmetricState::new_trusted(Arc::new(DickeBasis::new(n, 2).expect("two-mode basis")), Payload::Pure(v))
    }
}

/// Means at one circuit depth.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub depth: usize,
    pub qfi: McResult,
    pub fi_half_pi: McResult,
    pub fi_third_pi: McResult,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Haar-typical values `N(N+1)/3` and `N(N+1)/6`.
    pub target_qfi: f64,
    pub target_fi: f64,
    /// Smallest listed depth whose mean QFI is within the tolerance.
    pub sufficient_depth_qfi: Option<usize>,
    /// Smallest listed depth whose mean FI at φ = π/2 is within the tolerance.
    pub sufficient_depth_fi: Option<usize>,
}

/// Mean QFI (generator `J_z`) and Mach-Zehnder FI at φ ∈ {π/2, π/3} of random
/// circuit states, per depth in `depths`. `relative_tolerance` defines the
/// sufficient depth.
pub fn circuit_convergence(
    n: usize,
    depths: &[usize],
    samples: usize,
    start: StartState,
    master_seed: u64,
    relative_tolerance: f64,
    workers: usize,
) -> Result<ConvergenceTable> {
    let gates = Arc::new(GateSet::new(n));
    let mz = MachZehnder::new(n);
    let nf = n as f64;
    let target_qfi = nf * (nf + 1.0) / 3.0;
    let target_fi = nf * (nf + 1.0) / 6.0;
    let mut rows = Vec::with_capacity(depths.len());
    for &depth in depths {
        let spec = EnsembleSpec::circuit(gates.clone(), depth, start);
        // Every depth draws its circuits from its own streams.
        let config = McConfig::new(samples, crate::sampling::derive_seed(master_seed, depth as u64)).workers(workers);
        let results = mc_estimate_multi(
            |s| {
                let s = s.as_symmetric().expect("circuit states are symmetric");
                Ok(vec![
                    qfi(s, mz.jz())?,
                    mz.fi(s, PI / 2.0)?,
                    mz.fi(s, PI / 3.0)?,
                ])
            },
            &spec,
            &config,
            3,
        )?;
        let mut it = results.into_iter();
        rows.push(ConvergenceRow {
            depth,
            qfi: it.next().expect("three outputs"),
            fi_half_pi: it.next().expect("three outputs"),
            fi_third_pi: it.next().expect("three outputs"),
        });
    }
    let first_within = |value: &dyn Fn(&ConvergenceRow) -> f64, target: f64| {
        rows.iter()
            .find(|r| (value(r) - target).abs() <= relative_tolerance * target)
            .map(|r| r.depth)
    };
    let sufficient_depth_qfi = first_within(&|r| r.qfi.mean, target_qfi);
    let sufficient_depth_fi = first_within(&|r| r.fi_half_pi.mean, target_fi);
    Ok(ConvergenceTable {
        rows,
        target_qfi,
        target_fi,
        sufficient_depth_qfi,
        sufficient_depth_fi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{angular_momentum, Axis};
    use crate::linalg::{self, identity, unitarity_defect};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gates_are_unitary_and_daggers_invert() {
        for n in [1, 7, 60] {
            let set = GateSet::new(n);
            for g in GATE_SET {
                assert!(unitarity_defect(set.matrix(g)) < 1e-12, "{g:?} at N = {n}");
                let inv = Gate { kind: g.kind, dagger: !g.dagger };
                let prod = set.matrix(g) * set.matrix(inv);
                assert!(linalg::max_abs_diff(&prod, &identity(n + 1)) < 1e-12);
            }
        }
    }

    #[test]
    fn cross_kerr_is_diagonal_and_commutes_with_jz() {
        let n = 10;
        let xk = gate_matrix(Gate { kind: GateKind::Xk, dagger: false }, n);
        for r in 0..=n {
            for c in 0..=n {
                let want = if r == c {
                    C64::from_polar(1.0, -PI * (r * (n - r)) as f64 / 3.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((xk[(r, c)] - want).norm() < 1e-15);
            }
        }
        let jz = angular_momentum(Axis::Z, n);
        assert!(linalg::max_abs(&linalg::commutator(&xk, jz.matrix())) < 1e-12);
    }

    #[test]
    fn v3_lift_is_diagonal_power() {
        let n = 12;
        let m = gate_matrix(Gate { kind: GateKind::V3, dagger: false }, n);
        let r = 5f64.sqrt().recip();
        let (a, b) = (C64::new(r, 2.0 * r), C64::new(r, -2.0 * r));
        for k in 0..=n {
            // k particles in mode a pick up V3[0][0] each.
            let want = a.powu(k as u32) * b.powu((n - k) as u32);
            assert!((m[(k, k)] - want).norm() < 1e-13);
        }
    }

    #[test]
    fn circuits_are_deterministic_and_invertible() {
        let n = 8;
        let set = GateSet::new(n);
        let c1 = sample_circuit(n, 40, &mut ChaCha8Rng::seed_from_u64(5));
        let c2 = sample_circuit(n, 40, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(c1, c2);
        assert!(sample_circuit(n, 0, &mut ChaCha8Rng::seed_from_u64(5)).gates.is_empty());
        let s = StartState::Balanced.state(n);
        let out = apply_circuit(&s, &c1, &set).unwrap();
        let back = apply_circuit(&out, &c1.inverse(), &set).unwrap();
        let (a, b) = (s.amplitudes().unwrap(), back.amplitudes().unwrap());
        assert!((a - b).norm() < 1e-10);
        assert!((out.amplitudes().unwrap().norm() - 1.0).abs() < 1e-12);
        let same = apply_circuit(&s, &Circuit::identity(n), &set).unwrap();
        assert_eq!(same.amplitudes(), s.amplitudes());
    }

    #[test]
    fn polarized_start_without_gates_has_zero_qfi() {
        let t = circuit_convergence(6, &[0], 4, StartState::Polarized, 1, 0.1, 1).unwrap();
        assert_eq!(t.rows[0].qfi.mean, 0.0);
    }

    #[test]
    fn start_states() {
        let n = 10;
        let jz = angular_momentum(Axis::Z, n);
        let q = |s: StartState| qfi(&s.state(n), &jz).unwrap();
        assert!(q(StartState::Polarized).abs() < 1e-12);
        assert!((q(StartState::Balanced) - n as f64).abs() < 1e-10);
        assert!((q(StartState::Noon) - (n * n) as f64).abs() < 1e-10);
    }
}

//! Local generators, collective Hamiltonians, two-mode angular momentum and
//! the balanced beam splitter.

use std::f64::consts::FRAC_PI_2;

use crate::dicke::DickeBasis;
use crate::error::{arg, Result};
use crate::linalg::{self, CMat, HermitianEigen, C64, I, ONE, ZERO};
use crate::state::{full_dim, Space};

/// Traceless Hermitian single-particle generator `h`.
#[derive(Debug, Clone)]
pub struct LocalHamiltonian {
    matrix: CMat,
    /// `tr(h_input)/d`, removed from the input as a global phase.
    trace_shift: f64,
    eigen: HermitianEigen,
}

impl LocalHamiltonian {
    pub fn new(matrix: CMat) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return arg("local Hamiltonian must be a non-empty square matrix");
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > 1e-12 {
            return arg(format!("local Hamiltonian not Hermitian (defect {defect:.3e})"));
        }
        let d = matrix.nrows();
        let trace_shift = linalg::trace(&matrix).re / d as f64;
        let mut matrix = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        for i in 0..d {
            matrix[(i, i)] -= C64::new(trace_shift, 0.0);
        }
        let eigen = HermitianEigen::new(&matrix);
        Ok(Self {
            matrix,
            trace_shift,
            eigen,
        })
    }

    /// Diagonal generator with the given eigenvalues.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let diag: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(CMat::from_diagonal(&nalgebra::DVector::from_vec(diag)))
    }

    /// `σ_z/2`, the two-mode phase generator with `tr h² = 1/2`.
    pub fn half_sigma_z() -> Self {
        Self::diagonal(&[0.5, -0.5]).expect("valid generator")
    }

    /// Spin-`(d−1)/2` `J_z` in `d` modes: eigenvalues `(d−1)/2 − i`.
    pub fn spin_z(d: usize) -> Result<Self> {
        if d == 0 {
            return arg("mode count d must be at least 1");
        }
        let j = (d as f64 - 1.0) / 2.0;
        let values: Vec<f64> = (0..d).map(|i| j - i as f64).collect();
        Self::diagonal(&values)
    }

    pub fn d(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn trace_shift(&self) -> f64 {
        self.trace_shift
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigenvectors(&self) -> &CMat {
        &self.eigen.vectors
    }

    /// Operator norm `‖h‖`.
    pub fn norm(&self) -> f64 {
        self.eigen.values.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
    }

    /// `tr h²`.
    pub fn tr_h2(&self) -> f64 {
        self.eigen.values.iter().map(|x| x * x).sum()
    }
}

/// Collective generator `H_N = Σ_j h^(j)` on a full or symmetric space.
#[derive(Debug, Clone)]
pub struct CollectiveHamiltonian {
    space: Space,
    matrix: CMat,
}

impl CollectiveHamiltonian {
    /// Wraps an arbitrary Hermitian matrix as a generator on `space`.
    pub fn from_matrix(space: Space, matrix: CMat) -> Result<Self> {
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > 1e-10 {
            return arg(format!("generator not Hermitian (defect {defect:.3e})"));
        }
        Ok(Self { space, matrix })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Operator norm `‖H‖`.
    pub fn norm(&self) -> f64 {
        linalg::hermitian_norm(&self.matrix)
    }
}

/// `Σ_{ij} h_ij a_i† a_j` in the occupation basis, for any square `h`.
///
/// Uses `a_i† a_j |k⟩ = sqrt(k_j (k_i + 1 − δ_ij)) |k − e_j + e_i⟩`.
pub fn second_quantize(h: &CMat, basis: &DickeBasis) -> CMat {
    let d = basis.d();
    assert_eq!(h.nrows(), d, "single-particle matrix size must equal d");
    let dim = basis.dim();
    let mut out = CMat::zeros(dim, dim);
    let mut target = vec![0usize; d];
    for (col, k) in basis.occupations().iter().enumerate() {
        for i in 0..d {
            out[(col, col)] += h[(i, i)] * k[i] as f64;
        }
        for j in 0..d {
            if k[j] == 0 {
                continue;
            }
            for i in 0..d {
                if i == j || h[(i, j)] == ZERO {
                    continue;
                }
                target.copy_from_slice(k);
                target[j] -= 1;
                target[i] += 1;
                let row = basis.index_of(&target).expect("occupation in basis");
                let amp = ((k[j] * (k[i] + 1)) as f64).sqrt();
                out[(row, col)] += h[(i, j)] * amp;
            }
        }
    }
    out
}

/// `H_N` restricted to the symmetric subspace, in the canonical Dicke basis.
pub fn collective_sym(h: &LocalHamiltonian, n: usize) -> Result<CollectiveHamiltonian> {
    let basis = DickeBasis::new(n, h.d())?;
    Ok(collective_sym_in(h, &basis))
}

pub fn collective_sym_in(h: &LocalHamiltonian, basis: &DickeBasis) -> CollectiveHamiltonian {
    CollectiveHamiltonian {
        space: Space::Symmetric {
            n: basis.n(),
            d: basis.d(),
        },
        matrix: second_quantize(h.matrix(), basis),
    }
}

/// `Σ_j h^(j)` as a dense matrix on `(C^d)^⊗N`, `d^N ≤ 4096`.
pub fn collective_full(h: &LocalHamiltonian, n: usize) -> Result<CollectiveHamiltonian> {
    let d = h.d();
    let dim = full_dim(n, d)?;
    let mut out = CMat::zeros(dim, dim);
    for x in 0..dim {
        let mut place = 1;
        for _ in 0..n {
            let digit = (x / place) % d;
            let base = x - digit * place;
            for a in 0..d {
                let coeff = h.matrix()[(a, digit)];
                if coeff != ZERO {
                    out[(base + a * place, x)] += coeff;
                }
            }
            place *= d;
        }
    }
    Ok(CollectiveHamiltonian {
        space: Space::Full { n, d },
        matrix: out,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn pauli(axis: Axis) -> CMat {
    let entries = match axis {
        Axis::X => [ZERO, ONE, ONE, ZERO],
        Axis::Y => [ZERO, -I, I, ZERO],
        Axis::Z => [ONE, ZERO, ZERO, -ONE],
    };
    CMat::from_row_slice(2, 2, &entries)
}

/// Two-mode angular momentum `J_axis`, the collective lift of `σ_axis/2`.
pub fn angular_momentum(axis: Axis, n: usize) -> CollectiveHamiltonian {
    let h = LocalHamiltonian::new(pauli(axis) * C64::new(0.5, 0.0)).expect("Pauli is Hermitian");
    collective_sym_in(&h, &DickeBasis::new(n, 2).expect("two-mode basis"))
}

/// Balanced beam splitter `B = exp(−iπ J_x/2)` on the `N`-particle sector.
pub fn beam_splitter(n: usize) -> CMat {
    linalg::expm_hermitian(angular_momentum(Axis::X, n).matrix(), FRAC_PI_2)
}

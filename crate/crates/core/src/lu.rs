//! Lower bounds on the QFI optimized over local unitaries `V_1 ⊗ … ⊗ V_N`
//! for qubit states on the full space.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::error::{arg, Result};
use crate::hamiltonian::LocalHamiltonian;
use crate::linalg::{CMat, CVec, C64};
use crate::state::{FullState, Payload, QuantumState};

/// Random restarts per single-site optimization.
pub const RESTARTS: usize = 5;
const COORDINATE_PASSES: usize = 2;
const GOLDEN_ITERATIONS: usize = 40;

#[derive(Debug, Clone)]
pub struct LuResult {
    /// Best QFI reached; the QFI of an explicit local-unitary configuration.
    pub qfi: f64,
    /// Best value after each sweep, starting with the unoptimized QFI.
    pub history: Vec<f64>,
    /// Euler angles `(a, b, c)` of `V_j = R_z(a) R_y(b) R_z(c)` per site.
    pub angles: Vec<[f64; 3]>,
}

/// Coordinate ascent over single-qubit unitaries, maximizing
/// `QFI((⊗V_j)|ψ⟩, Σ_j h^(j))`.
pub fn lu_optimize_qfi<R: Rng>(
    state: &FullState,
    h: &LocalHamiltonian,
    sweeps: usize,
    mut rng: R,
) -> Result<LuResult> {
    if state.d() != 2 || h.d() != 2 {
        return arg("local-unitary optimization is implemented for qubits only");
    }
    let Payload::Pure(psi) = state.payload() else {
        return arg("local-unitary optimization needs a pure state");
    };
    let n = state.n();
    let hm = h.matrix().clone();
    let mut angles = vec![[0.0f64; 3]; n];
    let mut best = local_qfi(psi, &hm, n);
    let mut history = vec![best];
    for _ in 0..sweeps {
        for site in 0..n {
            let mut others = psi.clone();
            for (j, a) in angles.iter().enumerate() {
                if j != site {
                    apply_single(&mut others, n, j, &euler(*a));
                }
            }
            let objective = |a: &[f64; 3]| {
                let mut v = others.clone();
                apply_single(&mut v, n, site, &euler(*a));
                local_qfi(&v, &hm, n)
            };
            best = best.max(objective(&angles[site]));
            for restart in 0..RESTARTS {
                let mut trial = if restart == 0 {
                    angles[site]
                } else {
                    [rng.random::<f64>() * TAU, rng.random::<f64>() * TAU, rng.random::<f64>() * TAU]
                };
                let mut value = objective(&trial);
                for _ in 0..COORDINATE_PASSES {
                    for axis in 0..3 {
                        let centre = trial[axis];
                        let (x, fx) = golden_max(centre - PI, centre + PI, |x| {
                            let mut t = trial;
                            t[axis] = x;
                            objective(&t)
                        });
                        if fx > value {
                            trial[axis] = x;
                            value = fx;
                        }
                    }
                }
                if value > best {
                    best = value;
                    angles[site] = trial;
                }
            }
        }
        history.push(best);
    }
    Ok(LuResult {
        qfi: best,
        history,
        angles,
    })
}

fn golden_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `R_z(a) R_y(b) R_z(c)`.
fn euler([a, b, c]: [f64; 3]) -> [[C64; 2]; 2] {
    let (s, co) = (b / 2.0).sin_cos();
    let e = |t: f64| C64::from_polar(1.0, t / 2.0);
    [
        [e(-a - c) * co, -e(-a + c) * s],
        [e(a - c) * s, e(a + c) * co],
    ]
}

/// Applies a 2×2 matrix to qubit `site` (site 0 is the most significant bit).
fn apply_single(v: &mut CVec, n: usize, site: usize, u: &[[C64; 2]; 2]) {
    let stride = 1usize << (n - 1 - site);
    let dim = v.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + stride {
            let (x0, x1) = (v[i], v[i + stride]);
            v[i] = u[0][0] * x0 + u[0][1] * x1;
            v[i + stride] = u[1][0] * x0 + u[1][1] * x1;
        }
        base += 2 * stride;
    }
}

/// QFI of a pure qubit state for `Σ_j h^(j)`, applying `h` site by site.
fn local_qfi(psi: &CVec, h: &CMat, n: usize) -> f64 {
    let hu = [[h[(0, 0)], h[(0, 1)]], [h[(1, 0)], h[(1, 1)]]];
    let mut total = CVec::zeros(psi.len());
    for site in 0..n {
        let mut t = psi.clone();
        apply_single(&mut t, n, site, &hu);
        total += t;
    }
    let mean = psi.dotc(&total).re;
    (4.0 * (total.norm_squared() - mean * mean)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::qfi;
    use crate::hamiltonian::collective_full;
    use crate::linalg;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ghz(n: usize) -> FullState {
        let mut v = CVec::zeros(1 << n);
        v[0] = C64::new(0.5f64.sqrt(), 0.0);
        v[(1 << n) - 1] = C64::new(0.5f64.sqrt(), 0.0);
        FullState::pure(n, 2, v).unwrap()
    }

    #[test]
    fn euler_is_unitary() {
        let u = euler([0.3, 1.2, -2.0]);
        let m = CMat::from_row_slice(2, 2, &[u[0][0], u[0][1], u[1][0], u[1][1]]);
        assert!(linalg::unitarity_defect(&m) < 1e-15);
    }

    #[test]
    fn local_qfi_matches_dense_generator() {
        let n = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = CVec::from_iterator(1 << n, (0..1 << n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)));
        let v = v.normalize();
        let h = LocalHamiltonian::half_sigma_z();
        let dense = qfi(&FullState::pure(n, 2, v.clone()).unwrap(), &collective_full(&h, n).unwrap()).unwrap();
        assert!((local_qfi(&v, h.matrix(), n) - dense).abs() < 1e-12);
    }

    #[test]
    fn ghz_is_already_optimal() {
        let n = 5;
        let h = LocalHamiltonian::half_sigma_z();
        let r = lu_optimize_qfi(&ghz(n), &h, 2, ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(r.qfi >= (n * n) as f64 - 1e-6);
        assert!(r.qfi <= (n * n) as f64 + 1e-9);
    }

    #[test]
    fn product_state_reaches_n() {
        // |0…0⟩ has zero QFI; rotating each qubit onto the equator gives N.
        let n = 4;
        let mut v = CVec::zeros(1 << n);
        v[0] = C64::new(1.0, 0.0);
        let s = FullState::pure(n, 2, v).unwrap();
        let h = LocalHamiltonian::half_sigma_z();
        let r = lu_optimize_qfi(&s, &h, 1, ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(r.history[0], 0.0);
        assert!((r.qfi - n as f64).abs() < 1e-6, "{}", r.qfi);
        assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
    }
}

//! Brute-force oracles in the distinguishable-particle picture, written
//! independently of the library's Dicke-basis code.

#![allow(dead_code)]

use metroscope::linalg::{kron, ONE, ZERO};
use metroscope::{CMat, CVec, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normalized uniform superposition of the `N`-qubit strings with exactly
/// `n` zeros (mode-a particles).
pub fn dicke_vector(n_total: usize, n: usize) -> CVec {
    let dim = 1usize << n_total;
    let mut v = CVec::zeros(dim);
    for x in 0..dim {
        if n_total - (x.count_ones() as usize) == n {
            v[x] = ONE;
        }
    }
    v.normalize()
}

/// Columns are the Dicke vectors `|D_0⟩ … |D_N⟩`.
pub fn dicke_columns(n_total: usize) -> CMat {
    let cols: Vec<CVec> = (0..=n_total).map(|n| dicke_vector(n_total, n)).collect();
    CMat::from_columns(&cols)
}

pub fn tensor_power(v: &CMat, n: usize) -> CMat {
    let mut out = CMat::identity(1, 1);
    for _ in 0..n {
        out = kron(&out, v);
    }
    out
}

/// Trace over the last `k` qubits of a `2^N`-dimensional density matrix.
pub fn trace_last_qubits(rho: &CMat, n_total: usize, k: usize) -> CMat {
    let env = 1usize << k;
    let keep = 1usize << (n_total - k);
    let mut out = CMat::zeros(keep, keep);
    for a in 0..keep {
        for b in 0..keep {
            let mut acc = ZERO;
            for t in 0..env {
                acc += rho[(a * env + t, b * env + t)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Reduced two-mode state after losing `k` particles, through the qubit
/// picture.
pub fn reduced_dicke_density(rho_sym: &CMat, n_total: usize, k: usize) -> CMat {
    let w = dicke_columns(n_total);
    let rho_full = &w * rho_sym * w.adjoint();
    let reduced = trace_last_qubits(&rho_full, n_total, k);
    let w2 = dicke_columns(n_total - k);
    w2.adjoint() * reduced * w2
}

/// Random density matrix of rank `rank` (or full rank when `rank = dim`).
pub fn random_density(dim: usize, rank: usize, seed: u64) -> CMat {
    let mut r = rng(seed);
    let g = CMat::from_fn(dim, rank, |_, _| metroscope::sampling::complex_normal(&mut r));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn binomial_f64(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

//! Binomial and multinomial coefficients, exact where they fit and in log
//! space otherwise.

/// Above this size binomials are evaluated through log-gamma.
pub const EXACT_LIMIT: u64 = 30;

/// Exact `C(n, k)` in 128-bit arithmetic; `None` on overflow.
pub fn binom_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    libm::lgamma(n as f64 + 1.0)
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binom(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if n <= EXACT_LIMIT {
        return (binom_exact(n, k).unwrap() as f64).ln();
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `C(n, k)` as a float.
pub fn binom(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= EXACT_LIMIT {
        return binom_exact(n, k).unwrap() as f64;
    }
    ln_binom(n, k).exp()
}

/// `ln (N; k_1, …, k_d)`, the multinomial coefficient.
pub fn ln_multinomial(occupations: &[usize]) -> f64 {
    let n: usize = occupations.iter().sum();
    let mut acc = ln_factorial(n as u64);
    for &k in occupations {
        acc -= ln_factorial(k as u64);
    }
    acc
}

/// `x^k` with `0^0 = 1`, in log space: returns `k ln x` or `-inf`.
pub fn ln_pow(x: f64, k: u64) -> f64 {
    if k == 0 {
        0.0
    } else if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        k as f64 * x.ln()
    }
}

//! Factorial and binomial tables shared by the numerical modules.
//!
//! Amplitudes are assembled in log space (`exp` of sums of `ln k!`) so that
//! large binomial weights and small scattering powers never overflow or
//! underflow on the way to an `O(1)` result.

use num_bigint::BigUint;
use std::sync::OnceLock;

use crate::MAX_PHOTONS_PER_MODE;

/// Table covers `0..=2 * MAX_PHOTONS_PER_MODE`: the largest total photon
/// number two saturated modes can produce.
const TABLE_LEN: usize = 2 * MAX_PHOTONS_PER_MODE + 1;

/// `ln(n!)`, tabulated once with compensated summation.
///
/// Panics if `n` exceeds twice [`MAX_PHOTONS_PER_MODE`]; public entry points
/// enforce the capacity limit before calling in.
pub fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN);
        t.push(0.0);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for k in 1..TABLE_LEN {
            let y = (k as f64).ln() - comp;
            let next = sum + y;
            comp = (next - sum) - y;
            sum = next;
            t.push(sum);
        }
        t
    });
    table[n]
}

/// `ln C(n, k)`; `-inf` when `k > n` (the coefficient is zero).
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Exact binomial coefficient as an arbitrary-precision integer.
pub fn binomial_exact(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    // acc stays an exact integer after every step: the running product of
    // j consecutive ratios is C(n, j).
    for j in 0..k {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

/// Binomial coefficient in `f64`; exact as long as the value fits in the
/// 53-bit mantissa, monotone rounding above that.
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_direct_products() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        let direct: f64 = (1..=20u64).product::<u64>() as f64;
        assert!((ln_factorial(20) - direct.ln()).abs() < 1e-12);
    }

    #[test]
    fn exact_binomials() {
        assert_eq!(binomial_exact(0, 0), BigUint::from(1u32));
        assert_eq!(binomial_exact(5, 2), BigUint::from(10u32));
        assert_eq!(binomial_exact(5, 6), BigUint::from(0u32));
        assert_eq!(
            binomial_exact(64, 32).to_string(),
            "1832624140942590534" // fits u64; cross-checked below
        );
        assert_eq!(binomial_exact(64, 32), BigUint::from(1832624140942590534u64));
    }

    #[test]
    fn f64_binomials_are_exact_at_small_n() {
        for n in 0..=30usize {
            let mut row = 1.0f64;
            for k in 0..=n {
                assert_eq!(binomial_f64(n, k), row, "C({n},{k})");
                row = row * (n - k) as f64 / (k + 1) as f64;
            }
        }
    }

    #[test]
    fn ln_binomial_handles_out_of_range() {
        assert_eq!(ln_binomial(3, 5), f64::NEG_INFINITY);
        assert!((ln_binomial(10, 4) - (210.0f64).ln()).abs() < 1e-13);
    }
}

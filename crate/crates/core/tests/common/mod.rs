//! Brute-force oracle shared by the integration suites.
//!
//! Everything here is deliberately naive and independent of the library's
//! production paths: amplitudes come from expanding the substituted creation
//! operators as a literal polynomial by repeated convolution, and factorials
//! from direct products.  No log-space tables, no binomial identities.

use num_complex::Complex64;

use homsim::ScatteringMatrix;

/// n! by direct multiplication (exact in f64 up to 18!, last-ulp above).
pub fn factorial_direct(n: usize) -> f64 {
    (1..=n).fold(1.0f64, |acc, k| acc * k as f64)
}

/// C(n, k) as a ratio of directly multiplied factorials — exact in f64
/// for the small arguments the tests feed it.
#[allow(dead_code)]
pub fn binomial_f64_direct(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    factorial_direct(n) / (factorial_direct(k) * factorial_direct(n - k))
}

/// Transition amplitude `<p, q| U |n, m>` by brute-force polynomial
/// expansion.
///
/// Writes the image of the input creation operators as a two-variable
/// polynomial in the output creation operators, one linear factor at a
/// time, then reads off the `(p, q)` monomial and attaches the Fock
/// normalization `sqrt(p! q! / (n! m!))`.
pub fn expansion_amplitude(
    s: &ScatteringMatrix,
    n: usize,
    m: usize,
    p: usize,
    q: usize,
) -> Complex64 {
    if p + q != n + m {
        return Complex64::new(0.0, 0.0);
    }
    // Input operators in terms of output operators: rows of the conjugate
    // transpose of the scattering matrix.
    let b11 = s.s11().conj();
    let b12 = s.s21().conj();
    let b21 = s.s12().conj();
    let b22 = s.s22().conj();

    let total = n + m;
    let dim = total + 1;
    let idx = |i: usize, j: usize| i * dim + j;
    let mut poly = vec![Complex64::new(0.0, 0.0); dim * dim];
    poly[idx(0, 0)] = Complex64::new(1.0, 0.0);

    let multiply_linear = |poly: &mut Vec<Complex64>, cx: Complex64, cy: Complex64| {
        let mut next = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let c = poly[idx(i, j)];
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                if i + 1 < dim {
                    next[idx(i + 1, j)] += c * cx;
                }
                if j + 1 < dim {
                    next[idx(i, j + 1)] += c * cy;
                }
            }
        }
        *poly = next;
    };

    for _ in 0..n {
        multiply_linear(&mut poly, b11, b12);
    }
    for _ in 0..m {
        multiply_linear(&mut poly, b21, b22);
    }

    let norm = (factorial_direct(p) * factorial_direct(q)
        / (factorial_direct(n) * factorial_direct(m)))
    .sqrt();
    poly[idx(p, q)] * norm
}

/// Full joint output distribution for a Fock pair `|n, m>`, via the
/// expansion oracle: `P(p, q) = |<p, q| U |n, m>|^2`.
pub fn expansion_distribution(s: &ScatteringMatrix, n: usize, m: usize) -> Vec<Vec<f64>> {
    let total = n + m;
    (0..=total)
        .map(|p| {
            (0..=total)
                .map(|q| {
                    if p + q == total {
                        expansion_amplitude(s, n, m, p, q).norm_sqr()
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

//! Exact combinatorics of the coincidence sector.
//!
//! For an input `|n, m>` the amplitude on the balanced output `|N/2, N/2>`
//! (with `N = n + m`, which must be even) is proportional to the integer
//!
//! ```text
//! S(n, m) = sum_k C(n, k) C(m, (n+m)/2 - k) (-1)^k
//! ```
//!
//! where `k` counts mode-1 photons that leave through output 1.  Each `k`
//! is a *scattering diagram*: a way of routing the photons that is
//! indistinguishable at the detectors, so the diagrams interfere.  Terms
//! `k` and `n - k` are mirror images with equal weight `C_k = C_{n-k}` and
//! relative sign `(-1)^n`; for odd `n` (and odd `m`) the diagrams cancel
//! in pairs and `S = 0` *exactly*, killing every coincidence-balanced
//! output.  For even inputs the unpaired central diagram survives and the
//! sum never collapses.
//!
//! Everything in this module is exact integer arithmetic; only the
//! diagram *values* (which carry splitter amplitudes `t` and `i r`)
//! live in floating point.

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};
use std::fmt;

use crate::error::{Error, Result};
use crate::factorial::binomial_exact;

/// A certificate declares complete destructive interference when the
/// surviving total is below this fraction of the largest single diagram.
pub const CANCELLATION_TOL: f64 = 1e-14;

fn require_equal_parity(n: usize, m: usize) -> Result<()> {
    if n % 2 != m % 2 {
        Err(Error::ParityMismatch { n, m })
    } else {
        Ok(())
    }
}

/// `C(n, k) * C(m, (n+m)/2 - k)` as an exact integer (assumes `n <= m`).
fn diagram_weight(n: usize, m: usize, k: usize) -> BigUint {
    let half = (n + m) / 2;
    binomial_exact(n as u64, k as u64) * binomial_exact(m as u64, (half - k) as u64)
}

/// Exact alternating coincidence sum `S(n, m)`.
///
/// Argument order is normalized to `n <= m` (the sum is symmetric under
/// the swap).  Mixed parity is rejected: no coincidence-balanced output
/// exists when `n + m` is odd.
pub fn coincidence_sum(n: usize, m: usize) -> Result<BigInt> {
    require_equal_parity(n, m)?;
    let (n, m) = if n <= m { (n, m) } else { (m, n) };
    let mut acc = BigInt::zero();
    for k in 0..=n {
        let w = BigInt::from_biguint(
            if k % 2 == 0 { Sign::Plus } else { Sign::Minus },
            diagram_weight(n, m, k),
        );
        acc += w;
    }
    Ok(acc)
}

/// One scattering diagram for the coincidence-balanced output.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramTerm {
    /// Mode-1 photons transmitted into output 1.
    pub k: usize,
    /// Routing counts: transmitted/reflected photons from each input mode.
    pub mode1_transmitted: usize,
    pub mode1_reflected: usize,
    pub mode2_transmitted: usize,
    pub mode2_reflected: usize,
    /// Exact multiplicity `C_k = C(n, k) * C(m, (n+m)/2 - k)`.
    pub weight: BigUint,
    /// Interference sign `(-1)^k`.
    pub sign: i32,
    /// `C_k * t^(transmitted) * (i r)^(reflected)`.
    pub value: Complex64,
}

fn check_tr(t: f64, r: f64) -> Result<()> {
    let residual = (t * t + r * r - 1.0).abs();
    if !t.is_finite() || !r.is_finite() || residual >= 1e-12 {
        Err(Error::NotNormalized { context: "(t, r) amplitude pair", residual })
    } else {
        Ok(())
    }
}

/// Enumerate all scattering diagrams feeding the coincidence-balanced
/// output of `|n, m>`, ordered by `k`.
///
/// Arguments are normalized to `n <= m`; `(t, r)` must satisfy
/// `t^2 + r^2 = 1` within 1e-12.
pub fn enumerate_diagrams(n: usize, m: usize, t: f64, r: f64) -> Result<Vec<DiagramTerm>> {
    require_equal_parity(n, m)?;
    check_tr(t, r)?;
    let (n, m) = if n <= m { (n, m) } else { (m, n) };
    let half = (n + m) / 2;
    let ir = Complex64::new(0.0, r);
    let mut terms = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let weight = diagram_weight(n, m, k);
        let mode1_transmitted = k;
        let mode1_reflected = n - k;
        let mode2_transmitted = (m - n) / 2 + k;
        let mode2_reflected = half - k;
        let transmitted = mode1_transmitted + mode2_transmitted;
        let reflected = mode1_reflected + mode2_reflected;
        let weight_f = weight.to_f64().unwrap_or(f64::INFINITY);
        let value = weight_f * t.powi(transmitted as i32) * ir.powu(reflected as u32);
        terms.push(DiagramTerm {
            k,
            mode1_transmitted,
            mode1_reflected,
            mode2_transmitted,
            mode2_reflected,
            weight,
            sign: if k % 2 == 0 { 1 } else { -1 },
            value,
        });
    }
    Ok(terms)
}

/// Verdict of a cancellation certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Mirror diagrams annihilate; the coincidence-balanced output is dark.
    CompleteDestructive,
    /// A nonzero total survives (even-even inputs at any splitting ratio).
    ConstructiveNonzero,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::CompleteDestructive => f.write_str("complete-destructive"),
            Verdict::ConstructiveNonzero => f.write_str("constructive-nonzero"),
        }
    }
}

/// A mirror pair of diagrams `(k, n-k)` and the magnitude of their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorPair {
    pub k: usize,
    pub mirror_k: usize,
    /// Shared multiplicity of both members.
    pub weight: BigUint,
    pub term: Complex64,
    pub mirror_term: Complex64,
    /// `|A_k + A_{n-k}|`.
    pub residual: f64,
}

/// The unpaired central diagram of an even-even input.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralTerm {
    pub k: usize,
    pub weight: BigUint,
    pub value: Complex64,
}

/// Diagram-level account of why a coincidence-balanced output is dark
/// (or is not).
#[derive(Debug, Clone, PartialEq)]
pub struct CancellationCertificate {
    /// Input photon numbers after normalization to `n <= m`.
    pub n: usize,
    pub m: usize,
    /// True when the caller's arguments arrived in `(m, n)` order.
    pub swapped: bool,
    pub transmission: f64,
    pub reflection: f64,
    pub pairs: Vec<MirrorPair>,
    pub central: Option<CentralTerm>,
    /// Sum of every diagram value.
    pub total: Complex64,
    pub verdict: Verdict,
}

/// Pair up mirror diagrams for `|n, m>` at amplitudes `(t, r)` and report
/// the per-pair residuals, the surviving total, and a verdict.
pub fn cancellation_certificate(
    n: usize,
    m: usize,
    t: f64,
    r: f64,
) -> Result<CancellationCertificate> {
    let swapped = n > m;
    let terms = enumerate_diagrams(n, m, t, r)?;
    let (n, m) = if swapped { (m, n) } else { (n, m) };

    let mut pairs = Vec::new();
    for k in 0..(n + 1) / 2 {
        let mirror_k = n - k;
        pairs.push(MirrorPair {
            k,
            mirror_k,
            weight: terms[k].weight.clone(),
            term: terms[k].value,
            mirror_term: terms[mirror_k].value,
            residual: (terms[k].value + terms[mirror_k].value).norm(),
        });
    }
    let central = (n % 2 == 0).then(|| {
        let k = n / 2;
        CentralTerm { k, weight: terms[k].weight.clone(), value: terms[k].value }
    });

    let total: Complex64 = terms.iter().map(|term| term.value).sum();
    let max_amp = terms.iter().map(|term| term.value.norm()).fold(0.0f64, f64::max);
    let verdict = if total.norm() <= CANCELLATION_TOL * max_amp {
        Verdict::CompleteDestructive
    } else {
        Verdict::ConstructiveNonzero
    };

    Ok(CancellationCertificate {
        n,
        m,
        swapped,
        transmission: t,
        reflection: r,
        pairs,
        central,
        total,
        verdict,
    })
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

impl CancellationCertificate {
    /// JSON rendering; exact integer weights are decimal strings.
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "m": self.m,
            "swapped": self.swapped,
            "transmission": self.transmission,
            "reflection": self.reflection,
            "pairs": self.pairs.iter().map(|p| json!({
                "k": p.k,
                "mirror_k": p.mirror_k,
                "weight": p.weight.to_string(),
                "term": complex_json(p.term),
                "mirror_term": complex_json(p.mirror_term),
                "residual": p.residual,
            })).collect::<Vec<_>>(),
            "central_term": self.central.as_ref().map(|c| json!({
                "k": c.k,
                "weight": c.weight.to_string(),
                "value": complex_json(c.value),
            })),
            "total": complex_json(self.total),
            "total_magnitude": self.total.norm(),
            "verdict": self.verdict.to_string(),
        })
    }

    /// Aligned plain-text rendering, one line per mirror pair.
    pub fn to_text(&self) -> String {
        fn fmt_c(z: Complex64) -> String {
            format!("{:+.9e}{:+.9e}i", z.re, z.im)
        }
        let mut out = String::new();
        out.push_str(&format!(
            "cancellation certificate for |{}, {}>   t = {:.16}   r = {:.16}{}\n",
            self.n,
            self.m,
            self.transmission,
            self.reflection,
            if self.swapped { "   (inputs swapped)" } else { "" },
        ));
        for p in &self.pairs {
            out.push_str(&format!(
                "pair k={:<3} mirror={:<3} C_k={:<12} A_k={:<28} A_mirror={:<28} residual={:.3e}\n",
                p.k,
                p.mirror_k,
                p.weight.to_string(),
                fmt_c(p.term),
                fmt_c(p.mirror_term),
                p.residual,
            ));
        }
        if let Some(c) = &self.central {
            out.push_str(&format!(
                "central k={:<3} C_k={:<12} value={}\n",
                c.k,
                c.weight.to_string(),
                fmt_c(c.value),
            ));
        }
        out.push_str(&format!(
            "total = {}   |total| = {:.3e}\nverdict: {}\n",
            fmt_c(self.total),
            self.total.norm(),
            self.verdict,
        ));
        out
    }
}

/// Half-range decomposition of the coincidence sum.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitSum {
    /// Odd `n`: `S = S1 + S2` with `S2 = -S1`, so `S = 0` identically.
    Odd { s1: BigInt, s2: BigInt },
    /// Even `n`: `S = S1 + center + mirror` with `mirror = S1`; the signed
    /// central binomial product `center = (-1)^(n/2) C(n, n/2) C(m, m/2)`
    /// survives unpaired.
    Even { s1: BigInt, center: BigInt, mirror: BigInt },
}

impl SplitSum {
    pub fn total(&self) -> BigInt {
        match self {
            SplitSum::Odd { s1, s2 } => s1 + s2,
            SplitSum::Even { s1, center, mirror } => s1 + center + mirror,
        }
    }
}

/// Split `S(n, m)` into its half ranges around the central diagram.
pub fn split_sum(n: usize, m: usize) -> Result<SplitSum> {
    require_equal_parity(n, m)?;
    let (n, m) = if n <= m { (n, m) } else { (m, n) };
    let signed = |k: usize| {
        BigInt::from_biguint(
            if k % 2 == 0 { Sign::Plus } else { Sign::Minus },
            diagram_weight(n, m, k),
        )
    };
    if n % 2 == 1 {
        let s1: BigInt = (0..=(n - 1) / 2).map(signed).sum();
        let s2: BigInt = ((n + 1) / 2..=n).map(signed).sum();
        Ok(SplitSum::Odd { s1, s2 })
    } else {
        let s1: BigInt = (0..n / 2).map(signed).sum();
        let center = signed(n / 2);
        let mirror: BigInt = (n / 2 + 1..=n).map(signed).sum();
        Ok(SplitSum::Even { s1, center, mirror })
    }
}

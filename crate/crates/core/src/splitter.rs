//! Scattering matrices for a lossless two-port splitter and exact
//! photon-number transition amplitudes.
//!
//! The device is characterized by a unitary 2x2 matrix `S` relating output
//! to input creation operators, `a_out^dag = S a_in^dag`.  Three common
//! parameterizations of the same physical device are supported, all driven
//! by a single mixing angle `theta` in `[0, pi]` through
//! `t = cos(theta/2)`, `r = sin(theta/2)`:
//!
//! - `complex-symmetric`: `[[t, i r], [i r, t]]` (the default; reflections
//!   pick up a 90-degree phase),
//! - `asymmetric`: `[[t, r], [r, -t]]`,
//! - `real-rotation`: `[[t, -r], [r, t]]`.
//!
//! Unitarity forces `|S11| = |S22|`, `|S12| = |S21|` and the phase
//! condition `theta11 + theta22 = theta12 + theta21 + pi`, so measured
//! photon-number statistics agree across all three conventions.
//!
//! Amplitudes are evaluated by substituting the inverse mode map into the
//! input monomial and collecting the output monomial binomially; weights
//! are assembled in log space from a shared `ln k!` table so no
//! intermediate over- or underflows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::factorial::{ln_binomial, ln_factorial};
use crate::MAX_PHOTONS_PER_MODE;

/// Residual bound below which a matrix counts as unitary.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Which textbook parameterization a matrix was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    ComplexSymmetric,
    Asymmetric,
    RealRotation,
    /// Anything constructed from raw entries (including inverses).
    Custom,
}

impl Convention {
    /// The three named parameterizations, in canonical order.
    pub const ALL: [Convention; 3] = [
        Convention::ComplexSymmetric,
        Convention::Asymmetric,
        Convention::RealRotation,
    ];
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Convention::ComplexSymmetric => "complex-symmetric",
            Convention::Asymmetric => "asymmetric",
            Convention::RealRotation => "real-rotation",
            Convention::Custom => "custom",
        };
        f.write_str(name)
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex-symmetric" => Ok(Convention::ComplexSymmetric),
            "asymmetric" => Ok(Convention::Asymmetric),
            "real-rotation" => Ok(Convention::RealRotation),
            other => Err(Error::SpecParse(format!(
                "unknown convention {other:?}; expected complex-symmetric, asymmetric, \
                 or real-rotation"
            ))),
        }
    }
}

/// Residuals of the unitarity constraints, one per invariant.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct UnitarityReport {
    /// `| |s11|^2 + |s12|^2 - 1 |`
    pub row1_normalization: f64,
    /// `| |s21|^2 + |s22|^2 - 1 |`
    pub row2_normalization: f64,
    /// `| s11 conj(s12) + s21 conj(s22) |`
    pub column_orthogonality: f64,
    /// `max(| |s11| - |s22| |, | |s12| - |s21| |)`
    pub magnitude_symmetry: f64,
    pub pass: bool,
}

impl UnitarityReport {
    pub fn max_residual(&self) -> f64 {
        self.row1_normalization
            .max(self.row2_normalization)
            .max(self.column_orthogonality)
            .max(self.magnitude_symmetry)
    }
}

/// Unitary 2x2 scattering matrix of a lossless two-port splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix {
    s11: Complex64,
    s12: Complex64,
    s21: Complex64,
    s22: Complex64,
    convention: Convention,
}

impl ScatteringMatrix {
    /// Build a matrix in one of the named conventions.
    ///
    /// `theta` must lie in `[0, pi]`; anything outside is rejected rather
    /// than wrapped, since every physical splitter is covered by that range
    /// and silent wrapping would hide sign mistakes.  `theta = pi/2` (the
    /// balanced splitter) is pinned to `t = r = 1/sqrt(2)` exactly: `sin`
    /// and `cos` at `pi/4` otherwise differ in the last ulp, which would
    /// smear the exact cancellations the balanced point is known for.
    pub fn from_convention(convention: Convention, theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::ThetaOutOfRange(theta));
        }
        let (t, r) = if theta == FRAC_PI_2 {
            (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
        } else {
            let half = 0.5 * theta;
            (half.cos(), half.sin())
        };
        let re = |x: f64| Complex64::new(x, 0.0);
        let im = |x: f64| Complex64::new(0.0, x);
        let (s11, s12, s21, s22) = match convention {
            Convention::ComplexSymmetric => (re(t), im(r), im(r), re(t)),
            Convention::Asymmetric => (re(t), re(r), re(r), re(-t)),
            Convention::RealRotation => (re(t), re(-r), re(r), re(t)),
            Convention::Custom => {
                return Err(Error::SpecParse(
                    "custom matrices are built from entries, not from an angle".into(),
                ))
            }
        };
        Ok(Self { s11, s12, s21, s22, convention })
    }

    /// The balanced (50:50) splitter, `t = r = 1/sqrt(2)` exactly.
    pub fn balanced(convention: Convention) -> Self {
        Self::from_convention(convention, FRAC_PI_2)
            .expect("pi/2 is always a valid mixing angle")
    }

    /// Build from raw entries, enforcing unitarity.
    pub fn from_entries(
        s11: Complex64,
        s12: Complex64,
        s21: Complex64,
        s22: Complex64,
    ) -> Result<Self> {
        let m = Self::new_unchecked(s11, s12, s21, s22);
        let report = m.validate();
        if report.pass {
            Ok(m)
        } else {
            Err(Error::NonUnitary(report.max_residual()))
        }
    }

    /// Build from raw entries without any checks (for inspecting how the
    /// validator reports broken matrices).
    pub fn new_unchecked(
        s11: Complex64,
        s12: Complex64,
        s21: Complex64,
        s22: Complex64,
    ) -> Self {
        Self { s11, s12, s21, s22, convention: Convention::Custom }
    }

    pub fn s11(&self) -> Complex64 {
        self.s11
    }

    pub fn s12(&self) -> Complex64 {
        self.s12
    }

    pub fn s21(&self) -> Complex64 {
        self.s21
    }

    pub fn s22(&self) -> Complex64 {
        self.s22
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Check the unitarity constraints and report each residual.
    pub fn validate(&self) -> UnitarityReport {
        let row1 = (self.s11.norm_sqr() + self.s12.norm_sqr() - 1.0).abs();
        let row2 = (self.s21.norm_sqr() + self.s22.norm_sqr() - 1.0).abs();
        let ortho = (self.s11 * self.s12.conj() + self.s21 * self.s22.conj()).norm();
        let mag = (self.s11.norm() - self.s22.norm())
            .abs()
            .max((self.s12.norm() - self.s21.norm()).abs());
        let pass = row1 < UNITARITY_TOL
            && row2 < UNITARITY_TOL
            && ortho < UNITARITY_TOL
            && mag < UNITARITY_TOL;
        UnitarityReport {
            row1_normalization: row1,
            row2_normalization: row2,
            column_orthogonality: ortho,
            magnitude_symmetry: mag,
            pass,
        }
    }

    /// Inverse mode map: for a unitary matrix this is the conjugate
    /// transpose.  Fails with [`Error::NonUnitary`] if the matrix does not
    /// satisfy its constraints.
    pub fn inverse(&self) -> Result<Self> {
        let report = self.validate();
        if !report.pass {
            return Err(Error::NonUnitary(report.max_residual()));
        }
        Ok(Self {
            s11: self.s11.conj(),
            s12: self.s21.conj(),
            s21: self.s12.conj(),
            s22: self.s22.conj(),
            convention: Convention::Custom,
        })
    }

    /// Transition amplitude `<p, q| U |n, m>` between two-mode Fock states.
    ///
    /// Substituting the inverse mode map `a_in^dag = S^-1 a_out^dag` into
    /// `(a1_in^dag)^n (a2_in^dag)^m |0, 0>` and expanding both powers
    /// binomially gives
    ///
    /// ```text
    /// A = sqrt(p! q! / (n! m!)) *
    ///     sum_k C(n, k) C(m, p-k) B11^k B12^(n-k) B21^(p-k) B22^(m-p+k)
    /// ```
    ///
    /// with `B = S^-1` and `k` the number of mode-1 photons that exit in
    /// mode 1.  Conservation (`p + q = n + m`) is required; each count must
    /// stay at or below [`MAX_PHOTONS_PER_MODE`].
    pub fn transition_amplitude(
        &self,
        n: usize,
        m: usize,
        p: usize,
        q: usize,
    ) -> Result<Complex64> {
        let max_count = n.max(m).max(p).max(q);
        if max_count > MAX_PHOTONS_PER_MODE {
            return Err(Error::CapacityExceeded {
                requested: max_count,
                max: MAX_PHOTONS_PER_MODE,
            });
        }
        if p + q != n + m {
            return Err(Error::PhotonNumberMismatch { n, m, p, q });
        }
        let b11 = self.s11.conj();
        let b12 = self.s21.conj();
        let b21 = self.s12.conj();
        let b22 = self.s22.conj();

        let half_log_ratio =
            0.5 * (ln_factorial(p) + ln_factorial(q) - ln_factorial(n) - ln_factorial(m));
        let k_lo = p.saturating_sub(m);
        let k_hi = n.min(p);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in k_lo..=k_hi {
            let log_weight = ln_binomial(n, k) + ln_binomial(m, p - k) + half_log_ratio;
            let phases = b11.powu(k as u32)
                * b12.powu((n - k) as u32)
                * b21.powu((p - k) as u32)
                * b22.powu((m + k - p) as u32);
            acc += log_weight.exp() * phases;
        }
        Ok(acc)
    }
}

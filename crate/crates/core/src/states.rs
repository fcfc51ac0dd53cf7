//! Input states for the two splitter ports.
//!
//! Photon-number space is truncated at a per-state cutoff `M`; the
//! probability mass beyond the cutoff is never discarded silently but
//! tracked as a `tail_mass` so downstream normalization checks can close
//! the books.  Cutoffs for the analytic families are chosen automatically
//! as the smallest `M` whose tail falls below a caller-supplied `epsilon`
//! (Poisson tail for coherent states, closed-form geometric tail for
//! thermal states), capped at [`MAX_PHOTONS_PER_MODE`].
//!
//! A bipartite input is either a product of two single-mode states (pure
//! vectors or density matrices), one explicit pure coefficient grid
//! `c[n][m]`, or a weighted ensemble of pure grids.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Deserialize;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::factorial::ln_factorial;
use crate::MAX_PHOTONS_PER_MODE;

/// Coefficients or weights below this magnitude count as absent for the
/// parity classifier.
pub const PARITY_TOL: f64 = 1e-14;

/// Normalization bookkeeping must close within this bound.
const NORM_TOL: f64 = 1e-12;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

fn check_capacity(cutoff: usize) -> Result<()> {
    if cutoff > MAX_PHOTONS_PER_MODE {
        Err(Error::CapacityExceeded { requested: cutoff, max: MAX_PHOTONS_PER_MODE })
    } else {
        Ok(())
    }
}

/// Photon-number parity of a state's support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityClass {
    /// Support only on odd photon numbers.
    Odd,
    /// Support only on even photon numbers.
    Even,
    /// Support on both.
    Neither,
}

fn classify(weights: impl Iterator<Item = (usize, f64)>) -> ParityClass {
    let mut has_even = false;
    let mut has_odd = false;
    for (n, w) in weights {
        if w >= PARITY_TOL {
            if n % 2 == 0 {
                has_even = true;
            } else {
                has_odd = true;
            }
        }
    }
    match (has_even, has_odd) {
        (false, true) => ParityClass::Odd,
        (true, false) => ParityClass::Even,
        _ => ParityClass::Neither,
    }
}

/// Pure single-mode state as Fock-basis coefficients `c[0..=M]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coefficients: Vec<Complex64>,
    tail_mass: f64,
}

impl FockVector {
    /// Wrap explicit coefficients; `|c|^2 + tail_mass` must equal 1 within
    /// 1e-12.
    pub fn new(coefficients: Vec<Complex64>, tail_mass: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::EmptyInput("a Fock vector needs at least the vacuum entry"));
        }
        check_capacity(coefficients.len() - 1)?;
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NumericValidation("non-finite Fock coefficient".into()));
        }
        let norm_sqr: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        let residual = (norm_sqr + tail_mass - 1.0).abs();
        if !(0.0..=1.0).contains(&tail_mass) || residual >= NORM_TOL {
            return Err(Error::NotNormalized { context: "Fock vector", residual });
        }
        Ok(Self { coefficients, tail_mass })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Largest retained photon number.
    pub fn cutoff(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Probability mass beyond the cutoff.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    pub fn parity(&self) -> ParityClass {
        classify(self.coefficients.iter().enumerate().map(|(n, c)| (n, c.norm())))
    }
}

/// Single-mode density matrix in the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeDensity {
    matrix: Array2<Complex64>,
    tail_mass: f64,
}

impl SingleModeDensity {
    /// Wrap an explicit matrix; it must be Hermitian within 1e-12, carry a
    /// nonnegative diagonal (to float dust, -1e-14), and satisfy
    /// `trace + tail_mass = 1` within 1e-12.
    pub fn new(matrix: Array2<Complex64>, tail_mass: f64) -> Result<Self> {
        let (rows, cols) = matrix.dim();
        if rows == 0 || rows != cols {
            return Err(Error::EmptyInput("a density matrix must be square and nonempty"));
        }
        check_capacity(rows - 1)?;
        let mut hermit = 0.0f64;
        for i in 0..rows {
            for j in 0..cols {
                let z = matrix[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NumericValidation("non-finite density entry".into()));
                }
                hermit = hermit.max((z - matrix[(j, i)].conj()).norm());
            }
        }
        if hermit >= NORM_TOL {
            return Err(Error::NumericValidation(format!(
                "density matrix is not Hermitian (residual {hermit:.3e})"
            )));
        }
        let mut trace = 0.0f64;
        for i in 0..rows {
            let d = matrix[(i, i)].re;
            if d < -1e-14 {
                return Err(Error::NumericValidation(format!(
                    "negative population {d:.3e} at photon number {i}"
                )));
            }
            trace += d;
        }
        let residual = (trace + tail_mass - 1.0).abs();
        if !(0.0..=1.0).contains(&tail_mass) || residual >= NORM_TOL {
            return Err(Error::NotNormalized { context: "density matrix", residual });
        }
        Ok(Self { matrix, tail_mass })
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, n: usize, np: usize) -> Complex64 {
        self.matrix[(n, np)]
    }

    /// Population of photon number `n`.
    pub fn diagonal(&self, n: usize) -> f64 {
        self.matrix[(n, n)].re
    }

    pub fn cutoff(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn trace(&self) -> f64 {
        (0..self.matrix.nrows()).map(|i| self.diagonal(i)).sum()
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.matrix.nrows()).map(|i| i as f64 * self.diagonal(i)).sum()
    }

    pub fn parity(&self) -> ParityClass {
        classify((0..self.matrix.nrows()).map(|n| (n, self.diagonal(n))))
    }
}

/// Fock state `|n>`: point mass, no tail.
pub fn make_fock(n: usize) -> Result<FockVector> {
    check_capacity(n)?;
    let mut coefficients = vec![Complex64::new(0.0, 0.0); n + 1];
    coefficients[n] = Complex64::new(1.0, 0.0);
    FockVector::new(coefficients, 0.0)
}

/// Smallest `M` with Poisson tail mass below `epsilon`, plus that tail.
///
/// The cumulative sum is Kahan-compensated so tails remain resolvable down
/// to a few float ulps, well below any practical `epsilon`.
fn poisson_cutoff(nbar: f64, epsilon: f64) -> Result<(usize, f64)> {
    let mut cumulative = 0.0f64;
    let mut compensation = 0.0f64;
    let ln_nbar = nbar.ln();
    for m in 0..=MAX_PHOTONS_PER_MODE {
        let term = (-nbar + m as f64 * ln_nbar - ln_factorial(m)).exp();
        let adjusted = term - compensation;
        let next = cumulative + adjusted;
        compensation = (next - cumulative) - adjusted;
        cumulative = next;
        let tail = (1.0 - cumulative).max(0.0);
        if tail < epsilon {
            return Ok((m, tail));
        }
    }
    Err(Error::CapacityExceeded {
        requested: MAX_PHOTONS_PER_MODE + 1,
        max: MAX_PHOTONS_PER_MODE,
    })
}

/// Coherent state `|beta>` with amplitudes `e^{-|beta|^2/2} beta^m / sqrt(m!)`,
/// truncated at the smallest cutoff whose Poisson tail is below `epsilon`.
pub fn make_coherent(beta: Complex64, epsilon: f64) -> Result<FockVector> {
    check_epsilon(epsilon)?;
    let nbar = beta.norm_sqr();
    if !nbar.is_finite() || nbar > 1e4 {
        return Err(Error::InvalidMeanPhotonNumber {
            value: nbar,
            expected: "finite and at most 1e4 for a coherent amplitude",
        });
    }
    if nbar == 0.0 {
        return FockVector::new(vec![Complex64::new(1.0, 0.0)], 0.0);
    }
    let (cutoff, tail) = poisson_cutoff(nbar, epsilon)?;
    let ln_mag = beta.norm().ln();
    let phase = beta.arg();
    let coefficients = (0..=cutoff)
        .map(|m| {
            let mag = (-0.5 * nbar + m as f64 * ln_mag - 0.5 * ln_factorial(m)).exp();
            Complex64::from_polar(mag, m as f64 * phase)
        })
        .collect();
    FockVector::new(coefficients, tail)
}

/// Smallest `M` with geometric tail `(nbar / (1 + nbar))^(M+1)` below
/// `epsilon`, plus that tail.
fn thermal_cutoff(nbar: f64, epsilon: f64) -> Result<(usize, f64)> {
    if nbar == 0.0 {
        return Ok((0, 0.0));
    }
    let q = nbar / (1.0 + nbar);
    let mut cutoff = 0usize;
    let mut tail = q;
    while tail >= epsilon {
        cutoff += 1;
        tail *= q;
        if cutoff > MAX_PHOTONS_PER_MODE {
            return Err(Error::CapacityExceeded { requested: cutoff, max: MAX_PHOTONS_PER_MODE });
        }
    }
    Ok((cutoff, tail))
}

/// Thermal state with mean photon number `nbar`: diagonal Bose-Einstein
/// populations `P(n) = nbar^n / (1 + nbar)^(n+1)`, truncated at the
/// closed-form geometric tail.
pub fn make_thermal(nbar: f64, epsilon: f64) -> Result<SingleModeDensity> {
    check_epsilon(epsilon)?;
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::InvalidMeanPhotonNumber { value: nbar, expected: "nonnegative" });
    }
    let (cutoff, tail) = thermal_cutoff(nbar, epsilon)?;
    let mut matrix = Array2::zeros((cutoff + 1, cutoff + 1));
    let q = nbar / (1.0 + nbar);
    let mut p = 1.0 / (1.0 + nbar);
    for n in 0..=cutoff {
        matrix[(n, n)] = Complex64::new(p, 0.0);
        p *= q;
    }
    SingleModeDensity::new(matrix, tail)
}

/// Textual state spec: `fock:3`, `coherent:3.0`, `coherent:1.5+0.5i`,
/// `thermal:9.0`, or `pure-grid:@states.json`.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Fock(usize),
    Coherent(Complex64),
    Thermal(f64),
    PureGridFile(PathBuf),
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::SpecParse(format!("{s:?}: {msg}"));
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| bad("expected kind:value, e.g. fock:2 or coherent:1.5+0.5i"))?;
        match kind {
            "fock" => value
                .trim()
                .parse::<usize>()
                .map(StateSpec::Fock)
                .map_err(|e| bad(&format!("photon number: {e}"))),
            "coherent" => value
                .trim()
                .parse::<Complex64>()
                .map(StateSpec::Coherent)
                .map_err(|_| bad("amplitude must look like 3.0 or 1.5+0.5i")),
            "thermal" => value
                .trim()
                .parse::<f64>()
                .map(StateSpec::Thermal)
                .map_err(|e| bad(&format!("mean photon number: {e}"))),
            "pure-grid" => match value.strip_prefix('@') {
                Some(path) if !path.is_empty() => Ok(StateSpec::PureGridFile(path.into())),
                _ => Err(bad("expected pure-grid:@file.json")),
            },
            other => Err(bad(&format!(
                "unknown state kind {other:?}; expected fock, coherent, thermal, or pure-grid"
            ))),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Fock(n) => write!(f, "fock:{n}"),
            StateSpec::Coherent(beta) => write!(f, "coherent:{beta}"),
            StateSpec::Thermal(nbar) => write!(f, "thermal:{nbar}"),
            StateSpec::PureGridFile(path) => write!(f, "pure-grid:@{}", path.display()),
        }
    }
}

/// Smallest cutoff keeping the truncation tail of `spec` below `epsilon`.
pub fn auto_cutoff(spec: &StateSpec, epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    match spec {
        StateSpec::Fock(n) => {
            check_capacity(*n)?;
            Ok(*n)
        }
        StateSpec::Coherent(beta) => Ok(make_coherent(*beta, epsilon)?.cutoff()),
        StateSpec::Thermal(nbar) => {
            if !nbar.is_finite() || *nbar < 0.0 {
                return Err(Error::InvalidMeanPhotonNumber {
                    value: *nbar,
                    expected: "nonnegative",
                });
            }
            Ok(thermal_cutoff(*nbar, epsilon)?.0)
        }
        StateSpec::PureGridFile(_) => Err(Error::SpecParse(
            "pure-grid inputs carry explicit cutoffs; auto-cutoff applies to \
             fock, coherent, and thermal specs"
                .into(),
        )),
    }
}

/// One splitter port: either a pure vector or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeState {
    Pure(FockVector),
    Density(SingleModeDensity),
}

impl ModeState {
    pub fn cutoff(&self) -> usize {
        match self {
            ModeState::Pure(v) => v.cutoff(),
            ModeState::Density(d) => d.cutoff(),
        }
    }

    pub fn tail_mass(&self) -> f64 {
        match self {
            ModeState::Pure(v) => v.tail_mass(),
            ModeState::Density(d) => d.tail_mass(),
        }
    }

    /// Density-matrix element `rho[n, np]` (rank-1 for pure states).
    pub fn rho(&self, n: usize, np: usize) -> Complex64 {
        match self {
            ModeState::Pure(v) => v.coefficients()[n] * v.coefficients()[np].conj(),
            ModeState::Density(d) => d.entry(n, np),
        }
    }

    pub fn parity(&self) -> ParityClass {
        match self {
            ModeState::Pure(v) => v.parity(),
            ModeState::Density(d) => d.parity(),
        }
    }

    fn describe(&self) -> String {
        match self {
            ModeState::Pure(v) => format!("pure(cutoff={})", v.cutoff()),
            ModeState::Density(d) => format!("mixed(cutoff={})", d.cutoff()),
        }
    }
}

/// Pure bipartite state as a coefficient grid `c[n][m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureGrid {
    coeffs: Array2<Complex64>,
    tail_mass: f64,
}

impl PureGrid {
    /// Wrap a normalized coefficient grid (`sum |c|^2 = 1` within 1e-12).
    pub fn new(coeffs: Array2<Complex64>) -> Result<Self> {
        let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let residual = (norm_sqr - 1.0).abs();
        if residual >= NORM_TOL {
            return Err(Error::NotNormalized { context: "pure bipartite grid", residual });
        }
        Self::from_parts(coeffs, (1.0 - norm_sqr).max(0.0))
    }

    /// Wrap a truncated grid with an explicit tail.
    pub fn from_parts(coeffs: Array2<Complex64>, tail_mass: f64) -> Result<Self> {
        let (rows, cols) = coeffs.dim();
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput("a coefficient grid needs at least the vacuum cell"));
        }
        check_capacity(rows - 1)?;
        check_capacity(cols - 1)?;
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NumericValidation("non-finite grid coefficient".into()));
        }
        let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let residual = (norm_sqr + tail_mass - 1.0).abs();
        if !(0.0..=1.0).contains(&tail_mass) || residual >= NORM_TOL {
            return Err(Error::NotNormalized { context: "pure bipartite grid", residual });
        }
        Ok(Self { coeffs, tail_mass })
    }

    /// Tensor product of two pure modes.
    pub fn from_modes(a: &FockVector, b: &FockVector) -> Self {
        let (ma, mb) = (a.cutoff(), b.cutoff());
        let mut coeffs = Array2::zeros((ma + 1, mb + 1));
        for n in 0..=ma {
            for m in 0..=mb {
                coeffs[(n, m)] = a.coefficients()[n] * b.coefficients()[m];
            }
        }
        let tail_mass = 1.0 - (1.0 - a.tail_mass()) * (1.0 - b.tail_mass());
        Self { coeffs, tail_mass }
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    /// Per-mode cutoffs `(M1, M2)`.
    pub fn cutoffs(&self) -> (usize, usize) {
        (self.coeffs.nrows() - 1, self.coeffs.ncols() - 1)
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Full input to the splitter.
#[derive(Debug, Clone, PartialEq)]
pub enum BipartiteInput {
    /// Statistically independent ports.
    Product(ModeState, ModeState),
    /// One explicit pure bipartite state.
    Pure(PureGrid),
    /// Weighted mixture of pure bipartite states.
    Ensemble(Vec<(f64, PureGrid)>),
}

impl BipartiteInput {
    pub fn product(a: ModeState, b: ModeState) -> Self {
        BipartiteInput::Product(a, b)
    }

    pub fn product_pure(a: FockVector, b: FockVector) -> Self {
        BipartiteInput::Product(ModeState::Pure(a), ModeState::Pure(b))
    }

    /// Weighted ensemble; weights must be nonnegative and sum to 1 within
    /// 1e-12.
    pub fn ensemble(components: Vec<(f64, PureGrid)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyInput("an ensemble needs at least one component"));
        }
        if components.iter().any(|(w, _)| !w.is_finite() || *w < 0.0) {
            return Err(Error::NumericValidation("ensemble weights must be nonnegative".into()));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        let residual = (total - 1.0).abs();
        if residual >= NORM_TOL {
            return Err(Error::NotNormalized { context: "ensemble weights", residual });
        }
        Ok(BipartiteInput::Ensemble(components))
    }

    /// Short human-readable label for run metadata.
    pub fn describe(&self) -> String {
        match self {
            BipartiteInput::Product(a, b) => {
                format!("product({}, {})", a.describe(), b.describe())
            }
            BipartiteInput::Pure(g) => {
                let (ma, mb) = g.cutoffs();
                format!("pure-grid(cutoffs {ma}, {mb})")
            }
            BipartiteInput::Ensemble(cs) => format!("ensemble({} components)", cs.len()),
        }
    }
}

/// Build a single-mode state from its spec.
pub fn realize_mode(spec: &StateSpec, epsilon: f64) -> Result<ModeState> {
    match spec {
        StateSpec::Fock(n) => Ok(ModeState::Pure(make_fock(*n)?)),
        StateSpec::Coherent(beta) => Ok(ModeState::Pure(make_coherent(*beta, epsilon)?)),
        StateSpec::Thermal(nbar) => Ok(ModeState::Density(make_thermal(*nbar, epsilon)?)),
        StateSpec::PureGridFile(_) => Err(Error::SpecParse(
            "pure-grid describes a bipartite input, not a single mode".into(),
        )),
    }
}

/// Assemble the full splitter input from one or two specs.
///
/// A `pure-grid` spec stands alone; anything else needs a spec per port.
pub fn build_bipartite(
    first: &StateSpec,
    second: Option<&StateSpec>,
    epsilon: f64,
) -> Result<BipartiteInput> {
    check_epsilon(epsilon)?;
    match first {
        StateSpec::PureGridFile(path) => {
            if second.is_some() {
                return Err(Error::SpecParse(
                    "pure-grid already fixes both modes; a second spec cannot be combined \
                     with it"
                        .into(),
                ));
            }
            Ok(BipartiteInput::Pure(load_pure_grid(path)?))
        }
        _ => {
            let second = second.ok_or_else(|| {
                Error::SpecParse("two single-mode specs are required (in1 and in2)".into())
            })?;
            if let StateSpec::PureGridFile(_) = second {
                return Err(Error::SpecParse(
                    "pure-grid stands alone; it cannot be one port of a product".into(),
                ));
            }
            Ok(BipartiteInput::Product(
                realize_mode(first, epsilon)?,
                realize_mode(second, epsilon)?,
            ))
        }
    }
}

#[derive(Deserialize)]
struct GridFile {
    coeffs: Vec<Vec<[f64; 2]>>,
}

/// Parse a pure bipartite grid from JSON: `{"coeffs": [[[re, im], ...], ...]}`
/// indexed by `n` then `m`.
pub fn pure_grid_from_json_str(text: &str) -> Result<PureGrid> {
    let parsed: GridFile = serde_json::from_str(text)
        .map_err(|e| Error::SpecParse(format!("pure-grid JSON: {e}")))?;
    let rows = parsed.coeffs.len();
    if rows == 0 {
        return Err(Error::EmptyInput("a coefficient grid needs at least the vacuum cell"));
    }
    let cols = parsed.coeffs[0].len();
    if parsed.coeffs.iter().any(|row| row.len() != cols) {
        return Err(Error::SpecParse("pure-grid JSON: ragged coefficient rows".into()));
    }
    let mut coeffs = Array2::zeros((rows, cols));
    for (n, row) in parsed.coeffs.iter().enumerate() {
        for (m, &[re, im]) in row.iter().enumerate() {
            coeffs[(n, m)] = Complex64::new(re, im);
        }
    }
    PureGrid::new(coeffs)
}

fn load_pure_grid(path: &Path) -> Result<PureGrid> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::SpecParse(format!("cannot read {}: {e}", path.display())))?;
    pure_grid_from_json_str(&text)
}

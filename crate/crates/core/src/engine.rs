//! Joint photon-number distributions at the splitter outputs.
//!
//! The engine propagates a bipartite input through a scattering matrix by
//! summing photon-number transition amplitudes sector by sector (total
//! photon number is conserved), producing a square grid
//! `P(m_a, m_b)` over the two output modes together with the truncation
//! mass carried over from the input states.  The grid plus its truncation
//! mass must account for all probability within [`MASS_TOL`]; anything
//! else is reported as a numeric-validation error rather than silently
//! renormalized.
//!
//! The coincidence diagonal `P(n, n)` is the observable of interest for
//! two-photon and multiphoton bunching: odd-by-odd photon-number inputs
//! on a balanced splitter null the entire diagonal (a central nodal
//! line), which [`JointDistribution::cnl_metric`] quantifies as the ratio
//! of the largest diagonal cell to the largest cell overall.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorial::ln_factorial;
use crate::splitter::{Convention, ScatteringMatrix};
use crate::states::{BipartiteInput, ModeState, PureGrid};
use crate::MAX_PHOTONS_PER_MODE;

/// Largest tolerated deviation of `sum(grid) + truncation_mass` from 1.
pub const MASS_TOL: f64 = 1e-10;

/// Diagonal-to-peak ratios below this declare a central nodal line.
pub const CNL_TOL: f64 = 1e-10;

/// Negative probabilities larger than this magnitude are hard errors;
/// smaller ones are clamped to zero as accumulated rounding dust.
const NEGATIVE_DUST_TOL: f64 = 1e-14;

/// Joint photon-number distribution over the two output ports.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    grid: Array2<f64>,
    cutoff: usize,
    truncation_mass: f64,
    convention: Convention,
    input: String,
    clamped_cells: usize,
}

/// Diagonal suppression summary; see [`JointDistribution::cnl_metric`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CnlMetric {
    /// Largest coincidence-diagonal cell `max_n P(n, n)`.
    pub max_diagonal: f64,
    /// Largest cell anywhere in the grid.
    pub max_cell: f64,
    /// `max_diagonal / max_cell`.
    pub ratio: f64,
}

impl CnlMetric {
    /// True when the coincidence diagonal is suppressed to numerical zero
    /// relative to the distribution's peak (`ratio < 1e-10`).
    pub fn is_central_nodal_line(&self) -> bool {
        self.ratio < CNL_TOL
    }
}

#[derive(Serialize, Deserialize)]
struct JointDistributionRepr {
    convention: Convention,
    cutoff: usize,
    truncation_mass: f64,
    grid: Vec<Vec<f64>>,
}

impl JointDistribution {
    /// Probability of counting `ma` photons in output 1 and `mb` in
    /// output 2.  Cells beyond the cutoff are structurally zero.
    pub fn prob(&self, ma: usize, mb: usize) -> f64 {
        if ma <= self.cutoff && mb <= self.cutoff {
            self.grid[(ma, mb)]
        } else {
            0.0
        }
    }

    pub fn grid(&self) -> &Array2<f64> {
        &self.grid
    }

    /// Largest representable photon number per output mode.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Input probability mass beyond the truncated grid.
    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Human-readable label of the input this was computed from.
    pub fn input_label(&self) -> &str {
        &self.input
    }

    /// How many cells of negative rounding dust were clamped to zero.
    pub fn clamped_cells(&self) -> usize {
        self.clamped_cells
    }

    pub fn total_mass(&self) -> f64 {
        self.grid.sum()
    }

    /// The coincidence diagonal `P(n, n)` for `n = 0..=cutoff`.
    pub fn coincidence_profile(&self) -> Vec<f64> {
        (0..=self.cutoff).map(|n| self.grid[(n, n)]).collect()
    }

    /// Measure how strongly the coincidence diagonal is suppressed.
    pub fn cnl_metric(&self) -> Result<CnlMetric> {
        let max_cell = self.grid.iter().cloned().fold(0.0f64, f64::max);
        if max_cell == 0.0 {
            return Err(Error::EmptyInput("all-zero distribution has no peak to compare against"));
        }
        let max_diagonal =
            (0..=self.cutoff).map(|n| self.grid[(n, n)]).fold(0.0f64, f64::max);
        Ok(CnlMetric { max_diagonal, max_cell, ratio: max_diagonal / max_cell })
    }

    /// Serialize as JSON with fields `convention`, `cutoff`,
    /// `truncation_mass`, and `grid` (row-major, `grid[ma][mb]`).
    pub fn to_json_string(&self) -> String {
        let repr = JointDistributionRepr {
            convention: self.convention,
            cutoff: self.cutoff,
            truncation_mass: self.truncation_mass,
            grid: self
                .grid
                .rows()
                .into_iter()
                .map(|row| row.to_vec())
                .collect(),
        };
        serde_json::to_string_pretty(&repr).expect("distribution serialization cannot fail")
    }

    /// Inverse of [`JointDistribution::to_json_string`]; floats round-trip
    /// bit-exactly.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let repr: JointDistributionRepr = serde_json::from_str(text)
            .map_err(|e| Error::SpecParse(format!("distribution JSON: {e}")))?;
        if repr.cutoff > MAX_PHOTONS_PER_MODE {
            return Err(Error::CapacityExceeded {
                requested: repr.cutoff,
                max: MAX_PHOTONS_PER_MODE,
            });
        }
        let side = repr.cutoff + 1;
        if repr.grid.len() != side || repr.grid.iter().any(|row| row.len() != side) {
            return Err(Error::SpecParse(format!(
                "distribution JSON: grid must be {side}x{side} for cutoff {}",
                repr.cutoff
            )));
        }
        let mut grid = Array2::zeros((side, side));
        for (i, row) in repr.grid.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                grid[(i, j)] = v;
            }
        }
        finalize(
            grid,
            repr.truncation_mass,
            repr.convention,
            "deserialized".to_string(),
        )
    }

    /// Render as CSV with header `ma,mb,probability`, one row per cell in
    /// row-major order, probabilities in full-precision scientific
    /// notation.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(32 * (self.cutoff + 1) * (self.cutoff + 1));
        out.push_str("ma,mb,probability\n");
        for ma in 0..=self.cutoff {
            for mb in 0..=self.cutoff {
                out.push_str(&format!("{ma},{mb},{:.16e}\n", self.grid[(ma, mb)]));
            }
        }
        out
    }
}

/// Validate accumulated cells, clamp negative dust, and close the
/// probability books.
pub(crate) fn finalize(
    mut grid: Array2<f64>,
    truncation_mass: f64,
    convention: Convention,
    input: String,
) -> Result<JointDistribution> {
    if !(0.0..=1.0).contains(&truncation_mass) {
        return Err(Error::NumericValidation(format!(
            "truncation mass {truncation_mass:.3e} outside [0, 1]"
        )));
    }
    let mut clamped_cells = 0usize;
    for cell in grid.iter_mut() {
        if !cell.is_finite() {
            return Err(Error::NumericValidation("non-finite probability cell".into()));
        }
        if *cell < 0.0 {
            if *cell > -NEGATIVE_DUST_TOL {
                *cell = 0.0;
                clamped_cells += 1;
            } else {
                return Err(Error::NumericValidation(format!(
                    "negative probability {:.3e} exceeds the rounding-dust bound",
                    *cell
                )));
            }
        }
    }
    let total: f64 = grid.sum();
    let residual = (total + truncation_mass - 1.0).abs();
    if residual >= MASS_TOL {
        return Err(Error::NumericValidation(format!(
            "probability mass check failed: grid sum {total:.17} plus truncation mass \
             {truncation_mass:.3e} deviates from 1 by {residual:.3e}"
        )));
    }
    let cutoff = grid.nrows() - 1;
    Ok(JointDistribution { grid, cutoff, truncation_mass, convention, input, clamped_cells })
}

fn check_output_capacity(cutoff: usize) -> Result<()> {
    if cutoff > MAX_PHOTONS_PER_MODE {
        Err(Error::CapacityExceeded { requested: cutoff, max: MAX_PHOTONS_PER_MODE })
    } else {
        Ok(())
    }
}

fn check_input_mass(kept: f64, tail: f64, context: &'static str) -> Result<()> {
    let residual = (kept + tail - 1.0).abs();
    if residual >= MASS_TOL {
        Err(Error::NotNormalized { context, residual })
    } else {
        Ok(())
    }
}

/// Range of mode-1 photon numbers compatible with `total` photons split
/// across cutoffs `ma` and `mb`.
fn sector_range(total: usize, ma: usize, mb: usize) -> Option<std::ops::RangeInclusive<usize>> {
    let lo = total.saturating_sub(mb);
    let hi = total.min(ma);
    (lo <= hi).then_some(lo..=hi)
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Output grid for one pure bipartite state: amplitudes within each
/// photon-number sector superpose before squaring.
fn pure_grid_output(matrix: &ScatteringMatrix, grid: &PureGrid) -> Result<Array2<f64>> {
    let (ma, mb) = grid.cutoffs();
    let m_out = ma + mb;
    let mut out = Array2::zeros((m_out + 1, m_out + 1));
    for total in 0..=m_out {
        let Some(range) = sector_range(total, ma, mb) else { continue };
        let inputs: Vec<(usize, Complex64)> = range
            .filter_map(|n| {
                let c = grid.coeffs()[(n, total - n)];
                (c != ZERO).then_some((n, c))
            })
            .collect();
        if inputs.is_empty() {
            continue;
        }
        for p in 0..=total {
            let q = total - p;
            let mut amp = ZERO;
            for &(n, c) in &inputs {
                amp += c * matrix.transition_amplitude(n, total - n, p, q)?;
            }
            out[(p, q)] = amp.norm_sqr();
        }
    }
    Ok(out)
}

/// Output grid for a product of two (possibly mixed) modes: within each
/// sector, cell probabilities contract the two density matrices with a
/// cached row of transition amplitudes.
fn product_output(
    matrix: &ScatteringMatrix,
    a: &ModeState,
    b: &ModeState,
) -> Result<Array2<f64>> {
    let (ma, mb) = (a.cutoff(), b.cutoff());
    let m_out = ma + mb;
    let mut out = Array2::zeros((m_out + 1, m_out + 1));
    for total in 0..=m_out {
        let Some(range) = sector_range(total, ma, mb) else { continue };
        let ns: Vec<usize> = range.collect();
        let len = ns.len();
        let mut weights = vec![ZERO; len * len];
        let mut any = false;
        for (i, &ni) in ns.iter().enumerate() {
            for (j, &nj) in ns.iter().enumerate() {
                let w = a.rho(ni, nj) * b.rho(total - ni, total - nj);
                if w != ZERO {
                    any = true;
                }
                weights[i * len + j] = w;
            }
        }
        if !any {
            continue;
        }
        let mut amps = vec![ZERO; len];
        for p in 0..=total {
            let q = total - p;
            for (i, &ni) in ns.iter().enumerate() {
                amps[i] = matrix.transition_amplitude(ni, total - ni, p, q)?;
            }
            let mut cell = ZERO;
            for i in 0..len {
                for j in 0..len {
                    let w = weights[i * len + j];
                    if w != ZERO {
                        cell += w * amps[i] * amps[j].conj();
                    }
                }
            }
            out[(p, q)] = cell.re;
        }
    }
    Ok(out)
}

/// Compute the joint output photon-number distribution.
///
/// The output grid is square with cutoff `M1 + M2` (the largest photon
/// number either output can hold), which must stay within
/// [`MAX_PHOTONS_PER_MODE`].  The grid sum plus the inherited truncation
/// mass must equal 1 within [`MASS_TOL`].
pub fn output_distribution(
    matrix: &ScatteringMatrix,
    input: &BipartiteInput,
) -> Result<JointDistribution> {
    let label = input.describe();
    match input {
        BipartiteInput::Product(a, b) => {
            match a {
                ModeState::Pure(v) => check_input_mass(v.norm_sqr(), v.tail_mass(), "input mode 1")?,
                ModeState::Density(d) => check_input_mass(d.trace(), d.tail_mass(), "input mode 1")?,
            }
            match b {
                ModeState::Pure(v) => check_input_mass(v.norm_sqr(), v.tail_mass(), "input mode 2")?,
                ModeState::Density(d) => check_input_mass(d.trace(), d.tail_mass(), "input mode 2")?,
            }
            check_output_capacity(a.cutoff() + b.cutoff())?;
            let tail = 1.0 - (1.0 - a.tail_mass()) * (1.0 - b.tail_mass());
            let grid = match (a, b) {
                (ModeState::Pure(va), ModeState::Pure(vb)) => {
                    pure_grid_output(matrix, &PureGrid::from_modes(va, vb))?
                }
                _ => product_output(matrix, a, b)?,
            };
            finalize(grid, tail, matrix.convention(), label)
        }
        BipartiteInput::Pure(g) => {
            check_input_mass(g.norm_sqr(), g.tail_mass(), "pure bipartite grid")?;
            let (ma, mb) = g.cutoffs();
            check_output_capacity(ma + mb)?;
            let grid = pure_grid_output(matrix, g)?;
            finalize(grid, g.tail_mass(), matrix.convention(), label)
        }
        BipartiteInput::Ensemble(components) => {
            if components.is_empty() {
                return Err(Error::EmptyInput("an ensemble needs at least one component"));
            }
            let weight_sum: f64 = components.iter().map(|(w, _)| w).sum();
            check_input_mass(weight_sum, 0.0, "ensemble weights")?;
            let mut m_out = 0usize;
            for (_, g) in components {
                check_input_mass(g.norm_sqr(), g.tail_mass(), "ensemble component")?;
                let (ma, mb) = g.cutoffs();
                m_out = m_out.max(ma + mb);
            }
            check_output_capacity(m_out)?;
            let mut grid = Array2::zeros((m_out + 1, m_out + 1));
            let mut tail = 0.0;
            for (w, g) in components {
                let part = pure_grid_output(matrix, g)?;
                let (rows, cols) = part.dim();
                for i in 0..rows {
                    for j in 0..cols {
                        grid[(i, j)] += w * part[(i, j)];
                    }
                }
                tail += w * g.tail_mass();
            }
            finalize(grid, tail, matrix.convention(), label)
        }
    }
}

/// Exact joint distribution for one photon entering port 1 and a coherent
/// state of mean photon number `nbar` entering port 2 of a balanced
/// splitter:
///
/// `P(n1, n2) = e^{-nbar} nbar^{n1+n2-1} (n1-n2)^2 / (n1! n2! 2^{n1+n2})`.
///
/// Evaluated in log space; exactly zero on the coincidence diagonal.
pub fn closed_form_one_photon_coherent(n1: usize, n2: usize, nbar: f64) -> Result<f64> {
    if !(nbar > 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidMeanPhotonNumber { value: nbar, expected: "positive" });
    }
    let cap = 2 * MAX_PHOTONS_PER_MODE;
    if n1.max(n2) > cap {
        return Err(Error::CapacityExceeded { requested: n1.max(n2), max: cap });
    }
    if n1 == n2 {
        return Ok(0.0);
    }
    let total = (n1 + n2) as f64;
    let diff = n1 as f64 - n2 as f64;
    let ln_p = -nbar + (total - 1.0) * nbar.ln() + 2.0 * diff.abs().ln()
        - ln_factorial(n1)
        - ln_factorial(n2)
        - total * std::f64::consts::LN_2;
    Ok(ln_p.exp())
}

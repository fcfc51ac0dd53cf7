//! Finite-efficiency photon counting as Bernoulli loss.
//!
//! A detector with quantum efficiency `eta` registers each arriving photon
//! independently with probability `eta`, so a true photon number `N` is
//! read out as `n` with the binomial weight `C(N, n) eta^n (1-eta)^(N-n)`.
//! Applying that convolution to a single-mode distribution is
//! [`apply_single`]; [`apply_joint`] thins the two output ports of a
//! [`JointDistribution`] independently with per-port efficiencies.
//!
//! Thinning only moves probability toward smaller counts, so the grid
//! cutoff, total mass, and recorded truncation mass are all preserved.
//! The perfect-detector case `eta = 1` is an exact identity (bit-for-bit),
//! and a Fock point mass maps to its Bernoulli row exactly as the product
//! `C(N, n) * eta^n * (1-eta)^(N-n)` is evaluated, term for term.

use serde::Serialize;

use crate::engine::{finalize, JointDistribution};
use crate::error::{Error, Result};
use crate::factorial::binomial_f64;

/// Per-port detector efficiencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyModel {
    eta1: f64,
    eta2: f64,
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::EfficiencyOutOfRange(eta))
    }
}

impl EfficiencyModel {
    /// Independent efficiencies for output ports 1 and 2, each in [0, 1].
    pub fn new(eta1: f64, eta2: f64) -> Result<Self> {
        check_eta(eta1)?;
        check_eta(eta2)?;
        Ok(Self { eta1, eta2 })
    }

    /// The same efficiency at both ports.
    pub fn uniform(eta: f64) -> Result<Self> {
        Self::new(eta, eta)
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }
}

/// Thin a single-mode photon-number distribution by efficiency `eta`.
///
/// `out[n] = sum_{N >= n} C(N, n) eta^n (1-eta)^(N-n) p[N]`, truncated at
/// the input length (thinning never increases the count, so no mass leaves
/// the range).  Total mass is preserved; `eta = 1` returns the input
/// unchanged and `eta = 0` collapses everything onto zero counts.
pub fn apply_single(p: &[f64], eta: f64) -> Result<Vec<f64>> {
    check_eta(eta)?;
    if p.is_empty() {
        return Err(Error::EmptyInput("cannot thin an empty distribution"));
    }
    if eta == 1.0 {
        return Ok(p.to_vec());
    }
    if eta == 0.0 {
        let mut out = vec![0.0; p.len()];
        out[0] = p.iter().sum();
        return Ok(out);
    }
    let mut out = vec![0.0; p.len()];
    for (big_n, &weight) in p.iter().enumerate() {
        if weight == 0.0 {
            continue;
        }
        for (n, slot) in out.iter_mut().enumerate().take(big_n + 1) {
            *slot += binomial_f64(big_n, n)
                * eta.powi(n as i32)
                * (1.0 - eta).powi((big_n - n) as i32)
                * weight;
        }
    }
    Ok(out)
}

/// Thin both ports of a joint distribution independently.
///
/// Port 1 (the `ma` axis) sees `eta1`, port 2 sees `eta2`.  The cutoff,
/// convention, and truncation mass carry over unchanged.
pub fn apply_joint(dist: &JointDistribution, model: &EfficiencyModel) -> Result<JointDistribution> {
    let side = dist.cutoff() + 1;
    let mut grid = dist.grid().clone();
    // Rows: thin the mode-2 counts within each fixed mode-1 count.
    for ma in 0..side {
        let row: Vec<f64> = (0..side).map(|mb| grid[(ma, mb)]).collect();
        let thinned = apply_single(&row, model.eta2)?;
        for (mb, v) in thinned.into_iter().enumerate() {
            grid[(ma, mb)] = v;
        }
    }
    // Columns: thin the mode-1 counts within each fixed mode-2 count.
    for mb in 0..side {
        let col: Vec<f64> = (0..side).map(|ma| grid[(ma, mb)]).collect();
        let thinned = apply_single(&col, model.eta1)?;
        for (ma, v) in thinned.into_iter().enumerate() {
            grid[(ma, mb)] = v;
        }
    }
    let label = format!(
        "{} | detectors(eta1={}, eta2={})",
        dist.input_label(),
        model.eta1,
        model.eta2
    );
    finalize(grid, dist.truncation_mass(), dist.convention(), label)
}

/// One row of an efficiency scan: the coincidence probability
/// `P_eta(n, n)` at detector efficiency `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyPoint {
    pub eta: f64,
    pub n: usize,
    pub probability: f64,
}

/// Coincidence probabilities swept over detector efficiencies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyScan {
    pub rows: Vec<EfficiencyPoint>,
}

impl EfficiencyScan {
    /// Render as CSV with header `eta,n,prob`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("eta,n,prob\n");
        for row in &self.rows {
            out.push_str(&format!("{},{},{:.16e}\n", row.eta, row.n, row.probability));
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan serialization cannot fail")
    }
}

/// Sweep uniform detector efficiency over `etas`, reporting the equal-count
/// coincidence probability `P_eta(n, n)` for each `n` in `ns`.
///
/// Rows are ordered by `eta` first, then `n`.
pub fn coincidence_vs_eta(
    dist: &JointDistribution,
    etas: &[f64],
    ns: &[usize],
) -> Result<EfficiencyScan> {
    if etas.is_empty() {
        return Err(Error::EmptyInput("efficiency scan needs at least one eta value"));
    }
    if ns.is_empty() {
        return Err(Error::EmptyInput("efficiency scan needs at least one photon number"));
    }
    let mut rows = Vec::with_capacity(etas.len() * ns.len());
    for &eta in etas {
        let thinned = apply_joint(dist, &EfficiencyModel::uniform(eta)?)?;
        for &n in ns {
            rows.push(EfficiencyPoint { eta, n, probability: thinned.prob(n, n) });
        }
    }
    Ok(EfficiencyScan { rows })
}

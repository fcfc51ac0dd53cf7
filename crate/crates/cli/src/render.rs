//! Renderers for the human-readable (`text`) views and shared output
//! plumbing.
//!
//! Machine formats come straight from the library (`to_csv_string`,
//! `to_json_string`, certificate JSON) so files written here are
//! byte-stable across runs: same settings, same bytes.  Floating-point
//! values in CSV carry 17 significant digits and JSON uses
//! shortest-round-trip encoding, so both re-parse bit-identically.

use std::io::Write;
use std::path::Path;

use homsim::engine::{CnlMetric, JointDistribution};
use homsim::EfficiencyScan;

use crate::CliError;

/// Write `content` to `path` when given, standard output otherwise.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, content),
        None => {
            let stdout = std::io::stdout();
            let mut handle = stdout.lock();
            handle
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Io("writing standard output".into(), e))
        }
    }
}

/// Write `content` to `path`, mapping failures to the I/O exit path.
pub fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Io(format!("writing {}", path.display()), e))
}

/// Human-readable view of a joint distribution: provenance header plus
/// the grid with rows labeled by the mode-1 count.
pub fn distribution_text(dist: &JointDistribution) -> String {
    let mut out = String::new();
    out.push_str(&format!("input: {}\n", dist.input_label()));
    out.push_str(&format!("convention: {}\n", dist.convention()));
    out.push_str(&format!("cutoff: {}\n", dist.cutoff()));
    out.push_str(&format!("truncation_mass: {:.16e}\n", dist.truncation_mass()));
    out.push_str("grid (rows ma = 0.., columns mb = 0..):\n");
    for ma in 0..=dist.cutoff() {
        let cells: Vec<String> = (0..=dist.cutoff())
            .map(|mb| format!("{:>12.5e}", dist.prob(ma, mb)))
            .collect();
        out.push_str(&format!("{ma:>4}  {}\n", cells.join(" ")));
    }
    out
}

/// CSV rows `n,probability` for the coincidence diagonal P(n, n).
pub fn coincidence_csv(dist: &JointDistribution) -> String {
    let mut out = String::from("n,probability\n");
    for (n, p) in dist.coincidence_profile().iter().enumerate() {
        out.push_str(&format!("{n},{p:.16e}\n"));
    }
    out
}

/// JSON document bundling the coincidence profile with the diagonal
/// suppression metric.
pub fn coincidence_json(dist: &JointDistribution, metric: &CnlMetric) -> String {
    let doc = serde_json::json!({
        "input": dist.input_label(),
        "convention": dist.convention().to_string(),
        "cutoff": dist.cutoff(),
        "truncation_mass": dist.truncation_mass(),
        "profile": dist.coincidence_profile(),
        "max_diagonal": metric.max_diagonal,
        "max_cell": metric.max_cell,
        "ratio": metric.ratio,
        "central_nodal_line": metric.is_central_nodal_line(),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("JSON document cannot fail");
    text.push('\n');
    text
}

/// Human-readable coincidence summary.
pub fn coincidence_text(dist: &JointDistribution, metric: &CnlMetric) -> String {
    let mut out = String::new();
    out.push_str(&format!("input: {}\n", dist.input_label()));
    out.push_str(&format!("convention: {}\n", dist.convention()));
    out.push_str("   n  P(n,n)\n");
    for (n, p) in dist.coincidence_profile().iter().enumerate() {
        out.push_str(&format!("{n:>4}  {p:.16e}\n"));
    }
    out.push_str(&format!("max diagonal cell: {:.16e}\n", metric.max_diagonal));
    out.push_str(&format!("max grid cell:     {:.16e}\n", metric.max_cell));
    out.push_str(&format!("suppression ratio: {:.16e}\n", metric.ratio));
    out.push_str(&format!(
        "central nodal line: {}\n",
        if metric.is_central_nodal_line() { "yes" } else { "no" }
    ));
    out
}

/// Human-readable efficiency scan table.
pub fn efficiency_text(scan: &EfficiencyScan) -> String {
    let mut out = String::from("     eta    n  P_eta(n,n)\n");
    for row in &scan.rows {
        out.push_str(&format!(
            "{:>8}  {:>3}  {:.16e}\n",
            row.eta, row.n, row.probability
        ));
    }
    out
}

//! Photon-number statistics at a lossless two-port beam splitter.
//!
//! The crate computes exact transition amplitudes between two-mode Fock
//! states under an arbitrary unitary 2x2 scattering matrix, assembles joint
//! output photon-number distributions for pure, mixed, and ensemble inputs,
//! and exposes the combinatorial structure behind multiphoton
//! interference: for any input `|n, m>` with `n` and `m` both odd, a
//! balanced splitter never emits an equal pair of photon numbers.  The
//! two-photon case is the Hong-Ou-Mandel dip; the general case shows up as
//! a nodal line running down the diagonal of the joint distribution.
//!
//! Modules:
//! - [`splitter`]: scattering-matrix conventions, unitarity checks, and
//!   Fock-basis transition amplitudes;
//! - [`combinatorics`]: exact integer coincidence sums, scattering-diagram
//!   enumeration, and mirror-pair cancellation certificates;
//! - [`states`]: single-mode and bipartite input states with tracked
//!   truncation tails;
//! - [`engine`]: joint output distributions, coincidence profiles, and the
//!   central-nodal-line metric;
//! - [`detector`]: finite-efficiency (Bernoulli thinning) detector models.

pub mod combinatorics;
pub mod detector;
pub mod engine;
pub mod error;
mod factorial;
pub mod splitter;
pub mod states;

/// Largest photon number handled per mode (grid axes run `0..=` this value).
///
/// Internal factorial tables are sized for twice this count so that output
/// totals of two saturated modes stay representable.
pub const MAX_PHOTONS_PER_MODE: usize = 256;

pub use combinatorics::{
    cancellation_certificate, coincidence_sum, enumerate_diagrams, split_sum,
    CancellationCertificate, CentralTerm, DiagramTerm, MirrorPair, SplitSum, Verdict,
};
pub use detector::{
    apply_joint, apply_single, coincidence_vs_eta, EfficiencyModel, EfficiencyPoint,
    EfficiencyScan,
};
pub use engine::{
    closed_form_one_photon_coherent, output_distribution, CnlMetric, JointDistribution,
};
pub use error::{Error, Result};
pub use splitter::{Convention, ScatteringMatrix, UnitarityReport};
pub use states::{
    auto_cutoff, build_bipartite, make_coherent, make_fock, make_thermal,
    pure_grid_from_json_str, realize_mode, BipartiteInput, FockVector, ModeState, ParityClass,
    PureGrid, SingleModeDensity, StateSpec,
};

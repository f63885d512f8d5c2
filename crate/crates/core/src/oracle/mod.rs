//! Independent radial reference solutions on the disk.
//!
//! Least-energy solutions on a disk are radially symmetric and decreasing, so
//! on that domain the full problem collapses to a boundary-value ODE,
//!
//!   u″ + u′/r = λu − uᵖ,   u′(0) = 0,   u(R) = 0,   u > 0 on [0, R),
//!
//! which this module solves by shooting: integrate outward from the center
//! and bisect the center amplitude until the first zero of u lands on the
//! boundary.  Nothing here touches the mesh, the assembled operators, or the
//! two-dimensional minimizer, so agreement between the two pipelines is a
//! genuine cross-check rather than a tautology.  The only shared vocabulary
//! is the scalar concentration scale and the report types from
//! [`crate::diag`], so profile and spectrum comparisons line up field by
//! field with their two-dimensional counterparts.
//!
//! Contents:
//! - [`bessel_lambda1`]: the disk's first Dirichlet eigenvalue (j₀,₁/R)²,
//!   computed from the J₀ power series; it anchors the amplitude bracket.
//! - [`shoot`] and [`RadialSolution`]: the boundary-value solve, with energy
//!   and mass quadratures on the returned grid.
//! - [`oracle_profile`]: rescaled-profile comparison against the limit
//!   bubble, mirroring the two-dimensional diagnostic.
//! - [`radial_linearized_modes`]: spectra of the angular-momentum blocks Lₖ
//!   of the linearized operator, for the Morse-index census.
//! - [`trace_csv`] / [`amplitude_table_csv`]: deterministic CSV emitters.

mod bessel;
mod csv;
mod modes;
mod profile;
mod shoot;
#[cfg(test)]
pub(crate) mod testutil;

pub use bessel::{bessel_j0_first_zero, bessel_lambda1};
pub use csv::{amplitude_table_csv, trace_csv};
pub use modes::radial_linearized_modes;
pub use profile::oracle_profile;
pub use shoot::{
    energy_integrals, quotient_scale, rescaled_core_mass, shoot, RadialSolution,
};

use thiserror::Error;

/// Failure modes of the radial oracle.
#[derive(Debug, Error)]
pub enum OracleError {
    /// Parameters outside the subcritical, defocusing-free regime.
    #[error("invalid shoot parameters: p = {p}, lambda = {lambda}, tol = {tol} (need finite p > 1, lambda >= 0, tol > 0)")]
    InvalidParams { p: f64, lambda: f64, tol: f64 },

    /// A disk radius that is not a positive finite number.
    #[error("disk radius {radius} is not a positive finite number")]
    InvalidDiskRadius { radius: f64 },

    /// The amplitude scan found no sign change of u(R); the trace records
    /// every (amplitude, boundary value) pair probed.
    #[error("amplitude bracket [{lower}, {upper}] does not straddle a boundary zero after {} probes: {trace:?}", trace.len())]
    BracketingFailed {
        lower: f64,
        upper: f64,
        trace: Vec<(f64, f64)>,
    },

    /// Bisection exhausted double precision before |u(R)| dropped below the
    /// requested tolerance.
    #[error("shoot tolerance {requested:e} unreachable: boundary value stalled at {achieved:e}")]
    ToleranceUnreachable { requested: f64, achieved: f64 },

    /// A profile sample radius that is not finite and nonnegative.
    #[error("sample radius {value} at index {index} is not finite and nonnegative")]
    InvalidRadius { index: usize, value: f64 },

    /// The stored grid cannot resolve the r = 0 singular term of the mode
    /// operator.
    #[error("radial grid too coarse near the axis: first interior node {first_node:e} exceeds {limit:e}")]
    GridTooCoarse { first_node: f64, limit: f64 },

    /// A mode request with no eigenvalues or a grid too short to discretize.
    #[error("invalid mode request: k_max = {k_max}, n_eigs = {n_eigs} on a grid of {nodes} nodes")]
    InvalidModeRequest {
        k_max: usize,
        n_eigs: usize,
        nodes: usize,
    },

    /// The symmetric eigensolver failed on an angular block.
    #[error(transparent)]
    Eigen(#[from] crate::sparse::SparseError),
}

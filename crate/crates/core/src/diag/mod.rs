//! Verdict layer: turns a [`SolveReport`](crate::solver::SolveReport) into
//! quantitative diagnostics for the asymptotic claims about least-energy
//! solutions of −Δu + λu = uᵖ.
//!
//! Four families of questions are answered here.
//!
//! * **Profile** ([`rescaled_profile`]): around the maximizing point x_p the
//!   solution is rescaled by ε = 1/(√(p−1)·‖u‖_∞^{(p−1)/2}) and the field
//!   φ(X) = (p−1)·Log(u(x_p + εX)/‖u‖_∞) is sampled and compared against the
//!   Liouville bubble U(X) = Log(1/(1 + |X|²/8)²).  The comparison is gated
//!   by a window-resolution rule (ε at least three local mesh widths);
//!   below that, interpolation noise dominates φ and no verdict is issued.
//!
//! * **Star-shapedness** ([`star_shape_test`]): on convex domains the level
//!   sets are expected star-shaped about x_p, i.e. (x − x_p)·∇u < 0 away
//!   from the peak.  The discrete gradient of a P1 field is constant per
//!   triangle, so the sign is tested at every barycenter outside a small
//!   core ball (where the inequality degenerates) and a boundary strip
//!   (where the discrete gradient is polluted); both exclusions are
//!   reported, never silently applied.  The companion quantity
//!   h(x) = (x − x_p)·∇u + 2u/(p−1) is evaluated on the core ring.
//!
//! * **Spectrum** ([`linearized_spectrum`]): the linearized operator
//!   −Δ + λ − p·u^{p−1} is assembled as a pencil against the lumped mass
//!   matrix; the count of negative eigenvalues (computed exactly from the
//!   inertia of an LDLᵀ factorization, not from the truncated eigenvalue
//!   list) certifies the Morse index, and the smallest magnitude among the
//!   computed eigenvalues measures nondegeneracy.
//!
//! * **Bounds** ([`bounds_report`], [`concentration_diagnostics`]): per-p
//!   scalar rows — ‖u‖_∞, ‖u‖_∞^{p−1}, c²·p, p∫u^{p+1}, the H¹ load, and
//!   the Sobolev ratio ‖u‖_{L^p}/(√p‖∇u‖_{L²}) — plus concentration-window
//!   integrals: the rescaled kinetic density F = |∇u|²/(‖u‖_∞^{p−1}u²), the
//!   Harnack floor min u/‖u‖_∞, and ∫ψ with ψ = (u/‖u‖_∞)^{p−1}, which
//!   should approach the bubble mass 8π·μ²R²/(1+μ²R²) on the window.
//!
//! All diagnostics are pure functions of immutable inputs and may run
//! concurrently across reports.

mod bounds;
mod csv;
mod profile;
mod spectrum;
mod star;

#[cfg(test)]
pub(crate) mod testutil;

pub use bounds::{bounds_report, concentration_diagnostics, BoundsRow, ConcentrationReport};
pub use csv::{bounds_csv, profile_csv, spectrum_csv, violations_csv};
pub use profile::{rescaled_profile, ProfileComparison};
pub use spectrum::{linearized_spectrum, SpectrumReport};
pub use star::{star_shape_test, StarShapeReport, StarViolation};

use crate::geometry::Point;
use crate::mesh::Mesh;
use crate::sparse::SparseError;
use thiserror::Error;

/// Failures of the diagnostic layer.
#[derive(Debug, Error)]
pub enum DiagError {
    #[error("profile radius {value} at index {index} is not finite and positive")]
    InvalidRadius { index: usize, value: f64 },
    #[error("no reports supplied")]
    EmptyReportList,
    #[error(
        "star-shape exclusions need core_radius_factor > 0 and boundary_width ≥ 0, \
         got {core_radius_factor} and {boundary_width}"
    )]
    InvalidExclusion {
        core_radius_factor: f64,
        boundary_width: f64,
    },
    #[error("the mesh carries no domain description, so convexity cannot be certified")]
    ConvexityUnknown,
    #[error("concentration window radius {radius} is not finite and positive")]
    InvalidWindow { radius: f64 },
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

/// Concentration length ε = 1/(√(p−1)·a^{(p−1)/2}) for amplitude a,
/// evaluated in the log domain so large p cannot overflow the power.
pub fn epsilon_scale(p: f64, amplitude: f64) -> f64 {
    (-0.5 * (p - 1.0).ln() - 0.5 * (p - 1.0) * amplitude.ln()).exp()
}

/// Nodal gradients of a P1 field: the area-weighted average of the
/// (constant) triangle gradients incident to each vertex.  This is the
/// standard recovery operator; it is first-order consistent at interior
/// vertices of shape-regular meshes.
pub fn vertex_gradients(mesh: &Mesh, values: &[f64]) -> Vec<Point> {
    let mut acc = vec![Point::default(); mesh.n_vertices()];
    let mut weight = vec![0.0_f64; mesh.n_vertices()];
    for t in 0..mesh.n_triangles() {
        let g = mesh.gradient_on(t, values);
        let area = mesh.triangle_area(t);
        for &v in &mesh.triangles()[t] {
            acc[v] = acc[v] + g * area;
            weight[v] += area;
        }
    }
    for (a, w) in acc.iter_mut().zip(&weight) {
        if *w > 0.0 {
            *a = *a * (1.0 / *w);
        }
    }
    acc
}

/// Shared window-resolution rule: the concentration window of physical
/// radius `window` around `center` counts as resolved when ε spans at
/// least three local mesh widths.
pub(crate) fn window_is_resolved(mesh: &Mesh, center: Point, window: f64, epsilon: f64) -> bool {
    let local = mesh
        .local_h_near(center, window.max(epsilon))
        .unwrap_or(mesh.h_max());
    epsilon >= 3.0 * local
}

//! Star-shapedness of the discrete solution about its peak: on a convex
//! domain the expectation is (x − x_p)·∇u(x) < 0 for every x ≠ x_p.  The
//! discrete gradient of a P1 field is constant per triangle, so the sign is
//! tested at every barycenter, with two explicit exclusions where the test
//! is meaningless at finite resolution:
//!
//! * a core ball of radius `core_radius_factor·ε` around the peak, where
//!   the exact inner product vanishes quadratically and the discrete one is
//!   rounding noise, and
//! * a boundary strip, where P1 gradients of a field that vanishes on ∂Ω
//!   carry an O(h) crosswind component.
//!
//! The report also evaluates h(x) = (x − x_p)·∇u + 2u/(p−1) on the core
//! ring; in the concentration limit this quantity approaches
//! −(4μ²|X|²)/(1+μ²|X|²)·(2/(p−1))-scaled values and must be negative.

use crate::geometry::Point;
use crate::solver::SolveReport;

use super::{epsilon_scale, DiagError};

/// One triangle whose gradient fails the star-shape inequality.
#[derive(Debug, Clone)]
pub struct StarViolation {
    pub triangle: usize,
    pub barycenter: Point,
    /// (x_T − x_p)·∇u|_T, which should have been negative.
    pub inner_product: f64,
}

/// Outcome of a star-shapedness scan.
#[derive(Debug, Clone)]
pub struct StarShapeReport {
    /// Every tested triangle with (x_T − x_p)·∇u ≥ 0.
    pub violations: Vec<StarViolation>,
    /// Radius of the excluded core ball (core_radius_factor·ε).
    pub excluded_core_radius: f64,
    /// Width of the excluded boundary strip.
    pub excluded_boundary_width: f64,
    /// (min, max) of h = (x − x_p)·∇u + 2u/(p−1) on the core ring.
    pub h_values_on_ring: (f64, f64),
    /// Number of barycenters actually tested.
    pub tested_triangles: usize,
}

/// Scan all triangle barycenters outside the exclusions for failures of
/// (x − x_p)·∇u < 0, and probe h on the core ring.
///
/// Requires a mesh that still knows its domain (every constructible domain
/// here is convex, but a mesh loaded from disk has no such certificate).
pub fn star_shape_test(
    report: &SolveReport,
    core_radius_factor: f64,
    boundary_width: f64,
) -> Result<StarShapeReport, DiagError> {
    if !(core_radius_factor.is_finite()
        && core_radius_factor > 0.0
        && boundary_width.is_finite()
        && boundary_width >= 0.0)
    {
        return Err(DiagError::InvalidExclusion {
            core_radius_factor,
            boundary_width,
        });
    }
    let mesh = report.solution.mesh();
    if mesh.domain().is_none() {
        return Err(DiagError::ConvexityUnknown);
    }

    let p = report.params.p();
    let x_p = report.max_point;
    let values = report.solution.values();
    let core = core_radius_factor * epsilon_scale(p, report.sup_norm);

    let mut violations = Vec::new();
    let mut tested = 0usize;
    for t in 0..mesh.n_triangles() {
        let b = mesh.triangle_barycenter(t);
        if (b - x_p).norm() <= core || mesh.boundary_distance(b) <= boundary_width {
            continue;
        }
        tested += 1;
        let inner_product = (b - x_p).dot(mesh.gradient_on(t, values));
        if inner_product >= 0.0 {
            violations.push(StarViolation {
                triangle: t,
                barycenter: b,
                inner_product,
            });
        }
    }

    // h on the core ring, probed at 64 angles.
    let mut h_min = f64::INFINITY;
    let mut h_max = f64::NEG_INFINITY;
    for k in 0..64 {
        let angle = k as f64 * std::f64::consts::TAU / 64.0;
        let x = x_p + Point::new(angle.cos(), angle.sin()) * core;
        let Some((t, w)) = mesh.locate(x) else {
            continue;
        };
        let [ia, ib, ic] = mesh.triangles()[t];
        let u = w[0] * values[ia] + w[1] * values[ib] + w[2] * values[ic];
        let h = (x - x_p).dot(mesh.gradient_on(t, values)) + 2.0 / (p - 1.0) * u;
        h_min = h_min.min(h);
        h_max = h_max.max(h);
    }

    Ok(StarShapeReport {
        violations,
        excluded_core_radius: core,
        excluded_boundary_width: boundary_width,
        h_values_on_ring: (h_min, h_max),
        tested_triangles: tested,
    })
}

//! Closed-form objects from the p → ∞ limit analysis.
//!
//! Everything the asymptotic theory predicts in exact form lives here:
//!
//! * the Liouville bubble U_{μ,y}(x) = log(8μ²/(1+μ²|x−y|²)²), the entire
//!   solution of −ΔU = e^U with total mass 8π that the rescaled solutions
//!   converge to (canonical scale μ̄² = 1/8);
//! * the radial mode operators A_k obtained by separating the linearized
//!   limit equation into angular harmonics, together with their bounded
//!   kernel elements ζ₀(r) = (8−r²)/(8+r²) and ζ₁(r) = r/(1+r²/8) — these
//!   exist only for k ≤ 1, which is what nondegeneracy rests on;
//! * the Moser-type test function m_d whose unit-gradient normalization
//!   yields the (p+1)^{-1/2} upper bound on the least-energy level; and
//! * the Robin function R(y) = g(y,y) (regular part of the Green function
//!   on the diagonal), whose critical points locate concentration for λ=0.
//!
//! All formulas carry independent verification in the tests: closed-form
//! masses against numerical quadrature, kernel functions against direct
//! integration of the ODE, and the Moser display against Simpson's rule.

use thiserror::Error;

use crate::geometry::Point;

mod bubble;
mod kernel;
mod moser;
mod robin;

pub use bubble::Bubble;
pub use kernel::{
    kernel_functions, mode_operator_residual, mode_shoot, second_solution_k0, GrowthVerdict,
    RadialMode,
};
pub use moser::{moser_bound, moser_optimal_d, MoserBound};
pub use robin::{robin_function, RobinField};

/// Errors from the limit-theory computations.
#[derive(Debug, Error)]
pub enum LimitError {
    #[error("bubble scale must be positive and finite, got mu = {mu}")]
    InvalidBubble { mu: f64 },
    #[error("radial grid too coarse: step {step} (need ≤ {max_step}) or r_max {r_max} (need ≥ {min_r_max})")]
    GridTooCoarse {
        step: f64,
        max_step: f64,
        r_max: f64,
        min_r_max: f64,
    },
    #[error("radial grid must be uniform from 0; node {index} is {got}, expected {expected}")]
    GridNotUniform {
        index: usize,
        got: f64,
        expected: f64,
    },
    #[error("mode trace for k = {k} must vanish at r = 0, got {value}")]
    ModeNotRegular { k: u32, value: f64 },
    #[error("shoot range too short: r_max = {r_max}, need ≥ {min}")]
    RangeTooShort { r_max: f64, min: f64 },
    #[error("integration blew up at r = {radius}")]
    IntegrationBlewUp { radius: f64 },
    #[error("Moser cutoff requires 0 < d < R, got d = {d}, R = {r}")]
    InvalidMoser { d: f64, r: f64 },
    #[error("Moser bound needs p > 1 and lambda ≥ 0, got p = {p}, lambda = {lambda}")]
    InvalidMoserParams { p: f64, lambda: f64 },
    #[error(
        "Robin sample ({x}, {y}) is {distance} from the boundary; need strictly more than {required}"
    )]
    SampleNearBoundary {
        x: f64,
        y: f64,
        distance: f64,
        required: f64,
    },
    #[error("Robin sample ({x}, {y}) lies outside the mesh")]
    SampleOutside { x: f64, y: f64 },
    #[error("no Robin samples supplied")]
    NoSamples,
    #[error("linear algebra failure in Robin solve: {0}")]
    Sparse(#[from] crate::sparse::SparseError),
}

/// Convenience: squared distance shows up in every bubble formula.
pub(crate) fn dist_sq(a: Point, b: Point) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    dx * dx + dy * dy
}

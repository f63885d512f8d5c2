//! Rescaled-profile comparison for radial solutions.
//!
//! This mirrors the two-dimensional diagnostic field for field: the profile
//! φ(X) = (p−1)·(ln u(εX) − ln a) is sampled at the requested rescaled radii
//! and compared with the limit bubble U(X).  The solution is exactly radial,
//! so one sample per radius (on the positive axis) carries all the
//! information the eight-direction planar sampler gathers.  Values between
//! grid nodes come from cubic Hermite interpolation in t = ln r — the grid
//! stores u and u′, so the interpolant is fourth-order and adds nothing to
//! the discrepancy budget.  The geometric grid starts three decades inside
//! the concentration scale, hence `window_resolved` is structurally true
//! here, unlike on a uniform planar mesh where it must be earned.

use super::shoot::RadialSolution;
use super::OracleError;
use crate::diag::ProfileComparison;
use crate::geometry::Point;
use crate::limit::Bubble;

/// u(r) from the stored trajectory.  Inside the first cell the profile is
/// flat to O((r/ε)⁴) and a quadratic in r matching the Taylor shape is used;
/// beyond it, cubic Hermite in t with the stored slopes u′·r.
fn interpolate(sol: &RadialSolution, r: f64) -> Option<f64> {
    if r > sol.disk_radius {
        return None;
    }
    if r <= sol.grid[1] {
        let ratio = r / sol.grid[1];
        let a = sol.amplitude;
        return Some(a + (sol.values[1] - a) * ratio * ratio);
    }
    let cell = sol.grid.partition_point(|&g| g < r).min(sol.grid.len() - 1);
    let (i, j) = (cell - 1, cell);
    let (t0, t1) = (sol.grid[i].ln(), sol.grid[j].ln());
    let dt = t1 - t0;
    let theta = ((r.ln() - t0) / dt).clamp(0.0, 1.0);
    let (v0, v1) = (sol.values[i], sol.values[j]);
    let (m0, m1) = (
        sol.derivative[i] * sol.grid[i],
        sol.derivative[j] * sol.grid[j],
    );
    let s = 1.0 - theta;
    let h00 = (1.0 + 2.0 * theta) * s * s;
    let h10 = theta * s * s;
    let h01 = theta * theta * (3.0 - 2.0 * theta);
    let h11 = theta * theta * (theta - 1.0);
    Some(h00 * v0 + h10 * dt * m0 + h01 * v1 + h11 * dt * m1)
}

/// Sample the rescaled profile of a radial solution at the given rescaled
/// radii and compare it with the canonical bubble.
pub fn oracle_profile(
    sol: &RadialSolution,
    radii: &[f64],
) -> Result<ProfileComparison, OracleError> {
    for (index, &value) in radii.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(OracleError::InvalidRadius { index, value });
        }
    }
    let epsilon = sol.epsilon();
    let bubble = Bubble::canonical();
    let log_amplitude = sol.amplitude.ln();

    let mut sample_points = vec![Point::default()];
    let mut sample_radii = vec![0.0];
    let mut phi_values = vec![0.0];
    let mut bubble_values = vec![bubble.eval_radial(0.0)];
    let mut dropped = 0usize;

    for &x in radii {
        let u = match interpolate(sol, x * epsilon) {
            Some(u) if u > 0.0 => u.min(sol.amplitude),
            _ => {
                dropped += 1;
                continue;
            }
        };
        sample_points.push(Point::new(x, 0.0));
        sample_radii.push(x);
        phi_values.push((sol.p - 1.0) * (u.ln() - log_amplitude));
        bubble_values.push(bubble.eval_radial(x));
    }

    let sup_discrepancy = phi_values
        .iter()
        .zip(&bubble_values)
        .map(|(phi, b)| (phi - b).abs())
        .fold(0.0, f64::max);

    Ok(ProfileComparison {
        p: sol.p,
        lambda: sol.lambda,
        epsilon,
        sample_points,
        sample_radii,
        phi_values,
        bubble_values,
        sup_discrepancy,
        window_resolved: true,
        dropped_samples: dropped,
    })
}

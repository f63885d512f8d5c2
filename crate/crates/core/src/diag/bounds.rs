//! Scalar asymptotics per solve: the quantities whose boundedness or growth
//! characterizes the large-p regime, one row per report, plus the
//! concentration-window integrals around the peak.
//!
//! Row quantities: ‖u‖_∞ and ‖u‖_∞^{p−1} (the latter must diverge along a
//! p-schedule), c²·p (bounded plateau), p∫u^{p+1} and the H¹ load
//! p(∫|∇u|² + ∫u²) (both bounded), and the Sobolev ratio
//! D_p = ‖u‖_{L^p}/(√p·‖∇u‖_{L²}), whose limsup is (8πe)^{−1/2} ≈ 0.1210.
//!
//! Window quantities at rescaled radius R: the kinetic density
//! F(X) = |∇u(x_p+εX)|²/(‖u‖_∞^{p−1}·u²) (bounded), the Harnack floor
//! min u/‖u‖_∞ over the window (bounded away from zero), and the mass
//! ∫_{B(0,R)} ψ with ψ = (u/‖u‖_∞)^{p−1}, which approaches the bubble mass
//! 8π·μ²R²/(1+μ²R²) with μ² = 1/8.

use crate::geometry::Point;
use crate::limit::Bubble;
use crate::solver::SolveReport;
use crate::sparse::{assemble_mass, assemble_stiffness};

use super::{epsilon_scale, window_is_resolved, DiagError};

/// Radial Simpson intervals over the concentration window.
const WINDOW_RADIAL: usize = 48;
/// Angular samples per circle (periodic trapezoid).
const WINDOW_ANGULAR: usize = 32;

/// One row of the per-p bounds table.
#[derive(Debug, Clone)]
pub struct BoundsRow {
    pub p: f64,
    pub lambda: f64,
    pub sup_norm: f64,
    /// ‖u‖_∞^{p−1}; grows without bound along a p-schedule.
    pub sup_pow_p_minus_1: f64,
    /// c²·p, the scaled least-energy level.
    pub c_squared_p: f64,
    /// p·∫u^{p+1} (lumped quadrature).
    pub p_mass_p_plus_1: f64,
    /// p·(∫|∇u|² + ∫u²), the λ-free H¹ load.
    pub p_h1_energy: f64,
    /// D_p estimate ‖u‖_{L^p}/(√p·‖∇u‖_{L²}).
    pub sobolev_ratio: f64,
}

/// Assemble the bounds table, one row per report.
pub fn bounds_report(reports: &[SolveReport]) -> Result<Vec<BoundsRow>, DiagError> {
    if reports.is_empty() {
        return Err(DiagError::EmptyReportList);
    }
    let mut rows = Vec::with_capacity(reports.len());
    for report in reports {
        let mesh = report.solution.mesh();
        let u = report.solution.values();
        let p = report.params.p();
        let sup = report.sup_norm;
        let stiffness = assemble_stiffness(mesh)?;
        let mass = assemble_mass(mesh, true)?;
        let masses = mass.diag();

        // Sup-factored lumped powers: entries of u/sup are ≤ 1, so the sums
        // cannot overflow no matter how large p gets.
        let power_sum = |expo: f64| -> f64 {
            masses
                .iter()
                .zip(u)
                .map(|(m, &x)| m * (x / sup).powf(expo))
                .sum::<f64>()
        };
        let grad_sq = stiffness.bilinear(u, u);
        let l2_sq = mass.bilinear(u, u);
        let mass_p1 = ((p + 1.0) * sup.ln()).exp() * power_sum(p + 1.0);
        let lp_norm = sup * power_sum(p).powf(1.0 / p);

        rows.push(BoundsRow {
            p,
            lambda: report.params.lambda(),
            sup_norm: sup,
            sup_pow_p_minus_1: ((p - 1.0) * sup.ln()).exp(),
            c_squared_p: report.c_squared * p,
            p_mass_p_plus_1: p * mass_p1,
            p_h1_energy: p * (grad_sq + l2_sq),
            sobolev_ratio: lp_norm / (p.sqrt() * grad_sq.sqrt()),
        });
    }
    Ok(rows)
}

/// Concentration-window integrals of a solve.
#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    pub p: f64,
    pub lambda: f64,
    pub epsilon: f64,
    /// Rescaled window radius R.
    pub window_radius: f64,
    /// max over |X| ≤ R of F = |∇u|²/(‖u‖_∞^{p−1}·u²).
    pub f_max: f64,
    /// min over |X| ≤ R of u/‖u‖_∞.
    pub min_rescaled_u: f64,
    /// ∫_{B(0,R)} ψ dX with ψ = (u/‖u‖_∞)^{p−1}.
    pub psi_mass: f64,
    /// Bubble mass over the same window, 8π·μ²R²/(1+μ²R²).
    pub bubble_window_mass: f64,
    pub window_resolved: bool,
    /// Samples that left Ω or hit a nonpositive interpolant (counted, and
    /// contributing zero to the mass integral).
    pub dropped_samples: usize,
}

/// Sample the concentration window |X| ≤ R on a polar grid (Simpson in
/// radius, trapezoid in angle) and integrate ψ.
pub fn concentration_diagnostics(
    report: &SolveReport,
    window_radius: f64,
) -> Result<ConcentrationReport, DiagError> {
    if !(window_radius.is_finite() && window_radius > 0.0) {
        return Err(DiagError::InvalidWindow {
            radius: window_radius,
        });
    }
    let mesh = report.solution.mesh();
    let values = report.solution.values();
    let p = report.params.p();
    let sup = report.sup_norm;
    let log_sup = sup.ln();
    let x_p = report.max_point;
    let epsilon = epsilon_scale(p, sup);

    let mut f_max = 0.0_f64;
    let mut min_rescaled = 1.0_f64;
    let mut dropped = 0usize;

    // ψ at the center is exactly 1 (u = sup there); F uses the local P1
    // gradient, which is small but nonzero on the peak's star.
    let mut ring_means = Vec::with_capacity(WINDOW_RADIAL + 1);
    ring_means.push(1.0);
    if let Some((t, _)) = mesh.locate(x_p) {
        let g = mesh.gradient_on(t, values).norm();
        if g > 0.0 {
            f_max = (2.0 * g.ln() - (p - 1.0) * log_sup - 2.0 * log_sup).exp();
        }
    }

    for j in 1..=WINDOW_RADIAL {
        let r = window_radius * j as f64 / WINDOW_RADIAL as f64;
        let mut ring_sum = 0.0;
        for k in 0..WINDOW_ANGULAR {
            let angle = k as f64 * std::f64::consts::TAU / WINDOW_ANGULAR as f64;
            let x = x_p + Point::new(angle.cos(), angle.sin()) * (epsilon * r);
            let sample = mesh.locate(x).and_then(|(t, w)| {
                let [ia, ib, ic] = mesh.triangles()[t];
                let u = w[0] * values[ia] + w[1] * values[ib] + w[2] * values[ic];
                (u > 0.0).then(|| (u.min(sup), mesh.gradient_on(t, values).norm()))
            });
            let Some((u, g)) = sample else {
                dropped += 1;
                continue;
            };
            let log_u = u.ln();
            ring_sum += ((p - 1.0) * (log_u - log_sup)).exp();
            min_rescaled = min_rescaled.min(u / sup);
            if g > 0.0 {
                let f = (2.0 * g.ln() - (p - 1.0) * log_sup - 2.0 * log_u).exp();
                f_max = f_max.max(f);
            }
        }
        ring_means.push(ring_sum / WINDOW_ANGULAR as f64);
    }

    // Composite Simpson over r of 2π·r·mean_θ(ψ).
    let step = window_radius / WINDOW_RADIAL as f64;
    let mut psi_mass = 0.0;
    for (j, mean) in ring_means.iter().enumerate() {
        let r = window_radius * j as f64 / WINDOW_RADIAL as f64;
        let w = match j {
            0 => 1.0,
            _ if j == WINDOW_RADIAL => 1.0,
            _ if j % 2 == 1 => 4.0,
            _ => 2.0,
        };
        psi_mass += w * r * mean;
    }
    psi_mass *= std::f64::consts::TAU * step / 3.0;

    Ok(ConcentrationReport {
        p,
        lambda: report.params.lambda(),
        epsilon,
        window_radius,
        f_max,
        min_rescaled_u: min_rescaled,
        psi_mass,
        bubble_window_mass: Bubble::canonical().mass(window_radius),
        window_resolved: window_is_resolved(mesh, x_p, epsilon * window_radius, epsilon),
        dropped_samples: dropped,
    })
}

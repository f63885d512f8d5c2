//! The Moser-type test function and the (p+1)^{-1/2} energy upper bound.
//!
//! On a disk B(0,R) ⊆ Ω the logarithmic cutoff
//!
//!   m_d(x) = (2π)^{-1/2} · { L^{1/2}             for |x| ≤ d,
//!                            L^{-1/2} log(R/|x|)  for d ≤ |x| ≤ R },
//!
//! with L = log(R/d), has ‖∇m_d‖_{L²} = 1 exactly.  Its L^{p+1} mass is
//! bounded below by the plateau contribution I₁ = (L/2π)^{(p+1)/2}·πd²,
//! and the choice d = R·e^{-(p+1)/4} (equivalently L = (p+1)/4) gives
//!
//!   ‖m_d‖²_{L^{p+1}} ≥ (p+1)·(8πe)^{-1}·(πR²)^{2/(p+1)},
//!
//! so the energy quotient of m_d — hence the least-energy level c_{λ,p} —
//! is at most of order (p+1)^{-1/2}.  All three integrals have closed
//! forms, checked against quadrature in the tests.

use super::LimitError;
use std::f64::consts::PI;

/// Closed-form evaluation of the Moser quotient bound.
#[derive(Debug, Clone, Copy)]
pub struct MoserBound {
    /// Upper bound on c_{λ,p} = (inf J_λ)^{1/2}: √((1 + λ‖m‖²)/‖m‖²_{p+1,lower}).
    pub quotient_bound: f64,
    /// ‖∇m_d‖_{L²}, evaluated through the integral formula (must be 1).
    pub gradient_norm: f64,
    /// ‖m_d‖²_{L²} in closed form.
    pub l2_norm_sq: f64,
    /// Lower bound for ‖m_d‖²_{L^{p+1}} from the plateau integral I₁.
    pub lp1_norm_sq_lower: f64,
    /// log I₁ (the plateau integral itself can overflow for huge p).
    pub i1_log: f64,
}

/// The optimal cutoff radius d = R·e^{-(p+1)/4} used in the energy bound.
pub fn moser_optimal_d(r_big: f64, p: f64) -> f64 {
    r_big * (-(p + 1.0) / 4.0).exp()
}

/// Evaluate the Moser test-function bound for quotient J_λ on a disk of
/// radius `r_big` with plateau radius `d`.
pub fn moser_bound(r_big: f64, d: f64, p: f64, lambda: f64) -> Result<MoserBound, LimitError> {
    if !(d.is_finite() && r_big.is_finite() && d > 0.0 && d < r_big) {
        return Err(LimitError::InvalidMoser { d, r: r_big });
    }
    if !(p > 1.0 && lambda >= 0.0) {
        return Err(LimitError::InvalidMoserParams { p, lambda });
    }
    let l = (r_big / d).ln();

    // ‖∇m‖² = (2π)^{-1}·L^{-1}·∫_d^R r^{-2}·2πr dr = L^{-1}·log(R/d).
    let gradient_norm = ((r_big.ln() - d.ln()) / l).sqrt();

    // ∫_d^R log²(R/r)·r dr = (R²/4)(1 − e^{-2L}(1 + 2L + 2L²)).
    let ring = (r_big * r_big / 4.0) * (1.0 - (-2.0 * l).exp() * (1.0 + 2.0 * l + 2.0 * l * l));
    let l2_norm_sq = l * d * d / 2.0 + ring / l;

    // I₁ = (L/2π)^{(p+1)/2}·πd², kept in logs to survive huge p.
    let i1_log = 0.5 * (p + 1.0) * (l / (2.0 * PI)).ln() + (PI * d * d).ln();
    let lp1_norm_sq_lower = (2.0 / (p + 1.0) * i1_log).exp();

    let quotient_bound = ((1.0 + lambda * l2_norm_sq) / lp1_norm_sq_lower).sqrt();
    Ok(MoserBound {
        quotient_bound,
        gradient_norm,
        l2_norm_sq,
        lp1_norm_sq_lower,
        i1_log,
    })
}

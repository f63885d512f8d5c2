//! The Liouville bubble and its mass profile.
//!
//! U_{μ,y}(x) = log(8μ²/(1+μ²|x−y|²)²) solves −ΔU = e^U on the plane with
//! ∫e^U = 8π.  In polar coordinates around y the mass inside radius ρ has
//! the closed form
//!
//!   ∫_{B(y,ρ)} e^U = ∫₀^ρ 8μ²/(1+μ²r²)² · 2πr dr = 8π·μ²ρ²/(1+μ²ρ²),
//!
//! monotone in ρ with half the total mass at the scale radius ρ = 1/μ.
//! The canonical profile appearing in the rescaled limit has μ̄² = 1/8, for
//! which U(0) = 0: the normalization matches φ(0) = 0 of the rescaled
//! solutions.

use super::{dist_sq, LimitError};
use crate::geometry::Point;

/// The two-parameter family of entire Liouville solutions.
///
/// The formulas only ever use μ², so that is what is stored: the canonical
/// instance then has 8μ² = 1 exactly and U(0) = 0 without rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bubble {
    mu_sq: f64,
    center: Point,
}

impl Bubble {
    pub fn new(mu: f64, center: Point) -> Result<Self, LimitError> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(LimitError::InvalidBubble { mu });
        }
        Ok(Bubble {
            mu_sq: mu * mu,
            center,
        })
    }

    /// The canonical limit profile: μ̄² = 1/8 centered at the origin,
    /// normalized so the value at the center is exactly 0.
    pub fn canonical() -> Self {
        Bubble {
            mu_sq: 0.125,
            center: Point::new(0.0, 0.0),
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu_sq.sqrt()
    }

    pub fn center(&self) -> Point {
        self.center
    }

    /// U_{μ,y}(x) = log(8μ²/(1+μ²|x−y|²)²).
    pub fn eval(&self, x: Point) -> f64 {
        (8.0 * self.mu_sq).ln() - 2.0 * (self.mu_sq * dist_sq(x, self.center)).ln_1p()
    }

    /// Radial evaluation U(r) at distance r from the center.
    pub fn eval_radial(&self, r: f64) -> f64 {
        (8.0 * self.mu_sq).ln() - 2.0 * (self.mu_sq * r * r).ln_1p()
    }

    /// ∫_{B(center,radius)} e^U; pass `f64::INFINITY` for the total mass 8π.
    pub fn mass(&self, radius: f64) -> f64 {
        let eight_pi = 8.0 * std::f64::consts::PI;
        if radius.is_infinite() {
            return eight_pi;
        }
        let s = self.mu_sq * radius * radius;
        eight_pi * s / (1.0 + s)
    }
}

//! First Dirichlet eigenvalue of the disk via the Bessel function J₀.
//!
//! The fundamental mode of −Δ on a disk of radius R is J₀(j₀,₁ r/R) with
//! eigenvalue (j₀,₁/R)², where j₀,₁ is the first zero of J₀.  The zero is
//! computed from the power series
//!
//!   J₀(x) = Σ_{m≥0} (−1)^m (x/2)^{2m} / (m!)²
//!
//! by bisection on [2, 3].  The series terms for |x| ≤ 3 shrink faster than
//! (9/4)^m/(m!)², so truncating once a term drops below 1e−18 leaves the
//! partial sum accurate to well beyond the 1e−12 bisection width, and the
//! amplitude-bracketing lower bound (λ + λ₁)^{1/(p−1)} built on top of it
//! inherits full double precision.

use super::OracleError;

/// J₀ by power series; accurate to ~1e−16 for |x| ≤ 3.
fn bessel_j0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..40 {
        term *= -q / ((m * m) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// First zero of J₀, bisected to 1e−12: j₀,₁ ≈ 2.404825557695773.
pub fn bessel_j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    debug_assert!(bessel_j0(lo) > 0.0 && bessel_j0(hi) < 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First Dirichlet eigenvalue λ₁ = (j₀,₁/R)² of the disk of radius R.
pub fn bessel_lambda1(disk_radius: f64) -> Result<f64, OracleError> {
    if !(disk_radius.is_finite() && disk_radius > 0.0) {
        return Err(OracleError::InvalidDiskRadius {
            radius: disk_radius,
        });
    }
    let j = bessel_j0_first_zero();
    Ok((j / disk_radius) * (j / disk_radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, DomainSpec};
    use crate::solver::discrete_lambda1;
    use std::sync::Arc;

    #[test]
    fn first_zero_matches_the_tabulated_value() {
        let j = bessel_j0_first_zero();
        assert!(
            (j - 2.404825557695773).abs() < 1e-11,
            "j₀,₁ = {j} off the tabulated zero"
        );
        let l1 = bessel_lambda1(1.0).unwrap();
        assert!(
            (l1 - 5.783185962946785).abs() < 1e-9,
            "λ₁(disk 1) = {l1}"
        );
    }

    #[test]
    fn radius_scaling_is_exact() {
        let unit = bessel_lambda1(1.0).unwrap();
        let double = bessel_lambda1(2.0).unwrap();
        assert_eq!(double, unit / 4.0, "λ₁ must scale as R⁻² exactly");
    }

    #[test]
    fn fem_eigenvalue_converges_here_at_second_order() {
        // P1 elements approach λ₁ from above at rate h²; halving h should
        // cut the error by ~4, and certainly by 3.
        let exact = bessel_lambda1(1.0).unwrap();
        let mut errors = Vec::new();
        for h in [0.2, 0.1, 0.05] {
            let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), h).unwrap());
            let fem = discrete_lambda1(&mesh).unwrap();
            assert!(fem > exact, "conforming eigenvalue below the true one");
            errors.push(fem - exact);
        }
        for pair in errors.windows(2) {
            assert!(
                pair[1] < pair[0] / 3.0,
                "convergence slower than second order: {errors:?}"
            );
        }
    }

    #[test]
    fn invalid_radii_are_rejected() {
        assert!(bessel_lambda1(0.0).is_err());
        assert!(bessel_lambda1(-1.0).is_err());
        assert!(bessel_lambda1(f64::NAN).is_err());
    }
}

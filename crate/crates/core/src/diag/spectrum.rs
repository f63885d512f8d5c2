//! Linearized spectrum at a discrete solution: the pencil
//!
//!   (K + λM_L − p·M_L·diag(u^{p−1})) v  =  μ · M_L v
//!
//! restricted to interior vertices.  Least-energy solutions are expected to
//! have exactly one negative eigenvalue (Morse index one), and away from
//! degenerate parameters no eigenvalue at zero.  The negative count comes
//! from the inertia of an LDLᵀ factorization — an exact census, immune to
//! the truncation of the computed eigenvalue list — while the smallest
//! magnitudes come from the shift-invert subspace iteration.

use crate::solver::SolveReport;
use crate::sparse::{
    assemble_mass, assemble_stiffness, inertia_below, smallest_eigenpairs, InteriorMap,
    SparseOperator,
};

use super::DiagError;

/// How many pairs to examine for the gap threshold, whatever `k` was asked.
const GAP_DEPTH: usize = 10;
/// Eigenpair backward-error tolerance, relative to the operator scale: the
/// potential term grows like p·‖u‖_∞^{p−1}, so an absolute tolerance would
/// silently tighten by orders of magnitude as p increases.
const PAIR_TOL: f64 = 1e-9;

/// Spectral census of the linearized operator at a solution.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// The `k` smallest pencil eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Exact number of negative pencil eigenvalues (LDLᵀ inertia at 0).
    pub negative_count: usize,
    /// Smallest |μ| among the computed eigenvalues.
    pub min_abs_eigenvalue: f64,
    /// Degeneracy gate: |10th smallest eigenvalue| × 10⁻³, reported so the
    /// flag below can be recalibrated by the caller.
    pub gap_threshold: f64,
    /// negative_count == 1.
    pub morse_index_ok: bool,
    /// min_abs_eigenvalue > gap_threshold.
    pub nondegenerate_ok: bool,
}

/// Interior-reduced pencil (A, B) of the linearization at `report`.
pub(crate) fn linearized_pencil(
    report: &SolveReport,
) -> Result<(SparseOperator, SparseOperator, InteriorMap), DiagError> {
    let mesh = report.solution.mesh();
    let p = report.params.p();
    let lambda = report.params.lambda();
    let u = report.solution.values();

    let stiffness = assemble_stiffness(mesh)?;
    let mass = assemble_mass(mesh, true)?;
    let weighted: Vec<f64> = mass
        .diag()
        .iter()
        .zip(u)
        .map(|(m, &x)| m * p * x.powf(p - 1.0))
        .collect();
    let h_full = stiffness
        .add_scaled(lambda, &mass)
        .add_scaled(-1.0, &SparseOperator::diagonal(&weighted));

    let map = InteriorMap::new(mesh);
    let a = map.reduce_operator(&h_full);
    let b = map.reduce_operator(&mass);
    Ok((a, b, map))
}

/// Compute the `k` smallest eigenvalues of the linearization together with
/// the exact negative count and the degeneracy flags.
pub fn linearized_spectrum(report: &SolveReport, k: usize) -> Result<SpectrumReport, DiagError> {
    let (a, b, _) = linearized_pencil(report)?;
    let negative_count = inertia_below(&a, &b, 0.0)?;
    let tol = PAIR_TOL * (1.0 + a.max_abs());
    let pairs = smallest_eigenpairs(&a, &b, k.max(GAP_DEPTH), tol)?;
    let eigenvalues: Vec<f64> = pairs.iter().take(k).map(|p| p.value).collect();
    let min_abs_eigenvalue = pairs
        .iter()
        .map(|p| p.value.abs())
        .fold(f64::INFINITY, f64::min);
    let gap_threshold = pairs
        .last()
        .map_or(0.0, |p| p.value.abs() * 1e-3);
    Ok(SpectrumReport {
        eigenvalues,
        negative_count,
        min_abs_eigenvalue,
        gap_threshold,
        morse_index_ok: negative_count == 1,
        nondegenerate_ok: min_abs_eigenvalue > gap_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::testutil::{coarse_disk_report, square_report};
    use crate::mesh::{build_mesh, DomainSpec};
    use crate::solver::{default_init, minimize, ProblemParams};
    use std::sync::Arc;

    #[test]
    fn least_energy_solutions_have_morse_index_one() {
        let (_, report) = coarse_disk_report();
        let spectrum = linearized_spectrum(report, 6).unwrap();
        assert_eq!(
            spectrum.negative_count, 1,
            "index ≠ 1: eigenvalues {:?}",
            spectrum.eigenvalues
        );
        assert!(spectrum.morse_index_ok);
        assert_eq!(spectrum.eigenvalues.len(), 6);
        for pair in spectrum.eigenvalues.windows(2) {
            assert!(pair[0] <= pair[1], "eigenvalues not ascending");
        }
        assert_eq!(
            spectrum.eigenvalues.iter().filter(|v| **v < 0.0).count(),
            1,
            "listed negatives disagree with the inertia census"
        );
        assert!(
            spectrum.nondegenerate_ok,
            "min |μ| = {} under gap {}",
            spectrum.min_abs_eigenvalue, spectrum.gap_threshold
        );
    }

    #[test]
    fn square_spectrum_shares_the_census() {
        let (_, report) = square_report();
        let spectrum = linearized_spectrum(report, 6).unwrap();
        assert_eq!(spectrum.negative_count, 1);
        assert!(spectrum.eigenvalues[1] > 0.0, "second eigenvalue negative");
        assert!(spectrum.nondegenerate_ok);
    }

    #[test]
    fn stationarity_links_the_pencil_to_the_solved_system() {
        // Replacing the linearization weight p by 1 turns the operator into
        // K + λM − M·diag(u^{p−1}), which annihilates u itself: that is the
        // solved system restated, so the residual must sit at solver scale.
        let (mesh, report) = coarse_disk_report();
        let u = report.solution.values();
        let p = report.params.p();
        let stiffness = crate::sparse::assemble_stiffness(mesh).unwrap();
        let mass = crate::sparse::assemble_mass(mesh, true).unwrap();
        let weighted: Vec<f64> = mass
            .diag()
            .iter()
            .zip(u)
            .map(|(m, &x)| m * x.powf(p - 1.0))
            .collect();
        let op = stiffness
            .add_scaled(report.params.lambda(), &mass)
            .add_scaled(-1.0, &SparseOperator::diagonal(&weighted));
        let r = op.matvec(u);
        let scale = mass
            .diag()
            .iter()
            .zip(u)
            .map(|(m, &x)| (m * x.powf(p)).powi(2))
            .sum::<f64>()
            .sqrt();
        let err = r
            .iter()
            .enumerate()
            .filter(|(i, _)| !mesh.boundary()[*i])
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt();
        assert!(
            err / scale < 1e-8,
            "restated system residual {} above solver scale",
            err / scale
        );
    }

    #[test]
    fn negative_direction_is_signed_like_the_ground_state() {
        let (_, report) = coarse_disk_report();
        let (a, b, map) = linearized_pencil(report).unwrap();
        let tol = PAIR_TOL * (1.0 + a.max_abs());
        let pairs = smallest_eigenpairs(&a, &b, 3, tol).unwrap();
        assert!(pairs[0].value < 0.0, "lowest eigenvalue not negative");
        let full = map.extend_vector(&pairs[0].vector);
        let peak = full
            .iter()
            .fold(0.0_f64, |m, v| if v.abs() > m.abs() { *v } else { m });
        let sign = peak.signum();
        let rogue = full
            .iter()
            .filter(|v| v.signum() == -sign && v.abs() > 1e-8 * peak.abs())
            .count();
        assert_eq!(
            rogue, 0,
            "negative-direction eigenvector changes sign away from noise level"
        );
    }

    #[test]
    fn mild_exponent_keeps_one_negative_eigenvalue_and_a_positive_second() {
        // Near p = 1 the linearization tends to −Δ − λ₁ (λ = 0): a single
        // slightly negative direction and a solidly positive second mode.
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.15).unwrap());
        let params = ProblemParams::new(0.0, 1.5).unwrap();
        let init = default_init(&mesh).unwrap();
        let report = minimize(&params, &mesh, &init, 1e-9).unwrap();
        let spectrum = linearized_spectrum(&report, 4).unwrap();
        assert_eq!(spectrum.negative_count, 1);
        assert!(
            spectrum.eigenvalues[0] < 0.0 && spectrum.eigenvalues[1] > 0.0,
            "expected a sign change between the first two eigenvalues, got {:?}",
            spectrum.eigenvalues
        );
    }
}

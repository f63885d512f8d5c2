//! Angular-momentum blocks of the linearized operator at a radial solution.
//!
//! In polar coordinates the linearization −Δ + λ − p·u^{p−1} commutes with
//! rotations and splits over the harmonics e^{ikθ} into radial blocks
//!
//!   Lₖ = −d²/dr² − (1/r)·d/dr + k²/r² + λ − p·u^{p−1},
//!
//! self-adjoint in L²(r dr) on (0, R) with a Dirichlet condition at R.  The
//! union of their spectra is the spectrum of the planar operator, so the
//! negative census over blocks is the Morse index.  Each block is
//! discretized with P1 elements in the weighted space on the shoot grid
//! itself — the geometric spacing that resolved the collapsing peak during
//! integration is exactly what the deep potential well needs here.  The
//! singular centrifugal term is lumped with k²/r² evaluated at cell
//! centers, which stay strictly positive however fine the grid; for k ≥ 1
//! the axis node is clamped (regular profiles vanish like rᵏ), while k = 0
//! keeps it free, the discrete form of the regularity condition u′(0) = 0.
//!
//! Differentiating the radial equation shows L₁u′ = 0 in the interior, so
//! the k = 1 block carries an eigenvalue only a boundary defect away from
//! zero whose eigenfunction is u′ — the finite-p shadow of the translation
//! kernel ζ₁.  It is genuinely positive but far below the first rotational
//! domain mode, which is why the degeneracy gate here is scaled by the
//! *second*-smallest magnitude: the planar rule (tenth eigenvalue × 10⁻³)
//! would misfire on one-dimensional blocks, whose tenth eigenvalue already
//! sits three orders of magnitude up the Weyl ladder.

use super::shoot::RadialSolution;
use super::OracleError;
use crate::diag::SpectrumReport;
use crate::sparse::{inertia_below, smallest_eigenpairs, EigenPair, SparseOperator};

/// Compute at least this many pairs so the degeneracy gate has context.
const GAP_DEPTH: usize = 10;

/// Residual tolerance scale for an eigenpair, relative to the largest
/// matrix entry (the potential well deepens like p·a^{p−1}).
const PAIR_TOL: f64 = 1e-9;

/// Largest admissible log-step over the core region (r ≤ 32ε); beyond this
/// the well is aliased and the census meaningless.
const COARSE_LIMIT: f64 = 0.2;

/// The first interior node must sit this deep inside the concentration
/// scale, bounding the lumped hole around the axis.
const HOLE_FACTOR: f64 = 0.1;

/// λ − p·u^{p−1} at every node, the power in the log domain: near the core
/// p and u^{p−1} separately overflow while the matrix entry they produce is
/// tame once multiplied by the cell mass.
fn potential(sol: &RadialSolution) -> Vec<f64> {
    let log_p = sol.p.ln();
    sol.values
        .iter()
        .map(|&u| {
            if u > 0.0 {
                sol.lambda - (log_p + (sol.p - 1.0) * u.ln()).exp()
            } else {
                sol.lambda
            }
        })
        .collect()
}

/// Assemble the P1 pencil (A, B) of the block Lₖ.  Dirichlet at the
/// boundary node always; at the axis node only for k ≥ 1.
fn block_pencil(sol: &RadialSolution, k: usize, pot: &[f64]) -> (SparseOperator, SparseOperator) {
    let boundary = sol.grid.len() - 1;
    let offset = usize::from(k > 0);
    let n_dof = boundary - offset;
    let dof = |node: usize| -> Option<usize> {
        (node >= offset && node < boundary).then(|| node - offset)
    };

    let mut a_diag = vec![0.0; n_dof];
    let mut b_diag = vec![0.0; n_dof];
    let mut triplets = Vec::with_capacity(3 * n_dof);
    for cell in 0..boundary {
        let (r0, r1) = (sol.grid[cell], sol.grid[cell + 1]);
        let len = r1 - r0;
        let rc = 0.5 * (r0 + r1);
        let half_mass = 0.5 * rc * len;
        let stiff = rc / len;
        let centrifugal = (k * k) as f64 / (rc * rc);
        for node in [cell, cell + 1] {
            if let Some(d) = dof(node) {
                a_diag[d] += stiff + half_mass * (pot[node] + centrifugal);
                b_diag[d] += half_mass;
            }
        }
        if let (Some(d0), Some(d1)) = (dof(cell), dof(cell + 1)) {
            triplets.push((d0, d1, -stiff));
            triplets.push((d1, d0, -stiff));
        }
    }
    for (d, &v) in a_diag.iter().enumerate() {
        triplets.push((d, d, v));
    }
    (
        SparseOperator::from_triplets(n_dof, &triplets),
        SparseOperator::diagonal(&b_diag),
    )
}

/// Reject grids that cannot see the collapsed well: the hole around the
/// axis must end inside ε/10 and no core cell may span more than
/// `COARSE_LIMIT` in log radius.
fn check_resolution(sol: &RadialSolution) -> Result<(), OracleError> {
    let eps = sol.epsilon();
    let mut worst = (sol.grid[1] / (HOLE_FACTOR * eps)).ln();
    for cell in 1..sol.grid.len() - 1 {
        if sol.grid[cell + 1] <= 32.0 * eps {
            worst = worst.max((sol.grid[cell + 1] / sol.grid[cell]).ln());
        }
    }
    if worst > COARSE_LIMIT {
        return Err(OracleError::GridTooCoarse {
            first_node: worst,
            limit: COARSE_LIMIT,
        });
    }
    Ok(())
}

/// Spectra of the blocks L₀, …, L_{k_max}: for each block the `n_eigs`
/// smallest eigenvalues, the exact negative count from LDLᵀ inertia, and
/// the degeneracy flags.  `morse_index_ok` records whether the block
/// matches the least-energy census — one negative eigenvalue in k = 0,
/// none elsewhere.
pub fn radial_linearized_modes(
    sol: &RadialSolution,
    k_max: usize,
    n_eigs: usize,
) -> Result<Vec<SpectrumReport>, OracleError> {
    let nodes = sol.grid.len();
    let depth = n_eigs.max(GAP_DEPTH);
    if n_eigs == 0 || nodes < depth + 6 {
        return Err(OracleError::InvalidModeRequest {
            k_max,
            n_eigs,
            nodes,
        });
    }
    check_resolution(sol)?;
    let pot = potential(sol);

    let mut reports = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let (a, b) = block_pencil(sol, k, &pot);
        let tol = PAIR_TOL * (1.0 + a.max_abs());
        let pairs: Vec<EigenPair> = smallest_eigenpairs(&a, &b, depth, tol)?;
        let negative_count = inertia_below(&a, &b, 0.0)?;
        let mut magnitudes: Vec<f64> = pairs.iter().map(|p| p.value.abs()).collect();
        magnitudes.sort_by(f64::total_cmp);
        let min_abs_eigenvalue = magnitudes[0];
        let gap_threshold = magnitudes.get(1).copied().unwrap_or(0.0) * 1e-3;
        let expected_negatives = usize::from(k == 0);
        reports.push(SpectrumReport {
            eigenvalues: pairs.iter().take(n_eigs).map(|p| p.value).collect(),
            negative_count,
            min_abs_eigenvalue,
            gap_threshold,
            morse_index_ok: negative_count == expected_negatives,
            nondegenerate_ok: min_abs_eigenvalue > gap_threshold,
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::super::testutil::cached_shoot;
    use super::*;
    use crate::limit::kernel_functions;

    #[test]
    fn census_matches_the_mountain_pass_structure() {
        let sol = cached_shoot(50.0, 0.0);
        let reports = radial_linearized_modes(sol, 2, 4).unwrap();
        assert_eq!(reports.len(), 3);
        assert_eq!(
            reports[0].negative_count, 1,
            "k = 0 must carry exactly one negative eigenvalue: {:?}",
            reports[0].eigenvalues
        );
        for (k, report) in reports.iter().enumerate().skip(1) {
            assert_eq!(
                report.negative_count, 0,
                "k = {k} must be nonnegative: {:?}",
                report.eigenvalues
            );
            assert!(report.eigenvalues[0] > 0.0);
        }
        assert!(reports.iter().all(|r| r.morse_index_ok));
        let total: usize = reports.iter().map(|r| r.negative_count).sum();
        assert_eq!(total, 1, "Morse index across blocks");
    }

    #[test]
    fn blocks_report_ascending_eigenvalues_and_consistent_flags() {
        let sol = cached_shoot(50.0, 0.0);
        let reports = radial_linearized_modes(sol, 1, 6).unwrap();
        for report in &reports {
            assert_eq!(report.eigenvalues.len(), 6);
            for pair in report.eigenvalues.windows(2) {
                assert!(pair[0] <= pair[1], "eigenvalues not ascending");
            }
            assert!(report.nondegenerate_ok, "spurious degeneracy flagged");
            assert!(report.min_abs_eigenvalue > 0.0);
        }
    }

    #[test]
    fn translation_mode_overlaps_the_kernel() {
        // The lowest k = 1 eigenfunction, rescaled by ε, is the bounded
        // kernel element ζ₁ of the limit operator.
        let sol = cached_shoot(100.0, 0.0);
        let pot = potential(sol);
        let (a, b) = block_pencil(sol, 1, &pot);
        let tol = PAIR_TOL * (1.0 + a.max_abs());
        let pairs = smallest_eigenpairs(&a, &b, 1, tol).unwrap();
        let psi = &pairs[0].vector;
        assert!(
            pairs[0].value > 0.0,
            "near-kernel eigenvalue {} must be positive",
            pairs[0].value
        );

        let eps = sol.epsilon();
        let weights = b.diag().to_vec();
        let mut num = 0.0;
        let mut norm_psi = 0.0;
        let mut norm_zeta = 0.0;
        for (d, &w) in weights.iter().enumerate() {
            let zeta = kernel_functions(sol.grid[d + 1] / eps).1;
            num += w * psi[d] * zeta;
            norm_psi += w * psi[d] * psi[d];
            norm_zeta += w * zeta * zeta;
        }
        let overlap = num.abs() / (norm_psi * norm_zeta).sqrt();
        assert!(
            overlap >= 0.99,
            "k = 1 ground mode overlap with ζ₁ is only {overlap}"
        );
    }

    #[test]
    fn coarse_grids_are_rejected() {
        let sol = cached_shoot(50.0, 0.0);
        let stride = 2000;
        let decimated = RadialSolution {
            p: sol.p,
            lambda: sol.lambda,
            disk_radius: sol.disk_radius,
            amplitude: sol.amplitude,
            grid: sol.grid.iter().copied().step_by(stride).collect(),
            values: sol.values.iter().copied().step_by(stride).collect(),
            derivative: sol.derivative.iter().copied().step_by(stride).collect(),
        };
        match radial_linearized_modes(&decimated, 1, 2) {
            Err(OracleError::GridTooCoarse { .. }) => {}
            other => panic!("expected a coarseness rejection, got {other:?}"),
        }
    }

    #[test]
    fn empty_requests_are_rejected() {
        let sol = cached_shoot(50.0, 0.0);
        assert!(matches!(
            radial_linearized_modes(sol, 2, 0),
            Err(OracleError::InvalidModeRequest { .. })
        ));
    }
}

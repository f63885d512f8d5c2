//! Smallest eigenpairs of the generalized symmetric pencil (A, B).
//!
//! The solver is inverse subspace iteration with *inertia-certified* shifts:
//! a shift σ is only used after an LDLᵀ factorization of A − σB confirms
//! (via Sylvester's law of inertia) that the number of pencil eigenvalues
//! below σ equals the number of Ritz pairs already converged below σ.
//! This makes the method robust for the two regimes the library needs:
//!
//! * B-SPD Laplace-type pencils, where σ = 0 already has inertia 0 and a
//!   single factorization suffices, and
//! * strongly indefinite linearized operators whose lowest eigenvalue can
//!   sit many orders of magnitude below the rest of the spectrum, where the
//!   solver first brackets λ₁ by bisection on the inertia count so that the
//!   inverse operator actually magnifies the wanted end of the spectrum.
//!
//! Each iteration solves up to m = k + 4 envelope systems, B-orthonormalizes
//! the block (modified Gram–Schmidt with one reorthogonalization pass), and
//! extracts Ritz pairs with a dense cyclic Jacobi eigensolver.  Stagnation
//! triggers a Rayleigh-quotient-style reshift, again certified by inertia
//! before adoption, so no eigenvalue below the targets can be skipped.
//!
//! Converged pairs are locked: frozen and deflated out of the iterated
//! block.  Without locking, a reshift past the midpoint between a converged
//! eigenvalue and the next target turns the inverse map into a *repellor*
//! for the converged direction and silently expels it from the block.

use super::{SkylineLdlt, SparseError, SparseOperator};

/// A converged eigenpair of the pencil (A, B).
///
/// The vector is B-normalized (‖v‖_B = 1) and `residual` is the verified
/// backward error ‖Av − λBv‖₂ / ‖v‖₂.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// Number of pencil eigenvalues of (A, B) strictly below `sigma`,
/// counted as the negative pivots of an LDLᵀ factorization of A − σB.
pub fn inertia_below(
    a: &SparseOperator,
    b: &SparseOperator,
    sigma: f64,
) -> Result<usize, SparseError> {
    let shifted = a.add_scaled(-sigma, b);
    Ok(SkylineLdlt::factor(&shifted)?.negative_pivots())
}

/// Deterministic pseudo-random value in [-1/2, 1/2) from an index.
fn hashed_unit(idx: u64) -> f64 {
    let mut z = idx
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Eigen-decomposition of a small dense symmetric matrix by cyclic Jacobi.
/// Returns values ascending and the matching orthonormal eigenvectors
/// (`vecs[j]` is the eigenvector for `values[j]`).
fn dense_sym_eigen(s: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = s.len();
    let mut a: Vec<Vec<f64>> = s.to_vec();
    let mut q: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let fro = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..m {
            for j in (i + 1)..m {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= 1e-15 * fro {
            break;
        }
        for p in 0..m {
            for r in (p + 1)..m {
                let apr = a[p][r];
                if apr.abs() <= 1e-300 {
                    continue;
                }
                let tau = (a[r][r] - a[p][p]) / (2.0 * apr);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for i in 0..m {
                    let (ap, ar) = (a[i][p], a[i][r]);
                    a[i][p] = c * ap - sn * ar;
                    a[i][r] = sn * ap + c * ar;
                }
                for i in 0..m {
                    let (ap, ar) = (a[p][i], a[r][i]);
                    a[p][i] = c * ap - sn * ar;
                    a[r][i] = sn * ap + c * ar;
                }
                for row in q.iter_mut() {
                    let (qp, qr) = (row[p], row[r]);
                    row[p] = c * qp - sn * qr;
                    row[r] = sn * qp + c * qr;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap().then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let vecs: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..m).map(|i| q[i][j]).collect())
        .collect();
    (values, vecs)
}

/// Upper bound on |λ| for the pencil (A, B) via a Gershgorin-type estimate
/// that uses B's diagonal dominance margin as the denominator.
fn pencil_bound(a: &SparseOperator, b: &SparseOperator) -> f64 {
    let n = a.dimension();
    let mut worst = 0.0f64;
    for i in 0..n {
        let row_sum: f64 = a.row(i).1.iter().map(|v| v.abs()).sum();
        let (cols, vals) = b.row(i);
        let mut diag = 0.0;
        let mut off = 0.0;
        for (&j, &v) in cols.iter().zip(vals) {
            if j == i {
                diag = v;
            } else {
                off += v.abs();
            }
        }
        let margin = diag - off;
        let denom = if margin > 1e-300 {
            margin
        } else {
            diag.abs().max(1e-300) * 1e-3
        };
        worst = worst.max(row_sum / denom);
    }
    worst.max(1e-6)
}

const FACT_CAP: usize = 48;
const INNER_CAP: usize = 1200;
const ERA_CAP: usize = 45;

struct Shifted<'a> {
    a: &'a SparseOperator,
    b: &'a SparseOperator,
    factorizations: usize,
}

impl Shifted<'_> {
    /// Factor A − σB, nudging σ downward on a singular pivot.  Returns the
    /// factorization together with the shift actually used.
    fn factor(&mut self, sigma: f64) -> Result<(SkylineLdlt, f64), SparseError> {
        let mut s = sigma;
        let mut last = None;
        for attempt in 0..4u32 {
            self.factorizations += 1;
            let shifted = self.a.add_scaled(-s, self.b);
            if std::env::var_os("BB_EIGEN_TRACE").is_some() {
                eprintln!(
                    "factor sigma {s:e} scale {:e} a_max {:e}",
                    shifted.max_abs(),
                    self.a.max_abs()
                );
            }
            match SkylineLdlt::factor(&shifted) {
                Ok(f) => return Ok((f, s)),
                Err(e @ SparseError::SingularPivot { .. }) => {
                    if std::env::var_os("BB_EIGEN_TRACE").is_some() {
                        eprintln!("  -> singular: {e}");
                    }
                    last = Some(e);
                    s -= (1.0 + s.abs()) * 1e-7 * f64::from(1u32 << attempt);
                }
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap())
    }
}

/// The `k` smallest eigenpairs of the generalized pencil (A, B), B SPD,
/// in ascending order.  Values may be negative; `tol` bounds each pair's
/// residual ‖Av − λBv‖₂ / ‖v‖₂.
pub fn smallest_eigenpairs(
    a: &SparseOperator,
    b: &SparseOperator,
    k: usize,
    tol: f64,
) -> Result<Vec<EigenPair>, SparseError> {
    let n = a.dimension();
    if b.dimension() != n {
        return Err(SparseError::DimensionMismatch {
            expected: n,
            got: b.dimension(),
        });
    }
    if k >= n {
        return Err(SparseError::TooManyPairs { k, dimension: n });
    }
    if k == 0 {
        return Ok(Vec::new());
    }

    let m = (k + 4).min(n);
    let mut sh = Shifted {
        a,
        b,
        factorizations: 0,
    };

    // Establish a shift with certified inertia 0 (below the whole spectrum
    // of interest).  σ = 0 works directly for SPD pencils.
    let (mut fact, mut sigma) = sh.factor(0.0)?;
    if fact.negative_pivots() > 0 {
        let bound = pencil_bound(a, b);
        let mut lo = -(bound * 1.000_000_1 + 1e-9);
        let mut certified: Option<(SkylineLdlt, f64)> = None;
        for _ in 0..3 {
            let (f, s) = sh.factor(lo)?;
            if f.negative_pivots() == 0 {
                certified = Some((f, s));
                break;
            }
            lo *= 8.0;
        }
        let (mut lf, mut ls) = certified.ok_or(SparseError::EigenStalled {
            unconverged: k,
            k,
            factorizations: sh.factorizations,
            residual: f64::INFINITY,
        })?;
        // Tighten the bracket around λ₁ so the inverse operator has useful
        // contrast; a loose (factor ~2) bracket is enough.
        let mut hi = sigma;
        while hi - ls > 0.5 * ls.abs().max(hi.abs()).max(1e-8)
            && sh.factorizations < FACT_CAP / 2
        {
            let mid = 0.5 * (ls + hi);
            let (f, s) = sh.factor(mid)?;
            if f.negative_pivots() == 0 {
                lf = f;
                ls = s;
            } else {
                hi = s;
            }
        }
        fact = lf;
        sigma = ls;
    }

    // Active block; converged pairs move to `locked` (B-images cached for
    // deflation) and the block shrinks, keeping the guard columns intact.
    let mut x: Vec<Vec<f64>> = (0..m)
        .map(|j| (0..n).map(|i| hashed_unit((j * n + i) as u64)).collect())
        .collect();
    let mut locked: Vec<EigenPair> = Vec::new();
    let mut b_locked: Vec<Vec<f64>> = Vec::new();
    let mut theta: Vec<f64> = Vec::new();
    let mut resid: Vec<f64> = Vec::new();
    let mut total_inner = 0usize;

    'eras: loop {
        let mut hist: Vec<f64> = Vec::new();
        while total_inner < INNER_CAP && hist.len() < ERA_CAP {
            total_inner += 1;
            let ma = x.len();

            // Inverse step y_j = (A − σB)⁻¹ B x_j on the active block.
            let mut y: Vec<Vec<f64>> = x.iter().map(|xj| fact.solve(&b.matvec(xj))).collect();

            // Deflate locked directions, then B-orthonormalize the block
            // (MGS, two projection passes).
            let mut by: Vec<Vec<f64>> = Vec::with_capacity(ma);
            for j in 0..ma {
                let mut fresh = 0u64;
                loop {
                    let (head, tail) = y.split_at_mut(j);
                    let yj = &mut tail[0];
                    for _pass in 0..2 {
                        for (bl, pair) in b_locked.iter().zip(&locked) {
                            let c = dot(bl, yj);
                            for (t, s) in yj.iter_mut().zip(&pair.vector) {
                                *t -= c * s;
                            }
                        }
                        for (l, byl) in by.iter().enumerate() {
                            let c = dot(byl, yj);
                            for (t, s) in yj.iter_mut().zip(&head[l]) {
                                *t -= c * s;
                            }
                        }
                    }
                    let byj = b.matvec(yj);
                    let nb = dot(&byj, yj);
                    if nb.is_finite() && nb > 1e-280 {
                        let inv = 1.0 / nb.sqrt();
                        for t in yj.iter_mut() {
                            *t *= inv;
                        }
                        by.push(byj.iter().map(|v| v * inv).collect());
                        break;
                    }
                    if fresh >= 2 {
                        return Err(SparseError::EigenStalled {
                            unconverged: k - locked.len(),
                            k,
                            factorizations: sh.factorizations,
                            residual: f64::INFINITY,
                        });
                    }
                    fresh += 1;
                    for (i, t) in yj.iter_mut().enumerate() {
                        *t = hashed_unit(
                            ((j + m * total_inner) as u64)
                                .wrapping_mul(0x1000_0001)
                                .wrapping_add(i as u64)
                                .wrapping_add(fresh << 48),
                        );
                    }
                }
            }

            // Rayleigh–Ritz on the active block.
            let ay: Vec<Vec<f64>> = y.iter().map(|yj| a.matvec(yj)).collect();
            let mut s = vec![vec![0.0f64; ma]; ma];
            for i in 0..ma {
                for j in i..ma {
                    let v = 0.5 * (dot(&y[i], &ay[j]) + dot(&y[j], &ay[i]));
                    s[i][j] = v;
                    s[j][i] = v;
                }
            }
            let (values, q) = dense_sym_eigen(&s);
            theta = values;
            let rotate = |cols: &[Vec<f64>]| -> Vec<Vec<f64>> {
                (0..ma)
                    .map(|j| {
                        let mut out = vec![0.0f64; n];
                        for (l, col) in cols.iter().enumerate() {
                            let w = q[j][l];
                            if w != 0.0 {
                                for (o, c) in out.iter_mut().zip(col) {
                                    *o += w * c;
                                }
                            }
                        }
                        out
                    })
                    .collect()
            };
            x = rotate(&y);
            let axr = rotate(&ay);
            let mut bxr = rotate(&by);
            resid = (0..ma)
                .map(|j| {
                    let mut rr = 0.0f64;
                    let mut xx = 0.0f64;
                    for i in 0..n {
                        let r = axr[j][i] - theta[j] * bxr[j][i];
                        rr += r * r;
                        xx += x[j][i] * x[j][i];
                    }
                    rr.sqrt() / xx.sqrt().max(1e-300)
                })
                .collect();

            // Lock the converged leading pairs; they are the smallest
            // remaining eigenvalues because σ is certified below them all.
            while locked.len() < k && !resid.is_empty() && resid[0] <= tol {
                locked.push(EigenPair {
                    value: theta.remove(0),
                    vector: x.remove(0),
                    residual: resid.remove(0),
                });
                b_locked.push(bxr.remove(0));
                hist.clear();
            }
            if locked.len() == k {
                locked.sort_by(|u, v| u.value.partial_cmp(&v.value).unwrap());
                return Ok(locked);
            }

            hist.push(resid[0]);
            let len = hist.len();
            if len >= 8 && hist[len - 1] > 0.25 * hist[len - 8] {
                break; // stagnating: reshift
            }
        }

        if total_inner >= INNER_CAP || sh.factorizations >= FACT_CAP {
            return Err(SparseError::EigenStalled {
                unconverged: k - locked.len(),
                k,
                factorizations: sh.factorizations,
                residual: resid.first().copied().unwrap_or(f64::INFINITY),
            });
        }

        // Reshift near the first unconverged Ritz value, certified by
        // inertia so no eigenvalue below the targets can be skipped.  Ritz
        // values overestimate their targets, so a candidate right below
        // θ[0] often still has an extra eigenvalue underneath and fails
        // certification; starting from the midpoint between the top locked
        // value and θ[0] certifies far more often.
        let gap = if theta.len() > 1 {
            (theta[1] - theta[0]).max(0.0)
        } else {
            0.0
        };
        let delta = 0.05 * gap.max(theta[0].abs() * 1e-3).max(1e-9 * (1.0 + theta[0].abs()));
        let mut candidate = theta[0] - delta;
        if let Some(top) = locked.iter().map(|p| p.value).fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        }) {
            let midpoint = 0.5 * (top + theta[0]);
            if midpoint > sigma && midpoint < candidate {
                candidate = midpoint;
            }
        }
        if candidate <= sigma {
            continue 'eras; // no useful move; keep iterating at current shift
        }
        for _ in 0..5 {
            if sh.factorizations >= FACT_CAP {
                continue 'eras;
            }
            let (f, s) = sh.factor(candidate)?;
            let expected = locked.iter().filter(|p| p.value < s).count();
            if f.negative_pivots() == expected {
                fact = f;
                sigma = s;
                continue 'eras;
            }
            candidate = 0.5 * (sigma + candidate);
        }
        // Certification kept failing: fall back to the old shift.
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, refine, DomainSpec, GradingSpec, RefineOptions};
    use crate::sparse::{assemble_mass, assemble_stiffness, InteriorMap};

    /// Interior stiffness and mass for a domain at resolution h.
    fn dirichlet_pencil(
        spec: &DomainSpec,
        h: f64,
        lumped: bool,
    ) -> (SparseOperator, SparseOperator) {
        let mesh = build_mesh(spec, h).unwrap();
        let map = InteriorMap::new(&mesh);
        let k = map.reduce_operator(&assemble_stiffness(&mesh).unwrap());
        let m = map.reduce_operator(&assemble_mass(&mesh, lumped).unwrap());
        (k, m)
    }

    #[test]
    fn dense_jacobi_diagonalizes_a_known_matrix() {
        // Eigenvalues of [[2,1,0],[1,2,1],[0,1,2]] are 2 − √2, 2, 2 + √2.
        let s = vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ];
        let (vals, vecs) = dense_sym_eigen(&s);
        let expected = [2.0 - std::f64::consts::SQRT_2, 2.0, 2.0 + std::f64::consts::SQRT_2];
        for (got, want) in vals.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "value {got} vs {want}");
        }
        for (j, v) in vecs.iter().enumerate() {
            let sv: Vec<f64> = (0..3)
                .map(|i| (0..3).map(|l| s[i][l] * v[l]).sum())
                .collect();
            for i in 0..3 {
                assert!((sv[i] - vals[j] * v[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn square_fundamental_mode_matches_separation_of_variables() {
        let (k, m) = dirichlet_pencil(&DomainSpec::rectangle(1.0, 1.0).unwrap(), 0.02, false);
        let pairs = smallest_eigenpairs(&k, &m, 1, 1e-7).unwrap();
        let exact = 2.0 * std::f64::consts::PI.powi(2);
        let rel = (pairs[0].value - exact) / exact;
        assert!(rel.abs() < 0.01, "relative error {rel}");
        // Conforming elements approach the eigenvalue from above.
        assert!(pairs[0].value >= exact * (1.0 - 1e-12), "from above");
        assert!(pairs[0].residual <= 1e-7);
    }

    #[test]
    fn disk_fundamental_mode_matches_bessel_root() {
        // λ₁(unit disk) = j₀₁² with j₀₁ the first zero of J₀.
        let exact = 5.783_185_962_946_785;
        let (k, m) = dirichlet_pencil(&DomainSpec::disk(1.0).unwrap(), 0.02, false);
        let pairs = smallest_eigenpairs(&k, &m, 1, 1e-7).unwrap();
        let rel = (pairs[0].value - exact) / exact;
        assert!(rel.abs() < 0.01, "relative error {rel}");
    }

    #[test]
    fn shifted_pencil_translates_the_spectrum_exactly() {
        let (k, m) = dirichlet_pencil(&DomainSpec::rectangle(1.0, 1.0).unwrap(), 0.1, true);
        let plain = smallest_eigenpairs(&k, &m, 3, 1e-9).unwrap();
        // A − 30B makes the lowest eigenvalue negative, exercising the
        // inertia-bracketing path.
        let shifted_op = k.add_scaled(-30.0, &m);
        let shifted = smallest_eigenpairs(&shifted_op, &m, 3, 1e-9).unwrap();
        assert!(shifted[0].value < 0.0, "shift should create a negative eigenvalue");
        for (p, s) in plain.iter().zip(&shifted) {
            let err = (s.value - (p.value - 30.0)).abs();
            assert!(err < 1e-7 * p.value.abs().max(1.0), "shift mismatch {err}");
        }
    }

    #[test]
    fn nested_refinement_lowers_every_eigenvalue() {
        // Halving h on a nested mesh enlarges the trial space, so by the
        // min-max principle every Dirichlet eigenvalue can only decrease.
        let spec = DomainSpec::rectangle(1.0, 1.0).unwrap();
        let coarse = build_mesh(&spec, 0.3).unwrap();
        let grading = GradingSpec {
            focus: crate::geometry::Point::new(0.0, 0.0),
            inner_h: 0.15,
            outer_h: 0.15,
            transition_radius: 1.0,
        };
        let fine = refine(&coarse, &grading, &RefineOptions::default()).unwrap();

        let pencil = |mesh: &crate::mesh::Mesh| {
            let map = InteriorMap::new(mesh);
            (
                map.reduce_operator(&assemble_stiffness(mesh).unwrap()),
                map.reduce_operator(&assemble_mass(mesh, false).unwrap()),
            )
        };
        let (kc, mc) = pencil(&coarse);
        let (kf, mf) = pencil(&fine);
        let coarse_pairs = smallest_eigenpairs(&kc, &mc, 4, 1e-9).unwrap();
        let fine_pairs = smallest_eigenpairs(&kf, &mf, 4, 1e-9).unwrap();
        for (i, (c, f)) in coarse_pairs.iter().zip(&fine_pairs).enumerate() {
            assert!(
                f.value <= c.value * (1.0 + 1e-10),
                "pair {i}: fine {} vs coarse {}",
                f.value,
                c.value
            );
        }
    }

    #[test]
    fn double_eigenvalue_of_the_square_is_resolved() {
        // λ₂ = λ₃ = 5π² on the unit square.
        let (k, m) = dirichlet_pencil(&DomainSpec::rectangle(1.0, 1.0).unwrap(), 0.04, false);
        let pairs = smallest_eigenpairs(&k, &m, 3, 1e-8).unwrap();
        let exact = 5.0 * std::f64::consts::PI.powi(2);
        let (t2, t3) = (pairs[1].value, pairs[2].value);
        assert!((t2 - t3).abs() < 0.01 * exact, "split {t2} vs {t3}");
        for t in [t2, t3] {
            assert!(((t - exact) / exact).abs() < 0.02, "value {t}");
        }
        // The two vectors must be B-orthogonal, not copies of each other.
        let b2 = m.matvec(&pairs[1].vector);
        let ip: f64 = b2.iter().zip(&pairs[2].vector).map(|(a, b)| a * b).sum();
        assert!(ip.abs() < 1e-6, "B-inner product {ip}");
    }

    #[test]
    fn asking_for_the_whole_spectrum_is_rejected() {
        let (k, m) = dirichlet_pencil(&DomainSpec::rectangle(1.0, 1.0).unwrap(), 0.25, true);
        let n = k.dimension();
        match smallest_eigenpairs(&k, &m, n, 1e-8) {
            Err(SparseError::TooManyPairs { k: got, dimension }) => {
                assert_eq!(got, n);
                assert_eq!(dimension, n);
            }
            other => panic!("expected TooManyPairs, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let a = SparseOperator::diagonal(&[1.0, 2.0, 3.0]);
        let b = SparseOperator::diagonal(&[1.0, 1.0]);
        match smallest_eigenpairs(&a, &b, 1, 1e-8) {
            Err(SparseError::DimensionMismatch { expected: 3, got: 2 }) => {}
            other => panic!("expected DimensionMismatch, got {other:?}"),
        }
    }
}

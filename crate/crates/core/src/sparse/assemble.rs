//! P1 finite-element assembly on triangulations.
//!
//! For a triangle T with vertices a, b, c and area A, the barycentric
//! gradients are ∇λ_a = (c−b)⊥ / (2A) (cyclically), giving the element
//! stiffness K^T_{uv} = A ∇λ_u·∇λ_v.  The element mass is
//! A/12 · [[2,1,1],[1,2,1],[1,1,2]] (consistent) or A/3 on the diagonal
//! (lumped, i.e. row sums — exact for affine integrands).  Both assemble to
//! operators over *all* vertices; Dirichlet elimination is a separate
//! concern ([`super::InteriorMap`]).

use crate::geometry::Point;
use crate::mesh::Mesh;

use super::{SparseError, SparseOperator};

fn triangle_geometry(
    mesh: &Mesh,
    t: usize,
    h2: f64,
) -> Result<([Point; 3], f64), SparseError> {
    let pts = mesh.triangle_points(t);
    let area = mesh.triangle_area(t);
    if area < 1e-14 * h2 {
        return Err(SparseError::DegenerateTriangle { index: t, area });
    }
    Ok((pts, area))
}

/// Assemble the stiffness operator ∫∇u·∇v over all vertices.
///
/// Positive semidefinite with the constants in its kernel; positive
/// definite after Dirichlet elimination.
pub fn assemble_stiffness(mesh: &Mesh) -> Result<SparseOperator, SparseError> {
    let h2 = mesh.h_max() * mesh.h_max();
    let mut triplets = Vec::with_capacity(mesh.n_triangles() * 9);
    for t in 0..mesh.n_triangles() {
        let ([a, b, c], area) = triangle_geometry(mesh, t, h2)?;
        let idx = mesh.triangles()[t];
        let grads = [
            (c - b).perp().scale(1.0 / (2.0 * area)),
            (a - c).perp().scale(1.0 / (2.0 * area)),
            (b - a).perp().scale(1.0 / (2.0 * area)),
        ];
        for u in 0..3 {
            for v in 0..3 {
                triplets.push((idx[u], idx[v], area * grads[u].dot(grads[v])));
            }
        }
    }
    Ok(SparseOperator::from_triplets(mesh.n_vertices(), &triplets))
}

/// Assemble the mass operator ∫uv over all vertices.
///
/// `lumped` replaces each element block by its row sums on the diagonal
/// (A/3 per vertex), making nodal nonlinearities exact to evaluate; the
/// diagonal sums to the triangulated area.
pub fn assemble_mass(mesh: &Mesh, lumped: bool) -> Result<SparseOperator, SparseError> {
    let h2 = mesh.h_max() * mesh.h_max();
    let mut triplets = Vec::new();
    for t in 0..mesh.n_triangles() {
        let (_, area) = triangle_geometry(mesh, t, h2)?;
        let idx = mesh.triangles()[t];
        if lumped {
            for &u in &idx {
                triplets.push((u, u, area / 3.0));
            }
        } else {
            for u in 0..3 {
                for v in 0..3 {
                    let w = if u == v { area / 6.0 } else { area / 12.0 };
                    triplets.push((idx[u], idx[v], w));
                }
            }
        }
    }
    Ok(SparseOperator::from_triplets(mesh.n_vertices(), &triplets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::DomainSpec;
    use approx::assert_abs_diff_eq;

    fn one_triangle() -> Mesh {
        Mesh::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
            ],
            vec![[0, 1, 2]],
            vec![true, true, true],
            None,
        )
        .unwrap()
    }

    #[test]
    fn unit_right_triangle_stiffness_is_exact() {
        let k = assemble_stiffness(&one_triangle()).unwrap();
        let expected = [
            [1.0, -0.5, -0.5],
            [-0.5, 0.5, 0.0],
            [-0.5, 0.0, 0.5],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(k.entry(i, j), expected[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn stiffness_rows_sum_to_zero() {
        let mesh = crate::mesh::build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.15).unwrap();
        let k = assemble_stiffness(&mesh).unwrap();
        for i in 0..k.dimension() {
            let (_, vals) = k.row(i);
            let sum: f64 = vals.iter().sum();
            assert!(sum.abs() < 1e-12, "row {i} sums to {sum}");
        }
        assert!(k.symmetry_defect() < 1e-15);
    }

    #[test]
    fn lumped_mass_sums_to_disk_area() {
        let mesh = crate::mesh::build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.05).unwrap();
        let m = assemble_mass(&mesh, true).unwrap();
        let total: f64 = m.diag().iter().sum();
        assert_abs_diff_eq!(total, mesh.area_sum(), epsilon = 1e-12);
        let relative = (total - std::f64::consts::PI).abs() / std::f64::consts::PI;
        assert!(relative < 0.02, "lumped mass {total} vs π, off by {relative}");
        assert!(m.diag().iter().all(|&d| d > 0.0));
    }

    #[test]
    fn consistent_mass_row_sums_match_lumped_diagonal() {
        let mesh = crate::mesh::build_mesh(&DomainSpec::rectangle(1.0, 0.7).unwrap(), 0.11).unwrap();
        let mc = assemble_mass(&mesh, false).unwrap();
        let ml = assemble_mass(&mesh, true).unwrap();
        for i in 0..mc.dimension() {
            let (_, vals) = mc.row(i);
            let sum: f64 = vals.iter().sum();
            assert_abs_diff_eq!(sum, ml.entry(i, i), epsilon = 1e-14);
        }
    }
}

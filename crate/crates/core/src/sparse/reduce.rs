//! Dirichlet elimination: restriction of operators and fields to interior
//! vertices.
//!
//! Homogeneous boundary conditions are imposed by deleting boundary rows
//! and columns, which keeps reduced stiffness-type operators symmetric
//! positive definite and their spectra clean.  The map also extends reduced
//! vectors back to all vertices with zeros on the boundary.

use crate::mesh::Mesh;

use super::SparseOperator;

/// Index translation between all mesh vertices and the interior subset.
#[derive(Debug, Clone)]
pub struct InteriorMap {
    reduced_of: Vec<Option<usize>>,
    full_of: Vec<usize>,
}

impl InteriorMap {
    pub fn new(mesh: &Mesh) -> Self {
        let mut reduced_of = vec![None; mesh.n_vertices()];
        let mut full_of = Vec::new();
        for (v, &on_boundary) in mesh.boundary().iter().enumerate() {
            if !on_boundary {
                reduced_of[v] = Some(full_of.len());
                full_of.push(v);
            }
        }
        InteriorMap {
            reduced_of,
            full_of,
        }
    }

    pub fn n_interior(&self) -> usize {
        self.full_of.len()
    }

    pub fn n_full(&self) -> usize {
        self.reduced_of.len()
    }

    /// Full-mesh vertex id of reduced index `r`.
    pub fn full_index(&self, r: usize) -> usize {
        self.full_of[r]
    }

    /// Reduced index of full vertex `v`, `None` on the boundary.
    pub fn reduced_index(&self, v: usize) -> Option<usize> {
        self.reduced_of[v]
    }

    /// Delete boundary rows and columns of `a`.
    pub fn reduce_operator(&self, a: &SparseOperator) -> SparseOperator {
        assert_eq!(a.dimension(), self.n_full());
        let mut triplets = Vec::with_capacity(a.nnz());
        for (r, &v) in self.full_of.iter().enumerate() {
            let (cols, vals) = a.row(v);
            for (&j, &val) in cols.iter().zip(vals) {
                if let Some(c) = self.reduced_of[j] {
                    triplets.push((r, c, val));
                }
            }
        }
        SparseOperator::from_triplets(self.n_interior(), &triplets)
    }

    /// Restrict a full nodal vector to interior vertices.
    pub fn reduce_vector(&self, full: &[f64]) -> Vec<f64> {
        assert_eq!(full.len(), self.n_full());
        self.full_of.iter().map(|&v| full[v]).collect()
    }

    /// Extend a reduced vector by zeros on the boundary.
    pub fn extend_vector(&self, reduced: &[f64]) -> Vec<f64> {
        assert_eq!(reduced.len(), self.n_interior());
        let mut full = vec![0.0; self.n_full()];
        for (r, &v) in self.full_of.iter().enumerate() {
            full[v] = reduced[r];
        }
        full
    }
}

//! Sparse symmetric operators and the solvers built on them.
//!
//! Everything here is deliberately self-contained and deterministic: fixed
//! iteration orders, no randomized pivoting, no threads.  The pieces are
//!
//! * [`SparseOperator`] — compressed-sparse-row storage for the symmetric
//!   operators assembled from P1 finite elements;
//! * [`assemble_stiffness`] / [`assemble_mass`] — element assembly of
//!   ∫∇u·∇v and ∫uv (consistent or lumped);
//! * [`InteriorMap`] — Dirichlet elimination onto interior vertices;
//! * [`solve_spd`] — Jacobi-preconditioned conjugate gradients;
//! * [`SkylineLdlt`] — reverse-Cuthill–McKee-ordered envelope LDLᵀ, which
//!   also reports matrix inertia (Sylvester's law: the number of negative
//!   pivots of A − σB counts eigenvalues of (A, B) below σ);
//! * [`smallest_eigenpairs`] — the k smallest eigenvalues of the pencil
//!   A v = λ B v by shift-certified inverse subspace iteration.

use std::fmt::Write as _;

mod assemble;
mod cg;
mod eigen;
mod reduce;
mod skyline;

pub use assemble::{assemble_mass, assemble_stiffness};
pub use cg::solve_spd;
pub use eigen::{inertia_below, smallest_eigenpairs, EigenPair};
pub use reduce::InteriorMap;
pub use skyline::SkylineLdlt;

/// Errors from assembly, linear solves and eigensolves.
#[derive(Debug, thiserror::Error)]
pub enum SparseError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("triangle {index} is degenerate (area {area:e} < 1e-14·h_max²)")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error(
        "conjugate gradients stopped after {iterations} iterations with relative residual {residual:e} (tolerance {tol:e}); the system may be singular or inconsistent"
    )]
    NoConvergence {
        iterations: usize,
        tol: f64,
        residual: f64,
    },
    #[error("{k} eigenpairs requested from a {dimension}-dimensional pencil")]
    TooManyPairs { k: usize, dimension: usize },
    #[error(
        "eigensolver stalled with {unconverged} of {k} pairs unconverged after {factorizations} factorizations; worst residual {residual:e}"
    )]
    EigenStalled {
        unconverged: usize,
        k: usize,
        factorizations: usize,
        residual: f64,
    },
    #[error("pivot {index} vanished during LDLᵀ (value {value:e}); shift coincides with an eigenvalue")]
    SingularPivot { index: usize, value: f64 },
    #[error("operator is not symmetric: |A - Aᵀ| reaches {defect:e}")]
    NotSymmetric { defect: f64 },
}

/// Symmetric sparse matrix in compressed-sparse-row form.
///
/// Rows are sorted by column and duplicate triplets are summed on
/// construction.  Structural zeros are kept (the pattern is part of the
/// operator's identity; `add_scaled` relies on merged patterns).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseOperator {
    /// Build from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(i, _, _) in triplets {
            assert!(i < n, "row {i} out of range for dimension {n}");
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut order: Vec<usize> = vec![0; triplets.len()];
        {
            let mut next = counts.clone();
            for (t, &(i, _, _)) in triplets.iter().enumerate() {
                order[next[i]] = t;
                next[i] += 1;
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut row_buf: Vec<(usize, f64)> = Vec::new();
        for i in 0..n {
            row_buf.clear();
            for &t in &order[counts[i]..counts[i + 1]] {
                let (_, j, v) = triplets[t];
                assert!(j < n, "column {j} out of range for dimension {n}");
                row_buf.push((j, v));
            }
            row_buf.sort_unstable_by_key(|&(j, _)| j);
            let mut last: Option<usize> = None;
            for &(j, v) in row_buf.iter() {
                if last == Some(j) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(j);
                    vals.push(v);
                    last = Some(j);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseOperator {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Diagonal operator with the given entries.
    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        SparseOperator {
            n,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: entries.to_vec(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Row `i` as parallel (columns, values) slices.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[span.clone()], &self.vals[span])
    }

    /// Entry (i, j), zero when outside the pattern.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// y = A x.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            y[i] = acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    /// xᵀ A y.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut row = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                row += v * y[j];
            }
            acc += x[i] * row;
        }
        acc
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.entry(i, i)).collect()
    }

    /// self + beta · other, on the merged sparsity pattern.
    pub fn add_scaled(&self, beta: f64, other: &SparseOperator) -> SparseOperator {
        assert_eq!(self.n, other.n, "operator dimensions differ");
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..self.n {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let ja = ca.get(p).copied().unwrap_or(usize::MAX);
                let jb = cb.get(q).copied().unwrap_or(usize::MAX);
                if ja < jb {
                    cols.push(ja);
                    vals.push(va[p]);
                    p += 1;
                } else if jb < ja {
                    cols.push(jb);
                    vals.push(beta * vb[q]);
                    q += 1;
                } else {
                    cols.push(ja);
                    vals.push(va[p] + beta * vb[q]);
                    p += 1;
                    q += 1;
                }
            }
            row_ptr.push(cols.len());
        }
        SparseOperator {
            n: self.n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Largest absolute asymmetry |a_ij − a_ji|.
    pub fn symmetry_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j > i {
                    defect = defect.max((v - self.entry(j, i)).abs());
                }
            }
        }
        defect
    }

    /// Largest absolute entry (cheap norm proxy for tolerances).
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Debug dump in coordinate text format, one `i j value` per line.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(out, "{i} {j} {v}").unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_merge_and_sort() {
        let a = SparseOperator::from_triplets(
            3,
            &[
                (0, 2, 1.0),
                (0, 0, 2.0),
                (0, 2, 0.5),
                (2, 0, 1.5),
                (1, 1, 3.0),
            ],
        );
        assert_eq!(a.row(0), (&[0usize, 2][..], &[2.0, 1.5][..]));
        assert_eq!(a.entry(0, 2), 1.5);
        assert_eq!(a.entry(2, 0), 1.5);
        assert_eq!(a.entry(1, 0), 0.0);
        assert_eq!(a.symmetry_defect(), 0.0);
    }

    #[test]
    fn matvec_and_bilinear_agree_with_dense() {
        let a = SparseOperator::from_triplets(
            3,
            &[
                (0, 0, 2.0),
                (0, 1, -1.0),
                (1, 0, -1.0),
                (1, 1, 2.0),
                (1, 2, -1.0),
                (2, 1, -1.0),
                (2, 2, 2.0),
            ],
        );
        let x = [1.0, 2.0, 3.0];
        assert_eq!(a.matvec(&x), vec![0.0, 0.0, 4.0]);
        assert_eq!(a.bilinear(&x, &x), 12.0 - 4.0 - 8.0 + 18.0 - 6.0);
    }

    #[test]
    fn add_scaled_merges_patterns() {
        let a = SparseOperator::from_triplets(2, &[(0, 0, 1.0), (1, 1, 1.0)]);
        let b = SparseOperator::from_triplets(2, &[(0, 1, 2.0), (1, 0, 2.0)]);
        let c = a.add_scaled(-0.5, &b);
        assert_eq!(c.entry(0, 0), 1.0);
        assert_eq!(c.entry(0, 1), -1.0);
        assert_eq!(c.entry(1, 0), -1.0);
        assert_eq!(c.nnz(), 4);
    }

    #[test]
    fn coordinate_dump_round_trips_entries() {
        let a = SparseOperator::from_triplets(2, &[(0, 1, 0.1), (1, 0, 0.1), (1, 1, -2.0)]);
        let text = a.to_coordinate_text();
        assert_eq!(text, "0 1 0.1\n1 0 0.1\n1 1 -2\n");
    }
}

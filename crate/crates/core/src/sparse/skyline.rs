//! Envelope (skyline) LDLᵀ factorization with reverse-Cuthill–McKee
//! ordering.
//!
//! The factorization serves two purposes: direct solves with shifted
//! operators A − σB inside the eigensolver and Newton steps, and *inertia*
//! counts — by Sylvester's law the number of negative pivots of A − σB
//! equals the number of eigenvalues of the pencil (A, B) below σ, which is
//! what certifies eigensolver shifts and counts negative directions of
//! linearized operators.  No pivoting is performed; a vanishing pivot is
//! reported as [`SparseError::SingularPivot`] and callers nudge the shift.

use super::{SparseError, SparseOperator};

/// Reverse-Cuthill–McKee ordering of the operator's adjacency graph.
/// Returns `perm` with `perm[new] = old`; deterministic (ties by index).
pub fn rcm_order(a: &SparseOperator) -> Vec<usize> {
    let n = a.dimension();
    let degree = |v: usize| a.row(v).0.iter().filter(|&&j| j != v).count();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut scratch: Vec<usize> = Vec::new();

    let bfs = |root: usize, visited: &mut Vec<bool>, out: &mut Vec<usize>| {
        let start = out.len();
        visited[root] = true;
        out.push(root);
        let mut head = start;
        while head < out.len() {
            let v = out[head];
            head += 1;
            let mut nbrs: Vec<usize> = a.row(v).0.iter().copied().filter(|&j| j != v && !visited[j]).collect();
            nbrs.sort_unstable_by_key(|&j| (degree(j), j));
            for j in nbrs {
                if !visited[j] {
                    visited[j] = true;
                    out.push(j);
                }
            }
        }
    };

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // Pseudo-peripheral root: repeat BFS from the last-level vertex of
        // minimum degree until the eccentricity stops growing.
        let comp_begin = order.len();
        let mut root = seed;
        let mut ecc = 0usize;
        for _ in 0..4 {
            scratch.clear();
            let mut local_visited = vec![false; n];
            // BFS recording levels.
            local_visited[root] = true;
            scratch.push(root);
            let mut head = 0;
            let mut level_start = 0;
            let mut levels = 0usize;
            let mut last_level = vec![root];
            while head < scratch.len() {
                let level_end = scratch.len();
                last_level = scratch[level_start..level_end].to_vec();
                while head < level_end {
                    let v = scratch[head];
                    head += 1;
                    for &j in a.row(v).0 {
                        if j != v && !local_visited[j] {
                            local_visited[j] = true;
                            scratch.push(j);
                        }
                    }
                }
                level_start = level_end;
                levels += 1;
            }
            let cand = last_level
                .iter()
                .copied()
                .min_by_key(|&v| (degree(v), v))
                .unwrap();
            if levels > ecc {
                ecc = levels;
                root = cand;
            } else {
                break;
            }
        }
        bfs(root, &mut visited, &mut order);
        debug_assert!(order.len() > comp_begin);
    }
    order.reverse();
    order
}

/// LDLᵀ factorization of a symmetric operator within its RCM envelope.
#[derive(Debug)]
pub struct SkylineLdlt {
    n: usize,
    /// perm[new] = old vertex id.
    perm: Vec<usize>,
    inv: Vec<usize>,
    /// first[i]: leftmost envelope column of permuted row i.
    first: Vec<usize>,
    /// offset[i]: position of row i's entries (columns first[i]..i) in data.
    offset: Vec<usize>,
    data: Vec<f64>,
    d: Vec<f64>,
    negatives: usize,
}

impl SkylineLdlt {
    pub fn factor(a: &SparseOperator) -> Result<Self, SparseError> {
        let defect = a.symmetry_defect();
        let scale = a.max_abs().max(1e-300);
        if defect > 1e-12 * scale {
            return Err(SparseError::NotSymmetric { defect });
        }
        let n = a.dimension();
        let perm = rcm_order(a);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        let mut first: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for &j in a.row(perm[i]).0 {
                let pj = inv[j];
                if pj < first[i] {
                    first[i] = pj;
                }
            }
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i]);
        }
        let mut data = vec![0.0; offset[n]];
        let mut d = vec![0.0; n];
        for i in 0..n {
            let (cols, vals) = a.row(perm[i]);
            for (&j, &v) in cols.iter().zip(vals) {
                let pj = inv[j];
                if pj < i {
                    data[offset[i] + (pj - first[i])] = v;
                } else if pj == i {
                    d[i] = v;
                }
            }
        }

        // In-place envelope factorization (Jennings).
        let mut negatives = 0usize;
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut sum = data[offset[i] + (j - fi)];
                for k in lo..j {
                    sum -= data[offset[i] + (k - fi)] * d[k] * data[offset[j] + (k - fj)];
                }
                data[offset[i] + (j - fi)] = sum / d[j];
            }
            let mut dii = d[i];
            for k in fi..i {
                let l = data[offset[i] + (k - fi)];
                dii -= l * l * d[k];
            }
            if dii.abs() < 1e-12 * scale {
                return Err(SparseError::SingularPivot {
                    index: i,
                    value: dii,
                });
            }
            if dii < 0.0 {
                negatives += 1;
            }
            d[i] = dii;
        }

        Ok(SkylineLdlt {
            n,
            perm,
            inv,
            first,
            offset,
            data,
            d,
            negatives,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Number of negative pivots = number of pencil eigenvalues below the
    /// shift used to form the factored operator (Sylvester's law).
    pub fn negative_pivots(&self) -> usize {
        self.negatives
    }

    /// Solve A x = b using the factorization.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        // z in permuted ordering.
        let mut z: Vec<f64> = (0..self.n).map(|i| b[self.perm[i]]).collect();
        // Forward: L z' = z (unit lower).
        for i in 0..self.n {
            let fi = self.first[i];
            let mut acc = z[i];
            for k in fi..i {
                acc -= self.data[self.offset[i] + (k - fi)] * z[k];
            }
            z[i] = acc;
        }
        for i in 0..self.n {
            z[i] /= self.d[i];
        }
        // Backward: Lᵀ x = z.
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let zi = z[i];
            for k in fi..i {
                z[k] -= self.data[self.offset[i] + (k - fi)] * zi;
            }
        }
        let mut x = vec![0.0; self.n];
        for i in 0..self.n {
            x[self.perm[i]] = z[i];
        }
        let _ = &self.inv;
        x
    }

    /// Envelope size (profiling/test hook).
    pub fn envelope_len(&self) -> usize {
        self.data.len()
    }
}

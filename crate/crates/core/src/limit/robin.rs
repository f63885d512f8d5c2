//! The Robin function R(y) = g(y,y) of the Dirichlet Green's function.
//!
//! Writing G(x,y) for the Green's function of −Δ with zero boundary data,
//! the regular part is g(x,y) = G(x,y) + (1/2π)·log|x−y|: it is harmonic
//! in x with boundary trace (1/2π)·log|x−y|, and R(y) = g(y,y).  For λ = 0
//! the blow-up point of the least-energy solutions converges to a critical
//! point of R, which is what the sampled field computed here locates.
//!
//! Each sample costs one discrete harmonic extension: the stiffness matrix
//! restricted to interior vertices is factored once and reused across all
//! samples.  With this sign convention R(y) → −∞ as y approaches ∂Ω, so on
//! the convex benchmark domains the interior critical point is the maximum
//! of R; the search takes the best sample and polishes it with a local
//! least-squares quadratic fit.
//!
//! On a disk of radius R₀ everything is explicit — g(x,0) is constant, so
//! R(0) = (1/2π)·log R₀, and the discrete extension of constant boundary
//! data is exactly constant — which gives machine-precision checks below.

use super::{dist_sq, LimitError};
use crate::geometry::Point;
use crate::mesh::Mesh;
use crate::sparse::{assemble_stiffness, InteriorMap, SkylineLdlt, SparseOperator};
use std::f64::consts::PI;

/// Sampled Robin function together with the polished critical point.
#[derive(Debug, Clone)]
pub struct RobinField {
    /// Interior points where R was evaluated.
    pub samples: Vec<Point>,
    /// R(y) for each sample, same order.
    pub values: Vec<f64>,
    /// Best sample after local quadratic polish.
    pub critical_point: Point,
    /// R at the critical point (fresh harmonic solve when the polished
    /// point is admissible, the raw sample value otherwise).
    pub critical_value: f64,
    /// |∇q| of the polishing quadratic at the reported point: zero when the
    /// polish converged by construction, the raw-lattice gradient when the
    /// search fell back to the best sample, infinite when no fit existed.
    pub gradient_residual: f64,
}

/// Least-squares quadratic q(ξ,η) = c₀ + c₁ξ + c₂η + c₃ξ² + c₄ξη + c₅η²
/// in coordinates centered at `origin` and scaled by `scale`.
struct QuadFit {
    origin: Point,
    scale: f64,
    c: [f64; 6],
}

impl QuadFit {
    fn gradient_norm_at(&self, p: Point) -> f64 {
        let xi = (p.x - self.origin.x) / self.scale;
        let eta = (p.y - self.origin.y) / self.scale;
        let gx = self.c[1] + 2.0 * self.c[3] * xi + self.c[4] * eta;
        let gy = self.c[2] + self.c[4] * xi + 2.0 * self.c[5] * eta;
        gx.hypot(gy) / self.scale
    }

    /// Stationary point, provided the fit is concave there (a maximum).
    fn concave_peak(&self) -> Option<Point> {
        let (a, b, c) = (2.0 * self.c[3], self.c[4], 2.0 * self.c[5]);
        let det = a * c - b * b;
        if !(det > 0.0 && a < 0.0) {
            return None;
        }
        let xi = (-self.c[1] * c + self.c[2] * b) / det;
        let eta = (-self.c[2] * a + self.c[1] * b) / det;
        if xi.hypot(eta) > 2.0 {
            return None; // outside the neighborhood the fit can speak for
        }
        Some(Point::new(
            self.origin.x + self.scale * xi,
            self.origin.y + self.scale * eta,
        ))
    }
}

/// Dense Gaussian elimination with partial pivoting for the tiny normal
/// equations of the quadratic fit.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0_f64, f64::max);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-12 * scale.max(1e-300) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * b[k];
        }
        b[col] = s / a[col][col];
    }
    Some(b)
}

/// Fit a quadratic to the (up to) 12 samples nearest `around`.
fn fit_quadratic(samples: &[Point], values: &[f64], around: Point) -> Option<QuadFit> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&i, &j| {
        dist_sq(samples[i], around)
            .total_cmp(&dist_sq(samples[j], around))
            .then(i.cmp(&j))
    });
    order.truncate(12);
    if order.len() < 6 {
        return None;
    }
    let scale = order
        .iter()
        .map(|&i| dist_sq(samples[i], around).sqrt())
        .fold(0.0_f64, f64::max);
    if scale <= 0.0 {
        return None;
    }
    let mut normal = vec![vec![0.0; 6]; 6];
    let mut rhs = vec![0.0; 6];
    for &i in &order {
        let xi = (samples[i].x - around.x) / scale;
        let eta = (samples[i].y - around.y) / scale;
        let row = [1.0, xi, eta, xi * xi, xi * eta, eta * eta];
        for r in 0..6 {
            rhs[r] += row[r] * values[i];
            for c in 0..6 {
                normal[r][c] += row[r] * row[c];
            }
        }
    }
    let c = gauss_solve(normal, rhs)?;
    Some(QuadFit {
        origin: around,
        scale,
        c: [c[0], c[1], c[2], c[3], c[4], c[5]],
    })
}

/// One discrete harmonic extension of the boundary trace (1/2π)·log|x−y|,
/// evaluated back at y.  `fact` is the factored interior stiffness.
fn extension_value(
    mesh: &Mesh,
    map: &InteriorMap,
    stiffness: &SparseOperator,
    fact: &SkylineLdlt,
    y: Point,
) -> f64 {
    let mut trace = vec![0.0; mesh.n_vertices()];
    for (i, v) in mesh.vertices().iter().enumerate() {
        if mesh.boundary()[i] {
            trace[i] = dist_sq(*v, y).ln() / (4.0 * PI); // (1/2π)·ln|v−y|
        }
    }
    let coupled = stiffness.matvec(&trace);
    let rhs: Vec<f64> = map.reduce_vector(&coupled).iter().map(|r| -r).collect();
    let interior = fact.solve(&rhs);
    let mut g = map.extend_vector(&interior);
    for (gi, ti) in g.iter_mut().zip(&trace) {
        *gi += ti;
    }
    mesh.interpolate(&g, y)
        .expect("sample admissibility was checked before solving")
}

/// Evaluate the Robin function at interior `samples` and locate its
/// critical point (the interior maximum with this sign convention).
///
/// Every sample must lie strictly inside the mesh, farther than 2·h_max
/// from the boundary, so the logarithmic boundary trace stays resolved.
pub fn robin_function(mesh: &Mesh, samples: &[Point]) -> Result<RobinField, LimitError> {
    if samples.is_empty() {
        return Err(LimitError::NoSamples);
    }
    let required = 2.0 * mesh.h_max();
    for &s in samples {
        if mesh.locate(s).is_none() {
            return Err(LimitError::SampleOutside { x: s.x, y: s.y });
        }
        let distance = mesh.boundary_distance(s);
        if distance <= required {
            return Err(LimitError::SampleNearBoundary {
                x: s.x,
                y: s.y,
                distance,
                required,
            });
        }
    }

    let stiffness = assemble_stiffness(mesh)?;
    let map = InteriorMap::new(mesh);
    let fact = SkylineLdlt::factor(&map.reduce_operator(&stiffness))?;
    let values: Vec<f64> = samples
        .iter()
        .map(|&y| extension_value(mesh, &map, &stiffness, &fact, y))
        .collect();

    let best = values
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.total_cmp(b).then(j.cmp(i)))
        .map(|(i, _)| i)
        .expect("samples is nonempty");
    let mut critical_point = samples[best];
    let mut critical_value = values[best];
    let mut gradient_residual = f64::INFINITY;

    if let Some(fit) = fit_quadratic(samples, &values, samples[best]) {
        gradient_residual = fit.gradient_norm_at(critical_point);
        if let Some(peak) = fit.concave_peak() {
            let admissible =
                mesh.locate(peak).is_some() && mesh.boundary_distance(peak) > required;
            if admissible {
                critical_point = peak;
                critical_value = extension_value(mesh, &map, &stiffness, &fact, peak);
                gradient_residual = fit.gradient_norm_at(peak);
            }
        }
    }

    Ok(RobinField {
        samples: samples.to_vec(),
        values,
        critical_point,
        critical_value,
        gradient_residual,
    })
}

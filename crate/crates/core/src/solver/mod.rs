//! Least-energy solutions of −Δu + λu = u^p by constrained minimization.
//!
//! The least-energy level is the infimum of the quotient
//!
//!   J_λ(v) = ( ∫|∇v|² + λ∫v² ) / ( ∫|v|^{p+1} )^{2/(p+1)},
//!
//! over H¹₀(Ω)∖{0}; writing c² for the attained value, the minimizer v with
//! ∫v^{p+1} = 1 rescales to u = (J_λ(v))^{1/(p−1)}·v, which solves the PDE.
//! Discretely everything is P1 finite elements with *lumped* (nodal) mass
//! for every occurrence of the nonlinearity, so the same scheme satisfies
//! the discrete Euler–Lagrange system
//!
//!   K u + λ M_L u = M_L u^p
//!
//! exactly at convergence, row by row.  Minimization runs in two phases
//! (see [`minimize`]): a projected Barzilai–Borwein descent on the
//! constraint manifold {Σᵢ mᵢ|vᵢ|^{p+1} = 1} with absolute-value positivity
//! projection, then a damped Newton polish of the Euler–Lagrange system.
//! Large exponents are handled by evaluating powers as exp(p·log u) with
//! the logarithm clamped at −700/p, and by factoring the sup out of the
//! constraint sum, so quotients stay finite for any representable field.
//!
//! [`continue_in_p`] tracks the least-energy branch along an increasing
//! exponent schedule with warm starts, which is how the large-p regimes
//! are reached in practice.

use std::io::{BufRead, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::Point;
use crate::mesh::Mesh;
use crate::sparse::{assemble_mass, assemble_stiffness, smallest_eigenpairs, InteriorMap};

mod minimize;

pub use minimize::{continue_in_p, minimize};

/// Errors from the energy solver.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("problem parameters need p > 1 and lambda ≥ 0 finite, got p = {p}, lambda = {lambda}")]
    InvalidParams { p: f64, lambda: f64 },
    #[error("field has {got} values but the mesh has {expected} vertices")]
    MeshMismatch { expected: usize, got: usize },
    #[error("field value at vertex {index} is {value}, but boundary values must be exactly 0")]
    NonzeroBoundary { index: usize, value: f64 },
    #[error("field value at vertex {index} is not finite")]
    NotFinite { index: usize },
    #[error("field is identically zero")]
    ZeroField,
    #[error("initial field for a Gaussian bump needs a center inside the mesh and width > 0")]
    BadGaussian,
    #[error("continuation schedule is empty")]
    ScheduleEmpty,
    #[error("continuation schedule must be strictly increasing at entry {index}")]
    ScheduleNotIncreasing { index: usize },
    #[error("continuation schedule must start at p ≤ 5, got {first}")]
    ScheduleStartsTooHigh { first: f64 },
    #[error("continuation schedule ends at {last} but the target exponent is {target}")]
    ScheduleEndMismatch { last: f64, target: f64 },
    #[error(
        "minimization stagnated: relative energy decrease below 1e-14 for 100 steps and the \
         Euler–Lagrange residual {residual} still exceeds the tolerance; last iterate attached"
    )]
    Stagnation {
        residual: f64,
        quotient: f64,
        last: Box<Field>,
    },
    #[error(
        "u^p overflows: the exponent p·log(sup u) = {exponent} exceeds 700, so the iterate is \
         representable only in log domain; shorten the continuation step or store log u instead"
    )]
    Overflow { exponent: f64 },
    #[error("continuation failed at stage p = {p} after {} completed stages: {source}", completed.len())]
    StageFailed {
        p: f64,
        completed: Vec<SolveReport>,
        source: Box<SolverError>,
    },
    #[error("linear algebra failure: {0}")]
    Sparse(#[from] crate::sparse::SparseError),
    #[error("snapshot I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad field snapshot at line {line}: {detail}")]
    SnapshotFormat { line: usize, detail: String },
}

/// Problem parameters (λ, p) with the laboratory-wide ranges enforced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    lambda: f64,
    p: f64,
}

impl ProblemParams {
    pub fn new(lambda: f64, p: f64) -> Result<Self, SolverError> {
        if !(p.is_finite() && p > 1.0 && lambda.is_finite() && lambda >= 0.0) {
            return Err(SolverError::InvalidParams { p, lambda });
        }
        Ok(ProblemParams { lambda, p })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// A nodal scalar field on a mesh: one value per vertex, exact zeros on the
/// boundary, no NaN/Inf anywhere.
#[derive(Debug, Clone)]
pub struct Field {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>) -> Result<Self, SolverError> {
        if values.len() != mesh.n_vertices() {
            return Err(SolverError::MeshMismatch {
                expected: mesh.n_vertices(),
                got: values.len(),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(SolverError::NotFinite { index: i });
            }
            if mesh.boundary()[i] && v != 0.0 {
                return Err(SolverError::NonzeroBoundary { index: i, value: v });
            }
        }
        Ok(Field { mesh, values })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest-index vertex attaining the maximum value, with the value.
    pub fn max_vertex(&self) -> (usize, f64) {
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, &v) in self.values.iter().enumerate() {
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }

    /// P1 interpolation at an arbitrary point, `None` outside the mesh.
    pub fn interpolate(&self, q: Point) -> Option<f64> {
        self.mesh.interpolate(&self.values, q)
    }
}

/// Outcome of one least-energy solve at fixed (λ, p).
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// The PDE-normalized solution u with K u + λM_L u = M_L u^p.
    pub solution: Field,
    /// Problem parameters the solve was run at.
    pub params: ProblemParams,
    /// Attained quotient value c² = J_λ(v) at the constrained minimizer.
    pub c_squared: f64,
    /// ‖K u + λM_L u − M_L u^p‖₂ / ‖M_L u^p‖₂ at the returned solution.
    pub pde_residual: f64,
    /// Total iteration count (descent plus Newton).
    pub iterations: usize,
    /// Exponent schedule that produced this report (singleton for a direct
    /// solve, the completed prefix for continuation).
    pub p_path: Vec<f64>,
    /// Position of the maximizing vertex (smallest index on ties).
    pub max_point: Point,
    /// Index of the maximizing vertex.
    pub max_vertex: usize,
    /// Maximum nodal value ‖u‖_∞.
    pub sup_norm: f64,
    /// |max_point − previous stage's max_point| under continuation, 0 for
    /// a direct solve or the first stage.
    pub max_point_drift: f64,
}

/// Σᵢ mᵢ|vᵢ|^{p+1} with the sup factored out, returned as (sup, sum of
/// (|vᵢ|/sup)^{p+1} weighted by mᵢ).  Robust for any p and any scale: the
/// normalized entries are ≤ 1, and the entry attaining the sup contributes
/// exactly its mass, so the sum never underflows to zero.
fn lumped_power_sum(masses: &[f64], values: &[f64], expo: f64) -> (f64, f64) {
    let sup = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if sup == 0.0 {
        return (0.0, 0.0);
    }
    let sum = masses
        .iter()
        .zip(values)
        .map(|(m, v)| m * (v.abs() / sup).powf(expo))
        .sum();
    (sup, sum)
}

/// The discrete quotient J_λ(v) with stiffness/mass operators and lumped
/// nodal quadrature for ∫|v|^{p+1}.  Scale-invariant by construction.
pub fn quotient(field: &Field, params: &ProblemParams) -> Result<f64, SolverError> {
    let mesh = field.mesh.as_ref();
    let k = assemble_stiffness(mesh)?;
    let m = assemble_mass(mesh, true)?;
    let v = field.values();
    let numerator = k.bilinear(v, v) + params.lambda * m.bilinear(v, v);
    let (sup, sum) = lumped_power_sum(&m.diag(), v, params.p + 1.0);
    if sup == 0.0 {
        return Err(SolverError::ZeroField);
    }
    // (Σ m|v|^{p+1})^{2/(p+1)} = sup² · sum^{2/(p+1)}.
    Ok(numerator / (sup * sup * sum.powf(2.0 / (params.p + 1.0))))
}

/// Default initial guess: the first Dirichlet eigenfunction (positive).
pub fn default_init(mesh: &Arc<Mesh>) -> Result<Field, SolverError> {
    let k = assemble_stiffness(mesh)?;
    let m = assemble_mass(mesh, true)?;
    let map = InteriorMap::new(mesh);
    let pairs = smallest_eigenpairs(
        &map.reduce_operator(&k),
        &map.reduce_operator(&m),
        1,
        1e-10,
    )?;
    let mut full = map.extend_vector(&pairs[0].vector);
    // The discrete ground state has one sign; force the positive branch.
    for v in &mut full {
        *v = v.abs();
    }
    Field::new(Arc::clone(mesh), full)
}

/// Gaussian bump exp(−|x−center|²/(2 width²)) zeroed on the boundary; the
/// warm start of choice on meshes graded toward `center`.
pub fn gaussian_init(mesh: &Arc<Mesh>, center: Point, width: f64) -> Result<Field, SolverError> {
    if !(width.is_finite() && width > 0.0) || mesh.locate(center).is_none() {
        return Err(SolverError::BadGaussian);
    }
    let values = mesh
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if mesh.boundary()[i] {
                0.0
            } else {
                let dx = v.x - center.x;
                let dy = v.y - center.y;
                (-(dx * dx + dy * dy) / (2.0 * width * width)).exp()
            }
        })
        .collect();
    Field::new(Arc::clone(mesh), values)
}

/// Geometric continuation schedule with ratio 3/2 from p = 3 up to the
/// target, which is always the exact last entry.
pub fn default_schedule(p_target: f64) -> Vec<f64> {
    if p_target <= 3.0 {
        return vec![p_target];
    }
    let mut schedule = vec![3.0];
    loop {
        let next = schedule.last().unwrap() * 1.5;
        if next >= p_target / 1.2 {
            break;
        }
        schedule.push(next);
    }
    schedule.push(p_target);
    schedule
}

/// Write the snapshot `field vertices=N p=<p> lambda=<λ>` followed by one
/// nodal value per line in mesh vertex order.  Values print in Rust's
/// shortest round-trip decimal form, so reading recovers them bit-exactly.
pub fn write_field_snapshot<W: Write>(
    out: &mut W,
    field: &Field,
    params: &ProblemParams,
) -> Result<(), SolverError> {
    writeln!(
        out,
        "field vertices={} p={} lambda={}",
        field.values.len(),
        params.p,
        params.lambda
    )?;
    for v in &field.values {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

/// Read a field snapshot written by [`write_field_snapshot`] back onto its
/// mesh, recovering the parameters from the header.
pub fn read_field_snapshot<R: BufRead>(
    input: R,
    mesh: &Arc<Mesh>,
) -> Result<(Field, ProblemParams), SolverError> {
    let bad = |line: usize, detail: &str| SolverError::SnapshotFormat {
        line,
        detail: detail.to_string(),
    };
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad(1, "missing header"))??;
    let mut vertices = None;
    let mut p = None;
    let mut lambda = None;
    let mut words = header.split_whitespace();
    if words.next() != Some("field") {
        return Err(bad(1, "header must start with `field`"));
    }
    for word in words {
        let (key, value) = word
            .split_once('=')
            .ok_or_else(|| bad(1, "header entries look like key=value"))?;
        let slot = match key {
            "vertices" => {
                vertices = Some(value.parse::<usize>().map_err(|e| bad(1, &e.to_string()))?);
                continue;
            }
            "p" => &mut p,
            "lambda" => &mut lambda,
            _ => return Err(bad(1, &format!("unknown header key `{key}`"))),
        };
        *slot = Some(value.parse::<f64>().map_err(|e| bad(1, &e.to_string()))?);
    }
    let n = vertices.ok_or_else(|| bad(1, "header lacks vertices="))?;
    let params = ProblemParams::new(
        lambda.ok_or_else(|| bad(1, "header lacks lambda="))?,
        p.ok_or_else(|| bad(1, "header lacks p="))?,
    )?;
    let mut values = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if values.len() == n {
            return Err(bad(i + 2, "more values than the header announced"));
        }
        values.push(
            line.trim()
                .parse::<f64>()
                .map_err(|e| bad(i + 2, &e.to_string()))?,
        );
    }
    if values.len() != n {
        return Err(bad(
            values.len() + 1,
            &format!("expected {n} values, found {}", values.len()),
        ));
    }
    Ok((Field::new(Arc::clone(mesh), values)?, params))
}

/// First Dirichlet eigenvalue of the lumped discrete pencil on `mesh`;
/// the discrete λ₁ appearing in the exact amplitude lower bound.
pub fn discrete_lambda1(mesh: &Arc<Mesh>) -> Result<f64, SolverError> {
    let k = assemble_stiffness(mesh)?;
    let m = assemble_mass(mesh, true)?;
    let map = InteriorMap::new(mesh);
    let pairs = smallest_eigenpairs(
        &map.reduce_operator(&k),
        &map.reduce_operator(&m),
        1,
        1e-10,
    )?;
    Ok(pairs[0].value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, DomainSpec};
    use std::f64::consts::PI;

    fn unit(idx: u64) -> f64 {
        // SplitMix64 → (−0.5, 0.5); deterministic test noise.
        let mut z = idx.wrapping_add(0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }

    fn bumpy_field(mesh: &Arc<Mesh>) -> Field {
        let values = mesh
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if mesh.boundary()[i] {
                    0.0
                } else {
                    1.0 + 0.5 * unit(i as u64) + 0.2 * (3.0 * v.x).sin()
                }
            })
            .collect();
        Field::new(Arc::clone(mesh), values).unwrap()
    }

    #[test]
    fn quotient_at_p_near_one_is_the_rayleigh_quotient() {
        // As p → 1⁺ the denominator becomes ∫v², so J → Rayleigh and the
        // eigenfunction attains the discrete λ₁ ≈ 2π² on the unit square.
        let mesh = Arc::new(build_mesh(&DomainSpec::rectangle(1.0, 1.0).unwrap(), 0.05).unwrap());
        let field = default_init(&mesh).unwrap();
        let params = ProblemParams::new(0.0, 1.0 + 1e-9).unwrap();
        let j = quotient(&field, &params).unwrap();
        let exact = 2.0 * PI * PI;
        assert!(
            (j - exact).abs() / exact < 0.01,
            "J = {j} vs 2π² = {exact}"
        );
        let discrete = discrete_lambda1(&mesh).unwrap();
        assert!(
            (j - discrete).abs() / discrete < 1e-6,
            "J = {j} vs discrete λ₁ = {discrete}"
        );
    }

    #[test]
    fn quotient_is_scale_invariant_across_extreme_scales() {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.1).unwrap());
        let base = bumpy_field(&mesh);
        for p in [3.0, 40.0, 200.0] {
            let params = ProblemParams::new(0.7, p).unwrap();
            let j0 = quotient(&base, &params).unwrap();
            for scale in [1e-3, 0.37, 1e3] {
                let scaled = Field::new(
                    Arc::clone(&mesh),
                    base.values().iter().map(|v| v * scale).collect(),
                )
                .unwrap();
                let j = quotient(&scaled, &params).unwrap();
                assert!(
                    ((j - j0) / j0).abs() < 1e-12,
                    "p={p}, scale={scale}: J drifted from {j0} to {j}"
                );
            }
        }
    }

    #[test]
    fn quotient_is_affine_in_lambda() {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.1).unwrap());
        let field = bumpy_field(&mesh);
        let p = 7.0;
        let j0 = quotient(&field, &ProblemParams::new(0.0, p).unwrap()).unwrap();
        let j5 = quotient(&field, &ProblemParams::new(5.0, p).unwrap()).unwrap();
        let m = assemble_mass(&mesh, true).unwrap();
        let v = field.values();
        let (sup, sum) = lumped_power_sum(&m.diag(), v, p + 1.0);
        let expected = 5.0 * m.bilinear(v, v) / (sup * sup * sum.powf(2.0 / (p + 1.0)));
        assert!(
            ((j5 - j0) - expected).abs() / expected < 1e-12,
            "difference {} vs 5∫u²/denominator = {expected}",
            j5 - j0
        );
    }

    #[test]
    fn zero_fields_and_bad_params_are_rejected() {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.2).unwrap());
        let zero = Field::new(Arc::clone(&mesh), vec![0.0; mesh.n_vertices()]).unwrap();
        let params = ProblemParams::new(0.0, 3.0).unwrap();
        assert!(matches!(
            quotient(&zero, &params),
            Err(SolverError::ZeroField)
        ));
        assert!(ProblemParams::new(0.0, 1.0).is_err());
        assert!(ProblemParams::new(-0.1, 3.0).is_err());
        assert!(ProblemParams::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn field_invariants_are_enforced() {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.2).unwrap());
        let n = mesh.n_vertices();
        assert!(matches!(
            Field::new(Arc::clone(&mesh), vec![0.0; n + 1]),
            Err(SolverError::MeshMismatch { .. })
        ));
        let mut vals = vec![0.0; n];
        vals[0] = f64::NAN;
        assert!(matches!(
            Field::new(Arc::clone(&mesh), vals),
            Err(SolverError::NotFinite { index: 0 })
        ));
        let boundary = mesh.boundary().iter().position(|&b| b).unwrap();
        let mut vals = vec![0.0; n];
        vals[boundary] = 0.5;
        assert!(matches!(
            Field::new(Arc::clone(&mesh), vals),
            Err(SolverError::NonzeroBoundary { .. })
        ));
    }

    #[test]
    fn default_schedule_is_increasing_and_lands_on_target() {
        for target in [2.0, 3.0, 12.0, 40.0, 200.0] {
            let s = default_schedule(target);
            assert!(s[0] <= 5.0, "first entry {}", s[0]);
            assert_eq!(*s.last().unwrap(), target);
            for w in s.windows(2) {
                assert!(w[1] > w[0], "not increasing: {s:?}");
            }
        }
    }

    #[test]
    fn snapshot_round_trips_bit_exactly() {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.2).unwrap());
        let field = bumpy_field(&mesh);
        let params = ProblemParams::new(0.25, 17.5).unwrap();
        let mut buf = Vec::new();
        write_field_snapshot(&mut buf, &field, &params).unwrap();
        let (back, read_params) = read_field_snapshot(buf.as_slice(), &mesh).unwrap();
        assert_eq!(read_params.p(), 17.5);
        assert_eq!(read_params.lambda(), 0.25);
        for (a, b) in field.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits(), "value changed in transit");
        }
    }

    #[test]
    fn malformed_snapshots_are_reported_with_line_numbers() {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.2).unwrap());
        let cases: &[&str] = &[
            "wrong vertices=3 p=2 lambda=0\n0\n0\n0\n",
            "field vertices=3 p=2\n0\n0\n0\n",
            "field vertices=3 p=2 lambda=0\n0\nnot-a-number\n0\n",
            "field vertices=3 p=2 lambda=0\n0\n0\n",
        ];
        for text in cases {
            assert!(
                matches!(
                    read_field_snapshot(text.as_bytes(), &mesh),
                    Err(SolverError::SnapshotFormat { .. })
                ),
                "accepted malformed snapshot: {text:?}"
            );
        }
    }
}

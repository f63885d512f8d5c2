//! Two-phase minimization of the energy quotient.
//!
//! Phase one is projected gradient descent on the constraint manifold
//! {Σᵢ mᵢ|vᵢ|^{p+1} = 1} with Barzilai–Borwein steps: the free gradient of
//! J_λ at a constrained point is g = 2(Av − θ·m⊙v^p) with A = K + λM_L and
//! θ = vᵀAv (θ is simultaneously the quotient value and the Lagrange
//! multiplier).  Each step takes the absolute value — J(|v|) ≤ J(v), which
//! is the positivity mechanism — and renormalizes onto the constraint.
//! BB steps are nonmonotone by design; a retreat loop only guards against
//! outright explosion.
//!
//! Phase two rescales u = θ^{1/(p−1)}·v and polishes the Euler–Lagrange
//! system F(u) = Au − M_L u^p = 0 with a damped Newton method: the Jacobian
//! H = A − p·M_L·diag(u^{p−1}) is symmetric (indefinite near the solution —
//! least-energy solutions have Morse index 1), factored by the skyline
//! LDLᵀ, with step halving on the relative residual ‖F‖₂/‖M_L u^p‖₂ and a
//! tiny diagonal nudge retried when a pivot degenerates.  Warm starts from
//! a previous exponent land inside Newton's basin after a short descent.

use std::sync::Arc;

use crate::mesh::Mesh;
use crate::sparse::{
    assemble_mass, assemble_stiffness, InteriorMap, SkylineLdlt, SparseError, SparseOperator,
};

use super::{
    default_init, lumped_power_sum, Field, ProblemParams, SolveReport, SolverError,
};

const BB_CAP: usize = 4000;
const BB_GRADIENT_GATE: f64 = 3e-4;
const BB_MEMORY: usize = 8;
const BB_ALPHA_MIN: f64 = 1e-30;
const BB_ALPHA_MAX: f64 = 1e30;
const NEWTON_CAP: usize = 60;
const STAGNATION_WINDOW: usize = 100;
const STAGNATION_DROP: f64 = 1e-14;

/// exp(e·log u) with log u clamped at −700/p so powers of tiny nodal values
/// stay strictly positive instead of underflowing the Newton diagonal.
fn clamped_pow(u: f64, e: f64, log_floor: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (e * u.ln().max(log_floor)).exp()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Interior-reduced problem data shared by both phases.
struct System {
    map: InteriorMap,
    /// A = K + λ·M_L on interior vertices.
    a: SparseOperator,
    /// Diagonal of the interior lumped mass.
    masses: Vec<f64>,
    p: f64,
    log_floor: f64,
}

impl System {
    fn build(mesh: &Mesh, params: &ProblemParams) -> Result<Self, SolverError> {
        let k = assemble_stiffness(mesh)?;
        let m = assemble_mass(mesh, true)?;
        let map = InteriorMap::new(mesh);
        let a = map
            .reduce_operator(&k)
            .add_scaled(params.lambda(), &map.reduce_operator(&m));
        let masses = map.reduce_operator(&m).diag();
        Ok(System {
            map,
            a,
            masses,
            p: params.p(),
            log_floor: -700.0 / params.p(),
        })
    }

    /// Scale v onto the constraint Σ m|v|^{p+1} = 1.
    fn normalize(&self, v: &mut [f64]) -> Result<(), SolverError> {
        let (sup, sum) = lumped_power_sum(&self.masses, v, self.p + 1.0);
        if sup == 0.0 {
            return Err(SolverError::ZeroField);
        }
        let scale = sup * sum.powf(1.0 / (self.p + 1.0));
        for x in v.iter_mut() {
            *x /= scale;
        }
        Ok(())
    }

    /// m⊙u^p with the clamped log-domain power.
    fn lumped_power(&self, u: &[f64]) -> Vec<f64> {
        self.masses
            .iter()
            .zip(u)
            .map(|(m, &x)| m * clamped_pow(x, self.p, self.log_floor))
            .collect()
    }

    /// Euler–Lagrange residual F = Au − m⊙u^p and its relative norm.
    fn residual(&self, u: &[f64]) -> (Vec<f64>, f64) {
        let mut f = self.a.matvec(u);
        let mw = self.lumped_power(u);
        for (fi, wi) in f.iter_mut().zip(&mw) {
            *fi -= wi;
        }
        let scale = norm(&mw);
        let rel = if scale > 0.0 {
            norm(&f) / scale
        } else {
            f64::INFINITY
        };
        (f, rel)
    }

    /// Scale-invariant quotient of an interior iterate.
    fn quotient_of(&self, u: &[f64]) -> f64 {
        let (sup, sum) = lumped_power_sum(&self.masses, u, self.p + 1.0);
        self.a.bilinear(u, u) / (sup * sup * sum.powf(2.0 / (self.p + 1.0)))
    }
}

/// Projected Barzilai–Borwein descent with a nonmonotone line search;
/// returns the constrained minimizer candidate, its quotient, and the
/// iteration count.
///
/// Plain BB is nonmonotone by design, but on this nonconvex constraint set
/// an unsafeguarded step can eject a warm start from its basin and wander
/// indefinitely.  Each step is therefore backtracked until the quotient
/// drops below the maximum over the last few accepted values (Grippo-style
/// reference), which makes warm-started continuation stages as reliable as
/// cold starts.
fn descend(sys: &System, start: Vec<f64>) -> Result<(Vec<f64>, f64, usize), SolverError> {
    let mut v: Vec<f64> = start.iter().map(|x| x.abs()).collect();
    sys.normalize(&mut v)?;
    let mut av = sys.a.matvec(&v);
    let mut theta = dot(&v, &av);
    let gradient = |v: &[f64], av: &[f64], theta: f64, sys: &System| -> Vec<f64> {
        let mw = sys.lumped_power(v);
        av.iter()
            .zip(&mw)
            .map(|(a, w)| 2.0 * (a - theta * w))
            .collect()
    };
    let project = |v: &[f64], g: &[f64], step: f64| -> Vec<f64> {
        v.iter()
            .zip(g)
            .map(|(x, gi)| (x - step * gi).abs())
            .collect()
    };
    let mut g = gradient(&v, &av, theta, sys);

    // Size the first step from a finite-difference curvature probe; a blind
    // guess carries the coefficient-vector scale and starts the search far
    // off, wasting backtracking halvings on every early iteration.
    let mut alpha = {
        let t = 1e-3 * norm(&v) / norm(&g).max(f64::MIN_POSITIVE);
        let mut w = project(&v, &g, t);
        let mut probe = t;
        if sys.normalize(&mut w).is_ok() {
            let aw = sys.a.matvec(&w);
            let theta_w = dot(&w, &aw);
            if theta_w.is_finite() {
                let gw = gradient(&w, &aw, theta_w, sys);
                let s: Vec<f64> = w.iter().zip(&v).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = gw.iter().zip(&g).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 0.0 {
                    probe = dot(&s, &s) / sy;
                }
            }
        }
        probe.clamp(BB_ALPHA_MIN, BB_ALPHA_MAX)
    };

    let mut recent = [theta; BB_MEMORY];
    let mut flat = 0usize;
    let mut iters = 0usize;

    for _ in 0..BB_CAP {
        iters += 1;
        if norm(&g) <= BB_GRADIENT_GATE * 2.0 * norm(&av) {
            break;
        }
        let theta_ref = recent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut step = alpha;
        let mut accepted = false;
        let mut w = Vec::new();
        let mut aw = Vec::new();
        let mut theta_w = theta;
        for _ in 0..60 {
            w = project(&v, &g, step);
            if sys.normalize(&mut w).is_err() {
                step *= 0.25;
                continue;
            }
            aw = sys.a.matvec(&w);
            theta_w = dot(&w, &aw);
            let travel_sq: f64 = w.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum();
            if theta_w.is_finite() && theta_w <= theta_ref - 1e-6 * travel_sq / step {
                accepted = true;
                break;
            }
            step *= 0.25;
        }
        if !accepted {
            break; // direction exhausted: hand the iterate to Newton as-is
        }
        let gw = gradient(&w, &aw, theta_w, sys);
        let s: Vec<f64> = w.iter().zip(&v).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gw.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        alpha = if sy > 0.0 {
            (dot(&s, &s) / sy).clamp(BB_ALPHA_MIN, BB_ALPHA_MAX)
        } else {
            (step * 10.0).clamp(BB_ALPHA_MIN, BB_ALPHA_MAX)
        };
        let drop = (theta - theta_w) / theta_w.abs().max(f64::MIN_POSITIVE);
        flat = if drop < STAGNATION_DROP { flat + 1 } else { 0 };
        recent[iters % BB_MEMORY] = theta_w;
        v = w;
        av = aw;
        theta = theta_w;
        g = gw;
        if flat >= STAGNATION_WINDOW {
            break; // plateau: let Newton decide whether this is converged
        }
    }
    Ok((v, theta, iters))
}

/// Damped Newton polish of F(u) = Au − M_L u^p = 0 starting from the
/// rescaled minimizer; returns (u, relative residual, iterations).
fn polish(sys: &System, mut u: Vec<f64>) -> Result<(Vec<f64>, f64, usize), SolverError> {
    let (mut f, mut res) = sys.residual(&u);
    let mut iters = 0usize;
    while iters < NEWTON_CAP && res > 0.0 {
        iters += 1;
        let jac_diag: Vec<f64> = sys
            .masses
            .iter()
            .zip(&u)
            .map(|(m, &x)| m * sys.p * clamped_pow(x, sys.p - 1.0, sys.log_floor))
            .collect();
        let h = sys.a.add_scaled(-1.0, &SparseOperator::diagonal(&jac_diag));
        let fact = factor_with_nudge(&h, &sys.masses)?;
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let delta = fact.solve(&rhs);
        let mut accepted = false;
        let mut t = 1.0;
        for _ in 0..25 {
            let trial: Vec<f64> = u
                .iter()
                .zip(&delta)
                .map(|(x, d)| (x + t * d).abs())
                .collect();
            let (f_t, res_t) = sys.residual(&trial);
            if res_t < res * (1.0 - 1e-4 * t) {
                u = trial;
                f = f_t;
                res = res_t;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break; // at the attainable floor for this system
        }
    }
    Ok((u, res, iters))
}

/// Factor the (symmetric, possibly indefinite) Newton matrix, retrying with
/// a growing diagonal mass nudge if a pivot degenerates exactly.
fn factor_with_nudge(h: &SparseOperator, masses: &[f64]) -> Result<SkylineLdlt, SolverError> {
    let mut nudge = 1e-10 * h.max_abs();
    for attempt in 0..5 {
        let shifted = if attempt == 0 {
            h.clone()
        } else {
            let d: Vec<f64> = masses.iter().map(|m| m * nudge).collect();
            nudge *= 100.0;
            h.add_scaled(1.0, &SparseOperator::diagonal(&d))
        };
        match SkylineLdlt::factor(&shifted) {
            Ok(f) => return Ok(f),
            Err(SparseError::SingularPivot { .. }) if attempt < 4 => continue,
            Err(e) => return Err(e.into()),
        }
    }
    unreachable!("loop returns on the last attempt")
}

/// Minimize J_λ on `mesh` from `init`, then rescale so the discrete PDE
/// K u + λM_L u = M_L u^p holds with relative residual at most `tol`.
///
/// The returned report carries the attained quotient c² = J_λ(v), the
/// residual actually achieved, and the maximizing vertex.  Failure to pass
/// `tol` after the Newton polish reaches its attainable floor produces
/// [`SolverError::Stagnation`] with the last iterate attached.
pub fn minimize(
    params: &ProblemParams,
    mesh: &Arc<Mesh>,
    init: &Field,
    tol: f64,
) -> Result<SolveReport, SolverError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(SolverError::InvalidParams {
            p: params.p(),
            lambda: params.lambda(),
        });
    }
    if !Arc::ptr_eq(init.mesh(), mesh) && init.values().len() != mesh.n_vertices() {
        return Err(SolverError::MeshMismatch {
            expected: mesh.n_vertices(),
            got: init.values().len(),
        });
    }
    let sys = System::build(mesh, params)?;
    let start = sys.map.reduce_vector(init.values());
    let (v, theta, bb_iters) = descend(&sys, start)?;

    // u = θ^{1/(p−1)} v realizes "after a multiplicative constant": the
    // exponent can leave f64 range only for p → 1⁺, where the rescale is
    // the overflow, not the power evaluation.
    let log_scale = theta.ln() / (params.p() - 1.0);
    if log_scale.abs() > 700.0 {
        return Err(SolverError::Overflow {
            exponent: log_scale,
        });
    }
    let scale = log_scale.exp();
    let u0: Vec<f64> = v.iter().map(|x| x * scale).collect();
    let sup0 = u0.iter().fold(0.0_f64, |m, &x| m.max(x));
    if params.p() * sup0.ln() > 700.0 {
        return Err(SolverError::Overflow {
            exponent: params.p() * sup0.ln(),
        });
    }
    let (u, res, newton_iters) = polish(&sys, u0)?;

    let c_squared = sys.quotient_of(&u);
    let full = sys.map.extend_vector(&u);
    let solution = Field::new(Arc::clone(mesh), full)?;
    if res > tol {
        return Err(SolverError::Stagnation {
            residual: res,
            quotient: c_squared,
            last: Box::new(solution),
        });
    }
    let (max_vertex, sup_norm) = solution.max_vertex();
    Ok(SolveReport {
        solution,
        params: *params,
        c_squared,
        pde_residual: res,
        iterations: bb_iters + newton_iters,
        p_path: vec![params.p()],
        max_point: mesh.vertices()[max_vertex],
        max_vertex,
        sup_norm,
        max_point_drift: 0.0,
    })
}

/// Track the least-energy branch along an increasing exponent `schedule`
/// ending exactly at `target.p`, warm-starting every stage from the
/// previous solution.  The first stage starts from the Dirichlet ground
/// state and must sit at p ≤ 5, where the quotient is easy.
pub fn continue_in_p(
    target: &ProblemParams,
    mesh: &Arc<Mesh>,
    schedule: &[f64],
    tol: f64,
) -> Result<Vec<SolveReport>, SolverError> {
    if schedule.is_empty() {
        return Err(SolverError::ScheduleEmpty);
    }
    for (i, w) in schedule.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(SolverError::ScheduleNotIncreasing { index: i + 1 });
        }
    }
    if schedule[0] > 5.0 {
        return Err(SolverError::ScheduleStartsTooHigh {
            first: schedule[0],
        });
    }
    let last = *schedule.last().unwrap();
    if last != target.p() {
        return Err(SolverError::ScheduleEndMismatch {
            last,
            target: target.p(),
        });
    }

    let mut reports: Vec<SolveReport> = Vec::with_capacity(schedule.len());
    let mut warm = default_init(mesh)?;
    for (stage, &p) in schedule.iter().enumerate() {
        let stage_result = ProblemParams::new(target.lambda(), p)
            .and_then(|params| minimize(&params, mesh, &warm, tol));
        match stage_result {
            Ok(mut report) => {
                report.p_path = schedule[..=stage].to_vec();
                if let Some(prev) = reports.last() {
                    let dx = report.max_point.x - prev.max_point.x;
                    let dy = report.max_point.y - prev.max_point.y;
                    report.max_point_drift = dx.hypot(dy);
                }
                warm = report.solution.clone();
                reports.push(report);
            }
            Err(source) => {
                return Err(SolverError::StageFailed {
                    p,
                    completed: reports,
                    source: Box::new(source),
                });
            }
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::mesh::{build_mesh, DomainSpec};
    use crate::solver::{discrete_lambda1, gaussian_init, quotient};
    use std::collections::HashMap;

    fn solve_on(
        spec: &DomainSpec,
        h: f64,
        lambda: f64,
        p: f64,
    ) -> (Arc<Mesh>, SolveReport) {
        let mesh = Arc::new(build_mesh(spec, h).unwrap());
        let params = ProblemParams::new(lambda, p).unwrap();
        let init = default_init(&mesh).unwrap();
        let report = minimize(&params, &mesh, &init, 1e-9).unwrap();
        (mesh, report)
    }

    #[test]
    fn disk_solution_satisfies_the_euler_lagrange_system() {
        let (mesh, report) = solve_on(&DomainSpec::disk(1.0).unwrap(), 0.05, 0.0, 3.0);
        assert!(report.pde_residual <= 1e-9, "residual {}", report.pde_residual);

        // Independent re-assembly check of K u + λM_L u = M_L u^p row by row.
        let k = assemble_stiffness(&mesh).unwrap();
        let m = assemble_mass(&mesh, true).unwrap();
        let u = report.solution.values();
        let ku = k.matvec(u);
        let masses = m.diag();
        let mut err = 0.0_f64;
        let mut scale = 0.0_f64;
        for i in 0..mesh.n_vertices() {
            if mesh.boundary()[i] {
                continue;
            }
            let rhs = masses[i] * u[i].powf(report.params.p());
            err += (ku[i] - rhs) * (ku[i] - rhs);
            scale += rhs * rhs;
        }
        assert!(
            err.sqrt() / scale.sqrt() < 2e-9,
            "independent residual {}",
            err.sqrt() / scale.sqrt()
        );

        // Positivity of all interior values.
        for i in 0..mesh.n_vertices() {
            if !mesh.boundary()[i] {
                assert!(u[i] > 0.0, "interior vertex {i} has u = {}", u[i]);
            }
        }

        // Quotient consistency and the energy identity ∫|∇u|²+λ∫u² = ∫u^{p+1}.
        let q = quotient(&report.solution, &report.params).unwrap();
        assert!(
            ((q - report.c_squared) / report.c_squared).abs() < 1e-10,
            "quotient {q} vs c² {}",
            report.c_squared
        );
        let energy = k.bilinear(u, u);
        let mass_p1: f64 = masses
            .iter()
            .zip(u)
            .map(|(m, &x)| m * x.powf(report.params.p() + 1.0))
            .sum();
        assert!(
            ((energy - mass_p1) / mass_p1).abs() < 1e-8,
            "energy {energy} vs ∫u^{{p+1}} {mass_p1}"
        );

        // At p = 3 the amplitude equals the first zero of the unit-height
        // radial profile (u = a·w(a·x) with w(0) = 1), which sits near 3.6;
        // the amplitude then decreases in p toward √e.
        assert!(
            report.sup_norm > 3.2 && report.sup_norm < 3.9,
            "p = 3 disk amplitude {} outside the expected window",
            report.sup_norm
        );
    }

    #[test]
    fn amplitude_lower_bound_is_exact_discretely() {
        // Testing the PDE against the positive discrete ground state gives
        // sup u^{p−1} ≥ λ + λ₁ exactly, up to the solver tolerance.
        let spec = DomainSpec::rectangle(1.0, 1.0).unwrap();
        let (mesh, report) = solve_on(&spec, 0.08, 1.0, 5.0);
        let lam1 = discrete_lambda1(&mesh).unwrap();
        let lower = report.params.lambda() + lam1;
        let got = report.sup_norm.powf(report.params.p() - 1.0);
        assert!(
            got >= lower * (1.0 - 1e-8),
            "sup^{{p−1}} = {got} below λ+λ₁ = {lower}"
        );
    }

    #[test]
    fn symmetric_meshes_produce_symmetric_solutions() {
        let (mesh, report) = solve_on(&DomainSpec::rectangle(1.0, 1.0).unwrap(), 0.1, 0.0, 7.0);
        assert!(mesh.is_vertex_symmetric());
        assert!(report.max_point.x.abs() < 1e-12 && report.max_point.y.abs() < 1e-12);

        // +0.0 offset folds −0.0 into +0.0 so negated axis coordinates hash
        // to the same key.
        let key = |x: f64, y: f64| ((x + 0.0).to_bits(), (y + 0.0).to_bits());
        let mut by_bits: HashMap<(u64, u64), usize> = HashMap::new();
        for (i, v) in mesh.vertices().iter().enumerate() {
            by_bits.insert(key(v.x, v.y), i);
        }
        let u = report.solution.values();
        for (i, v) in mesh.vertices().iter().enumerate() {
            let j = by_bits[&key(-v.x, -v.y)];
            assert!(
                (u[i] - u[j]).abs() <= 1e-9 * report.sup_norm,
                "antipodal vertices {i},{j} differ: {} vs {}",
                u[i],
                u[j]
            );
        }
    }

    #[test]
    fn continuation_tracks_the_branch_with_bounded_energies() {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.07).unwrap());
        let target = ProblemParams::new(0.0, 18.0).unwrap();
        let schedule = crate::solver::default_schedule(18.0);
        let reports = continue_in_p(&target, &mesh, &schedule, 1e-9).unwrap();
        assert_eq!(reports.len(), schedule.len());
        for (i, r) in reports.iter().enumerate() {
            assert_eq!(r.p_path, schedule[..=i]);
            assert!(r.pde_residual <= 1e-9);
            assert!(r.sup_norm < 4.0, "sup blew past the uniform bound");
            if r.params.p() >= 4.0 {
                // The amplitude decreases in p; past the first stage it is
                // already under 3 on its way to √e.
                assert!(r.sup_norm < 3.0, "sup {} at p {}", r.sup_norm, r.params.p());
            }
            assert!(r.c_squared > 0.0);
            // The disk maximizer never leaves the central vertex.
            assert!(r.max_point_drift < 1e-12, "drift {}", r.max_point_drift);
        }
        // Amplitudes fall monotonically along the branch.
        for pair in reports.windows(2) {
            assert!(
                pair[1].sup_norm < pair[0].sup_norm,
                "amplitude rose from {} to {}",
                pair[0].sup_norm,
                pair[1].sup_norm
            );
        }
        // c²·p stays in a fixed window along the schedule.
        let c2p: Vec<f64> = reports
            .iter()
            .map(|r| r.c_squared * r.params.p())
            .collect();
        for v in &c2p {
            assert!(*v > 1.0 && *v < 200.0, "c²p = {v} out of window");
        }
    }

    #[test]
    fn singleton_schedule_is_exactly_a_direct_solve() {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.12).unwrap());
        let params = ProblemParams::new(0.5, 4.0).unwrap();
        let init = default_init(&mesh).unwrap();
        let direct = minimize(&params, &mesh, &init, 1e-9).unwrap();
        let chained = continue_in_p(&params, &mesh, &[4.0], 1e-9).unwrap();
        assert_eq!(chained.len(), 1);
        assert_eq!(direct.c_squared.to_bits(), chained[0].c_squared.to_bits());
        assert_eq!(direct.sup_norm.to_bits(), chained[0].sup_norm.to_bits());
    }

    #[test]
    fn schedules_are_validated() {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.2).unwrap());
        let target = ProblemParams::new(0.0, 6.0).unwrap();
        assert!(matches!(
            continue_in_p(&target, &mesh, &[], 1e-9),
            Err(SolverError::ScheduleEmpty)
        ));
        assert!(matches!(
            continue_in_p(&target, &mesh, &[3.0, 3.0, 6.0], 1e-9),
            Err(SolverError::ScheduleNotIncreasing { index: 1 })
        ));
        assert!(matches!(
            continue_in_p(&target, &mesh, &[5.5, 6.0], 1e-9),
            Err(SolverError::ScheduleStartsTooHigh { .. })
        ));
        assert!(matches!(
            continue_in_p(&target, &mesh, &[3.0, 5.0], 1e-9),
            Err(SolverError::ScheduleEndMismatch { .. })
        ));
    }

    #[test]
    fn unreachable_tolerance_stagnates_with_the_iterate_attached() {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.2).unwrap());
        let params = ProblemParams::new(0.0, 3.0).unwrap();
        let init = default_init(&mesh).unwrap();
        match minimize(&params, &mesh, &init, 1e-30) {
            Err(SolverError::Stagnation { residual, last, .. }) => {
                assert!(residual < 1e-8, "polish should still get close: {residual}");
                let (_, sup) = last.max_vertex();
                assert!(sup.is_finite() && sup > 1.0);
            }
            other => panic!("expected stagnation, got {other:?}"),
        }
    }

    #[test]
    fn rescale_overflow_near_p_one_is_reported() {
        // θ^{1/(p−1)} leaves f64 range as p → 1⁺; the error says so rather
        // than returning infinities.
        let mesh = Arc::new(build_mesh(&DomainSpec::rectangle(1.0, 1.0).unwrap(), 0.15).unwrap());
        let params = ProblemParams::new(0.0, 1.0 + 1e-4).unwrap();
        let init = default_init(&mesh).unwrap();
        assert!(matches!(
            minimize(&params, &mesh, &init, 1e-9),
            Err(SolverError::Overflow { .. })
        ));
    }

    #[test]
    fn gaussian_warm_start_reaches_the_same_solution() {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.1).unwrap());
        let params = ProblemParams::new(0.0, 8.0).unwrap();
        let bump = gaussian_init(&mesh, Point::new(0.0, 0.0), 0.4).unwrap();
        let from_bump = minimize(&params, &mesh, &bump, 1e-9).unwrap();
        let from_mode = minimize(&params, &mesh, &default_init(&mesh).unwrap(), 1e-9).unwrap();
        assert!(
            ((from_bump.c_squared - from_mode.c_squared) / from_mode.c_squared).abs() < 1e-9,
            "different minima: {} vs {}",
            from_bump.c_squared,
            from_mode.c_squared
        );
        assert!(gaussian_init(&mesh, Point::new(9.0, 0.0), 0.4).is_err());
        assert!(gaussian_init(&mesh, Point::new(0.0, 0.0), -0.1).is_err());
    }
}

//! Shared, lazily-computed solves for the diagnostic tests.  Solving is the
//! dominant cost of this test module, so each fixture runs once per test
//! process and is borrowed everywhere else.

use std::sync::{Arc, OnceLock};

use crate::geometry::Point;
use crate::mesh::{build_mesh, refine, DomainSpec, GradingSpec, Mesh, RefineOptions};
use crate::solver::{default_init, minimize, ProblemParams, SolveReport};

static COARSE_DISK: OnceLock<(Arc<Mesh>, SolveReport)> = OnceLock::new();
static GRADED_DISK: OnceLock<(Arc<Mesh>, SolveReport)> = OnceLock::new();
static SQUARE: OnceLock<(Arc<Mesh>, SolveReport)> = OnceLock::new();

fn solve(mesh: Arc<Mesh>, lambda: f64, p: f64) -> (Arc<Mesh>, SolveReport) {
    let params = ProblemParams::new(lambda, p).unwrap();
    let init = default_init(&mesh).unwrap();
    let report = minimize(&params, &mesh, &init, 1e-9).unwrap();
    (mesh, report)
}

/// Disk(1), λ = 0, p = 8 on a uniform h = 0.1 mesh: cheap, and its
/// concentration window is deliberately unresolved.
pub fn coarse_disk_report() -> &'static (Arc<Mesh>, SolveReport) {
    COARSE_DISK.get_or_init(|| {
        let mesh = Arc::new(build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.1).unwrap());
        solve(mesh, 0.0, 8.0)
    })
}

/// Disk(1), λ = 0, p = 10 on a mesh graded into the concentration core
/// (ε ≈ 0.013 there, so inner_h = 3·10⁻³ resolves the window).
pub fn graded_disk_report() -> &'static (Arc<Mesh>, SolveReport) {
    GRADED_DISK.get_or_init(|| {
        let base = build_mesh(&DomainSpec::disk(1.0).unwrap(), 0.1).unwrap();
        let grading = GradingSpec {
            focus: Point::new(0.0, 0.0),
            inner_h: 3.0e-3,
            outer_h: 0.1,
            transition_radius: 0.08,
        };
        let mesh = Arc::new(refine(&base, &grading, &RefineOptions::default()).unwrap());
        solve(mesh, 0.0, 10.0)
    })
}

/// Unit square, λ = 1, p = 5, uniform h = 0.1.
pub fn square_report() -> &'static (Arc<Mesh>, SolveReport) {
    SQUARE.get_or_init(|| {
        let mesh = Arc::new(build_mesh(&DomainSpec::rectangle(1.0, 1.0).unwrap(), 0.1).unwrap());
        solve(mesh, 1.0, 5.0)
    })
}

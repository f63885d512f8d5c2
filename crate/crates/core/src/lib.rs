//! Numerical laboratory for the planar Lane–Emden-type problem
//!
//! ```text
//!     -Δu + λ u = u^p ,   u > 0   in Ω ⊂ ℝ²,      u = 0   on ∂Ω,
//! ```
//!
//! with λ ≥ 0 and a large exponent p > 1.  Least-energy solutions are
//! computed by minimizing the Rayleigh-type quotient
//!
//! ```text
//!     J_λ(v) = ( ∫|∇v|² + λ∫v² ) / ( ∫|v|^{p+1} )^{2/(p+1)}
//! ```
//!
//! over piecewise-linear finite-element fields, and the library provides the
//! instruments needed to study their concentration behaviour as p → ∞:
//!
//! * [`mesh`] — triangulations of disks, ellipses, rectangles and convex
//!   polygons, with graded refinement toward a concentration point;
//! * [`sparse`] — compressed sparse operators, conjugate gradients, a skyline
//!   LDLᵀ factorization and a shift-invert subspace-iteration eigensolver;
//! * [`solver`] — the constrained quotient minimizer and continuation in p;
//! * [`diagnostics`] — rescaled spike profiles, star-shapedness tests,
//!   linearized spectra and energy-bound tables;
//! * [`limit`] — the explicit limit objects: the Liouville bubble
//!   `U(x) = log(8μ²/(1+μ²|x|²)²)`, the kernel functions of its linearized
//!   operator, Moser-function energy bounds and the Robin function;
//! * [`oracle`] — an independent radial shooting solver on the disk used to
//!   cross-check the finite-element results;
//! * [`workflow`] — drivers that combine the above (amplitude-adaptive
//!   graded solves, oracle-equivalence studies).
//!
//! Conventions used throughout:
//!
//! * fields are nodal values on the mesh vertices, Dirichlet rows eliminated;
//! * nonlinear terms use lumped (nodal) quadrature, so the discrete
//!   Euler–Lagrange system is `K u + λ M_L u = M_L u^p` exactly;
//! * all algorithms are deterministic: identical inputs produce bitwise
//!   identical outputs, file formats included.

pub mod diag;
pub mod geometry;
pub mod limit;
pub mod mesh;
pub mod oracle;
pub mod solver;
pub mod sparse;

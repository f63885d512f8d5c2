//! Experiment harness around the `bubblelab` library.
//!
//! The binary wraps the library's solver and diagnostics behind a small set
//! of subcommands so that parameter studies can be scripted and their
//! artifacts (CSV tables, JSON summaries) diffed across runs.  All output is
//! deterministic: identical configuration and binary produce byte-identical
//! artifacts.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use bubblelab::diag::epsilon_scale;
use bubblelab::mesh::{build_mesh, DomainSpec};
use bubblelab::solver::{continue_in_p, default_schedule, ProblemParams, SolveReport};

#[derive(Parser)]
#[command(name = "bubblelab", version, about = "Numerical laboratory for least-energy solutions of -Δu + λu = u^p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one (λ, p) cell and print a JSON summary to stdout.
    Solve(SolveArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Domain: `disk:R`, `ellipse:A,B`, `rect:WxH`, or `square:S`.
    #[arg(long, default_value = "disk:1")]
    domain: String,
    /// Linear zero-order coefficient λ ≥ 0.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Nonlinearity exponent p > 1.
    #[arg(long, default_value_t = 3.0)]
    p: f64,
    /// Target mesh size h.
    #[arg(long, default_value_t = 0.05)]
    h: f64,
    /// Euler–Lagrange residual tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write `solution.csv` and `summary.json` into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// JSON summary of a single solve, stable across runs.
#[derive(Serialize)]
struct SolveSummary {
    domain: String,
    lambda: f64,
    p: f64,
    h_max: f64,
    vertices: usize,
    sup_norm: f64,
    c_squared: f64,
    pde_residual: f64,
    iterations: usize,
    max_point: [f64; 2],
    epsilon: f64,
}

fn parse_domain(text: &str) -> Result<DomainSpec> {
    let (kind, rest) = text
        .split_once(':')
        .with_context(|| format!("domain `{text}` lacks a `kind:size` separator"))?;
    let nums: Vec<f64> = rest
        .split([',', 'x'])
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("domain size `{t}` is not a number"))
        })
        .collect::<Result<_>>()?;
    let spec = match (kind, nums.as_slice()) {
        ("disk", [r]) => DomainSpec::disk(*r),
        ("square", [s]) => DomainSpec::rectangle(*s, *s),
        ("rect", [w, h]) => DomainSpec::rectangle(*w, *h),
        ("ellipse", [a, b]) => DomainSpec::ellipse(*a, *b),
        _ => bail!("unrecognized domain `{text}`; expected disk:R, square:S, rect:WxH, or ellipse:A,B"),
    };
    spec.with_context(|| format!("domain `{text}` is invalid"))
}

/// RFC-4180 CSV (CRLF rows) of vertex values: `x,y,u`.
fn field_csv(report: &SolveReport) -> String {
    let mut out = String::from("x,y,u\r\n");
    let mesh = report.solution.mesh();
    for (v, u) in mesh.vertices().iter().zip(report.solution.values()) {
        out.push_str(&format!("{},{},{}\r\n", v.x, v.y, u));
    }
    out
}

fn run_solve(args: &SolveArgs) -> Result<()> {
    let domain = parse_domain(&args.domain)?;
    let mesh = Arc::new(build_mesh(&domain, args.h).context("meshing failed")?);
    let params = ProblemParams::new(args.lambda, args.p).context("invalid (λ, p)")?;
    let schedule = default_schedule(args.p);
    let reports = continue_in_p(&params, &mesh, &schedule, args.tol).context("solve failed")?;
    let report = reports.last().expect("continuation returns one report per stage");

    let summary = SolveSummary {
        domain: args.domain.clone(),
        lambda: args.lambda,
        p: args.p,
        h_max: mesh.h_max(),
        vertices: mesh.n_vertices(),
        sup_norm: report.sup_norm,
        c_squared: report.c_squared,
        pde_residual: report.pde_residual,
        iterations: report.iterations,
        max_point: [report.max_point.x, report.max_point.y],
        epsilon: epsilon_scale(args.p, report.sup_norm),
    };
    let rendered = serde_json::to_string_pretty(&summary)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        fs::write(dir.join("solution.csv"), field_csv(report))?;
        fs::write(dir.join("summary.json"), &rendered)?;
    }
    println!("{rendered}");
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Solve(args) => run_solve(args),
    }
}

//! CSV renderings of radial solutions: RFC 4180 framing (CRLF, one header
//! row) with purely numeric payloads, matching the planar diagnostic
//! emitters so downstream tooling can treat both pipelines uniformly.

use super::shoot::{quotient_scale, RadialSolution};

const CRLF: &str = "\r\n";

/// One row per grid node: radius, value, radial derivative.
pub fn trace_csv(sol: &RadialSolution) -> String {
    let mut out = String::from("r,u,du");
    out.push_str(CRLF);
    for ((r, u), du) in sol.grid.iter().zip(&sol.values).zip(&sol.derivative) {
        out.push_str(&format!("{r},{u},{du}{CRLF}"));
    }
    out
}

/// One row per solution, in input order: the amplitude table of a sweep.
pub fn amplitude_table_csv(solutions: &[RadialSolution]) -> String {
    let mut out = String::from("p,lambda,amplitude,c_squared,epsilon");
    out.push_str(CRLF);
    for sol in solutions {
        out.push_str(&format!(
            "{},{},{},{},{}{CRLF}",
            sol.p,
            sol.lambda,
            sol.amplitude,
            quotient_scale(sol),
            sol.epsilon()
        ));
    }
    out
}

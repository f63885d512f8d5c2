//! CSV renderings of the diagnostic reports: RFC 4180 framing (CRLF line
//! endings, a single header row) with purely numeric payloads, so no field
//! ever needs quoting.  Numbers are written with Rust's shortest
//! round-trip formatting and parse back to the identical f64.

use super::{BoundsRow, ProfileComparison, SpectrumReport, StarShapeReport};

const CRLF: &str = "\r\n";

/// One row per kept sample: rescaled coordinates, radius, φ, U, |φ−U|.
pub fn profile_csv(comparison: &ProfileComparison) -> String {
    let mut out = String::from("x,y,radius,phi,bubble,discrepancy");
    out.push_str(CRLF);
    for (((x, r), phi), bubble) in comparison
        .sample_points
        .iter()
        .zip(&comparison.sample_radii)
        .zip(&comparison.phi_values)
        .zip(&comparison.bubble_values)
    {
        out.push_str(&format!(
            "{},{},{},{},{},{}{CRLF}",
            x.x,
            x.y,
            r,
            phi,
            bubble,
            (phi - bubble).abs()
        ));
    }
    out
}

/// One row per violating triangle.
pub fn violations_csv(report: &StarShapeReport) -> String {
    let mut out = String::from("triangle,barycenter_x,barycenter_y,inner_product");
    out.push_str(CRLF);
    for v in &report.violations {
        out.push_str(&format!(
            "{},{},{},{}{CRLF}",
            v.triangle, v.barycenter.x, v.barycenter.y, v.inner_product
        ));
    }
    out
}

/// One row per report in schedule order.
pub fn bounds_csv(rows: &[BoundsRow]) -> String {
    let mut out = String::from(
        "p,lambda,sup_norm,sup_pow_p_minus_1,c_squared_p,p_mass_p_plus_1,p_h1_energy,sobolev_ratio",
    );
    out.push_str(CRLF);
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}{CRLF}",
            r.p,
            r.lambda,
            r.sup_norm,
            r.sup_pow_p_minus_1,
            r.c_squared_p,
            r.p_mass_p_plus_1,
            r.p_h1_energy,
            r.sobolev_ratio
        ));
    }
    out
}

/// One row per eigenvalue, ascending.
pub fn spectrum_csv(report: &SpectrumReport) -> String {
    let mut out = String::from("index,eigenvalue");
    out.push_str(CRLF);
    for (i, v) in report.eigenvalues.iter().enumerate() {
        out.push_str(&format!("{i},{v}{CRLF}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::{linearized_spectrum, rescaled_profile};
    use crate::diag::testutil::coarse_disk_report;

    #[test]
    fn profile_rows_round_trip_through_parse() {
        let (_, report) = coarse_disk_report();
        let comparison = rescaled_profile(report, &[1.0]).unwrap();
        let text = profile_csv(&comparison);
        let mut lines = text.split("\r\n");
        assert_eq!(lines.next().unwrap(), "x,y,radius,phi,bubble,discrepancy");
        let mut rows = 0;
        for line in lines.filter(|l| !l.is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 6, "bad row: {line}");
            let phi: f64 = fields[3].parse().unwrap();
            assert_eq!(
                phi.to_bits(),
                comparison.phi_values[rows].to_bits(),
                "φ does not round-trip at row {rows}"
            );
            rows += 1;
        }
        assert_eq!(rows, comparison.phi_values.len());
        assert!(text.ends_with("\r\n"), "final row must be CRLF-terminated");
    }

    #[test]
    fn spectrum_rows_match_the_report() {
        let (_, report) = coarse_disk_report();
        let spectrum = linearized_spectrum(report, 4).unwrap();
        let text = spectrum_csv(&spectrum);
        let body: Vec<&str> = text
            .split("\r\n")
            .skip(1)
            .filter(|l| !l.is_empty())
            .collect();
        assert_eq!(body.len(), 4);
        let first: f64 = body[0].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(first.to_bits(), spectrum.eigenvalues[0].to_bits());
    }
}

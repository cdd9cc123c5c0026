//! Executes validated scenarios and renders the outputs: one report JSON
//! per scenario, a summary CSV, and optional sweep CSVs for plotting.
//!
//! Numerical failures carry the scenario label and map to their own exit
//! code, distinct from configuration errors, so batch runs can be triaged
//! from the shell.

use crate::config::{Scenario, Sweep, SweepParameter};
use crate::inputs::{build_body, build_density};
use affineq::inequalities::{
    eval_bs_asymmetric, eval_bs_symmetric, eval_geometric, eval_moment_ineq, eval_renyi,
    GeometricCase, IneqReport,
};
use affineq::sphere_grid;
use std::fmt;

/// Default saturation tolerance: the two-density product bound carries a
/// looser certified accuracy than the single-density bounds.
pub fn default_tol(ineq: &str) -> f64 {
    if ineq == "moment-product" {
        1e-2
    } else {
        1e-3
    }
}

fn default_resolution(dim: usize) -> usize {
    if dim == 2 {
        512
    } else {
        48
    }
}

fn default_subdivisions(dim: usize) -> usize {
    if dim == 2 {
        96
    } else {
        32
    }
}

/// Command-line / environment overrides applied on top of scenario
/// settings.
#[derive(Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub resolution: Option<usize>,
    pub tol: Option<f64>,
}

/// A scenario failure that should not abort the remaining scenarios.
#[derive(Debug)]
pub struct RunFailure {
    pub label: String,
    pub message: String,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label, self.message)
    }
}

/// Evaluates one scenario into a report.
pub fn run_scenario(
    sc: &Scenario,
    index: usize,
    ov: &Overrides,
) -> Result<IneqReport, RunFailure> {
    let label = sc.label(index);
    let fail = |message: String| RunFailure { label: label.clone(), message };
    let resolution = ov
        .resolution
        .or(sc.resolution)
        .unwrap_or_else(|| default_resolution(sc.n));
    let subdivisions = sc.subdivisions.unwrap_or_else(|| default_subdivisions(sc.n));
    let tol = ov.tol.or(sc.tol).unwrap_or_else(|| default_tol(&sc.ineq));
    let seed = ov.seed.or(sc.seed).unwrap_or(0);
    let grid = sphere_grid(sc.n, resolution).map_err(|e| fail(e.to_string()))?;

    let density = |spec: &Option<crate::config::DensitySpec>| -> Result<_, RunFailure> {
        let spec = spec.as_ref().expect("validated scenario has its density");
        build_density(spec, sc.n, seed, &grid).map_err(&fail)
    };
    let body = || -> Result<_, RunFailure> {
        let spec = sc.body.as_ref().expect("validated scenario has its body");
        build_body(spec, sc.n, seed, &grid).map_err(&fail)
    };
    let p = sc.p.unwrap_or(1.0);
    let eps = sc.eps.unwrap_or(0.0);
    let lambda = || sc.lambda.expect("validated scenario has its lambda");

    let report = match sc.ineq.as_str() {
        "gauge-moment" => {
            let f = density(&sc.density)?;
            let k = body()?;
            eval_moment_ineq(&f, &k, lambda(), p, &grid, subdivisions, tol)
        }
        "bs-functional-symmetric" => {
            let f = density(&sc.density)?;
            eval_bs_symmetric(&f, lambda(), p, &grid, subdivisions, tol)
        }
        "bs-functional" => {
            let f = density(&sc.density)?;
            eval_bs_asymmetric(&f, lambda(), p, eps, &grid, subdivisions, tol)
        }
        "moment-product" => {
            let f = density(&sc.density)?;
            let g = density(&sc.density2)?;
            eval_renyi(&f, &g, lambda(), p, eps, &grid, subdivisions, tol)
        }
        geometric => {
            let case = match geometric {
                "bs" => GeometricCase::VolumeProduct,
                "bs-santalo" => GeometricCase::VolumeProductSantalo,
                "bs-centroid" => GeometricCase::VolumeProductCentroid,
                "bs-centroid-body" => GeometricCase::CentroidBodyProduct { p },
                "busemann-petty" => GeometricCase::CentroidVolume { p },
                "moment-polar" => GeometricCase::MomentPolar { p, eps },
                "moment-volume" => GeometricCase::MomentVolume { p, eps },
                "moment-polar-translate" => GeometricCase::MomentPolarTranslate { p },
                other => unreachable!("validation admits only known ids, got {other}"),
            };
            eval_geometric(&body()?, case, &grid, subdivisions, tol)
        }
    };
    report.map_err(|e| fail(e.to_string()))
}

/// Formats an optional float column; absent values stay empty so the
/// CSV distinguishes "not applicable" from any number.
fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Summary CSV over the finished reports, one row per scenario in config
/// order. Float formatting is the shortest round-trip form, so re-running
/// a config with the same seed reproduces the bytes exactly.
pub fn summary_csv(rows: &[(String, IneqReport)]) -> String {
    let mut out = String::from("ineq,n,p,lambda,eps,lhs,rhs,ratio,saturated\n");
    for (_, r) in rows {
        let lambda = r.lambda.map(|l| l.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.ineq,
            r.n,
            opt(r.p),
            lambda,
            opt(r.eps),
            r.lhs,
            r.rhs,
            opt(r.ratio),
            r.saturated
        ));
    }
    out
}

/// Plot-data CSV: one (value, ratio) row per sweep point; header only
/// when there are no points.
pub fn emit_plot_data(points: &[(f64, Option<f64>)]) -> String {
    let mut out = String::from("value,ratio\n");
    for (v, ratio) in points {
        out.push_str(&format!("{},{}\n", v, opt(*ratio)));
    }
    out
}

/// Runs a sweep by cloning the base scenario at each parameter value.
pub fn run_sweep(sweep: &Sweep, ov: &Overrides) -> Result<Vec<(f64, Option<f64>)>, RunFailure> {
    let mut points = Vec::with_capacity(sweep.values.len());
    for v in &sweep.values {
        let mut sc = sweep.scenario.clone();
        match sweep.parameter {
            SweepParameter::Eps => sc.eps = Some(*v),
            SweepParameter::P => sc.p = Some(*v),
        }
        sc.name = Some(format!("{}@{v}", sweep.name));
        let report = run_scenario(&sc, 0, ov).map_err(|e| RunFailure {
            label: format!("sweep {}", sweep.name),
            message: e.to_string(),
        })?;
        points.push((*v, report.ratio));
    }
    Ok(points)
}

/// The exit-code gate: a ratio above 1 + tol, a degenerate evaluation, or
/// a missed saturation expectation counts as a numerical failure.
pub fn gate(sc: &Scenario, index: usize, ov: &Overrides, report: &IneqReport) -> Option<String> {
    let label = sc.label(index);
    let tol = ov.tol.or(sc.tol).unwrap_or_else(|| default_tol(&sc.ineq));
    if report.degenerate {
        return Some(format!("{label}: degenerate evaluation (rhs {})", report.rhs));
    }
    match report.ratio {
        Some(r) if r <= 1.0 + tol => {}
        Some(r) => return Some(format!("{label}: ratio {r} exceeds 1 + {tol}")),
        None => return Some(format!("{label}: no ratio produced")),
    }
    if let Some(expect) = sc.expect_saturated {
        if expect != report.saturated {
            return Some(format!(
                "{label}: expected saturated = {expect}, report says {}",
                report.saturated
            ));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use affineq::inequalities::GridMeta;
    use affineq::Lambda;

    fn report() -> IneqReport {
        IneqReport {
            ineq: "moment-polar".to_string(),
            n: 2,
            p: Some(2.0),
            lambda: None,
            eps: Some(0.25),
            lhs: 78.5,
            rhs: 78.9,
            ratio: Some(0.995),
            saturated: true,
            degenerate: false,
            cfp: None,
            grid: GridMeta { dim: 2, resolution: 256, subdivisions: 48 },
        }
    }

    fn scenario(json: &str) -> Scenario {
        serde_json::from_str(json).expect("test scenario parses")
    }

    const BALL: &str = r#"{"ineq": "moment-polar", "n": 2, "p": 2.0,
        "body": {"kind": "ball"}, "expect_saturated": true}"#;

    #[test]
    fn summary_rows_leave_absent_columns_empty() {
        let mut r = report();
        r.lambda = Some(Lambda::Infinity);
        let csv = summary_csv(&[("x".into(), r)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "ineq,n,p,lambda,eps,lhs,rhs,ratio,saturated");
        assert_eq!(lines[1], "moment-polar,2,2,inf,0.25,78.5,78.9,0.995,true");

        let mut bare = report();
        bare.p = None;
        bare.eps = None;
        bare.ratio = None;
        let csv = summary_csv(&[("y".into(), bare)]);
        assert_eq!(csv.lines().nth(1).unwrap(), "moment-polar,2,,,,78.5,78.9,,true");
    }

    #[test]
    fn plot_data_is_header_only_without_points() {
        assert_eq!(emit_plot_data(&[]), "value,ratio\n");
        assert_eq!(
            emit_plot_data(&[(0.1, Some(0.5)), (0.2, None)]),
            "value,ratio\n0.1,0.5\n0.2,\n"
        );
    }

    #[test]
    fn gate_accepts_a_report_matching_its_expectations() {
        assert_eq!(gate(&scenario(BALL), 0, &Overrides::default(), &report()), None);
    }

    #[test]
    fn gate_flags_excess_ratio_degeneracy_and_missed_saturation() {
        let sc = scenario(BALL);
        let ov = Overrides::default();

        let mut excess = report();
        excess.ratio = Some(1.5);
        assert!(gate(&sc, 0, &ov, &excess).unwrap().contains("exceeds"));

        let mut degenerate = report();
        degenerate.degenerate = true;
        degenerate.ratio = None;
        assert!(gate(&sc, 0, &ov, &degenerate).unwrap().contains("degenerate"));

        let mut unsat = report();
        unsat.saturated = false;
        assert!(gate(&sc, 0, &ov, &unsat).unwrap().contains("expected saturated"));
    }

    #[test]
    fn command_line_tolerance_wins_over_the_scenario_value() {
        let sc = scenario(
            r#"{"ineq": "moment-polar", "n": 2, "p": 2.0,
                "body": {"kind": "ball"}, "tol": 0.5}"#,
        );
        let mut r = report();
        r.ratio = Some(1.4);
        assert_eq!(gate(&sc, 0, &Overrides::default(), &r), None);
        let ov = Overrides { tol: Some(0.01), ..Overrides::default() };
        assert!(gate(&sc, 0, &ov, &r).unwrap().contains("exceeds"));
    }
}

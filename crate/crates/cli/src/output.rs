use std::fmt::Write as _;

use plate_core::criteria::{DesignReport, Quantity};
use plate_core::model::PlateProblem;
use plate_core::solver::AdaptiveSolution;
use serde::Serialize;

/// Nine significant digits in scientific notation.
pub fn sig9(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.8e}")
}

fn display_value(q: Quantity, si: f64) -> f64 {
    match q {
        Quantity::Deflection => si * 1e3,
        Quantity::Stress => si / 1e6,
    }
}

fn unit(q: Quantity) -> &'static str {
    match q {
        Quantity::Deflection => "mm",
        Quantity::Stress => "MPa",
    }
}

#[derive(Serialize)]
pub struct CriterionJson {
    pub kind: &'static str,
    pub measured: f64,
    pub limit: f64,
    pub unit: &'static str,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct TimingsJson {
    pub assembly: f64,
    pub solve: f64,
    pub total: f64,
}

#[derive(Serialize)]
pub struct SolveJson {
    pub omega_max_mm: f64,
    pub location_mm: [f64; 2],
    pub sigma1_max_mpa: f64,
    pub sigma1_location_mm: [f64; 2],
    pub criteria: Vec<CriterionJson>,
    pub pass: bool,
    pub n_used: usize,
    pub r: usize,
    pub k: usize,
    pub converged: bool,
    pub residual_rel: f64,
    pub warnings: Vec<String>,
    pub timings_s: Option<TimingsJson>,
}

impl SolveJson {
    pub fn new(report: &DesignReport, timings: bool) -> Self {
        let d = &report.diagnostics;
        SolveJson {
            omega_max_mm: report.omega_max.value * 1e3,
            location_mm: [report.omega_max.x * 1e3, report.omega_max.y * 1e3],
            sigma1_max_mpa: report.sigma1_max.value / 1e6,
            sigma1_location_mm: [report.sigma1_max.x * 1e3, report.sigma1_max.y * 1e3],
            criteria: report
                .entries
                .iter()
                .map(|e| CriterionJson {
                    kind: e.kind,
                    measured: display_value(e.quantity, e.measured),
                    limit: display_value(e.quantity, e.limit),
                    unit: unit(e.quantity),
                    pass: e.pass,
                })
                .collect(),
            pass: report.overall_pass,
            n_used: d.n_used,
            r: d.r,
            k: d.k,
            converged: d.converged,
            residual_rel: d.residual_rel,
            warnings: d.warnings.clone(),
            timings_s: timings.then_some(TimingsJson {
                assembly: d.timings.assembly_s,
                solve: d.timings.solve_s,
                total: d.timings.total_s,
            }),
        }
    }
}

#[derive(Serialize)]
pub struct SweepRowJson {
    pub value: serde_json::Value,
    pub omega_max_mm: Option<f64>,
    pub sigma1_max_mpa: Option<f64>,
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn solve_text(problem: &PlateProblem, adaptive: &AdaptiveSolution, report: &DesignReport) -> String {
    let d = &report.diagnostics;
    let g = problem.geometry;
    let mut s = String::new();
    writeln!(s, "plate {:.1} x {:.1} mm, t = {:.3} mm", g.lx * 1e3, g.ly * 1e3, problem.material.thickness * 1e3).unwrap();
    writeln!(
        s,
        "max deflection   {:.4} mm at ({:.1}, {:.1}) mm",
        report.omega_max.value * 1e3,
        report.omega_max.x * 1e3,
        report.omega_max.y * 1e3
    )
    .unwrap();
    writeln!(
        s,
        "max stress       {:.4} MPa at ({:.1}, {:.1}) mm",
        report.sigma1_max.value / 1e6,
        report.sigma1_max.x * 1e3,
        report.sigma1_max.y * 1e3
    )
    .unwrap();
    writeln!(s, "order n = {}, r = {}, k = {} ({})", d.n_used, d.r, d.k, adaptive.termination).unwrap();
    writeln!(s, "residual {:.2e}, boundary residual {:.2e}, load fit {:.2e}", d.residual_rel, d.bc_residual_max, d.fit_rel_l2)
        .unwrap();
    for w in &d.warnings {
        writeln!(s, "warning: {w}").unwrap();
    }
    if !report.entries.is_empty() {
        writeln!(s).unwrap();
    }
    for e in &report.entries {
        let u = unit(e.quantity);
        writeln!(
            s,
            "{:<16} {:>10.4} {u} <= {:>10.4} {u}  {}",
            e.kind,
            display_value(e.quantity, e.measured),
            display_value(e.quantity, e.limit),
            if e.pass { "PASS" } else { "FAIL" }
        )
        .unwrap();
    }
    writeln!(s, "verdict: {}", if report.overall_pass { "PASS" } else { "FAIL" }).unwrap();
    s
}

pub fn sweep_table(param: &str, rows: &[SweepRowJson]) -> String {
    let mut s = String::new();
    writeln!(s, "{:>12} {:>14} {:>14}  verdict", param, "w_max [mm]", "s1_max [MPa]").unwrap();
    for r in rows {
        let v = match &r.value {
            serde_json::Value::String(k) => k.clone(),
            other => other.to_string(),
        };
        match (&r.error, r.omega_max_mm, r.sigma1_max_mpa, r.pass) {
            (None, Some(w), Some(st), Some(p)) => {
                writeln!(s, "{v:>12} {w:>14.4} {st:>14.4}  {}", if p { "PASS" } else { "FAIL" }).unwrap()
            }
            (e, ..) => writeln!(s, "{v:>12} {:>14} {:>14}  error: {}", "-", "-", e.as_deref().unwrap_or("?")).unwrap(),
        }
    }
    s
}

pub fn convergence_table(a: &AdaptiveSolution) -> String {
    let mut s = String::new();
    writeln!(s, "{:>3} {:>5} {:>5} {:>16} {:>11} {:>11} {:>9}", "n", "r", "k", "w_max [mm]", "rel change", "residual", "time [s]").unwrap();
    for t in &a.trace {
        let change = t.change.map_or("-".to_string(), |c| format!("{c:.3e}"));
        writeln!(
            s,
            "{:>3} {:>5} {:>5} {:>16.9e} {:>11} {:>11.3e} {:>9.3}",
            t.n,
            t.r,
            t.k,
            t.omega_max * 1e3,
            change,
            t.residual_rel,
            t.elapsed_s
        )
        .unwrap();
    }
    writeln!(s, "termination: {}", a.termination).unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::sig9;

    #[test]
    fn sig9_digits() {
        assert_eq!(sig9(0.41214), "4.12140000e-1");
        assert_eq!(sig9(-0.0), "0.00000000e0");
        assert_eq!(sig9(250.0), "2.50000000e2");
    }
}

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use plate_core::config::{load_problem, parse_sweep_axis, parse_sweep_values};
use plate_core::criteria::{assess, sweep as run_sweep, SweepValue};
use plate_core::fields::principal_stress_at;
use plate_core::model::{BcKind, LoadSpec, OrderMode, PlateProblem};
use plate_core::oracle_fdm::{compare, navier_uniform, solve_fdm};
use plate_core::solver::solve as solve_problem;

use crate::output::{self, SolveJson, SweepRowJson};
use crate::render;
use crate::FieldKind;

pub const PASS: u8 = 0;
pub const FAIL: u8 = 2;

pub type CmdResult = Result<u8, String>;

fn read_problem(path: &Path) -> Result<PlateProblem, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    load_problem(&text).map_err(|e| format!("{}:\n{e}", path.display()))
}

pub fn solve(path: &Path, json: bool, order: Option<usize>, timings: bool) -> CmdResult {
    let mut problem = read_problem(path)?;
    if let Some(n) = order {
        problem.solver.order = OrderMode::Fixed(n);
    }
    let (adaptive, _, report) = assess(&problem).map_err(|e| e.to_string())?;
    if json {
        let doc = SolveJson::new(&report, timings);
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    } else {
        print!("{}", output::solve_text(&problem, &adaptive, &report));
    }
    Ok(if report.overall_pass { PASS } else { FAIL })
}

/// Grid coordinate `i` of `n` across `[0, len]`.
fn grid_coord(i: usize, n: usize, len: f64) -> f64 {
    if n == 1 {
        len / 2.0
    } else {
        len * i as f64 / (n - 1) as f64
    }
}

pub fn field(path: &Path, kind: FieldKind, grid: usize, out: &Path, png: Option<&Path>) -> CmdResult {
    if grid == 0 {
        return Err("--grid must be at least 1".into());
    }
    let problem = read_problem(path)?;
    let adaptive = solve_problem(&problem).map_err(|e| e.to_string())?;
    let sol = &adaptive.solution;
    let fields = sol.fields();
    let value = |x: f64, y: f64| match kind {
        FieldKind::Deflection => sol.omega.eval(x, y) * 1e3,
        FieldKind::Stress => principal_stress_at(&fields, x, y) / 1e6,
        FieldKind::Moment => fields.mx.eval(x, y),
        FieldKind::MomentY => fields.my.eval(x, y),
        FieldKind::MomentXy => fields.mxy.eval(x, y),
    };
    let g = problem.geometry;
    let mut csv = String::from("x_mm,y_mm,value\n");
    for j in 0..grid {
        let y = grid_coord(j, grid, g.ly);
        for i in 0..grid {
            let x = grid_coord(i, grid, g.lx);
            writeln!(csv, "{},{},{}", output::sig9(x * 1e3), output::sig9(y * 1e3), output::sig9(value(x, y))).unwrap();
        }
    }
    fs::write(out, csv).map_err(|e| format!("{}: {e}", out.display()))?;
    if let Some(p) = png {
        render::contour_png(&g, &value, p)?;
    }
    Ok(PASS)
}

pub fn sweep(path: &Path, param: &str, values: &str, json: bool) -> CmdResult {
    let problem = read_problem(path)?;
    let (axis, unit) = parse_sweep_axis(param).map_err(|e| e.to_string())?;
    let values = parse_sweep_values(axis, unit, values).map_err(|e| e.to_string())?;
    let entries = run_sweep(&problem, axis, &values);
    let rows: Vec<SweepRowJson> = entries
        .iter()
        .map(|e| {
            let value = match e.value {
                SweepValue::Number(v) => serde_json::json!(v / unit),
                SweepValue::Kind(k) => serde_json::json!(k.name()),
            };
            match &e.outcome {
                Ok(r) => SweepRowJson {
                    value,
                    omega_max_mm: Some(r.omega_max.value * 1e3),
                    sigma1_max_mpa: Some(r.sigma1_max.value / 1e6),
                    pass: Some(r.overall_pass),
                    error: None,
                },
                Err(msg) => SweepRowJson { value, omega_max_mm: None, sigma1_max_mpa: None, pass: None, error: Some(msg.clone()) },
            }
        })
        .collect();
    if json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("serializable"));
    } else {
        print!("{}", output::sweep_table(param, &rows));
    }
    if rows.is_empty() {
        return Err("no sweep values given".into());
    }
    Ok(if rows.iter().any(|r| r.pass == Some(true)) { PASS } else { FAIL })
}

pub fn convergence(path: &Path) -> CmdResult {
    let mut problem = read_problem(path)?;
    problem.solver.order = OrderMode::Auto;
    let adaptive = solve_problem(&problem).map_err(|e| e.to_string())?;
    print!("{}", output::convergence_table(&adaptive));
    Ok(PASS)
}

/// Uniform pressure if every load is uniform and every edge simply supported.
fn navier_case(p: &PlateProblem) -> Option<f64> {
    if p.bcs.iter().any(|b| b.kind != BcKind::SimplySupported) {
        return None;
    }
    p.loads
        .iter()
        .map(|l| match l {
            LoadSpec::Uniform { pressure } => Some(*pressure),
            _ => None,
        })
        .sum()
}

pub fn oracle(path: &Path, grid: usize) -> CmdResult {
    let mut problem = read_problem(path)?;
    problem.solver.order = OrderMode::Auto;
    let t0 = Instant::now();
    let fdm = solve_fdm(&problem, grid, grid).map_err(|e| e.to_string())?;
    let fdm_s = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let adaptive = solve_problem(&problem).map_err(|e| e.to_string())?;
    let gal_s = t1.elapsed().as_secs_f64();
    let cmp = compare(&adaptive.solution, &fdm);
    let mut s = String::new();
    writeln!(s, "galerkin  w_max = {:.6e} mm  (n = {}, {:.3} s)", cmp.candidate_max * 1e3, adaptive.solution.n_used, gal_s).unwrap();
    writeln!(s, "fdm       w_max = {:.6e} mm  ({grid} x {grid} nodes, {:.3} s)", cmp.reference_max * 1e3, fdm_s).unwrap();
    writeln!(s, "disagreement    = {:.3} %  (rms {:.3} % of fdm max)", cmp.max_rel_diff * 100.0, cmp.rms_rel * 100.0).unwrap();
    if let Some(q) = navier_case(&problem) {
        let g = problem.geometry;
        let w = navier_uniform(&adaptive.solution.rigidities, &g, q, g.lx / 2.0, g.ly / 2.0, 50).abs();
        let rel = |v: f64| (v - w).abs() / w * 100.0;
        writeln!(s, "navier    w_max = {:.6e} mm  (galerkin {:.3} %, fdm {:.3} %)", w * 1e3, rel(cmp.candidate_max), rel(cmp.reference_max)).unwrap();
    }
    print!("{s}");
    Ok(PASS)
}

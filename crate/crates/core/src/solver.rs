//! Galerkin assembly and solution, fixed-order and adaptive.
//!
//! `K[i][j] = ∫ D(φ_j) φ_i dA` over the plate, plus on free segments the
//! traction terms `∮ [Q_n(φ_j) φ_i − M_n(φ_j) ∂_n φ_i − M_nt(φ_j) ∂_s φ_i] ds`
//! that turn the interior projection into the energy form there.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::basis::{admissible_basis, BasisError, ShapeBasis};
use crate::fields::{derive_fields, extremum, ExtremumMode, FieldSet, PlateField};
use crate::model::{
    fit_load, rigidities, validate_problem, BcKind, LoadPiece, LoadPolynomial, ModelError, OrderMode, PlateProblem,
    RigiditySet, Violation,
};
use crate::poly2d::{poly1_integrate, poly1_mul, Poly2D, RectDomain};

/// Relative singular-value cutoff for the least-squares solve of `K c = f`.
pub const SOLVE_TOL: f64 = 1e-12;

/// Above this the solution carries an ill-conditioning warning.
pub const CONDITION_WARN: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid problem: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("order {0} too low: no admissible functions")]
    OrderTooLow(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl From<BasisError> for SolveError {
    fn from(e: BasisError) -> Self {
        match e {
            BasisError::NoAdmissibleFunctions(n) => SolveError::OrderTooLow(n),
            BasisError::Model(m) => SolveError::Model(m),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GalerkinSystem {
    pub stiffness: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

#[derive(Clone, Debug)]
pub struct GalerkinSolve {
    pub coefficients: DVector<f64>,
    pub condition_estimate: f64,
    /// Singular values kept by the truncated solve.
    pub rank: usize,
}

impl GalerkinSystem {
    /// Truncated-SVD least squares; modes below `SOLVE_TOL·σmax` are dropped.
    pub fn solve(&self) -> GalerkinSolve {
        let k = self.rhs.len();
        let svd = self.stiffness.clone().svd(true, true);
        let smax = svd.singular_values.max();
        if smax == 0.0 {
            return GalerkinSolve { coefficients: DVector::zeros(k), condition_estimate: f64::INFINITY, rank: 0 };
        }
        let cut = SOLVE_TOL * smax;
        let kept: Vec<f64> = svd.singular_values.iter().copied().filter(|&s| s > cut).collect();
        let smin = kept.iter().copied().fold(f64::INFINITY, f64::min);
        let coefficients = svd.solve(&self.rhs, cut).expect("U and V were computed");
        GalerkinSolve { coefficients, condition_estimate: smax / smin, rank: kept.len() }
    }

    /// `‖K c − f‖`.
    pub fn residual(&self, c: &DVector<f64>) -> f64 {
        (&self.stiffness * c - &self.rhs).norm()
    }
}

/// `G[a][b] = ∫ m_a D(m_b) dA` over the plate for reference monomials.
fn interior_monomial_matrix(basis: &ShapeBasis, rig: &RigiditySet) -> DMatrix<f64> {
    let (sx, sy) = basis.geometry.half();
    let mono = &basis.monomials.members;
    let r = mono.len();
    let moment = |i: usize| if i % 2 == 0 { 2.0 / (i + 1) as f64 } else { 0.0 };
    let cx = rig.dx / sx.powi(4);
    let cxy = 2.0 * rig.h / (sx * sx * sy * sy);
    let cy = rig.dy / sy.powi(4);
    let area = sx * sy;
    DMatrix::from_fn(r, r, |a, b| {
        let (pa, qa) = mono[a];
        let (p, q) = mono[b];
        let (pf, qf) = (p as f64, q as f64);
        let mut v = 0.0;
        if p >= 4 {
            v += cx * pf * (pf - 1.0) * (pf - 2.0) * (pf - 3.0) * moment(pa + p - 4) * moment(qa + q);
        }
        if p >= 2 && q >= 2 {
            v += cxy * pf * (pf - 1.0) * qf * (qf - 1.0) * moment(pa + p - 2) * moment(qa + q - 2);
        }
        if q >= 4 {
            v += cy * qf * (qf - 1.0) * (qf - 2.0) * (qf - 3.0) * moment(pa + p) * moment(qa + q - 4);
        }
        v * area
    })
}

/// Traction terms over the free segments.
fn free_edge_matrix(basis: &ShapeBasis, rig: &RigiditySet) -> DMatrix<f64> {
    let k = basis.k();
    let mut out = DMatrix::<f64>::zeros(k, k);
    let free: Vec<_> = basis.bcs.iter().filter(|b| b.kind == BcKind::Free).collect();
    if free.is_empty() {
        return out;
    }
    let g = basis.geometry;
    let (sx, sy) = g.half();
    let fields: Vec<PlateField> = basis.functions.iter().map(|f| PlateField::new(f.clone(), g)).collect();
    let sets: Vec<FieldSet> = fields.iter().map(|f| derive_fields(f, rig, 1.0)).collect();
    for seg in free {
        let edge = seg.edge;
        let (nx, ny) = edge.normal();
        let (tx, ty) = edge.tangent();
        let (line, jac) = if edge.is_vertical() { (edge.reference_point(0.0).0, sy) } else { (edge.reference_point(0.0).1, sx) };
        let trace = |p: &PlateField| {
            if edge.is_vertical() {
                p.reference.restrict_x(line)
            } else {
                p.reference.restrict_y(line)
            }
        };
        let (t0, t1) = (2.0 * seg.s0 - 1.0, 2.0 * seg.s1 - 1.0);
        let mut phi = Vec::with_capacity(k);
        let mut dn = Vec::with_capacity(k);
        let mut ds = Vec::with_capacity(k);
        let mut qn = Vec::with_capacity(k);
        let mut mn = Vec::with_capacity(k);
        let mut mnt = Vec::with_capacity(k);
        for (f, s) in fields.iter().zip(&sets) {
            let fx = f.derivative(1, 0);
            let fy = f.derivative(0, 1);
            phi.push(trace(f));
            dn.push(trace(&fx.scale(nx).plus(&fy, ny)));
            ds.push(trace(&fx.scale(tx).plus(&fy, ty)));
            qn.push(trace(&s.qx.scale(nx).plus(&s.qy, ny)));
            mn.push(trace(&s.mx.scale(nx * nx).plus(&s.mxy, 2.0 * nx * ny).plus(&s.my, ny * ny)));
            mnt.push(trace(&s.mx.scale(nx * tx).plus(&s.mxy, nx * ty + ny * tx).plus(&s.my, ny * ty)));
        }
        let int = |a: &[f64], b: &[f64]| poly1_integrate(&poly1_mul(a, b), t0, t1) * jac;
        for i in 0..k {
            for j in 0..k {
                out[(i, j)] += int(&qn[j], &phi[i]) - int(&mn[j], &dn[i]) - int(&mnt[j], &ds[i]);
            }
        }
    }
    out
}

/// `f[i] = ∫ P φ_i dA` summed over load pieces given on the reference square.
pub fn load_vector(basis: &ShapeBasis, pieces: &[LoadPiece]) -> DVector<f64> {
    let (sx, sy) = basis.geometry.half();
    let mono = &basis.monomials.members;
    let mut g = DVector::<f64>::zeros(mono.len());
    for piece in pieces {
        for (a, &(p, q)) in mono.iter().enumerate() {
            g[a] += piece.poly.multiply(&Poly2D::monomial(p, q, 1.0)).integrate_rect(&piece.region) * sx * sy;
        }
    }
    basis.coefficients.transpose() * g
}

pub fn assemble(basis: &ShapeBasis, load: &LoadPolynomial, rig: &RigiditySet) -> GalerkinSystem {
    let piece = LoadPiece { poly: load.reference.clone(), region: RectDomain::reference() };
    assemble_pieces(basis, &[piece], rig)
}

pub fn assemble_pieces(basis: &ShapeBasis, pieces: &[LoadPiece], rig: &RigiditySet) -> GalerkinSystem {
    let n = &basis.coefficients;
    let g = interior_monomial_matrix(basis, rig);
    let stiffness = n.transpose() * g * n + free_edge_matrix(basis, rig);
    GalerkinSystem { stiffness, rhs: load_vector(basis, pieces) }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    /// Basis construction and assembly.
    pub assembly_s: f64,
    pub solve_s: f64,
    pub total_s: f64,
}

#[derive(Clone, Debug)]
pub struct Solution {
    /// Deflection `w̃` (m).
    pub omega: PlateField,
    /// Shape-function coefficients `c_i`.
    pub coefficients: Vec<f64>,
    pub n_used: usize,
    pub r: usize,
    pub k: usize,
    pub residual_rel: f64,
    pub bc_residual_max: f64,
    pub condition_estimate: f64,
    pub warnings: Vec<String>,
    pub timings: Timings,
    pub load: LoadPolynomial,
    pub rigidities: RigiditySet,
    pub thickness: f64,
}

impl Solution {
    pub fn fields(&self) -> FieldSet {
        derive_fields(&self.omega, &self.rigidities, self.thickness)
    }

    pub fn omega_max(&self) -> f64 {
        extremum(&self.omega, ExtremumMode::MaxAbs).value
    }
}

/// `‖D(w̃) − P‖ / ‖P‖` in L2 over the plate; `0/0` is 0.
pub fn residual_norm(omega: &PlateField, load: &LoadPolynomial, rig: &RigiditySet) -> f64 {
    let sq = RectDomain::reference();
    let mut r = omega.plate_operator(rig).reference;
    r.add_scaled(&load.reference, -1.0);
    let num = r.multiply(&r).integrate_rect(&sq).max(0.0).sqrt();
    let den = load.reference.multiply(&load.reference).integrate_rect(&sq).max(0.0).sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

pub fn solve_fixed_order(problem: &PlateProblem, n: usize) -> Result<Solution, SolveError> {
    validate_problem(problem).map_err(SolveError::Invalid)?;
    let start = Instant::now();
    let rig = rigidities(&problem.material)?;
    let load = fit_load(&problem.loads, &problem.geometry)?;
    let basis = admissible_basis(problem, n)?;
    let system = if problem.solver.exact_patch {
        let pieces: Vec<LoadPiece> = problem.loads.iter().map(|l| l.reference_piece(&problem.geometry)).collect();
        assemble_pieces(&basis, &pieces, &rig)
    } else {
        assemble(&basis, &load, &rig)
    };
    let assembly_s = start.elapsed().as_secs_f64();
    let t_solve = Instant::now();
    let solved = system.solve();
    let solve_s = t_solve.elapsed().as_secs_f64();

    let c: Vec<f64> = solved.coefficients.iter().copied().collect();
    let omega = PlateField::new(basis.combine(&c), problem.geometry);
    let residual_rel = residual_norm(&omega, &load, &rig);
    let mut warnings = Vec::new();
    if solved.condition_estimate > CONDITION_WARN {
        warnings.push(format!("ill-conditioned system (condition estimate {:.3e})", solved.condition_estimate));
    }
    Ok(Solution {
        omega,
        coefficients: c,
        n_used: n,
        r: basis.r(),
        k: basis.k(),
        residual_rel,
        bc_residual_max: basis.bc_residual_max,
        condition_estimate: solved.condition_estimate,
        warnings,
        timings: Timings { assembly_s, solve_s, total_s: start.elapsed().as_secs_f64() },
        load,
        rigidities: rig,
        thickness: problem.material.thickness,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub omega_max: f64,
    /// `|Δω_max| / |ω_max|` against the previous order.
    pub change: Option<f64>,
    pub residual_rel: f64,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug)]
pub struct AdaptiveSolution {
    pub solution: Solution,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
    pub termination: String,
}

fn trace_row(s: &Solution, omega_max: f64, change: Option<f64>) -> TraceRow {
    TraceRow {
        n: s.n_used,
        r: s.r,
        k: s.k,
        omega_max,
        change,
        residual_rel: s.residual_rel,
        elapsed_s: s.timings.total_s,
    }
}

/// Raises the order in steps of 2 until `ω_max` settles to `tol_conv`.
pub fn solve_adaptive(problem: &PlateProblem) -> Result<AdaptiveSolution, SolveError> {
    validate_problem(problem).map_err(SolveError::Invalid)?;
    let s = problem.solver;
    let mut trace = Vec::new();
    let mut last: Option<(Solution, f64)> = None;
    let mut n = s.n_start;
    while n <= s.n_max {
        let sol = match solve_fixed_order(problem, n) {
            Ok(sol) => sol,
            Err(SolveError::OrderTooLow(_)) => {
                n += 2;
                continue;
            }
            Err(e) => return Err(e),
        };
        let wmax = sol.omega_max();
        match last {
            None if wmax == 0.0 => {
                trace.push(trace_row(&sol, wmax, None));
                return Ok(AdaptiveSolution { solution: sol, trace, converged: true, termination: "zero solution".into() });
            }
            Some((_, prev)) => {
                let change = (wmax - prev).abs() / wmax.abs();
                trace.push(trace_row(&sol, wmax, Some(change)));
                if change < s.tol_conv {
                    let msg = format!("converged: change {change:.2e} < tol {:.1e} at n = {n}", s.tol_conv);
                    return Ok(AdaptiveSolution { solution: sol, trace, converged: true, termination: msg });
                }
            }
            None => trace.push(trace_row(&sol, wmax, None)),
        }
        last = Some((sol, wmax));
        n += 2;
    }
    match last {
        Some((mut sol, _)) => {
            sol.warnings.push("unconverged".into());
            let msg = format!("unconverged: reached n_max = {}", s.n_max);
            Ok(AdaptiveSolution { solution: sol, trace, converged: false, termination: msg })
        }
        None => Err(SolveError::OrderTooLow(s.n_max)),
    }
}

/// Solves with the problem's order mode.
pub fn solve(problem: &PlateProblem) -> Result<AdaptiveSolution, SolveError> {
    match problem.solver.order {
        OrderMode::Auto => solve_adaptive(problem),
        OrderMode::Fixed(n) => {
            let sol = solve_fixed_order(problem, n)?;
            let wmax = sol.omega_max();
            let trace = vec![trace_row(&sol, wmax, None)];
            Ok(AdaptiveSolution { solution: sol, trace, converged: true, termination: format!("fixed order n = {n}") })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{uniform_edges, LoadSpec, MaterialSpec, PlateRect};

    fn table1() -> PlateProblem {
        PlateProblem::new(
            MaterialSpec::isotropic(210e9, 0.3, 1e-4),
            PlateRect::new(0.25, 0.5),
            uniform_edges(BcKind::Clamped),
            vec![LoadSpec::Uniform { pressure: 0.8 }],
        )
    }

    #[test]
    fn table1_order_8_stiffness_is_13_square() {
        let p = table1();
        let rig = rigidities(&p.material).unwrap();
        let basis = admissible_basis(&p, 8).unwrap();
        let load = fit_load(&p.loads, &p.geometry).unwrap();
        let sys = assemble(&basis, &load, &rig);
        assert_eq!(sys.stiffness.shape(), (13, 13));
        let doubled = assemble(&basis, &load, &rig.scaled(2.0));
        assert!((&doubled.stiffness - &sys.stiffness * 2.0).abs().max() <= 1e-12 * sys.stiffness.abs().max());
        assert_eq!(doubled.rhs, sys.rhs);
    }

    #[test]
    fn zero_load_gives_zero_solution() {
        let mut p = table1();
        p.loads = vec![LoadSpec::Uniform { pressure: 0.0 }];
        let s = solve_fixed_order(&p, 8).unwrap();
        assert!(s.coefficients.iter().all(|&c| c == 0.0));
        assert_eq!(s.residual_rel, 0.0);
        let a = solve_adaptive(&p).unwrap();
        assert_eq!(a.trace.len(), 1);
        assert_eq!(a.termination, "zero solution");
    }

    #[test]
    fn table1_orders() {
        let p = table1();
        let w8 = solve_fixed_order(&p, 8).unwrap().omega_max();
        let w12 = solve_fixed_order(&p, 12).unwrap().omega_max();
        assert!(((w8 - 4.1214e-4) / 4.1214e-4).abs() < 0.02);
        assert!(((w12 - 4.1214e-4) / 4.1214e-4).abs() < 0.002);
    }

    #[test]
    fn invalid_problem_is_reported() {
        let mut p = table1();
        p.bcs = uniform_edges(BcKind::Free);
        match solve_fixed_order(&p, 8) {
            Err(SolveError::Invalid(v)) => assert!(v.iter().any(|v| v.message == "unconstrained plate")),
            other => panic!("unexpected {other:?}"),
        }
    }
}

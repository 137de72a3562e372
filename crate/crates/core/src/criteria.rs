//! Design rules, pass/fail reports and parameter sweeps.

use rayon::prelude::*;
use thiserror::Error;

use crate::fields::{extremum, max_principal_stress, ExtremeValue, ExtremumMode, FieldSet};
use crate::model::{BcKind, LoadSpec, PlateRect};
use crate::model::PlateProblem;
use crate::solver::{solve, AdaptiveSolution, SolveError, Solution, Timings};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DesignCriterion {
    /// Limit in m.
    MaxDeflection { limit: f64 },
    /// Limit is `span / denominator`; span defaults to the longer side.
    DeflectionRatio { denominator: f64, span: Option<f64> },
    /// Limit on the max principal stress, Pa.
    MaxStress { limit: f64 },
    PointDeflection { x: f64, y: f64, limit: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Deflection,
    Stress,
}

impl DesignCriterion {
    pub fn kind(&self) -> &'static str {
        match self {
            DesignCriterion::MaxDeflection { .. } => "max_deflection",
            DesignCriterion::DeflectionRatio { .. } => "deflection_ratio",
            DesignCriterion::MaxStress { .. } => "max_stress",
            DesignCriterion::PointDeflection { .. } => "point_deflection",
        }
    }

    pub fn quantity(&self) -> Quantity {
        match self {
            DesignCriterion::MaxStress { .. } => Quantity::Stress,
            _ => Quantity::Deflection,
        }
    }

    /// Limit in SI units for the given plate.
    pub fn limit(&self, g: &PlateRect) -> f64 {
        match *self {
            DesignCriterion::MaxDeflection { limit } => limit,
            DesignCriterion::DeflectionRatio { denominator, span } => span.unwrap_or(g.longest_side()) / denominator,
            DesignCriterion::MaxStress { limit } => limit,
            DesignCriterion::PointDeflection { limit, .. } => limit,
        }
    }

    /// Invariant violation, if any.
    pub fn problem(&self, g: &PlateRect) -> Option<String> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            DesignCriterion::DeflectionRatio { denominator, span } => {
                if !pos(denominator) {
                    return Some(format!("denominator must be > 0, got {denominator}"));
                }
                if let Some(s) = span {
                    if !pos(s) {
                        return Some(format!("span must be > 0, got {s}"));
                    }
                }
                None
            }
            DesignCriterion::PointDeflection { x, y, limit } => {
                if !pos(limit) {
                    Some(format!("limit must be > 0, got {limit}"))
                } else if !(x >= 0.0 && x <= g.lx && y >= 0.0 && y <= g.ly) {
                    Some(format!("point ({x}, {y}) lies outside the plate"))
                } else {
                    None
                }
            }
            DesignCriterion::MaxDeflection { limit } | DesignCriterion::MaxStress { limit } => {
                (!pos(limit)).then(|| format!("limit must be > 0, got {limit}"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    pub kind: &'static str,
    pub quantity: Quantity,
    pub measured: f64,
    pub limit: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub n_used: usize,
    pub r: usize,
    pub k: usize,
    pub residual_rel: f64,
    pub bc_residual_max: f64,
    pub condition_estimate: f64,
    pub fit_rel_l2: f64,
    pub total_load_error: f64,
    pub converged: bool,
    pub timings: Timings,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignReport {
    pub entries: Vec<CriterionResult>,
    pub overall_pass: bool,
    /// Largest |w|, m.
    pub omega_max: ExtremeValue,
    /// Largest principal stress, Pa.
    pub sigma1_max: ExtremeValue,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error("criterion {index} ({kind}): {message}")]
    Invalid { index: usize, kind: &'static str, message: String },
}

pub fn evaluate(
    solution: &Solution,
    fields: &FieldSet,
    criteria: &[DesignCriterion],
) -> Result<DesignReport, CriteriaError> {
    let g = solution.omega.geometry;
    let omega_max = extremum(&solution.omega, ExtremumMode::MaxAbs);
    let sigma1_max = max_principal_stress(fields);
    let mut entries = Vec::with_capacity(criteria.len());
    for (index, c) in criteria.iter().enumerate() {
        if let Some(message) = c.problem(&g) {
            return Err(CriteriaError::Invalid { index, kind: c.kind(), message });
        }
        let measured = match *c {
            DesignCriterion::MaxDeflection { .. } | DesignCriterion::DeflectionRatio { .. } => omega_max.value,
            DesignCriterion::MaxStress { .. } => sigma1_max.value,
            DesignCriterion::PointDeflection { x, y, .. } => solution.omega.eval(x, y).abs(),
        };
        let limit = c.limit(&g);
        let margin = (limit - measured) / limit;
        entries.push(CriterionResult { kind: c.kind(), quantity: c.quantity(), measured, limit, margin, pass: margin >= 0.0 });
    }
    let overall_pass = entries.iter().all(|e| e.pass);
    Ok(DesignReport {
        entries,
        overall_pass,
        omega_max,
        sigma1_max,
        diagnostics: Diagnostics {
            n_used: solution.n_used,
            r: solution.r,
            k: solution.k,
            residual_rel: solution.residual_rel,
            bc_residual_max: solution.bc_residual_max,
            condition_estimate: solution.condition_estimate,
            fit_rel_l2: solution.load.fit_rel_l2,
            total_load_error: solution.load.total_load_error,
            converged: true,
            timings: solution.timings,
            warnings: solution.warnings.clone(),
        },
    })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssessError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
}

/// Solve, derive fields and evaluate the problem's own criteria.
pub fn assess(problem: &PlateProblem) -> Result<(AdaptiveSolution, FieldSet, DesignReport), AssessError> {
    let adaptive = solve(problem)?;
    let fields = adaptive.solution.fields();
    let mut report = evaluate(&adaptive.solution, &fields, &problem.criteria)?;
    report.diagnostics.converged = adaptive.converged;
    Ok((adaptive, fields, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    /// Plate thickness, m.
    Thickness,
    /// Multiplier on every load.
    LoadScale,
    /// Mass of every mass patch, kg.
    LoadMass,
    /// Side along x, m.
    Lx,
    /// Side along y, m.
    Ly,
    /// Support kind of the segment with this index.
    SegmentKind(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepValue {
    Number(f64),
    Kind(BcKind),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepEntry {
    pub value: SweepValue,
    pub outcome: Result<DesignReport, String>,
}

/// The template with one parameter replaced.
pub fn apply_sweep(template: &PlateProblem, axis: SweepAxis, value: SweepValue) -> Result<PlateProblem, String> {
    let mut p = template.clone();
    match (axis, value) {
        (SweepAxis::Thickness, SweepValue::Number(t)) => p.material.thickness = t,
        (SweepAxis::LoadScale, SweepValue::Number(s)) => p.loads = p.loads.iter().map(|l| l.scaled(s)).collect(),
        (SweepAxis::LoadMass, SweepValue::Number(m)) => {
            let mut hit = false;
            for l in p.loads.iter_mut() {
                if let LoadSpec::MassPatch { mass, .. } = l {
                    *mass = m;
                    hit = true;
                }
            }
            if !hit {
                return Err("no mass_patch load to set".into());
            }
        }
        (SweepAxis::Lx, SweepValue::Number(v)) => p.geometry.lx = v,
        (SweepAxis::Ly, SweepValue::Number(v)) => p.geometry.ly = v,
        (SweepAxis::SegmentKind(i), SweepValue::Kind(k)) => match p.bcs.get_mut(i) {
            Some(seg) => seg.kind = k,
            None => return Err(format!("no segment with index {i}")),
        },
        (axis, value) => return Err(format!("value {value:?} does not fit axis {axis:?}")),
    }
    Ok(p)
}

/// One independent solve per value, in input order. Failures are kept in place.
pub fn sweep(template: &PlateProblem, axis: SweepAxis, values: &[SweepValue]) -> Vec<SweepEntry> {
    values
        .par_iter()
        .map(|&value| {
            let outcome = apply_sweep(template, axis, value)
                .and_then(|p| assess(&p).map(|(_, _, r)| r).map_err(|e| e.to_string()));
            SweepEntry { value, outcome }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shelf_ratio_limit() {
        let c = DesignCriterion::DeflectionRatio { denominator: 144.0, span: None };
        let limit = c.limit(&PlateRect::new(0.575, 0.275));
        assert!((limit - 3.993e-3).abs() < 1e-6);
        let explicit = DesignCriterion::DeflectionRatio { denominator: 144.0, span: Some(0.275) };
        assert!((explicit.limit(&PlateRect::new(0.575, 0.275)) - 0.275 / 144.0).abs() < 1e-15);
    }

    #[test]
    fn criterion_problems() {
        let g = PlateRect::new(1.0, 1.0);
        assert!(DesignCriterion::MaxStress { limit: 0.0 }.problem(&g).is_some());
        assert!(DesignCriterion::PointDeflection { x: 2.0, y: 0.5, limit: 1.0 }.problem(&g).is_some());
        assert!(DesignCriterion::MaxDeflection { limit: 1e-3 }.problem(&g).is_none());
    }

    #[test]
    fn empty_sweep_is_empty() {
        use crate::model::{uniform_edges, MaterialSpec};
        let p = PlateProblem::new(
            MaterialSpec::isotropic(1e9, 0.3, 1e-3),
            PlateRect::new(1.0, 1.0),
            uniform_edges(BcKind::Clamped),
            vec![LoadSpec::Uniform { pressure: 1.0 }],
        );
        assert!(sweep(&p, SweepAxis::Thickness, &[]).is_empty());
        assert!(apply_sweep(&p, SweepAxis::LoadMass, SweepValue::Number(1.0)).is_err());
        assert!(apply_sweep(&p, SweepAxis::Thickness, SweepValue::Kind(BcKind::Free)).is_err());
    }
}

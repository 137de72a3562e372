//! Admissible polynomial shape functions.
//!
//! Supported segments contribute two collocated conditions per point; the
//! shape functions span the numerical nullspace of those rows. Free segments
//! carry no rows: their natural conditions enter through the boundary terms
//! of the Galerkin matrix.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::model::{rigidities, BcKind, Edge, EdgeSegmentBC, ModelError, PlateProblem, PlateRect, RigiditySet};
use crate::poly2d::Poly2D;

/// Relative singular-value cutoff for the constraint rank.
pub const RANK_TOL: f64 = 1e-10;

/// Fraction of a segment's length kept clear at each end.
pub const INSET: f64 = 1e-3;

/// Boundary residual check grid density relative to the collocation grid.
const CHECK_DENSITY: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("no admissible functions at order {0}")]
    NoAdmissibleFunctions(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonomialBasis {
    pub n: usize,
    pub members: Vec<(usize, usize)>,
}

impl MonomialBasis {
    pub fn r(&self) -> usize {
        self.members.len()
    }
}

/// Graded-lex exponents up to total degree `n`; matches `Poly2D` storage order.
pub fn monomials(n: usize) -> MonomialBasis {
    let members = (0..=n).flat_map(|d| (0..=d).map(move |q| (d - q, q))).collect();
    MonomialBasis { n, members }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcCondition {
    Deflection,
    NormalSlope,
    NormalMoment,
    EffectiveShear,
}

impl BcKind {
    /// The pair of conditions this support imposes.
    pub fn conditions(self) -> [BcCondition; 2] {
        match self {
            BcKind::Clamped => [BcCondition::Deflection, BcCondition::NormalSlope],
            BcKind::SimplySupported => [BcCondition::Deflection, BcCondition::NormalMoment],
            BcKind::Free => [BcCondition::NormalMoment, BcCondition::EffectiveShear],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollocationPoint {
    pub segment: usize,
    pub edge: Edge,
    pub kind: BcKind,
    /// Fraction along the edge.
    pub s: f64,
    /// Reference-square coordinates.
    pub u: f64,
    pub v: f64,
}

/// Points on a segment: `max(2, ceil((n - 4)·fraction))`.
pub fn points_per_segment(n: usize, fraction: f64) -> usize {
    let raw = ((n as f64 - 4.0) * fraction - 1e-9).ceil();
    if raw < 2.0 {
        2
    } else {
        raw as usize
    }
}

/// `m` uniformly spaced midpoints of the inset segment.
pub fn segment_stations(seg: &EdgeSegmentBC, m: usize) -> Vec<f64> {
    let len = seg.fraction();
    let a = seg.s0 + INSET * len;
    let b = seg.s1 - INSET * len;
    (0..m).map(|i| a + (b - a) * (i as f64 + 0.5) / m as f64).collect()
}

pub fn collocation_points(bcs: &[EdgeSegmentBC], n: usize) -> Vec<CollocationPoint> {
    let mut out = Vec::new();
    for (i, seg) in bcs.iter().enumerate() {
        let m = points_per_segment(n, seg.fraction());
        for s in segment_stations(seg, m) {
            let (u, v) = seg.edge.reference_point(s);
            out.push(CollocationPoint { segment: i, edge: seg.edge, kind: seg.kind, s, u, v });
        }
    }
    out
}

/// `∂^(ix+iy)(u^p v^q)` at `(u, v)`.
fn mono_deriv(p: usize, q: usize, ix: usize, iy: usize, u: f64, v: f64) -> f64 {
    if ix > p || iy > q {
        return 0.0;
    }
    let fx: f64 = ((p - ix + 1)..=p).map(|k| k as f64).product();
    let fy: f64 = ((q - iy + 1)..=q).map(|k| k as f64).product();
    fx * fy * u.powi((p - ix) as i32) * v.powi((q - iy) as i32)
}

/// Raw boundary functional of `cond` applied to every monomial, with physical derivatives.
pub fn boundary_functional(
    cond: BcCondition,
    edge: Edge,
    u: f64,
    v: f64,
    rig: &RigiditySet,
    geometry: &PlateRect,
    basis: &MonomialBasis,
) -> Vec<f64> {
    let (sx, sy) = geometry.half();
    let (nx, ny) = edge.normal();
    basis
        .members
        .iter()
        .map(|&(p, q)| {
            let d = |ix: usize, iy: usize| mono_deriv(p, q, ix, iy, u, v) / (sx.powi(ix as i32) * sy.powi(iy as i32));
            match cond {
                BcCondition::Deflection => d(0, 0),
                BcCondition::NormalSlope => nx * d(1, 0) + ny * d(0, 1),
                BcCondition::NormalMoment => {
                    if edge.is_vertical() {
                        -(rig.dx * d(2, 0) + rig.d1 * d(0, 2))
                    } else {
                        -(rig.dy * d(0, 2) + rig.d1 * d(2, 0))
                    }
                }
                BcCondition::EffectiveShear => {
                    let c = rig.d1 + 4.0 * rig.dk;
                    if edge.is_vertical() {
                        -nx * (rig.dx * d(3, 0) + c * d(1, 2))
                    } else {
                        -ny * (rig.dy * d(0, 3) + c * d(2, 1))
                    }
                }
            }
        })
        .collect()
}

fn normalize(mut row: Vec<f64>) -> Vec<f64> {
    let m = row.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if m > 0.0 {
        row.iter_mut().for_each(|x| *x /= m);
    }
    row
}

/// The two normalized rows a point contributes.
pub fn bc_rows(
    point: &CollocationPoint,
    rig: &RigiditySet,
    geometry: &PlateRect,
    basis: &MonomialBasis,
) -> [Vec<f64>; 2] {
    point
        .kind
        .conditions()
        .map(|c| normalize(boundary_functional(c, point.edge, point.u, point.v, rig, geometry, basis)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowTag {
    pub point: usize,
    pub condition: BcCondition,
}

#[derive(Clone, Debug)]
pub struct ConstraintMatrix {
    pub rows: DMatrix<f64>,
    pub tags: Vec<RowTag>,
    pub points: Vec<CollocationPoint>,
}

/// Rows for every point on a supported segment.
pub fn constraint_matrix(
    bcs: &[EdgeSegmentBC],
    rig: &RigiditySet,
    geometry: &PlateRect,
    basis: &MonomialBasis,
) -> ConstraintMatrix {
    let points = collocation_points(bcs, basis.n);
    let mut data = Vec::new();
    let mut tags = Vec::new();
    for (i, pt) in points.iter().enumerate() {
        if pt.kind == BcKind::Free {
            continue;
        }
        let rows = bc_rows(pt, rig, geometry, basis);
        for (row, cond) in rows.into_iter().zip(pt.kind.conditions()) {
            data.push(row);
            tags.push(RowTag { point: i, condition: cond });
        }
    }
    let r = basis.r();
    let rows = DMatrix::from_fn(data.len(), r, |i, j| data[i][j]);
    ConstraintMatrix { rows, tags, points }
}

#[derive(Clone, Debug)]
pub struct ShapeBasis {
    pub n: usize,
    pub monomials: MonomialBasis,
    /// `r × k`, orthonormal columns.
    pub coefficients: DMatrix<f64>,
    /// Shape functions on the reference square.
    pub functions: Vec<Poly2D>,
    pub rank: usize,
    pub constraint_rows: usize,
    pub bc_residual_max: f64,
    pub geometry: PlateRect,
    pub rigidities: RigiditySet,
    pub bcs: Vec<EdgeSegmentBC>,
}

impl ShapeBasis {
    pub fn k(&self) -> usize {
        self.functions.len()
    }

    pub fn r(&self) -> usize {
        self.monomials.r()
    }

    /// Polynomial on the reference square from shape-function coefficients.
    pub fn combine(&self, c: &[f64]) -> Poly2D {
        let mono = &self.coefficients * nalgebra::DVector::from_column_slice(c);
        Poly2D::from_dense(self.n, mono.iter().copied().collect())
    }
}

/// Orthonormal basis of the numerical nullspace of `b` plus its rank.
pub fn nullspace(b: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let r = b.ncols();
    if b.nrows() == 0 {
        return (DMatrix::identity(r, r), 0);
    }
    let mut padded = DMatrix::<f64>::zeros(b.nrows().max(r), r);
    padded.view_mut((0, 0), (b.nrows(), r)).copy_from(b);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]).then(i.cmp(&j)));
    let smax = sv[order[0]];
    let rank = order.iter().filter(|&&i| sv[i] > RANK_TOL * smax).count();
    let k = r - rank;
    let mut n = DMatrix::<f64>::zeros(r, k);
    for (col, &i) in order[rank..].iter().enumerate() {
        for j in 0..r {
            n[(j, col)] = vt[(i, j)];
        }
    }
    (n, rank)
}

pub fn admissible_basis(problem: &PlateProblem, n: usize) -> Result<ShapeBasis, BasisError> {
    let rig = rigidities(&problem.material)?;
    let mono = monomials(n);
    let geometry = problem.geometry;
    let b = constraint_matrix(&problem.bcs, &rig, &geometry, &mono);
    let (coefficients, rank) = nullspace(&b.rows);
    if coefficients.ncols() == 0 {
        return Err(BasisError::NoAdmissibleFunctions(n));
    }
    let functions: Vec<Poly2D> = (0..coefficients.ncols())
        .map(|j| Poly2D::from_dense(n, coefficients.column(j).iter().copied().collect()))
        .collect();
    let bc_residual_max = boundary_residual(&problem.bcs, &rig, &geometry, &mono, &coefficients);
    Ok(ShapeBasis {
        n,
        monomials: mono,
        coefficients,
        functions,
        rank,
        constraint_rows: b.tags.len(),
        bc_residual_max,
        geometry,
        rigidities: rig,
        bcs: problem.bcs.clone(),
    })
}

/// Largest normalized-row violation on a grid ten times denser than the collocation grid.
fn boundary_residual(
    bcs: &[EdgeSegmentBC],
    rig: &RigiditySet,
    geometry: &PlateRect,
    mono: &MonomialBasis,
    coefficients: &DMatrix<f64>,
) -> f64 {
    let mut worst = 0.0f64;
    for seg in bcs.iter().filter(|s| s.kind != BcKind::Free) {
        let m = CHECK_DENSITY * points_per_segment(mono.n, seg.fraction());
        for s in segment_stations(seg, m) {
            let (u, v) = seg.edge.reference_point(s);
            for cond in seg.kind.conditions() {
                let row = normalize(boundary_functional(cond, seg.edge, u, v, rig, geometry, mono));
                for j in 0..coefficients.ncols() {
                    let val: f64 = row.iter().zip(coefficients.column(j).iter()).map(|(a, b)| a * b).sum();
                    worst = worst.max(val.abs());
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{uniform_edges, LoadSpec, MaterialSpec};

    fn square(kind: BcKind) -> PlateProblem {
        PlateProblem::new(
            MaterialSpec::isotropic(210e9, 0.3, 1e-4),
            PlateRect::new(0.25, 0.25),
            uniform_edges(kind),
            vec![LoadSpec::Uniform { pressure: 1.0 }],
        )
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(8).r(), 45);
        assert_eq!(monomials(12).r(), 91);
        assert_eq!(monomials(0).members, vec![(0, 0)]);
        assert_eq!(&monomials(2).members[..], &[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
    }

    #[test]
    fn collocation_counts() {
        let full = [EdgeSegmentBC::full(Edge::Bottom, BcKind::Clamped)];
        assert_eq!(collocation_points(&full, 8).len(), 4);
        let half = [EdgeSegmentBC::new(Edge::Bottom, 0.0, 0.5, BcKind::Clamped)];
        for p in collocation_points(&half, 12) {
            assert!(p.s > 0.0 && p.s < 0.5);
            assert!(p.u > -1.0 && p.u < 0.0 && p.v == -1.0);
        }
        let b = constraint_matrix(&uniform_edges(BcKind::Clamped), &rig(), &PlateRect::new(1.0, 1.0), &monomials(8));
        assert_eq!(b.rows.nrows(), 32);
    }

    fn rig() -> RigiditySet {
        rigidities(&MaterialSpec::isotropic(12.0 * (1.0 - 0.09), 0.3, 1.0)).unwrap()
    }

    #[test]
    fn clamped_rows_on_left_edge() {
        let pt = CollocationPoint { segment: 0, edge: Edge::Left, kind: BcKind::Clamped, s: 0.3, u: -1.0, v: -0.4 };
        let mono = monomials(3);
        let g = PlateRect::new(2.0, 2.0);
        let raw_w = boundary_functional(BcCondition::Deflection, Edge::Left, -1.0, -0.4, &rig(), &g, &mono);
        let raw_n = boundary_functional(BcCondition::NormalSlope, Edge::Left, -1.0, -0.4, &rig(), &g, &mono);
        for (k, &(p, q)) in mono.members.iter().enumerate() {
            assert!((raw_w[k] - (-1.0f64).powi(p as i32) * (-0.4f64).powi(q as i32)).abs() < 1e-15);
            let dx = if p == 0 { 0.0 } else { p as f64 * (-1.0f64).powi(p as i32 - 1) * (-0.4f64).powi(q as i32) };
            assert!((raw_n[k] + dx).abs() < 1e-15);
        }
        let rows = bc_rows(&pt, &rig(), &g, &mono);
        assert_eq!(rows[0][0], 1.0);
        assert_eq!(rows[1][0], 0.0);
    }

    #[test]
    fn ss_moment_row_on_top_edge() {
        let r = rig();
        let g = PlateRect::new(2.0, 2.0);
        let mono = monomials(4);
        let row = boundary_functional(BcCondition::NormalMoment, Edge::Top, 0.2, 1.0, &r, &g, &mono);
        for (k, &(p, q)) in mono.members.iter().enumerate() {
            let w = Poly2D::monomial(p, q, 1.0);
            let want = -r.dx * (w.differentiate(0, 2).eval(0.2, 1.0) + 0.3 * w.differentiate(2, 0).eval(0.2, 1.0));
            assert!((row[k] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn clamped_square_order_8_has_13_functions() {
        let b = admissible_basis(&square(BcKind::Clamped), 8).unwrap();
        assert_eq!(b.constraint_rows, 32);
        assert_eq!(b.k(), 13);
        assert_eq!(b.k() + b.rank, b.r());
    }

    #[test]
    fn order_3_clamped_has_no_functions() {
        let e = admissible_basis(&square(BcKind::Clamped), 3).unwrap_err();
        assert_eq!(e, BasisError::NoAdmissibleFunctions(3));
    }

    #[test]
    fn functions_vanish_at_points() {
        let p = square(BcKind::Clamped);
        let b = admissible_basis(&p, 10).unwrap();
        for pt in collocation_points(&p.bcs, 10) {
            for f in &b.functions {
                assert!(f.eval(pt.u, pt.v).abs() <= 1e-10);
            }
        }
    }
}

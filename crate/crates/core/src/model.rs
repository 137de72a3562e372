//! Problem definition: material, geometry, edge supports, loads and settings.
//!
//! Everything here is SI (m, Pa, N, kg). The deflection `w` is positive in the
//! direction of positive load.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::criteria::DesignCriterion;
use crate::poly2d::{Poly2D, RectDomain};

pub const GRAVITY: f64 = 9.81;

/// Degree of the regression used for loads.
pub const LOAD_DEGREE: usize = 5;

/// Samples per axis in the load regression grid.
pub const LOAD_GRID: usize = 21;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("no loads given")]
    NoLoads,
    #[error("load fit failed: {0}")]
    Fit(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Material {
    Isotropic { e: f64, nu: f64 },
    Orthotropic { ex: f64, ey: f64, nu_xy: f64, g_xy: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialSpec {
    pub material: Material,
    pub thickness: f64,
}

impl MaterialSpec {
    pub fn isotropic(e: f64, nu: f64, thickness: f64) -> Self {
        Self { material: Material::Isotropic { e, nu }, thickness }
    }

    pub fn orthotropic(ex: f64, ey: f64, nu_xy: f64, g_xy: f64, thickness: f64) -> Self {
        Self { material: Material::Orthotropic { ex, ey, nu_xy, g_xy }, thickness }
    }

    /// Invariant violations, empty when valid.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let t = self.thickness;
        if !(t.is_finite() && t > 0.0) {
            out.push(format!("thickness must be > 0, got {t}"));
        }
        let nu_ok = |nu: f64| nu.is_finite() && (0.0..0.5).contains(&nu);
        let pos = |v: f64| v.is_finite() && v > 0.0;
        match self.material {
            Material::Isotropic { e, nu } => {
                if !pos(e) {
                    out.push(format!("E must be > 0, got {e}"));
                }
                if !nu_ok(nu) {
                    out.push(format!("nu must lie in [0, 0.5), got {nu}"));
                }
            }
            Material::Orthotropic { ex, ey, nu_xy, g_xy } => {
                for (name, v) in [("Ex", ex), ("Ey", ey), ("Gxy", g_xy)] {
                    if !pos(v) {
                        out.push(format!("{name} must be > 0, got {v}"));
                    }
                }
                if !nu_ok(nu_xy) {
                    out.push(format!("nu_xy must lie in [0, 0.5), got {nu_xy}"));
                }
                if pos(ex) && pos(ey) && 1.0 - nu_xy * nu_xy * ey / ex <= 0.0 {
                    out.push("reciprocity gives 1 - nu_xy*nu_yx <= 0".to_string());
                }
            }
        }
        out
    }
}

/// Flexural rigidities in N·m. `h` is `d1 + 2 dk`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigiditySet {
    pub dx: f64,
    pub dy: f64,
    pub d1: f64,
    pub dk: f64,
    pub h: f64,
}

impl RigiditySet {
    pub fn scaled(&self, s: f64) -> Self {
        Self { dx: self.dx * s, dy: self.dy * s, d1: self.d1 * s, dk: self.dk * s, h: self.h * s }
    }
}

pub fn rigidities(m: &MaterialSpec) -> Result<RigiditySet, ModelError> {
    let problems = m.problems();
    if !problems.is_empty() {
        return Err(ModelError::InvalidMaterial(problems.join("; ")));
    }
    let t3 = m.thickness.powi(3);
    Ok(match m.material {
        Material::Isotropic { e, nu } => {
            let d = e * t3 / (12.0 * (1.0 - nu * nu));
            RigiditySet { dx: d, dy: d, d1: nu * d, dk: (1.0 - nu) * d / 2.0, h: d }
        }
        Material::Orthotropic { ex, ey, nu_xy, g_xy } => {
            let nu_yx = nu_xy * ey / ex;
            let den = 12.0 * (1.0 - nu_xy * nu_yx);
            let dx = ex * t3 / den;
            let dy = ey * t3 / den;
            let d1 = nu_yx * dx;
            let dk = g_xy * t3 / 12.0;
            RigiditySet { dx, dy, d1, dk, h: d1 + 2.0 * dk }
        }
    })
}

/// Rectangle `[0, lx] × [0, ly]` in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlateRect {
    pub lx: f64,
    pub ly: f64,
}

impl PlateRect {
    pub fn new(lx: f64, ly: f64) -> Self {
        Self { lx, ly }
    }

    pub fn domain(&self) -> RectDomain {
        RectDomain::new(0.0, self.lx, 0.0, self.ly)
    }

    /// Half side lengths, i.e. `dx/du` and `dy/dv` for the reference map.
    pub fn half(&self) -> (f64, f64) {
        (self.lx / 2.0, self.ly / 2.0)
    }

    pub fn to_reference(&self, x: f64, y: f64) -> (f64, f64) {
        (2.0 * x / self.lx - 1.0, 2.0 * y / self.ly - 1.0)
    }

    pub fn from_reference(&self, u: f64, v: f64) -> (f64, f64) {
        ((u + 1.0) * self.lx / 2.0, (v + 1.0) * self.ly / 2.0)
    }

    pub fn region_to_reference(&self, r: &RectDomain) -> RectDomain {
        let (u0, v0) = self.to_reference(r.x0, r.y0);
        let (u1, v1) = self.to_reference(r.x1, r.y1);
        RectDomain::new(u0, u1, v0, v1)
    }

    pub fn longest_side(&self) -> f64 {
        self.lx.max(self.ly)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    Left,
    Right,
    Bottom,
    Top,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Left, Edge::Right, Edge::Bottom, Edge::Top];

    pub fn name(self) -> &'static str {
        match self {
            Edge::Left => "left",
            Edge::Right => "right",
            Edge::Bottom => "bottom",
            Edge::Top => "top",
        }
    }

    /// Outward unit normal.
    pub fn normal(self) -> (f64, f64) {
        match self {
            Edge::Left => (-1.0, 0.0),
            Edge::Right => (1.0, 0.0),
            Edge::Bottom => (0.0, -1.0),
            Edge::Top => (0.0, 1.0),
        }
    }

    /// Counter-clockwise tangent `(-ny, nx)`.
    pub fn tangent(self) -> (f64, f64) {
        let (nx, ny) = self.normal();
        (-ny, nx)
    }

    /// True for the edges `x = const`.
    pub fn is_vertical(self) -> bool {
        matches!(self, Edge::Left | Edge::Right)
    }

    /// Reference-square point at fraction `s` along the edge (increasing coordinate).
    pub fn reference_point(self, s: f64) -> (f64, f64) {
        let t = 2.0 * s - 1.0;
        match self {
            Edge::Left => (-1.0, t),
            Edge::Right => (1.0, t),
            Edge::Bottom => (t, -1.0),
            Edge::Top => (t, 1.0),
        }
    }

    /// Edge length in meters.
    pub fn length(self, g: &PlateRect) -> f64 {
        if self.is_vertical() {
            g.ly
        } else {
            g.lx
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BcKind {
    Clamped,
    SimplySupported,
    Free,
}

impl BcKind {
    pub fn name(self) -> &'static str {
        match self {
            BcKind::Clamped => "clamped",
            BcKind::SimplySupported => "simply_supported",
            BcKind::Free => "free",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeSegmentBC {
    pub edge: Edge,
    pub s0: f64,
    pub s1: f64,
    pub kind: BcKind,
}

impl EdgeSegmentBC {
    pub fn new(edge: Edge, s0: f64, s1: f64, kind: BcKind) -> Self {
        Self { edge, s0, s1, kind }
    }

    pub fn full(edge: Edge, kind: BcKind) -> Self {
        Self::new(edge, 0.0, 1.0, kind)
    }

    pub fn fraction(&self) -> f64 {
        self.s1 - self.s0
    }
}

/// Same support on every edge.
pub fn uniform_edges(kind: BcKind) -> Vec<EdgeSegmentBC> {
    Edge::ALL.iter().map(|&e| EdgeSegmentBC::full(e, kind)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum LoadSpec {
    Uniform { pressure: f64 },
    Patch { pressure: f64, region: RectDomain },
    MassPatch { mass: f64, region: RectDomain },
    /// Pressure polynomial in plate coordinates (m → Pa).
    Polynomial { poly: Poly2D },
}

impl LoadSpec {
    /// Pressure at a point. Patches are closed sets.
    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        match self {
            LoadSpec::Uniform { pressure } => *pressure,
            LoadSpec::Patch { pressure, region } => {
                if in_patch(region, x, y) {
                    *pressure
                } else {
                    0.0
                }
            }
            LoadSpec::MassPatch { mass, region } => {
                if in_patch(region, x, y) {
                    mass * GRAVITY / region.area()
                } else {
                    0.0
                }
            }
            LoadSpec::Polynomial { poly } => poly.eval(x, y),
        }
    }

    /// Resultant force in N.
    pub fn total_force(&self, g: &PlateRect) -> f64 {
        match self {
            LoadSpec::Uniform { pressure } => pressure * g.lx * g.ly,
            LoadSpec::Patch { pressure, region } => pressure * region.area(),
            LoadSpec::MassPatch { mass, .. } => mass * GRAVITY,
            LoadSpec::Polynomial { poly } => poly.integrate_rect(&g.domain()),
        }
    }

    pub fn scaled(&self, s: f64) -> LoadSpec {
        match self {
            LoadSpec::Uniform { pressure } => LoadSpec::Uniform { pressure: pressure * s },
            LoadSpec::Patch { pressure, region } => LoadSpec::Patch { pressure: pressure * s, region: *region },
            LoadSpec::MassPatch { mass, region } => LoadSpec::MassPatch { mass: mass * s, region: *region },
            LoadSpec::Polynomial { poly } => LoadSpec::Polynomial { poly: poly.scale(s) },
        }
    }

    /// Polynomial representation on the reference square together with its support there.
    pub fn reference_piece(&self, g: &PlateRect) -> LoadPiece {
        let full = RectDomain::reference();
        match self {
            LoadSpec::Uniform { pressure } => LoadPiece { poly: Poly2D::constant(*pressure), region: full },
            LoadSpec::Patch { pressure, region } => {
                LoadPiece { poly: Poly2D::constant(*pressure), region: g.region_to_reference(region) }
            }
            LoadSpec::MassPatch { mass, region } => LoadPiece {
                poly: Poly2D::constant(mass * GRAVITY / region.area()),
                region: g.region_to_reference(region),
            },
            LoadSpec::Polynomial { poly } => {
                LoadPiece { poly: poly.affine_map(&g.domain(), &full), region: full }
            }
        }
    }

    fn exact_in_class(&self) -> bool {
        match self {
            LoadSpec::Uniform { .. } => true,
            LoadSpec::Polynomial { poly } => poly.degree() <= LOAD_DEGREE,
            _ => false,
        }
    }
}

fn in_patch(r: &RectDomain, x: f64, y: f64) -> bool {
    let ex = 1e-9 * r.width();
    let ey = 1e-9 * r.height();
    x >= r.x0 - ex && x <= r.x1 + ex && y >= r.y0 - ey && y <= r.y1 + ey
}

/// A polynomial pressure acting on a sub-rectangle of the reference square.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadPiece {
    pub poly: Poly2D,
    pub region: RectDomain,
}

/// The regression of the summed load onto degree-5 polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadPolynomial {
    /// Pressure on the reference square `[-1, 1]²`.
    pub reference: Poly2D,
    pub geometry: PlateRect,
    pub fit_rel_l2: f64,
    pub total_load_error: f64,
    /// Sum of the specified resultant forces (N).
    pub specified_total: f64,
}

impl LoadPolynomial {
    pub fn zero(geometry: PlateRect) -> Self {
        Self { reference: Poly2D::zero(), geometry, fit_rel_l2: 0.0, total_load_error: 0.0, specified_total: 0.0 }
    }

    /// Pressure in plate coordinates (m → Pa).
    pub fn physical(&self) -> Poly2D {
        self.reference.affine_map(&RectDomain::reference(), &self.geometry.domain())
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (u, v) = self.geometry.to_reference(x, y);
        self.reference.eval(u, v)
    }

    /// Integrated load in N.
    pub fn total_force(&self) -> f64 {
        let (sx, sy) = self.geometry.half();
        self.reference.integrate_rect(&RectDomain::reference()) * sx * sy
    }
}

pub fn fit_load(loads: &[LoadSpec], geometry: &PlateRect) -> Result<LoadPolynomial, ModelError> {
    if loads.is_empty() {
        return Err(ModelError::NoLoads);
    }
    let specified_total: f64 = loads.iter().map(|l| l.total_force(geometry)).sum();
    let reference = if loads.iter().all(LoadSpec::exact_in_class) {
        let mut p = Poly2D::with_degree(LOAD_DEGREE);
        for l in loads {
            p += &l.reference_piece(geometry).poly;
        }
        p
    } else {
        regress(loads, geometry)?
    };
    let fit_rel_l2 = sample_misfit(loads, geometry, &reference);
    let mut out = LoadPolynomial { reference, geometry: *geometry, fit_rel_l2, total_load_error: 0.0, specified_total };
    let got = out.total_force();
    out.total_load_error = if specified_total != 0.0 {
        ((got - specified_total) / specified_total).abs()
    } else {
        got.abs()
    };
    Ok(out)
}

fn grid_coord(i: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / (LOAD_GRID - 1) as f64
}

fn sampled_load(loads: &[LoadSpec], g: &PlateRect) -> Vec<f64> {
    let mut out = Vec::with_capacity(LOAD_GRID * LOAD_GRID);
    for i in 0..LOAD_GRID {
        for j in 0..LOAD_GRID {
            let (x, y) = g.from_reference(grid_coord(i), grid_coord(j));
            out.push(loads.iter().map(|l| l.value_at(x, y)).sum());
        }
    }
    out
}

fn regress(loads: &[LoadSpec], g: &PlateRect) -> Result<Poly2D, ModelError> {
    let ncoef = (LOAD_DEGREE + 1) * (LOAD_DEGREE + 2) / 2;
    let rows = LOAD_GRID * LOAD_GRID;
    let mut a = DMatrix::<f64>::zeros(rows, ncoef);
    for i in 0..LOAD_GRID {
        for j in 0..LOAD_GRID {
            let (u, v) = (grid_coord(i), grid_coord(j));
            let mut k = 0;
            for d in 0..=LOAD_DEGREE {
                for q in 0..=d {
                    a[(i * LOAD_GRID + j, k)] = u.powi((d - q) as i32) * v.powi(q as i32);
                    k += 1;
                }
            }
        }
    }
    let b = DVector::from_vec(sampled_load(loads, g));
    let svd = a.svd(true, true);
    let coef = svd.solve(&b, 1e-13).map_err(|e| ModelError::Fit(e.to_string()))?;
    Ok(Poly2D::from_dense(LOAD_DEGREE, coef.iter().copied().collect()))
}

fn sample_misfit(loads: &[LoadSpec], g: &PlateRect, p: &Poly2D) -> f64 {
    let samples = sampled_load(loads, g);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..LOAD_GRID {
        for j in 0..LOAD_GRID {
            let s = samples[i * LOAD_GRID + j];
            let r = p.eval(grid_coord(i), grid_coord(j)) - s;
            num += r * r;
            den += s * s;
        }
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrderMode {
    Auto,
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    pub order: OrderMode,
    pub n_start: usize,
    pub n_max: usize,
    pub tol_conv: f64,
    /// Integrate patch loads exactly instead of through the regression.
    pub exact_patch: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { order: OrderMode::Auto, n_start: 6, n_max: 14, tol_conv: 1e-3, exact_patch: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlateProblem {
    pub material: MaterialSpec,
    pub geometry: PlateRect,
    pub bcs: Vec<EdgeSegmentBC>,
    pub loads: Vec<LoadSpec>,
    pub criteria: Vec<DesignCriterion>,
    pub solver: SolverSettings,
}

impl PlateProblem {
    pub fn new(material: MaterialSpec, geometry: PlateRect, bcs: Vec<EdgeSegmentBC>, loads: Vec<LoadSpec>) -> Self {
        Self { material, geometry, bcs, loads, criteria: Vec::new(), solver: SolverSettings::default() }
    }

    pub fn has_free_edges(&self) -> bool {
        self.bcs.iter().any(|b| b.kind == BcKind::Free)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

const COVER_TOL: f64 = 1e-9;

pub fn validate_problem(p: &PlateProblem) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    for m in p.material.problems() {
        out.push(Violation::new("material", m));
    }
    let g = &p.geometry;
    if !(g.lx.is_finite() && g.lx > 0.0 && g.ly.is_finite() && g.ly > 0.0) {
        out.push(Violation::new("plate", format!("side lengths must be > 0, got {} x {}", g.lx, g.ly)));
    }

    for (i, b) in p.bcs.iter().enumerate() {
        if !(b.s0 >= 0.0 && b.s0 < b.s1 && b.s1 <= 1.0) {
            out.push(Violation::new(format!("edges[{i}]"), format!("need 0 <= from < to <= 1, got [{}, {}]", b.s0, b.s1)));
        }
    }
    for edge in Edge::ALL {
        let mut segs: Vec<(usize, &EdgeSegmentBC)> = p.bcs.iter().enumerate().filter(|(_, b)| b.edge == edge).collect();
        segs.sort_by(|a, b| a.1.s0.total_cmp(&b.1.s0));
        let mut reach = 0.0;
        let mut gap = false;
        for (i, b) in &segs {
            if b.s0 < reach - COVER_TOL {
                out.push(Violation::new(format!("edges[{i}]"), format!("segment overlap on {edge} edge")));
            } else if b.s0 > reach + COVER_TOL {
                gap = true;
            }
            reach = f64::max(reach, b.s1);
        }
        if gap || reach < 1.0 - COVER_TOL {
            out.push(Violation::new("edges", format!("{edge} edge not fully covered")));
        }
    }
    if !p.bcs.is_empty() && p.bcs.iter().all(|b| b.kind == BcKind::Free) {
        out.push(Violation::new("edges", "unconstrained plate"));
    }

    if p.loads.is_empty() {
        out.push(Violation::new("loads", "no loads given"));
    }
    for (i, l) in p.loads.iter().enumerate() {
        let path = format!("loads[{i}]");
        match l {
            LoadSpec::Uniform { pressure } | LoadSpec::Patch { pressure, .. } if !pressure.is_finite() => {
                out.push(Violation::new(path.clone(), "pressure must be finite"));
            }
            LoadSpec::MassPatch { mass, .. } if !(mass.is_finite() && *mass >= 0.0) => {
                out.push(Violation::new(path.clone(), format!("mass must be >= 0, got {mass}")));
            }
            LoadSpec::Polynomial { poly } if poly.terms().any(|(_, _, c)| !c.is_finite()) => {
                out.push(Violation::new(path.clone(), "coefficients must be finite"));
            }
            _ => {}
        }
        if let LoadSpec::Patch { region, .. } | LoadSpec::MassPatch { region, .. } = l {
            let tol = 1e-12 * g.longest_side();
            if region.x0 < -tol || region.y0 < -tol || region.x1 > g.lx + tol || region.y1 > g.ly + tol {
                out.push(Violation::new(path, "patch lies outside the plate"));
            }
        }
    }

    for (i, c) in p.criteria.iter().enumerate() {
        if let Some(m) = c.problem(g) {
            out.push(Violation::new(format!("criteria[{i}]"), m));
        }
    }

    let s = &p.solver;
    if let OrderMode::Fixed(n) = s.order {
        if n < 1 {
            out.push(Violation::new("solver.order", "order must be >= 1"));
        }
    }
    if s.n_max < s.n_start {
        out.push(Violation::new("solver.n_max", format!("n_max {} is below n_start {}", s.n_max, s.n_start)));
    }
    if !(s.tol_conv.is_finite() && s.tol_conv > 0.0) {
        out.push(Violation::new("solver.tol_conv", "must be > 0"));
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

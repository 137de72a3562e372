//! JSON problem documents in designer units (mm, kg, GPa, MPa, Pa).
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "material": {"kind": "isotropic", "E_GPa": 210, "nu": 0.3},
//!   "plate": {"Lx_mm": 250, "Ly_mm": 500, "t_mm": 0.1},
//!   "edges": [{"edge": "left", "bc": "clamped"}, ...],
//!   "loads": [{"kind": "uniform", "pressure_Pa": 0.8}],
//!   "criteria": [{"kind": "max_deflection", "limit_mm": 1.0}],
//!   "solver": {"order": "auto"}
//! }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criteria::{DesignCriterion, SweepAxis, SweepValue};
use crate::model::{
    validate_problem, BcKind, Edge, EdgeSegmentBC, LoadSpec, Material, MaterialSpec, OrderMode, PlateProblem,
    PlateRect, SolverSettings, Violation,
};
use crate::poly2d::{Poly2D, RectDomain};

pub const SCHEMA_VERSION: u32 = 1;

const MM: f64 = 1e-3;
const GPA: f64 = 1e9;
const MPA: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
}

impl ConfigError {
    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Schema { path: path.into(), message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Free text for modeling assumptions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    #[serde(default)]
    pub units: Units,
    pub material: MaterialConfig,
    pub plate: PlateConfig,
    pub edges: Vec<EdgeConfig>,
    pub loads: Vec<LoadConfig>,
    #[serde(default)]
    pub criteria: Vec<CriterionConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub length: String,
    pub mass: String,
    pub modulus: String,
    pub stress: String,
    pub pressure: String,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            length: "mm".into(),
            mass: "kg".into(),
            modulus: "GPa".into(),
            stress: "MPa".into(),
            pressure: "Pa".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialConfig {
    Isotropic {
        #[serde(rename = "E_GPa")]
        e_gpa: f64,
        nu: f64,
    },
    Orthotropic {
        #[serde(rename = "Ex_GPa")]
        ex_gpa: f64,
        #[serde(rename = "Ey_GPa")]
        ey_gpa: f64,
        nu_xy: f64,
        #[serde(rename = "Gxy_GPa")]
        gxy_gpa: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateConfig {
    #[serde(rename = "Lx_mm")]
    pub lx_mm: f64,
    #[serde(rename = "Ly_mm")]
    pub ly_mm: f64,
    pub t_mm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeName {
    Left,
    Right,
    Bottom,
    Top,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcName {
    Clamped,
    SimplySupported,
    Free,
}

fn zero() -> f64 {
    0.0
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeConfig {
    pub edge: EdgeName,
    #[serde(default = "zero")]
    pub from: f64,
    #[serde(default = "one")]
    pub to: f64,
    pub bc: BcName,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub px: usize,
    pub py: usize,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadConfig {
    Uniform {
        #[serde(rename = "pressure_Pa")]
        pressure_pa: f64,
    },
    Patch {
        #[serde(rename = "pressure_Pa")]
        pressure_pa: f64,
        x0_mm: f64,
        x1_mm: f64,
        y0_mm: f64,
        y1_mm: f64,
    },
    MassPatch {
        mass_kg: f64,
        x0_mm: f64,
        x1_mm: f64,
        y0_mm: f64,
        y1_mm: f64,
    },
    /// Pressure in Pa as `Σ coeff · x_mm^px · y_mm^py`.
    Polynomial { terms: Vec<Term> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CriterionConfig {
    MaxDeflection {
        limit_mm: f64,
    },
    DeflectionRatio {
        denominator: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        span_mm: Option<f64>,
    },
    MaxStress {
        #[serde(rename = "limit_MPa")]
        limit_mpa: f64,
    },
    PointDeflection {
        x_mm: f64,
        y_mm: f64,
        limit_mm: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderConfig {
    Fixed(usize),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "auto")]
    pub order: OrderConfig,
    #[serde(default = "default_tol")]
    pub tol_conv: f64,
    #[serde(default = "default_n_start")]
    pub n_start: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub exact_patch: bool,
}

fn auto() -> OrderConfig {
    OrderConfig::Named("auto".into())
}
fn default_tol() -> f64 {
    SolverSettings::default().tol_conv
}
fn default_n_start() -> usize {
    SolverSettings::default().n_start
}
fn default_n_max() -> usize {
    SolverSettings::default().n_max
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { order: auto(), tol_conv: default_tol(), n_start: default_n_start(), n_max: default_n_max(), exact_patch: false }
    }
}

/// Parses a config document. Errors carry the JSON path of the offending field.
pub fn parse_config(text: &str) -> Result<ProblemConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ProblemConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::schema(if path.is_empty() || path == "." { "$".to_string() } else { path }, e.into_inner().to_string())
    })?;
    Ok(cfg)
}

/// Parses, converts and validates.
pub fn load_problem(text: &str) -> Result<PlateProblem, ConfigError> {
    parse_config(text)?.to_problem()
}

fn region(x0: f64, x1: f64, y0: f64, y1: f64, path: &str) -> Result<RectDomain, ConfigError> {
    let vals = [x0, x1, y0, y1];
    if vals.iter().any(|v| !v.is_finite()) || x1 <= x0 || y1 <= y0 {
        return Err(ConfigError::schema(path, "patch needs finite x0 < x1 and y0 < y1"));
    }
    Ok(RectDomain::new(x0 * MM, x1 * MM, y0 * MM, y1 * MM))
}

impl ProblemConfig {
    pub fn to_problem(&self) -> Result<PlateProblem, ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::schema(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let u = &self.units;
        for (field, got, want) in [
            ("length", &u.length, "mm"),
            ("mass", &u.mass, "kg"),
            ("modulus", &u.modulus, "GPa"),
            ("stress", &u.stress, "MPa"),
            ("pressure", &u.pressure, "Pa"),
        ] {
            if got != want {
                return Err(ConfigError::schema(format!("units.{field}"), format!("must be \"{want}\", got \"{got}\"")));
            }
        }
        let t = self.plate.t_mm * MM;
        let material = match self.material {
            MaterialConfig::Isotropic { e_gpa, nu } => MaterialSpec::isotropic(e_gpa * GPA, nu, t),
            MaterialConfig::Orthotropic { ex_gpa, ey_gpa, nu_xy, gxy_gpa } => {
                MaterialSpec::orthotropic(ex_gpa * GPA, ey_gpa * GPA, nu_xy, gxy_gpa * GPA, t)
            }
        };
        let geometry = PlateRect::new(self.plate.lx_mm * MM, self.plate.ly_mm * MM);
        let bcs = self
            .edges
            .iter()
            .map(|e| {
                let edge = match e.edge {
                    EdgeName::Left => Edge::Left,
                    EdgeName::Right => Edge::Right,
                    EdgeName::Bottom => Edge::Bottom,
                    EdgeName::Top => Edge::Top,
                };
                EdgeSegmentBC::new(edge, e.from, e.to, bc_kind(e.bc))
            })
            .collect();
        let mut loads = Vec::with_capacity(self.loads.len());
        for (i, l) in self.loads.iter().enumerate() {
            let path = format!("loads[{i}]");
            loads.push(match *l {
                LoadConfig::Uniform { pressure_pa } => LoadSpec::Uniform { pressure: pressure_pa },
                LoadConfig::Patch { pressure_pa, x0_mm, x1_mm, y0_mm, y1_mm } => {
                    LoadSpec::Patch { pressure: pressure_pa, region: region(x0_mm, x1_mm, y0_mm, y1_mm, &path)? }
                }
                LoadConfig::MassPatch { mass_kg, x0_mm, x1_mm, y0_mm, y1_mm } => {
                    LoadSpec::MassPatch { mass: mass_kg, region: region(x0_mm, x1_mm, y0_mm, y1_mm, &path)? }
                }
                LoadConfig::Polynomial { ref terms } => {
                    if terms.iter().any(|t| t.px.saturating_add(t.py) > 32) {
                        return Err(ConfigError::schema(path, "polynomial degree above 32"));
                    }
                    let scaled: Vec<(usize, usize, f64)> = terms
                        .iter()
                        .map(|t| (t.px, t.py, t.coeff * 1e3f64.powi((t.px + t.py) as i32)))
                        .collect();
                    LoadSpec::Polynomial { poly: Poly2D::from_terms(&scaled) }
                }
            });
        }
        let criteria = self
            .criteria
            .iter()
            .map(|c| match *c {
                CriterionConfig::MaxDeflection { limit_mm } => DesignCriterion::MaxDeflection { limit: limit_mm * MM },
                CriterionConfig::DeflectionRatio { denominator, span_mm } => {
                    DesignCriterion::DeflectionRatio { denominator, span: span_mm.map(|s| s * MM) }
                }
                CriterionConfig::MaxStress { limit_mpa } => DesignCriterion::MaxStress { limit: limit_mpa * MPA },
                CriterionConfig::PointDeflection { x_mm, y_mm, limit_mm } => {
                    DesignCriterion::PointDeflection { x: x_mm * MM, y: y_mm * MM, limit: limit_mm * MM }
                }
            })
            .collect();
        let order = match &self.solver.order {
            OrderConfig::Fixed(n) => OrderMode::Fixed(*n),
            OrderConfig::Named(s) if s == "auto" => OrderMode::Auto,
            OrderConfig::Named(s) => {
                return Err(ConfigError::schema("solver.order", format!("expected \"auto\" or an integer, got \"{s}\"")))
            }
        };
        let solver = SolverSettings {
            order,
            n_start: self.solver.n_start,
            n_max: self.solver.n_max,
            tol_conv: self.solver.tol_conv,
            exact_patch: self.solver.exact_patch,
        };
        let problem = PlateProblem { material, geometry, bcs, loads, criteria, solver };
        validate_problem(&problem).map_err(ConfigError::Invalid)?;
        Ok(problem)
    }

    pub fn from_problem(p: &PlateProblem) -> ProblemConfig {
        let material = match p.material.material {
            Material::Isotropic { e, nu } => MaterialConfig::Isotropic { e_gpa: e / GPA, nu },
            Material::Orthotropic { ex, ey, nu_xy, g_xy } => {
                MaterialConfig::Orthotropic { ex_gpa: ex / GPA, ey_gpa: ey / GPA, nu_xy, gxy_gpa: g_xy / GPA }
            }
        };
        let edges = p
            .bcs
            .iter()
            .map(|b| EdgeConfig {
                edge: match b.edge {
                    Edge::Left => EdgeName::Left,
                    Edge::Right => EdgeName::Right,
                    Edge::Bottom => EdgeName::Bottom,
                    Edge::Top => EdgeName::Top,
                },
                from: b.s0,
                to: b.s1,
                bc: match b.kind {
                    BcKind::Clamped => BcName::Clamped,
                    BcKind::SimplySupported => BcName::SimplySupported,
                    BcKind::Free => BcName::Free,
                },
            })
            .collect();
        let loads = p
            .loads
            .iter()
            .map(|l| match l {
                LoadSpec::Uniform { pressure } => LoadConfig::Uniform { pressure_pa: *pressure },
                LoadSpec::Patch { pressure, region: r } => LoadConfig::Patch {
                    pressure_pa: *pressure,
                    x0_mm: r.x0 / MM,
                    x1_mm: r.x1 / MM,
                    y0_mm: r.y0 / MM,
                    y1_mm: r.y1 / MM,
                },
                LoadSpec::MassPatch { mass, region: r } => LoadConfig::MassPatch {
                    mass_kg: *mass,
                    x0_mm: r.x0 / MM,
                    x1_mm: r.x1 / MM,
                    y0_mm: r.y0 / MM,
                    y1_mm: r.y1 / MM,
                },
                LoadSpec::Polynomial { poly } => LoadConfig::Polynomial {
                    terms: poly
                        .terms()
                        .map(|(px, py, c)| Term { px, py, coeff: c / 1e3f64.powi((px + py) as i32) })
                        .collect(),
                },
            })
            .collect();
        let criteria = p
            .criteria
            .iter()
            .map(|c| match *c {
                DesignCriterion::MaxDeflection { limit } => CriterionConfig::MaxDeflection { limit_mm: limit / MM },
                DesignCriterion::DeflectionRatio { denominator, span } => {
                    CriterionConfig::DeflectionRatio { denominator, span_mm: span.map(|s| s / MM) }
                }
                DesignCriterion::MaxStress { limit } => CriterionConfig::MaxStress { limit_mpa: limit / MPA },
                DesignCriterion::PointDeflection { x, y, limit } => {
                    CriterionConfig::PointDeflection { x_mm: x / MM, y_mm: y / MM, limit_mm: limit / MM }
                }
            })
            .collect();
        let s = &p.solver;
        ProblemConfig {
            schema_version: SCHEMA_VERSION,
            name: None,
            notes: None,
            units: Units::default(),
            material,
            plate: PlateConfig { lx_mm: p.geometry.lx / MM, ly_mm: p.geometry.ly / MM, t_mm: p.material.thickness / MM },
            edges,
            loads,
            criteria,
            solver: SolverConfig {
                order: match s.order {
                    OrderMode::Auto => auto(),
                    OrderMode::Fixed(n) => OrderConfig::Fixed(n),
                },
                tol_conv: s.tol_conv,
                n_start: s.n_start,
                n_max: s.n_max,
                exact_patch: s.exact_patch,
            },
        }
    }
}

fn bc_kind(b: BcName) -> BcKind {
    match b {
        BcName::Clamped => BcKind::Clamped,
        BcName::SimplySupported => BcKind::SimplySupported,
        BcName::Free => BcKind::Free,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("unknown parameter \"{0}\"; expected t_mm, load_kg, load_scale, Lx_mm, Ly_mm or bc:<segment>")]
    UnknownParameter(String),
    #[error("bad value \"{0}\"")]
    BadValue(String),
}

/// Sweep axis by CLI name, plus the factor from the surface unit to SI.
pub fn parse_sweep_axis(name: &str) -> Result<(SweepAxis, f64), ParamError> {
    let unknown = || ParamError::UnknownParameter(name.to_string());
    Ok(match name {
        "t_mm" => (SweepAxis::Thickness, MM),
        "load_kg" => (SweepAxis::LoadMass, 1.0),
        "load_scale" => (SweepAxis::LoadScale, 1.0),
        "Lx_mm" => (SweepAxis::Lx, MM),
        "Ly_mm" => (SweepAxis::Ly, MM),
        _ => {
            let idx = name.strip_prefix("bc:").ok_or_else(unknown)?;
            (SweepAxis::SegmentKind(idx.parse().map_err(|_| unknown())?), 1.0)
        }
    })
}

/// Comma-separated sweep values. Empty input gives an empty list.
pub fn parse_sweep_values(axis: SweepAxis, unit: f64, text: &str) -> Result<Vec<SweepValue>, ParamError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|raw| {
            let s = raw.trim();
            let bad = || ParamError::BadValue(s.to_string());
            match axis {
                SweepAxis::SegmentKind(_) => match s {
                    "clamped" => Ok(SweepValue::Kind(BcKind::Clamped)),
                    "simply_supported" => Ok(SweepValue::Kind(BcKind::SimplySupported)),
                    "free" => Ok(SweepValue::Kind(BcKind::Free)),
                    _ => Err(bad()),
                },
                _ => {
                    let v: f64 = s.parse().map_err(|_| bad())?;
                    if v.is_finite() {
                        Ok(SweepValue::Number(v * unit))
                    } else {
                        Err(bad())
                    }
                }
            }
        })
        .collect()
}

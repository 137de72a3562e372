//! Moments, shears and stresses derived from a deflection polynomial, plus
//! extremum search.
//!
//! Sign convention: `w` and the load are positive in the same direction;
//! `Mx = -(Dx w_xx + D1 w_yy)`, so a sagging plate has negative moments at
//! midspan. Stresses are extreme-fibre values `6M/t²`.

use crate::model::{Edge, PlateRect, RigiditySet};
use crate::poly2d::{Poly2D, RectDomain};

/// A polynomial held on the reference square and evaluated in plate coordinates.
///
/// Expanding high-order solutions in physical monomials loses all precision,
/// so fields stay in reference form and derivatives carry the chain-rule
/// factors.
#[derive(Clone, Debug, PartialEq)]
pub struct PlateField {
    pub reference: Poly2D,
    pub geometry: PlateRect,
}

impl PlateField {
    pub fn new(reference: Poly2D, geometry: PlateRect) -> Self {
        Self { reference, geometry }
    }

    pub fn zero(geometry: PlateRect) -> Self {
        Self::new(Poly2D::zero(), geometry)
    }

    /// Wraps a polynomial written in plate coordinates (m).
    pub fn from_physical(p: &Poly2D, geometry: PlateRect) -> Self {
        Self::new(p.affine_map(&geometry.domain(), &RectDomain::reference()), geometry)
    }

    /// Expansion in plate coordinates. Loses precision for high degree on small plates.
    pub fn physical(&self) -> Poly2D {
        self.reference.affine_map(&RectDomain::reference(), &self.geometry.domain())
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (u, v) = self.geometry.to_reference(x, y);
        self.reference.eval(u, v)
    }

    /// `[f, fx, fy, fxx, fxy, fyy]` in plate coordinates.
    pub fn eval_with_derivatives(&self, x: f64, y: f64) -> [f64; 6] {
        let (u, v) = self.geometry.to_reference(x, y);
        let (sx, sy) = self.geometry.half();
        let d = self.reference.eval_with_derivatives(u, v);
        [d[0], d[1] / sx, d[2] / sy, d[3] / (sx * sx), d[4] / (sx * sy), d[5] / (sy * sy)]
    }

    pub fn derivative(&self, ix: usize, iy: usize) -> PlateField {
        let (sx, sy) = self.geometry.half();
        let s = 1.0 / (sx.powi(ix as i32) * sy.powi(iy as i32));
        Self::new(self.reference.differentiate(ix, iy).scale(s), self.geometry)
    }

    pub fn scale(&self, s: f64) -> PlateField {
        Self::new(self.reference.scale(s), self.geometry)
    }

    /// `self + s·other`; both must live on the same plate.
    pub fn plus(&self, other: &PlateField, s: f64) -> PlateField {
        debug_assert_eq!(self.geometry, other.geometry);
        let mut r = self.reference.clone();
        r.add_scaled(&other.reference, s);
        Self::new(r, self.geometry)
    }

    /// `Dx w_xxxx + 2H w_xxyy + Dy w_yyyy`.
    pub fn plate_operator(&self, rig: &RigiditySet) -> PlateField {
        self.derivative(4, 0)
            .scale(rig.dx)
            .plus(&self.derivative(2, 2), 2.0 * rig.h)
            .plus(&self.derivative(0, 4), rig.dy)
    }

    pub fn domain(&self) -> RectDomain {
        self.geometry.domain()
    }
}

/// Plate operator on a polynomial in plate coordinates.
pub fn apply_plate_operator(omega: &Poly2D, rig: &RigiditySet) -> Poly2D {
    let mut out = omega.differentiate(4, 0).scale(rig.dx);
    out.add_scaled(&omega.differentiate(2, 2), 2.0 * rig.h);
    out.add_scaled(&omega.differentiate(0, 4), rig.dy);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSet {
    pub mx: PlateField,
    pub my: PlateField,
    pub mxy: PlateField,
    pub qx: PlateField,
    pub qy: PlateField,
    pub sigma_x: PlateField,
    pub sigma_y: PlateField,
    pub tau_xy: PlateField,
    pub thickness: f64,
}

pub fn derive_fields(omega: &PlateField, rig: &RigiditySet, t: f64) -> FieldSet {
    let wxx = omega.derivative(2, 0);
    let wyy = omega.derivative(0, 2);
    let wxy = omega.derivative(1, 1);
    let mx = wxx.scale(-rig.dx).plus(&wyy, -rig.d1);
    let my = wyy.scale(-rig.dy).plus(&wxx, -rig.d1);
    let mxy = wxy.scale(-2.0 * rig.dk);
    let qx = mx.derivative(1, 0).plus(&mxy.derivative(0, 1), 1.0);
    let qy = my.derivative(0, 1).plus(&mxy.derivative(1, 0), 1.0);
    let s = 6.0 / (t * t);
    FieldSet {
        sigma_x: mx.scale(s),
        sigma_y: my.scale(s),
        tau_xy: mxy.scale(s),
        mx,
        my,
        mxy,
        qx,
        qy,
        thickness: t,
    }
}

/// Kirchhoff effective shear `Q_n + ∂M_nt/∂s` as a field; meaningful on `edge`.
pub fn effective_shear(f: &FieldSet, edge: Edge) -> PlateField {
    let (nx, ny) = edge.normal();
    let (tx, ty) = edge.tangent();
    let qn = f.qx.scale(nx).plus(&f.qy, ny);
    let mnt = f.mx.scale(nx * tx).plus(&f.mxy, nx * ty + ny * tx).plus(&f.my, ny * ty);
    let dmnt = mnt.derivative(1, 0).scale(tx).plus(&mnt.derivative(0, 1), ty);
    qn.plus(&dmnt, 1.0)
}

/// Normal bending moment `M_n` as a field; meaningful on `edge`.
pub fn normal_moment(f: &FieldSet, edge: Edge) -> PlateField {
    let (nx, ny) = edge.normal();
    f.mx.scale(nx * nx).plus(&f.mxy, 2.0 * nx * ny).plus(&f.my, ny * ny)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremumMode {
    MaxAbs,
    Max,
    Min,
}

/// `value` is `|f|` for `MaxAbs` and `f` otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtremeValue {
    pub value: f64,
    pub x: f64,
    pub y: f64,
}

pub const EXTREMUM_GRID: usize = 101;
const NEWTON_ITERS: usize = 50;
const STEP_TOL: f64 = 1e-12;

pub fn extremum(field: &PlateField, mode: ExtremumMode) -> ExtremeValue {
    extremum_by(&field.domain(), mode, |x, y| field.eval_with_derivatives(x, y))
}

/// Extremum of a polynomial written in the coordinates of `domain`.
pub fn extremum_poly(p: &Poly2D, domain: &RectDomain, mode: ExtremumMode) -> ExtremeValue {
    extremum_by(domain, mode, |x, y| p.eval_with_derivatives(x, y))
}

fn extremum_by<F>(d: &RectDomain, mode: ExtremumMode, f: F) -> ExtremeValue
where
    F: Fn(f64, f64) -> [f64; 6],
{
    let sign = |v: f64| match mode {
        ExtremumMode::Max | ExtremumMode::MaxAbs => v,
        ExtremumMode::Min => -v,
    };
    let (x, y, v) = grid_best(d, |x, y| {
        let v = f(x, y)[0];
        if mode == ExtremumMode::MaxAbs {
            v.abs()
        } else {
            sign(v)
        }
    });
    let s = match mode {
        ExtremumMode::Max => 1.0,
        ExtremumMode::Min => -1.0,
        ExtremumMode::MaxAbs => {
            if f(x, y)[0] < 0.0 {
                -1.0
            } else {
                1.0
            }
        }
    };
    let obj = |x: f64, y: f64| {
        let mut d = f(x, y);
        d.iter_mut().for_each(|c| *c *= s);
        d
    };
    let (x, y, best) = newton_refine(d, x, y, v, obj);
    let value = if mode == ExtremumMode::Min { -best } else { best };
    ExtremeValue { value, x, y }
}

/// Best grid point; ties go to the smallest x, then y.
fn grid_best(d: &RectDomain, g: impl Fn(f64, f64) -> f64) -> (f64, f64, f64) {
    let n = EXTREMUM_GRID - 1;
    let mut best = (d.x0, d.y0, f64::NEG_INFINITY);
    for i in 0..=n {
        let x = d.x0 + d.width() * i as f64 / n as f64;
        for j in 0..=n {
            let y = d.y0 + d.height() * j as f64 / n as f64;
            let v = g(x, y);
            if v > best.2 {
                best = (x, y, v);
            }
        }
    }
    best
}

/// Projected Newton ascent on `obj` (value, gradient, Hessian). Only improving steps are taken.
fn newton_refine<F>(d: &RectDomain, mut x: f64, mut y: f64, mut best: f64, obj: F) -> (f64, f64, f64)
where
    F: Fn(f64, f64) -> [f64; 6],
{
    let scale = d.width().max(d.height());
    for _ in 0..NEWTON_ITERS {
        let [_, gx, gy, hxx, hxy, hyy] = obj(x, y);
        let fix_x = (x <= d.x0 && gx < 0.0) || (x >= d.x1 && gx > 0.0);
        let fix_y = (y <= d.y0 && gy < 0.0) || (y >= d.y1 && gy > 0.0);
        let (dx, dy) = match (fix_x, fix_y) {
            (true, true) => break,
            (true, false) => {
                if hyy >= 0.0 {
                    break;
                }
                (0.0, -gy / hyy)
            }
            (false, true) => {
                if hxx >= 0.0 {
                    break;
                }
                (-gx / hxx, 0.0)
            }
            (false, false) => {
                let det = hxx * hyy - hxy * hxy;
                if !(hxx < 0.0 && det > 0.0) {
                    break;
                }
                ((-hyy * gx + hxy * gy) / det, (hxy * gx - hxx * gy) / det)
            }
        };
        if !(dx.is_finite() && dy.is_finite()) {
            break;
        }
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let nx = (x + t * dx).clamp(d.x0, d.x1);
            let ny = (y + t * dy).clamp(d.y0, d.y1);
            let v = obj(nx, ny)[0];
            if v > best {
                let step = ((nx - x).powi(2) + (ny - y).powi(2)).sqrt();
                x = nx;
                y = ny;
                best = v;
                moved = step >= STEP_TOL * scale;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (x, y, best)
}

/// Largest principal extreme-fibre stress over both faces:
/// `|σx+σy|/2 + sqrt(((σx-σy)/2)² + τ²)`.
pub fn principal_stress_at(f: &FieldSet, x: f64, y: f64) -> f64 {
    let sx = f.sigma_x.eval(x, y);
    let sy = f.sigma_y.eval(x, y);
    let t = f.tau_xy.eval(x, y);
    principal(sx, sy, t)
}

fn principal(sx: f64, sy: f64, t: f64) -> f64 {
    let c = 0.5 * (sx + sy);
    let r = (0.25 * (sx - sy).powi(2) + t * t).sqrt();
    c.abs() + r
}

pub fn max_principal_stress(f: &FieldSet) -> ExtremeValue {
    let d = f.sigma_x.domain();
    let (x, y, v) = grid_best(&d, |x, y| principal_stress_at(f, x, y));
    // Finite-difference derivatives; the improvement test keeps the result >= the grid value.
    let h = 1e-6 * d.width().max(d.height());
    let obj = |x: f64, y: f64| {
        let g = |a: f64, b: f64| principal_stress_at(f, a.clamp(d.x0, d.x1), b.clamp(d.y0, d.y1));
        let c = g(x, y);
        let (xp, xm, yp, ym) = (g(x + h, y), g(x - h, y), g(x, y + h), g(x, y - h));
        let xy = (g(x + h, y + h) - g(x + h, y - h) - g(x - h, y + h) + g(x - h, y - h)) / (4.0 * h * h);
        [c, (xp - xm) / (2.0 * h), (yp - ym) / (2.0 * h), (xp - 2.0 * c + xm) / (h * h), xy, (yp - 2.0 * c + ym) / (h * h)]
    };
    let (x, y, value) = newton_refine(&d, x, y, v, obj);
    ExtremeValue { value, x, y }
}

#![allow(dead_code)]

use plate_core::model::{uniform_edges, BcKind, LoadSpec, MaterialSpec, PlateProblem, PlateRect};
use plate_core::{Poly2D, RectDomain};

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Tensor Gauss–Legendre integral of `f` over `d`.
pub fn gl_integrate(f: impl Fn(f64, f64) -> f64, d: &RectDomain, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let (hx, hy) = (d.width() / 2.0, d.height() / 2.0);
    let (cx, cy) = ((d.x0 + d.x1) / 2.0, (d.y0 + d.y1) / 2.0);
    let mut s = 0.0;
    for &(u, wu) in &rule {
        for &(v, wv) in &rule {
            s += wu * wv * f(cx + hx * u, cy + hy * v);
        }
    }
    s * hx * hy
}

pub fn poly_from(coeffs: &[f64], degree: usize) -> Poly2D {
    let mut p = Poly2D::zero();
    let mut it = coeffs.iter();
    for d in 0..=degree {
        for q in 0..=d {
            if let Some(&c) = it.next() {
                p.set_coeff(d - q, q, c);
            }
        }
    }
    p
}

pub fn table1() -> PlateProblem {
    PlateProblem::new(
        MaterialSpec::isotropic(210e9, 0.3, 1e-4),
        PlateRect::new(0.25, 0.5),
        uniform_edges(BcKind::Clamped),
        vec![LoadSpec::Uniform { pressure: 0.8 }],
    )
}

pub fn square(kind: BcKind, q: f64) -> PlateProblem {
    PlateProblem::new(
        MaterialSpec::isotropic(70e9, 0.3, 5e-3),
        PlateRect::new(0.4, 0.4),
        uniform_edges(kind),
        vec![LoadSpec::Uniform { pressure: q }],
    )
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

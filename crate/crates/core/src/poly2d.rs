//! Dense bivariate polynomials in the monomial basis `x^p y^q`.
//!
//! Coefficients are stored by total degree, graded-lex within a degree:
//! `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Relative threshold below which products are pruned.
const PRUNE_REL: f64 = 1e-14;

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RectDomain {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl RectDomain {
    /// Panics unless `x1 > x0` and `y1 > y0`.
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        assert!(x1 > x0 && y1 > y0, "degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]");
        Self { x0, x1, y0, y1 }
    }

    /// The normalized square `[-1, 1]²`.
    pub fn reference() -> Self {
        Self::new(-1.0, 1.0, -1.0, 1.0)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

#[inline]
fn index(p: usize, q: usize) -> usize {
    let d = p + q;
    d * (d + 1) / 2 + q
}

#[inline]
fn len_for(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Exponent pair at storage position `i`.
pub fn exponents_at(i: usize) -> (usize, usize) {
    let mut d = 0;
    while len_for(d) <= i {
        d += 1;
    }
    let q = i - d * (d + 1) / 2;
    (d - q, q)
}

#[derive(Clone, PartialEq)]
pub struct Poly2D {
    degree: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Poly2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .terms()
            .map(|(p, q, c)| format!("{c:e}·x^{p}y^{q}"))
            .collect();
        if terms.is_empty() {
            write!(f, "Poly2D(0)")
        } else {
            write!(f, "Poly2D({})", terms.join(" + "))
        }
    }
}

impl Default for Poly2D {
    fn default() -> Self {
        Self::zero()
    }
}

impl Poly2D {
    pub fn zero() -> Self {
        Self { degree: 0, coeffs: vec![0.0] }
    }

    /// All-zero polynomial with room for total degree `degree`.
    pub fn with_degree(degree: usize) -> Self {
        Self { degree, coeffs: vec![0.0; len_for(degree)] }
    }

    pub fn constant(c: f64) -> Self {
        Self { degree: 0, coeffs: vec![c] }
    }

    pub fn monomial(p: usize, q: usize, c: f64) -> Self {
        let mut out = Self::with_degree(p + q);
        out.coeffs[index(p, q)] = c;
        out
    }

    pub fn from_terms(terms: &[(usize, usize, f64)]) -> Self {
        let degree = terms.iter().map(|&(p, q, _)| p + q).max().unwrap_or(0);
        let mut out = Self::with_degree(degree);
        for &(p, q, c) in terms {
            out.coeffs[index(p, q)] += c;
        }
        out
    }

    /// Builds from a coefficient slice in storage order; the length must be triangular.
    pub fn from_dense(degree: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), len_for(degree), "coefficient count does not match degree");
        Self { degree, coeffs }
    }

    /// Storage degree (an upper bound on the true degree).
    pub fn max_total_degree(&self) -> usize {
        self.degree
    }

    /// Highest total degree carrying a nonzero coefficient; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms().map(|(p, q, _)| p + q).max().unwrap_or(0)
    }

    pub fn dense(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, p: usize, q: usize) -> f64 {
        if p + q > self.degree {
            0.0
        } else {
            self.coeffs[index(p, q)]
        }
    }

    pub fn set_coeff(&mut self, p: usize, q: usize, c: f64) {
        self.grow(p + q);
        self.coeffs[index(p, q)] = c;
    }

    /// Nonzero terms as `(p, q, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(i, &c)| {
            let (p, q) = exponents_at(i);
            (p, q, c)
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn grow(&mut self, degree: usize) {
        if degree > self.degree {
            self.coeffs.resize(len_for(degree), 0.0);
            self.degree = degree;
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let n = self.degree;
        let mut xp = vec![1.0; n + 1];
        let mut yp = vec![1.0; n + 1];
        for i in 1..=n {
            xp[i] = xp[i - 1] * x;
            yp[i] = yp[i - 1] * y;
        }
        let mut sum = 0.0;
        let mut i = 0;
        for d in 0..=n {
            for q in 0..=d {
                let c = self.coeffs[i];
                if c != 0.0 {
                    sum += c * xp[d - q] * yp[q];
                }
                i += 1;
            }
        }
        sum
    }

    /// Value and first and second partials: `[f, fx, fy, fxx, fxy, fyy]`.
    pub fn eval_with_derivatives(&self, x: f64, y: f64) -> [f64; 6] {
        let n = self.degree;
        let mut xp = vec![1.0; n + 1];
        let mut yp = vec![1.0; n + 1];
        for i in 1..=n {
            xp[i] = xp[i - 1] * x;
            yp[i] = yp[i - 1] * y;
        }
        let pw = |v: &[f64], e: isize| if e < 0 { 0.0 } else { v[e as usize] };
        let mut out = [0.0; 6];
        let mut i = 0;
        for d in 0..=n {
            for q in 0..=d {
                let c = self.coeffs[i];
                i += 1;
                if c == 0.0 {
                    continue;
                }
                let p = d - q;
                let (pi, qi) = (p as isize, q as isize);
                let (pf, qf) = (p as f64, q as f64);
                out[0] += c * xp[p] * yp[q];
                out[1] += c * pf * pw(&xp, pi - 1) * yp[q];
                out[2] += c * qf * xp[p] * pw(&yp, qi - 1);
                out[3] += c * pf * (pf - 1.0) * pw(&xp, pi - 2) * yp[q];
                out[4] += c * pf * qf * pw(&xp, pi - 1) * pw(&yp, qi - 1);
                out[5] += c * qf * (qf - 1.0) * xp[p] * pw(&yp, qi - 2);
            }
        }
        out
    }

    pub fn differentiate(&self, ix: usize, iy: usize) -> Poly2D {
        if ix + iy > self.degree {
            return Poly2D::zero();
        }
        let mut out = Poly2D::with_degree(self.degree - ix - iy);
        for (p, q, c) in self.terms() {
            if p < ix || q < iy {
                continue;
            }
            let fx: f64 = ((p - ix + 1)..=p).map(|k| k as f64).product();
            let fy: f64 = ((q - iy + 1)..=q).map(|k| k as f64).product();
            out.coeffs[index(p - ix, q - iy)] += c * fx * fy;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Poly2D {
        Poly2D { degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &Poly2D, s: f64) {
        self.grow(other.degree);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    pub fn multiply(&self, other: &Poly2D) -> Poly2D {
        let mut out = Poly2D::with_degree(self.degree + other.degree);
        for (p1, q1, c1) in self.terms() {
            for (p2, q2, c2) in other.terms() {
                out.coeffs[index(p1 + p2, q1 + q2)] += c1 * c2;
            }
        }
        let cut = PRUNE_REL * out.max_abs_coeff();
        for c in out.coeffs.iter_mut() {
            if c.abs() < cut {
                *c = 0.0;
            }
        }
        out
    }

    pub fn integrate_rect(&self, d: &RectDomain) -> f64 {
        let n = self.degree + 1;
        let mut ix = vec![0.0; n];
        let mut iy = vec![0.0; n];
        let (mut ax, mut bx, mut ay, mut by) = (d.x0, d.x1, d.y0, d.y1);
        for k in 0..n {
            ix[k] = (bx - ax) / (k + 1) as f64;
            iy[k] = (by - ay) / (k + 1) as f64;
            ax *= d.x0;
            bx *= d.x1;
            ay *= d.y0;
            by *= d.y1;
        }
        self.terms().map(|(p, q, c)| c * ix[p] * iy[q]).sum()
    }

    /// Returns `p ∘ T`, where `T` maps `to` affinely onto `from`.
    pub fn affine_map(&self, from: &RectDomain, to: &RectDomain) -> Poly2D {
        let ax = from.width() / to.width();
        let bx = from.x0 - to.x0 * ax;
        let ay = from.height() / to.height();
        let by = from.y0 - to.y0 * ay;
        self.substitute_affine(ax, bx, ay, by)
    }

    /// Returns `q(u, v) = p(ax·u + bx, ay·v + by)`.
    pub fn substitute_affine(&self, ax: f64, bx: f64, ay: f64, by: f64) -> Poly2D {
        let n = self.degree;
        let xs = linear_powers(ax, bx, n);
        let ys = linear_powers(ay, by, n);
        let mut out = Poly2D::with_degree(n);
        for (p, q, c) in self.terms() {
            for (i, xi) in xs[p].iter().enumerate() {
                if *xi == 0.0 {
                    continue;
                }
                for (j, yj) in ys[q].iter().enumerate() {
                    out.coeffs[index(i, j)] += c * xi * yj;
                }
            }
        }
        out
    }

    /// Univariate coefficients in `y` of `p(x, ·)`.
    pub fn restrict_x(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.degree + 1];
        for (p, q, c) in self.terms() {
            out[q] += c * x.powi(p as i32);
        }
        out
    }

    /// Univariate coefficients in `x` of `p(·, y)`.
    pub fn restrict_y(&self, y: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.degree + 1];
        for (p, q, c) in self.terms() {
            out[p] += c * y.powi(q as i32);
        }
        out
    }
}

/// Coefficients of `(a·u + b)^k` for `k = 0..=n`.
fn linear_powers(a: f64, b: f64, n: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![1.0]];
    for k in 1..=n {
        let prev = &out[k - 1];
        let mut next = vec![0.0; k + 1];
        for (i, c) in prev.iter().enumerate() {
            next[i] += c * b;
            next[i + 1] += c * a;
        }
        out.push(next);
    }
    out
}

pub fn poly1_eval(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

pub fn poly1_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0.0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact integral of a univariate polynomial over `[a, b]`.
pub fn poly1_integrate(c: &[f64], a: f64, b: f64) -> f64 {
    let (mut pa, mut pb) = (a, b);
    let mut sum = 0.0;
    for (k, ck) in c.iter().enumerate() {
        sum += ck * (pb - pa) / (k + 1) as f64;
        pa *= a;
        pb *= b;
    }
    sum
}

impl Add for &Poly2D {
    type Output = Poly2D;
    fn add(self, rhs: &Poly2D) -> Poly2D {
        let mut out = self.clone();
        out.add_scaled(rhs, 1.0);
        out
    }
}

impl Sub for &Poly2D {
    type Output = Poly2D;
    fn sub(self, rhs: &Poly2D) -> Poly2D {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0);
        out
    }
}

impl Mul for &Poly2D {
    type Output = Poly2D;
    fn mul(self, rhs: &Poly2D) -> Poly2D {
        self.multiply(rhs)
    }
}

impl Mul<f64> for &Poly2D {
    type Output = Poly2D;
    fn mul(self, rhs: f64) -> Poly2D {
        self.scale(rhs)
    }
}

impl Neg for &Poly2D {
    type Output = Poly2D;
    fn neg(self) -> Poly2D {
        self.scale(-1.0)
    }
}

impl AddAssign<&Poly2D> for Poly2D {
    fn add_assign(&mut self, rhs: &Poly2D) {
        self.add_scaled(rhs, 1.0);
    }
}

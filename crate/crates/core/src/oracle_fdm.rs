//! Finite-difference reference solver and the Navier double-sine series.
//!
//! The 13-point stencil for `Dx w_xxxx + 2H w_xxyy + Dy w_yyyy = q` is
//! applied on interior nodes. Edge nodes carry `w = 0`; the ghost row beyond
//! an edge mirrors the first interior row, with `+` for clamped edges and `-`
//! for simply supported ones. The resulting matrix is symmetric positive
//! definite and is factored as a band.

use std::f64::consts::PI;

use thiserror::Error;

use crate::fields::{extremum, ExtremumMode};
use crate::model::{rigidities, validate_problem, BcKind, Edge, ModelError, PlateProblem, PlateRect, RigiditySet};
use crate::solver::Solution;

pub const MIN_NODES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("unsupported by the finite-difference oracle: {0}")]
    Unsupported(String),
    #[error("grid too coarse: need at least {MIN_NODES} interior nodes per side, got {0} x {1}")]
    GridTooCoarse(usize, usize),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FdmGrid {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    /// Interior deflections, `w[(j-1)·nx + (i-1)]` for node `(i, j)`.
    pub w: Vec<f64>,
    pub geometry: PlateRect,
}

impl FdmGrid {
    /// Deflection at node `(i, j)`, with `0` and `n+1` on the edges.
    pub fn node(&self, i: usize, j: usize) -> f64 {
        if i == 0 || j == 0 || i > self.nx || j > self.ny {
            0.0
        } else {
            self.w[(j - 1) * self.nx + (i - 1)]
        }
    }

    pub fn position(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.hx, j as f64 * self.hy)
    }

    /// Largest |w| over the nodes with its location.
    pub fn max_abs(&self) -> (f64, f64, f64) {
        let mut best = (0.0, 0.0, 0.0);
        for j in 1..=self.ny {
            for i in 1..=self.nx {
                let v = self.node(i, j).abs();
                if v > best.0 {
                    let (x, y) = self.position(i, j);
                    best = (v, x, y);
                }
            }
        }
        best
    }

    /// Bilinear interpolation over the node lattice, edges included.
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        let snap = |f: f64| if (f - f.round()).abs() < 1e-9 { f.round() } else { f };
        let fx = snap(x / self.hx).clamp(0.0, (self.nx + 1) as f64);
        let fy = snap(y / self.hy).clamp(0.0, (self.ny + 1) as f64);
        let i = (fx.floor() as usize).min(self.nx);
        let j = (fy.floor() as usize).min(self.ny);
        let (a, b) = (fx - i as f64, fy - j as f64);
        (1.0 - a) * (1.0 - b) * self.node(i, j)
            + a * (1.0 - b) * self.node(i + 1, j)
            + (1.0 - a) * b * self.node(i, j + 1)
            + a * b * self.node(i + 1, j + 1)
    }
}

/// Anything that can report a deflection field for comparison.
pub trait DeflectionSource {
    fn deflection_at(&self, x: f64, y: f64) -> f64;
    fn max_deflection(&self) -> f64;
}

impl DeflectionSource for Solution {
    fn deflection_at(&self, x: f64, y: f64) -> f64 {
        self.omega.eval(x, y)
    }
    fn max_deflection(&self) -> f64 {
        extremum(&self.omega, ExtremumMode::MaxAbs).value
    }
}

impl DeflectionSource for FdmGrid {
    fn deflection_at(&self, x: f64, y: f64) -> f64 {
        self.interpolate(x, y)
    }
    fn max_deflection(&self) -> f64 {
        self.max_abs().0
    }
}

/// Support kind of each full edge, or an error for free or mixed edges.
fn edge_kinds(p: &PlateProblem) -> Result<[BcKind; 4], OracleError> {
    let mut out = [BcKind::Clamped; 4];
    for (slot, edge) in out.iter_mut().zip(Edge::ALL) {
        let kinds: Vec<BcKind> = p.bcs.iter().filter(|b| b.edge == edge).map(|b| b.kind).collect();
        let first = *kinds.first().ok_or_else(|| OracleError::Unsupported(format!("{edge} edge has no support")))?;
        if kinds.iter().any(|&k| k != first) {
            return Err(OracleError::Unsupported(format!("{edge} edge mixes support kinds")));
        }
        if first == BcKind::Free {
            return Err(OracleError::Unsupported(format!("free edge ({edge})")));
        }
        *slot = first;
    }
    Ok(out)
}

/// Symmetric positive definite band matrix, lower half stored by rows.
struct BandSpd {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandSpd {
    fn new(n: usize, bw: usize) -> Self {
        Self { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    /// Adds to `A[i][j]` for `j <= i`.
    fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(j <= i && i - j <= self.bw);
        self.data[i * (self.bw + 1) + self.bw - (i - j)] += v;
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.bw + 1) + self.bw - (i - j)]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * (self.bw + 1) + self.bw - (i - j)] = v;
    }

    fn cholesky(&mut self) -> Result<(), OracleError> {
        let bw = self.bw;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let k0 = lo.max(j.saturating_sub(bw));
                let ri = i * (bw + 1) + bw - i;
                let rj = j * (bw + 1) + bw - j;
                let mut s = self.at(i, j);
                for k in k0..j {
                    s -= self.data[ri + k] * self.data[rj + k];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(OracleError::NotPositiveDefinite);
                    }
                    self.set(i, i, s.sqrt());
                } else {
                    let d = self.at(j, j);
                    self.set(i, j, s / d);
                }
            }
        }
        Ok(())
    }

    fn solve(&self, b: &mut [f64]) {
        let bw = self.bw;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            let mut s = b[i];
            for k in lo..i {
                s -= self.at(i, k) * b[k];
            }
            b[i] = s / self.at(i, i);
        }
        for i in (0..self.n).rev() {
            let hi = (i + bw).min(self.n - 1);
            let mut s = b[i];
            for k in (i + 1)..=hi {
                s -= self.at(k, i) * b[k];
            }
            b[i] = s / self.at(i, i);
        }
    }
}

pub fn solve_fdm(problem: &PlateProblem, nx: usize, ny: usize) -> Result<FdmGrid, OracleError> {
    if let Err(v) = validate_problem(problem) {
        let msg = v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
        return Err(OracleError::Invalid(msg));
    }
    if nx < MIN_NODES || ny < MIN_NODES {
        return Err(OracleError::GridTooCoarse(nx, ny));
    }
    let kinds = edge_kinds(problem)?;
    let ghost = |k: BcKind| if k == BcKind::Clamped { 1.0 } else { -1.0 };
    let [left, right, bottom, top] = kinds.map(ghost);
    let rig = rigidities(&problem.material)?;
    let g = problem.geometry;
    let hx = g.lx / (nx + 1) as f64;
    let hy = g.ly / (ny + 1) as f64;

    // Short dimension innermost keeps the band narrow.
    let x_inner = nx <= ny;
    let index = |i: usize, j: usize| if x_inner { (j - 1) * nx + (i - 1) } else { (i - 1) * ny + (j - 1) };
    let n = nx * ny;
    let bw = 2 * if x_inner { nx } else { ny };
    let mut a = BandSpd::new(n, bw);
    let mut rhs = vec![0.0; n];

    let cx = rig.dx / hx.powi(4);
    let cy = rig.dy / hy.powi(4);
    let cxy = 2.0 * rig.h / (hx * hx * hy * hy);
    let d4 = [1.0, -4.0, 6.0, -4.0, 1.0];
    let d2 = [1.0, -2.0, 1.0];

    for j in 1..=ny {
        for i in 1..=nx {
            let row = index(i, j);
            let mut put = |ii: isize, jj: isize, v: f64| {
                // Ghost nodes fold back onto the first interior row or column.
                let (mut ii, mut jj, mut v) = (ii, jj, v);
                if ii == -1 {
                    ii = 1;
                    v *= left;
                } else if ii == nx as isize + 2 {
                    ii = nx as isize;
                    v *= right;
                }
                if jj == -1 {
                    jj = 1;
                    v *= bottom;
                } else if jj == ny as isize + 2 {
                    jj = ny as isize;
                    v *= top;
                }
                if ii < 1 || jj < 1 || ii > nx as isize || jj > ny as isize {
                    return;
                }
                let col = index(ii as usize, jj as usize);
                if col <= row {
                    a.add(row, col, v);
                }
            };
            let (ii, jj) = (i as isize, j as isize);
            for (o, c) in d4.iter().enumerate() {
                let o = o as isize - 2;
                put(ii + o, jj, cx * c);
                put(ii, jj + o, cy * c);
            }
            for (ox, c1) in d2.iter().enumerate() {
                for (oy, c2) in d2.iter().enumerate() {
                    put(ii + ox as isize - 1, jj + oy as isize - 1, cxy * c1 * c2);
                }
            }
            let (x, y) = (i as f64 * hx, j as f64 * hy);
            rhs[row] = problem.loads.iter().map(|l| l.value_at(x, y)).sum();
        }
    }
    a.cholesky()?;
    a.solve(&mut rhs);

    let mut w = vec![0.0; n];
    for j in 1..=ny {
        for i in 1..=nx {
            w[(j - 1) * nx + (i - 1)] = rhs[index(i, j)];
        }
    }
    Ok(FdmGrid { nx, ny, hx, hy, w, geometry: g })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub candidate_max: f64,
    pub reference_max: f64,
    /// `|candidate_max − reference_max| / reference_max`.
    pub max_rel_diff: f64,
    /// RMS over interior nodes of the pointwise difference, relative to `reference_max`.
    pub rms_rel: f64,
}

pub fn compare(candidate: &dyn DeflectionSource, grid: &FdmGrid) -> ComparisonReport {
    let reference_max = grid.max_abs().0;
    let candidate_max = candidate.max_deflection();
    let mut sum = 0.0;
    for j in 1..=grid.ny {
        for i in 1..=grid.nx {
            let (x, y) = grid.position(i, j);
            sum += (candidate.deflection_at(x, y) - grid.node(i, j)).powi(2);
        }
    }
    let rms = (sum / (grid.nx * grid.ny) as f64).sqrt();
    let rel = |v: f64| if reference_max == 0.0 { v } else { v / reference_max };
    ComparisonReport {
        candidate_max,
        reference_max,
        max_rel_diff: rel((candidate_max - reference_max).abs()),
        rms_rel: rel(rms),
    }
}

/// Navier series deflection of a simply supported orthotropic plate under uniform `q`,
/// with `terms × terms` odd-odd harmonics.
pub fn navier_uniform(rig: &RigiditySet, g: &PlateRect, q: f64, x: f64, y: f64, terms: usize) -> f64 {
    let (a, b) = (g.lx, g.ly);
    let mut sum = 0.0;
    for mi in 0..terms {
        let m = (2 * mi + 1) as f64;
        for ni in 0..terms {
            let n = (2 * ni + 1) as f64;
            let (am, bn) = (m * PI / a, n * PI / b);
            let den = rig.dx * am.powi(4) + 2.0 * rig.h * am * am * bn * bn + rig.dy * bn.powi(4);
            let qmn = 16.0 * q / (PI * PI * m * n);
            sum += qmn / den * (am * x).sin() * (bn * y).sin();
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{uniform_edges, LoadSpec, MaterialSpec};

    fn square(kind: BcKind, q: f64) -> PlateProblem {
        PlateProblem::new(
            MaterialSpec::isotropic(12.0 * (1.0 - 0.09), 0.3, 1.0),
            PlateRect::new(1.0, 1.0),
            uniform_edges(kind),
            vec![LoadSpec::Uniform { pressure: q }],
        )
    }

    #[test]
    fn band_cholesky_matches_dense() {
        let n = 7;
        let bw = 2;
        let mut a = BandSpd::new(n, bw);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                let v = if i == j { 10.0 + i as f64 } else { 1.0 / (1.0 + (i + j) as f64) };
                a.add(i, j, v);
                dense[i][j] = v;
                dense[j][i] = v;
            }
        }
        let x: Vec<f64> = (0..n).map(|i| i as f64 - 2.5).collect();
        let mut b: Vec<f64> = (0..n).map(|i| (0..n).map(|j| dense[i][j] * x[j]).sum()).collect();
        a.cholesky().unwrap();
        a.solve(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_load_is_zero() {
        let g = solve_fdm(&square(BcKind::Clamped, 0.0), 17, 17).unwrap();
        assert!(g.w.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ss_square_close_to_navier() {
        let grid = solve_fdm(&square(BcKind::SimplySupported, 1.0), 63, 63).unwrap();
        let (w, x, y) = grid.max_abs();
        assert!((x - 0.5).abs() < 1e-12 && (y - 0.5).abs() < 1e-12);
        assert!((w / 0.00406235 - 1.0).abs() < 0.01);
    }

    #[test]
    fn free_edges_are_unsupported() {
        let mut p = square(BcKind::Clamped, 1.0);
        p.bcs[1].kind = BcKind::Free;
        assert!(matches!(solve_fdm(&p, 31, 31), Err(OracleError::Unsupported(_))));
    }

    #[test]
    fn grid_compared_with_itself_is_zero() {
        let grid = solve_fdm(&square(BcKind::Clamped, 1.0), 17, 21).unwrap();
        let r = compare(&grid, &grid);
        assert_eq!(r.max_rel_diff, 0.0);
        assert_eq!(r.rms_rel, 0.0);
    }
}

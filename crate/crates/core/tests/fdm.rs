mod common;

use common::{rel, square, table1};
use plate_core::model::{rigidities, BcKind, LoadSpec};
use plate_core::oracle_fdm::{compare, navier_uniform, solve_fdm};
use plate_core::solver::{solve, solve_fixed_order};

fn centre(problem: &plate_core::PlateProblem, n: usize) -> f64 {
    let g = solve_fdm(problem, n, n).unwrap();
    g.node(n / 2, n / 2)
}

/// Centre values on grids with h, h/2, h/4 share the centre node.
fn richardson_ratio(problem: &plate_core::PlateProblem) -> f64 {
    let (a, b, c) = (centre(problem, 17), centre(problem, 35), centre(problem, 71));
    (a - b) / (b - c)
}

#[test]
fn fdm_is_second_order_simply_supported() {
    let r = richardson_ratio(&square(BcKind::SimplySupported, 1000.0));
    assert!((3.5..=4.5).contains(&r), "ratio {r}");
}

#[test]
fn fdm_is_second_order_clamped() {
    let r = richardson_ratio(&square(BcKind::Clamped, 1000.0));
    assert!((3.5..=4.5).contains(&r), "ratio {r}");
}

#[test]
fn galerkin_agrees_with_fdm_clamped() {
    let p = table1();
    let s = solve(&p).unwrap().solution;
    let c = compare(&s, &solve_fdm(&p, 61, 121).unwrap());
    assert!(c.max_rel_diff <= 0.02, "{c:?}");
}

#[test]
fn galerkin_agrees_with_fdm_simply_supported() {
    let p = square(BcKind::SimplySupported, 1000.0);
    let s = solve(&p).unwrap().solution;
    let c = compare(&s, &solve_fdm(&p, 101, 101).unwrap());
    assert!(c.max_rel_diff <= 0.02, "{c:?}");
}

#[test]
fn navier_coefficient_for_square() {
    let p = square(BcKind::SimplySupported, 1000.0);
    let rig = rigidities(&p.material).unwrap();
    let a = p.geometry.lx;
    let w = navier_uniform(&rig, &p.geometry, 1000.0, a / 2.0, a / 2.0, 50);
    let alpha = w * rig.dx / (1000.0 * a.powi(4));
    assert!(rel(alpha, 0.00406235).abs() < 1e-4, "{alpha}");
    let s = solve_fixed_order(&p, 12).unwrap();
    assert!(rel(s.omega_max(), w) < 0.01);
}

#[test]
fn manufactured_clamped_solution_is_reproduced() {
    // w = x²(a−x)² y²(b−y)² is clamped on every edge and lies in the degree-8 space.
    let mut p = table1();
    let (a, b) = (p.geometry.lx, p.geometry.ly);
    let rig = rigidities(&p.material).unwrap();
    let fx = plate_core::Poly2D::from_terms(&[(2, 0, a * a), (3, 0, -2.0 * a), (4, 0, 1.0)]);
    let fy = plate_core::Poly2D::from_terms(&[(0, 2, b * b), (0, 3, -2.0 * b), (0, 4, 1.0)]);
    let w = fx.multiply(&fy).scale(1e3);
    let q = plate_core::fields::apply_plate_operator(&w, &rig);
    p.loads = vec![LoadSpec::Polynomial { poly: q }];
    let s = solve_fixed_order(&p, 10).unwrap();
    let wmax = w.eval(a / 2.0, b / 2.0);
    for &(x, y) in &[(0.05, 0.1), (0.125, 0.25), (0.2, 0.45), (0.01, 0.3)] {
        assert!((s.omega.eval(x, y) - w.eval(x, y)).abs() <= 1e-8 * wmax);
    }
}

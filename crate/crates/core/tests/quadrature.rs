mod common;

use common::{gl_integrate, poly_from, square, table1};
use plate_core::basis::admissible_basis;
use plate_core::model::{fit_load, rigidities, BcKind};
use plate_core::solver::assemble;
use plate_core::{PlateField, RectDomain};
use proptest::prelude::*;

#[test]
fn gauss_rule_integrates_monomials() {
    let d = RectDomain::new(-1.0, 1.0, -1.0, 1.0);
    for p in 0..12 {
        let exact = if p % 2 == 0 { 2.0 / (p + 1) as f64 } else { 0.0 };
        let got = gl_integrate(|x, _| x.powi(p), &d, 8) / 2.0;
        assert!((got - exact).abs() < 1e-14, "p = {p}");
    }
}

proptest! {
    #[test]
    fn exact_integral_matches_gauss(
        coeffs in prop::collection::vec(-10.0f64..10.0, 66),
        degree in 0usize..=10,
        x0 in -2.0f64..2.0, w in 0.05f64..3.0,
        y0 in -2.0f64..2.0, h in 0.05f64..3.0,
    ) {
        let p = poly_from(&coeffs, degree);
        let d = RectDomain::new(x0, x0 + w, y0, y0 + h);
        let exact = p.integrate_rect(&d);
        let gauss = gl_integrate(|x, y| p.eval(x, y), &d, 8);
        let scale = gl_integrate(|x, y| p.eval(x, y).abs(), &d, 8).max(1e-300);
        prop_assert!((exact - gauss).abs() <= 1e-11 * scale.max(exact.abs()), "{exact} vs {gauss}");
    }
}

fn stiffness_matches_quadrature(problem: &plate_core::PlateProblem, n: usize) {
    let rig = rigidities(&problem.material).unwrap();
    let basis = admissible_basis(problem, n).unwrap();
    let load = fit_load(&problem.loads, &problem.geometry).unwrap();
    let sys = assemble(&basis, &load, &rig);
    let (sx, sy) = problem.geometry.half();
    let refsq = RectDomain::reference();
    let ops: Vec<_> = basis
        .functions
        .iter()
        .map(|f| PlateField::new(f.clone(), problem.geometry).plate_operator(&rig).reference)
        .collect();
    let kmax = sys.stiffness.amax();
    for i in 0..basis.k() {
        for j in 0..basis.k() {
            let phi = &basis.functions[i];
            let q = gl_integrate(|u, v| phi.eval(u, v) * ops[j].eval(u, v), &refsq, n + 2) * sx * sy;
            assert!((sys.stiffness[(i, j)] - q).abs() <= 1e-11 * kmax, "K[{i}][{j}] {} vs {q}", sys.stiffness[(i, j)]);
        }
        let f = gl_integrate(|u, v| basis.functions[i].eval(u, v) * load.reference.eval(u, v), &refsq, n + 2) * sx * sy;
        assert!((sys.rhs[i] - f).abs() <= 1e-11 * sys.rhs.amax().max(f.abs()));
    }
}

#[test]
fn stiffness_clamped_rectangle() {
    stiffness_matches_quadrature(&table1(), 8);
}

#[test]
fn stiffness_simply_supported_square() {
    stiffness_matches_quadrature(&square(BcKind::SimplySupported, 1000.0), 10);
}

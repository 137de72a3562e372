mod common;

use common::square;
use nalgebra::DVector;
use plate_core::basis::{admissible_basis, collocation_points, bc_rows};
use plate_core::model::{
    fit_load, rigidities, BcKind, Edge, EdgeSegmentBC, LoadSpec, MaterialSpec, PlateProblem, PlateRect,
};
use plate_core::solver::{assemble, solve_fixed_order};
use plate_core::Poly2D;
use proptest::prelude::*;

fn kind_strategy() -> impl Strategy<Value = BcKind> {
    prop_oneof![Just(BcKind::Clamped), Just(BcKind::SimplySupported), Just(BcKind::Free)]
}

/// Edge kinds with at least two supported edges so the plate cannot move freely.
fn supported_layout() -> impl Strategy<Value = [BcKind; 4]> {
    prop::array::uniform4(kind_strategy())
        .prop_filter("needs two supported edges", |k| k.iter().filter(|&&b| b != BcKind::Free).count() >= 2)
}

fn problem_with(kinds: [BcKind; 4], lx: f64, ly: f64, loads: Vec<LoadSpec>) -> PlateProblem {
    let bcs = Edge::ALL.iter().zip(kinds).map(|(&e, k)| EdgeSegmentBC::full(e, k)).collect();
    PlateProblem::new(MaterialSpec::isotropic(70e9, 0.3, 2e-3), PlateRect::new(lx, ly), bcs, loads)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn superposition(
        kinds in supported_layout(),
        lx in 0.2f64..1.0, ly in 0.2f64..1.0,
        q1 in -2000.0f64..2000.0, a in -3.0f64..3.0, b in -3.0f64..3.0,
        c10 in -5e3f64..5e3, c01 in -5e3f64..5e3, c11 in -1e4f64..1e4,
    ) {
        let l1 = LoadSpec::Uniform { pressure: q1 };
        let l2 = LoadSpec::Polynomial { poly: Poly2D::from_terms(&[(1, 0, c10), (0, 1, c01), (1, 1, c11)]) };
        let n = 8;
        let s1 = solve_fixed_order(&problem_with(kinds, lx, ly, vec![l1.clone()]), n).unwrap();
        let s2 = solve_fixed_order(&problem_with(kinds, lx, ly, vec![l2.clone()]), n).unwrap();
        let s12 = solve_fixed_order(&problem_with(kinds, lx, ly, vec![l1.scaled(a), l2.scaled(b)]), n).unwrap();
        let expect: Vec<f64> = s1.coefficients.iter().zip(&s2.coefficients).map(|(x, y)| a * x + b * y).collect();
        let scale = max_abs(&expect).max(max_abs(&s12.coefficients)).max(1e-300);
        for (x, y) in expect.iter().zip(&s12.coefficients) {
            prop_assert!((x - y).abs() <= 1e-9 * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn galerkin_residual_is_orthogonal(
        kinds in supported_layout(),
        lx in 0.2f64..1.0, ly in 0.2f64..1.0,
        q in 1.0f64..5000.0, n in 6usize..=10,
    ) {
        let p = problem_with(kinds, lx, ly, vec![LoadSpec::Uniform { pressure: q }]);
        let rig = rigidities(&p.material).unwrap();
        let basis = admissible_basis(&p, n).unwrap();
        let load = fit_load(&p.loads, &p.geometry).unwrap();
        let sys = assemble(&basis, &load, &rig);
        let c = sys.solve().coefficients;
        let r: DVector<f64> = &sys.stiffness * &c - &sys.rhs;
        prop_assert!(r.amax() <= 1e-9 * sys.rhs.amax(), "{} vs {}", r.amax(), sys.rhs.amax());
    }

    #[test]
    fn boundary_conditions_hold_at_collocation_points(
        kinds in prop::array::uniform4(kind_strategy()),
        lx in 0.1f64..2.0, ly in 0.1f64..2.0, n in 6usize..=12,
    ) {
        prop_assume!(kinds.iter().any(|&k| k != BcKind::Free));
        let p = problem_with(kinds, lx, ly, vec![LoadSpec::Uniform { pressure: 1.0 }]);
        let rig = rigidities(&p.material).unwrap();
        let basis = admissible_basis(&p, n).unwrap();
        for pt in collocation_points(&p.bcs, n).iter().filter(|pt| pt.kind != BcKind::Free) {
            for row in bc_rows(pt, &rig, &p.geometry, &basis.monomials) {
                for j in 0..basis.k() {
                    let v: f64 = row.iter().zip(basis.coefficients.column(j).iter()).map(|(a, b)| a * b).sum();
                    prop_assert!(v.abs() <= 1e-10, "{v} at {:?} {}", pt.edge, pt.s);
                }
            }
        }
    }

    #[test]
    fn symmetric_problems_give_symmetric_deflection(
        k1 in prop_oneof![Just(BcKind::Clamped), Just(BcKind::SimplySupported)],
        k2 in kind_strategy(),
        lx in 0.2f64..1.0, ly in 0.2f64..1.0,
        x in 0.0f64..1.0, y in 0.0f64..1.0,
    ) {
        let p = problem_with([k1, k1, k2, k2], lx, ly, vec![LoadSpec::Uniform { pressure: 100.0 }]);
        let s = solve_fixed_order(&p, 10).unwrap();
        let (x, y) = (x * lx, y * ly);
        let w = s.omega.eval(x, y);
        let tol = 1e-6 * s.omega_max();
        prop_assert!((w - s.omega.eval(lx - x, y)).abs() <= tol);
        prop_assert!((w - s.omega.eval(x, ly - y)).abs() <= tol);
    }

    #[test]
    fn orthotropic_with_equal_constants_is_isotropic(
        kinds in supported_layout(),
        e in 1.0f64..200.0, nu in 0.0f64..0.45, t in 0.5f64..10.0,
    ) {
        let e = e * 1e9;
        let t = t * 1e-3;
        let loads = vec![LoadSpec::Uniform { pressure: 500.0 }];
        let mut iso = problem_with(kinds, 0.3, 0.5, loads.clone());
        iso.material = MaterialSpec::isotropic(e, nu, t);
        let mut ortho = problem_with(kinds, 0.3, 0.5, loads);
        ortho.material = MaterialSpec::orthotropic(e, e, nu, e / (2.0 * (1.0 + nu)), t);
        let a = solve_fixed_order(&iso, 8).unwrap();
        let b = solve_fixed_order(&ortho, 8).unwrap();
        // Shape functions may rotate between runs; the deflection may not.
        let (wa, wb) = (a.omega.reference.dense(), b.omega.reference.dense());
        let scale = max_abs(wa);
        for (x, y) in wa.iter().zip(wb) {
            prop_assert!((x - y).abs() <= 1e-10 * scale, "{x} vs {y}");
        }
    }
}

#[test]
fn clamped_square_is_symmetric_in_both_diagonals() {
    let s = solve_fixed_order(&square(BcKind::Clamped, 1000.0), 12).unwrap();
    let tol = 1e-6 * s.omega_max();
    for &(x, y) in &[(0.05, 0.1), (0.13, 0.31), (0.2, 0.07)] {
        assert!((s.omega.eval(x, y) - s.omega.eval(y, x)).abs() <= tol);
    }
}

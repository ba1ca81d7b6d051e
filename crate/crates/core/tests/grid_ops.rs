mod common;

use common::{dense_operator, grid_h_v, rel};
use proptest::prelude::*;
use singular_heat::{Boundary, DiffusionOperator, Grid, GridField};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn integration_by_parts_is_exact((h, v) in grid_h_v(8..96, 0.5, 20.0)) {
        let op = DiffusionOperator::build(&h).unwrap();
        let form = op.dirichlet_form(&v);
        let lhs = op.apply(&v).inner(&v);
        prop_assert!((lhs + form).abs() <= 1e-12 * form.abs().max(1e-300), "{lhs} vs {form}");
    }

    #[test]
    fn operator_is_symmetric((h, v) in grid_h_v(8..96, 1.0, 10.0), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let mut w = common::random_data(*h.grid(), &mut rng);
        if h.grid().boundary() == Boundary::Periodic {
            w = w.add(&GridField::constant(*h.grid(), 0.3));
        }
        let op = DiffusionOperator::build(&h).unwrap();
        let a = op.apply(&v).inner(&w);
        let b = v.inner(&op.apply(&w));
        prop_assert!(rel(a, b) <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn operator_is_negative_semidefinite((h, mut v) in grid_h_v(8..96, 0.5, 20.0)) {
        v.enforce_boundary();
        let op = DiffusionOperator::build(&h).unwrap();
        let q = op.apply(&v).inner(&v);
        prop_assert!(q <= 1e-12 * op.dirichlet_form(&v), "{q}");
    }

    #[test]
    fn periodic_fluxes_telescope((h, v) in grid_h_v(8..96, 0.5, 20.0)) {
        prop_assume!(h.grid().boundary() == Boundary::Periodic);
        let op = DiffusionOperator::build(&h).unwrap();
        let av = op.apply(&v);
        let scale: f64 = av.values().iter().map(|x| x.abs()).sum::<f64>() * h.grid().dx();
        prop_assert!(av.integral().abs() <= 1e-13 * scale.max(1e-300));
    }

    #[test]
    fn apply_is_linear((h, v) in grid_h_v(8..64, 0.5, 5.0), s in -3.0..3.0f64) {
        let op = DiffusionOperator::build(&h).unwrap();
        let lhs = op.apply(&v.scale(s));
        let rhs = op.apply(&v).scale(s);
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-12 * rhs.max_abs().max(1.0));
        prop_assert_eq!(op.apply(&GridField::zeros(*h.grid())).max_abs(), 0.0);
    }

    #[test]
    fn apply_matches_dense_matrix((h, v) in grid_h_v(32..33, 0.5, 10.0)) {
        let op = DiffusionOperator::build(&h).unwrap();
        let a = dense_operator(h.grid(), op.faces());
        let dense = &a * nalgebra::DVector::from_column_slice(v.values());
        let mut expected = dense.as_slice().to_vec();
        let got = op.apply(&v);
        if h.grid().boundary() == Boundary::DirichletZero {
            // The dense matrix has zero rows at the ends and ignores end values.
            let m = expected.len();
            expected[0] = 0.0;
            expected[m - 1] = 0.0;
        }
        let scale = expected.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (g, e) in got.values().iter().zip(&expected) {
            prop_assert!((g - e).abs() <= 1e-13 * scale, "{g} vs {e}");
        }
    }
}

#[test]
fn face_values_are_arithmetic_means() {
    let grid = Grid::new(0.0, 1.0, 9, Boundary::DirichletZero).unwrap();
    let h = GridField::from_fn(grid, |x| 1.0 + x * x);
    let op = DiffusionOperator::build(&h).unwrap();
    for (i, f) in op.faces().iter().enumerate() {
        let mean = 0.5 * (h.values()[i] + h.values()[i + 1]);
        assert!((f - mean).abs() < 1e-15);
    }
}

#[test]
fn refined_grid_nests_the_coarse_nodes() {
    let coarse = Grid::new(-1.0, 1.0, 33, Boundary::DirichletZero).unwrap();
    let fine = coarse.refined(4).unwrap();
    assert_eq!(fine.n(), 129);
    for i in 0..coarse.n() {
        assert!((coarse.x(i) - fine.x(4 * i)).abs() < 1e-15);
    }
}

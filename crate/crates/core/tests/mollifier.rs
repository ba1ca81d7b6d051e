use proptest::prelude::*;
use singular_heat::mollifier::{evaluate_scaled, mollify_field, standard_bump};
use singular_heat::{Boundary, Grid, GridField, MollifierKernel};

/// Peak of the normalized bump, from a 10^6-point trapezoid normalization.
const BUMP_PEAK: f64 = 0.828568839869105;

fn bump() -> MollifierKernel {
    standard_bump()
}

#[test]
fn peak_matches_reference_normalization() {
    // Independent normalization: midpoint rule at 4e6 points.
    let n = 4_000_000;
    let h = 2.0 / n as f64;
    let raw = |x: f64| {
        if x.abs() < 1.0 {
            (-1.0 / (1.0 - x * x)).exp()
        } else {
            0.0
        }
    };
    let mass: f64 = (0..n)
        .map(|i| raw(-1.0 + (i as f64 + 0.5) * h))
        .sum::<f64>()
        * h;
    let peak = raw(0.0) / mass;
    assert!((peak - BUMP_PEAK).abs() < 1e-12, "{peak}");
    assert!((bump().eval(0.0) - BUMP_PEAK).abs() < 1e-12);
    assert_eq!(bump().eval(1.0), 0.0);
    assert_eq!(bump().eval(-1.0), 0.0);
}

#[test]
fn half_support_quadrature_gives_one_half() {
    // Direct Simpson quadrature of the bump over [0, 1].
    let n = 20_000;
    let h = 1.0 / n as f64;
    let k = bump();
    let mut s = k.eval(0.0) + k.eval(1.0);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * k.eval(i as f64 * h);
    }
    assert!((s * h / 3.0 - 0.5).abs() < 1e-10);

    let grid = Grid::new(-1.0, 1.0, 401, Boundary::DirichletZero).unwrap();
    let step = GridField::from_fn(grid, |x| {
        if x > 0.0 {
            1.0
        } else if x < 0.0 {
            0.0
        } else {
            0.5
        }
    });
    let kernel = bump().scaled(0.1).unwrap();
    let out = mollify_field(&step, &kernel).unwrap();
    assert!((out.values()[200] - 0.5).abs() < 1e-3);
}

fn second_derivative_l1(kernel: &MollifierKernel) -> f64 {
    let n = 200_000;
    let h = 2.0 / n as f64;
    let d = |x: f64| kernel.derivative(x);
    (0..n)
        .map(|i| {
            let x = -1.0 + (i as f64 + 0.5) * h;
            ((d(x + 1e-6) - d(x - 1e-6)) / 2e-6).abs()
        })
        .sum::<f64>()
        * h
}

#[test]
fn mollified_step_has_bounded_second_difference() {
    let psi2 = second_derivative_l1(&bump());
    let grid = Grid::new(-1.0, 1.0, 801, Boundary::DirichletZero).unwrap();
    let step = GridField::from_fn(grid, |x| if x > 0.1 { 2.0 } else { 0.0 });
    for eps in [0.2, 0.1, 0.05] {
        let out = mollify_field(&step, &bump().scaled(eps).unwrap()).unwrap();
        let sup = out
            .second_differences()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let bound = step.max_abs() * psi2 / (eps * eps);
        assert!(
            sup.is_finite() && sup <= bound,
            "eps {eps}: {sup} > {bound}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn discrete_weights_have_unit_mass(eps in 0.01..0.5f64, ratio in 4.0..120.0f64) {
        let dx = eps / ratio;
        let w = bump().scaled(eps).unwrap().discrete_weights(dx).unwrap();
        let mass: f64 = w.weights().iter().sum::<f64>();
        prop_assert!((mass - 1.0).abs() <= 1e-10);
        prop_assert!(w.weights().iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn scaled_kernel_is_rescaled_profile(eps in 0.05..1.0f64, x in -1.5..1.5f64) {
        let k = bump().scaled(eps).unwrap();
        let v = evaluate_scaled(&k, x);
        if x.abs() >= eps {
            prop_assert_eq!(v, 0.0);
        } else {
            prop_assert!((v - bump().eval(x / eps) / eps).abs() <= 1e-12 * v.abs().max(1.0));
        }
    }

    #[test]
    fn nonnegative_fields_stay_nonnegative(
        vals in prop::collection::vec(0.0..5.0f64, 129),
        eps in 0.07..0.4f64,
        periodic in any::<bool>(),
    ) {
        let b = if periodic { Boundary::Periodic } else { Boundary::DirichletZero };
        let grid = Grid::new(-1.0, 1.0, 129, b).unwrap();
        let f = GridField::new(grid, vals[..grid.storage_len()].to_vec()).unwrap();
        let out = mollify_field(&f, &bump().scaled(eps).unwrap()).unwrap();
        prop_assert!(out.min() >= 0.0);
        prop_assert!(out.max() <= f.max() * (1.0 + 1e-12));
    }

    #[test]
    fn interior_mass_is_preserved(vals in prop::collection::vec(-1.0..1.0f64, 60), eps in 0.07..0.3f64) {
        let grid = Grid::new(-1.0, 1.0, 129, Boundary::DirichletZero).unwrap();
        let mut v = vec![0.0; 129];
        v[34..94].copy_from_slice(&vals);
        let f = GridField::new(grid, v).unwrap();
        let out = mollify_field(&f, &bump().scaled(eps).unwrap()).unwrap();
        prop_assert!((out.integral() - f.integral()).abs() <= 1e-12);
    }

    #[test]
    fn mollification_commutes_with_differences(vals in prop::collection::vec(-1.0..1.0f64, 257), eps in 0.05..0.2f64) {
        let grid = Grid::new(-1.0, 1.0, 257, Boundary::DirichletZero).unwrap();
        let f = GridField::new(grid, vals).unwrap();
        let kernel = bump().scaled(eps).unwrap();
        let df = GridField::new(grid, f.centered_differences()).unwrap();
        let a = mollify_field(&df, &kernel).unwrap();
        let b = mollify_field(&f, &kernel).unwrap().centered_differences();
        let r = (eps / grid.dx()).ceil() as usize + 2;
        for (i, (x, y)) in a.values().iter().zip(&b).enumerate().take(257 - r).skip(r) {
            prop_assert!((x - y).abs() <= 1e-9, "node {i}");
        }
    }
}

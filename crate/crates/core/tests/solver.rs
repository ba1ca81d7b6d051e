mod common;

use common::{dense_operator, random_data, rng, smooth_conductivity};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use singular_heat::solver::{solve, step};
use singular_heat::{
    Boundary, DiffusionOperator, DiffusionOperator32, Grid, Grid32, GridField, GridField32, Scheme,
    SolveConfig,
};

fn dense_step(grid: &Grid, faces: &[f64], u: &[f64], dt: f64, scheme: Scheme) -> Vec<f64> {
    let a = dense_operator(grid, faces);
    let m = u.len();
    let id = DMatrix::<f64>::identity(m, m);
    let (lhs, rhs) = match scheme {
        Scheme::ImplicitEuler => (&id - &a * dt, DVector::from_column_slice(u)),
        Scheme::CrankNicolson => (
            &id - &a * (0.5 * dt),
            (&id + &a * (0.5 * dt)) * DVector::from_column_slice(u),
        ),
    };
    let mut out = lhs.lu().solve(&rhs).unwrap().as_slice().to_vec();
    if grid.boundary() == Boundary::DirichletZero {
        out[0] = 0.0;
        out[m - 1] = 0.0;
    }
    out
}

#[test]
fn one_step_matches_dense_solve() {
    let mut r = rng(11);
    for k in 0..20 {
        let b = if k % 2 == 0 {
            Boundary::DirichletZero
        } else {
            Boundary::Periodic
        };
        let grid = Grid::new(-1.0, 1.0, 32, b).unwrap();
        let h = smooth_conductivity(grid, &mut r);
        let u = random_data(grid, &mut r);
        let op = DiffusionOperator::build(&h).unwrap();
        for scheme in [Scheme::ImplicitEuler, Scheme::CrankNicolson] {
            let dt = 10f64.powf(-4.0 + 3.0 * (k as f64) / 19.0);
            let got = step(&u, &op, dt, scheme).unwrap();
            let want = dense_step(&grid, op.faces(), u.values(), dt, scheme);
            let scale = want.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (g, w) in got.values().iter().zip(&want) {
                assert!(
                    (g - w).abs() <= 1e-12 * scale,
                    "{scheme:?} problem {k}: {g} vs {w}"
                );
            }
        }
    }
}

#[test]
fn exact_separable_solution() {
    let grid = Grid::new(-1.0, 1.0, 512, Boundary::Periodic).unwrap();
    let u0 = GridField::from_fn(grid, |x| (std::f64::consts::PI * x).sin());
    let op = DiffusionOperator::build(&GridField::constant(grid, 1.0)).unwrap();
    let cfg = SolveConfig::uniform(0.1, 1e-4, Scheme::CrankNicolson, 10).unwrap();
    let traj = solve(&u0, &op, &cfg).unwrap();
    let decay = (-std::f64::consts::PI.powi(2) * 0.1).exp();
    let err = traj.last().sub(&u0.scale(decay)).l2_norm() / (u0.l2_norm() * decay);
    assert!(err <= 1e-4, "{err}");
}

#[test]
fn single_precision_tracks_double_precision() {
    let g64 = Grid::new(-1.0, 1.0, 65, Boundary::DirichletZero).unwrap();
    let g32 = Grid32::new(-1.0, 1.0, 65, Boundary::DirichletZero).unwrap();
    let mut u64v = GridField::from_fn(g64, |x| (-(x / 0.3).powi(2)).exp());
    u64v.enforce_boundary();
    let u32v = GridField32::new(g32, u64v.values().iter().map(|v| *v as f32).collect()).unwrap();
    let op64 = DiffusionOperator::build(&GridField::from_fn(g64, |x| 2.0 + x)).unwrap();
    let op32 = DiffusionOperator32::build(&GridField32::from_fn(g32, |x| 2.0 + x)).unwrap();
    let t64 = solve(
        &u64v,
        &op64,
        &SolveConfig::uniform(0.05, 1e-3, Scheme::ImplicitEuler, 5).unwrap(),
    )
    .unwrap();
    let t32 = solve(
        &u32v,
        &op32,
        &singular_heat::solver::SolveConfig::<f32>::uniform(0.05, 1e-3, Scheme::ImplicitEuler, 5)
            .unwrap(),
    )
    .unwrap();
    for (a, b) in t64.last().values().iter().zip(t32.last().values()) {
        assert!((a - f64::from(*b)).abs() < 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn implicit_euler_contracts_and_respects_bounds(
        seed in any::<u64>(),
        n in 16usize..200,
        dt_exp in -6.0..0.0f64,
        periodic in any::<bool>(),
    ) {
        let b = if periodic { Boundary::Periodic } else { Boundary::DirichletZero };
        let grid = Grid::new(-1.0, 1.0, n, b).unwrap();
        let mut r = rng(seed);
        let h = smooth_conductivity(grid, &mut r);
        let u0 = random_data(grid, &mut r);
        let op = DiffusionOperator::build(&h).unwrap();
        let dt = 10f64.powf(dt_exp);
        let cfg = SolveConfig::every_step((20.0 * dt).min(1.0), dt, Scheme::ImplicitEuler).unwrap();
        let traj = solve(&u0, &op, &cfg).unwrap();
        let norms = traj.l2_norms();
        let tol = 1e-12 * u0.l2_norm();
        for w in norms.windows(2) {
            prop_assert!(w[1] <= w[0] + tol);
        }
        let (lo, hi) = (u0.min().min(0.0) - 1e-10, u0.max().max(0.0) + 1e-10);
        for s in &traj.snapshots {
            prop_assert!(s.field.min() >= lo && s.field.max() <= hi);
        }
        if periodic {
            let m0 = u0.integral();
            let scale = u0.values().iter().map(|v| v.abs()).sum::<f64>() * grid.dx();
            prop_assert!((traj.last().integral() - m0).abs() <= 1e-10 * scale);
        }
    }
}

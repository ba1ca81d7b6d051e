#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use singular_heat::{Boundary, Grid, GridField};

pub fn boundary() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::DirichletZero), Just(Boundary::Periodic)]
}

/// `(grid, h, v)` with `h` in `[h_lo, h_hi]` and `v` in `[-1, 1]`.
pub fn grid_h_v(
    n: std::ops::Range<usize>,
    h_lo: f64,
    h_hi: f64,
) -> impl Strategy<Value = (GridField, GridField)> {
    (n, boundary(), -2.0..0.0f64, 0.5..3.0f64).prop_flat_map(move |(n, b, a, len)| {
        let grid = Grid::new(a, a + len, n, b).unwrap();
        let m = grid.storage_len();
        (
            prop::collection::vec(h_lo..h_hi, m),
            prop::collection::vec(-1.0..1.0f64, m),
        )
            .prop_map(move |(h, v)| {
                (
                    GridField::new(grid, h).unwrap(),
                    GridField::new(grid, v).unwrap(),
                )
            })
    })
}

/// A smooth random conductivity `>= 1`: a few random sine modes.
pub fn smooth_conductivity(grid: Grid, rng: &mut ChaCha8Rng) -> GridField {
    let modes: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(0.0..2.0),
                rng.gen_range(1.0..6.0),
                rng.gen_range(0.0..6.3),
            )
        })
        .collect();
    let base = 1.0 + modes.iter().map(|m| m.0).sum::<f64>();
    GridField::from_fn(grid, |x| {
        base + modes
            .iter()
            .map(|(amp, k, ph)| amp * (k * x + ph).sin())
            .sum::<f64>()
    })
}

/// Random data, zero at Dirichlet ends.
pub fn random_data(grid: Grid, rng: &mut ChaCha8Rng) -> GridField {
    let mut u = GridField::new(
        grid,
        (0..grid.storage_len())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect(),
    )
    .unwrap();
    u.enforce_boundary();
    u
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense matrix of the divergence-form operator built from face values,
/// independently of the library's stencil code.
pub fn dense_operator(grid: &Grid, faces: &[f64]) -> nalgebra::DMatrix<f64> {
    let m = grid.storage_len();
    let inv = 1.0 / (grid.dx() * grid.dx());
    let mut a = nalgebra::DMatrix::zeros(m, m);
    match grid.boundary() {
        Boundary::DirichletZero => {
            for i in 1..m - 1 {
                let (l, r) = (faces[i - 1], faces[i]);
                a[(i, i)] = -(l + r) * inv;
                if i > 1 {
                    a[(i, i - 1)] = l * inv;
                }
                if i < m - 2 {
                    a[(i, i + 1)] = r * inv;
                }
            }
        }
        Boundary::Periodic => {
            for i in 0..m {
                let im = (i + m - 1) % m;
                let ip = (i + 1) % m;
                let (l, r) = (faces[im], faces[i]);
                a[(i, i)] -= (l + r) * inv;
                a[(i, im)] += l * inv;
                a[(i, ip)] += r * inv;
            }
        }
    }
    a
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

//! Implicit time stepping of `u_t = d/dx (h du/dx) + f`.

use crate::error::{Error, Result};
use crate::grid::{Boundary, DiffusionOperator, Grid, GridField};
use crate::scalar::Scalar;
use crate::tridiag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scheme {
    /// `(I - dt A) u' = u`.
    #[default]
    ImplicitEuler,
    /// `(I - dt/2 A) u' = (I + dt/2 A) u`.
    CrankNicolson,
}

impl Scheme {
    fn implicit_weight<T: Scalar>(self) -> T {
        match self {
            Scheme::ImplicitEuler => T::one(),
            Scheme::CrankNicolson => T::lit(0.5),
        }
    }
}

/// Final time, step size, scheme and requested snapshot times.
///
/// The number of steps is `ceil(T / dt)` and the step actually taken is
/// `T / steps`, never larger than the requested `dt`. Snapshot times are
/// rounded to the nearest step; `t = 0` is always recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig<T> {
    final_time: T,
    dt: T,
    scheme: Scheme,
    snapshot_times: Vec<T>,
}

impl<T: Scalar> SolveConfig<T> {
    pub fn new(final_time: T, dt: T, scheme: Scheme, snapshot_times: Vec<T>) -> Result<Self> {
        if !(final_time > T::zero()) || !final_time.is_finite() {
            return Err(Error::InvalidParameter {
                name: "T",
                value: final_time.as_f64(),
                reason: "final time must be positive",
            });
        }
        if !(dt > T::zero()) || dt > final_time {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt.as_f64(),
                reason: "time step must satisfy 0 < dt <= T",
            });
        }
        let tol = final_time * T::lit(1e-12);
        for w in snapshot_times.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidParameter {
                    name: "snapshot_times",
                    value: w[1].as_f64(),
                    reason: "snapshot times must be sorted",
                });
            }
        }
        if let Some(t) = snapshot_times
            .iter()
            .find(|t| **t < -tol || **t > final_time + tol)
        {
            return Err(Error::InvalidParameter {
                name: "snapshot_times",
                value: t.as_f64(),
                reason: "snapshot times must lie in [0, T]",
            });
        }
        Ok(Self {
            final_time,
            dt,
            scheme,
            snapshot_times,
        })
    }

    /// `count + 1` equally spaced snapshots `k T / count`, `k = 0..=count`.
    pub fn uniform(final_time: T, dt: T, scheme: Scheme, count: usize) -> Result<Self> {
        let count = count.max(1);
        let times = (0..=count)
            .map(|k| final_time * T::from_count(k) / T::from_count(count))
            .collect();
        Self::new(final_time, dt, scheme, times)
    }

    /// A snapshot after every time step.
    pub fn every_step(final_time: T, dt: T, scheme: Scheme) -> Result<Self> {
        let probe = Self::new(final_time, dt, scheme, Vec::new())?;
        let steps = probe.steps();
        Self::uniform(final_time, dt, scheme, steps)
    }

    #[inline]
    pub fn final_time(&self) -> T {
        self.final_time
    }

    /// Requested step size.
    #[inline]
    pub fn dt(&self) -> T {
        self.dt
    }

    #[inline]
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    #[inline]
    pub fn snapshot_times(&self) -> &[T] {
        &self.snapshot_times
    }

    pub fn steps(&self) -> usize {
        let ratio = self.final_time / self.dt;
        let steps = (ratio - T::lit(1e-9)).ceil().to_usize().unwrap_or(1);
        steps.max(1)
    }

    /// Step size actually used, `T / steps`.
    pub fn effective_dt(&self) -> T {
        self.final_time / T::from_count(self.steps())
    }

    /// Sorted, deduplicated step indices at which snapshots are recorded.
    pub fn snapshot_steps(&self) -> Vec<usize> {
        let dt = self.effective_dt();
        let steps = self.steps();
        let mut idx: Vec<usize> = std::iter::once(0)
            .chain(
                self.snapshot_times
                    .iter()
                    .map(|&t| (t / dt).round().to_usize().unwrap_or(0).min(steps)),
            )
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub step: usize,
    pub time: T,
    pub field: GridField<T>,
}

/// Snapshots of one solve. The first snapshot is the initial data at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub config: SolveConfig<T>,
    pub grid: Grid<T>,
    pub snapshots: Vec<Snapshot<T>>,
    /// Regularization parameter; `None` for unregularized reference solves.
    pub epsilon: Option<T>,
}

impl<T: Scalar> Trajectory<T> {
    /// Wraps externally produced snapshots, e.g. a sampled exact solution.
    pub fn from_snapshots(
        config: SolveConfig<T>,
        grid: Grid<T>,
        snapshots: Vec<Snapshot<T>>,
    ) -> Self {
        Self {
            config,
            grid,
            snapshots,
            epsilon: None,
        }
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn times(&self) -> Vec<T> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    pub fn initial(&self) -> &GridField<T> {
        &self.snapshots[0].field
    }

    pub fn last(&self) -> &GridField<T> {
        &self.snapshots[self.snapshots.len() - 1].field
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn l2_norms(&self) -> Vec<T> {
        self.snapshots.iter().map(|s| s.field.l2_norm()).collect()
    }

    /// Maximum of `f` over the snapshots, with the index where it occurs.
    pub fn snapshot_sup(&self, f: impl Fn(&GridField<T>) -> T) -> (T, usize) {
        self.snapshots
            .iter()
            .enumerate()
            .map(|(i, s)| (f(&s.field), i))
            .fold((T::neg_infinity(), 0), |best, cur| {
                if cur.0 > best.0 {
                    cur
                } else {
                    best
                }
            })
    }

    /// Field at a given step index, if it was recorded.
    pub fn at_step(&self, step: usize) -> Option<&GridField<T>> {
        self.snapshots
            .binary_search_by_key(&step, |s| s.step)
            .ok()
            .map(|i| &self.snapshots[i].field)
    }
}

/// Pre-assembled implicit system for a fixed operator, step and scheme.
#[derive(Debug, Clone)]
pub struct Stepper<'a, T> {
    op: &'a DiffusionOperator<T>,
    dt: T,
    scheme: Scheme,
    sub: Vec<T>,
    diag: Vec<T>,
    sup: Vec<T>,
}

impl<'a, T: Scalar> Stepper<'a, T> {
    pub fn new(op: &'a DiffusionOperator<T>, dt: T, scheme: Scheme) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt.as_f64(),
                reason: "time step must be positive",
            });
        }
        let (sub, diag, sup) = op.shifted_bands(scheme.implicit_weight::<T>() * dt);
        Ok(Self {
            op,
            dt,
            scheme,
            sub,
            diag,
            sup,
        })
    }

    /// One step from `u`. `forcing` holds `(f(t_m), f(t_{m+1}))` when present.
    pub fn advance(&self, u: &[T], forcing: Option<(&[T], &[T])>) -> Result<Vec<T>> {
        let grid = self.op.grid();
        let m = u.len();
        let mut rhs: Vec<T> = match self.scheme {
            Scheme::ImplicitEuler => u.to_vec(),
            Scheme::CrankNicolson => {
                let au = self.op.apply_slice(u);
                let half = self.dt * T::lit(0.5);
                u.iter().zip(&au).map(|(&a, &b)| a + half * b).collect()
            }
        };
        if let Some((f_now, f_next)) = forcing {
            match self.scheme {
                Scheme::ImplicitEuler => {
                    for (r, &f) in rhs.iter_mut().zip(f_next) {
                        *r = *r + self.dt * f;
                    }
                }
                Scheme::CrankNicolson => {
                    let half = self.dt * T::lit(0.5);
                    for ((r, &a), &b) in rhs.iter_mut().zip(f_now).zip(f_next) {
                        *r = *r + half * (a + b);
                    }
                }
            }
        }
        match grid.boundary() {
            Boundary::DirichletZero => {
                let mut interior = rhs[1..m - 1].to_vec();
                tridiag::solve(&self.sub, &self.diag, &self.sup, &mut interior)?;
                let mut out = Vec::with_capacity(m);
                out.push(T::zero());
                out.extend(interior);
                out.push(T::zero());
                Ok(out)
            }
            Boundary::Periodic => {
                tridiag::solve_cyclic(&self.sub, &self.diag, &self.sup, &mut rhs)?;
                Ok(rhs)
            }
        }
    }
}

/// One step of `scheme` with step `dt`.
pub fn step<T: Scalar>(
    u: &GridField<T>,
    op: &DiffusionOperator<T>,
    dt: T,
    scheme: Scheme,
) -> Result<GridField<T>> {
    if u.grid() != op.grid() {
        return Err(Error::GridMismatch(
            "field and operator live on different grids",
        ));
    }
    let stepper = Stepper::new(op, dt, scheme)?;
    Ok(GridField::from_raw(
        *u.grid(),
        stepper.advance(u.values(), None)?,
    ))
}

/// Integrates the homogeneous problem from `u0` over `[0, T]`.
pub fn solve<T: Scalar>(
    u0: &GridField<T>,
    op: &DiffusionOperator<T>,
    config: &SolveConfig<T>,
) -> Result<Trajectory<T>> {
    integrate(u0, op, config, None::<fn(usize, T) -> GridField<T>>)
}

/// Integrates `u_t = A u + f(t)`. `forcing(m, t_m)` supplies `f` at step `m`;
/// implicit Euler uses `f(t_{m+1})`, Crank-Nicolson the average of both ends.
pub fn solve_with_forcing<T: Scalar, F>(
    u0: &GridField<T>,
    op: &DiffusionOperator<T>,
    config: &SolveConfig<T>,
    forcing: F,
) -> Result<Trajectory<T>>
where
    F: FnMut(usize, T) -> GridField<T>,
{
    integrate(u0, op, config, Some(forcing))
}

fn integrate<T: Scalar, F>(
    u0: &GridField<T>,
    op: &DiffusionOperator<T>,
    config: &SolveConfig<T>,
    mut forcing: Option<F>,
) -> Result<Trajectory<T>>
where
    F: FnMut(usize, T) -> GridField<T>,
{
    if u0.grid() != op.grid() {
        return Err(Error::GridMismatch(
            "initial data and operator live on different grids",
        ));
    }
    let grid = *u0.grid();
    let dt = config.effective_dt();
    let steps = config.steps();
    let stepper = Stepper::new(op, dt, config.scheme())?;
    let wanted = config.snapshot_steps();
    let mut next_wanted = 1;

    let mut snapshots = vec![Snapshot {
        step: 0,
        time: T::zero(),
        field: u0.clone(),
    }];
    let mut u = u0.values().to_vec();
    let mut f_now = forcing.as_mut().map(|f| f(0, T::zero()).into_values());
    for m in 0..steps {
        let t_next = T::from_count(m + 1) * dt;
        u = match forcing.as_mut() {
            Some(f) => {
                let f_next = f(m + 1, t_next).into_values();
                let out = stepper.advance(&u, Some((f_now.as_deref().unwrap_or(&[]), &f_next)))?;
                f_now = Some(f_next);
                out
            }
            None => stepper.advance(&u, None)?,
        };
        if next_wanted < wanted.len() && wanted[next_wanted] == m + 1 {
            if let Some(i) = u.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(i));
            }
            snapshots.push(Snapshot {
                step: m + 1,
                time: t_next,
                field: GridField::from_raw(grid, u.clone()),
            });
            next_wanted += 1;
        }
    }
    Ok(Trajectory {
        config: config.clone(),
        grid,
        snapshots,
        epsilon: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn periodic(n: usize) -> Grid<f64> {
        Grid::<f64>::new(-1.0, 1.0, n, Boundary::Periodic).unwrap()
    }

    fn dirichlet(n: usize) -> Grid<f64> {
        Grid::<f64>::new(-1.0, 1.0, n, Boundary::DirichletZero).unwrap()
    }

    #[test]
    fn config_validation_and_rounding() {
        assert!(SolveConfig::new(0.0, 0.1, Scheme::ImplicitEuler, vec![]).is_err());
        assert!(SolveConfig::new(1.0, 2.0, Scheme::ImplicitEuler, vec![]).is_err());
        assert!(SolveConfig::new(1.0, 0.1, Scheme::ImplicitEuler, vec![0.5, 0.2]).is_err());
        assert!(SolveConfig::new(1.0, 0.1, Scheme::ImplicitEuler, vec![1.5]).is_err());
        let c = SolveConfig::new(1.0, 0.1, Scheme::ImplicitEuler, vec![0.34, 0.36, 1.0]).unwrap();
        assert_eq!(c.steps(), 10);
        assert_eq!(c.snapshot_steps(), vec![0, 3, 4, 10]);
        let odd = SolveConfig::<f64>::new(1.0, 0.3, Scheme::ImplicitEuler, vec![]).unwrap();
        assert_eq!(odd.steps(), 4);
        assert!((odd.effective_dt() - 0.25).abs() < 1e-15);
        let u = SolveConfig::uniform(0.1, 1e-3, Scheme::ImplicitEuler, 50).unwrap();
        assert_eq!(u.snapshot_steps().len(), 51);
    }

    #[test]
    fn constant_is_steady_on_periodic_grid() {
        let g = periodic(33);
        let h = GridField::from_fn(g, |x| 1.5 + (PI * x).cos());
        let op = DiffusionOperator::build(&h).unwrap();
        let u = GridField::constant(g, 0.75);
        for scheme in [Scheme::ImplicitEuler, Scheme::CrankNicolson] {
            let next = step(&u, &op, 0.01, scheme).unwrap();
            for v in next.values() {
                assert!((v - 0.75).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn implicit_euler_damps_fourier_mode_by_discrete_symbol() {
        let g = periodic(64);
        let c = 1.3;
        let dt = 0.01;
        let k = 2.0 * PI * 2.0 / g.length();
        let op = DiffusionOperator::build(&GridField::constant(g, c)).unwrap();
        let u = GridField::from_fn(g, |x| (k * x).sin());
        let next = step(&u, &op, dt, Scheme::ImplicitEuler).unwrap();
        let dx = g.dx();
        let symbol = 2.0 * (1.0 - (k * dx).cos()) / (dx * dx);
        let factor = 1.0 / (1.0 + dt * c * symbol);
        for (a, b) in next.values().iter().zip(u.values()) {
            assert!((a - factor * b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = dirichlet(40);
        let op = DiffusionOperator::build(&GridField::constant(g, 2.0)).unwrap();
        let cfg = SolveConfig::uniform(0.1, 0.01, Scheme::ImplicitEuler, 5).unwrap();
        let traj = solve(&GridField::zeros(g), &op, &cfg).unwrap();
        assert_eq!(traj.len(), 6);
        assert!(traj.snapshots.iter().all(|s| s.field.max_abs() == 0.0));
    }

    #[test]
    fn first_snapshot_is_initial_data_bit_for_bit() {
        let g = dirichlet(40);
        let op = DiffusionOperator::build(&GridField::constant(g, 1.0)).unwrap();
        let u0 = GridField::from_fn(g, |x| (1.0 - x * x) * (3.0 * x).sin());
        let cfg = SolveConfig::uniform(0.05, 0.01, Scheme::CrankNicolson, 5).unwrap();
        let traj = solve(&u0, &op, &cfg).unwrap();
        assert_eq!(traj.snapshots[0].field, u0);
        assert_eq!(traj.snapshots[0].time, 0.0);
        assert!((traj.snapshots.last().unwrap().time - 0.05).abs() < 1e-15);
    }

    fn fourier_error(n: usize, dt: f64, scheme: Scheme) -> f64 {
        let g = periodic(n);
        let k = PI;
        let t = 0.1;
        let op = DiffusionOperator::build(&GridField::constant(g, 1.0)).unwrap();
        let u0 = GridField::from_fn(g, |x| (k * x).sin());
        let cfg = SolveConfig::uniform(t, dt, scheme, 1).unwrap();
        let traj = solve(&u0, &op, &cfg).unwrap();
        let exact = u0.scale((-k * k * t).exp());
        traj.last().sub(&exact).l2_norm() / exact.l2_norm()
    }

    #[test]
    fn crank_nicolson_fourier_mode_accuracy() {
        let e = fourier_error(512, 1e-4, Scheme::CrankNicolson);
        assert!(e <= 1e-4, "{e}");
    }

    #[test]
    fn two_grid_convergence_rates() {
        let cn = fourier_error(129, 4e-3, Scheme::CrankNicolson)
            / fourier_error(257, 2e-3, Scheme::CrankNicolson);
        assert!(cn >= 3.5, "CN ratio {cn}");
        let ie = fourier_error(257, 2e-2, Scheme::ImplicitEuler)
            / fourier_error(513, 1e-2, Scheme::ImplicitEuler);
        assert!(ie >= 1.8, "IE ratio {ie}");
    }

    #[test]
    fn periodic_mass_is_conserved() {
        let g = periodic(100);
        let h = GridField::from_fn(g, |x| {
            1.0 + 0.5 * (PI * x).sin().powi(2) + 3.0 * (-(x * 10.0).powi(2)).exp()
        });
        let op = DiffusionOperator::build(&h).unwrap();
        let u0 = GridField::from_fn(g, |x| (-(x / 0.2).powi(2)).exp() + 0.3);
        let cfg = SolveConfig::uniform(0.5, 0.01, Scheme::ImplicitEuler, 10).unwrap();
        let traj = solve(&u0, &op, &cfg).unwrap();
        let m0 = u0.integral();
        for s in &traj.snapshots {
            assert!(((s.field.integral() - m0) / m0).abs() < 1e-10);
        }
    }

    #[test]
    fn implicit_euler_respects_maximum_principle() {
        let g = dirichlet(80);
        let h = GridField::from_fn(g, |x| 1.0 + 20.0 * (-(x / 0.05).powi(2)).exp());
        let op = DiffusionOperator::build(&h).unwrap();
        let mut u0 = GridField::from_fn(g, |x| {
            if x.abs() < 0.3 {
                1.0
            } else {
                -0.4 * (x * 7.0).sin()
            }
        });
        u0.enforce_boundary();
        let lo = u0.min().min(0.0) - 1e-10;
        let hi = u0.max().max(0.0) + 1e-10;
        let cfg = SolveConfig::uniform(0.2, 0.05, Scheme::ImplicitEuler, 4).unwrap();
        let traj = solve(&u0, &op, &cfg).unwrap();
        for s in &traj.snapshots {
            assert!(s.field.min() >= lo && s.field.max() <= hi);
        }
    }

    #[test]
    fn zero_forcing_matches_homogeneous_solve() {
        let g = dirichlet(50);
        let op = DiffusionOperator::build(&GridField::from_fn(g, |x| 2.0 + x)).unwrap();
        let u0 = GridField::from_fn(g, |x| (1.0 - x * x).powi(2));
        for scheme in [Scheme::ImplicitEuler, Scheme::CrankNicolson] {
            let cfg = SolveConfig::uniform(0.1, 0.01, scheme, 10).unwrap();
            let a = solve(&u0, &op, &cfg).unwrap();
            let b = solve_with_forcing(&u0, &op, &cfg, |_, _| GridField::zeros(g)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn vanishing_operator_integrates_forcing_exactly() {
        let g = periodic(32);
        let op = DiffusionOperator::from_faces_unchecked(g, vec![0.0; g.face_count()]);
        let u0 = GridField::from_fn(g, |x| x.cos());
        let f = GridField::from_fn(g, |x| 0.5 + x * x);
        let cfg = SolveConfig::uniform(0.3, 0.01, Scheme::ImplicitEuler, 1).unwrap();
        let traj = solve_with_forcing(&u0, &op, &cfg, |_, _| f.clone()).unwrap();
        let expected = u0.add(&f.scale(0.3));
        for (a, b) in traj.last().values().iter().zip(expected.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn forced_solve_matches_duhamel_superposition() {
        // u(t) = e^{tA} u0 + int_0^t cos(3s) e^{(t-s)A} g ds, kernel solve from g.
        let g = dirichlet(64);
        let op = DiffusionOperator::build(&GridField::from_fn(g, |x| {
            1.0 + 0.5 * (2.0 * x).sin().powi(2)
        }))
        .unwrap();
        let mut u0 = GridField::from_fn(g, |x| (-(x / 0.3).powi(2)).exp());
        u0.enforce_boundary();
        let mut shape = GridField::from_fn(g, |x| (1.0 - x * x) * (PI * x).cos());
        shape.enforce_boundary();
        let cfg = SolveConfig::every_step(0.2, 2e-4, Scheme::CrankNicolson).unwrap();
        let dt = cfg.effective_dt();
        let forced =
            solve_with_forcing(&u0, &op, &cfg, |_, t| shape.scale((3.0 * t).cos())).unwrap();
        let homogeneous = solve(&u0, &op, &cfg).unwrap();
        let kernel = solve(&shape, &op, &cfg).unwrap();
        let steps = cfg.steps();
        let mut integral = GridField::zeros(g);
        for j in 0..=steps {
            let w = if j == 0 || j == steps { 0.5 } else { 1.0 };
            let s = j as f64 * dt;
            let term = kernel.snapshots[steps - j]
                .field
                .scale(w * dt * (3.0 * s).cos());
            integral = integral.add(&term);
        }
        let rebuilt = homogeneous.last().add(&integral);
        let rel = rebuilt.sub(forced.last()).l2_norm() / forced.last().l2_norm();
        assert!(rel < 0.02, "{rel}");
    }

    #[test]
    fn single_precision_solve_runs() {
        let g = Grid::<f32>::new(0.0, 1.0, 32, Boundary::DirichletZero).unwrap();
        let op = DiffusionOperator::build(&GridField::constant(g, 1.0f32)).unwrap();
        let mut u0 = GridField::from_fn(g, |x| (std::f32::consts::PI * x).sin());
        u0.enforce_boundary();
        let cfg = SolveConfig::uniform(0.1f32, 0.01, Scheme::ImplicitEuler, 2).unwrap();
        let traj = solve(&u0, &op, &cfg).unwrap();
        let norms = traj.l2_norms();
        assert!(norms[2] < norms[0]);
    }
}

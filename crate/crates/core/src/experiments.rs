//! Drivers for the three `eps`-sweep experiments: existence (moderate growth
//! of the solution net), uniqueness (stability under negligible
//! perturbations, including the Duhamel reconstruction of the difference) and
//! consistency (convergence to the classical solution for regular `h`).
//!
//! All drivers run in `f64`. Per-`eps` work runs on the rayon pool and is
//! collected in ladder order, so reports do not depend on the thread count.

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::coefficients::{sobolev_norms, validate_ladder, w1inf_norm};
use crate::energy::energy_report;
use crate::error::{Error, Result};
use crate::fit::log_log_slope;
use crate::grid::{Boundary, FaceAverage};
use crate::mollifier::{mollify_field, mollify_fn, standard_bump};
use crate::solver::{solve, solve_with_forcing};
use crate::{
    DiffusionOperator, EnergyReport, Grid, GridField, SingularCoefficient, SolveConfig, Trajectory,
};

/// Slack added to exponent and rate thresholds.
pub const EXPONENT_SLACK: f64 = 0.25;

/// Initial data `u0`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// `amplitude * exp(-((x - center) / width)^2)`.
    Gaussian {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    /// `amplitude` on `|x - center| < half_width`, zero outside, half on the
    /// two edges. Its mollifications have `H^2` norms growing like
    /// `eps^{-3/2}`.
    MollifiedStep {
        center: f64,
        half_width: f64,
        amplitude: f64,
    },
    /// `amplitude * sin(mode * pi * (x - a) / L)` on Dirichlet grids and
    /// `amplitude * sin(2 * pi * mode * x / L)` on periodic grids.
    FourierMode { mode: u32, amplitude: f64 },
    /// Nodal values on the problem grid (storage length).
    Samples(Vec<f64>),
}

impl InitialData {
    fn closed_form(&self, grid: &Grid) -> Option<Box<dyn Fn(f64) -> f64 + Sync + '_>> {
        match *self {
            InitialData::Gaussian {
                center,
                width,
                amplitude,
            } => Some(Box::new(move |x| {
                let r = (x - center) / width;
                amplitude * (-r * r).exp()
            })),
            InitialData::MollifiedStep {
                center,
                half_width,
                amplitude,
            } => Some(Box::new(move |x| {
                let d = (x - center).abs();
                if d < half_width {
                    amplitude
                } else if d == half_width {
                    0.5 * amplitude
                } else {
                    0.0
                }
            })),
            InitialData::FourierMode { mode, amplitude } => {
                let (a, l) = (grid.a(), grid.length());
                let k = f64::from(mode) * std::f64::consts::PI / l;
                Some(match grid.boundary() {
                    Boundary::DirichletZero => Box::new(move |x| amplitude * (k * (x - a)).sin()),
                    Boundary::Periodic => Box::new(move |x| amplitude * (2.0 * k * x).sin()),
                })
            }
            InitialData::Samples(_) => None,
        }
    }

    /// Unregularized data on `grid`.
    pub fn sample(&self, grid: &Grid) -> Result<GridField> {
        let mut field = match (self, self.closed_form(grid)) {
            (InitialData::Samples(v), _) => GridField::new(*grid, v.clone())?,
            (_, Some(g)) => GridField::from_fn(*grid, g),
            (_, None) => unreachable!("closed form exists for every analytic variant"),
        };
        field.enforce_boundary();
        Ok(field)
    }

    /// `u0 * psi_eps` on `grid`. Closed forms are convolved off-grid; sampled
    /// data uses the boundary continuation of [`mollify_field`].
    pub fn regularize(&self, epsilon: f64, grid: &Grid) -> Result<GridField> {
        let kernel = standard_bump::<f64>().scaled(epsilon)?;
        let mut field = match self.closed_form(grid) {
            Some(g) => mollify_fn(grid, &kernel, g)?,
            None => mollify_field(&self.sample(grid)?, &kernel)?,
        };
        field.enforce_boundary();
        Ok(field)
    }
}

/// A regularized Cauchy problem family: grid, conductivity, data and time
/// integration settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub grid: Grid,
    pub coefficient: SingularCoefficient,
    pub initial_data: InitialData,
    pub solve: SolveConfig,
    pub face_average: FaceAverage,
    /// Mollify `u0` along with `h`; when false every member starts from `u0`.
    pub regularize_data: bool,
}

impl Problem {
    pub fn new(
        grid: Grid,
        coefficient: SingularCoefficient,
        initial_data: InitialData,
        solve: SolveConfig,
    ) -> Self {
        Self {
            grid,
            coefficient,
            initial_data,
            solve,
            face_average: FaceAverage::Arithmetic,
            regularize_data: true,
        }
    }

    pub fn coefficient_at(&self, epsilon: f64) -> Result<GridField> {
        self.coefficient.regularize(epsilon, &self.grid)
    }

    pub fn data_at(&self, epsilon: f64) -> Result<GridField> {
        if self.regularize_data {
            self.initial_data.regularize(epsilon, &self.grid)
        } else {
            self.initial_data.sample(&self.grid)
        }
    }

    fn run(&self, h: &GridField, u0: &GridField) -> Result<Trajectory> {
        let op = DiffusionOperator::build_with(h, self.face_average)?;
        solve(u0, &op, &self.solve)
    }

    /// `h_eps`, `u0_eps` and the trajectory of the member `eps`.
    pub fn solve_member(&self, epsilon: f64) -> Result<(GridField, GridField, Trajectory)> {
        let h = self.coefficient_at(epsilon)?;
        let u0 = self.data_at(epsilon)?;
        let traj = self.run(&h, &u0)?.with_epsilon(epsilon);
        Ok((h, u0, traj))
    }
}

/// One named pass/fail outcome of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// Hex SHA-256 of the `Debug` rendering of `value`.
pub fn inputs_digest(value: &impl std::fmt::Debug) -> String {
    hex::encode(Sha256::digest(format!("{value:?}").as_bytes()))
}

/// Ladder entries used in slope fits: the largest `eps` is dropped once the
/// ladder has five or more points.
pub fn fit_window(len: usize) -> std::ops::Range<usize> {
    if len >= 5 {
        1..len
    } else {
        0..len
    }
}

/// Growth exponent `N` of `values ~ eps^{-N}` over the fit window.
fn growth_exponent(epsilons: &[f64], values: &[f64]) -> Result<f64> {
    let w = fit_window(epsilons.len());
    Ok(-log_log_slope(&epsilons[w.clone()], &values[w])?)
}

/// Log-log decay rate of errors, with exact zeros floored at the smallest
/// positive normal number.
fn decay_rate(epsilons: &[f64], errors: &[f64]) -> Result<f64> {
    let floored: Vec<f64> = errors.iter().map(|e| e.max(f64::MIN_POSITIVE)).collect();
    log_log_slope(epsilons, &floored)
}

/// Per-`eps` record of an existence sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub epsilon: f64,
    /// `max_t ||u_eps(t)||_{H^2}` over the snapshots.
    pub h2_sup: f64,
    /// Snapshot index where the supremum is attained.
    pub h2_sup_index: usize,
    pub coeff_w1inf: f64,
    pub coeff_h2: f64,
    pub coeff_min: f64,
    pub data_h2: f64,
    pub energy: EnergyReport,
    pub trajectory: Trajectory,
}

/// Outcome of [`existence_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub epsilons: Vec<f64>,
    pub per_eps: Vec<SweepEntry>,
    /// Fitted `N` in `sup_t ||u_eps||_{H^2} ~ eps^{-N}`.
    pub fitted_solution_exponent: f64,
    /// Fitted `N0` of `||h_eps||_{W^{1,inf}}`.
    pub fitted_coefficient_exponent: f64,
    /// Fitted `N1` of `||u0_eps||_{H^2}`.
    pub fitted_data_exponent: f64,
    /// Ladder entries entering the fits.
    pub fit_epsilons: Vec<f64>,
    pub inputs_digest: String,
    pub checks: Vec<Check>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Solves every ladder member, fits the solution, coefficient and data
/// exponents and checks `N <= N0 + N1 + 0.25` together with the energy
/// estimates of every member.
pub fn existence_sweep(problem: &Problem, ladder: &[f64]) -> Result<SweepReport> {
    validate_ladder(ladder, 4)?;
    problem
        .coefficient
        .check_placement(&problem.grid, ladder[0])?;
    let per_eps: Vec<SweepEntry> = ladder
        .par_iter()
        .map(|&eps| {
            let (h, u0, traj) = problem.solve_member(eps)?;
            let (h2_sup, h2_sup_index) = traj.snapshot_sup(|u| sobolev_norms(u).h2);
            Ok(SweepEntry {
                epsilon: eps,
                h2_sup,
                h2_sup_index,
                coeff_w1inf: w1inf_norm(&h),
                coeff_h2: sobolev_norms(&h).h2,
                coeff_min: h.min(),
                data_h2: sobolev_norms(&u0).h2,
                energy: energy_report(&traj, &h)?,
                trajectory: traj,
            })
        })
        .collect::<Result<_>>()?;

    let pick = |f: fn(&SweepEntry) -> f64| per_eps.iter().map(f).collect::<Vec<_>>();
    let n = growth_exponent(ladder, &pick(|e| e.h2_sup))?;
    let n0 = growth_exponent(ladder, &pick(|e| e.coeff_w1inf))?;
    let n1 = growth_exponent(ladder, &pick(|e| e.data_h2))?;

    let mut checks = vec![Check::new(
        "exponent_coherence",
        n <= n0 + n1 + EXPONENT_SLACK,
        format!(
            "N = {n:.4} <= N0 + N1 + {EXPONENT_SLACK} = {:.4}",
            n0 + n1 + EXPONENT_SLACK
        ),
    )];
    let floor = problem.coefficient.floor();
    let worst_min = pick(|e| e.coeff_min)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::new(
        "uniform_positivity",
        worst_min >= floor * (1.0 - 1e-12),
        format!("min h_eps = {worst_min:.6e} >= h0 = {floor:.6e}"),
    ));
    for (name, ok) in [
        (
            "energy_monotone",
            per_eps.iter().all(|e| e.energy.energy_monotone()),
        ),
        (
            "weighted_h1_monotone",
            per_eps.iter().all(|e| e.energy.weighted_h1_monotone),
        ),
    ] {
        checks.push(Check::new(name, ok, "all ladder members".into()));
    }
    for (k, check) in per_eps[0].energy.bound_checks.iter().enumerate() {
        let worst = per_eps
            .iter()
            .map(|e| &e.energy.bound_checks[k])
            .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
            .unwrap_or(check);
        let ok = per_eps.iter().all(|e| e.energy.bound_checks[k].passed());
        checks.push(Check::new(
            check.name,
            ok,
            format!(
                "worst ratio {:.4} (envelope {})",
                worst.ratio, worst.envelope
            ),
        ));
    }

    Ok(SweepReport {
        epsilons: ladder.to_vec(),
        fit_epsilons: ladder[fit_window(ladder.len())].to_vec(),
        fitted_solution_exponent: n,
        fitted_coefficient_exponent: n0,
        fitted_data_exponent: n1,
        inputs_digest: inputs_digest(&(problem, ladder)),
        per_eps,
        checks,
    })
}

/// Size law of a perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationKind {
    /// Size `magnitude * eps^order`.
    PowerLaw { order: f64 },
    /// Size `magnitude * exp(-1/eps)`.
    Superpolynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationTarget {
    Coefficient,
    Data,
    Both,
}

impl PerturbationTarget {
    fn coefficient(self) -> bool {
        matches!(self, Self::Coefficient | Self::Both)
    }

    fn data(self) -> bool {
        matches!(self, Self::Data | Self::Both)
    }
}

/// An additive bump `s(eps) * b((x - center) / width)` with `b` the
/// unnormalized bump profile, scaled so that its discrete `W^{1,inf}` norm is
/// exactly `s(eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    pub target: PerturbationTarget,
    pub magnitude: f64,
    pub center: f64,
    pub width: f64,
}

impl PerturbationSpec {
    pub fn size(&self, epsilon: f64) -> f64 {
        match self.kind {
            PerturbationKind::PowerLaw { order } => self.magnitude * epsilon.powf(order),
            PerturbationKind::Superpolynomial => self.magnitude * (-1.0 / epsilon).exp(),
        }
    }

    /// Bump of `W^{1,inf}` size `size(eps)` on `grid`.
    pub fn field(&self, epsilon: f64, grid: &Grid) -> Result<GridField> {
        let (c, w) = (self.center, self.width);
        let shape = GridField::from_fn(*grid, |x| {
            let r = (x - c) / w;
            if r.abs() < 1.0 {
                (-1.0 / (1.0 - r * r)).exp()
            } else {
                0.0
            }
        });
        let norm = w1inf_norm(&shape);
        if norm == 0.0 {
            return Err(Error::InvalidParameter {
                name: "perturbation.width",
                value: w,
                reason: "bump does not cover any grid node",
            });
        }
        Ok(shape.scale(self.size(epsilon) / norm))
    }

    fn validate(&self, problem: &Problem, eps_max: f64) -> Result<()> {
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::InvalidParameter {
                name: "perturbation.width",
                value: self.width,
                reason: "must be positive",
            });
        }
        if !self.magnitude.is_finite() {
            return Err(Error::InvalidParameter {
                name: "perturbation.magnitude",
                value: self.magnitude,
                reason: "must be finite",
            });
        }
        let g = &problem.grid;
        if g.boundary() == Boundary::DirichletZero
            && (self.center - self.width < g.a() || self.center + self.width > g.b())
        {
            return Err(Error::InvalidParameter {
                name: "perturbation.center",
                value: self.center,
                reason: "bump support must lie inside the domain",
            });
        }
        let reach = self.width + eps_max;
        if problem
            .coefficient
            .atoms()
            .iter()
            .any(|a| (a.location() - self.center).abs() < reach)
        {
            return Err(Error::InvalidParameter {
                name: "perturbation.center",
                value: self.center,
                reason: "bump overlaps the regularized support of a singular atom",
            });
        }
        Ok(())
    }

    /// `(h~_eps, u~0_eps)` from the unperturbed pair.
    fn apply(
        &self,
        epsilon: f64,
        floor: f64,
        h: &GridField,
        u0: &GridField,
    ) -> Result<(GridField, GridField)> {
        let bump = self.field(epsilon, h.grid())?;
        let h_t = if self.target.coefficient() {
            h.add(&bump)
        } else {
            h.clone()
        };
        let half = 0.5 * floor;
        if let Some((index, &value)) = h_t.values().iter().enumerate().find(|(_, v)| **v < half) {
            return Err(Error::Positivity {
                index,
                value,
                floor: half,
            });
        }
        let u_t = if self.target.data() {
            let mut u = u0.add(&bump);
            u.enforce_boundary();
            u
        } else {
            u0.clone()
        };
        Ok((h_t, u_t))
    }
}

/// What the errors of a [`ConvergenceReport`] are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// The perturbed net at the same `eps`.
    PerturbedNet,
    /// The classical solve with the unregularized coefficient.
    ClassicalSolve,
    /// The classical solve on a 4x finer grid.
    FineClassicalSolve,
}

impl ReferenceKind {
    pub fn name(self) -> &'static str {
        match self {
            ReferenceKind::PerturbedNet => "perturbed-net",
            ReferenceKind::ClassicalSolve => "classical-solve",
            ReferenceKind::FineClassicalSolve => "classical-solve-4x",
        }
    }
}

/// Errors along a ladder and their fitted decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub epsilons: Vec<f64>,
    /// `max_t ||u_eps(t) - ref(t)||_{L^2}`.
    pub errors: Vec<f64>,
    /// `||u_eps(T) - ref(T)||_{L^2}`.
    pub final_errors: Vec<f64>,
    /// Log-log slope of `errors` against `eps` (positive for decay).
    pub fitted_rate: f64,
    pub reference_kind: ReferenceKind,
    /// Solution `H^2` exponent of the unperturbed net (uniqueness runs).
    pub solution_exponent: Option<f64>,
    /// `||u0_eps - u0||_{L^2}` (consistency runs with regularized data).
    pub data_errors: Vec<f64>,
    pub inputs_digest: String,
    pub checks: Vec<Check>,
    /// Unperturbed member trajectories, in ladder order.
    pub trajectories: Vec<Trajectory>,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

fn sup_and_final_error(a: &Trajectory, b: &[GridField]) -> (f64, f64) {
    let diffs: Vec<f64> = a
        .snapshots
        .iter()
        .zip(b)
        .map(|(s, r)| s.field.sub(r).l2_norm())
        .collect();
    let sup = diffs.iter().copied().fold(0.0, f64::max);
    (sup, diffs.last().copied().unwrap_or(0.0))
}

/// Solves the unperturbed and the perturbed net at every ladder value and
/// measures their distance.
///
/// Power-law perturbations of order `k` must decay at rate at least
/// `k - max(N, 0) - 0.25`, where `N` is the solution exponent of the
/// unperturbed net; superpolynomial ones must stay below the error at the
/// largest `eps` and decay faster than `eps^3` over the last three points.
pub fn uniqueness_experiment(
    problem: &Problem,
    perturbation: &PerturbationSpec,
    ladder: &[f64],
) -> Result<ConvergenceReport> {
    validate_ladder(ladder, 4)?;
    problem
        .coefficient
        .check_placement(&problem.grid, ladder[0])?;
    perturbation.validate(problem, ladder[0])?;
    let floor = problem.coefficient.floor();
    let runs: Vec<(Trajectory, f64, f64, f64)> = ladder
        .par_iter()
        .map(|&eps| {
            let (h, u0, traj) = problem.solve_member(eps)?;
            let (h_t, u0_t) = perturbation.apply(eps, floor, &h, &u0)?;
            let other = problem.run(&h_t, &u0_t)?;
            let fields: Vec<GridField> = other.snapshots.into_iter().map(|s| s.field).collect();
            let (sup, last) = sup_and_final_error(&traj, &fields);
            let h2 = traj.snapshot_sup(|u| sobolev_norms(u).h2).0;
            Ok((traj, sup, last, h2))
        })
        .collect::<Result<_>>()?;
    let errors: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let final_errors: Vec<f64> = runs.iter().map(|r| r.2).collect();
    let h2: Vec<f64> = runs.iter().map(|r| r.3).collect();
    let solution_exponent = growth_exponent(ladder, &h2)?;
    let w = fit_window(ladder.len());
    let fitted_rate = decay_rate(&ladder[w.clone()], &errors[w])?;

    let mut checks = Vec::new();
    if errors.iter().all(|e| *e == 0.0) {
        checks.push(Check::new(
            "uniqueness_identical_nets",
            perturbation.magnitude == 0.0,
            "errors vanish identically".into(),
        ));
    } else {
        match perturbation.kind {
            PerturbationKind::PowerLaw { order } => {
                let need = order - solution_exponent.max(0.0) - EXPONENT_SLACK;
                checks.push(Check::new(
                    "uniqueness_power_law_rate",
                    fitted_rate >= need,
                    format!(
                        "rate {fitted_rate:.4} >= k - N - {EXPONENT_SLACK} = {need:.4} (k = {order}, N = {solution_exponent:.4})"
                    ),
                ));
            }
            PerturbationKind::Superpolynomial => {
                let first = errors[0];
                checks.push(Check::new(
                    "uniqueness_superpolynomial_bound",
                    errors.iter().all(|e| *e <= first),
                    format!("all errors <= {first:.6e}"),
                ));
                let tail = ladder.len() - 3;
                let tail_rate = decay_rate(&ladder[tail..], &errors[tail..])?;
                checks.push(Check::new(
                    "uniqueness_superpolynomial_decay",
                    tail_rate > 3.0,
                    format!("slope over the last three points {tail_rate:.4} > 3"),
                ));
            }
        }
    }

    Ok(ConvergenceReport {
        epsilons: ladder.to_vec(),
        errors,
        final_errors,
        fitted_rate,
        reference_kind: ReferenceKind::PerturbedNet,
        solution_exponent: Some(solution_exponent),
        data_errors: Vec::new(),
        inputs_digest: inputs_digest(&(problem, perturbation, ladder)),
        checks,
        trajectories: runs.into_iter().map(|r| r.0).collect(),
    })
}

/// Outcome of one Duhamel reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct DuhamelReport {
    pub epsilon: f64,
    pub nodes: usize,
    /// Node times `s_k = k T / (nodes - 1)`.
    pub times: Vec<f64>,
    /// `max_k ||U(s_k) - U~(s_k)||_{L^2}`.
    pub residual: f64,
    /// `max_k ||U(s_k)||_{L^2}`.
    pub difference_norm: f64,
    /// `residual / difference_norm`, zero when `U` vanishes.
    pub relative_residual: f64,
    /// `max_m ||U(t_m) - U_f(t_m)||_{L^2}` with `U_f` solved directly with
    /// the forcing `f_eps`.
    pub forced_residual: f64,
}

/// Reconstructs `U = u_eps - u~_eps` from the Duhamel representation
/// `U(t) = V(t) + int_0^t W(t - s; s) ds`.
///
/// `V` evolves `u0_eps - u~0_eps` under `h~_eps`, and `W(.; s)` evolves the
/// forcing `f(s) = d/dx((h_eps - h~_eps) d/dx u_eps(s))` under `h~_eps`. The
/// `s`-integral uses the trapezoid rule on `nodes` equally spaced nodes in
/// `[0, T]`. The time step is shortened so that every node falls on a step.
pub fn duhamel_check(
    problem: &Problem,
    perturbation: &PerturbationSpec,
    epsilon: f64,
    nodes: usize,
) -> Result<DuhamelReport> {
    if nodes < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: nodes,
        });
    }
    perturbation.validate(problem, epsilon)?;
    problem
        .coefficient
        .check_placement(&problem.grid, epsilon)?;
    let intervals = nodes - 1;
    let cfg = &problem.solve;
    let t_final = cfg.final_time();
    let per_interval = cfg.steps().div_ceil(intervals).max(1);
    let steps = per_interval * intervals;
    let dt = t_final / steps as f64;
    let ds = t_final / intervals as f64;
    let scheme = cfg.scheme();

    let h = problem.coefficient_at(epsilon)?;
    let u0 = problem.data_at(epsilon)?;
    let (h_t, u0_t) = perturbation.apply(epsilon, problem.coefficient.floor(), &h, &u0)?;
    let op = DiffusionOperator::build_with(&h, problem.face_average)?;
    let op_t = DiffusionOperator::build_with(&h_t, problem.face_average)?;
    let delta_faces: Vec<f64> = op
        .faces()
        .iter()
        .zip(op_t.faces())
        .map(|(a, b)| a - b)
        .collect();
    let op_delta = DiffusionOperator::from_faces_unchecked(problem.grid, delta_faces);

    let every = SolveConfig::every_step(t_final, dt, scheme)?;
    let u = solve(&u0, &op, &every)?;
    let u_t = solve(&u0_t, &op_t, &every)?;
    let diff: Vec<GridField> = u
        .snapshots
        .iter()
        .zip(&u_t.snapshots)
        .map(|(a, b)| a.field.sub(&b.field))
        .collect();

    let forcing: Vec<GridField> = u
        .snapshots
        .iter()
        .map(|s| op_delta.apply(&s.field))
        .collect();
    let forced = solve_with_forcing(&diff[0], &op_t, &every, |m, _| forcing[m].clone())?;
    let forced_residual = forced
        .snapshots
        .iter()
        .zip(&diff)
        .map(|(s, d)| s.field.sub(d).l2_norm())
        .fold(0.0, f64::max);

    let node_step = |k: usize| k * per_interval;
    let homogeneous = |start: &GridField, k_max: usize| -> Result<Vec<GridField>> {
        if k_max == 0 {
            return Ok(vec![start.clone()]);
        }
        let span = SolveConfig::uniform(ds * k_max as f64, dt, scheme, k_max)?;
        Ok(solve(start, &op_t, &span)?
            .snapshots
            .into_iter()
            .map(|s| s.field)
            .collect())
    };
    let v = homogeneous(&diff[0], intervals)?;
    let kernels: Vec<Vec<GridField>> = (0..nodes)
        .into_par_iter()
        .map(|j| homogeneous(&forcing[node_step(j)], intervals - j))
        .collect::<Result<_>>()?;

    let mut residual: f64 = 0.0;
    let mut difference_norm: f64 = 0.0;
    for k in 0..nodes {
        let mut rebuilt = v[k].clone();
        if k > 0 {
            for j in 0..=k {
                let w = if j == 0 || j == k { 0.5 * ds } else { ds };
                rebuilt = rebuilt.add(&kernels[j][k - j].scale(w));
            }
        }
        let exact = &diff[node_step(k)];
        residual = residual.max(exact.sub(&rebuilt).l2_norm());
        difference_norm = difference_norm.max(exact.l2_norm());
    }
    Ok(DuhamelReport {
        epsilon,
        nodes,
        times: (0..nodes).map(|k| ds * k as f64).collect(),
        residual,
        difference_norm,
        relative_residual: if difference_norm > 0.0 {
            residual / difference_norm
        } else {
            0.0
        },
        forced_residual,
    })
}

/// Relative Duhamel residual allowed at the coarse quadrature.
pub const DUHAMEL_TOLERANCE: f64 = 0.05;
/// Minimal residual reduction when the quadrature spacing is halved.
pub const DUHAMEL_REFINEMENT: f64 = 1.8;

/// [`duhamel_check`] at `nodes` and `2 nodes - 1` quadrature nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DuhamelStudy {
    pub coarse: DuhamelReport,
    pub fine: DuhamelReport,
    pub refinement_ratio: f64,
    pub checks: Vec<Check>,
}

impl DuhamelStudy {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

pub fn duhamel_study(
    problem: &Problem,
    perturbation: &PerturbationSpec,
    epsilon: f64,
    nodes: usize,
) -> Result<DuhamelStudy> {
    let coarse = duhamel_check(problem, perturbation, epsilon, nodes)?;
    let fine = duhamel_check(problem, perturbation, epsilon, 2 * nodes - 1)?;
    let refinement_ratio = if fine.residual > 0.0 {
        coarse.residual / fine.residual
    } else {
        f64::INFINITY
    };
    let mut checks = Vec::new();
    if coarse.difference_norm == 0.0 {
        checks.push(Check::new(
            "duhamel_zero_perturbation",
            coarse.residual <= 1e-12,
            format!("residual {:.3e} <= 1e-12", coarse.residual),
        ));
    } else {
        checks.push(Check::new(
            "duhamel_representation",
            coarse.relative_residual <= DUHAMEL_TOLERANCE,
            format!(
                "relative residual {:.4e} <= {DUHAMEL_TOLERANCE} at {} nodes",
                coarse.relative_residual, coarse.nodes
            ),
        ));
        checks.push(Check::new(
            "duhamel_quadrature_refinement",
            refinement_ratio >= DUHAMEL_REFINEMENT,
            format!("residual ratio {refinement_ratio:.4} >= {DUHAMEL_REFINEMENT}"),
        ));
    }
    let forced = coarse.forced_residual.max(fine.forced_residual);
    let scale = coarse.difference_norm.max(1.0);
    checks.push(Check::new(
        "duhamel_forced_path",
        forced <= 1e-10 * scale,
        format!("forced solve matches difference within {forced:.3e}"),
    ));
    Ok(DuhamelStudy {
        coarse,
        fine,
        refinement_ratio,
        checks,
    })
}

/// Minimal decay rate of consistency errors.
pub const CONSISTENCY_RATE: f64 = 0.75;
/// Errors at or below this level count as exact.
pub const ROUNDOFF_LEVEL: f64 = 1e-12;

/// Solves the regularized nets of a problem without atoms and measures their
/// distance to the classical solution with the unregularized coefficient and
/// data, on the same grid or (with `fine_reference`) on a 4x finer grid.
pub fn consistency_experiment(
    problem: &Problem,
    ladder: &[f64],
    fine_reference: bool,
) -> Result<ConvergenceReport> {
    if problem.coefficient.has_atoms() {
        return Err(Error::InadmissibleConsistencyInput);
    }
    validate_ladder(ladder, 4)?;
    let reference: Vec<GridField> = if fine_reference {
        if let InitialData::Samples(_) = problem.initial_data {
            return Err(Error::InvalidParameter {
                name: "fine_reference",
                value: 1.0,
                reason: "sampled initial data cannot be refined",
            });
        }
        let fine = problem.grid.refined(4)?;
        let mut fine_problem = problem.clone();
        fine_problem.grid = fine;
        let h = fine_problem.coefficient.sample(&fine)?;
        let u0 = fine_problem.initial_data.sample(&fine)?;
        fine_problem
            .run(&h, &u0)?
            .snapshots
            .into_iter()
            .map(|s| {
                let v: Vec<f64> = s.field.values().iter().step_by(4).copied().collect();
                GridField::new(problem.grid, v)
            })
            .collect::<Result<_>>()?
    } else {
        let h = problem.coefficient.sample(&problem.grid)?;
        let u0 = problem.initial_data.sample(&problem.grid)?;
        problem
            .run(&h, &u0)?
            .snapshots
            .into_iter()
            .map(|s| s.field)
            .collect()
    };
    let u0 = problem.initial_data.sample(&problem.grid)?;
    let runs: Vec<(Trajectory, f64, f64)> = ladder
        .par_iter()
        .map(|&eps| {
            let (_, _, traj) = problem.solve_member(eps)?;
            let (sup, last) = sup_and_final_error(&traj, &reference);
            Ok((traj, sup, last))
        })
        .collect::<Result<_>>()?;
    let errors: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let final_errors: Vec<f64> = runs.iter().map(|r| r.2).collect();
    let data_errors = if problem.regularize_data {
        ladder
            .iter()
            .map(|&eps| Ok(problem.data_at(eps)?.sub(&u0).l2_norm()))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let w = fit_window(ladder.len());
    let fitted_rate = decay_rate(&ladder[w.clone()], &errors[w])?;

    let mut checks = Vec::new();
    let worst = errors.iter().copied().fold(0.0, f64::max);
    if worst <= ROUNDOFF_LEVEL {
        checks.push(Check::new(
            "consistency_exact",
            true,
            format!("max error {worst:.3e} <= {ROUNDOFF_LEVEL:.0e}; rate not meaningful"),
        ));
    } else {
        let tail = &errors[errors.len() - 3..];
        checks.push(Check::new(
            "consistency_monotone_tail",
            tail.windows(2).all(|p| p[1] <= p[0]),
            format!(
                "errors {:.6e}, {:.6e}, {:.6e} non-increasing",
                tail[0], tail[1], tail[2]
            ),
        ));
        checks.push(Check::new(
            "consistency_rate",
            fitted_rate >= CONSISTENCY_RATE,
            format!("rate {fitted_rate:.4} >= {CONSISTENCY_RATE}"),
        ));
    }

    Ok(ConvergenceReport {
        epsilons: ladder.to_vec(),
        errors,
        final_errors,
        fitted_rate,
        reference_kind: if fine_reference {
            ReferenceKind::FineClassicalSolve
        } else {
            ReferenceKind::ClassicalSolve
        },
        solution_exponent: None,
        data_errors,
        inputs_digest: inputs_digest(&(problem, ladder, fine_reference)),
        checks,
        trajectories: runs.into_iter().map(|r| r.0).collect(),
    })
}

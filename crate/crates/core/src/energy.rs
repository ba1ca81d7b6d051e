//! Energy functional `E = ||u||^2 + ||h^{1/2} u_x||^2`, discrete residuals of
//! the two energy identities and a-priori bound checks on trajectories.

use crate::coefficients::{gradient_l2, second_difference_l2, sobolev_norms, w1inf_norm};
use crate::error::{Error, Result};
use crate::grid::{face_values, FaceAverage, GridField};
use crate::scalar::Scalar;
use crate::solver::Trajectory;

/// Relative tolerance (against the initial value) for monotonicity checks.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms<T> {
    pub energy: T,
    pub l2_sq: T,
    pub weighted_h1: T,
}

/// `E = l2_sq + weighted_h1` with
/// `weighted_h1 = sum_faces h_{i+1/2} ((u_{i+1} - u_i)/dx)^2 dx`.
pub fn energy_functional<T: Scalar>(u: &GridField<T>, h: &GridField<T>) -> Result<EnergyTerms<T>> {
    energy_functional_with(u, h, FaceAverage::Arithmetic)
}

pub fn energy_functional_with<T: Scalar>(
    u: &GridField<T>,
    h: &GridField<T>,
    averaging: FaceAverage,
) -> Result<EnergyTerms<T>> {
    if u.grid() != h.grid() {
        return Err(Error::GridMismatch("u and h live on different grids"));
    }
    if let Some((index, &value)) = h.values().iter().enumerate().find(|(_, v)| **v < T::zero()) {
        return Err(Error::Positivity {
            index,
            value: value.as_f64(),
            floor: 0.0,
        });
    }
    let faces = face_values(h, averaging);
    let dx = u.grid().dx();
    let weighted_h1 = faces
        .iter()
        .zip(u.face_differences())
        .map(|(&hf, d)| hf * d * d)
        .sum::<T>()
        * dx;
    let l2_sq = u.l2_norm_sq();
    Ok(EnergyTerms {
        energy: l2_sq + weighted_h1,
        l2_sq,
        weighted_h1,
    })
}

/// One a-priori estimate evaluated along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck<T> {
    pub name: &'static str,
    /// `max_t lhs(t)`.
    pub lhs_max: T,
    pub rhs: T,
    /// `lhs_max / rhs`.
    pub ratio: T,
    /// Largest admissible ratio.
    pub envelope: T,
    /// `lhs(t)` never grew between snapshots.
    pub lhs_monotone: bool,
    /// Whether a growing `lhs` fails the check.
    pub monotone_required: bool,
}

impl<T: Scalar> BoundCheck<T> {
    pub fn within_envelope(&self) -> bool {
        self.ratio <= self.envelope
    }

    pub fn passed(&self) -> bool {
        self.within_envelope() && (self.lhs_monotone || !self.monotone_required)
    }
}

/// Per-snapshot energies, identity residuals and bound checks.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport<T> {
    pub times: Vec<T>,
    pub energy: Vec<T>,
    pub l2: Vec<T>,
    pub weighted_h1: Vec<T>,
    /// Residual of `1/2 d/dt ||u||^2 + ||h^{1/2} u_x||^2 = 0` on each snapshot interval.
    pub residual_energy2: Vec<T>,
    /// Residual of `||u_t||^2 + 1/2 d/dt ||h^{1/2} u_x||^2 = 0` on each interval.
    pub residual_energy1: Vec<T>,
    pub max_residual_energy2: T,
    pub max_residual_energy1: T,
    /// Interval index of the first increase of `E` beyond tolerance.
    pub energy_increase: Option<usize>,
    pub weighted_h1_monotone: bool,
    pub bound_checks: Vec<BoundCheck<T>>,
}

impl<T: Scalar> EnergyReport<T> {
    pub fn energy_monotone(&self) -> bool {
        self.energy_increase.is_none()
    }

    pub fn bounds_passed(&self) -> bool {
        self.bound_checks.iter().all(BoundCheck::passed)
    }
}

fn uniform_spacing<T: Scalar>(times: &[T]) -> Result<T> {
    if times.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: times.len(),
        });
    }
    let delta = times[1] - times[0];
    let tol = delta * T::lit(1e-9);
    if let Some(w) = times
        .windows(2)
        .find(|w| ((w[1] - w[0]) - delta).abs() > tol)
    {
        return Err(Error::InvalidParameter {
            name: "snapshot spacing",
            value: (w[1] - w[0]).as_f64(),
            reason: "snapshots must be equally spaced",
        });
    }
    Ok(delta)
}

fn non_increasing<T: Scalar>(values: &[T]) -> Option<usize> {
    let &first = values.first()?;
    let tol = first.abs() * T::lit(MONOTONE_TOL);
    values.windows(2).position(|w| w[1] > w[0] + tol)
}

/// Energies and identity residuals along `traj` for conductivity `h`.
pub fn verify_identities<T: Scalar>(
    traj: &Trajectory<T>,
    h: &GridField<T>,
) -> Result<EnergyReport<T>> {
    let times = traj.times();
    let delta = uniform_spacing(&times)?;
    let terms = traj
        .snapshots
        .iter()
        .map(|s| energy_functional(&s.field, h))
        .collect::<Result<Vec<_>>>()?;
    let half = T::lit(0.5);
    let two_delta = delta + delta;

    let mut residual_energy2 = Vec::with_capacity(terms.len() - 1);
    let mut residual_energy1 = Vec::with_capacity(terms.len() - 1);
    for (m, w) in terms.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        residual_energy2
            .push((b.l2_sq - a.l2_sq) / two_delta + half * (a.weighted_h1 + b.weighted_h1));
        let du = traj.snapshots[m + 1].field.sub(&traj.snapshots[m].field);
        let ut_sq = du.l2_norm_sq() / (delta * delta);
        residual_energy1.push(ut_sq + (b.weighted_h1 - a.weighted_h1) / two_delta);
    }
    let max_abs = |v: &[T]| v.iter().fold(T::zero(), |m, r| m.max(r.abs()));
    let energy: Vec<T> = terms.iter().map(|t| t.energy).collect();
    let weighted_h1: Vec<T> = terms.iter().map(|t| t.weighted_h1).collect();
    Ok(EnergyReport {
        max_residual_energy2: max_abs(&residual_energy2),
        max_residual_energy1: max_abs(&residual_energy1),
        energy_increase: non_increasing(&energy),
        weighted_h1_monotone: non_increasing(&weighted_h1).is_none(),
        l2: terms.iter().map(|t| t.l2_sq.sqrt()).collect(),
        times,
        energy,
        weighted_h1,
        residual_energy2,
        residual_energy1,
        bound_checks: Vec::new(),
    })
}

/// Envelope applied to estimates whose constants are not explicit.
pub const GENERIC_ENVELOPE: f64 = 10.0;
/// Slack on the unit-constant `L^2` contraction.
pub const CONTRACTION_SLACK: f64 = 1e-10;

/// Evaluates the four a-priori estimates along `traj`:
///
/// | name | lhs(t) | rhs | envelope |
/// |------|--------|-----|----------|
/// | `energy_estimate`   | `‖u‖`    | `(1+‖h‖∞)^{1/2} ‖u0‖_{H¹}` | 10 |
/// | `energy_estimate_1` | `‖u_x‖`  | `(1+‖h‖∞) ‖u0‖_{H¹}`       | 10 |
/// | `energy_estimate_2` | `‖u_xx‖` | `(2+‖h‖_{W1∞})² ‖u0‖_{H²}` | 10 |
/// | `energy_estimate_3` | `‖u‖`    | `‖u0‖`                     | 1  |
///
/// Monotone non-growth is enforced for the two `L^2` estimates, where the
/// energy identity forces it; for the derivative estimates it is reported.
pub fn check_apriori_bounds<T: Scalar>(
    traj: &Trajectory<T>,
    h: &GridField<T>,
    u0: &GridField<T>,
) -> Result<Vec<BoundCheck<T>>> {
    if traj.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: traj.len(),
        });
    }
    let h_inf = h.max_abs();
    let h_w1 = w1inf_norm(h);
    let u0_norms = sobolev_norms(u0);
    let one = T::one();
    let two = T::lit(2.0);
    let generic = T::lit(GENERIC_ENVELOPE);

    let l2: Vec<T> = traj.snapshots.iter().map(|s| s.field.l2_norm()).collect();
    let grad: Vec<T> = traj
        .snapshots
        .iter()
        .map(|s| gradient_l2(&s.field))
        .collect();
    let lap: Vec<T> = traj
        .snapshots
        .iter()
        .map(|s| second_difference_l2(&s.field))
        .collect();

    let make = |name, lhs: &[T], rhs: T, envelope: T, monotone_required| {
        let lhs_max = lhs.iter().copied().fold(T::zero(), T::max);
        let ratio = if rhs > T::zero() {
            lhs_max / rhs
        } else if lhs_max == T::zero() {
            T::zero()
        } else {
            T::infinity()
        };
        BoundCheck {
            name,
            lhs_max,
            rhs,
            ratio,
            envelope,
            lhs_monotone: non_increasing(lhs).is_none(),
            monotone_required,
        }
    };
    Ok(vec![
        make(
            "energy_estimate",
            &l2,
            (one + h_inf).sqrt() * u0_norms.h1,
            generic,
            true,
        ),
        make(
            "energy_estimate_1",
            &grad,
            (one + h_inf) * u0_norms.h1,
            generic,
            false,
        ),
        make(
            "energy_estimate_2",
            &lap,
            (two + h_w1) * (two + h_w1) * u0_norms.h2,
            generic,
            false,
        ),
        make(
            "energy_estimate_3",
            &l2,
            u0_norms.l2,
            one + T::lit(CONTRACTION_SLACK),
            true,
        ),
    ])
}

/// [`verify_identities`] followed by [`check_apriori_bounds`] against the
/// trajectory's own initial data.
pub fn energy_report<T: Scalar>(traj: &Trajectory<T>, h: &GridField<T>) -> Result<EnergyReport<T>> {
    let mut report = verify_identities(traj, h)?;
    report.bound_checks = check_apriori_bounds(traj, h, traj.initial())?;
    Ok(report)
}

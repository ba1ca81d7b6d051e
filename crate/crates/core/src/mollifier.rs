//! Friedrichs mollifiers, their `eps`-scalings and discrete convolution on
//! uniform grids.

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, GridField};
use crate::scalar::Scalar;

/// Closed-form mollifier profiles on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile<T> {
    /// `exp(-sharpness / (1 - x^2))` for `|x| < 1`, zero otherwise.
    Bump { sharpness: T },
}

impl<T: Scalar> Profile<T> {
    /// Unnormalized profile value.
    #[inline]
    pub fn raw(&self, x: T) -> T {
        match *self {
            Profile::Bump { sharpness } => {
                let r = T::one() - x * x;
                if r <= T::zero() {
                    T::zero()
                } else {
                    (-sharpness / r).exp()
                }
            }
        }
    }

    /// Derivative of the unnormalized profile.
    #[inline]
    pub fn raw_derivative(&self, x: T) -> T {
        match *self {
            Profile::Bump { sharpness } => {
                let r = T::one() - x * x;
                if r <= T::zero() {
                    T::zero()
                } else {
                    let two = T::lit(2.0);
                    -(two * sharpness * x / (r * r)) * (-sharpness / r).exp()
                }
            }
        }
    }

    fn raw_f64(&self, x: f64) -> f64 {
        match *self {
            Profile::Bump { sharpness } => {
                let r = 1.0 - x * x;
                if r <= 0.0 {
                    0.0
                } else {
                    (-sharpness.as_f64() / r).exp()
                }
            }
        }
    }
}

/// A normalized, even, compactly supported mollifier `psi` on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierKernel<T> {
    profile: Profile<T>,
    support_radius: T,
    samples_per_unit: usize,
    normalization: T,
}

/// The canonical bump `c exp(-1/(1-x^2))` normalized to unit mass by a
/// trapezoid rule with `10^6` intervals on `[-1, 1]`.
pub fn standard_bump<T: Scalar>() -> MollifierKernel<T> {
    MollifierKernel::new(
        Profile::Bump {
            sharpness: T::one(),
        },
        500_000,
    )
}

impl<T: Scalar> MollifierKernel<T> {
    pub fn new(profile: Profile<T>, samples_per_unit: usize) -> Self {
        let samples_per_unit = samples_per_unit.max(1);
        // Normalization is always accumulated in f64, also for f32 kernels.
        let raw_mass = trapezoid_f64(|x| profile.raw_f64(x), 2 * samples_per_unit);
        Self {
            profile,
            support_radius: T::one(),
            samples_per_unit,
            normalization: T::lit(1.0 / raw_mass),
        }
    }

    #[inline]
    pub fn profile(&self) -> Profile<T> {
        self.profile
    }

    #[inline]
    pub fn support_radius(&self) -> T {
        self.support_radius
    }

    #[inline]
    pub fn samples_per_unit(&self) -> usize {
        self.samples_per_unit
    }

    /// Multiplier turning the raw profile into a unit-mass kernel.
    #[inline]
    pub fn normalization(&self) -> T {
        self.normalization
    }

    /// `psi(x)`.
    #[inline]
    pub fn eval(&self, x: T) -> T {
        self.normalization * self.profile.raw(x)
    }

    /// `psi'(x)`.
    #[inline]
    pub fn derivative(&self, x: T) -> T {
        self.normalization * self.profile.raw_derivative(x)
    }

    /// Trapezoid quadrature of `psi` over `[-1, 1]` at the normalization
    /// resolution.
    pub fn mass(&self) -> T {
        let c = self.normalization.as_f64();
        T::lit(c * trapezoid_f64(|x| self.profile.raw_f64(x), 2 * self.samples_per_unit))
    }

    pub fn scaled(self, epsilon: T) -> Result<ScaledKernel<T>> {
        ScaledKernel::new(self, epsilon)
    }
}

fn trapezoid_f64(f: impl Fn(f64) -> f64, intervals: usize) -> f64 {
    let h = 2.0 / intervals as f64;
    let interior: f64 = (1..intervals).map(|i| f(-1.0 + i as f64 * h)).sum();
    h * (interior + 0.5 * (f(-1.0) + f(1.0)))
}

/// `psi_eps(x) = eps^{-1} psi(x / eps)`, supported on `[-eps, eps]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledKernel<T> {
    base: MollifierKernel<T>,
    epsilon: T,
}

impl<T: Scalar> ScaledKernel<T> {
    pub fn new(base: MollifierKernel<T>, epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon.as_f64(),
                reason: "must be positive and finite",
            });
        }
        Ok(Self { base, epsilon })
    }

    #[inline]
    pub fn base(&self) -> &MollifierKernel<T> {
        &self.base
    }

    #[inline]
    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// Half-width of the support.
    #[inline]
    pub fn support(&self) -> T {
        self.epsilon * self.base.support_radius
    }

    #[inline]
    pub fn eval(&self, x: T) -> T {
        self.base.eval(x / self.epsilon) / self.epsilon
    }

    #[inline]
    pub fn derivative(&self, x: T) -> T {
        self.base.derivative(x / self.epsilon) / (self.epsilon * self.epsilon)
    }

    /// Symmetric quadrature weights `w_{-r..=r}` of the kernel on spacing
    /// `dx`, rescaled so that they sum to one.
    ///
    /// Fails with [`Error::UnderResolved`] when `eps < 4 dx`.
    pub fn discrete_weights(&self, dx: T) -> Result<DiscreteKernel<T>> {
        let four_dx = T::lit(4.0) * dx;
        if self.epsilon < four_dx {
            return Err(Error::UnderResolved {
                epsilon: self.epsilon.as_f64(),
                four_dx: four_dx.as_f64(),
            });
        }
        let radius = (self.support() / dx).floor().to_usize().unwrap_or(0);
        let raw: Vec<T> = (0..=2 * radius)
            .map(|k| {
                let offset = T::from_count(k) - T::from_count(radius);
                self.eval(offset * dx) * dx
            })
            .collect();
        let total: T = raw.iter().copied().sum();
        Ok(DiscreteKernel {
            radius,
            weights: raw.into_iter().map(|w| w / total).collect(),
        })
    }
}

/// `eps^{-1} psi(x/eps)` for a kernel, rejecting `eps <= 0`.
pub fn evaluate_scaled<T: Scalar>(kernel: &ScaledKernel<T>, x: T) -> T {
    kernel.eval(x)
}

/// Normalized grid weights of a scaled kernel; index `k` holds the weight
/// at offset `k - radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteKernel<T> {
    radius: usize,
    weights: Vec<T>,
}

impl<T: Scalar> DiscreteKernel<T> {
    #[inline]
    pub fn radius(&self) -> usize {
        self.radius
    }

    #[inline]
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

pub(crate) fn check_width<T: Scalar>(grid: &Grid<T>, kernel: &ScaledKernel<T>) -> Result<()> {
    let width = kernel.support() + kernel.support();
    if width > grid.length() {
        return Err(Error::DomainTooSmall {
            width: width.as_f64(),
            length: grid.length().as_f64(),
        });
    }
    Ok(())
}

/// Discrete convolution `f * psi_eps` on the grid of `f`.
///
/// Values outside the domain are continued by the boundary value on
/// Dirichlet grids and by periodic wrap-around on periodic grids.
pub fn mollify_field<T: Scalar>(
    f: &GridField<T>,
    kernel: &ScaledKernel<T>,
) -> Result<GridField<T>> {
    let grid = *f.grid();
    check_width(&grid, kernel)?;
    let dk = kernel.discrete_weights(grid.dx())?;
    let v = f.values();
    let m = v.len();
    let r = dk.radius() as isize;
    let fetch = |j: isize| -> T {
        match grid.boundary() {
            Boundary::DirichletZero => v[j.clamp(0, m as isize - 1) as usize],
            Boundary::Periodic => v[j.rem_euclid(m as isize) as usize],
        }
    };
    let out = (0..m as isize)
        .map(|i| {
            dk.weights()
                .iter()
                .enumerate()
                .map(|(k, &w)| w * fetch(i - (k as isize - r)))
                .sum()
        })
        .collect();
    Ok(GridField::from_raw(grid, out))
}

/// Discrete convolution of a closed-form function with `psi_eps`, sampled on
/// `grid`. The function is evaluated on the lattice `a + j dx` extended past
/// both ends, wrapped into `[a, b)` on periodic grids. Every output node sees
/// the same lattice abscissae, so discontinuities are sampled consistently.
pub fn mollify_fn<T: Scalar>(
    grid: &Grid<T>,
    kernel: &ScaledKernel<T>,
    g: impl Fn(T) -> T,
) -> Result<GridField<T>> {
    check_width(grid, kernel)?;
    let dk = kernel.discrete_weights(grid.dx())?;
    let r = dk.radius() as isize;
    let m = grid.storage_len() as isize;
    let lattice = |j: isize| -> T {
        let j = match grid.boundary() {
            Boundary::DirichletZero => j,
            Boundary::Periodic => j.rem_euclid(m),
        };
        if j >= 0 {
            grid.x(j as usize)
        } else {
            grid.a() - T::from_count(j.unsigned_abs()) * grid.dx()
        }
    };
    let samples: Vec<T> = (-r..m + r).map(|j| g(lattice(j))).collect();
    let out = (0..m as usize)
        .map(|i| {
            dk.weights()
                .iter()
                .enumerate()
                .map(|(k, &w)| w * samples[i + 2 * r as usize - k])
                .sum()
        })
        .collect();
    Ok(GridField::from_raw(*grid, out))
}

//! Singular conductivities, their regularizations `h_eps`, discrete norms and
//! moderateness fits over `eps` ladders.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::log_log_slope;
use crate::grid::{Grid, GridField};
use crate::mollifier::{check_width, mollify_fn, standard_bump, MollifierKernel, ScaledKernel};
use crate::scalar::Scalar;

/// Smooth part of a conductivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Background<T> {
    Constant {
        value: T,
    },
    /// `intercept + slope * x`.
    Affine {
        intercept: T,
        slope: T,
    },
    /// `mean + amplitude * sin(wavenumber * x + phase)`.
    Sinusoid {
        mean: T,
        amplitude: T,
        wavenumber: T,
        phase: T,
    },
}

impl<T: Scalar> Background<T> {
    #[inline]
    pub fn eval(&self, x: T) -> T {
        match *self {
            Background::Constant { value } => value,
            Background::Affine { intercept, slope } => intercept + slope * x,
            Background::Sinusoid {
                mean,
                amplitude,
                wavenumber,
                phase,
            } => mean + amplitude * (wavenumber * x + phase).sin(),
        }
    }

    /// A lower bound valid on all of the real line, when one exists.
    fn global_lower_bound(&self) -> Option<T> {
        match *self {
            Background::Constant { value } => Some(value),
            Background::Affine { .. } => None,
            Background::Sinusoid {
                mean, amplitude, ..
            } => Some(mean - amplitude.abs()),
        }
    }
}

/// Kind of a singular atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomKind<T> {
    /// `delta(x - x0)`, regularized as `psi_eps(x - x0)`.
    DiracDelta,
    /// `delta(x - x0)^2`, regularized by the net `eps^{-2} psi((x - x0)/eps)^2`.
    DiracDeltaSquared,
    /// `left` for `x < x0`, `right` for `x > x0`, mollified by convolution.
    Jump { left: T, right: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularAtom<T> {
    location: T,
    weight: T,
    kind: AtomKind<T>,
}

impl<T: Scalar> SingularAtom<T> {
    pub fn new(location: T, weight: T, kind: AtomKind<T>) -> Result<Self> {
        if !location.is_finite() {
            return Err(Error::InvalidParameter {
                name: "location",
                value: location.as_f64(),
                reason: "must be finite",
            });
        }
        if !(weight >= T::zero()) || !weight.is_finite() {
            return Err(Error::InvalidParameter {
                name: "weight",
                value: weight.as_f64(),
                reason: "atom weights must be finite and nonnegative",
            });
        }
        if let AtomKind::Jump { left, right } = kind {
            for v in [left, right] {
                if !(v >= T::zero()) || !v.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "jump value",
                        value: v.as_f64(),
                        reason: "jump values must be finite and nonnegative",
                    });
                }
            }
        }
        Ok(Self {
            location,
            weight,
            kind,
        })
    }

    pub fn delta(location: T, weight: T) -> Result<Self> {
        Self::new(location, weight, AtomKind::DiracDelta)
    }

    pub fn delta_squared(location: T, weight: T) -> Result<Self> {
        Self::new(location, weight, AtomKind::DiracDeltaSquared)
    }

    pub fn jump(location: T, weight: T, left: T, right: T) -> Result<Self> {
        Self::new(location, weight, AtomKind::Jump { left, right })
    }

    #[inline]
    pub fn location(&self) -> T {
        self.location
    }

    #[inline]
    pub fn weight(&self) -> T {
        self.weight
    }

    #[inline]
    pub fn kind(&self) -> AtomKind<T> {
        self.kind
    }

    fn step_value(&self, x: T) -> T {
        match self.kind {
            AtomKind::Jump { left, right } => {
                if x < self.location {
                    left
                } else if x > self.location {
                    right
                } else {
                    (left + right) * T::lit(0.5)
                }
            }
            _ => T::zero(),
        }
    }

    /// Adds `weight * (atom)_eps` onto `out`.
    fn add_regularized(
        &self,
        grid: &Grid<T>,
        kernel: &ScaledKernel<T>,
        out: &mut GridField<T>,
    ) -> Result<()> {
        let eps = kernel.epsilon();
        match self.kind {
            AtomKind::DiracDelta => {
                for (i, v) in out.values_mut().iter_mut().enumerate() {
                    *v = *v + self.weight * kernel.eval(grid.x(i) - self.location);
                }
            }
            AtomKind::DiracDeltaSquared => {
                let base = kernel.base();
                for (i, v) in out.values_mut().iter_mut().enumerate() {
                    let p = base.eval((grid.x(i) - self.location) / eps);
                    *v = *v + self.weight * p * p / (eps * eps);
                }
            }
            AtomKind::Jump { .. } => {
                let smooth = mollify_fn(grid, kernel, |x| self.step_value(x))?;
                for (v, s) in out.values_mut().iter_mut().zip(smooth.values()) {
                    *v = *v + self.weight * *s;
                }
            }
        }
        Ok(())
    }
}

/// `h = background + sum of weighted atoms`, with `background >= floor > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularCoefficient<T> {
    background: Background<T>,
    floor: T,
    atoms: Vec<SingularAtom<T>>,
    kernel: MollifierKernel<T>,
}

impl<T: Scalar> SingularCoefficient<T> {
    pub fn new(background: Background<T>, floor: T, atoms: Vec<SingularAtom<T>>) -> Result<Self> {
        if !(floor > T::zero()) || !floor.is_finite() {
            return Err(Error::InvalidParameter {
                name: "floor",
                value: floor.as_f64(),
                reason: "h0 must be positive",
            });
        }
        if let Some(lb) = background.global_lower_bound() {
            if lb < floor {
                return Err(Error::Positivity {
                    index: 0,
                    value: lb.as_f64(),
                    floor: floor.as_f64(),
                });
            }
        }
        Ok(Self {
            background,
            floor,
            atoms,
            kernel: standard_bump(),
        })
    }

    /// Uses `kernel` instead of the standard bump for every regularization.
    pub fn with_kernel(mut self, kernel: MollifierKernel<T>) -> Self {
        self.kernel = kernel;
        self
    }

    /// Constant conductivity without atoms.
    pub fn constant(value: T) -> Result<Self> {
        Self::new(Background::Constant { value }, value, Vec::new())
    }

    #[inline]
    pub fn background(&self) -> &Background<T> {
        &self.background
    }

    #[inline]
    pub fn floor(&self) -> T {
        self.floor
    }

    #[inline]
    pub fn atoms(&self) -> &[SingularAtom<T>] {
        &self.atoms
    }

    #[inline]
    pub fn kernel(&self) -> &MollifierKernel<T> {
        &self.kernel
    }

    pub fn has_atoms(&self) -> bool {
        !self.atoms.is_empty()
    }

    pub fn push_atom(&mut self, atom: SingularAtom<T>) {
        self.atoms.push(atom);
    }

    /// Checks that every atom keeps a margin of `4 * eps_max` to both ends.
    pub fn check_placement(&self, grid: &Grid<T>, eps_max: T) -> Result<()> {
        let margin = T::lit(4.0) * eps_max;
        for atom in &self.atoms {
            let x = atom.location;
            if x - grid.a() < margin || grid.b() - x < margin {
                return Err(Error::Placement {
                    location: x.as_f64(),
                    margin: margin.as_f64(),
                    a: grid.a().as_f64(),
                    b: grid.b().as_f64(),
                });
            }
        }
        Ok(())
    }

    /// Background sampled on `grid`, checked against the floor.
    pub fn sample_background(&self, grid: &Grid<T>) -> Result<GridField<T>> {
        let field = GridField::from_fn(*grid, |x| self.background.eval(x));
        check_floor(&field, self.floor)?;
        Ok(field)
    }

    /// The unregularized conductivity. Only defined without atoms.
    pub fn sample(&self, grid: &Grid<T>) -> Result<GridField<T>> {
        if self.has_atoms() {
            return Err(Error::InadmissibleConsistencyInput);
        }
        self.sample_background(grid)
    }

    /// `h_eps = h * psi_eps` on `grid`.
    ///
    /// The background is convolved with the discrete kernel, Dirac atoms are
    /// replaced by their exact convolution `psi_eps`, squared Dirac atoms by
    /// the net `eps^{-2} psi^2(./eps)` and jumps by the discrete convolution of
    /// the step.
    pub fn regularize(&self, epsilon: T, grid: &Grid<T>) -> Result<GridField<T>> {
        check_epsilon_range(epsilon)?;
        let kernel = self.kernel.scaled(epsilon)?;
        self.check_placement(grid, epsilon)?;
        // Fails early on an affine background dipping below the floor.
        self.sample_background(grid)?;
        let mut field = match self.background {
            // Unit-mass convolution leaves a constant unchanged; skip the
            // quadrature so that the result is exact.
            Background::Constant { value } => {
                check_width(grid, &kernel)?;
                kernel.discrete_weights(grid.dx())?;
                GridField::constant(*grid, value)
            }
            _ => mollify_fn(grid, &kernel, |x| self.background.eval(x))?,
        };
        for atom in &self.atoms {
            atom.add_regularized(grid, &kernel, &mut field)?;
        }
        check_floor(&field, self.floor)?;
        Ok(field)
    }
}

/// Free-function form of [`SingularCoefficient::regularize`].
pub fn regularize_coefficient<T: Scalar>(
    coeff: &SingularCoefficient<T>,
    epsilon: T,
    grid: &Grid<T>,
) -> Result<GridField<T>> {
    coeff.regularize(epsilon, grid)
}

fn check_epsilon_range<T: Scalar>(epsilon: T) -> Result<()> {
    if !(epsilon > T::zero()) || epsilon > T::one() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon.as_f64(),
            reason: "must lie in (0, 1]",
        });
    }
    Ok(())
}

fn check_floor<T: Scalar>(field: &GridField<T>, floor: T) -> Result<()> {
    // Allow roundoff from the normalized convolution of a constant at the floor.
    let slack = floor * T::lit(1e-12);
    for (index, &value) in field.values().iter().enumerate() {
        if value < floor - slack {
            return Err(Error::Positivity {
                index,
                value: value.as_f64(),
                floor: floor.as_f64(),
            });
        }
    }
    Ok(())
}

/// The singular part of a coefficient alone (no background), e.g. the net
/// `psi_eps` of a single Dirac atom.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomNet<T> {
    atoms: Vec<SingularAtom<T>>,
    kernel: MollifierKernel<T>,
}

impl<T: Scalar> AtomNet<T> {
    pub fn new(atoms: Vec<SingularAtom<T>>) -> Self {
        Self {
            atoms,
            kernel: standard_bump(),
        }
    }
}

/// Anything that produces a grid field for each regularization parameter.
pub trait RegularizedNet<T: Scalar>: Sync {
    fn at(&self, epsilon: T, grid: &Grid<T>) -> Result<GridField<T>>;

    /// Whether the net is a conductivity, whose infimum must stay positive.
    fn is_coefficient(&self) -> bool {
        false
    }
}

impl<T: Scalar> RegularizedNet<T> for SingularCoefficient<T> {
    fn at(&self, epsilon: T, grid: &Grid<T>) -> Result<GridField<T>> {
        self.regularize(epsilon, grid)
    }

    fn is_coefficient(&self) -> bool {
        true
    }
}

impl<T: Scalar> RegularizedNet<T> for AtomNet<T> {
    fn at(&self, epsilon: T, grid: &Grid<T>) -> Result<GridField<T>> {
        check_epsilon_range(epsilon)?;
        let kernel = self.kernel.scaled(epsilon)?;
        // Resolution check shared with the coefficient path.
        kernel.discrete_weights(grid.dx())?;
        let mut field = GridField::zeros(*grid);
        for atom in &self.atoms {
            atom.add_regularized(grid, &kernel, &mut field)?;
        }
        Ok(field)
    }
}

/// `max|f| + max|Df|`, with `D` the centered difference (one-sided at
/// Dirichlet ends).
pub fn w1inf_norm<T: Scalar>(f: &GridField<T>) -> T {
    let grad = f
        .centered_differences()
        .into_iter()
        .fold(T::zero(), |m, d| m.max(d.abs()));
    f.max_abs() + grad
}

/// Discrete `L^2`, `H^1` and `H^2` norms following `||f||_{H^k} = ||f|| + ||D^k f||`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevNorms<T> {
    pub l2: T,
    pub h1: T,
    pub h2: T,
}

/// `l2 = sqrt(sum f_i^2 dx)`; `h1` adds the `L^2` norm of the face
/// differences; `h2` adds the `L^2` norm of the interior second differences.
pub fn sobolev_norms<T: Scalar>(f: &GridField<T>) -> SobolevNorms<T> {
    let dx = f.grid().dx();
    let l2 = f.l2_norm();
    let d1 = (f.face_differences().into_iter().map(|d| d * d).sum::<T>() * dx).sqrt();
    let d2 = second_difference_l2(f);
    SobolevNorms {
        l2,
        h1: l2 + d1,
        h2: l2 + d2,
    }
}

/// `L^2` norm of the interior second-difference field.
pub fn second_difference_l2<T: Scalar>(f: &GridField<T>) -> T {
    let dx = f.grid().dx();
    (f.second_differences().into_iter().map(|d| d * d).sum::<T>() * dx).sqrt()
}

/// `L^2` norm of the face-difference field.
pub fn gradient_l2<T: Scalar>(f: &GridField<T>) -> T {
    let dx = f.grid().dx();
    (f.face_differences().into_iter().map(|d| d * d).sum::<T>() * dx).sqrt()
}

/// Which norm a moderateness fit tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    LInf,
    W1Inf,
    L2,
    H1,
    H2,
}

impl NormKind {
    pub fn evaluate<T: Scalar>(self, f: &GridField<T>) -> T {
        match self {
            NormKind::LInf => f.max_abs(),
            NormKind::W1Inf => w1inf_norm(f),
            NormKind::L2 => f.l2_norm(),
            NormKind::H1 => sobolev_norms(f).h1,
            NormKind::H2 => sobolev_norms(f).h2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NormKind::LInf => "L^inf",
            NormKind::W1Inf => "W^{1,inf}",
            NormKind::L2 => "L^2",
            NormKind::H1 => "H^1",
            NormKind::H2 => "H^2",
        }
    }
}

/// Norms of a net along an `eps` ladder and the fitted growth exponent `N`
/// in `||f_eps|| ~ eps^{-N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeratenessReport<T> {
    pub norm_kind: NormKind,
    pub epsilons: Vec<T>,
    pub norms: Vec<T>,
    pub min_values: Vec<T>,
    pub fitted_exponent: T,
    /// Set when a coefficient net has a non-positive infimum somewhere.
    pub positivity_violated: bool,
}

/// Checks that `ladder` has at least `min_len` strictly decreasing entries
/// with a constant ratio of at most 1/2.
pub fn validate_ladder<T: Scalar>(ladder: &[T], min_len: usize) -> Result<()> {
    if ladder.len() < min_len {
        return Err(Error::InvalidSweep(format!(
            "ladder needs at least {min_len} values, got {}",
            ladder.len()
        )));
    }
    if let Some(e) = ladder.iter().find(|e| !(**e > T::zero()) || **e > T::one()) {
        return Err(Error::InvalidSweep(format!("epsilon {e} outside (0, 1]")));
    }
    let ratios: Vec<T> = ladder.windows(2).map(|w| w[1] / w[0]).collect();
    let Some(&first) = ratios.first() else {
        return Ok(());
    };
    let tol = T::lit(1e-6);
    for (k, &r) in ratios.iter().enumerate() {
        if r > T::lit(0.5) + tol {
            return Err(Error::InvalidSweep(format!(
                "ratio {r} between ladder entries {k} and {} exceeds 1/2",
                k + 1
            )));
        }
        if ((r - first) / first).abs() > tol {
            return Err(Error::InvalidSweep(format!(
                "ladder is not geometric: ratio {r} differs from {first}"
            )));
        }
    }
    Ok(())
}

/// Evaluates `norm_kind` of the net at every ladder value and fits the
/// growth exponent by least squares in log-log coordinates.
pub fn fit_moderateness<T: Scalar, N: RegularizedNet<T> + ?Sized>(
    net: &N,
    epsilons: &[T],
    norm_kind: NormKind,
    grid: &Grid<T>,
) -> Result<ModeratenessReport<T>> {
    validate_ladder(epsilons, 4)?;
    let per_eps: Vec<(T, T)> = epsilons
        .par_iter()
        .map(|&eps| {
            let f = net.at(eps, grid)?;
            Ok((norm_kind.evaluate(&f), f.min()))
        })
        .collect::<Result<_>>()?;
    let norms: Vec<T> = per_eps.iter().map(|p| p.0).collect();
    let min_values: Vec<T> = per_eps.iter().map(|p| p.1).collect();
    let slope = log_log_slope(epsilons, &norms)?;
    let positivity_violated = net.is_coefficient() && min_values.iter().any(|m| *m <= T::zero());
    Ok(ModeratenessReport {
        norm_kind,
        epsilons: epsilons.to_vec(),
        norms,
        min_values,
        fitted_exponent: -slope,
        positivity_violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;

    const LADDER: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

    fn grid(n: usize) -> Grid<f64> {
        Grid::new(-1.0, 1.0, n, Boundary::DirichletZero).unwrap()
    }

    fn unit_with(atoms: Vec<SingularAtom<f64>>) -> SingularCoefficient<f64> {
        SingularCoefficient::new(Background::Constant { value: 1.0 }, 1.0, atoms).unwrap()
    }

    #[test]
    fn constant_background_regularizes_to_itself() {
        let g = grid(201);
        let h = unit_with(vec![]).regularize(0.1, &g).unwrap();
        for v in h.values() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_atom_adds_scaled_kernel() {
        let g = grid(401);
        let eps = 0.1;
        let coeff = unit_with(vec![SingularAtom::delta(0.0, 1.0).unwrap()]);
        let h = coeff.regularize(eps, &g).unwrap();
        let psi = standard_bump::<f64>();
        for (i, v) in h.values().iter().enumerate() {
            let expected = 1.0 + psi.eval(g.x(i) / eps) / eps;
            assert!((v - expected).abs() < 1e-12);
        }
        assert!((h.max() - (1.0 + psi.eval(0.0) / eps)).abs() < 1e-12);
    }

    #[test]
    fn delta_squared_atom_uses_squared_net() {
        let g = grid(401);
        let eps = 0.1;
        let coeff = unit_with(vec![SingularAtom::delta_squared(0.0, 1.0).unwrap()]);
        let h = coeff.regularize(eps, &g).unwrap();
        let p0 = standard_bump::<f64>().eval(0.0);
        assert!((h.max() - (1.0 + p0 * p0 / (eps * eps))).abs() < 1e-10);
    }

    #[test]
    fn jump_atom_is_mollified_step() {
        let g = grid(401);
        let coeff = unit_with(vec![SingularAtom::jump(0.0, 1.0, 0.0, 2.0).unwrap()]);
        let h = coeff.regularize(0.1, &g).unwrap();
        assert!((h.values()[200] - 2.0).abs() < 1e-12);
        assert!((h.values()[0] - 1.0).abs() < 1e-12);
        assert!((h.values()[400] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn regularization_errors() {
        let g = grid(101);
        let coeff = unit_with(vec![SingularAtom::delta(0.8, 1.0).unwrap()]);
        assert!(matches!(
            coeff.regularize(0.1, &g),
            Err(Error::Placement { .. })
        ));
        assert!(matches!(
            unit_with(vec![]).regularize(0.05, &g),
            Err(Error::UnderResolved { .. })
        ));
        assert!(SingularAtom::delta(0.0, -1.0).is_err());
        assert!(SingularAtom::jump(0.0, 1.0, -1.0, 1.0).is_err());
        assert!(
            SingularCoefficient::new(Background::Constant { value: 0.5 }, 1.0, vec![]).is_err()
        );
        let affine = SingularCoefficient::new(
            Background::Affine {
                intercept: 1.0,
                slope: 1.0,
            },
            0.5,
            vec![],
        )
        .unwrap();
        assert!(matches!(
            affine.regularize(0.2, &g),
            Err(Error::Positivity { .. })
        ));
    }

    #[test]
    fn w1inf_examples() {
        let g = grid(101);
        assert_eq!(w1inf_norm(&GridField::constant(g, -2.5)), 2.5);
        let ramp = GridField::from_fn(g, |x| x);
        assert!((w1inf_norm(&ramp) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sobolev_examples() {
        let g = grid(64);
        let z = sobolev_norms(&GridField::zeros(g));
        assert_eq!((z.l2, z.h1, z.h2), (0.0, 0.0, 0.0));
        let g = grid(4001);
        let s = GridField::from_fn(g, |x| (std::f64::consts::PI * x).sin());
        assert!((sobolev_norms(&s).l2 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn mollified_box_h2_is_grid_converged() {
        use crate::mollifier::mollify_fn;
        let boxf = |x: f64| if x.abs() < 0.3 { 1.0 } else { 0.0 };
        let eval = |n: usize| {
            let g = grid(n);
            let k = standard_bump::<f64>().scaled(0.2).unwrap();
            sobolev_norms(&mollify_fn(&g, &k, boxf).unwrap()).h2
        };
        let coarse = eval(201);
        let fine = eval(2001);
        assert!(((coarse - fine) / fine).abs() < 0.01, "{coarse} vs {fine}");
    }

    #[test]
    fn ladder_validation() {
        assert!(validate_ladder(&LADDER, 4).is_ok());
        assert!(validate_ladder(&[0.2, 0.1, 0.05], 4).is_err());
        assert!(validate_ladder(&[0.2, 0.15, 0.1, 0.05], 4).is_err());
        assert!(validate_ladder(&[0.2, 0.1, 0.04, 0.02], 4).is_err());
        assert!(validate_ladder(&[0.8, 0.2, 0.05, 0.0125], 4).is_ok());
    }

    #[test]
    fn constant_coefficient_has_zero_exponent() {
        let g = grid(321);
        let r = fit_moderateness(&unit_with(vec![]), &LADDER, NormKind::W1Inf, &g).unwrap();
        assert!(r.fitted_exponent.abs() <= 0.02);
        assert!(!r.positivity_violated);
        assert!(r.min_values.iter().all(|&m| m >= 1.0 - 1e-12));
    }

    #[test]
    fn delta_atom_w1inf_exponent_is_two() {
        let g = grid(2561);
        let coeff = unit_with(vec![SingularAtom::delta(0.0, 1.0).unwrap()]);
        let r = fit_moderateness(&coeff, &LADDER, NormKind::W1Inf, &g).unwrap();
        assert!(
            (r.fitted_exponent - 2.0).abs() <= 0.05,
            "{}",
            r.fitted_exponent
        );
    }

    #[test]
    fn delta_squared_linf_exponent_is_two() {
        let g = grid(641);
        let coeff = unit_with(vec![SingularAtom::delta_squared(0.0, 1.0).unwrap()]);
        let r = fit_moderateness(&coeff, &LADDER, NormKind::LInf, &g).unwrap();
        assert!(
            (r.fitted_exponent - 2.0).abs() <= 0.05,
            "{}",
            r.fitted_exponent
        );
    }

    #[test]
    fn atom_net_linf_exponent_is_one() {
        let g = grid(641);
        let net = AtomNet::new(vec![SingularAtom::delta(0.0, 1.0).unwrap()]);
        let r = fit_moderateness(&net, &LADDER, NormKind::LInf, &g).unwrap();
        assert!(
            (r.fitted_exponent - 1.0).abs() <= 0.05,
            "{}",
            r.fitted_exponent
        );
    }

    #[test]
    fn adding_atoms_never_lowers_the_exponent() {
        let g = grid(641);
        let base = SingularCoefficient::new(
            Background::Sinusoid {
                mean: 2.0,
                amplitude: 0.5,
                wavenumber: 3.0,
                phase: 0.1,
            },
            1.0,
            vec![],
        )
        .unwrap();
        let mut previous = fit_moderateness(&base, &LADDER, NormKind::W1Inf, &g)
            .unwrap()
            .fitted_exponent;
        let mut coeff = base;
        for atom in [
            SingularAtom::jump(-0.1, 1.0, 0.0, 1.0).unwrap(),
            SingularAtom::delta(0.05, 0.5).unwrap(),
            SingularAtom::delta_squared(0.1, 0.25).unwrap(),
        ] {
            coeff.push_atom(atom);
            let e = fit_moderateness(&coeff, &LADDER, NormKind::W1Inf, &g)
                .unwrap()
                .fitted_exponent;
            assert!(e >= previous - 1e-12, "{e} < {previous}");
            previous = e;
        }
    }

    #[test]
    fn norms_agree_with_finer_grid() {
        let eps = 0.1;
        for atom in [
            SingularAtom::delta(0.0, 1.0).unwrap(),
            SingularAtom::delta_squared(0.0, 0.2).unwrap(),
            SingularAtom::jump(0.0, 1.0, 0.0, 1.0).unwrap(),
        ] {
            let coeff = unit_with(vec![atom]);
            let coarse = grid(1281); // eps = 64 dx
            let fine = coarse.refined(4).unwrap();
            let hc = coeff.regularize(eps, &coarse).unwrap();
            let hf = coeff.regularize(eps, &fine).unwrap();
            let pairs = [
                (w1inf_norm(&hc), w1inf_norm(&hf)),
                (sobolev_norms(&hc).h1, sobolev_norms(&hf).h1),
                (sobolev_norms(&hc).h2, sobolev_norms(&hf).h2),
            ];
            for (c, f) in pairs {
                assert!(((c - f) / f).abs() < 0.02, "{atom:?}: {c} vs {f}");
            }
        }
    }

    #[test]
    fn positivity_is_uniform_along_the_ladder() {
        let g = grid(641);
        let coeff = SingularCoefficient::new(
            Background::Constant { value: 1.5 },
            1.5,
            vec![
                SingularAtom::delta(0.0, 2.0).unwrap(),
                SingularAtom::jump(0.1, 1.0, 0.5, 0.0).unwrap(),
            ],
        )
        .unwrap();
        for &eps in &LADDER {
            assert!(coeff.regularize(eps, &g).unwrap().min() >= 1.5 - 1e-12);
        }
    }
}

//! Uniform 1-D grids, sampled fields and the conservative operator
//! `v -> d/dx (h dv/dx)`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Boundary treatment of a truncated domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Homogeneous Dirichlet: the two end nodes are pinned to zero.
    DirichletZero,
    /// Node `n - 1` is identified with node 0; storage holds `n - 1` values.
    Periodic,
}

/// How the conductivity at the face `i + 1/2` is formed from the two
/// adjacent node values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FaceAverage {
    #[default]
    Arithmetic,
    Harmonic,
}

impl FaceAverage {
    #[inline]
    pub fn combine<T: Scalar>(self, left: T, right: T) -> T {
        match self {
            FaceAverage::Arithmetic => (left + right) * T::lit(0.5),
            FaceAverage::Harmonic => T::lit(2.0) * left * right / (left + right),
        }
    }
}

/// Uniform grid `a = x_0 < x_1 < ... < x_{n-1} = b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    a: T,
    b: T,
    n: usize,
    dx: T,
    boundary: Boundary,
}

impl<T: Scalar> Grid<T> {
    pub const MIN_NODES: usize = 8;

    pub fn new(a: T, b: T, n: usize, boundary: Boundary) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::InvalidGrid(format!(
                "need finite a < b, got a = {a}, b = {b}"
            )));
        }
        if n < Self::MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "need at least {} nodes, got {n}",
                Self::MIN_NODES
            )));
        }
        let dx = (b - a) / T::from_count(n - 1);
        Ok(Self {
            a,
            b,
            n,
            dx,
            boundary,
        })
    }

    #[inline]
    pub fn a(&self) -> T {
        self.a
    }

    #[inline]
    pub fn b(&self) -> T {
        self.b
    }

    /// Number of grid nodes including both endpoints.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.dx
    }

    #[inline]
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    #[inline]
    pub fn length(&self) -> T {
        self.b - self.a
    }

    /// Number of stored values: `n` for Dirichlet, `n - 1` for periodic grids.
    #[inline]
    pub fn storage_len(&self) -> usize {
        match self.boundary {
            Boundary::DirichletZero => self.n,
            Boundary::Periodic => self.n - 1,
        }
    }

    /// Number of cell faces carrying a flux. Equal to `n - 1` for both
    /// boundary kinds; on periodic grids the last face wraps to node 0.
    #[inline]
    pub fn face_count(&self) -> usize {
        self.n - 1
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        self.a + T::from_count(i) * self.dx
    }

    pub fn coordinates(&self) -> Vec<T> {
        (0..self.storage_len()).map(|i| self.x(i)).collect()
    }

    /// Same interval and boundary with the node spacing divided by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.a, self.b, (self.n - 1) * factor + 1, self.boundary)
    }
}

/// Real values sampled on the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Scalar> GridField<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.storage_len() {
            return Err(Error::GridMismatch(
                "value count does not match grid storage",
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        Self {
            values: vec![T::zero(); grid.storage_len()],
            grid,
        }
    }

    pub fn constant(grid: Grid<T>, c: T) -> Self {
        Self {
            values: vec![c; grid.storage_len()],
            grid,
        }
    }

    pub fn from_fn(grid: Grid<T>, f: impl Fn(T) -> T) -> Self {
        let values = (0..grid.storage_len()).map(|i| f(grid.x(i))).collect();
        Self { grid, values }
    }

    /// Builds a field without the finiteness scan. Callers guarantee the
    /// length matches the grid.
    pub(crate) fn from_raw(grid: Grid<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.storage_len());
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `sum_i v_i w_i dx` over the stored values.
    pub fn inner(&self, other: &Self) -> T {
        debug_assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(&v, &w)| v * w)
            .sum::<T>()
            * self.grid.dx
    }

    pub fn l2_norm_sq(&self) -> T {
        self.inner(self)
    }

    pub fn l2_norm(&self) -> T {
        self.l2_norm_sq().sqrt()
    }

    /// `sum_i v_i dx`.
    pub fn integral(&self) -> T {
        self.values.iter().copied().sum::<T>() * self.grid.dx
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// Pins the Dirichlet end values to zero. No-op on periodic grids.
    pub fn enforce_boundary(&mut self) {
        if self.grid.boundary == Boundary::DirichletZero {
            let n = self.values.len();
            self.values[0] = T::zero();
            self.values[n - 1] = T::zero();
        }
    }

    /// Face differences `(v_{i+1} - v_i) / dx`, one per face. Periodic grids
    /// include the wrap face.
    pub fn face_differences(&self) -> Vec<T> {
        let v = &self.values;
        let inv_dx = self.grid.dx.recip();
        match self.grid.boundary {
            Boundary::DirichletZero => v.windows(2).map(|w| (w[1] - w[0]) * inv_dx).collect(),
            Boundary::Periodic => {
                let m = v.len();
                (0..m).map(|i| (v[(i + 1) % m] - v[i]) * inv_dx).collect()
            }
        }
    }

    /// Centered first differences at every stored node. Dirichlet grids use
    /// one-sided differences at the two end nodes.
    pub fn centered_differences(&self) -> Vec<T> {
        let v = &self.values;
        let dx = self.grid.dx;
        let two_dx = dx + dx;
        let m = v.len();
        match self.grid.boundary {
            Boundary::DirichletZero => (0..m)
                .map(|i| {
                    if i == 0 {
                        (v[1] - v[0]) / dx
                    } else if i == m - 1 {
                        (v[m - 1] - v[m - 2]) / dx
                    } else {
                        (v[i + 1] - v[i - 1]) / two_dx
                    }
                })
                .collect(),
            Boundary::Periodic => (0..m)
                .map(|i| (v[(i + 1) % m] - v[(i + m - 1) % m]) / two_dx)
                .collect(),
        }
    }

    /// Second differences `(v_{i+1} - 2 v_i + v_{i-1}) / dx^2`. Dirichlet
    /// grids drop the two boundary rows; periodic grids wrap.
    pub fn second_differences(&self) -> Vec<T> {
        let v = &self.values;
        let inv_dx2 = (self.grid.dx * self.grid.dx).recip();
        let two = T::lit(2.0);
        let m = v.len();
        match self.grid.boundary {
            Boundary::DirichletZero => v
                .windows(3)
                .map(|w| (w[2] - two * w[1] + w[0]) * inv_dx2)
                .collect(),
            Boundary::Periodic => (0..m)
                .map(|i| (v[(i + 1) % m] - two * v[i] + v[(i + m - 1) % m]) * inv_dx2)
                .collect(),
        }
    }
}

/// Discrete divergence-form diffusion operator
/// `(Av)_i = [h_{i+1/2}(v_{i+1} - v_i) - h_{i-1/2}(v_i - v_{i-1})] / dx^2`.
///
/// On Dirichlet grids the end values of `v` are read as zero and the end rows
/// of `Av` are zero, so the operator acts on the interior unknowns only.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionOperator<T> {
    grid: Grid<T>,
    faces: Vec<T>,
}

impl<T: Scalar> DiffusionOperator<T> {
    /// Builds the operator with arithmetic face averaging.
    pub fn build(h: &GridField<T>) -> Result<Self> {
        Self::build_with(h, FaceAverage::Arithmetic)
    }

    pub fn build_with(h: &GridField<T>, averaging: FaceAverage) -> Result<Self> {
        let hv = h.values();
        for (index, &value) in hv.iter().enumerate() {
            if !(value > T::zero()) {
                return Err(Error::Positivity {
                    index,
                    value: value.as_f64(),
                    floor: 0.0,
                });
            }
        }
        Ok(Self {
            grid: *h.grid(),
            faces: face_values(h, averaging),
        })
    }

    /// Operator from explicit face coefficients. Entries must be positive.
    pub fn from_faces(grid: Grid<T>, faces: Vec<T>) -> Result<Self> {
        if faces.len() != grid.face_count() {
            return Err(Error::GridMismatch("face count does not match grid"));
        }
        for (index, &value) in faces.iter().enumerate() {
            if !(value > T::zero()) {
                return Err(Error::Positivity {
                    index,
                    value: value.as_f64(),
                    floor: 0.0,
                });
            }
        }
        Ok(Self { grid, faces })
    }

    /// Skips the positivity check. Used for the difference operator
    /// `d/dx((h - h~) d/dx)` and for degenerate test operators.
    pub(crate) fn from_faces_unchecked(grid: Grid<T>, faces: Vec<T>) -> Self {
        debug_assert_eq!(faces.len(), grid.face_count());
        Self { grid, faces }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn faces(&self) -> &[T] {
        &self.faces
    }

    pub fn min_face(&self) -> T {
        self.faces.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn apply(&self, v: &GridField<T>) -> GridField<T> {
        debug_assert_eq!(v.len(), self.grid.storage_len());
        GridField::from_raw(self.grid, self.apply_slice(v.values()))
    }

    pub(crate) fn apply_slice(&self, v: &[T]) -> Vec<T> {
        let inv_dx2 = (self.grid.dx * self.grid.dx).recip();
        let f = &self.faces;
        let m = v.len();
        let mut out = vec![T::zero(); m];
        match self.grid.boundary {
            Boundary::DirichletZero => {
                let at = |i: usize| {
                    if i == 0 || i == m - 1 {
                        T::zero()
                    } else {
                        v[i]
                    }
                };
                for i in 1..m - 1 {
                    let right = f[i] * (at(i + 1) - at(i));
                    let left = f[i - 1] * (at(i) - at(i - 1));
                    out[i] = (right - left) * inv_dx2;
                }
            }
            Boundary::Periodic => {
                for i in 0..m {
                    let ip = (i + 1) % m;
                    let im = (i + m - 1) % m;
                    let right = f[i] * (v[ip] - v[i]);
                    let left = f[im] * (v[i] - v[im]);
                    out[i] = (right - left) * inv_dx2;
                }
            }
        }
        out
    }

    /// Discrete Dirichlet form `sum_faces h_{i+1/2} ((v_{i+1} - v_i)/dx)^2 dx`,
    /// with Dirichlet end values read as zero.
    pub fn dirichlet_form(&self, v: &GridField<T>) -> T {
        let dx = self.grid.dx;
        let vals = v.values();
        let m = vals.len();
        let mut acc = T::zero();
        match self.grid.boundary {
            Boundary::DirichletZero => {
                let at = |i: usize| {
                    if i == 0 || i == m - 1 {
                        T::zero()
                    } else {
                        vals[i]
                    }
                };
                for (i, &h) in self.faces.iter().enumerate() {
                    let d = (at(i + 1) - at(i)) / dx;
                    acc = acc + h * d * d;
                }
            }
            Boundary::Periodic => {
                for (i, &h) in self.faces.iter().enumerate() {
                    let d = (vals[(i + 1) % m] - vals[i]) / dx;
                    acc = acc + h * d * d;
                }
            }
        }
        acc * dx
    }

    /// Tridiagonal representation `(sub, diag, sup)` of `I - scale * A` on
    /// the unknowns. Dirichlet grids return the interior block; periodic
    /// grids return the cyclic matrix with corner entries `sub[0]` and
    /// `sup[m-1]`.
    pub(crate) fn shifted_bands(&self, scale: T) -> (Vec<T>, Vec<T>, Vec<T>) {
        let c = scale / (self.grid.dx * self.grid.dx);
        let f = &self.faces;
        match self.grid.boundary {
            Boundary::DirichletZero => {
                let m = self.grid.n - 2;
                let mut sub = vec![T::zero(); m];
                let mut diag = vec![T::zero(); m];
                let mut sup = vec![T::zero(); m];
                for k in 0..m {
                    let i = k + 1;
                    diag[k] = T::one() + c * (f[i - 1] + f[i]);
                    if k > 0 {
                        sub[k] = -c * f[i - 1];
                    }
                    if k + 1 < m {
                        sup[k] = -c * f[i];
                    }
                }
                (sub, diag, sup)
            }
            Boundary::Periodic => {
                let m = self.grid.storage_len();
                let mut sub = vec![T::zero(); m];
                let mut diag = vec![T::zero(); m];
                let mut sup = vec![T::zero(); m];
                for i in 0..m {
                    let im = (i + m - 1) % m;
                    diag[i] = T::one() + c * (f[im] + f[i]);
                    sub[i] = -c * f[im];
                    sup[i] = -c * f[i];
                }
                (sub, diag, sup)
            }
        }
    }
}

/// Face coefficients from node values.
pub fn face_values<T: Scalar>(h: &GridField<T>, averaging: FaceAverage) -> Vec<T> {
    let v = h.values();
    match h.grid().boundary() {
        Boundary::DirichletZero => v
            .windows(2)
            .map(|w| averaging.combine(w[0], w[1]))
            .collect(),
        Boundary::Periodic => {
            let m = v.len();
            (0..m)
                .map(|i| averaging.combine(v[i], v[(i + 1) % m]))
                .collect()
        }
    }
}

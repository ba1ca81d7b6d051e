//! Tridiagonal elimination (Thomas algorithm) and its cyclic variant.
//!
//! Row `i` of the system reads `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`.
//! `sub[0]` and `sup[m-1]` are ignored by [`solve`]; [`solve_cyclic`] uses
//! them as the corner entries coupling `x[0]` and `x[m-1]`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves the tridiagonal system in place of `rhs`.
pub fn solve<T: Scalar>(sub: &[T], diag: &[T], sup: &[T], rhs: &mut [T]) -> Result<()> {
    let m = rhs.len();
    debug_assert!(sub.len() == m && diag.len() == m && sup.len() == m);
    if m == 0 {
        return Ok(());
    }
    let mut c = vec![T::zero(); m];
    let mut beta = diag[0];
    if beta == T::zero() {
        return Err(Error::SingularSystem { row: 0 });
    }
    rhs[0] = rhs[0] / beta;
    for i in 1..m {
        c[i - 1] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * c[i - 1];
        if beta == T::zero() || !beta.is_finite() {
            return Err(Error::SingularSystem { row: i });
        }
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
    }
    for i in (0..m - 1).rev() {
        rhs[i] = rhs[i] - c[i] * rhs[i + 1];
    }
    Ok(())
}

/// Solves the cyclic tridiagonal system by a Sherman-Morrison rank-one
/// correction of the open chain. Requires `m >= 3`.
pub fn solve_cyclic<T: Scalar>(sub: &[T], diag: &[T], sup: &[T], rhs: &mut [T]) -> Result<()> {
    let m = rhs.len();
    debug_assert!(m >= 3);
    let alpha = sup[m - 1];
    let beta = sub[0];
    // Any nonzero gamma works; -diag[0] keeps the modified pivot away from zero.
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] = d[0] - gamma;
    d[m - 1] = d[m - 1] - alpha * beta / gamma;

    solve(sub, &d, sup, rhs)?;
    let mut z = vec![T::zero(); m];
    z[0] = gamma;
    z[m - 1] = alpha;
    solve(sub, &d, sup, &mut z)?;

    let denom = T::one() + z[0] + beta * z[m - 1] / gamma;
    if denom == T::zero() {
        return Err(Error::SingularSystem { row: m - 1 });
    }
    let factor = (rhs[0] + beta * rhs[m - 1] / gamma) / denom;
    for (x, zi) in rhs.iter_mut().zip(&z) {
        *x = *x - factor * *zi;
    }
    Ok(())
}

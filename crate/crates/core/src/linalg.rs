// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::inf_norm;

const PIVOT_RTOL: f64 = 1e-13;

/// Solves `A X = B` by LU with partial pivoting, rejecting near-singular `A`.
pub(crate) fn solve(a: DMatrix<f64>, b: &DMatrix<f64>, context: &'static str) -> Result<DMatrix<f64>> {
    assert_eq!(a.nrows(), b.nrows());
    if a.nrows() == 0 {
        return Ok(DMatrix::zeros(0, b.ncols()));
    }
    let scale = inf_norm(&a).max(f64::MIN_POSITIVE);
    let lu = a.lu();
    let min_pivot = lu.u().diagonal().iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    if min_pivot <= PIVOT_RTOL * scale {
        return Err(Error::SingularSystem { context });
    }
    let x = lu.solve(b).ok_or(Error::SingularSystem { context })?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem { context });
    }
    Ok(x)
}

pub(crate) fn solve_vec(a: DMatrix<f64>, b: &DVector<f64>, context: &'static str) -> Result<DVector<f64>> {
    let rhs = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
    let x = solve(a, &rhs, context)?;
    Ok(DVector::from_column_slice(x.as_slice()))
}

/// `M[rows, cols]` as a new dense matrix.
pub(crate) fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// `I - M` for a square matrix.
pub(crate) fn identity_minus(m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::identity(n, n) - m
}

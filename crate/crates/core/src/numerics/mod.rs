//! Dense matrix kernels and generic iterative solvers.
//!
//! Matrices follow the upper-index-is-row convention: entry `(i, j)` of a
//! matrix `‖A‖` is `A^i_j`.

mod decompose;
mod expm;
mod linalg;
mod ode;
mod quadrature;

use nalgebra::DMatrix;

pub use decompose::{decompose_product, decompose_with_homotopy, ordered_product, Decomposition, PathTracker};
pub use expm::{mat_exp, omega_of};
pub use linalg::{echelon_basis, inverse_with_condition, nullspace, numerical_rank, vec_of, RANK_CUTOFF};
pub use ode::ode_solve;
pub use quadrature::{composite_nodes, gauss_legendre, quadrature};

use crate::error::{LieError, Result};

pub(crate) fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub(crate) fn ensure_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(LieError::InvalidInput(format!("expected a non-empty square matrix, got {}×{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

pub(crate) fn ensure_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(LieError::InvalidInput("matrix has non-finite entries".into()));
    }
    Ok(())
}

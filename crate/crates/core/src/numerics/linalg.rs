use nalgebra::{DMatrix, DVector};

use super::one_norm;

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Orthonormal basis of the kernel of a (possibly rectangular) linear map.
pub fn nullspace(map: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let cols = map.ncols();
    if cols == 0 {
        return Vec::new();
    }
    // Thin SVD only yields the full right factor when rows >= cols.
    let padded;
    let m = if map.nrows() < cols {
        padded = map.clone().resize_vertically(cols, 0.0);
        &padded
    } else {
        map
    };
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max();
    let mut basis = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if smax == 0.0 || *s <= RANK_CUTOFF * smax {
            basis.push(v_t.row(k).transpose());
        }
    }
    basis
}

/// Numerical rank with the same relative cutoff as [`nullspace`].
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > RANK_CUTOFF * smax).count()
}

/// Inverse together with its 1-norm condition number, or `None` when the
/// matrix is singular to working precision.
pub fn inverse_with_condition(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, f64)> {
    let inv = m.clone().try_inverse()?;
    if inv.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let cond = one_norm(m) * one_norm(&inv);
    Some((inv, cond))
}

/// Column-stacking of a matrix.
pub fn vec_of(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Reduced row echelon form of the rows of `basis`, used to present
/// kernel bases with as many exact zeros and unit pivots as possible.
pub fn echelon_basis(basis: &[DVector<f64>]) -> Vec<DVector<f64>> {
    if basis.is_empty() {
        return Vec::new();
    }
    let n = basis[0].len();
    let mut rows: Vec<DVector<f64>> = basis.to_vec();
    let mut pivot_row = 0;
    for col in 0..n {
        if pivot_row == rows.len() {
            break;
        }
        let (best, best_val) = (pivot_row..rows.len())
            .map(|r| (r, rows[r][col].abs()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= 1e-12 {
            continue;
        }
        rows.swap(pivot_row, best);
        let p = rows[pivot_row][col];
        rows[pivot_row] /= p;
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row {
                let f = row[col];
                if f != 0.0 {
                    *row -= &pivot * f;
                }
            }
        }
        pivot_row += 1;
    }
    for row in rows.iter_mut() {
        row.apply(|v| {
            if v.abs() < 1e-14 {
                *v = 0.0
            }
        });
    }
    rows
}

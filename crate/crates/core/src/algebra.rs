//! Structure constants, brackets, adjoint matrices, the center and basis
//! changes.
//!
//! Indices are 0-based in code and 1-based in anything shown to users.
//! `C^k_ij` is the coefficient of `e_k` in `[e_i, e_j]`, and the adjoint
//! matrix of `e_k` has entries `(ad e_k)^j_i = C^j_ki`, so that column `i`
//! of `ad e_k` holds the components of `[e_k, e_i]`.

use nalgebra::{DMatrix, DVector};

use crate::error::{LieError, Result, ValidationReport, Violation, ViolationKind};
use crate::numerics::{echelon_basis, nullspace, vec_of};

pub type AlgebraVector = DVector<f64>;

/// Absolute tolerance on each component of the Jacobi cyclic sum.
pub const JACOBI_TOL: f64 = 1e-12;

/// Adjoint entries below this magnitude are treated as exact zeros when
/// deciding which basis vectors are central.
const CENTRAL_SNAP: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(LieError::InvalidInput("algebra dimension must be positive".into()));
        }
        Ok(Self { dim, data: vec![0.0; dim * dim * dim] })
    }

    /// Builds from a flat tensor laid out as `data[(k * n + i) * n + j] = C^k_ij`.
    pub fn from_tensor(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim * dim {
            return Err(LieError::InvalidInput(format!(
                "structure tensor has {} entries, expected {}³",
                data.len(),
                dim
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(LieError::InvalidInput("structure constants must be finite".into()));
        }
        Ok(Self { dim, data })
    }

    /// Builds from `[e_i, e_j] = Σ c e_k` records (0-based), antisymmetrised.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = Self::zeros(dim)?;
        for &(i, j, k, v) in brackets {
            if i >= dim || j >= dim || k >= dim {
                return Err(LieError::InvalidInput(format!("bracket index out of range for dimension {dim}")));
            }
            c.add_bracket(i, j, k, v);
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.dim + i) * self.dim + j
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(k, i, j)]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let id = self.idx(k, i, j);
        self.data[id] = v;
    }

    /// Adds `v e_k` to `[e_i, e_j]` and subtracts it from `[e_j, e_i]`.
    pub fn add_bracket(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let a = self.idx(k, i, j);
        let b = self.idx(k, j, i);
        self.data[a] += v;
        self.data[b] -= v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Checks antisymmetry (exactly, as stored) and the Jacobi identity.
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim;
        let mut report = ValidationReport::default();
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let s = self.get(k, i, j) + self.get(k, j, i);
                    if s != 0.0 {
                        report.push(Violation {
                            kind: ViolationKind::Antisymmetry,
                            indices: [k + 1, i + 1, j + 1],
                            component: None,
                            residual: s,
                        });
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let mut worst = (0, 0.0_f64);
                    for l in 0..n {
                        let mut s = 0.0;
                        for m in 0..n {
                            s += self.get(m, i, j) * self.get(l, m, k)
                                + self.get(m, j, k) * self.get(l, m, i)
                                + self.get(m, k, i) * self.get(l, m, j);
                        }
                        if s.abs() > worst.1.abs() {
                            worst = (l, s);
                        }
                    }
                    if worst.1.abs() > JACOBI_TOL {
                        report.push(Violation {
                            kind: ViolationKind::Jacobi,
                            indices: [i + 1, j + 1, k + 1],
                            component: Some(worst.0 + 1),
                            residual: worst.1,
                        });
                    }
                }
            }
        }
        report
    }
}

/// A validated real Lie algebra in a fixed basis.
///
/// Immutable after construction; every basis change produces a new value.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    constants: StructureConstants,
    labels: Vec<String>,
    /// `None` until [`LieAlgebra::center_adapted`] has run; afterwards the
    /// indices of the central basis vectors, always the highest ones.
    center: Option<Vec<usize>>,
    /// Columns are the current basis vectors expressed in the basis the
    /// algebra was originally loaded in.
    provenance: Option<DMatrix<f64>>,
    ad: Vec<DMatrix<f64>>,
}

impl LieAlgebra {
    pub fn new(constants: StructureConstants, labels: Option<Vec<String>>) -> Result<Self> {
        let n = constants.dim();
        let labels = match labels {
            Some(l) if l.len() == n => l,
            Some(l) => {
                return Err(LieError::InvalidInput(format!("{} labels for a {}-dimensional algebra", l.len(), n)));
            }
            None => (1..=n).map(|i| format!("e{i}")).collect(),
        };
        let report = constants.validate();
        if !report.is_ok() {
            return Err(LieError::Validation(report));
        }
        let ad = (0..n).map(|k| ad_matrix(&constants, k)).collect();
        Ok(Self { constants, labels, center: None, provenance: None, ad })
    }

    pub fn dim(&self) -> usize {
        self.constants.dim()
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn provenance(&self) -> Option<&DMatrix<f64>> {
        self.provenance.as_ref()
    }

    pub fn center_indices(&self) -> Option<&[usize]> {
        self.center.as_deref()
    }

    pub fn is_center_adapted(&self) -> bool {
        self.center.is_some()
    }

    /// Indices outside the center, ascending. Requires a center-adapted algebra.
    pub fn noncentral_indices(&self) -> Result<Vec<usize>> {
        let c = self.center.as_ref().ok_or_else(not_adapted)?;
        Ok((0..self.dim()).filter(|i| !c.contains(i)).collect())
    }

    /// `ad e_k`.
    pub fn ad_basis(&self, k: usize) -> &DMatrix<f64> {
        &self.ad[k]
    }

    /// `ad_v = v^k ad e_k`.
    pub fn ad_of(&self, v: &AlgebraVector) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (k, c) in v.iter().enumerate() {
            if *c != 0.0 {
                m += &self.ad[k] * *c;
            }
        }
        m
    }

    /// `[u, v]^k = C^k_ij u^i v^j`.
    pub fn bracket(&self, u: &AlgebraVector, v: &AlgebraVector) -> AlgebraVector {
        self.ad_of(u) * v
    }

    /// Orthonormal basis of `{x : ad_x = 0}`.
    pub fn center(&self) -> Vec<AlgebraVector> {
        let n = self.dim();
        let mut stacked = DMatrix::zeros(n * n, n);
        for i in 0..n {
            stacked.set_column(i, &vec_of(&self.ad[i]));
        }
        nullspace(&stacked)
    }

    /// Re-expresses the algebra in the basis `f_i = A^j_i e_j` (columns of `a`).
    pub fn change_basis(&self, a: &DMatrix<f64>) -> Result<LieAlgebra> {
        let n = self.dim();
        if a.shape() != (n, n) {
            return Err(LieError::InvalidInput(format!("basis change must be {n}×{n}")));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(LieError::InvalidInput("basis change has non-finite entries".into()));
        }
        let sv = a.clone().singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if smin == 0.0 || smax / smin > 1e12 {
            return Err(LieError::InvalidInput("basis change matrix is singular".into()));
        }
        let a_inv = a
            .clone()
            .try_inverse()
            .ok_or_else(|| LieError::InvalidInput("basis change matrix is singular".into()))?;

        let cols: Vec<AlgebraVector> = (0..n).map(|i| a.column(i).into_owned()).collect();
        let mut c = StructureConstants::zeros(n)?;
        for i in 0..n {
            for j in (i + 1)..n {
                let b = &a_inv * self.bracket(&cols[i], &cols[j]);
                for k in 0..n {
                    c.set(k, i, j, b[k]);
                    c.set(k, j, i, -b[k]);
                }
            }
        }
        let labels = cols
            .iter()
            .enumerate()
            .map(|(i, col)| match unit_index(col) {
                Some(p) => self.labels[p].clone(),
                None => format!("f{}", i + 1),
            })
            .collect();
        let mut out = LieAlgebra::new(c, Some(labels))?;
        out.provenance = Some(match &self.provenance {
            Some(p) => p * a,
            None => a.clone(),
        });
        Ok(out)
    }

    /// Basis change placing a basis of the center at the highest indices.
    ///
    /// When the center is spanned by existing basis vectors this is a
    /// permutation (the identity if they already sit at the top); otherwise
    /// the center basis is taken in reduced echelon form and completed by
    /// the lowest-index standard vectors.
    pub fn center_adapted(&self) -> Result<LieAlgebra> {
        let n = self.dim();
        let center = self.center();
        let c = center.len();

        let central_std: Vec<usize> = (0..n).filter(|&i| self.ad[i].amax() <= CENTRAL_SNAP).collect();
        let mut out = if central_std.len() == c {
            let order: Vec<usize> = (0..n).filter(|i| !central_std.contains(i)).chain(central_std.iter().copied()).collect();
            if order.iter().enumerate().all(|(a, b)| a == *b) {
                self.clone()
            } else {
                let mut perm = DMatrix::zeros(n, n);
                for (new, old) in order.iter().enumerate() {
                    perm[(*old, new)] = 1.0;
                }
                self.change_basis(&perm)?
            }
        } else {
            let z = echelon_basis(&center);
            let comp = complete_with_standard(&z, n);
            let mut a = DMatrix::zeros(n, n);
            for (col, v) in comp.iter().chain(z.iter()).enumerate() {
                a.set_column(col, v);
            }
            self.change_basis(&a)?
        };
        let indices: Vec<usize> = ((n - c)..n).collect();
        out.snap_central(&indices)?;
        out.center = Some(indices);
        Ok(out)
    }

    /// Zeroes roundoff in the brackets of basis vectors known to be central.
    pub(crate) fn snap_central(&mut self, indices: &[usize]) -> Result<()> {
        let n = self.dim();
        for &mu in indices {
            if self.ad[mu].amax() > 1e-9 {
                return Err(LieError::InvalidInput(format!("basis vector {} is not central", mu + 1)));
            }
            for k in 0..n {
                for i in 0..n {
                    self.constants.set(k, mu, i, 0.0);
                    self.constants.set(k, i, mu, 0.0);
                }
            }
        }
        self.ad = (0..n).map(|k| ad_matrix(&self.constants, k)).collect();
        Ok(())
    }

    pub(crate) fn set_center_indices(&mut self, indices: Vec<usize>) {
        self.center = Some(indices);
    }
}

pub(crate) fn not_adapted() -> LieError {
    LieError::InvalidInput("algebra must be center-adapted first".into())
}

fn ad_matrix(c: &StructureConstants, k: usize) -> DMatrix<f64> {
    let n = c.dim();
    DMatrix::from_fn(n, n, |j, i| c.get(j, k, i))
}

fn unit_index(v: &AlgebraVector) -> Option<usize> {
    let nz: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0.0).collect();
    match nz.as_slice() {
        [p] if v[*p] == 1.0 => Some(*p),
        _ => None,
    }
}

/// Lowest-index standard basis vectors completing `span` to a basis.
pub(crate) fn complete_with_standard(span: &[AlgebraVector], n: usize) -> Vec<AlgebraVector> {
    let mut chosen: Vec<AlgebraVector> = span.to_vec();
    let mut out = Vec::new();
    for i in 0..n {
        if chosen.len() == n {
            break;
        }
        let e = DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
        let mut trial = chosen.clone();
        trial.push(e.clone());
        if crate::numerics::numerical_rank(&DMatrix::from_columns(&trial)) == trial.len() {
            chosen.push(e.clone());
            out.push(e);
        }
    }
    out
}

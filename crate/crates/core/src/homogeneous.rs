//! Isotropy subalgebras and the transitive action on right cosets `H\G`.
//!
//! The adapted basis is ordered as
//!
//! ```text
//! [ coset complement | 𝔥 ⊖ (𝔥∩𝔷) | 𝔥∩𝔷 | 𝔷 ⊖ (𝔥∩𝔷) ]
//! ```
//!
//! so the center stays at the top (as composition requires) while central
//! coset directions, which commute past the subgroup factors, are kept as
//! coset coordinates. A point splits as `x = (q, y)` with
//! `g_x = h(y) ḡ_q` and `ḡ_q = Π exp(q^a e_a)` over the coset indices.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{complete_with_standard, AlgebraVector, LieAlgebra};
use crate::composition::compose;
use crate::config::SolverConfig;
use crate::error::{LieError, Result};
use crate::frames::{xi_second, Chart, GroupPoint};
use crate::numerics::{echelon_basis, nullspace, numerical_rank};

/// Closure tolerance for `[𝔥, 𝔥] ⊂ 𝔥`.
pub const CLOSURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Subalgebra {
    span: Vec<AlgebraVector>,
    closure_residual: f64,
}

impl Subalgebra {
    /// Checks linear independence of `span` and closure under the bracket.
    pub fn new(alg: &LieAlgebra, span: Vec<AlgebraVector>) -> Result<Self> {
        let n = alg.dim();
        if span.iter().any(|v| v.len() != n || v.iter().any(|c| !c.is_finite())) {
            return Err(LieError::InvalidSubalgebra(format!("spanning vectors must be finite with {n} components")));
        }
        if span.is_empty() {
            return Ok(Self { span, closure_residual: 0.0 });
        }
        let basis = DMatrix::from_columns(&span);
        if numerical_rank(&basis) < span.len() {
            return Err(LieError::InvalidSubalgebra("spanning vectors are linearly dependent".into()));
        }
        let q = basis.qr().q();
        let mut worst = 0.0f64;
        for i in 0..span.len() {
            for j in (i + 1)..span.len() {
                let b = alg.bracket(&span[i], &span[j]);
                let off = &b - &q * (q.transpose() * &b);
                worst = worst.max(off.norm() / b.norm().max(1.0));
            }
        }
        if worst > CLOSURE_TOL {
            return Err(LieError::InvalidSubalgebra(format!("span is not closed under the bracket (residual {worst:.3e})")));
        }
        Ok(Self { span, closure_residual: worst })
    }

    /// `span{e_i : i ∈ indices}` (0-based).
    pub fn from_indices(alg: &LieAlgebra, indices: &[usize]) -> Result<Self> {
        let n = alg.dim();
        if let Some(i) = indices.iter().find(|&&i| i >= n) {
            return Err(LieError::InvalidSubalgebra(format!("basis index {} out of range 1..{n}", i + 1)));
        }
        Self::new(alg, indices.iter().map(|&i| DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 })).collect())
    }

    pub fn dim(&self) -> usize {
        self.span.len()
    }

    pub fn span(&self) -> &[AlgebraVector] {
        &self.span
    }

    pub fn closure_residual(&self) -> f64 {
        self.closure_residual
    }
}

#[derive(Debug, Clone)]
pub struct HomogeneousModel {
    /// Center-adapted algebra in the adapted basis.
    pub adapted: LieAlgebra,
    /// Coset dimension.
    pub m: usize,
    /// Adapted indices carrying the coset coordinates `q`, ascending.
    pub coset_indices: Vec<usize>,
    /// Adapted indices spanning `𝔥`, ascending.
    pub subgroup_indices: Vec<usize>,
    /// Columns are the adapted basis vectors in the original basis.
    pub transform: DMatrix<f64>,
}

/// Result of `ḡ_q g_z = h(q, z) ḡ_Ψ(q, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosetAction {
    pub psi: DVector<f64>,
    pub factor: DVector<f64>,
    pub residual: f64,
}

/// Vectors from `candidates`, in order, that extend `base` independently.
fn extend_independent(base: &[AlgebraVector], candidates: &[AlgebraVector], want: usize) -> Vec<AlgebraVector> {
    let mut chosen = base.to_vec();
    let mut out = Vec::new();
    for c in candidates {
        if out.len() == want {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(c.clone());
        if numerical_rank(&DMatrix::from_columns(&trial)) == trial.len() {
            chosen.push(c.clone());
            out.push(c.clone());
        }
    }
    out
}

fn unit(n: usize, i: usize) -> AlgebraVector {
    DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 })
}

/// Builds the adapted basis for the coset space of `h`.
pub fn adapted_basis(alg: &LieAlgebra, h: &Subalgebra) -> Result<HomogeneousModel> {
    let n = alg.dim();
    if h.dim() >= n {
        return Err(LieError::InvalidSubalgebra("isotropy subalgebra must be proper".into()));
    }
    if h.span.iter().any(|v| v.len() != n) {
        return Err(LieError::InvalidSubalgebra("subalgebra belongs to an algebra of another dimension".into()));
    }
    let center = alg.center();

    // 𝔥∩𝔷 from the kernel of [H | −Z].
    let h_cap_z = if h.dim() == 0 || center.is_empty() {
        Vec::new()
    } else {
        let mut cols: Vec<AlgebraVector> = h.span.clone();
        cols.extend(center.iter().map(|v| -v));
        let ker = nullspace(&DMatrix::from_columns(&cols));
        let hm = DMatrix::from_columns(&h.span);
        let raw: Vec<AlgebraVector> = ker.iter().map(|k| &hm * k.rows(0, h.dim())).collect();
        echelon_basis(&raw)
    };
    let h_rest = extend_independent(&h_cap_z, &h.span, h.dim() - h_cap_z.len());

    let mut central_candidates: Vec<AlgebraVector> =
        (0..n).filter(|&i| alg.ad_basis(i).amax() == 0.0).map(|i| unit(n, i)).collect();
    central_candidates.extend(echelon_basis(&center));
    let z_rest = extend_independent(&h_cap_z, &central_candidates, center.len() - h_cap_z.len());

    let mut h_plus_z = h.span.clone();
    h_plus_z.extend(z_rest.iter().cloned());
    let coset = complete_with_standard(&h_plus_z, n);

    let blocks = [&coset, &h_rest, &h_cap_z, &z_rest];
    let cols: Vec<AlgebraVector> = blocks.iter().flat_map(|b| b.iter().cloned()).collect();
    if cols.len() != n {
        return Err(LieError::InvalidSubalgebra("could not complete the subalgebra to an adapted basis".into()));
    }
    let transform = DMatrix::from_columns(&cols);
    let mut adapted = if transform == DMatrix::identity(n, n) { alg.clone() } else { alg.change_basis(&transform)? };

    let (p, hr, hz) = (coset.len(), h_rest.len(), h_cap_z.len());
    let central: Vec<usize> = ((p + hr)..n).collect();
    adapted.snap_central(&central)?;
    adapted.set_center_indices(central);
    let coset_indices: Vec<usize> = (0..p).chain((p + hr + hz)..n).collect();
    let subgroup_indices: Vec<usize> = (p..(p + hr + hz)).collect();
    Ok(HomogeneousModel { adapted, m: coset_indices.len(), coset_indices, subgroup_indices, transform })
}

impl HomogeneousModel {
    /// Full adapted coordinates of `(q, y = 0)`.
    pub fn coset_point(&self, q: &DVector<f64>) -> Result<GroupPoint> {
        if q.len() != self.m || q.iter().any(|v| !v.is_finite()) {
            return Err(LieError::InvalidInput(format!("coset point must have {} finite coordinates", self.m)));
        }
        let mut x = DVector::zeros(self.adapted.dim());
        for (a, &i) in self.coset_indices.iter().enumerate() {
            x[i] = q[a];
        }
        Ok(GroupPoint::new(Chart::Second, x))
    }
}

/// Components `X_i^a(q)` of the generators of the action, one column per
/// basis vector `e_i` of the original algebra.
pub fn generators(model: &HomogeneousModel, q: &DVector<f64>, cfg: &SolverConfig) -> Result<DMatrix<f64>> {
    cfg.validate()?;
    let x = model.coset_point(q)?;
    let xi = xi_second(&model.adapted, &x.coords)?;
    let inv = model
        .transform
        .clone()
        .try_inverse()
        .ok_or_else(|| LieError::InvalidInput("adapted basis transform is singular".into()))?;
    let xi_orig = xi * inv;
    Ok(xi_orig.select_rows(model.coset_indices.iter()))
}

/// `Ψ(q, z)` and the subgroup factor, with `z` in adapted second-chart
/// coordinates.
pub fn action(model: &HomogeneousModel, q: &DVector<f64>, z: &GroupPoint, cfg: &SolverConfig) -> Result<CosetAction> {
    let x = model.coset_point(q)?;
    let r = compose(&model.adapted, &x, z, cfg)?;
    Ok(CosetAction {
        psi: r.z.coords.select_rows(model.coset_indices.iter()),
        factor: r.z.coords.select_rows(model.subgroup_indices.iter()),
        residual: r.residual,
    })
}

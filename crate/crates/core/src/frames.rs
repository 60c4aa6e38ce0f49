//! Adjoint matrices, invariant 1-forms and invariant vector fields in
//! canonical coordinates.
//!
//! The second chart is `g_x = exp(x^n e_n) ··· exp(x^1 e_1)`: descending
//! index, leftmost factor = highest index. In it the left-invariant forms
//! have the closed column formula
//!
//! ```text
//! ω^i_k(x) = ‖exp(−x^1 ad e_1) ··· exp(−x^{k−1} ad e_{k−1})‖^i_k
//! ```
//!
//! and everything else follows by products and inversions:
//! `σ = −Ad_{g_x} ω`, `ξ = ω⁻¹`, `η = σ⁻¹`. Column `i` of `xi` (resp. `eta`)
//! holds the components of the field `ξ_i` (resp. `η_i`); right-invariant
//! objects carry the sign `η_i = −(R_{g_x})_* e_i`.

use nalgebra::{DMatrix, DVector};

use crate::algebra::LieAlgebra;
use crate::error::{LieError, Result};
use crate::numerics::{inverse_with_condition, mat_exp, omega_of};

/// Condition number of `ω` beyond which a point is outside the chart.
pub const MAX_FRAME_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// `g = exp(Σ x^i e_i)`.
    First,
    /// `g = exp(x^n e_n) ··· exp(x^1 e_1)`.
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint {
    pub chart: Chart,
    pub coords: DVector<f64>,
}

impl GroupPoint {
    pub fn new(chart: Chart, coords: DVector<f64>) -> Self {
        Self { chart, coords }
    }

    pub fn second(coords: &[f64]) -> Self {
        Self::new(Chart::Second, DVector::from_row_slice(coords))
    }

    pub fn first(coords: &[f64]) -> Self {
        Self::new(Chart::First, DVector::from_row_slice(coords))
    }

    pub fn origin(chart: Chart, dim: usize) -> Self {
        Self::new(chart, DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub(crate) fn check(&self, alg: &LieAlgebra, chart: Chart) -> Result<()> {
        if self.chart != chart {
            return Err(LieError::InvalidInput(format!("expected a point in the {chart:?} chart, got {:?}", self.chart)));
        }
        if self.dim() != alg.dim() {
            return Err(LieError::InvalidInput(format!(
                "point has {} coordinates for a {}-dimensional algebra",
                self.dim(),
                alg.dim()
            )));
        }
        if self.coords.iter().any(|v| !v.is_finite()) {
            return Err(LieError::InvalidInput("point has non-finite coordinates".into()));
        }
        Ok(())
    }
}

/// Invariant forms and fields at one point of the second chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub omega: DMatrix<f64>,
    pub xi: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
    pub eta: DMatrix<f64>,
    pub ad_point: DMatrix<f64>,
}

/// `Ad_{g_x} = exp(x^n ad e_n) ··· exp(x^1 ad e_1)`.
pub fn adjoint_at(alg: &LieAlgebra, p: &GroupPoint) -> Result<DMatrix<f64>> {
    p.check(alg, Chart::Second)?;
    adjoint_coords(alg, &p.coords)
}

pub(crate) fn adjoint_coords(alg: &LieAlgebra, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = alg.dim();
    let mut m = DMatrix::identity(n, n);
    for k in (0..n).rev() {
        if x[k] != 0.0 {
            let g = alg.ad_basis(k);
            if g.amax() != 0.0 {
                m *= mat_exp(&(g * x[k]))?;
            }
        }
    }
    Ok(m)
}

/// `ω(x)` in the second chart, column by column from the prefix products.
pub(crate) fn omega_second(alg: &LieAlgebra, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = alg.dim();
    let mut omega = DMatrix::zeros(n, n);
    let mut prefix = DMatrix::<f64>::identity(n, n);
    for k in 0..n {
        omega.set_column(k, &prefix.column(k));
        if k + 1 < n && x[k] != 0.0 {
            let g = alg.ad_basis(k);
            if g.amax() != 0.0 {
                prefix *= mat_exp(&(g * -x[k]))?;
            }
        }
    }
    Ok(omega)
}

/// `ξ(x) = ω(x)⁻¹`, failing with a chart exit when `ω` is ill-conditioned.
pub(crate) fn xi_second(alg: &LieAlgebra, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    invert_frame(&omega_second(alg, x)?, x)
}

fn invert_frame(m: &DMatrix<f64>, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    match inverse_with_condition(m) {
        Some((inv, cond)) if cond <= MAX_FRAME_CONDITION => Ok(inv),
        _ => Err(LieError::ChartExit(format!("invariant frame is singular at x = {:?}", x.as_slice()))),
    }
}

/// All four component matrices and `Ad_{g_x}` at a point of the second chart.
pub fn frame_second(alg: &LieAlgebra, p: &GroupPoint) -> Result<Frame> {
    p.check(alg, Chart::Second)?;
    let x = &p.coords;
    let omega = omega_second(alg, x)?;
    let ad_point = adjoint_coords(alg, x)?;
    let sigma = -(&ad_point * &omega);
    let xi = invert_frame(&omega, x)?;
    let eta = invert_frame(&sigma, x)?;
    Ok(Frame { omega, xi, sigma, eta, ad_point })
}

/// Left-invariant 1-forms in the first chart, `‖ω(x)‖ = Ω(ad_x)`.
pub fn omega_first(alg: &LieAlgebra, p: &GroupPoint) -> Result<DMatrix<f64>> {
    p.check(alg, Chart::First)?;
    omega_of(&alg.ad_of(&p.coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::StructureConstants;

    fn heisenberg() -> LieAlgebra {
        LieAlgebra::new(StructureConstants::from_brackets(3, &[(0, 1, 2, 1.0)]).unwrap(), None).unwrap()
    }

    #[test]
    fn origin_frame() {
        let h = heisenberg();
        let f = frame_second(&h, &GroupPoint::origin(Chart::Second, 3)).unwrap();
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(f.omega, id);
        assert_eq!(f.xi, id);
        assert_eq!(f.sigma, -&id);
        assert_eq!(f.eta, -&id);
        assert_eq!(f.ad_point, id);
    }

    #[test]
    fn abelian_frames_are_trivial() {
        let a = LieAlgebra::new(StructureConstants::zeros(3).unwrap(), None).unwrap();
        let f = frame_second(&a, &GroupPoint::second(&[0.4, -2.0, 7.0])).unwrap();
        assert_eq!(f.omega, DMatrix::identity(3, 3));
        assert_eq!(f.xi, DMatrix::identity(3, 3));
    }

    #[test]
    fn heisenberg_frame_closed_form() {
        let h = heisenberg();
        let a = 0.8;
        let f = frame_second(&h, &GroupPoint::second(&[a, -0.3, 1.1])).unwrap();
        let mut omega = DMatrix::<f64>::identity(3, 3);
        omega[(2, 1)] = -a;
        assert!((&f.omega - omega).amax() < 1e-15);
        assert!((f.xi.column(1) - DVector::from_row_slice(&[0.0, 1.0, a])).amax() < 1e-15);
    }

    #[test]
    fn heisenberg_adjoint_factorwise() {
        let h = heisenberg();
        let x = [0.3, -0.7, 2.0];
        let ad = adjoint_at(&h, &GroupPoint::second(&x)).unwrap();
        // exp(x² ad e2) exp(x¹ ad e1), each I + nilpotent
        let mut e2 = DMatrix::<f64>::identity(3, 3);
        e2[(2, 0)] = -x[1];
        let mut e1 = DMatrix::<f64>::identity(3, 3);
        e1[(2, 1)] = x[0];
        assert!((ad - e2 * e1).amax() < 1e-15);
    }

    #[test]
    fn heisenberg_first_chart_omega() {
        let h = heisenberg();
        let x = DVector::from_row_slice(&[0.6, -1.3, 0.2]);
        let w = omega_first(&h, &GroupPoint::new(Chart::First, x.clone())).unwrap();
        let expected = DMatrix::<f64>::identity(3, 3) - h.ad_of(&x) * 0.5;
        assert!((w - expected).amax() < 1e-15);
    }

    #[test]
    fn wrong_chart_or_dimension_rejected() {
        let h = heisenberg();
        assert!(frame_second(&h, &GroupPoint::first(&[0.0, 0.0, 0.0])).is_err());
        assert!(adjoint_at(&h, &GroupPoint::second(&[0.0, 0.0])).is_err());
        assert!(omega_first(&h, &GroupPoint::second(&[0.0, 0.0, 0.0])).is_err());
    }
}

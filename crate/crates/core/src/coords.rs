//! Transitions between first and second canonical coordinates.
//!
//! `x = X(y)` is defined by `exp(y^i e_i) = g_x`. The non-central part
//! follows from `exp(ad_y) = Ad_{g_x}`, the central part by quadrature of
//! `x^μ = ∫₀¹ y^i ξ^μ_i(X(ty)) dt` along the one-parameter subgroup.

use nalgebra::DVector;

use crate::algebra::{AlgebraVector, LieAlgebra};
use crate::composition::Quotient;
use crate::config::SolverConfig;
use crate::error::{LieError, Result};
use crate::frames::{adjoint_coords, xi_second, Chart, GroupPoint};
use crate::numerics::{composite_nodes, decompose_with_homotopy, mat_exp, ode_solve, omega_of, PathTracker};

/// Required accuracy of `X(y) = x` when inverting the transition.
pub const TO_FIRST_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionResult {
    pub point: GroupPoint,
    pub residual: f64,
}

fn outside_chart(e: LieError) -> LieError {
    if e.is_numerical() {
        LieError::ChartExit(format!("point is outside the chart: {e}"))
    } else {
        e
    }
}

/// Second-chart coordinates of `exp(y^i e_i)`.
pub fn to_second(alg: &LieAlgebra, y: &GroupPoint, cfg: &SolverConfig) -> Result<TransitionResult> {
    cfg.validate()?;
    y.check(alg, Chart::First)?;
    let q = Quotient::new(alg)?;
    to_second_inner(&q, &y.coords, cfg).map_err(outside_chart)
}

fn to_second_inner(q: &Quotient<'_>, y: &DVector<f64>, cfg: &SolverConfig) -> Result<TransitionResult> {
    let alg = q.alg;
    let n = alg.dim();
    if y.amax() == 0.0 {
        return Ok(TransitionResult { point: GroupPoint::origin(Chart::Second, n), residual: 0.0 });
    }
    let ad_y = alg.ad_of(y);
    let guess = match trajectory(alg, y, &cfg.coarse()) {
        Ok(x) => q.project(&x),
        Err(_) => q.project(y),
    };
    let zero = DVector::zeros(q.noncentral.len());
    let dec = decompose_with_homotopy(|s| mat_exp(&(&ad_y * s)), &zero, &q.generators, cfg, Some(&guess))?;

    let mut x = q.embed(&dec.coeffs);
    let mut residual = dec.residual;
    if !q.central.is_empty() {
        let target = |t: &DVector<f64>| mat_exp(&(&ad_y * t[0]));
        let mut tracker = PathTracker::new(target, &q.generators, cfg, DVector::zeros(1), zero);
        let mut central = DVector::zeros(q.central.len());
        for (t, w) in composite_nodes(cfg) {
            let bar = tracker.advance(&DVector::from_element(1, t))?.clone();
            let v = xi_second(alg, &q.embed(&bar))? * y;
            for (k, &mu) in q.central.iter().enumerate() {
                central[k] += w * v[mu];
            }
        }
        residual = residual.max(tracker.max_residual);
        for (k, &mu) in q.central.iter().enumerate() {
            x[mu] = central[k];
        }
    }
    Ok(TransitionResult { point: GroupPoint::new(Chart::Second, x), residual })
}

/// `X(y)` as the endpoint of the trajectory `dx/dt = y^i ξ_i(x)`, `x(0) = 0`.
///
/// Independent of [`to_second`]; the reported residual is the relative
/// defect of `exp(ad_y) = Ad_{g_x}`.
pub fn to_second_ode(alg: &LieAlgebra, y: &GroupPoint, cfg: &SolverConfig) -> Result<TransitionResult> {
    cfg.validate()?;
    y.check(alg, Chart::First)?;
    let x = trajectory(alg, &y.coords, cfg)?;
    let target = mat_exp(&alg.ad_of(&y.coords))?;
    let residual = (adjoint_coords(alg, &x)? - &target).norm() / target.norm().max(1.0);
    Ok(TransitionResult { point: GroupPoint::new(Chart::Second, x), residual })
}

fn trajectory(alg: &LieAlgebra, y: &DVector<f64>, cfg: &SolverConfig) -> Result<DVector<f64>> {
    ode_solve(|_, x| Ok(xi_second(alg, x)? * y), &DVector::zeros(alg.dim()), 1.0, cfg)
}

/// First-chart coordinates of `g_x`, by damped Newton on `X(y) = x` from
/// `y = x` with the exact Jacobian `∂X/∂y = ξ(X(y)) Ω(ad_y)`.
pub fn to_first(alg: &LieAlgebra, x: &GroupPoint, cfg: &SolverConfig) -> Result<TransitionResult> {
    cfg.validate()?;
    x.check(alg, Chart::Second)?;
    let q = Quotient::new(alg)?;
    let target = &x.coords;
    let eval = |y: &DVector<f64>| to_second_inner(&q, y, cfg).map(|r| r.point.coords - target);

    let mut y = target.clone();
    let mut r = eval(&y).map_err(outside_chart)?;
    for _ in 0..cfg.max_iter {
        if r.norm() <= 1e-14 * target.norm().max(1.0) {
            break;
        }
        let jac = xi_second(alg, &(&r + target)).map_err(outside_chart)? * omega_of(&alg.ad_of(&y))?;
        let Some(step) = jac.lu().solve(&r) else { break };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-4 {
            let trial = &y - &step * lambda;
            if let Ok(rt) = eval(&trial) {
                if rt.norm() < r.norm() {
                    y = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let residual = r.norm();
    if residual > TO_FIRST_TOL {
        return Err(LieError::ChartExit(format!("inversion of the coordinate transition stalled at {residual:.3e}")));
    }
    Ok(TransitionResult { point: GroupPoint::new(Chart::First, y), residual })
}

/// `α(t) = X(t y)`, the one-parameter subgroup through `y` in the second chart.
pub fn one_param_point(alg: &LieAlgebra, y: &AlgebraVector, t: f64, cfg: &SolverConfig) -> Result<GroupPoint> {
    if !t.is_finite() {
        return Err(LieError::InvalidInput("trajectory parameter must be finite".into()));
    }
    to_second(alg, &GroupPoint::new(Chart::First, y * t), cfg).map(|r| r.point)
}

//! The composition function `Φ(x, y)` in the second chart.
//!
//! With the center `𝔷` at the top indices and a complement `𝔭` below it,
//! the non-central components `Φ̄^a` are the unique local solution of
//!
//! ```text
//! Π exp(x^a ad e_a) · Π exp(y^b ad e_b) = Π exp(Φ̄^a ad e_a)
//! ```
//!
//! (`Ad` is faithful on the quotient by the center), and the central ones
//! are `Φ^μ = x^μ + y^μ + Θ^μ(x, y)` with
//!
//! ```text
//! Θ^μ(x, y) = ∫ ξ^μ_j(Φ̄(x, z)) ω^j_a(z) dz^a
//! ```
//!
//! along any path from `0` to `y`. Two independent routes are provided as
//! oracles: integrating the left-invariance ODE, and multiplying in a
//! user-supplied faithful matrix representation.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::algebra::{not_adapted, LieAlgebra};
use crate::config::SolverConfig;
use crate::error::{LieError, Result};
use crate::frames::{adjoint_coords, omega_second, xi_second, Chart, GroupPoint};
use crate::numerics::{
    composite_nodes, decompose_with_homotopy, mat_exp, numerical_rank, ode_solve, vec_of, PathTracker,
};

/// Required accuracy of `Φ(x, κ(x)) = 0` for the inverse element.
pub const INVERSE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositionMethod {
    AdjointQuadrature,
    Ode,
    Representation,
}

impl fmt::Display for CompositionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompositionMethod::AdjointQuadrature => "adjoint-quadrature",
            CompositionMethod::Ode => "ode",
            CompositionMethod::Representation => "representation",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositionResult {
    pub z: GroupPoint,
    pub method: CompositionMethod,
    /// Adjoint route: worst relative decomposition residual along the way.
    /// ODE route: relative defect of `Ad_{g_z} = Ad_{g_x} Ad_{g_y}`.
    /// Representation route: relative decomposition residual.
    pub residual: f64,
}

/// The split `𝔤 = 𝔭 ⊕ 𝔷` of a center-adapted algebra.
pub(crate) struct Quotient<'a> {
    pub alg: &'a LieAlgebra,
    pub noncentral: Vec<usize>,
    pub central: Vec<usize>,
    pub generators: Vec<DMatrix<f64>>,
}

impl<'a> Quotient<'a> {
    pub fn new(alg: &'a LieAlgebra) -> Result<Self> {
        let central = alg.center_indices().ok_or_else(not_adapted)?.to_vec();
        let noncentral = alg.noncentral_indices()?;
        let generators = noncentral.iter().map(|&a| alg.ad_basis(a).clone()).collect();
        Ok(Self { alg, noncentral, central, generators })
    }

    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.noncentral.len(), self.noncentral.iter().map(|&a| x[a]))
    }

    pub fn embed(&self, bar: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.alg.dim());
        for (k, &a) in self.noncentral.iter().enumerate() {
            x[a] = bar[k];
        }
        x
    }

    /// Zeroes the central components.
    pub fn strip_center(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = v.clone();
        for &mu in &self.central {
            out[mu] = 0.0;
        }
        out
    }
}

fn undefined(e: LieError) -> LieError {
    if e.is_numerical() {
        LieError::CompositionUndefined(e.to_string())
    } else {
        e
    }
}

/// `Φ(x, y)` by product decomposition of adjoint matrices plus the
/// quadrature for the central components.
pub fn compose(alg: &LieAlgebra, x: &GroupPoint, y: &GroupPoint, cfg: &SolverConfig) -> Result<CompositionResult> {
    cfg.validate()?;
    x.check(alg, Chart::Second)?;
    y.check(alg, Chart::Second)?;
    let q = Quotient::new(alg)?;
    compose_inner(&q, &x.coords, &y.coords, cfg).map_err(undefined)
}

fn compose_inner(q: &Quotient<'_>, x: &DVector<f64>, y: &DVector<f64>, cfg: &SolverConfig) -> Result<CompositionResult> {
    let alg = q.alg;
    let ad_x = adjoint_coords(alg, x)?;
    let x_bar = q.project(x);

    let guess = match compose_ode_coords(alg, x, y, &cfg.coarse()) {
        Ok(z) => q.project(&z),
        Err(_) => &x_bar + q.project(y),
    };
    let path = |s: f64| Ok(&ad_x * adjoint_coords(alg, &(y * s))?);
    let dec = decompose_with_homotopy(path, &x_bar, &q.generators, cfg, Some(&guess))?;

    let mut z = q.embed(&dec.coeffs);
    let mut residual = dec.residual;
    if !q.central.is_empty() {
        let (theta, worst) = theta_polyline(q, x, &[DVector::zeros(alg.dim()), y.clone()], cfg)?;
        residual = residual.max(worst);
        for (k, &mu) in q.central.iter().enumerate() {
            z[mu] = x[mu] + y[mu] + theta[k];
        }
    }
    Ok(CompositionResult { z: GroupPoint::new(Chart::Second, z), method: CompositionMethod::AdjointQuadrature, residual })
}

/// Central part `Θ^μ(x, y)` along the straight path `z(t) = t y`, in the
/// order of the algebra's center indices.
pub fn theta(alg: &LieAlgebra, x: &GroupPoint, y: &GroupPoint, cfg: &SolverConfig) -> Result<DVector<f64>> {
    y.check(alg, Chart::Second)?;
    theta_along_path(alg, x, &[DVector::zeros(alg.dim()), y.coords.clone()], cfg)
}

/// `Θ^μ(x, ·)` integrated along the polygonal path through `vertices`,
/// which must start at the origin.
pub fn theta_along_path(alg: &LieAlgebra, x: &GroupPoint, vertices: &[DVector<f64>], cfg: &SolverConfig) -> Result<DVector<f64>> {
    cfg.validate()?;
    x.check(alg, Chart::Second)?;
    let q = Quotient::new(alg)?;
    match vertices.first() {
        Some(v0) if v0.len() == alg.dim() && v0.amax() == 0.0 => {}
        _ => return Err(LieError::InvalidInput("path must start at the origin".into())),
    }
    if vertices.iter().any(|v| v.len() != alg.dim() || v.iter().any(|c| !c.is_finite())) {
        return Err(LieError::InvalidInput("path vertices must be finite points of the algebra".into()));
    }
    theta_polyline(&q, &x.coords, vertices, cfg).map(|(t, _)| t)
}

fn theta_polyline(q: &Quotient<'_>, x: &DVector<f64>, vertices: &[DVector<f64>], cfg: &SolverConfig) -> Result<(DVector<f64>, f64)> {
    let alg = q.alg;
    let mut total = DVector::zeros(q.central.len());
    if q.central.is_empty() || vertices.len() < 2 {
        return Ok((total, 0.0));
    }
    let ad_x = adjoint_coords(alg, x)?;
    let target = |z: &DVector<f64>| Ok(&ad_x * adjoint_coords(alg, z)?);
    let mut tracker = PathTracker::new(target, &q.generators, cfg, vertices[0].clone(), q.project(x));
    let nodes = composite_nodes(cfg);
    for seg in vertices.windows(2) {
        let (from, to) = (&seg[0], &seg[1]);
        let delta = to - from;
        if delta.amax() == 0.0 {
            continue;
        }
        let delta_p = q.strip_center(&delta);
        for &(t, w) in &nodes {
            let z = from + &delta * t;
            let phi_bar = tracker.advance(&z)?.clone();
            let xi = xi_second(alg, &q.embed(&phi_bar))?;
            let v = xi * (omega_second(alg, &z)? * &delta_p);
            for (k, &mu) in q.central.iter().enumerate() {
                total[k] += w * v[mu];
            }
        }
    }
    Ok((total, tracker.max_residual))
}

/// `Φ(x, y)` by integrating `dΦ/dt = ξ(Φ) ω(t y) y` from `Φ(0) = x`.
pub fn compose_ode(alg: &LieAlgebra, x: &GroupPoint, y: &GroupPoint, cfg: &SolverConfig) -> Result<CompositionResult> {
    cfg.validate()?;
    x.check(alg, Chart::Second)?;
    y.check(alg, Chart::Second)?;
    let z = compose_ode_coords(alg, &x.coords, &y.coords, cfg)?;
    let lhs = adjoint_coords(alg, &z)?;
    let rhs = adjoint_coords(alg, &x.coords)? * adjoint_coords(alg, &y.coords)?;
    let residual = (lhs - &rhs).norm() / rhs.norm().max(1.0);
    Ok(CompositionResult { z: GroupPoint::new(Chart::Second, z), method: CompositionMethod::Ode, residual })
}

pub(crate) fn compose_ode_coords(alg: &LieAlgebra, x: &DVector<f64>, y: &DVector<f64>, cfg: &SolverConfig) -> Result<DVector<f64>> {
    let field = |t: f64, phi: &DVector<f64>| -> Result<DVector<f64>> {
        let w = omega_second(alg, &(y * t))? * y;
        Ok(xi_second(alg, phi)? * w)
    };
    ode_solve(field, x, 1.0, cfg)
}

/// A faithful matrix representation `τ: 𝔤 → Mat_m(ℝ)` given by the images
/// of the basis vectors.
#[derive(Debug, Clone)]
pub struct MatrixRepresentation {
    images: Vec<DMatrix<f64>>,
}

impl MatrixRepresentation {
    /// Checks the homomorphism property (within `1e-12`) and faithfulness.
    pub fn new(alg: &LieAlgebra, images: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = alg.dim();
        if images.len() != n {
            return Err(LieError::InvalidInput(format!("{} images for a {n}-dimensional algebra", images.len())));
        }
        let m = images[0].nrows();
        if m == 0 || images.iter().any(|t| t.shape() != (m, m) || t.iter().any(|v| !v.is_finite())) {
            return Err(LieError::InvalidInput("representation images must be finite square matrices of one size".into()));
        }
        let c = alg.constants();
        for i in 0..n {
            for j in (i + 1)..n {
                let mut lhs = DMatrix::zeros(m, m);
                for (k, img) in images.iter().enumerate() {
                    lhs += img * c.get(k, i, j);
                }
                let rhs = &images[i] * &images[j] - &images[j] * &images[i];
                let err = (lhs - rhs).amax();
                if err > 1e-12 {
                    return Err(LieError::InvalidInput(format!(
                        "representation is not a homomorphism on [e{}, e{}] (error {err:.3e})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let stacked = DMatrix::from_columns(&images.iter().map(vec_of).collect::<Vec<_>>());
        if numerical_rank(&stacked) < n {
            return Err(LieError::InvalidInput("representation is not faithful".into()));
        }
        Ok(Self { images })
    }

    pub fn dim(&self) -> usize {
        self.images[0].nrows()
    }

    pub fn images(&self) -> &[DMatrix<f64>] {
        &self.images
    }

    /// `exp(x^n τ(e_n)) ··· exp(x^1 τ(e_1))`.
    pub fn group_element(&self, coords: &DVector<f64>) -> Result<DMatrix<f64>> {
        let m = self.dim();
        let mut g = DMatrix::identity(m, m);
        for (img, c) in self.images.iter().zip(coords.iter()).rev() {
            if *c != 0.0 {
                g *= mat_exp(&(img * *c))?;
            }
        }
        Ok(g)
    }
}

/// `Φ(x, y)` by decomposing `T(g_x) T(g_y)` in a faithful representation.
pub fn compose_via_rep(
    rep: &MatrixRepresentation,
    alg: &LieAlgebra,
    x: &GroupPoint,
    y: &GroupPoint,
    cfg: &SolverConfig,
) -> Result<CompositionResult> {
    cfg.validate()?;
    x.check(alg, Chart::Second)?;
    y.check(alg, Chart::Second)?;
    if rep.images.len() != alg.dim() {
        return Err(LieError::InvalidInput("representation does not match the algebra".into()));
    }
    let tx = rep.group_element(&x.coords)?;
    let path = |s: f64| Ok(&tx * rep.group_element(&(&y.coords * s))?);
    let guess = &x.coords + &y.coords;
    let dec = decompose_with_homotopy(path, &x.coords, &rep.images, cfg, Some(&guess))?;
    Ok(CompositionResult {
        z: GroupPoint::new(Chart::Second, dec.coeffs),
        method: CompositionMethod::Representation,
        residual: dec.residual,
    })
}

/// Coordinates `κ(x)` of `g_x⁻¹`, by Newton's method on `Φ(x, κ) = 0`
/// with the exact Jacobian `∂Φ/∂y = ξ(Φ) ω(y)`.
pub fn inverse_point(alg: &LieAlgebra, x: &GroupPoint, cfg: &SolverConfig) -> Result<GroupPoint> {
    cfg.validate()?;
    x.check(alg, Chart::Second)?;
    let q = Quotient::new(alg)?;
    let xc = &x.coords;
    let eval = |k: &DVector<f64>| compose_inner(&q, xc, k, cfg).map(|r| r.z.coords);
    let as_chart_exit = |e: LieError| if e.is_numerical() { LieError::ChartExit(e.to_string()) } else { e };

    let mut kappa = -xc;
    let mut r = eval(&kappa).map_err(as_chart_exit)?;
    for _ in 0..cfg.max_iter {
        if r.norm() <= 1e-13 {
            break;
        }
        let jac = xi_second(alg, &r)? * omega_second(alg, &kappa)?;
        let Some(step) = jac.lu().solve(&r) else { break };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-4 {
            let trial = &kappa - &step * lambda;
            if let Ok(rt) = eval(&trial) {
                if rt.norm() < r.norm() {
                    kappa = trial;
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
    if r.norm() > INVERSE_TOL {
        return Err(LieError::ChartExit(format!("inverse did not converge (|Φ(x, κ)| = {:.3e})", r.norm())));
    }
    let left = eval_left(&q, &kappa, xc, cfg).map_err(as_chart_exit)?;
    if left.norm() > INVERSE_TOL {
        return Err(LieError::ChartExit(format!("left inverse check failed (|Φ(κ, x)| = {:.3e})", left.norm())));
    }
    Ok(GroupPoint::new(Chart::Second, kappa))
}

fn eval_left(q: &Quotient<'_>, kappa: &DVector<f64>, x: &DVector<f64>, cfg: &SolverConfig) -> Result<DVector<f64>> {
    compose_inner(q, kappa, x, cfg).map(|r| r.z.coords)
}

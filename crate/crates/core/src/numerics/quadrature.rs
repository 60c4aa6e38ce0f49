//! Composite Gauss–Legendre quadrature on `[0, 1]`.
//!
//! Nodes are visited in increasing order, so integrands that carry
//! warm-start state between evaluations (path-following solves) can be
//! passed directly as `FnMut` closures.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::config::SolverConfig;
use crate::error::{LieError, Result};

/// Nodes and weights of the `order`-point rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        // Chebyshev-like starting guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(order, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule on `[0, 1]` as `(t, weight)` pairs in increasing `t`.
pub fn composite_nodes(cfg: &SolverConfig) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(cfg.quadrature_order);
    let panels = cfg.quadrature_panels;
    let h = 1.0 / panels as f64;
    let mut out = Vec::with_capacity(panels * x.len());
    for p in 0..panels {
        let a = p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((a + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

/// `∫₀¹ f(t) dt` for a vector-valued integrand.
pub fn quadrature<F>(mut f: F, cfg: &SolverConfig) -> Result<DVector<f64>>
where
    F: FnMut(f64) -> Result<DVector<f64>>,
{
    let mut acc: Option<DVector<f64>> = None;
    for (t, w) in composite_nodes(cfg) {
        let v = f(t)?;
        if v.iter().any(|c| !c.is_finite()) {
            return Err(LieError::ChartExit(format!("non-finite integrand at t = {t}")));
        }
        match acc.as_mut() {
            Some(a) => a.axpy(w, &v, 1.0),
            None => acc = Some(v * w),
        }
    }
    Ok(acc.unwrap_or_else(|| DVector::zeros(0)))
}

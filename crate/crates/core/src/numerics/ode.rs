//! Adaptive Dormand–Prince 5(4) integrator.

use nalgebra::DVector;

use crate::config::SolverConfig;
use crate::error::{LieError, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 200_000;

/// Integrates `dx/dt = field(t, x)` from `t = 0` to `t_end`.
///
/// Field evaluation failures shrink the step; if the step underflows the
/// trajectory is treated as having left the chart.
pub fn ode_solve<F>(mut field: F, start: &DVector<f64>, t_end: f64, cfg: &SolverConfig) -> Result<DVector<f64>>
where
    F: FnMut(f64, &DVector<f64>) -> Result<DVector<f64>>,
{
    if !t_end.is_finite() || start.iter().any(|v| !v.is_finite()) {
        return Err(LieError::InvalidInput("non-finite ODE start or end time".into()));
    }
    if t_end == 0.0 {
        return Ok(start.clone());
    }
    let dir = t_end.signum();
    let span = t_end.abs();
    let rtol = cfg.ode_rel_tol;
    let atol = cfg.ode_abs_tol;

    let mut eval = |t: f64, x: &DVector<f64>| -> Result<DVector<f64>> {
        let v = field(t, x)?;
        if v.iter().any(|c| !c.is_finite()) {
            return Err(LieError::ChartExit(format!("non-finite velocity at t = {t}")));
        }
        Ok(v)
    };

    let mut t = 0.0_f64;
    let mut x = start.clone();
    let mut k0 = eval(0.0, &x)?;
    let mut h = initial_step(&x, &k0, span, rtol, atol);
    let h_min = 1e-14 * span;

    for _ in 0..MAX_STEPS {
        if t >= span {
            return Ok(x);
        }
        if t + h > span {
            h = span - t;
        }
        match try_step(&mut eval, t, &x, &k0, h, dir) {
            Ok((x_new, k_last, err_vec)) => {
                let err = error_norm(&err_vec, &x, &x_new, rtol, atol);
                if err <= 1.0 {
                    t += h;
                    x = x_new;
                    k0 = k_last;
                    let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    h *= factor;
                } else {
                    h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                }
            }
            Err(e) if e.is_numerical() => h *= 0.25,
            Err(e) => return Err(e),
        }
        if h < h_min && t < span {
            return Err(LieError::ChartExit(format!("integrator step underflow at t = {}", dir * t)));
        }
    }
    Err(LieError::ChartExit("integrator exceeded its step budget".into()))
}

type StepOutput = (DVector<f64>, DVector<f64>, DVector<f64>);

fn try_step<F>(eval: &mut F, t: f64, x: &DVector<f64>, k0: &DVector<f64>, h: f64, dir: f64) -> Result<StepOutput>
where
    F: FnMut(f64, &DVector<f64>) -> Result<DVector<f64>>,
{
    let hs = h * dir;
    let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
    k.push(k0.clone());
    for s in 1..7 {
        let mut xs = x.clone();
        for (j, kj) in k.iter().enumerate() {
            if A[s][j] != 0.0 {
                xs.axpy(hs * A[s][j], kj, 1.0);
            }
        }
        let ks = eval(dir * (t + C[s] * h), &xs)?;
        if s == 6 {
            // Stage 7 is evaluated at the 5th-order solution (FSAL).
            let mut err = DVector::zeros(x.len());
            for (j, kj) in k.iter().enumerate() {
                err.axpy(hs * E[j], kj, 1.0);
            }
            err.axpy(hs * E[6], &ks, 1.0);
            let x_new = xs;
            return Ok((x_new, ks, err));
        }
        k.push(ks);
    }
    unreachable!("the loop returns at the last stage")
}

fn error_norm(err: &DVector<f64>, x: &DVector<f64>, x_new: &DVector<f64>, rtol: f64, atol: f64) -> f64 {
    if err.is_empty() {
        return 0.0;
    }
    let sum: f64 = err
        .iter()
        .zip(x.iter().zip(x_new.iter()))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / err.len() as f64).sqrt()
}

fn initial_step(x: &DVector<f64>, f0: &DVector<f64>, span: f64, rtol: f64, atol: f64) -> f64 {
    let scale = |v: f64| atol + rtol * v.abs();
    let d0 = x.iter().map(|v| (v / scale(*v)).powi(2)).sum::<f64>().sqrt();
    let d1 = f0.iter().zip(x.iter()).map(|(f, v)| (f / scale(*v)).powi(2)).sum::<f64>().sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    (h * 0.1).min(span).max(1e-10 * span)
}

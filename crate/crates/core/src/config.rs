use crate::error::{LieError, Result};

/// Tolerances and iteration controls shared by every iterative routine.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Relative Frobenius residual accepted by the product decomposition.
    pub residual_tol: f64,
    pub max_iter: usize,
    /// Gauss–Legendre points per panel.
    pub quadrature_order: usize,
    pub quadrature_panels: usize,
    pub ode_rel_tol: f64,
    pub ode_abs_tol: f64,
    /// Intermediate targets used when a decomposition has to be continued
    /// from a known solution.
    pub homotopy_steps: usize,
    /// Step used by finite-difference consistency checks.
    pub fd_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-12,
            max_iter: 100,
            quadrature_order: 16,
            quadrature_panels: 8,
            ode_rel_tol: 1e-10,
            ode_abs_tol: 1e-12,
            homotopy_steps: 8,
            fd_step: 1e-5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [
            ("residual_tol", self.residual_tol),
            ("ode_rel_tol", self.ode_rel_tol),
            ("ode_abs_tol", self.ode_abs_tol),
            ("fd_step", self.fd_step),
        ];
        for (name, v) in tols {
            if !(v.is_finite() && v > 0.0) {
                return Err(LieError::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        let counts = [
            ("max_iter", self.max_iter),
            ("quadrature_order", self.quadrature_order),
            ("quadrature_panels", self.quadrature_panels),
            ("homotopy_steps", self.homotopy_steps),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(LieError::InvalidInput(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    /// Loose integrator settings used to seed Newton-type solves.
    pub(crate) fn coarse(&self) -> Self {
        Self {
            ode_rel_tol: self.ode_rel_tol.max(1e-6),
            ode_abs_tol: self.ode_abs_tol.max(1e-8),
            ..self.clone()
        }
    }
}

use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LieError>;

#[derive(Debug, Clone, Error)]
pub enum LieError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("structure constants rejected:\n{0}")]
    Validation(ValidationReport),

    /// The requested point (or an intermediate point of a path) left the
    /// neighbourhood where the canonical chart and the solvers are valid.
    #[error("left the coordinate chart: {0}")]
    ChartExit(String),

    #[error("product decomposition failed after {iterations} iterations (relative residual {residual:.3e})")]
    DecompositionFailure { iterations: usize, residual: f64 },

    #[error("product decomposition is ambiguous: Jacobian rank {rank} < {expected}")]
    Ambiguity { rank: usize, expected: usize },

    #[error("composition undefined: {0}")]
    CompositionUndefined(String),

    #[error("invalid subalgebra: {0}")]
    InvalidSubalgebra(String),
}

impl LieError {
    /// True for failures that come from leaving the region where the
    /// numerical procedures converge, as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            LieError::ChartExit(_)
                | LieError::DecompositionFailure { .. }
                | LieError::Ambiguity { .. }
                | LieError::CompositionUndefined(_)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Antisymmetry,
    Jacobi,
}

/// One offending index triple. Indices are 1-based, as printed to users.
///
/// For antisymmetry the triple is `(k, i, j)` of `C^k_ij`; for Jacobi it is
/// `(i, j, k)` of the cyclic sum over `[[e_i, e_j], e_k]`, with `component`
/// naming the output index `l` carrying the largest residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub indices: [usize; 3],
    pub component: Option<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Total number of violations found, of which at most ten are listed.
    pub total: usize,
}

impl ValidationReport {
    pub const MAX_LISTED: usize = 10;

    pub fn is_ok(&self) -> bool {
        self.total == 0
    }

    pub(crate) fn push(&mut self, v: Violation) {
        if self.violations.len() < Self::MAX_LISTED {
            self.violations.push(v);
        }
        self.total += 1;
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} violation(s)", self.total)?;
        for v in &self.violations {
            let [a, b, c] = v.indices;
            match v.kind {
                ViolationKind::Antisymmetry => writeln!(
                    f,
                    "  antisymmetry at ({a},{b},{c}): C^{a}_{b}{c} + C^{a}_{c}{b} = {:.3e}",
                    v.residual
                )?,
                ViolationKind::Jacobi => writeln!(
                    f,
                    "  jacobi at ({a},{b},{c}), component {}: residual {:.3e}",
                    v.component.unwrap_or(0),
                    v.residual
                )?,
            }
        }
        Ok(())
    }
}

//! Local Lie group computations driven only by structure constants:
//! invariant frames, composition functions, canonical coordinate
//! transitions and homogeneous-space generators.

pub mod algebra;
pub mod cli;
pub mod composition;
pub mod config;
pub mod coords;
pub mod error;
pub mod frames;
pub mod homogeneous;
pub mod numerics;

pub use algebra::{AlgebraVector, LieAlgebra, StructureConstants};
pub use composition::{
    compose, compose_ode, compose_via_rep, inverse_point, theta, theta_along_path, CompositionMethod,
    CompositionResult, MatrixRepresentation,
};
pub use config::SolverConfig;
pub use coords::{one_param_point, to_first, to_second, to_second_ode, TransitionResult};
pub use error::{LieError, Result, ValidationReport, Violation, ViolationKind};
pub use frames::{adjoint_at, frame_second, omega_first, Chart, Frame, GroupPoint};
pub use homogeneous::{action, adapted_basis, generators, CosetAction, HomogeneousModel, Subalgebra};

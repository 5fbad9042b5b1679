//! Path families and parallel transport, monodromy of the local system of
//! fibre cohomologies, and subexhaustions for complete connections.

pub mod exhaust;
pub mod integrate;
pub mod monodromy;
pub mod path;

use thiserror::Error;

use crate::ce::CeError;
use crate::cover::CoverError;

pub use exhaust::{subexhaust, verify_subexhaustion, ExhaustionProblem, IndexOracle, Subexhaustion, Violation};
pub use integrate::{
    parallel_transport, parallel_transport_to, trivialize_via_transport, ClassMap, FloatMatrix, TransportResult, TrivialPoint,
    Trivialization,
};
pub use monodromy::{
    cech_monodromy, gauss_manin, homotopy_invariance_check, monodromy_check, DegreeMonodromy, GaussManinBundle,
    Holonomy, HomotopySample, MonodromyReport,
};
pub use path::{tconst, tvar, PathFamily, TPoly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    #[error("{0}")]
    Shape(String),
    #[error("path family is inconsistent: {0}")]
    Incompatible(String),
    #[error("integration failed: defect {defect:e} above tolerance {tol:e} after {steps} steps")]
    Integration { defect: f64, steps: usize, tol: f64 },
    #[error("path family does not return to its starting fibre")]
    NotALoop,
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Exhaustion(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Ce(#[from] CeError),
}

//! Lie algebroids and representations over a polynomial patch, axiom
//! validation, the semidirect product with a representation, and the
//! kernel of a submersion by Lie algebroids.

pub mod patch;
pub mod semidirect;
pub mod submersion;
pub mod validate;

use thiserror::Error;

use crate::exact::{format_rational, Rational};

pub use patch::{LieAlgebroidPatch, Patch, Representation, Section};
pub use semidirect::semidirect;
pub use submersion::{induced_subalgebroid, kernel_frame, tau_and_kernel, KernelAlgebroid, KernelFrame, SubmersionDatum, TauOutcome};
pub use validate::{validate_algebroid, validate_representation, Axiom, AxiomCheck, ValidationReport, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebroidError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("not a representation: {0}")]
    NotARepresentation(String),
    #[error("tau has non-constant rank: full at the origin, drops to {rank} at ({})", format_point(point))]
    NonConstantRank { point: Vec<Rational>, rank: usize },
    #[error("kernel is not closed under the bracket: {0}")]
    KernelNotClosed(String),
}

pub fn format_point(point: &[Rational]) -> String {
    point.iter().map(format_rational).collect::<Vec<_>>().join(", ")
}

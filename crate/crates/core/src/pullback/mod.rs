//! Transversality, pullbacks along structured maps, the rescaling family
//! of a vector bundle, the Euler homotopy and restriction to transversals.

pub mod euler;
pub mod maps;
pub mod rescaling;
pub mod transversal;

use thiserror::Error;

use crate::algebroid::{format_point, AlgebroidError};
use crate::ce::CeError;
use crate::exact::Rational;

pub use euler::{euler_homotopy_verify, lie_derivative, EulerReport, EulerSection};
pub use maps::{pullback_structured, transversality_check, StructuredMap, TransversalityCertificate};
pub use rescaling::{rescaling_family, sample_parameters, RescalingReport, Verdict};
pub use transversal::{restrict_cochain, transversal_iso_check, TransversalReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PullbackError {
    #[error("{0}")]
    Structural(String),
    #[error("{kind} map is not transverse at ({}): rank {rank} < {needed}", format_point(point))]
    NotTransverse { kind: &'static str, point: Vec<Rational>, rank: usize, needed: usize },
    #[error("not an Euler section: {0}")]
    NotEuler(String),
    #[error("Cartan identity fails in degree {degree}, weight {weight} on {cochain}")]
    CartanFails { degree: usize, weight: i64, cochain: String },
    #[error("fibre product does not have constant rank near the origin")]
    NonConstantRank,
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Ce(#[from] CeError),
}

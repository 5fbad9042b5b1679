//! Chevalley–Eilenberg complex `Ω(A; D)` of a representation and its exact
//! cohomology.

pub mod basis;
pub mod cohomology;
pub mod complex;

use thiserror::Error;

use crate::exact::ExactError;

pub use basis::{CeBasis, Cochain, Wedge};
pub use cohomology::{
    cohomology, stratum_cohomology, weight_cohomology, CohomologyReport, DegreeCohomology, JetWindow, Mode,
    StratumCohomology,
};
pub use complex::{ce_differential, CeComplex, DifferentialBlock, Stratum};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CeError {
    #[error("not graded: {0}")]
    NotGraded(String),
    #[error("stratum is infinite-dimensional: {0}")]
    Infinite(String),
    #[error("differential leaves the declared codomain at {0}")]
    OutsideCodomain(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

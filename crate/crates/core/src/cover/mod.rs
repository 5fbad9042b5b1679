//! Covers, local-system families, the Čech double complex and its
//! spectral sequence, and localization of cohomology to a fibre.

pub mod double;
pub mod family;
pub mod localize;
pub mod nerve;
pub mod spectral;

use thiserror::Error;

use crate::ce::CeError;
use crate::exact::ExactError;

pub use double::{build_double_complex, local_system_cohomology, Block, CechDoubleComplex, TotalComplex};
pub use family::{cochain_action, LocalSystemFamily, Transition};
pub use localize::{localization_check, Branch, Localization};
pub use nerve::{nerve, CoverDatum, Nerve, Simplex};
pub use spectral::{ss_pages, SpectralSequence, SsPage};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("{0}")]
    Structural(String),
    #[error("cover is not closed under faces: {simplex} is nonempty but {face} is not")]
    NotClosed { simplex: String, face: String },
    #[error("transitions fail the cocycle condition on {triple}")]
    Cocycle { triple: String },
    #[error("transition on {edge} {reason}")]
    NotAnIsomorphism { edge: String, reason: String },
    #[error("{0}")]
    NotAComplex(String),
    #[error(transparent)]
    Ce(#[from] CeError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

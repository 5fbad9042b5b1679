//! Exact arithmetic substrate: rationals, truncated polynomials, weight
//! gradings and rational linear algebra.

pub mod complex;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod polymatrix;
pub mod rational;
pub mod weights;

use thiserror::Error;

pub use complex::{kernel_quotient_dims, KernelQuotient};
pub use matrix::{ColumnSolver, RationalMatrix, Span};
pub use parse::parse_poly;
pub use polymatrix::PolyMatrix;
pub use poly::{poly_mul_truncate, weight_decompose, Monomial, TruncatedPoly, EXACT};
pub use rational::{format_rational, int, parse_rational, rat, Rational};
pub use weights::WeightAssignment;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableMismatch { left: usize, right: usize },
    #[error("shape mismatch in {context}: {left:?} vs {right:?}")]
    ShapeMismatch {
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("not a complex: (d_out * d_in)[{row}][{col}] = {value}")]
    NotAComplex {
        row: usize,
        col: usize,
        value: rational::Rational,
    },
    #[error("cannot parse polynomial '{text}' at offset {offset}: {message}")]
    Parse {
        text: String,
        offset: usize,
        message: String,
    },
}

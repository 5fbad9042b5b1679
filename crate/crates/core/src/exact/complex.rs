//! Cohomology of one spot of a cochain complex: `ker(d_out) / im(d_in)`.

use num_traits::Zero;

use super::matrix::{RationalMatrix, Span};
use super::rational::Rational;
use super::ExactError;

/// Result of [`kernel_quotient_dims`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelQuotient {
    pub betti: usize,
    /// Reduced echelon basis of `ker(d_out)`.
    pub kernel_basis: Vec<Vec<Rational>>,
    /// Reduced echelon basis of `im(d_in)`.
    pub image_basis: Vec<Vec<Rational>>,
    /// Kernel vectors completing the image basis to a kernel basis; their
    /// classes form a basis of the quotient.
    pub representatives: Vec<Vec<Rational>>,
}

/// `d_in: C^{q-1} -> C^q` and `d_out: C^q -> C^{q+1}` as matrices acting on
/// column vectors. Checks composability and `d_out * d_in = 0`.
pub fn kernel_quotient_dims(
    d_in: &RationalMatrix,
    d_out: &RationalMatrix,
) -> Result<KernelQuotient, ExactError> {
    if d_out.cols() != d_in.rows() {
        return Err(ExactError::ShapeMismatch {
            context: "kernel_quotient_dims",
            left: (d_out.rows(), d_out.cols()),
            right: (d_in.rows(), d_in.cols()),
        });
    }
    let composite = d_out * d_in;
    if let Some((row, col, value)) = composite.first_nonzero() {
        return Err(ExactError::NotAComplex { row, col, value });
    }
    let dim = d_in.rows();
    let kernel_basis = echelon(dim, d_out.kernel_basis());
    let image_basis = d_in.image_basis();
    let mut span = Span::new(dim);
    for v in &image_basis {
        span.insert(v);
    }
    let representatives: Vec<Vec<Rational>> = kernel_basis
        .iter()
        .filter(|v| span.insert(v))
        .cloned()
        .collect();
    Ok(KernelQuotient {
        betti: kernel_basis.len() - image_basis.len(),
        kernel_basis,
        image_basis,
        representatives,
    })
}

fn echelon(dim: usize, vectors: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    if vectors.is_empty() {
        return vectors;
    }
    let m = RationalMatrix::from_rows(vectors);
    let r = m.rref();
    (0..r.pivots.len())
        .map(|i| r.matrix.row(i))
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .collect::<Vec<_>>()
        .into_iter()
        .take(dim)
        .collect()
}

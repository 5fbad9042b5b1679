//! `tau_A = p_* rho_A` for a coordinate projection and its kernel `K(A)`.

use num_traits::Zero;

use crate::exact::polymatrix::{self, PolyMatrix};
use crate::exact::{Rational, TruncatedPoly};

use super::patch::{LieAlgebroidPatch, Section};
use super::AlgebroidError;

/// An algebroid over a patch whose coordinates are split into base and
/// fibre coordinates; `p` is the projection onto the base coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmersionDatum {
    pub algebroid: LieAlgebroidPatch,
    pub base: Vec<usize>,
    pub fibre: Vec<usize>,
    /// Extra points at which surjectivity of `tau_A` is checked.
    pub test_points: Vec<Vec<Rational>>,
}

impl SubmersionDatum {
    pub fn new(algebroid: LieAlgebroidPatch, base: Vec<usize>) -> Self {
        let fibre = (0..algebroid.n_vars()).filter(|j| !base.contains(j)).collect();
        SubmersionDatum {
            algebroid,
            base,
            fibre,
            test_points: Vec::new(),
        }
    }

    pub fn with_test_points(mut self, points: Vec<Vec<Rational>>) -> Self {
        self.test_points = points;
        self
    }

    /// Base-coordinate block of the anchor, `r x n_base`.
    pub fn tau(&self) -> PolyMatrix {
        self.algebroid
            .anchor
            .iter()
            .map(|row| self.base.iter().map(|&b| row[b].clone()).collect())
            .collect()
    }
}

/// Frame of the kernel of a map given by the rows of `rows` (one row per
/// generator), valid near the origin when the rows span at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelFrame {
    /// Generators whose images span at the origin.
    pub pivots: Vec<usize>,
    /// Remaining generators; kernel element `a` is
    /// `g_{free[a]} - sum_{j in pivots} coeff * g_j`.
    pub free: Vec<usize>,
    /// Coefficients of the kernel elements in the generators,
    /// `free.len() x rows.len()`.
    pub sections: PolyMatrix,
}

/// Kernel frame of the map `g_i ↦ rows[i]`; `None` when the images do not
/// span at the origin.
pub fn kernel_frame(rows: &PolyMatrix, cols: usize, n_vars: usize, order: u32) -> Option<KernelFrame> {
    let at0 = polymatrix::eval_at(rows, cols, &vec![Rational::zero(); n_vars]);
    if at0.rank() < cols {
        return None;
    }
    let pivots = at0.transpose().rref().pivots;
    let free: Vec<usize> = (0..rows.len()).filter(|i| !pivots.contains(i)).collect();
    let tau_j: PolyMatrix = pivots.iter().map(|&j| rows[j].clone()).collect();
    let inv = polymatrix::inverse(&tau_j, n_vars, order)?;
    let free_rows: PolyMatrix = free.iter().map(|&i| rows[i].clone()).collect();
    let coeffs = polymatrix::mul(&free_rows, &inv, n_vars, order);
    let one = TruncatedPoly::constant(n_vars, order, num_traits::One::one());
    let sections = free
        .iter()
        .zip(&coeffs)
        .map(|(&i, c)| {
            let mut s = vec![TruncatedPoly::zero(n_vars, order); rows.len()];
            s[i] = one.clone();
            for (&j, cj) in pivots.iter().zip(c) {
                s[j] = -cj;
            }
            s
        })
        .collect();
    Some(KernelFrame { pivots, free, sections })
}

/// `K(A)` together with its frame inside `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelAlgebroid {
    /// Subalgebroid with frame `k_a` named after the free generator `e_{free[a]}`.
    pub kernel: LieAlgebroidPatch,
    pub frame: KernelFrame,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TauOutcome {
    Surjective(KernelAlgebroid),
    NotSurjective { witness: Vec<Rational>, rank: usize },
}

/// Decides whether `(A, p)` is a submersion by Lie algebroids and, if so,
/// materializes `K(A) = ker tau_A` with the induced bracket and its
/// vertical anchor.
pub fn tau_and_kernel(s: &SubmersionDatum) -> Result<TauOutcome, AlgebroidError> {
    let a = &s.algebroid;
    let nb = s.base.len();
    let tau = s.tau();
    let origin = a.patch.origin();
    let rank0 = polymatrix::eval_at(&tau, nb, &origin).rank();
    if rank0 < nb {
        return Ok(TauOutcome::NotSurjective { witness: origin, rank: rank0 });
    }
    for p in &s.test_points {
        let rk = polymatrix::eval_at(&tau, nb, p).rank();
        if rk < nb {
            return Err(AlgebroidError::NonConstantRank { point: p.clone(), rank: rk });
        }
    }
    let frame = kernel_frame(&tau, nb, a.n_vars(), a.order()).expect("full rank at the origin");
    let kernel = induced_subalgebroid(a, &frame)?;
    Ok(TauOutcome::Surjective(KernelAlgebroid { kernel, frame }))
}

/// Restricts `A` to the subbundle spanned by `frame`, which must be closed
/// under the bracket.
pub fn induced_subalgebroid(a: &LieAlgebroidPatch, frame: &KernelFrame) -> Result<LieAlgebroidPatch, AlgebroidError> {
    let names = frame.free.iter().map(|&i| a.frame[i].clone()).collect();
    let mut k = LieAlgebroidPatch::trivial(a.patch.clone(), names);
    let secs: &Vec<Section> = &frame.sections;
    for (ka, s) in secs.iter().enumerate() {
        k.anchor[ka] = a.anchor_of_section(s);
    }
    let cert = a.order().saturating_sub(a.max_structure_degree().max(1));
    for x in 0..secs.len() {
        for y in x + 1..secs.len() {
            let br = a.section_bracket(&secs[x], &secs[y]);
            // coefficients on the kernel frame are the free components
            let coeffs: Vec<TruncatedPoly> = frame.free.iter().map(|&i| br[i].clone()).collect();
            for (pos, &j) in frame.pivots.iter().enumerate() {
                let mut expect = a.patch.zero();
                for (c, s) in coeffs.iter().zip(secs) {
                    expect = &expect + &(c * &s[j]);
                }
                let diff = &br[j] - &expect;
                if diff.terms().any(|(m, _)| m.degree() <= cert) {
                    return Err(AlgebroidError::KernelNotClosed(format!(
                        "[{}, {}] leaves the kernel in component {} (pivot {pos})",
                        k.frame[x], k.frame[y], a.frame[j]
                    )));
                }
            }
            for (c, coeff) in coeffs.into_iter().enumerate() {
                k.set_bracket(x, y, c, coeff);
            }
        }
    }
    if a.patch.weights.is_some() || a.frame_weights.is_some() {
        let w = a.effective_frame_weights();
        k.frame_weights = Some(frame.free.iter().map(|&i| w[i]).collect());
    }
    Ok(k)
}

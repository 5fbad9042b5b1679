//! Restriction of CE cohomology to a transversal `{y = 0}` through the
//! weight-0 coordinates.

use crate::algebroid::{KernelFrame, LieAlgebroidPatch, Representation};
use crate::ce::{cohomology, weight_cohomology, CeBasis, CeComplex, Cochain, JetWindow, Mode, Wedge};
use crate::exact::polymatrix::{self, PolyMatrix};
use crate::exact::{Monomial, RationalMatrix, TruncatedPoly, EXACT};

use super::maps::slice_frame;
use super::{pullback_structured, PullbackError, StructuredMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalReport {
    /// Betti numbers of `A` per degree, summed over the weight range.
    pub ambient: Vec<usize>,
    /// Betti numbers of `i^!(A)` per degree.
    pub transversal: Vec<usize>,
    /// Total ambient betti number in nonzero weights.
    pub nonzero_weight: usize,
    /// Rank of the restriction on weight-0 representatives per degree.
    pub restriction_rank: Vec<usize>,
    pub betti_match: bool,
    pub surjective: bool,
    /// All jet windows involved stabilized.
    pub conclusive: bool,
}

impl TransversalReport {
    pub fn isomorphism(&self) -> bool {
        self.betti_match && self.surjective && self.nonzero_weight == 0
    }
}

/// `i^*ω`: evaluate on the frame of `i^!(A)` and set `y = 0`. A component
/// `ω_I` contributes `ω_I|_{y=0} det(S[a][I])` to `(i^*ω)_a`.
pub fn restrict_cochain(keep: &[usize], frame: &KernelFrame, c: &Cochain) -> Cochain {
    let m = keep.len();
    let mut out = Cochain::zero();
    let mut minors: std::collections::BTreeMap<(Wedge, Wedge), TruncatedPoly> = Default::default();
    for (b, x) in &c.terms {
        let e = b.mono.exponents();
        let on_slice = (0..e.len()).all(|j| keep.contains(&j) || e[j] == 0);
        if !on_slice {
            continue;
        }
        let mono = Monomial(keep.iter().map(|&j| e[j]).collect());
        let cols = b.wedge.indices();
        for rows in Wedge::all(frame.sections.len(), cols.len()) {
            let det = minors.entry((rows, b.wedge)).or_insert_with(|| {
                let sub: PolyMatrix = rows
                    .indices()
                    .iter()
                    .map(|&a| cols.iter().map(|&i| frame.sections[a][i].with_order(EXACT)).collect())
                    .collect();
                polymatrix::determinant(&sub, m)
            });
            for (dm, dc) in det.terms() {
                out.add(CeBasis { mono: mono.mul(dm), wedge: rows, fibre: b.fibre }, x * dc);
            }
        }
    }
    out
}

fn slice_normal(a: &LieAlgebroidPatch, slice: &StructuredMap) -> Result<Vec<usize>, PullbackError> {
    let StructuredMap::SliceInclusion { normal } = slice else {
        return Err(PullbackError::Structural(format!("expected a slice inclusion, got a {} map", slice.kind())));
    };
    let Some(w) = &a.patch.weights else {
        return Err(PullbackError::Structural("transversal check needs coordinate weights".into()));
    };
    for j in 0..a.n_vars() {
        let normal_j = normal.contains(&j);
        if normal_j != (w.weights()[j] > 0) {
            return Err(PullbackError::Structural(format!(
                "slice must cut out exactly the positive-weight coordinates; {} has weight {}",
                a.patch.vars[j],
                w.weights()[j]
            )));
        }
    }
    Ok(normal.clone())
}

/// Compares `H(A; D)` (weights `lo..=hi`) with `H(i^!(A); i^*(D))` and
/// checks that restriction of weight-0 representatives is onto.
pub fn transversal_iso_check(
    rep: &Representation,
    slice: &StructuredMap,
    (lo, hi): (i64, i64),
    window: JetWindow,
) -> Result<TransversalReport, PullbackError> {
    let a = &rep.algebroid;
    let normal = slice_normal(a, slice)?;
    let cx = CeComplex::new(rep);
    let amb = weight_cohomology(&cx, (lo, hi), window)?;
    let (keep, frame) = slice_frame(a, &normal)?;
    let (_, pulled) = pullback_structured(slice, a, Some(rep))?;
    let pulled = pulled.expect("representation supplied");
    let top = cx.rank();

    let restricted: Vec<Vec<Cochain>> = (0..=top)
        .map(|q| {
            amb.at(q, 0)
                .map(|e| e.representatives.iter().map(|c| restrict_cochain(&keep, &frame, c)).collect())
                .unwrap_or_default()
        })
        .collect();
    let need = restricted
        .iter()
        .flatten()
        .flat_map(|c| c.terms.keys().map(|b| b.mono.degree()))
        .max()
        .unwrap_or(0);
    let bwin = JetWindow { end: window.end.max(need), ..window };
    let bcx = CeComplex::new(&pulled);
    let trans = cohomology(&bcx, &Mode::Jet(bwin))?;

    let ambient: Vec<usize> = (0..=top).map(|q| amb.betti(q)).collect();
    let transversal: Vec<usize> = (0..=bcx.rank()).map(|q| trans.betti(q)).collect();
    let nonzero_weight = amb.entries.iter().filter(|e| e.weight != Some(0)).map(|e| e.betti).sum();
    let mut restriction_rank = Vec::new();
    let mut surjective = true;
    for (q, cochains) in restricted.iter().enumerate() {
        let Some(entry) = trans.entries.iter().find(|e| e.degree == q) else {
            restriction_rank.push(0);
            continue;
        };
        let coords: Option<Vec<Vec<_>>> = cochains.iter().map(|c| entry.last.class_of(c)).collect();
        let rank = match coords {
            Some(cols) if !cols.is_empty() => RationalMatrix::from_columns(entry.betti, &cols).rank(),
            Some(_) => 0,
            None => {
                surjective = false;
                0
            }
        };
        surjective &= rank == entry.betti;
        restriction_rank.push(rank);
    }
    let padded = |v: &[usize], k: usize| {
        let mut v = v.to_vec();
        v.resize(k.max(v.len()), 0);
        v
    };
    let len = ambient.len().max(transversal.len());
    let betti_match = padded(&ambient, len) == padded(&transversal, len);
    let conclusive = amb.conclusive() && trans.conclusive();
    Ok(TransversalReport {
        ambient,
        transversal,
        nonzero_weight,
        restriction_rank,
        betti_match,
        surjective,
        conclusive,
    })
}

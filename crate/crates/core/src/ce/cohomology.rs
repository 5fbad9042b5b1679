//! Exact cohomology of `Ω(A; D)`: per weight when the data is graded, and
//! on growing jet windows with a stabilization test otherwise.

use std::collections::BTreeMap;

use crate::exact::{kernel_quotient_dims, ColumnSolver, KernelQuotient, Rational, RationalMatrix, Span};

use super::basis::{CeBasis, Cochain};
use super::complex::{CeComplex, Stratum};
use super::CeError;

/// Range of jet orders `start..=end`; a betti number counts as stable when
/// it is unchanged over the last `span` orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JetWindow {
    pub start: u32,
    pub end: u32,
    pub span: usize,
}

impl JetWindow {
    pub fn new(start: u32, end: u32, span: usize) -> Self {
        JetWindow { start, end, span }
    }
}

impl Default for JetWindow {
    fn default() -> Self {
        JetWindow { start: 1, end: 5, span: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    /// One stratum per weight in the range. Strata with weight-zero
    /// coordinates are infinite and use the jet window.
    Weight { weights: (i64, i64), window: JetWindow },
    /// Whole complex on jet windows.
    Jet(JetWindow),
}

/// Cohomology of one stratum of `Ω^q`.
#[derive(Clone, Debug)]
pub struct StratumCohomology {
    pub degree: usize,
    pub stratum: Stratum,
    pub basis: Vec<CeBasis>,
    pub quotient: KernelQuotient,
    index: BTreeMap<CeBasis, usize>,
}

impl StratumCohomology {
    pub fn betti(&self) -> usize {
        self.quotient.betti
    }

    pub fn representatives(&self) -> Vec<Cochain> {
        self.quotient
            .representatives
            .iter()
            .map(|v| Cochain::from_vector(&self.basis, v))
            .collect()
    }

    /// Coordinates of the class of a cocycle on the representatives, or
    /// `None` if the cochain has terms outside the stratum or is not a
    /// cocycle of the stratum.
    pub fn class_of(&self, c: &Cochain) -> Option<Vec<Rational>> {
        let v = c.to_vector(&self.index)?;
        let mut cols = self.quotient.representatives.clone();
        cols.extend(self.quotient.image_basis.iter().cloned());
        let solver = ColumnSolver::new(self.basis.len(), &cols)?;
        let x = solver.coordinates(&v)?;
        Some(x[..self.betti()].to_vec())
    }

    /// Whether a cochain of the stratum is a coboundary.
    pub fn is_exact(&self, c: &Cochain) -> Option<bool> {
        let v = c.to_vector(&self.index)?;
        let mut span = Span::new(self.basis.len());
        for b in &self.quotient.image_basis {
            span.insert(b);
        }
        Some(span.contains(&v))
    }
}

/// Computes `ker d / im d` at degree `q` on a stratum. With a degree cap
/// `N` the cocycles are those of degree at most `N`, and the coboundaries
/// are the images of cochains of degree at most `N + 1` that land there.
pub fn stratum_cohomology(cx: &CeComplex, q: usize, s: Stratum) -> Result<StratumCohomology, CeError> {
    let basis = cx
        .stratum_basis(q, &s)
        .ok_or_else(|| CeError::Infinite(format!("degree {q} stratum {s:?}")))?;
    let index: BTreeMap<CeBasis, usize> = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let d_out = cx.matrix_onto_images(&basis).matrix;
    let d_in = if q == 0 {
        RationalMatrix::zeros(basis.len(), 0)
    } else {
        let below = Stratum { weight: s.weight, max_degree: s.max_degree.map(|n| n + 1) };
        let dom = cx
            .stratum_basis(q - 1, &below)
            .ok_or_else(|| CeError::Infinite(format!("degree {} stratum {below:?}", q - 1)))?;
        let blk = cx.matrix_onto_images(&dom);
        let (low, high): (Vec<usize>, Vec<usize>) =
            (0..blk.codomain.len()).partition(|&i| index.contains_key(&blk.codomain[i]));
        let m = &blk.matrix;
        let restricted = if high.is_empty() {
            RationalMatrix::from_columns(m.rows(), &m.columns())
        } else {
            let kernel = m.select_rows(&high).kernel_basis();
            let k = RationalMatrix::from_columns(dom.len(), &kernel);
            m.checked_mul(&k).expect("shapes agree")
        };
        let mut out = RationalMatrix::zeros(basis.len(), restricted.cols());
        for &row in &low {
            let target = index[&blk.codomain[row]];
            for c in 0..restricted.cols() {
                out[(target, c)] = restricted[(row, c)].clone();
            }
        }
        out
    };
    let quotient = kernel_quotient_dims(&d_in, &d_out)?;
    Ok(StratumCohomology { degree: q, stratum: s, basis, quotient, index })
}

/// Betti numbers of one degree (and weight) with their provenance.
#[derive(Clone, Debug)]
pub struct DegreeCohomology {
    pub degree: usize,
    pub weight: Option<i64>,
    pub betti: usize,
    pub representatives: Vec<Cochain>,
    /// `(N, betti at N)` for jet-window computations; empty when exact.
    pub trace: Vec<(u32, usize)>,
    /// Exact strata are always stable.
    pub stabilized: bool,
    pub last: StratumCohomology,
}

#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub entries: Vec<DegreeCohomology>,
}

impl CohomologyReport {
    /// Betti number of degree `q` summed over the computed weights.
    pub fn betti(&self, q: usize) -> usize {
        self.entries.iter().filter(|e| e.degree == q).map(|e| e.betti).sum()
    }

    pub fn betti_vector(&self) -> Vec<usize> {
        let top = self.entries.iter().map(|e| e.degree).max().map_or(0, |d| d + 1);
        (0..top).map(|q| self.betti(q)).collect()
    }

    pub fn at(&self, q: usize, weight: i64) -> Option<&DegreeCohomology> {
        self.entries.iter().find(|e| e.degree == q && e.weight == Some(weight))
    }

    /// Whether every jet-window entry stabilized.
    pub fn conclusive(&self) -> bool {
        self.entries.iter().all(|e| e.stabilized)
    }

    pub fn weights(&self) -> Vec<i64> {
        let mut w: Vec<i64> = self.entries.iter().filter_map(|e| e.weight).collect();
        w.sort();
        w.dedup();
        w
    }
}

fn windowed(cx: &CeComplex, q: usize, weight: Option<i64>, window: JetWindow) -> Result<DegreeCohomology, CeError> {
    let mut trace = Vec::new();
    let mut last = None;
    for n in window.start..=window.end {
        let sc = stratum_cohomology(cx, q, Stratum { weight, max_degree: Some(n) })?;
        trace.push((n, sc.betti()));
        last = Some(sc);
    }
    let last = last.ok_or_else(|| CeError::Infinite("empty jet window".into()))?;
    let tail: Vec<usize> = trace.iter().rev().take(window.span).map(|t| t.1).collect();
    let stabilized = tail.len() == window.span && tail.windows(2).all(|w| w[0] == w[1]);
    Ok(DegreeCohomology {
        degree: q,
        weight,
        betti: last.betti(),
        representatives: last.representatives(),
        trace,
        stabilized,
        last,
    })
}

fn exact(cx: &CeComplex, q: usize, weight: i64) -> Result<DegreeCohomology, CeError> {
    let sc = stratum_cohomology(cx, q, Stratum::weight(weight))?;
    Ok(DegreeCohomology {
        degree: q,
        weight: Some(weight),
        betti: sc.betti(),
        representatives: sc.representatives(),
        trace: Vec::new(),
        stabilized: true,
        last: sc,
    })
}

/// Cohomology in every degree `0..=rank`.
pub fn cohomology(cx: &CeComplex, mode: &Mode) -> Result<CohomologyReport, CeError> {
    match mode {
        Mode::Jet(window) => {
            let entries = (0..=cx.rank())
                .map(|q| windowed(cx, q, None, *window))
                .collect::<Result<_, _>>()?;
            Ok(CohomologyReport { entries })
        }
        Mode::Weight { weights, window } => weight_cohomology(cx, *weights, *window),
    }
}

/// Cohomology per `(degree, weight)` for weights in `lo..=hi`; requires
/// weight-homogeneous structure data.
pub fn weight_cohomology(cx: &CeComplex, (lo, hi): (i64, i64), window: JetWindow) -> Result<CohomologyReport, CeError> {
    cx.check_graded()?;
    let finite = cx.var_weights().iter().all(|&w| w > 0);
    let mut entries = Vec::new();
    for w in lo..=hi {
        for q in 0..=cx.rank() {
            let e = if finite { exact(cx, q, w)? } else { windowed(cx, q, Some(w), window)? };
            entries.push(e);
        }
    }
    Ok(CohomologyReport { entries })
}

//! The Chevalley–Eilenberg differential of a representation, applied to
//! basis cochains with exact (untruncated) arithmetic.

use std::collections::BTreeMap;

use crate::algebroid::{LieAlgebroidPatch, Representation, Section};
use crate::exact::{Monomial, Rational, RationalMatrix, TruncatedPoly, WeightAssignment};

use super::basis::{monomials, CeBasis, Cochain, Wedge};
use super::CeError;

type Terms = Vec<(Monomial, Rational)>;

fn terms_of(p: &TruncatedPoly) -> Terms {
    p.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

/// `Ω(A; D)` with its differential. Structure data is read as exact
/// polynomials (the stored terms), so `d` never truncates.
#[derive(Clone, Debug)]
pub struct CeComplex {
    pub rep: Representation,
    var_weights: Vec<u32>,
    frame_weights: Vec<i64>,
    fibre_weights: Vec<i64>,
    anchor: Vec<Vec<Terms>>,
    bracket: Vec<Vec<Vec<Terms>>>,
    gamma: Vec<Vec<Vec<Terms>>>,
}

/// Which part of `Ω^q` a computation sees: one weight (if given) and
/// polynomial coefficients of degree at most `max_degree` (if given).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub weight: Option<i64>,
    pub max_degree: Option<u32>,
}

impl Stratum {
    pub fn weight(w: i64) -> Self {
        Stratum { weight: Some(w), max_degree: None }
    }

    pub fn window(n: u32) -> Self {
        Stratum { weight: None, max_degree: Some(n) }
    }
}

/// Matrix of `d` between two listed bases.
#[derive(Clone, Debug)]
pub struct DifferentialBlock {
    pub domain: Vec<CeBasis>,
    pub codomain: Vec<CeBasis>,
    pub matrix: RationalMatrix,
}

impl CeComplex {
    pub fn new(rep: &Representation) -> Self {
        let a = &rep.algebroid;
        let var_weights = a
            .patch
            .weights
            .clone()
            .unwrap_or_else(|| WeightAssignment::trivial(a.n_vars()))
            .weights()
            .to_vec();
        CeComplex {
            var_weights,
            frame_weights: a.effective_frame_weights(),
            fibre_weights: rep.effective_frame_weights(),
            anchor: a.anchor.iter().map(|row| row.iter().map(terms_of).collect()).collect(),
            bracket: a
                .bracket
                .iter()
                .map(|m| m.iter().map(|row| row.iter().map(terms_of).collect()).collect())
                .collect(),
            gamma: rep
                .gamma
                .iter()
                .map(|m| m.iter().map(|row| row.iter().map(terms_of).collect()).collect())
                .collect(),
            rep: rep.clone(),
        }
    }

    /// Complex with coefficients in the trivial line bundle.
    pub fn trivial(a: &LieAlgebroidPatch) -> Self {
        CeComplex::new(&Representation::trivial(a.clone(), 1))
    }

    pub fn algebroid(&self) -> &LieAlgebroidPatch {
        &self.rep.algebroid
    }

    pub fn rank(&self) -> usize {
        self.frame_weights.len()
    }

    pub fn fibre_rank(&self) -> usize {
        self.fibre_weights.len()
    }

    pub fn n_vars(&self) -> usize {
        self.var_weights.len()
    }

    pub fn var_weights(&self) -> &[u32] {
        &self.var_weights
    }

    pub fn frame_weights(&self) -> &[i64] {
        &self.frame_weights
    }

    pub fn fibre_weights(&self) -> &[i64] {
        &self.fibre_weights
    }

    pub fn weight_of(&self, b: &CeBasis) -> i64 {
        let wm = b.mono.exponents().iter().zip(&self.var_weights).map(|(&e, &w)| i64::from(e) * i64::from(w)).sum::<i64>();
        let ww: i64 = b.wedge.indices().iter().map(|&i| self.frame_weights[i]).sum();
        wm - ww + self.fibre_weights[b.fibre]
    }

    /// Checks that every structure coefficient is homogeneous of the weight
    /// that makes `d` preserve the cochain weight.
    pub fn check_graded(&self) -> Result<(), CeError> {
        let a = self.algebroid();
        let wt = |m: &Monomial| -> i64 {
            m.exponents().iter().zip(&self.var_weights).map(|(&e, &w)| i64::from(e) * i64::from(w)).sum()
        };
        let fw = &self.frame_weights;
        let bad = |what: String, m: &Monomial, want: i64| {
            Err(CeError::NotGraded(format!(
                "{what} has term {} of weight {} (expected {want})",
                m.format_with(&a.patch.vars),
                wt(m)
            )))
        };
        for (i, row) in self.anchor.iter().enumerate() {
            for (j, ts) in row.iter().enumerate() {
                let want = fw[i] + i64::from(self.var_weights[j]);
                if let Some((m, _)) = ts.iter().find(|(m, _)| wt(m) != want) {
                    return bad(format!("anchor rho({})^{}", a.frame[i], a.patch.vars[j]), m, want);
                }
            }
        }
        for (i, m1) in self.bracket.iter().enumerate() {
            for (j, row) in m1.iter().enumerate() {
                for (k, ts) in row.iter().enumerate() {
                    let want = fw[i] + fw[j] - fw[k];
                    if let Some((m, _)) = ts.iter().find(|(m, _)| wt(m) != want) {
                        return bad(format!("bracket c[{},{}]^{}", a.frame[i], a.frame[j], a.frame[k]), m, want);
                    }
                }
            }
        }
        let phi = &self.fibre_weights;
        for (i, g) in self.gamma.iter().enumerate() {
            for (b, row) in g.iter().enumerate() {
                for (al, ts) in row.iter().enumerate() {
                    let want = fw[i] + phi[al] - phi[b];
                    if let Some((m, _)) = ts.iter().find(|(m, _)| wt(m) != want) {
                        return bad(format!("connection gamma[{}]({},{})", a.frame[i], b, al), m, want);
                    }
                }
            }
        }
        Ok(())
    }

    /// `d` of a basis cochain.
    pub fn apply(&self, b: &CeBasis) -> Cochain {
        let mut out = Cochain::zero();
        let r = self.rank();
        let i_set = b.wedge;
        let mono = &b.mono;
        for j in (0..r).filter(|&j| !i_set.contains(j)) {
            let target = i_set.with(j);
            let sign = sign_of(target.position(j));
            for (l, ts) in self.anchor[j].iter().enumerate() {
                let e = mono.exponents()[l];
                if e == 0 || ts.is_empty() {
                    continue;
                }
                let mut dm = mono.clone();
                dm.0[l] -= 1;
                let scale = Rational::from_integer(e.into()) * &sign;
                for (m, c) in ts {
                    out.add(
                        CeBasis { mono: dm.mul(m), wedge: target, fibre: b.fibre },
                        c * &scale,
                    );
                }
            }
            for (g, row) in self.gamma[j].iter().enumerate() {
                for (m, c) in &row[b.fibre] {
                    out.add(
                        CeBasis { mono: mono.mul(m), wedge: target, fibre: g },
                        c * &sign,
                    );
                }
            }
        }
        for (pk, k) in i_set.indices().into_iter().enumerate() {
            let rest = i_set.without(k);
            let sk = sign_of(pk);
            for js in (0..r).filter(|&x| !rest.contains(x)) {
                for jt in (js + 1..r).filter(|&x| !rest.contains(x)) {
                    let ts = &self.bracket[js][jt][k];
                    if ts.is_empty() {
                        continue;
                    }
                    let target = rest.with(js).with(jt);
                    let s = target.position(js) + target.position(jt);
                    let sign = &sign_of(s) * &sk;
                    for (m, c) in ts {
                        out.add(
                            CeBasis { mono: mono.mul(m), wedge: target, fibre: b.fibre },
                            c * &sign,
                        );
                    }
                }
            }
        }
        out
    }

    pub fn apply_cochain(&self, c: &Cochain) -> Cochain {
        let mut out = Cochain::zero();
        for (b, x) in &c.terms {
            out.add_scaled(&self.apply(b), x);
        }
        out
    }

    /// Contraction `(ι_ε ω)(a_1, ..) = ω(ε, a_1, ..)` with a section.
    pub fn contract(&self, eps: &Section, c: &Cochain) -> Cochain {
        let mut out = Cochain::zero();
        for (b, x) in &c.terms {
            for (pos, k) in b.wedge.indices().into_iter().enumerate() {
                let sign = sign_of(pos);
                for (m, e) in eps[k].terms() {
                    out.add(
                        CeBasis { mono: b.mono.mul(m), wedge: b.wedge.without(k), fibre: b.fibre },
                        x * e * &sign,
                    );
                }
            }
        }
        out
    }

    /// Largest increase of monomial degree under `d`.
    pub fn degree_shift(&self) -> u32 {
        let deg = |ts: &Terms| ts.iter().map(|(m, _)| m.degree()).max();
        let a = self.anchor.iter().flatten().filter_map(deg).max().map(|d| d.saturating_sub(1));
        let c = self.bracket.iter().flatten().flatten().filter_map(deg).max();
        let g = self.gamma.iter().flatten().flatten().filter_map(deg).max();
        [a, c, g].into_iter().flatten().max().unwrap_or(0)
    }

    /// Basis of the stratum of `Ω^q`, sorted; `None` if infinite.
    pub fn stratum_basis(&self, q: usize, s: &Stratum) -> Option<Vec<CeBasis>> {
        let mut out = Vec::new();
        for wedge in Wedge::all(self.rank(), q) {
            let ww: i64 = wedge.indices().iter().map(|&i| self.frame_weights[i]).sum();
            for fibre in 0..self.fibre_rank() {
                let target = match s.weight {
                    Some(w) => {
                        let t = w + ww - self.fibre_weights[fibre];
                        if t < 0 {
                            continue;
                        }
                        Some(t as u64)
                    }
                    None => None,
                };
                for mono in monomials(&self.var_weights, target, s.max_degree)? {
                    out.push(CeBasis { mono, wedge, fibre });
                }
            }
        }
        out.sort();
        Some(out)
    }

    /// Matrix of `d` from `domain` to `codomain`; fails if an image leaves
    /// the codomain.
    pub fn matrix(&self, domain: &[CeBasis], codomain: &[CeBasis]) -> Result<RationalMatrix, CeError> {
        let index: BTreeMap<&CeBasis, usize> = codomain.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut m = RationalMatrix::zeros(codomain.len(), domain.len());
        for (col, b) in domain.iter().enumerate() {
            for (t, x) in self.apply(b).terms {
                let Some(&row) = index.get(&t) else {
                    return Err(CeError::OutsideCodomain(format!("{t:?}")));
                };
                m[(row, col)] = x;
            }
        }
        Ok(m)
    }

    /// Matrix of `d` on `domain`, with the codomain basis formed by every
    /// basis cochain that occurs in an image (sorted).
    pub fn matrix_onto_images(&self, domain: &[CeBasis]) -> DifferentialBlock {
        let images: Vec<Cochain> = domain.iter().map(|b| self.apply(b)).collect();
        let mut codomain: Vec<CeBasis> = images.iter().flat_map(|c| c.terms.keys().cloned()).collect();
        codomain.sort();
        codomain.dedup();
        let index: BTreeMap<&CeBasis, usize> = codomain.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut m = RationalMatrix::zeros(codomain.len(), domain.len());
        for (col, img) in images.iter().enumerate() {
            for (t, x) in &img.terms {
                m[(index[t], col)] = x.clone();
            }
        }
        DifferentialBlock { domain: domain.to_vec(), codomain, matrix: m }
    }
}

fn sign_of(k: usize) -> Rational {
    Rational::from_integer(if k % 2 == 0 { 1 } else { -1 }.into())
}

/// Matrix of `d: Ω^q → Ω^{q+1}` on one stratum. With a degree cap `N` the
/// codomain is the stratum capped at `N + shift`, where `shift` is the
/// largest degree increase of `d`; in weight mode with positive coordinate
/// weights the strata are finite and no cap is needed.
pub fn ce_differential(cx: &CeComplex, q: usize, s: &Stratum) -> Result<DifferentialBlock, CeError> {
    if s.weight.is_some() {
        cx.check_graded()?;
    }
    let domain = cx
        .stratum_basis(q, s)
        .ok_or_else(|| CeError::Infinite(format!("degree {q} stratum {s:?}")))?;
    let target = Stratum {
        weight: s.weight,
        max_degree: s.max_degree.map(|n| n + cx.degree_shift()),
    };
    let codomain = cx
        .stratum_basis(q + 1, &target)
        .ok_or_else(|| CeError::Infinite(format!("degree {} stratum {target:?}", q + 1)))?;
    let matrix = cx.matrix(&domain, &codomain)?;
    Ok(DifferentialBlock { domain, codomain, matrix })
}

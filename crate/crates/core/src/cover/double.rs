//! The Čech double complex `C^p(U; Λ^q g* ⊗ D)` of a local-system family
//! and its total complex.

use num_traits::Zero;

use crate::exact::{kernel_quotient_dims, Rational, RationalMatrix};

use super::family::LocalSystemFamily;
use super::nerve::{nerve, CoverDatum, Nerve};
use super::CoverError;

/// Cochains on a `p`-simplex are written in the frame of its first chart.
#[derive(Clone, Debug)]
pub struct CechDoubleComplex {
    pub nerve: Nerve,
    /// `dim Λ^q g* ⊗ D` for `q = 0..=rank`.
    pub fibre_dims: Vec<usize>,
    /// `delta[p][q]: C^{p,q} -> C^{p+1,q}`.
    pub delta: Vec<Vec<RationalMatrix>>,
    /// `vertical[p][q]: C^{p,q} -> C^{p,q+1}`, without the sign.
    pub vertical: Vec<Vec<RationalMatrix>>,
}

/// Position of a `(p, q)` block inside a total degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub p: usize,
    pub q: usize,
    pub start: usize,
    pub len: usize,
}

/// `Tot^n = ⊕_{p+q=n} C^{p,q}` (blocks in increasing `p`) with
/// `D = δ + (-1)^p d`.
#[derive(Clone, Debug)]
pub struct TotalComplex {
    pub blocks: Vec<Vec<Block>>,
    /// `d[n]: Tot^n -> Tot^{n+1}`.
    pub d: Vec<RationalMatrix>,
}

impl TotalComplex {
    pub fn dim(&self, n: usize) -> usize {
        self.blocks.get(n).map_or(0, |b| b.iter().map(|x| x.len).sum())
    }

    pub fn top(&self) -> usize {
        self.blocks.len().saturating_sub(1)
    }

    /// Column (`p`) of each coordinate of `Tot^n`.
    pub fn columns(&self, n: usize) -> Vec<usize> {
        self.blocks[n].iter().flat_map(|b| std::iter::repeat_n(b.p, b.len)).collect()
    }

    pub fn block(&self, n: usize, p: usize) -> Option<Block> {
        self.blocks.get(n)?.iter().copied().find(|b| b.p == p)
    }

    /// Betti numbers by brute-force ranks.
    pub fn betti(&self) -> Vec<usize> {
        (0..=self.top())
            .map(|n| {
                let rank_out = self.d.get(n).map_or(0, RationalMatrix::rank);
                let rank_in = if n == 0 { 0 } else { self.d[n - 1].rank() };
                self.dim(n) - rank_out - rank_in
            })
            .collect()
    }
}

fn place(target: &mut RationalMatrix, row0: usize, col0: usize, block: &RationalMatrix, sign: &Rational) {
    for r in 0..block.rows() {
        for c in 0..block.cols() {
            let v = &block[(r, c)];
            if !v.is_zero() {
                target[(row0 + r, col0 + c)] += v * sign;
            }
        }
    }
}

fn sign(k: usize) -> Rational {
    Rational::from_integer(if k % 2 == 0 { 1 } else { -1 }.into())
}

impl CechDoubleComplex {
    pub fn p_max(&self) -> usize {
        self.nerve.dim()
    }

    pub fn q_max(&self) -> usize {
        self.fibre_dims.len() - 1
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.nerve.count(p) * self.fibre_dims.get(q).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        (0..=self.p_max()).flat_map(|p| (0..=self.q_max()).map(move |q| (p, q))).map(|(p, q)| self.dim(p, q)).sum()
    }

    /// `δ² = 0`, `d² = 0` and `δ d = d δ`, checked exactly.
    pub fn check_identities(&self) -> Result<(), CoverError> {
        for p in 0..=self.p_max() {
            for q in 0..=self.q_max() {
                if p < self.p_max() {
                    let dd = &self.delta[p + 1][q] * &self.delta[p][q];
                    if !dd.is_zero() {
                        return Err(CoverError::NotAComplex(format!("delta^2 != 0 at ({p}, {q})")));
                    }
                }
                if q < self.q_max() {
                    let dd = &self.vertical[p][q + 1] * &self.vertical[p][q];
                    if !dd.is_zero() {
                        return Err(CoverError::NotAComplex(format!("d^2 != 0 at ({p}, {q})")));
                    }
                }
                if p < self.p_max() && q < self.q_max() {
                    let a = &self.delta[p][q + 1] * &self.vertical[p][q];
                    let b = &self.vertical[p + 1][q] * &self.delta[p][q];
                    if a != b {
                        return Err(CoverError::NotAComplex(format!("delta d != d delta at ({p}, {q})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn total(&self) -> TotalComplex {
        let top = self.p_max() + self.q_max();
        let blocks: Vec<Vec<Block>> = (0..=top)
            .map(|n| {
                let mut start = 0;
                (0..=self.p_max().min(n))
                    .filter(|&p| n - p <= self.q_max())
                    .map(|p| {
                        let len = self.dim(p, n - p);
                        let b = Block { p, q: n - p, start, len };
                        start += len;
                        b
                    })
                    .collect()
            })
            .collect();
        let dim = |n: usize| blocks[n].iter().map(|b| b.len).sum::<usize>();
        let one = sign(0);
        let d = (0..top)
            .map(|n| {
                let mut m = RationalMatrix::zeros(dim(n + 1), dim(n));
                for b in &blocks[n] {
                    for t in &blocks[n + 1] {
                        if t.p == b.p + 1 && t.q == b.q {
                            place(&mut m, t.start, b.start, &self.delta[b.p][b.q], &one);
                        } else if t.p == b.p && t.q == b.q + 1 {
                            place(&mut m, t.start, b.start, &self.vertical[b.p][b.q], &sign(b.p));
                        }
                    }
                }
                m
            })
            .collect();
        TotalComplex { blocks, d }
    }
}

/// Builds the double complex of `family` over `cover` after checking the
/// nerve, the transitions and the cocycle condition.
pub fn build_double_complex(family: &LocalSystemFamily, cover: &CoverDatum) -> Result<CechDoubleComplex, CoverError> {
    let nv = nerve(cover)?;
    family.check(cover, &nv)?;
    let r = family.rank();
    let fibre_dims: Vec<usize> = (0..=r).map(|q| family.cochain_basis(q).len()).collect();
    let pm = nv.dim();
    let delta = (0..=pm)
        .map(|p| {
            (0..=r)
                .map(|q| {
                    let k = fibre_dims[q];
                    let mut m = RationalMatrix::zeros(nv.count(p + 1) * k, nv.count(p) * k);
                    for (si, s) in nv.simplices.get(p + 1).into_iter().flatten().enumerate() {
                        for i in 0..=p + 1 {
                            let face = Nerve::face(s, i);
                            let ti = nv.index_of(&face).expect("closed nerve");
                            let blk = if i == 0 {
                                family.cochain_transport(s[0], s[1], q)
                            } else {
                                RationalMatrix::identity(k)
                            };
                            place(&mut m, si * k, ti * k, &blk, &sign(i));
                        }
                    }
                    m
                })
                .collect()
        })
        .collect();
    let vertical = (0..=pm)
        .map(|p| {
            (0..=r)
                .map(|q| {
                    let (k, k1) = (fibre_dims[q], fibre_dims.get(q + 1).copied().unwrap_or(0));
                    let mut m = RationalMatrix::zeros(nv.count(p) * k1, nv.count(p) * k);
                    if k1 > 0 {
                        for (si, s) in nv.simplices[p].iter().enumerate() {
                            place(&mut m, si * k1, si * k, &family.differential(s[0], q), &sign(0));
                        }
                    }
                    m
                })
                .collect()
        })
        .collect();
    let dc = CechDoubleComplex { nerve: nv, fibre_dims, delta, vertical };
    dc.check_identities()?;
    let tot = dc.total();
    for n in 1..tot.d.len() {
        if !(&tot.d[n] * &tot.d[n - 1]).is_zero() {
            return Err(CoverError::NotAComplex(format!("total differential squares to nonzero in degree {}", n - 1)));
        }
    }
    Ok(dc)
}

/// `H^p(nerve; H^q)` of the local system of fibre cohomologies, with the
/// maps induced by the transitions. Entry `[p][q]`.
pub fn local_system_cohomology(family: &LocalSystemFamily, nv: &Nerve) -> Result<Vec<Vec<usize>>, CoverError> {
    let r = family.rank();
    let pm = nv.dim();
    let mut out = vec![vec![0; r + 1]; pm + 1];
    for q in 0..=r {
        let h: Vec<_> = (0..nv.count(0)).map(|i| family.fibre_cohomology(i, q)).collect();
        let k = h.first().map_or(0, |s| s.betti());
        // induced map H^q(chart j) -> H^q(chart i)
        let induced = |i: usize, j: usize| -> RationalMatrix {
            let t = family.cochain_transport(i, j, q);
            let cols: Vec<Vec<Rational>> = h[j]
                .quotient
                .representatives
                .iter()
                .map(|v| {
                    let img = crate::ce::Cochain::from_vector(&h[i].basis, &t.apply(v));
                    h[i].class_of(&img).expect("transport of a cocycle is a cocycle")
                })
                .collect();
            RationalMatrix::from_columns(k, &cols)
        };
        let deltas: Vec<RationalMatrix> = (0..=pm)
            .map(|p| {
                let mut m = RationalMatrix::zeros(nv.count(p + 1) * k, nv.count(p) * k);
                for (si, s) in nv.simplices.get(p + 1).into_iter().flatten().enumerate() {
                    for i in 0..=p + 1 {
                        let ti = nv.index_of(&Nerve::face(s, i)).expect("closed nerve");
                        let blk = if i == 0 { induced(s[0], s[1]) } else { RationalMatrix::identity(k) };
                        place(&mut m, si * k, ti * k, &blk, &sign(i));
                    }
                }
                m
            })
            .collect();
        for p in 0..=pm {
            let d_in = if p == 0 { RationalMatrix::zeros(nv.count(0) * k, 0) } else { deltas[p - 1].clone() };
            out[p][q] = kernel_quotient_dims(&d_in, &deltas[p])?.betti;
        }
    }
    Ok(out)
}

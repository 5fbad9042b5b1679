//! Locally trivial families with constant fibre data per chart, glued by
//! transition isomorphisms on overlaps.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebroid::Representation;
use crate::ce::{stratum_cohomology, CeBasis, CeComplex, StratumCohomology, Stratum};
use crate::exact::{Rational, RationalMatrix};

use super::nerve::{CoverDatum, Nerve};
use super::CoverError;

/// `g_{ij}` for `i < j`: chart-`j` frame coordinates to chart-`i` ones, on
/// the Lie algebra (`frame`) and on the representation (`fibre`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub frame: RationalMatrix,
    pub fibre: RationalMatrix,
}

impl Transition {
    pub fn identity(r: usize, m: usize) -> Self {
        Transition { frame: RationalMatrix::identity(r), fibre: RationalMatrix::identity(m) }
    }

    pub fn inverse(&self) -> Option<Self> {
        Some(Transition { frame: self.frame.inverse()?, fibre: self.fibre.inverse()? })
    }

    pub fn compose(&self, other: &Transition) -> Transition {
        Transition { frame: &self.frame * &other.frame, fibre: &self.fibre * &other.fibre }
    }
}

/// Fibre Lie algebra and representation per chart (over a point), and
/// transitions on overlaps. Missing transitions are the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSystemFamily {
    pub fibres: Vec<Representation>,
    pub transitions: BTreeMap<(usize, usize), Transition>,
}

pub(crate) fn constants(rep: &Representation) -> (Vec<Vec<Vec<Rational>>>, Vec<RationalMatrix>) {
    let a = &rep.algebroid;
    let c = a
        .bracket
        .iter()
        .map(|m| m.iter().map(|row| row.iter().map(|p| p.constant_term()).collect()).collect())
        .collect();
    let g = rep
        .gamma
        .iter()
        .map(|m| RationalMatrix::from_rows(m.iter().map(|row| row.iter().map(|p| p.constant_term()).collect()).collect()))
        .collect();
    (c, g)
}

impl LocalSystemFamily {
    /// The same fibre on every chart, identity transitions.
    pub fn constant(rep: Representation, n_charts: usize) -> Self {
        LocalSystemFamily { fibres: vec![rep; n_charts], transitions: BTreeMap::new() }
    }

    pub fn with_transition(mut self, i: usize, j: usize, t: Transition) -> Self {
        if i < j {
            self.transitions.insert((i, j), t);
        } else {
            self.transitions.insert((j, i), t.inverse().expect("invertible transition"));
        }
        self
    }

    pub fn rank(&self) -> usize {
        self.fibres.first().map_or(0, |r| r.algebroid.rank())
    }

    pub fn fibre_rank(&self) -> usize {
        self.fibres.first().map_or(0, |r| r.frame.len())
    }

    /// `g_{ij}` for any ordered pair.
    pub fn transition(&self, i: usize, j: usize) -> Transition {
        let id = Transition::identity(self.rank(), self.fibre_rank());
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => id,
            std::cmp::Ordering::Less => self.transitions.get(&(i, j)).cloned().unwrap_or(id),
            std::cmp::Ordering::Greater => self
                .transitions
                .get(&(j, i))
                .map(|t| t.inverse().expect("checked invertible"))
                .unwrap_or(id),
        }
    }

    /// Shapes, invertibility, Lie isomorphism and intertwining of each
    /// transition, and the cocycle condition on triple overlaps.
    pub fn check(&self, cover: &CoverDatum, nerve: &Nerve) -> Result<(), CoverError> {
        if self.fibres.len() != cover.n_charts() {
            return Err(CoverError::Structural(format!(
                "{} fibres for {} charts",
                self.fibres.len(),
                cover.n_charts()
            )));
        }
        let (r, m) = (self.rank(), self.fibre_rank());
        for (i, f) in self.fibres.iter().enumerate() {
            if f.algebroid.n_vars() != 0 {
                return Err(CoverError::Structural(format!("fibre of {} is not over a point", cover.charts[i])));
            }
            if f.algebroid.rank() != r || f.frame.len() != m {
                return Err(CoverError::Structural(format!("fibre of {} has a different rank", cover.charts[i])));
            }
        }
        for &(i, j) in self.transitions.keys() {
            if nerve.index_of(&[i, j]).is_none() {
                return Err(CoverError::Structural(format!(
                    "transition given on {}, which is not an overlap",
                    cover.format_simplex(&[i, j])
                )));
            }
        }
        for e in nerve.simplices.get(1).into_iter().flatten() {
            let (i, j) = (e[0], e[1]);
            let edge = cover.format_simplex(e);
            let t = self.transitions.get(&(i, j)).cloned().unwrap_or_else(|| Transition::identity(r, m));
            if t.frame.rows() != r || t.frame.cols() != r || t.fibre.rows() != m || t.fibre.cols() != m {
                return Err(CoverError::NotAnIsomorphism { edge, reason: "wrong shape".into() });
            }
            if t.inverse().is_none() {
                return Err(CoverError::NotAnIsomorphism { edge, reason: "singular".into() });
            }
            check_morphism(&t, &self.fibres[j], &self.fibres[i]).map_err(|reason| CoverError::NotAnIsomorphism { edge, reason })?;
        }
        for tri in nerve.simplices.get(2).into_iter().flatten() {
            let (i, j, k) = (tri[0], tri[1], tri[2]);
            let lhs = self.transition(i, j).compose(&self.transition(j, k));
            if lhs != self.transition(i, k) {
                return Err(CoverError::Cocycle { triple: cover.format_simplex(tri) });
            }
        }
        Ok(())
    }

    /// Basis of `Λ^q g* ⊗ D`, common to all charts.
    pub fn cochain_basis(&self, q: usize) -> Vec<CeBasis> {
        CeComplex::new(&self.fibres[0]).stratum_basis(q, &Stratum::window(0)).expect("finite over a point")
    }

    /// Fibre CE differential of chart `i` in degree `q`.
    pub fn differential(&self, i: usize, q: usize) -> RationalMatrix {
        let cx = CeComplex::new(&self.fibres[i]);
        let dom = self.cochain_basis(q);
        let cod = self.cochain_basis(q + 1);
        cx.matrix(&dom, &cod).expect("closed over a point")
    }

    pub fn fibre_cohomology(&self, i: usize, q: usize) -> StratumCohomology {
        stratum_cohomology(&CeComplex::new(&self.fibres[i]), q, Stratum::window(0)).expect("finite over a point")
    }

    /// Action of `g_{ij}` on `Λ^q g* ⊗ D`.
    pub fn cochain_transport(&self, i: usize, j: usize, q: usize) -> RationalMatrix {
        cochain_action(&self.cochain_basis(q), &self.transition(i, j))
    }
}

/// `(Tω)(u_1, ..) = Q ω(P^{-1} u_1, ..)` on the span of `basis`, for an
/// invertible frame map `P`.
pub fn cochain_action(basis: &[CeBasis], t: &Transition) -> RationalMatrix {
    let inv = t.frame.inverse().expect("invertible frame map");
    let mut out = RationalMatrix::zeros(basis.len(), basis.len());
    for (col, src) in basis.iter().enumerate() {
        let rows_i = src.wedge.indices();
        for (row, dst) in basis.iter().enumerate() {
            let q_entry = &t.fibre[(dst.fibre, src.fibre)];
            if q_entry.is_zero() || dst.wedge.len() != src.wedge.len() {
                continue;
            }
            let cols_k = dst.wedge.indices();
            let minor = RationalMatrix::from_rows(
                rows_i.iter().map(|&a| cols_k.iter().map(|&k| inv[(a, k)].clone()).collect()).collect(),
            );
            let det = if rows_i.is_empty() { Rational::one() } else { minor.determinant() };
            out[(row, col)] = det * q_entry;
        }
    }
    out
}

/// `t` maps the chart-`src` data to the chart-`dst` data.
pub(crate) fn check_morphism(t: &Transition, src: &Representation, dst: &Representation) -> Result<(), String> {
    let (cs, gs) = constants(src);
    let (cd, gd) = constants(dst);
    let r = cs.len();
    let p = &t.frame;
    for k in 0..r {
        for l in k + 1..r {
            for out in 0..r {
                let mut lhs = Rational::zero();
                for mm in 0..r {
                    lhs += &cs[k][l][mm] * &p[(out, mm)];
                }
                let mut rhs = Rational::zero();
                for a in 0..r {
                    for b in 0..r {
                        let f = &p[(a, k)] * &p[(b, l)];
                        if !f.is_zero() {
                            rhs += f * &cd[a][b][out];
                        }
                    }
                }
                if lhs != rhs {
                    return Err(format!("does not preserve the bracket of generators {} and {}", k + 1, l + 1));
                }
            }
        }
    }
    let m = t.fibre.rows();
    for k in 0..r {
        let mut image = RationalMatrix::zeros(m, m);
        for a in 0..r {
            if !p[(a, k)].is_zero() {
                image = &image + &gd[a].scale(&p[(a, k)]);
            }
        }
        if &t.fibre * &gs[k] != &image * &t.fibre {
            return Err(format!("does not intertwine the action of generator {}", k + 1));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::nerve::nerve;
    use crate::exact::{int, RationalMatrix};
    use crate::samples;

    fn weyl() -> RationalMatrix {
        // h -> -h, e <-> f
        RationalMatrix::from_i64(&[&[-1, 0, 0], &[0, 0, 1], &[0, 1, 0]])
    }

    #[test]
    fn sl2_weyl_element_is_an_automorphism_of_the_adjoint() {
        let rep = Representation::adjoint(samples::sl2());
        let c = CoverDatum::interval(2);
        let f = LocalSystemFamily::constant(rep, 2).with_transition(0, 1, Transition { frame: weyl(), fibre: weyl() });
        assert!(f.check(&c, &nerve(&c).unwrap()).is_ok());
    }

    #[test]
    fn non_automorphism_is_rejected() {
        let c = CoverDatum::interval(2);
        let p = RationalMatrix::from_i64(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 1]]);
        let f = LocalSystemFamily::constant(samples::trivial_line(&samples::sl2()), 2)
            .with_transition(0, 1, Transition { frame: p, fibre: RationalMatrix::identity(1) });
        let err = f.check(&c, &nerve(&c).unwrap()).unwrap_err();
        assert!(matches!(err, CoverError::NotAnIsomorphism { .. }), "{err}");
    }

    #[test]
    fn cocycle_failure_names_the_triple() {
        let c = CoverDatum::new(vec!["a".into(), "b".into(), "c".into()], [vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 1, 2]]);
        let ab = samples::abelian(1);
        let twice = Transition { frame: RationalMatrix::from_rows(vec![vec![int(2)]]), fibre: RationalMatrix::identity(1) };
        let f = LocalSystemFamily::constant(samples::trivial_line(&ab), 3).with_transition(0, 1, twice);
        let err = f.check(&c, &nerve(&c).unwrap()).unwrap_err();
        assert_eq!(err, CoverError::Cocycle { triple: "{a,b,c}".into() });
    }

    #[test]
    fn transport_is_a_chain_map() {
        let rep = Representation::adjoint(samples::sl2());
        let f = LocalSystemFamily::constant(rep, 2).with_transition(0, 1, Transition { frame: weyl(), fibre: weyl() });
        for q in 0..3 {
            let lhs = &f.differential(0, q) * &f.cochain_transport(0, 1, q);
            let rhs = &f.cochain_transport(0, 1, q + 1) * &f.differential(1, q);
            assert_eq!(lhs, rhs);
        }
    }
}

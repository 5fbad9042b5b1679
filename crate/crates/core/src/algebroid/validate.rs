//! Axiom checks for algebroids and flatness checks for representations.
//!
//! Truncated data loses its top-order terms under derivatives and products,
//! so identities are certified only through order `N - d_max`, where `d_max`
//! is the largest degree appearing in the structure data.

use std::fmt;

use crate::exact::{Monomial, Rational, TruncatedPoly};

use super::patch::{LieAlgebroidPatch, Representation};
use super::AlgebroidError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Antisymmetry,
    Jacobi,
    AnchorMorphism,
    Flatness,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Antisymmetry => "antisymmetry",
            Axiom::Jacobi => "jacobi",
            Axiom::AnchorMorphism => "anchor-bracket",
            Axiom::Flatness => "flatness",
        };
        f.write_str(s)
    }
}

/// Lowest-order coefficient at which an identity fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Entry of the failing identity (meaning depends on the axiom, see
    /// `description`).
    pub indices: Vec<usize>,
    pub monomial: Monomial,
    pub coefficient: Rational,
    pub description: String,
}

impl Witness {
    pub fn order(&self) -> u32 {
        self.monomial.degree()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
    pub certified_order: u32,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Tracks the lowest-order nonzero coefficient seen over many entries.
struct Lowest {
    limit: u32,
    best: Option<Witness>,
}

impl Lowest {
    fn new(limit: u32) -> Self {
        Lowest { limit, best: None }
    }

    fn offer(&mut self, p: &TruncatedPoly, indices: &[usize], describe: impl FnOnce() -> String) {
        let Some((m, c)) = p.terms().find(|(m, _)| m.degree() <= self.limit) else {
            return;
        };
        let better = self
            .best
            .as_ref()
            .is_none_or(|b| m.degree() < b.monomial.degree());
        if better {
            self.best = Some(Witness {
                indices: indices.to_vec(),
                monomial: m.clone(),
                coefficient: c.clone(),
                description: describe(),
            });
        }
    }

    fn into_check(self, axiom: Axiom) -> AxiomCheck {
        AxiomCheck {
            axiom,
            passed: self.best.is_none(),
            witness: self.best,
        }
    }
}

/// Order through which identities are certified for `a`.
pub fn certified_order(a: &LieAlgebroidPatch, requested: u32) -> u32 {
    requested
        .min(a.order())
        .min(a.order().saturating_sub(a.max_structure_degree()))
}

/// Checks antisymmetry, the Jacobi identity on frame triples and that the
/// anchor maps brackets to commutators of vector fields.
pub fn validate_algebroid(a: &LieAlgebroidPatch, order: u32) -> ValidationReport {
    let limit = certified_order(a, order);
    let r = a.rank();
    let n = a.n_vars();
    let f = &a.frame;

    let mut anti = Lowest::new(limit);
    for i in 0..r {
        for j in i..r {
            for k in 0..r {
                let s = &a.bracket[i][j][k] + &a.bracket[j][i][k];
                anti.offer(&s, &[i, j, k], || {
                    format!("c[{},{}]^{} + c[{},{}]^{}", f[i], f[j], f[k], f[j], f[i], f[k])
                });
            }
        }
    }

    let mut jacobi = Lowest::new(limit);
    for i in 0..r {
        for j in i + 1..r {
            for k in j + 1..r {
                for m in 0..r {
                    let s = jacobiator_component(a, i, j, k, m);
                    jacobi.offer(&s, &[i, j, k, m], || {
                        format!("jacobiator({},{},{}) component {}", f[i], f[j], f[k], f[m])
                    });
                }
            }
        }
    }

    let mut anchor = Lowest::new(limit);
    for i in 0..r {
        for j in i + 1..r {
            for l in 0..n {
                let mut lhs = a.patch.zero();
                for k in 0..r {
                    let c = &a.bracket[i][j][k];
                    if !c.is_zero() && !a.anchor[k][l].is_zero() {
                        lhs = &lhs + &(c * &a.anchor[k][l]);
                    }
                }
                let rhs = &a.anchor_apply(i, &a.anchor[j][l]) - &a.anchor_apply(j, &a.anchor[i][l]);
                let diff = &lhs - &rhs;
                anchor.offer(&diff, &[i, j, l], || {
                    format!(
                        "rho([{},{}]) - [rho({}),rho({})] along {}",
                        f[i], f[j], f[i], f[j], a.patch.vars[l]
                    )
                });
            }
        }
    }

    ValidationReport {
        checks: vec![
            anti.into_check(Axiom::Antisymmetry),
            jacobi.into_check(Axiom::Jacobi),
            anchor.into_check(Axiom::AnchorMorphism),
        ],
        certified_order: limit,
    }
}

/// Component `m` of `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]`.
pub fn jacobiator_component(a: &LieAlgebroidPatch, i: usize, j: usize, k: usize, m: usize) -> TruncatedPoly {
    let mut s = a.patch.zero();
    for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
        for l in 0..a.rank() {
            let c1 = &a.bracket[x][y][l];
            let c2 = &a.bracket[l][z][m];
            if !c1.is_zero() && !c2.is_zero() {
                s = &s + &(c1 * c2);
            }
        }
        s = &s - &a.anchor_apply(z, &a.bracket[x][y][m]);
    }
    s
}

/// Curvature matrix entry `R(e_i, e_j)^{b a}` of a representation:
/// `rho_i(G_j) - rho_j(G_i) + [G_i, G_j] - sum_k c_ij^k G_k`.
pub fn curvature(rep: &Representation, i: usize, j: usize) -> Vec<Vec<TruncatedPoly>> {
    let a = &rep.algebroid;
    let m = rep.rank();
    let g = &rep.gamma;
    (0..m)
        .map(|b| {
            (0..m)
                .map(|al| {
                    let mut s = &a.anchor_apply(i, &g[j][b][al]) - &a.anchor_apply(j, &g[i][b][al]);
                    for c in 0..m {
                        if !g[i][b][c].is_zero() && !g[j][c][al].is_zero() {
                            s = &s + &(&g[i][b][c] * &g[j][c][al]);
                        }
                        if !g[j][b][c].is_zero() && !g[i][c][al].is_zero() {
                            s = &s - &(&g[j][b][c] * &g[i][c][al]);
                        }
                    }
                    for k in 0..a.rank() {
                        let ck = &a.bracket[i][j][k];
                        if !ck.is_zero() && !g[k][b][al].is_zero() {
                            s = &s - &(ck * &g[k][b][al]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Largest degree appearing in the connection matrices.
pub fn connection_degree(rep: &Representation) -> u32 {
    rep.gamma
        .iter()
        .flatten()
        .flatten()
        .filter_map(TruncatedPoly::degree)
        .max()
        .unwrap_or(0)
}

/// Checks that the curvature vanishes through the certified order.
pub fn validate_representation(rep: &Representation, order: u32) -> Result<ValidationReport, AlgebroidError> {
    rep.check_shapes()?;
    let a = &rep.algebroid;
    let d_max = a.max_structure_degree().max(connection_degree(rep));
    let limit = order.min(a.order()).min(a.order().saturating_sub(d_max));
    let mut flat = Lowest::new(limit);
    let r = a.rank();
    for i in 0..r {
        for j in i + 1..r {
            let curv = curvature(rep, i, j);
            for (b, row) in curv.iter().enumerate() {
                for (al, p) in row.iter().enumerate() {
                    flat.offer(p, &[i, j, b, al], || {
                        format!(
                            "R({},{}) entry ({},{})",
                            a.frame[i], a.frame[j], rep.frame[b], rep.frame[al]
                        )
                    });
                }
            }
        }
    }
    Ok(ValidationReport {
        checks: vec![flat.into_check(Axiom::Flatness)],
        certified_order: limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::patch::Patch;
    use crate::exact::{int, parse_poly};
    use crate::samples;

    #[test]
    fn abelian_passes() {
        let a = samples::abelian(2);
        assert!(validate_algebroid(&a, 0).all_passed());
    }

    #[test]
    fn sl2_passes() {
        let a = samples::sl2();
        assert!(validate_algebroid(&a, 0).all_passed());
    }

    #[test]
    fn tangent_patch_passes() {
        let a = samples::tangent(&["x", "y"], 5);
        let rep = validate_algebroid(&a, 5);
        assert!(rep.all_passed());
        assert_eq!(rep.certified_order, 5);
    }

    #[test]
    fn one_sided_perturbation_of_sl2_breaks_jacobi_at_order_one() {
        let mut a = samples::sl2_over(&["x"], 4);
        let (e, f, h) = (1, 2, 0);
        a.bracket[e][f][h] = parse_poly("1 + x", &a.patch.vars, 4).unwrap();
        let report = validate_algebroid(&a, 4);
        let jac = report.check(Axiom::Jacobi).unwrap();
        assert!(!jac.passed);
        let w = jac.witness.as_ref().unwrap();
        assert_eq!(w.order(), 1);
        assert_eq!(w.indices, vec![0, 1, 2, h]);
        assert_eq!(w.coefficient, int(2));
        let anti = report.check(Axiom::Antisymmetry).unwrap();
        assert_eq!(anti.witness.as_ref().unwrap().order(), 1);
    }

    #[test]
    fn symmetric_rescaling_of_ef_bracket_is_still_lie() {
        let mut a = samples::sl2_over(&["x"], 4);
        a.set_bracket(1, 2, 0, parse_poly("1 + x", &a.patch.vars, 4).unwrap());
        assert!(validate_algebroid(&a, 4).all_passed());
    }

    #[test]
    fn anchor_not_a_morphism_is_detected() {
        let patch = Patch::new(vec!["x".into()], 4);
        let mut a = LieAlgebroidPatch::trivial(patch, vec!["a".into(), "b".into()]);
        a.anchor[0][0] = a.patch.constant(int(1));
        a.anchor[1][0] = a.patch.var(0);
        let report = validate_algebroid(&a, 4);
        let chk = report.check(Axiom::AnchorMorphism).unwrap();
        assert!(!chk.passed);
        assert_eq!(chk.witness.as_ref().unwrap().order(), 0);
    }

    #[test]
    fn trivial_and_adjoint_representations_are_flat() {
        let a = samples::sl2();
        let triv = Representation::trivial(a.clone(), 2);
        assert!(validate_representation(&triv, 0).unwrap().all_passed());
        let ad = Representation::adjoint(a);
        assert!(validate_representation(&ad, 0).unwrap().all_passed());
    }

    #[test]
    fn curved_connection_reports_witness() {
        let patch = Patch::point(0);
        let mut a = LieAlgebroidPatch::trivial(patch, vec!["e1".into(), "e2".into()]);
        a.set_bracket(0, 1, 0, a.patch.constant(int(1)));
        assert!(validate_algebroid(&a, 0).all_passed());
        let one = a.patch.constant(int(1));
        let zero = a.patch.zero();
        let rep = Representation::new(a, vec!["f".into()], vec![vec![vec![one]], vec![vec![zero]]]).unwrap();
        let report = validate_representation(&rep, 0).unwrap();
        let w = report.checks[0].witness.as_ref().unwrap();
        assert_eq!(w.indices, vec![0, 1, 0, 0]);
        assert_eq!(w.coefficient, int(-1));
    }

    #[test]
    fn gamma_shape_mismatch_is_an_error() {
        let a = samples::abelian(2);
        let z = a.patch.zero();
        let bad = Representation {
            algebroid: a,
            frame: vec!["f".into()],
            gamma: vec![vec![vec![z]]],
            frame_weights: None,
        };
        assert!(matches!(
            validate_representation(&bad, 0),
            Err(AlgebroidError::RankMismatch(_))
        ));
    }

    #[test]
    fn frame_jacobiator_matches_section_bracket() {
        let a = samples::heisenberg_action(3);
        for (i, j, k) in [(0, 1, 2)] {
            let ei = a.basis_section(i);
            let ej = a.basis_section(j);
            let ek = a.basis_section(k);
            let t1 = a.section_bracket(&a.section_bracket(&ei, &ej), &ek);
            let t2 = a.section_bracket(&a.section_bracket(&ej, &ek), &ei);
            let t3 = a.section_bracket(&a.section_bracket(&ek, &ei), &ej);
            for m in 0..a.rank() {
                let s = &(&t1[m] + &t2[m]) + &t3[m];
                assert_eq!(s, jacobiator_component(&a, i, j, k, m));
            }
        }
    }
}

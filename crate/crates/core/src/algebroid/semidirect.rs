use super::patch::{LieAlgebroidPatch, Representation};
use super::validate::validate_representation;
use super::AlgebroidError;

/// Semidirect product `A ⋉ D` of an algebroid with a flat representation:
/// frame `e_1..e_r, f_1..f_m`, bracket `[(a,s),(a',s')] = ([a,a'], ∇_a s' - ∇_a' s)`
/// and anchor `(a,s) ↦ rho(a)`.
pub fn semidirect(rep: &Representation) -> Result<LieAlgebroidPatch, AlgebroidError> {
    let a = &rep.algebroid;
    let report = validate_representation(rep, a.order())?;
    if let Some(fail) = report.first_failure() {
        let w = fail.witness.as_ref().expect("failed check has a witness");
        return Err(AlgebroidError::NotARepresentation(format!(
            "{} has coefficient {} at {}",
            w.description,
            w.coefficient,
            w.monomial.format_with(&a.patch.vars)
        )));
    }
    let r = a.rank();
    let m = rep.rank();
    let mut frame = a.frame.clone();
    frame.extend(rep.frame.iter().cloned());
    let mut out = LieAlgebroidPatch::trivial(a.patch.clone(), frame);
    for i in 0..r {
        out.anchor[i] = a.anchor[i].clone();
        for j in 0..r {
            for k in 0..r {
                out.bracket[i][j][k] = a.bracket[i][j][k].clone();
            }
        }
        for al in 0..m {
            for b in 0..m {
                out.set_bracket(i, r + al, r + b, rep.gamma[i][b][al].clone());
            }
        }
    }
    if a.patch.weights.is_some() || a.frame_weights.is_some() {
        let mut w = a.effective_frame_weights();
        w.extend(rep.effective_frame_weights());
        out.frame_weights = Some(w);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::validate::validate_algebroid;
    use crate::exact::int;
    use crate::samples;

    #[test]
    fn abelian_with_trivial_rep_is_a_direct_sum() {
        let a = samples::abelian(2);
        let s = semidirect(&Representation::trivial(a, 3)).unwrap();
        assert_eq!(s.rank(), 5);
        assert!(s.bracket.iter().flatten().flatten().all(|p| p.is_zero()));
        assert!(validate_algebroid(&s, 0).all_passed());
    }

    #[test]
    fn sl2_adjoint_semidirect_table() {
        let a = samples::sl2();
        let s = semidirect(&Representation::adjoint(a.clone())).unwrap();
        assert_eq!(s.rank(), 6);
        assert!(validate_algebroid(&s, 0).all_passed());
        // [h, e'] = 2e', [e, f'] = h', [e', f'] = 0
        assert_eq!(s.bracket[0][4][4].constant_term(), int(2));
        assert_eq!(s.bracket[1][5][3].constant_term(), int(1));
        assert!(s.bracket[4][5].iter().all(|p| p.is_zero()));
        // the quotient by the D-block is A
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(s.bracket[i][j][k], a.bracket[i][j][k]);
                }
                assert!(s.bracket[i][j][3..].iter().all(|p| p.is_zero()));
            }
        }
    }

    #[test]
    fn curved_connection_is_rejected() {
        let patch = crate::algebroid::Patch::point(0);
        let mut a = LieAlgebroidPatch::trivial(patch, vec!["e1".into(), "e2".into()]);
        a.set_bracket(0, 1, 0, a.patch.constant(int(1)));
        let one = a.patch.constant(int(1));
        let zero = a.patch.zero();
        let rep = Representation::new(a, vec!["f".into()], vec![vec![vec![one]], vec![vec![zero]]]).unwrap();
        assert!(matches!(semidirect(&rep), Err(AlgebroidError::NotARepresentation(_))));
    }

    #[test]
    fn anchor_kills_the_module_block() {
        let a = samples::heisenberg_action(3);
        let s = semidirect(&Representation::trivial(a, 2)).unwrap();
        assert!(s.anchor[3..].iter().flatten().all(|p| p.is_zero()));
        assert!(validate_algebroid(&s, 3).all_passed());
    }
}

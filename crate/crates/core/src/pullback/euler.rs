//! Euler sections: `rho(ε)` is the weight Euler vector field, and the Cartan
//! homotopy `d ι_ε + ι_ε d` acts on each weight stratum as the weight.

use crate::algebroid::{Representation, Section};
use crate::ce::{weight_cohomology, CeBasis, CeComplex, Cochain, CohomologyReport, JetWindow, Stratum};
use crate::exact::{int, Monomial, Rational, TruncatedPoly};

use super::PullbackError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerSection {
    pub coefficients: Section,
}

impl EulerSection {
    pub fn new(coefficients: Section) -> Self {
        EulerSection { coefficients }
    }
}

#[derive(Clone, Debug)]
pub struct EulerReport {
    /// Number of basis cochains on which the Cartan identity was verified.
    pub cochains_checked: usize,
    /// `(degree, weight, betti)` for every computed stratum of nonzero weight.
    pub nonzero_weight: Vec<(usize, i64, usize)>,
    pub weight_zero_betti: Vec<usize>,
    /// All nonzero-weight betti numbers vanish, as the homotopy predicts.
    pub agreement: bool,
    pub cohomology: CohomologyReport,
}

/// Checks `rho(ε) = sum w_i x_i d/dx_i` exactly.
pub fn check_euler_field(rep: &Representation, eps: &EulerSection) -> Result<(), PullbackError> {
    let a = &rep.algebroid;
    if eps.coefficients.len() != a.rank() {
        return Err(PullbackError::Structural(format!(
            "Euler section has {} coefficients, algebroid has rank {}",
            eps.coefficients.len(),
            a.rank()
        )));
    }
    let weights = a.patch.weights.clone().map(|w| w.weights().to_vec()).unwrap_or_else(|| vec![0; a.n_vars()]);
    let field = a.anchor_of_section(&eps.coefficients);
    for (j, got) in field.iter().enumerate() {
        let want = TruncatedPoly::from_terms(
            a.n_vars(),
            a.order(),
            [(Monomial::var(a.n_vars(), j), int(i64::from(weights[j])))],
        );
        if got != &want {
            return Err(PullbackError::NotEuler(format!(
                "rho(eps) has component {} along {}, expected {}",
                got.format_with(&a.patch.vars),
                a.patch.vars[j],
                want.format_with(&a.patch.vars)
            )));
        }
    }
    Ok(())
}

/// Lie derivative `L_ε = d ι_ε + ι_ε d` of a basis cochain.
pub fn lie_derivative(cx: &CeComplex, eps: &EulerSection, b: &CeBasis) -> Cochain {
    let c = Cochain::basis(b.clone());
    let mut out = cx.apply_cochain(&cx.contract(&eps.coefficients, &c));
    out.add_scaled(&cx.contract(&eps.coefficients, &cx.apply(b)), &int(1));
    out
}

/// Verifies the Cartan identity on every basis cochain of the weight
/// strata `lo..=hi` (capped at the window's last order when some
/// coordinates have weight zero), then compares with the betti numbers.
pub fn euler_homotopy_verify(
    rep: &Representation,
    eps: &EulerSection,
    (lo, hi): (i64, i64),
    window: JetWindow,
) -> Result<EulerReport, PullbackError> {
    check_euler_field(rep, eps)?;
    let cx = CeComplex::new(rep);
    cx.check_graded()?;
    let finite = cx.var_weights().iter().all(|&w| w > 0);
    let cap = if finite { None } else { Some(window.end) };
    let mut checked = 0;
    for w in lo..=hi {
        for q in 0..=cx.rank() {
            let basis = cx
                .stratum_basis(q, &Stratum { weight: Some(w), max_degree: cap })
                .expect("bounded stratum");
            for b in basis {
                let got = lie_derivative(&cx, eps, &b);
                let mut want = Cochain::zero();
                want.add(b.clone(), Rational::from_integer(w.into()));
                if got != want {
                    let a = cx.algebroid();
                    return Err(PullbackError::CartanFails {
                        degree: q,
                        weight: w,
                        cochain: b.format_with(&a.patch.vars, &a.frame, &cx.rep.frame),
                    });
                }
                checked += 1;
            }
        }
    }
    let cohomology = weight_cohomology(&cx, (lo, hi), window)?;
    let nonzero_weight: Vec<(usize, i64, usize)> = cohomology
        .entries
        .iter()
        .filter(|e| e.weight != Some(0))
        .map(|e| (e.degree, e.weight.unwrap_or(0), e.betti))
        .collect();
    let weight_zero_betti = (0..=cx.rank())
        .map(|q| cohomology.at(q, 0).map_or(0, |e| e.betti))
        .collect();
    let agreement = nonzero_weight.iter().all(|&(_, _, b)| b == 0) && cohomology.conclusive();
    Ok(EulerReport { cochains_checked: checked, nonzero_weight, weight_zero_betti, agreement, cohomology })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::LieAlgebroidPatch;
    use crate::samples;

    fn eps_on(a: &LieAlgebroidPatch, frame: &str, var: usize) -> EulerSection {
        let mut c = vec![a.patch.zero(); a.rank()];
        c[a.frame_index(frame).unwrap()] = a.patch.var(var);
        EulerSection::new(c)
    }

    #[test]
    fn tangent_with_one_weighted_coordinate() {
        let mut a = samples::tangent(&["x", "y"], 8);
        a.patch = a.patch.clone().with_weights(vec![0, 1]);
        let eps = eps_on(&a, "dy", 1);
        let rep = samples::trivial_line(&a);
        let r = euler_homotopy_verify(&rep, &eps, (0, 3), JetWindow::new(1, 4, 3)).unwrap();
        assert!(r.agreement);
        assert!(r.cochains_checked > 0);
        assert_eq!(r.weight_zero_betti, vec![1, 0, 0]);
    }

    #[test]
    fn zero_anchor_has_no_euler_section() {
        let mut a = samples::sl2_over(&["y"], 4);
        a.patch = a.patch.clone().with_weights(vec![1]);
        let eps = EulerSection::new(vec![a.patch.var(0), a.patch.zero(), a.patch.zero()]);
        let rep = samples::trivial_line(&a);
        assert!(matches!(
            euler_homotopy_verify(&rep, &eps, (0, 1), JetWindow::default()),
            Err(PullbackError::NotEuler(_))
        ));
    }

    #[test]
    fn sl2_times_weighted_line_concentrates_in_weight_zero() {
        let a = samples::sl2_times_tangent(&["y"], 8, Some(vec![1]));
        let eps = eps_on(&a, "dy", 0);
        let rep = samples::trivial_line(&a);
        let r = euler_homotopy_verify(&rep, &eps, (-1, 3), JetWindow::default()).unwrap();
        assert!(r.agreement);
        assert_eq!(r.weight_zero_betti, vec![1, 0, 0, 1, 0]);
    }

    #[test]
    fn affine_line_scaling_generator_is_euler() {
        let mut a = samples::affine_line(6);
        a.patch = a.patch.clone().with_weights(vec![1]);
        let eps = EulerSection::new(vec![a.patch.zero(), a.patch.constant(int(1))]);
        let rep = samples::trivial_line(&a);
        let r = euler_homotopy_verify(&rep, &eps, (0, 2), JetWindow::default());
        assert!(r.is_ok(), "{r:?}");
    }
}

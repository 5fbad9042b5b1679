//! Injectivity of the restriction `H^n(A; D) -> H^n(A_x; D_x)` to the
//! fibre over a point of chart `x`, under the vanishing hypotheses.

use std::fmt;

use crate::ce::Cochain;
use crate::exact::{kernel_quotient_dims, RationalMatrix};

use super::double::build_double_complex;
use super::family::LocalSystemFamily;
use super::nerve::{nerve, CoverDatum};
use super::CoverError;

/// Which of the alternative hypotheses made the claim applicable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `H^{n-1}` of the fibre vanishes.
    VanishingBelow,
    /// The base is simply connected and `H^{n-1}` of the fibre is finite.
    SimplyConnected,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::VanishingBelow => write!(f, "c1 (H^(n-1) of the fibre vanishes)"),
            Branch::SimplyConnected => write!(f, "c2 (simply connected base)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Localization {
    HypothesesUnmet { reasons: Vec<String> },
    Checked {
        branch: Branch,
        /// `dim H^n(A; D)`.
        total: usize,
        /// `dim H^n(A_x; D_x)`.
        fibre: usize,
        /// Rank of the restriction on total-complex representatives.
        rank: usize,
        injective: bool,
    },
}

impl fmt::Display for Localization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Localization::HypothesesUnmet { reasons } => write!(f, "hypotheses unmet: {}", reasons.join("; ")),
            Localization::Checked { branch, total, fibre, rank, injective } => write!(
                f,
                "{} via {branch}: dim H^n = {total}, dim H^n(fibre) = {fibre}, restriction rank {rank}",
                if *injective { "injective" } else { "NOT injective" }
            ),
        }
    }
}

/// Checks the hypotheses (vanishing of the fibre cohomology below `n - 1`,
/// connected nerve, and either vanishing in degree `n - 1` or a simply
/// connected base) and, when they hold, the rank of the restriction.
pub fn localization_check(
    family: &LocalSystemFamily,
    cover: &CoverDatum,
    x: usize,
    n: usize,
) -> Result<Localization, CoverError> {
    let nv = nerve(cover)?;
    family.check(cover, &nv)?;
    if x >= cover.n_charts() {
        return Err(CoverError::Structural(format!("no chart {x}")));
    }
    let r = family.rank();
    let fibre_betti = |q: usize| if q <= r { family.fibre_cohomology(x, q).betti() } else { 0 };
    let mut reasons = Vec::new();
    for q in 0..n.saturating_sub(1) {
        let b = fibre_betti(q);
        if b != 0 {
            reasons.push(format!("a) fails: H^{q} of the fibre has dimension {b}"));
        }
    }
    if !nv.is_connected() {
        reasons.push("b) fails: the nerve is not connected".into());
    }
    let below = if n == 0 { 0 } else { fibre_betti(n - 1) };
    let simply_connected = cover.simply_connected.unwrap_or_else(|| nv.is_tree());
    let branch = if below == 0 {
        Some(Branch::VanishingBelow)
    } else if simply_connected {
        Some(Branch::SimplyConnected)
    } else {
        reasons.push(format!(
            "c1) fails: H^{} of the fibre has dimension {below}; c2) fails: the base is not known to be simply connected",
            n - 1
        ));
        None
    };
    let Some(branch) = branch.filter(|_| reasons.is_empty()) else {
        return Ok(Localization::HypothesesUnmet { reasons });
    };

    let dc = build_double_complex(family, cover)?;
    let tot = dc.total();
    let fibre = family.fibre_cohomology(x, n.min(r));
    let fibre_dim = if n <= r { fibre.betti() } else { 0 };
    if n > tot.top() {
        return Ok(Localization::Checked { branch, total: 0, fibre: fibre_dim, rank: 0, injective: true });
    }
    let d_in = if n == 0 { RationalMatrix::zeros(tot.dim(0), 0) } else { tot.d[n - 1].clone() };
    let d_out = tot.d.get(n).cloned().unwrap_or_else(|| RationalMatrix::zeros(0, tot.dim(n)));
    let hq = kernel_quotient_dims(&d_in, &d_out)?;
    let block = tot.block(n, 0);
    let cols = hq
        .representatives
        .iter()
        .map(|z| {
            let Some(b) = block else {
                return Ok(vec![]);
            };
            // the (0, n) component on chart x is a fibre cocycle
            let k = dc.fibre_dims[n];
            let start = b.start + x * k;
            let c = Cochain::from_vector(&fibre.basis, &z[start..start + k]);
            fibre
                .class_of(&c)
                .ok_or_else(|| CoverError::NotAComplex("restriction of a total cocycle is not a fibre cocycle".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rank = if fibre_dim == 0 || cols.is_empty() { 0 } else { RationalMatrix::from_columns(fibre_dim, &cols).rank() };
    Ok(Localization::Checked { branch, total: hq.betti, fibre: fibre_dim, rank, injective: rank == hq.betti })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::Representation;
    use crate::samples;

    #[test]
    fn interval_with_abelian_fibre_in_degree_one() {
        let c = CoverDatum::interval(2);
        let f = LocalSystemFamily::constant(samples::trivial_line(&samples::abelian(1)), 2);
        let v = localization_check(&f, &c, 0, 1).unwrap();
        assert_eq!(v, Localization::Checked { branch: Branch::SimplyConnected, total: 1, fibre: 1, rank: 1, injective: true });
    }

    #[test]
    fn acyclic_fibre_over_a_circle_is_vacuous() {
        let c = CoverDatum::circle(3);
        let f = LocalSystemFamily::constant(Representation::adjoint(samples::sl2()), 3);
        for n in 0..4 {
            let v = localization_check(&f, &c, 1, n).unwrap();
            assert!(matches!(v, Localization::Checked { branch: Branch::VanishingBelow, total: 0, injective: true, .. }));
        }
    }

    #[test]
    fn circle_with_abelian_fibre_is_outside_the_hypotheses() {
        let c = CoverDatum::circle(3);
        let f = LocalSystemFamily::constant(samples::trivial_line(&samples::abelian(1)), 3);
        let v = localization_check(&f, &c, 0, 1).unwrap();
        assert!(matches!(v, Localization::HypothesesUnmet { .. }), "{v}");
    }

    #[test]
    fn disconnected_base_is_outside_the_hypotheses() {
        let c = CoverDatum::new(vec!["a".into(), "b".into()], []);
        let f = LocalSystemFamily::constant(Representation::adjoint(samples::sl2()), 2);
        let Localization::HypothesesUnmet { reasons } = localization_check(&f, &c, 0, 1).unwrap() else {
            panic!("expected unmet hypotheses");
        };
        assert!(reasons[0].starts_with("b)"));
    }
}

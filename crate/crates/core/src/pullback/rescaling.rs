//! The rescaling family `m(x, y, t) = (x, t y)` of a vector bundle and the
//! three equivalent transversality conditions for the zero section.

use num_traits::{One, Zero};

use crate::algebroid::{format_point, LieAlgebroidPatch};
use crate::exact::{int, polymatrix, rat, Rational, RationalMatrix};

/// One verdict together with the first sample point where it failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<String>,
}

impl Verdict {
    fn from_failures(mut failures: impl Iterator<Item = String>) -> Self {
        match failures.next() {
            Some(w) => Verdict { holds: false, witness: Some(w) },
            None => Verdict { holds: true, witness: None },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RescalingReport {
    pub fibre: Vec<usize>,
    /// The zero section is transverse to `A`.
    pub zero_section: Verdict,
    /// Every `m_t` is transverse to `A`; for `t != 0` this is symbolic
    /// (`m_t` is a diffeomorphism), `t = 0` is checked exactly.
    pub rescaling: Verdict,
    /// `m` is transverse to `A` and `m^!(A)` is a family over the `t`-line.
    pub family: Verdict,
    pub points_checked: usize,
    pub agree: bool,
}

/// Parameter values at which the family condition is checked.
pub fn sample_parameters() -> Vec<Rational> {
    vec![int(0), int(1), int(2), int(-1), rat(1, 2)]
}

fn grid(dim: usize, values: &[Rational]) -> Vec<Vec<Rational>> {
    if dim > 3 {
        let mut pts = vec![vec![Rational::zero(); dim]];
        for i in 0..dim {
            for v in values.iter().filter(|v| !v.is_zero()) {
                let mut p = vec![Rational::zero(); dim];
                p[i] = v.clone();
                pts.push(p);
            }
        }
        pts.push(vec![Rational::one(); dim]);
        return pts;
    }
    let mut pts = vec![Vec::new()];
    for _ in 0..dim {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }
    pts
}

fn assemble(base: &[usize], fibre: &[usize], x: &[Rational], y: &[Rational], n: usize) -> Vec<Rational> {
    let mut p = vec![Rational::zero(); n];
    for (&i, v) in base.iter().zip(x) {
        p[i] = v.clone();
    }
    for (&i, v) in fibre.iter().zip(y) {
        p[i] = v.clone();
    }
    p
}

fn unit(n: usize, i: usize, c: Rational) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = c;
    v
}

/// Anchor images at `p` as columns.
fn anchor_columns(a: &LieAlgebroidPatch, p: &[Rational]) -> Vec<Vec<Rational>> {
    let m = polymatrix::eval_at(&a.anchor, a.n_vars(), p);
    (0..m.rows()).map(|i| m.row(i)).collect()
}

/// Decides the three conditions at sample points of the base (a grid in
/// the weight-0 coordinates, plus `extra_points`), fibre points in
/// `{-1, 0, 1}` and the parameters of [`sample_parameters`].
pub fn rescaling_family(a: &LieAlgebroidPatch, fibre: &[usize], extra_points: &[Vec<Rational>]) -> RescalingReport {
    let n = a.n_vars();
    let base: Vec<usize> = (0..n).filter(|i| !fibre.contains(i)).collect();
    let values = [int(0), int(1), int(-1)];
    let mut xs = grid(base.len(), &values);
    for p in extra_points {
        let x: Vec<Rational> = base.iter().map(|&i| p[i].clone()).collect();
        if !xs.contains(&x) {
            xs.push(x);
        }
    }
    let ys = grid(fibre.len(), &values);
    let y0 = vec![Rational::zero(); fibre.len()];
    let mut checked = 0;

    // (i): T(zero section) + im rho = TE along y = 0
    let zero_section = {
        let mut fails = Vec::new();
        for x in &xs {
            let p = assemble(&base, fibre, x, &y0, n);
            let mut cols: Vec<Vec<Rational>> = base.iter().map(|&i| unit(n, i, int(1))).collect();
            cols.extend(anchor_columns(a, &p));
            let rank = RationalMatrix::from_columns(n, &cols).rank();
            checked += 1;
            if rank < n {
                fails.push(format!("zero section at ({}): rank {rank} < {n}", format_point(&p)));
            }
        }
        Verdict::from_failures(fails.into_iter())
    };

    // (ii): m_0 has image the zero section and differential T(zero section);
    // m_t for t != 0 is a diffeomorphism, so transverse
    let rescaling = {
        let mut fails = Vec::new();
        for x in &xs {
            for y in &ys {
                let p = assemble(&base, fibre, x, y, n);
                let image = assemble(&base, fibre, x, &y0, n);
                let mut cols: Vec<Vec<Rational>> = base.iter().map(|&i| unit(n, i, int(1))).collect();
                cols.extend(fibre.iter().map(|_| vec![Rational::zero(); n]));
                cols.extend(anchor_columns(a, &image));
                let rank = RationalMatrix::from_columns(n, &cols).rank();
                checked += 1;
                if rank < n {
                    fails.push(format!("m_0 at ({}): rank {rank} < {n}", format_point(&p)));
                }
            }
        }
        Verdict::from_failures(fails.into_iter())
    };

    // (iii): at (x, y, t), [dm | rho(m)] spans TE and d/dt lifts to m^!(A)
    let family = {
        let mut fails = Vec::new();
        for x in &xs {
            for y in &ys {
                for t in sample_parameters() {
                    let ty: Vec<Rational> = y.iter().map(|v| v * &t).collect();
                    let image = assemble(&base, fibre, x, &ty, n);
                    let mut dm: Vec<Vec<Rational>> = base.iter().map(|&i| unit(n, i, int(1))).collect();
                    dm.extend(fibre.iter().map(|&i| unit(n, i, t.clone())));
                    let dt = assemble(&base, fibre, &vec![Rational::zero(); base.len()], y, n);
                    let rho = anchor_columns(a, &image);
                    let mut all = dm.clone();
                    all.push(dt.clone());
                    all.extend(rho.iter().cloned());
                    let rank = RationalMatrix::from_columns(n, &all).rank();
                    let mut without_dt = dm;
                    without_dt.extend(rho);
                    let lifts = RationalMatrix::from_columns(n, &without_dt).rank() == rank;
                    checked += 1;
                    let at = format!("({}; {}; t = {t})", format_point(x), format_point(y));
                    if rank < n {
                        fails.push(format!("m at {at}: rank {rank} < {n}"));
                    } else if !lifts {
                        fails.push(format!("m^!(A) at {at}: d/dt does not lift"));
                    }
                }
            }
        }
        Verdict::from_failures(fails.into_iter())
    };

    let agree = zero_section.holds == rescaling.holds && rescaling.holds == family.holds;
    RescalingReport { fibre: fibre.to_vec(), zero_section, rescaling, family, points_checked: checked, agree }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::Patch;
    use crate::samples;

    #[test]
    fn tangent_satisfies_all_three() {
        let a = samples::tangent(&["x", "y"], 4);
        let r = rescaling_family(&a, &[1], &[]);
        assert!(r.zero_section.holds && r.rescaling.holds && r.family.holds);
        assert!(r.agree);
    }

    #[test]
    fn base_anchor_vanishing_on_zero_section_fails_all_three() {
        let patch = Patch::new(vec!["x".into(), "y".into()], 4);
        let mut a = LieAlgebroidPatch::trivial(patch, vec!["e1".into()]);
        a.anchor[0][0] = a.patch.var(1);
        let r = rescaling_family(&a, &[1], &[]);
        assert!(!r.zero_section.holds && !r.rescaling.holds && !r.family.holds);
        assert!(r.agree);
        assert!(r.zero_section.witness.unwrap().contains("rank 1 < 2"));
    }

    #[test]
    fn lie_algebra_over_a_point_is_degenerate_but_true() {
        let r = rescaling_family(&samples::sl2(), &[], &[]);
        assert!(r.zero_section.holds && r.rescaling.holds && r.family.holds);
        assert_eq!(r.points_checked, 1 + 1 + 5);
    }

    #[test]
    fn fibre_euler_anchor_is_not_transverse() {
        // e1 = d/dx, e2 = y d/dy: transverse only away from y = 0
        let patch = Patch::new(vec!["x".into(), "y".into()], 4);
        let mut a = LieAlgebroidPatch::trivial(patch, vec!["e1".into(), "e2".into()]);
        a.anchor[0][0] = a.patch.constant(int(1));
        a.anchor[1][1] = a.patch.var(1);
        let r = rescaling_family(&a, &[1], &[]);
        assert!(!r.zero_section.holds && !r.rescaling.holds && !r.family.holds);
        assert!(r.agree);
    }
}

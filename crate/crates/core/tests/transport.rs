use algebroidlab_core::algebroid::Representation;
use algebroidlab_core::cover::{CoverDatum, LocalSystemFamily, Transition};
use algebroidlab_core::exact::{int, Rational, RationalMatrix};
use algebroidlab_core::samples;
use algebroidlab_core::transport::{
    monodromy_check, parallel_transport, subexhaust, verify_subexhaustion, ExhaustionProblem, IndexOracle, PathFamily,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn strictly_upper(n: usize, entries: &[i64]) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(n, n);
    let mut it = entries.iter().cycle();
    for i in 0..n {
        for j in i + 1..n {
            m[(i, j)] = int(*it.next().unwrap());
        }
    }
    m
}

/// `exp(n)` for nilpotent `n`.
fn exp(n: &RationalMatrix) -> RationalMatrix {
    let mut out = RationalMatrix::identity(n.rows());
    let mut term = RationalMatrix::identity(n.rows());
    for k in 1..=n.rows() {
        term = (&term * n).scale(&(Rational::from_integer(1.into()) / int(k as i64)));
        out = &out + &term;
    }
    out
}

/// Fibre, a nilpotent derivation of it and a compatible generator on `D`.
fn fibre_with_derivation(kind: usize, entries: &[i64]) -> (Representation, RationalMatrix, RationalMatrix) {
    match kind {
        0 => {
            let rep = Representation::trivial(samples::abelian(3), 2);
            (rep, strictly_upper(3, entries), strictly_upper(2, &entries[1..]))
        }
        _ => {
            let s = entries[0];
            // ad(s e) on (h, e, f)
            let ad = RationalMatrix::from_i64(&[&[0, 0, s], &[-2 * s, 0, 0], &[0, 0, 0]]);
            (Representation::adjoint(samples::sl2()), ad.clone(), ad)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn reverse_transport_composes_to_the_identity(kind in 0usize..3, entries in prop::collection::vec(-2i64..3, 3)) {
        let tol = 1e-8;
        let pf = match kind {
            0 => PathFamily::conjugated(
                &samples::trivial_line(&samples::abelian(2)),
                &strictly_upper(2, &entries),
                &RationalMatrix::zeros(1, 1),
            ),
            1 => PathFamily::conjugated(
                &Representation::adjoint(samples::sl2()),
                &strictly_upper(3, &entries),
                &strictly_upper(3, &entries),
            ),
            _ => PathFamily::conjugated(
                &samples::character(&samples::aff1(), &[int(0), int(entries[0])]),
                &strictly_upper(2, &entries[1..]),
                &RationalMatrix::zeros(1, 1),
            ),
        }
        .unwrap();
        let there = parallel_transport(&pf, tol).unwrap();
        let back = parallel_transport(&pf.reversed(), tol).unwrap();
        let r = pf.rank();
        prop_assert!((&back.frame * &there.frame - DMatrix::<f64>::identity(r, r)).amax() <= 2.0 * tol);
        let m = pf.fibre_rank();
        prop_assert!((&back.fibre * &there.fibre - DMatrix::<f64>::identity(m, m)).amax() <= 2.0 * tol);
    }

    #[test]
    fn cech_and_transport_monodromy_agree(kind in 0usize..2, entries in prop::collection::vec(-2i64..3, 3), k in 3usize..5) {
        let (rep, n, nd) = fibre_with_derivation(kind, &entries);
        let pf = PathFamily::constant(&rep).unwrap().with_omega(&n, &nd);
        // the loop closes through the last chart back to the first
        let cover = CoverDatum::circle(k);
        let lsf = LocalSystemFamily::constant(rep, k).with_transition(0, k - 1, Transition { frame: exp(&n), fibre: exp(&nd) });
        let cycle: Vec<usize> = (0..k).collect();
        let report = monodromy_check(&pf, &lsf, &cover, &cycle, 1e-8).unwrap();
        prop_assert!(report.agree, "{:?}", report.degrees);
    }

    #[test]
    fn subexhaustions_satisfy_every_interleaving(seed in prop::collection::vec((0u64..4, 0u64..3, -1i64..3), 15), n in 1usize..7) {
        let mut ep = ExhaustionProblem::new((1..=n).map(|i| format!("U{i}")).collect());
        let mut it = seed.iter().cycle();
        for i in 0..n {
            for j in i + 1..n {
                let &(edge, slope, offset) = it.next().unwrap();
                if edge == 0 {
                    continue;
                }
                for (a, b) in [(j, i), (i, j)] {
                    let &(start, step, _) = it.next().unwrap();
                    let prefix = vec![start + 1, start + 1 + step];
                    let slope = slope.max(1);
                    let offset = offset.max(prefix[1] as i64 - 3 * slope as i64);
                    ep = ep.with_oracle(a, b, IndexOracle { prefix, slope, offset });
                }
            }
        }
        let s = subexhaust(&ep, 12).unwrap();
        prop_assert!(verify_subexhaustion(&ep, &s).unwrap().is_empty());
    }
}

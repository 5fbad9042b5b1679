use algebroidlab_core::algebroid::{
    semidirect, tau_and_kernel, validate_algebroid, validate_representation, LieAlgebroidPatch, Representation,
    SubmersionDatum, TauOutcome,
};
use algebroidlab_core::ce::{
    cohomology, stratum_cohomology, weight_cohomology, CeComplex, JetWindow, Mode, Stratum,
};
use algebroidlab_core::exact::{int, Monomial, Rational, RationalMatrix, TruncatedPoly};
use algebroidlab_core::samples::{self, AffineField};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = AffineField> {
    (prop::option::of(0usize..2), 0usize..2).prop_map(|(source, target)| AffineField { source, target })
}

fn affine_rep(order: u32) -> impl Strategy<Value = Representation> {
    prop::collection::vec(field(), 1..4).prop_map(move |fs| samples::affine_action(2, order, &fs))
}

fn small_poly(n_vars: usize, order: u32) -> impl Strategy<Value = TruncatedPoly> {
    prop::collection::vec((0u32..3, 0u32..3, -3i64..4), 0..4).prop_map(move |ts| {
        TruncatedPoly::from_terms(
            n_vars,
            order,
            ts.into_iter()
                .map(|(a, b, c)| (Monomial(vec![a, b][..n_vars].to_vec()), int(c))),
        )
    })
}

fn invertible(r: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec(-2i64..3, r * r).prop_filter_map("singular", move |v| {
        let rows: Vec<Vec<Rational>> = v.chunks(r).map(|c| c.iter().map(|&x| int(x)).collect()).collect();
        let m = RationalMatrix::from_rows(rows);
        (m.determinant() != int(0)).then_some(m)
    })
}

fn scale_section(f: &TruncatedPoly, b: &[TruncatedPoly]) -> Vec<TruncatedPoly> {
    b.iter().map(|x| f * x).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn affine_actions_are_valid(rep in affine_rep(6)) {
        prop_assert!(validate_algebroid(&rep.algebroid, 6).all_passed());
        prop_assert!(validate_representation(&rep, 6).unwrap().all_passed());
        let s = semidirect(&rep).unwrap();
        prop_assert!(validate_algebroid(&s, 6).all_passed());
        prop_assert!(s.anchor[rep.algebroid.rank()..].iter().flatten().all(TruncatedPoly::is_zero));
    }

    #[test]
    fn leibniz_rule_of_the_extended_bracket(
        rep in affine_rep(12),
        f in small_poly(2, 12),
        ca in prop::collection::vec(small_poly(2, 12), 6),
        cb in prop::collection::vec(small_poly(2, 12), 6),
    ) {
        let a = &rep.algebroid;
        let r = a.rank();
        let sa: Vec<TruncatedPoly> = ca[..r.min(6)].to_vec();
        let sb: Vec<TruncatedPoly> = cb[..r.min(6)].to_vec();
        prop_assume!(r <= 6);
        let lhs = a.section_bracket(&sa, &scale_section(&f, &sb));
        let ab = a.section_bracket(&sa, &sb);
        let af = a.anchor_section_apply(&sa, &f);
        for k in 0..r {
            let rhs = &(&f * &ab[k]) + &(&af * &sb[k]);
            prop_assert_eq!(&lhs[k], &rhs);
        }
    }

    #[test]
    fn d_squared_vanishes_on_weight_strata(rep in affine_rep(4), w in -2i64..3) {
        let mut rep = rep;
        rep.algebroid.patch = rep.algebroid.patch.clone().with_weights(vec![1, 1]);
        let cx = CeComplex::new(&rep);
        prop_assert!(cx.check_graded().is_ok());
        for q in 0..cx.rank() {
            for b in cx.stratum_basis(q, &Stratum::weight(w)).unwrap() {
                prop_assert!(cx.apply_cochain(&cx.apply(&b)).is_zero());
            }
        }
    }

    #[test]
    fn cohomology_is_independent_of_the_frame(
        rep in affine_rep(6),
        p in invertible(3),
        q in invertible(2),
    ) {
        prop_assume!(rep.algebroid.rank() == 3);
        let other = rep.change_frames(&p, &q).unwrap();
        prop_assert!(validate_representation(&other, 6).unwrap().all_passed());
        let c1 = CeComplex::new(&rep);
        let c2 = CeComplex::new(&other);
        for deg in 0..=3 {
            let b1 = stratum_cohomology(&c1, deg, Stratum::window(2)).unwrap().betti();
            let b2 = stratum_cohomology(&c2, deg, Stratum::window(2)).unwrap().betti();
            prop_assert_eq!(b1, b2, "degree {}", deg);
        }
    }

    #[test]
    fn kernel_of_a_projection_is_a_vertical_subalgebroid(rep in affine_rep(5)) {
        let a = rep.algebroid;
        let s = SubmersionDatum::new(a.clone(), vec![0]);
        match tau_and_kernel(&s).unwrap() {
            TauOutcome::Surjective(k) => {
                prop_assert!(validate_algebroid(&k.kernel, 5).all_passed());
                prop_assert!(k.kernel.anchor.iter().all(|row| row[0].is_zero()));
                prop_assert_eq!(k.kernel.rank() + 1, a.rank());
            }
            TauOutcome::NotSurjective { rank, .. } => prop_assert_eq!(rank, 0),
        }
    }
}

fn weighted(mut a: LieAlgebroidPatch, w: Vec<u32>) -> LieAlgebroidPatch {
    a.patch = a.patch.clone().with_weights(w);
    a
}

#[test]
fn weight_and_jet_modes_agree_on_graded_instances() {
    let cases = vec![
        weighted(samples::tangent(&["x", "y"], 10), vec![1, 1]),
        weighted(samples::heisenberg_action(10), vec![1, 2]),
        weighted(samples::affine_line(10), vec![1]),
    ];
    for a in cases {
        let cx = CeComplex::trivial(&a);
        let by_weight = weight_cohomology(&cx, (-4, 6), JetWindow::default()).unwrap();
        let jet = cohomology(&cx, &Mode::Jet(JetWindow::new(2, 5, 3))).unwrap();
        assert!(jet.conclusive());
        assert_eq!(by_weight.betti_vector(), jet.betti_vector(), "{:?}", a.frame);
    }
}

use algebroidlab_core::algebroid::{validate_algebroid, LieAlgebroidPatch};
use algebroidlab_core::ce::JetWindow;
use algebroidlab_core::exact::{int, Rational};
use algebroidlab_core::pullback::{
    euler_homotopy_verify, pullback_structured, rescaling_family, transversal_iso_check, EulerSection, StructuredMap,
};
use algebroidlab_core::samples::{self, AffineField};
use proptest::prelude::*;

fn affine_algebroid(order: u32) -> impl Strategy<Value = LieAlgebroidPatch> {
    let field = (prop::option::of(0usize..2), 0usize..2).prop_map(|(source, target)| AffineField { source, target });
    prop::collection::vec(field, 1..4).prop_map(move |fs| samples::affine_action(2, order, &fs).algebroid)
}

fn nonzero() -> impl Strategy<Value = Rational> {
    (-3i64..4, 1i64..3)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn rescale(t: Rational) -> StructuredMap {
    StructuredMap::Rescaling { fibre: vec![1], t }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn rescalings_compose(a in affine_algebroid(5), s in nonzero(), t in nonzero()) {
        let (once, _) = pullback_structured(&rescale(&s * &t), &a, None).unwrap();
        let (first, _) = pullback_structured(&rescale(s), &a, None).unwrap();
        let (twice, _) = pullback_structured(&rescale(t), &first, None).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn slice_after_projection_is_identity(a in affine_algebroid(5)) {
        let p = StructuredMap::Projection { fibre_vars: vec!["z".into()], fibre_weights: None };
        let (up, _) = pullback_structured(&p, &a, None).unwrap();
        let i = StructuredMap::SliceInclusion { normal: vec![2] };
        let (back, _) = pullback_structured(&i, &up, None).unwrap();
        prop_assert_eq!(back.anchor, a.anchor);
        prop_assert_eq!(back.bracket, a.bracket);
    }

    #[test]
    fn rescaling_verdicts_coincide(a in affine_algebroid(4)) {
        let r = rescaling_family(&a, &[1], &[]);
        prop_assert!(r.agree, "{:?}", r);
    }

    #[test]
    fn pullbacks_along_rescalings_are_algebroids(a in affine_algebroid(5), t in nonzero()) {
        let (b, _) = pullback_structured(&rescale(t), &a, None).unwrap();
        prop_assert!(validate_algebroid(&b, 5).all_passed());
        if let Ok((z, _)) = pullback_structured(&rescale(int(0)), &a, None) {
            prop_assert!(validate_algebroid(&z, 5).all_passed());
        }
    }
}

fn weighted(mut a: LieAlgebroidPatch, w: Vec<u32>) -> LieAlgebroidPatch {
    a.patch = a.patch.clone().with_weights(w);
    a
}

#[test]
fn transversal_betti_match_whenever_the_euler_homotopy_holds() {
    let cases = vec![
        (weighted(samples::tangent(&["x", "y"], 8), vec![0, 1]), "dy", 1, 1),
        (weighted(samples::heisenberg_action(8), vec![0, 1]), "e3", 1, 1),
        (samples::sl2_times_tangent(&["y"], 8, Some(vec![1])), "dy", 0, 0),
    ];
    let mut checked = 0;
    for (a, frame, var, normal) in cases {
        let mut c = vec![a.patch.zero(); a.rank()];
        c[a.frame_index(frame).unwrap()] = a.patch.var(var);
        let rep = samples::trivial_line(&a);
        let window = JetWindow::new(1, 4, 3);
        let Ok(euler) = euler_homotopy_verify(&rep, &EulerSection::new(c), (-2, 3), window) else {
            continue;
        };
        assert!(euler.agreement, "{:?}", a.frame);
        let slice = StructuredMap::SliceInclusion { normal: vec![normal] };
        let r = transversal_iso_check(&rep, &slice, (-2, 3), window).unwrap();
        assert!(r.betti_match && r.isomorphism(), "{:?}: {r:?}", a.frame);
        checked += 1;
    }
    // the Heisenberg frame has [y e3, e2] = -x e3, so it is not Euler-compatible
    assert_eq!(checked, 2);
}

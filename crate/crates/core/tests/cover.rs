use algebroidlab_core::algebroid::Representation;
use algebroidlab_core::cover::{
    build_double_complex, local_system_cohomology, localization_check, ss_pages, CechDoubleComplex, CoverDatum,
    Localization, LocalSystemFamily, Transition,
};
use algebroidlab_core::exact::{int, Rational, RationalMatrix, Span};
use algebroidlab_core::samples;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
enum Fibre {
    Line,
    Plane,
    Sl2Trivial,
    Sl2Adjoint,
    Aff(i64),
}

fn nonzero(rng: &mut ChaCha8Rng) -> Rational {
    let v = [-2i64, -1, 1, 2, 3][rng.gen_range(0..5)];
    int(v)
}

fn scalar(x: Rational) -> RationalMatrix {
    RationalMatrix::from_rows(vec![vec![x]])
}

impl Fibre {
    fn pick(rng: &mut ChaCha8Rng) -> Self {
        match rng.gen_range(0..5) {
            0 => Fibre::Line,
            1 => Fibre::Plane,
            2 => Fibre::Sl2Trivial,
            3 => Fibre::Sl2Adjoint,
            _ => Fibre::Aff(rng.gen_range(-1..3)),
        }
    }

    fn rep(self) -> Representation {
        match self {
            Fibre::Line => samples::trivial_line(&samples::abelian(1)),
            Fibre::Plane => samples::trivial_line(&samples::abelian(2)),
            Fibre::Sl2Trivial => samples::trivial_line(&samples::sl2()),
            Fibre::Sl2Adjoint => Representation::adjoint(samples::sl2()),
            Fibre::Aff(l) => samples::character(&samples::aff1(), &[int(0), int(l)]),
        }
    }

    fn automorphism(self, rng: &mut ChaCha8Rng) -> Transition {
        match self {
            Fibre::Line => Transition { frame: scalar(nonzero(rng)), fibre: scalar(nonzero(rng)) },
            Fibre::Plane => loop {
                let v: Vec<Rational> = (0..4).map(|_| int(rng.gen_range(-2..3))).collect();
                let p = RationalMatrix::from_rows(vec![v[..2].to_vec(), v[2..].to_vec()]);
                if p.determinant() != int(0) {
                    break Transition { frame: p, fibre: scalar(nonzero(rng)) };
                }
            },
            Fibre::Sl2Trivial | Fibre::Sl2Adjoint => {
                let c = nonzero(rng);
                let mut p = RationalMatrix::identity(3);
                p[(1, 1)] = c.clone();
                p[(2, 2)] = int(1) / c;
                if rng.gen_bool(0.5) {
                    p = &p * &RationalMatrix::from_i64(&[&[-1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
                }
                let fibre = if matches!(self, Fibre::Sl2Adjoint) { p.clone() } else { scalar(nonzero(rng)) };
                Transition { frame: p, fibre }
            }
            Fibre::Aff(_) => {
                let p = RationalMatrix::from_rows(vec![vec![nonzero(rng), int(rng.gen_range(-2..3))], vec![int(0), int(1)]]);
                Transition { frame: p, fibre: scalar(nonzero(rng)) }
            }
        }
    }
}

/// Random connected or disconnected cover with random triangles and a
/// family whose transitions satisfy the cocycle condition.
fn random_family(seed: u64) -> (CoverDatum, LocalSystemFamily) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..5);
    let mut edges = Vec::new();
    for i in 1..n {
        if rng.gen_bool(0.9) {
            edges.push(vec![rng.gen_range(0..i), i]);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if !edges.contains(&vec![i, j]) && rng.gen_bool(0.3) {
                edges.push(vec![i, j]);
            }
        }
    }
    let mut triangles = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let all = [[i, j], [j, k], [i, k]].iter().all(|e| edges.contains(&e.to_vec()));
                if all && rng.gen_bool(0.5) {
                    triangles.push(vec![i, j, k]);
                }
            }
        }
    }
    let fibre = Fibre::pick(&mut rng);
    let gauge: Vec<Transition> = (0..n).map(|_| fibre.automorphism(&mut rng)).collect();
    let mut family = LocalSystemFamily::constant(fibre.rep(), n);
    for e in &edges {
        let (i, j) = (e[0], e[1]);
        let in_triangle = triangles.iter().any(|t| t.contains(&i) && t.contains(&j));
        let t = if in_triangle {
            gauge[i].compose(&gauge[j].inverse().unwrap())
        } else {
            fibre.automorphism(&mut rng)
        };
        family = family.with_transition(i, j, t);
    }
    let names = (1..=n).map(|i| format!("U{i}")).collect();
    let cover = CoverDatum::new(names, edges.into_iter().chain(triangles));
    (cover, family)
}

fn rank_of(vectors: &[Vec<Rational>], dim: usize) -> usize {
    let mut span = Span::new(dim);
    for v in vectors {
        span.insert(v);
    }
    span.rank()
}

/// `E_2^{p,q}` straight from the blocks: vertical cocycles whose Čech
/// coboundary is vertically exact, modulo vertical coboundaries and Čech
/// coboundaries of vertical cocycles.
fn e2_oracle(dc: &CechDoubleComplex, p: usize, q: usize) -> usize {
    let dim = dc.dim(p, q);
    if dim == 0 {
        return 0;
    }
    let d = &dc.vertical[p][q];
    let numerator: Vec<Vec<Rational>> = if p < dc.p_max() && q > 0 {
        let v = &dc.vertical[p + 1][q - 1];
        let delta = &dc.delta[p][q];
        let top = d.hstack(&RationalMatrix::zeros(d.rows(), v.cols()));
        let bottom = delta.hstack(&v.scale(&int(-1)));
        top.vstack(&bottom).kernel_basis().into_iter().map(|k| k[..dim].to_vec()).collect()
    } else if p < dc.p_max() {
        d.vstack(&dc.delta[p][q]).kernel_basis()
    } else {
        d.kernel_basis()
    };
    let mut denominator: Vec<Vec<Rational>> = Vec::new();
    if q > 0 {
        denominator.extend(dc.vertical[p][q - 1].image_basis());
    }
    if p > 0 {
        let delta = &dc.delta[p - 1][q];
        denominator.extend(dc.vertical[p - 1][q].kernel_basis().iter().map(|k| delta.apply(k)));
    }
    rank_of(&numerator, dim) - rank_of(&denominator, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectral_sequence_matches_the_total_complex(seed in any::<u64>()) {
        let (cover, family) = random_family(seed);
        let dc = build_double_complex(&family, &cover).unwrap();
        prop_assume!(dc.total_dim() <= 160);
        let ss = ss_pages(&dc, 2).unwrap();
        prop_assert!(ss.converges, "E_inf {:?} vs H {:?}", ss.e_infinity_total(), ss.total_betti);
        let e2 = ss.page(2).unwrap();
        let ls = local_system_cohomology(&family, &dc.nerve).unwrap();
        for p in 0..=dc.p_max() {
            for q in 0..=dc.q_max() {
                prop_assert_eq!(e2.dim(p, q), e2_oracle(&dc, p, q), "E_2^({},{})", p, q);
                prop_assert_eq!(e2.dim(p, q), ls[p][q], "H^{}(nerve; H^{})", p, q);
            }
        }
        if dc.p_max() <= 1 {
            prop_assert!(ss.degenerates_at <= 2);
        }
    }

    #[test]
    fn localization_is_injective_when_it_applies(seed in any::<u64>()) {
        let (cover, family) = random_family(seed);
        let dc = build_double_complex(&family, &cover).unwrap();
        prop_assume!(dc.total_dim() <= 160);
        for n in 0..=family.rank() + 1 {
            if let Localization::Checked { injective, total, rank, .. } = localization_check(&family, &cover, 0, n).unwrap() {
                prop_assert!(injective && rank == total, "degree {}", n);
            }
        }
    }
}

#[test]
fn tree_cover_checks_through_the_simply_connected_branch() {
    let cover = CoverDatum::interval(3);
    let family = LocalSystemFamily::constant(samples::trivial_line(&samples::abelian(2)), 3);
    match localization_check(&family, &cover, 1, 1).unwrap() {
        Localization::Checked { total, fibre, injective, .. } => {
            assert_eq!((total, fibre), (2, 2));
            assert!(injective);
        }
        other => panic!("{other}"),
    }
}

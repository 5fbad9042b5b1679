//! Parallel transport `dΦ/dt = ω(t) Φ`, `Φ_0 = id`, by classical RK4 with
//! step doubling, accepted on the isomorphism defect.

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::ce::{stratum_cohomology, CeComplex, Cochain, StratumCohomology, Stratum};
use crate::cover::{cochain_action, Transition};
use crate::exact::{int, rat, rational, Rational, RationalMatrix};

use super::path::{float_coefficients, PathFamily};
use super::TransportError;

pub type FloatMatrix = DMatrix<f64>;

const FIRST_STEPS: usize = 16;
const MAX_STEPS: usize = 1 << 16;
const MAX_DENOMINATOR: u64 = 1_000_000;
const RATIONAL_TOL: f64 = 1e-10;

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, x| acc * t + x)
}

/// Float coefficients of the family, for evaluation inside the integrator.
struct FloatFamily {
    r: usize,
    m: usize,
    bracket: Vec<Vec<f64>>,
    gamma: Vec<Vec<Vec<f64>>>,
    omega: Vec<Vec<f64>>,
    omega_fibre: Vec<Vec<f64>>,
    bracket0: Vec<f64>,
    gamma0: Vec<DMatrix<f64>>,
}

impl FloatFamily {
    fn new(pf: &PathFamily) -> Self {
        let (r, m) = (pf.rank(), pf.fibre_rank());
        let flat = |rows: &Vec<Vec<super::path::TPoly>>| rows.iter().flatten().map(float_coefficients).collect::<Vec<_>>();
        let bracket: Vec<Vec<f64>> = pf.bracket.iter().flatten().flatten().map(float_coefficients).collect();
        let gamma: Vec<Vec<Vec<f64>>> = pf.gamma.iter().map(flat).collect();
        let mut ff = FloatFamily {
            r,
            m,
            bracket,
            gamma,
            omega: flat(&pf.omega),
            omega_fibre: flat(&pf.omega_fibre),
            bracket0: Vec::new(),
            gamma0: Vec::new(),
        };
        ff.bracket0 = ff.bracket_at(0.0);
        ff.gamma0 = ff.gamma_at(0.0);
        ff
    }

    fn matrix(entries: &[Vec<f64>], n: usize, t: f64) -> DMatrix<f64> {
        DMatrix::from_row_iterator(n, n, entries.iter().map(|c| horner(c, t)))
    }

    fn bracket_at(&self, t: f64) -> Vec<f64> {
        self.bracket.iter().map(|c| horner(c, t)).collect()
    }

    fn gamma_at(&self, t: f64) -> Vec<DMatrix<f64>> {
        self.gamma.iter().map(|g| Self::matrix(g, self.m, t)).collect()
    }

    fn rhs(&self, t: f64, phi: &DMatrix<f64>, psi: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        (Self::matrix(&self.omega, self.r, t) * phi, Self::matrix(&self.omega_fibre, self.m, t) * psi)
    }

    /// `max |Φ[u, v]_0 - [Φu, Φv]_t|` and `max |Ψ Γ_0(u) - Γ_t(Φu) Ψ|`
    /// over frame elements.
    fn defect(&self, t: f64, phi: &DMatrix<f64>, psi: &DMatrix<f64>) -> f64 {
        let r = self.r;
        let c0 = &self.bracket0;
        let ct = self.bracket_at(t);
        let idx = |i: usize, j: usize, k: usize| (i * r + j) * r + k;
        let mut worst: f64 = 0.0;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let lhs: f64 = (0..r).map(|l| c0[idx(i, j, l)] * phi[(k, l)]).sum();
                    let mut rhs = 0.0;
                    for a in 0..r {
                        for b in 0..r {
                            rhs += phi[(a, i)] * phi[(b, j)] * ct[idx(a, b, k)];
                        }
                    }
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
        let gt = self.gamma_at(t);
        for i in 0..r {
            let mut image = DMatrix::zeros(self.m, self.m);
            for (a, g) in gt.iter().enumerate() {
                image += g * phi[(a, i)];
            }
            let diff = psi * &self.gamma0[i] - image * psi;
            worst = worst.max(diff.amax());
        }
        worst
    }

    /// `Φ, Ψ` at each checkpoint (given as step counts) over `[0, t_end]`.
    fn integrate(&self, t_end: f64, steps: usize, checkpoints: &[usize]) -> Vec<(DMatrix<f64>, DMatrix<f64>)> {
        let h = t_end / steps as f64;
        let mut phi = DMatrix::identity(self.r, self.r);
        let mut psi = DMatrix::identity(self.m, self.m);
        let mut out = Vec::new();
        if checkpoints.contains(&0) {
            out.push((phi.clone(), psi.clone()));
        }
        for s in 0..steps {
            let t = s as f64 * h;
            let (k1p, k1q) = self.rhs(t, &phi, &psi);
            let (k2p, k2q) = self.rhs(t + h / 2.0, &(&phi + &k1p * (h / 2.0)), &(&psi + &k1q * (h / 2.0)));
            let (k3p, k3q) = self.rhs(t + h / 2.0, &(&phi + &k2p * (h / 2.0)), &(&psi + &k2q * (h / 2.0)));
            let (k4p, k4q) = self.rhs(t + h, &(&phi + &k3p * h), &(&psi + &k3q * h));
            phi += (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0);
            psi += (k1q + k2q * 2.0 + k3q * 2.0 + k4q) * (h / 6.0);
            if checkpoints.contains(&(s + 1)) {
                out.push((phi.clone(), psi.clone()));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct TransportResult {
    pub t_end: Rational,
    /// `Φ_{t_end}` on the algebra frame.
    pub frame: DMatrix<f64>,
    /// `Ψ_{t_end}` on the `D` frame.
    pub fibre: DMatrix<f64>,
    /// Rationalized pair, when every entry is recognizably rational and the
    /// rational pair is exactly an isomorphism of the end fibres.
    pub exact: Option<Transition>,
    /// Largest isomorphism defect over the checkpoints.
    pub defect: f64,
    /// Change of the end value under step halving.
    pub step_error: f64,
    pub steps: usize,
    pub tol: f64,
}

/// Induced map on a cohomology space, in the representative bases.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassMap {
    Exact(RationalMatrix),
    Approximate { entries: DMatrix<f64>, residual: f64 },
}

impl ClassMap {
    pub fn to_f64(&self) -> DMatrix<f64> {
        match self {
            ClassMap::Exact(m) => DMatrix::from_fn(m.rows(), m.cols(), |i, j| rational::to_f64(&m[(i, j)])),
            ClassMap::Approximate { entries, .. } => entries.clone(),
        }
    }

    /// Exact equality, or agreement within `tol` when approximate.
    pub fn agrees_with(&self, other: &RationalMatrix, tol: f64) -> bool {
        match self {
            ClassMap::Exact(m) => m == other,
            ClassMap::Approximate { entries, .. } => {
                let o = ClassMap::Exact(other.clone()).to_f64();
                entries.shape() == o.shape() && (entries - o).amax() <= tol
            }
        }
    }
}

fn exact_float(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

fn to_rational(m: &DMatrix<f64>, f: impl Fn(f64) -> Option<Rational>) -> Option<RationalMatrix> {
    let rows = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(m[(i, j)])).collect::<Option<Vec<_>>>()).collect::<Option<Vec<_>>>()?;
    Some(RationalMatrix::from_rows(rows))
}

pub fn fibre_cohomology(rep: &crate::algebroid::Representation, q: usize) -> Result<StratumCohomology, TransportError> {
    Ok(stratum_cohomology(&CeComplex::new(rep), q, Stratum::window(0))?)
}

/// Class map of the cochain action of `t` from `src` to `dst` (same basis).
pub(crate) fn exact_class_map(t: &Transition, src: &StratumCohomology, dst: &StratumCohomology) -> Result<RationalMatrix, TransportError> {
    let act = cochain_action(&src.basis, t);
    let cols = src
        .quotient
        .representatives
        .iter()
        .map(|z| {
            dst.class_of(&Cochain::from_vector(&dst.basis, &act.apply(z)))
                .ok_or_else(|| TransportError::Mismatch("transported cocycle is not a cocycle".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RationalMatrix::from_columns(dst.betti(), &cols))
}

impl TransportResult {
    /// `Φ^{*-1}` on `H^q`, from the start fibre to the end fibre.
    pub fn mon(&self, pf: &PathFamily, q: usize) -> Result<ClassMap, TransportError> {
        if q > pf.rank() {
            return Ok(ClassMap::Exact(RationalMatrix::zeros(0, 0)));
        }
        let src = fibre_cohomology(&pf.frozen(&int(0)), q)?;
        let dst = fibre_cohomology(&pf.frozen(&self.t_end), q)?;
        if let Some(t) = &self.exact {
            return Ok(ClassMap::Exact(exact_class_map(t, &src, &dst)?));
        }
        let t = Transition {
            frame: to_rational(&self.frame, |x| Some(exact_float(x))).expect("total"),
            fibre: to_rational(&self.fibre, |x| Some(exact_float(x))).expect("total"),
        };
        let act = cochain_action(&src.basis, &t);
        let k = dst.betti();
        let mut cols: Vec<Vec<Rational>> = dst.quotient.representatives.clone();
        cols.extend(dst.quotient.image_basis.iter().cloned());
        let n = dst.basis.len();
        let a = DMatrix::from_fn(n, cols.len(), |i, j| rational::to_f64(&cols[j][i]));
        let svd = a.clone().svd(true, true);
        let mut entries = DMatrix::zeros(k, src.betti());
        let mut residual: f64 = 0.0;
        for (c, z) in src.quotient.representatives.iter().enumerate() {
            let v = act.apply(z);
            let b = DMatrix::from_fn(n, 1, |i, _| rational::to_f64(&v[i]));
            let x = svd.solve(&b, 1e-12).map_err(|e| TransportError::Mismatch(e.to_string()))?;
            residual = residual.max((&a * &x - &b).amax());
            for i in 0..k {
                entries[(i, c)] = x[(i, 0)];
            }
        }
        Ok(ClassMap::Approximate { entries, residual })
    }
}

/// Transport from `0` to `t_end`. Steps double from 16 until the end value
/// changes by less than `tol` and the isomorphism defect at the quarter
/// checkpoints is below `tol`.
pub fn parallel_transport_to(pf: &PathFamily, t_end: &Rational, tol: f64) -> Result<TransportResult, TransportError> {
    pf.check()?;
    let ff = FloatFamily::new(pf);
    let te = rational::to_f64(t_end);
    let quarter = |n: usize| vec![n / 4, n / 2, 3 * n / 4, n];
    let mut steps = FIRST_STEPS;
    let mut prev = ff.integrate(te, steps, &[steps]).pop().expect("end point");
    loop {
        steps *= 2;
        let points = ff.integrate(te, steps, &quarter(steps));
        let (phi, psi) = points.last().expect("end point").clone();
        let step_error = (&phi - &prev.0).amax().max((&psi - &prev.1).amax());
        let defect = points
            .iter()
            .zip(1..=4)
            .map(|((p, s), k)| ff.defect(te * k as f64 / 4.0, p, s))
            .fold(0.0, f64::max);
        if step_error < tol && defect < tol {
            let exact = rationalized(pf, t_end, &phi, &psi);
            return Ok(TransportResult { t_end: t_end.clone(), frame: phi, fibre: psi, exact, defect, step_error, steps, tol });
        }
        if steps >= MAX_STEPS {
            return Err(TransportError::Integration { defect: defect.max(step_error), steps, tol });
        }
        prev = (phi, psi);
    }
}

pub fn parallel_transport(pf: &PathFamily, tol: f64) -> Result<TransportResult, TransportError> {
    parallel_transport_to(pf, &int(1), tol)
}

fn rationalized(pf: &PathFamily, t_end: &Rational, phi: &DMatrix<f64>, psi: &DMatrix<f64>) -> Option<Transition> {
    let round = |x: f64| rational::rationalize(x, MAX_DENOMINATOR, RATIONAL_TOL);
    let t = Transition { frame: to_rational(phi, round)?, fibre: to_rational(psi, round)? };
    t.inverse()?;
    crate::cover::family::check_morphism(&t, &pf.frozen(&int(0)), &pf.frozen(t_end)).ok()?;
    Some(t)
}

/// `Φ_t` at one sample time, checked as an isomorphism onto the time-`t`
/// fibre.
#[derive(Clone, Debug)]
pub struct TrivialPoint {
    pub t: Rational,
    pub frame: DMatrix<f64>,
    pub fibre: DMatrix<f64>,
    pub defect: f64,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct Trivialization {
    pub points: Vec<TrivialPoint>,
    pub isomorphisms: bool,
}

/// Transport maps from the start fibre to the fibres at `t = 0, 1/4, 1/2,
/// 3/4, 1`.
pub fn trivialize_via_transport(pf: &PathFamily, tol: f64) -> Result<Trivialization, TransportError> {
    let mut points = Vec::new();
    for t in [int(0), rat(1, 4), rat(1, 2), rat(3, 4), int(1)] {
        let res = parallel_transport_to(pf, &t, tol)?;
        let ff = FloatFamily::new(pf);
        let defect = ff.defect(rational::to_f64(&t), &res.frame, &res.fibre);
        points.push(TrivialPoint { t, frame: res.frame, fibre: res.fibre, defect, exact: res.exact.is_some() });
    }
    let isomorphisms = points.iter().all(|p| p.defect < tol && p.frame.determinant().abs() > tol && p.fibre.determinant().abs() > tol);
    Ok(Trivialization { points, isomorphisms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::Representation;
    use crate::samples;

    fn plane() -> PathFamily {
        PathFamily::constant(&samples::trivial_line(&samples::abelian(2)))
            .unwrap()
            .with_omega(&RationalMatrix::from_i64(&[&[0, 1], &[0, 0]]), &RationalMatrix::zeros(1, 1))
    }

    #[test]
    fn constant_family_transports_by_the_identity() {
        let pf = PathFamily::constant(&Representation::adjoint(samples::sl2())).unwrap();
        let res = parallel_transport(&pf, 1e-8).unwrap();
        assert_eq!(res.exact.unwrap(), Transition::identity(3, 3));
    }

    #[test]
    fn nilpotent_generator_gives_its_exponential() {
        let res = parallel_transport(&plane(), 1e-8).unwrap();
        let closed = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!((&res.frame - closed).amax() < 1e-8);
        assert_eq!(res.exact.unwrap().frame, RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]));
    }

    #[test]
    fn conjugated_sl2_transports_by_the_conjugating_matrix() {
        let rep = Representation::adjoint(samples::sl2());
        let x = RationalMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let pf = PathFamily::conjugated(&rep, &x, &x).unwrap();
        let res = parallel_transport(&pf, 1e-8).unwrap();
        let closed = RationalMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        let exact = res.exact.unwrap();
        assert_eq!(exact.frame, closed);
        assert_eq!(exact.fibre, closed);
    }

    #[test]
    fn inner_flow_returns_the_structure_constants() {
        let ad_e = RationalMatrix::from_i64(&[&[0, 0, 1], &[-2, 0, 0], &[0, 0, 0]]);
        let pf = PathFamily::constant(&Representation::adjoint(samples::sl2())).unwrap().with_omega(&ad_e, &ad_e);
        let res = parallel_transport(&pf, 1e-8).unwrap();
        // exp(ad e) = 1 + ad e + (ad e)^2 / 2
        let closed = RationalMatrix::from_i64(&[&[1, 0, 1], &[-2, 1, -1], &[0, 0, 1]]);
        assert_eq!(res.exact.unwrap().frame, closed);
        assert!(pf.is_loop());
    }

    #[test]
    fn reverse_transport_undoes_transport() {
        let rep = Representation::adjoint(samples::sl2());
        let x = RationalMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let pf = PathFamily::conjugated(&rep, &x, &x).unwrap();
        let tol = 1e-8;
        let there = parallel_transport(&pf, tol).unwrap();
        let back = parallel_transport(&pf.reversed(), tol).unwrap();
        let id = DMatrix::<f64>::identity(3, 3);
        assert!((&back.frame * &there.frame - id).amax() < 2.0 * tol);
    }

    #[test]
    fn trivialization_is_the_exponential_along_the_way() {
        let tr = trivialize_via_transport(&plane(), 1e-8).unwrap();
        assert!(tr.isomorphisms);
        for p in &tr.points {
            let t = rational::to_f64(&p.t);
            assert!((p.frame[(0, 1)] - t).abs() < 1e-8);
            assert!(p.exact);
        }
    }

    #[test]
    fn unipotent_mon_on_first_cohomology() {
        let pf = plane();
        let res = parallel_transport(&pf, 1e-8).unwrap();
        let ClassMap::Exact(m) = res.mon(&pf, 1).unwrap() else {
            panic!("expected an exact map");
        };
        assert_eq!(m.rows(), 2);
        assert_ne!(m, RationalMatrix::identity(2));
        assert_eq!(res.mon(&pf, 0).unwrap(), ClassMap::Exact(RationalMatrix::identity(1)));
    }
}

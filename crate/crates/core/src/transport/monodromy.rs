//! Monodromy of the local system of fibre cohomologies, by Čech
//! composition of transition maps and by parallel transport, and the flat
//! bundle of fibre cohomologies over the nerve.

use std::collections::{BTreeMap, VecDeque};

use crate::ce::{Cochain, StratumCohomology};
use crate::cover::family::constants;
use crate::cover::{nerve, CoverDatum, LocalSystemFamily, Nerve};
use crate::exact::{int, rat, Rational, RationalMatrix};

use super::integrate::{exact_class_map, fibre_cohomology, parallel_transport, parallel_transport_to, ClassMap, TransportResult};
use super::path::PathFamily;
use super::TransportError;

fn chart_cohomology(lsf: &LocalSystemFamily, q: usize) -> Vec<StratumCohomology> {
    (0..lsf.fibres.len()).map(|i| lsf.fibre_cohomology(i, q)).collect()
}

/// `H^q(chart j) -> H^q(chart i)` induced by `g_{ij}`.
fn induced(lsf: &LocalSystemFamily, h: &[StratumCohomology], i: usize, j: usize) -> Result<RationalMatrix, TransportError> {
    exact_class_map(&lsf.transition(i, j), &h[j], &h[i])
}

fn check_cycle(nv: &Nerve, cover: &CoverDatum, cycle: &[usize]) -> Result<(), TransportError> {
    if cycle.len() < 2 {
        return Err(TransportError::Mismatch("a loop needs at least two charts".into()));
    }
    for (k, &a) in cycle.iter().enumerate() {
        let b = cycle[(k + 1) % cycle.len()];
        let mut e = [a, b];
        e.sort_unstable();
        if nv.index_of(&e).is_none() {
            return Err(TransportError::Mismatch(format!("{} is not an overlap", cover.format_simplex(&e))));
        }
    }
    Ok(())
}

/// `g_{i0 i_{k-1}} ··· g_{i2 i1} g_{i1 i0}` on `H^q` of chart `i0`.
pub fn cech_monodromy(
    lsf: &LocalSystemFamily,
    cover: &CoverDatum,
    cycle: &[usize],
    q: usize,
) -> Result<RationalMatrix, TransportError> {
    let nv = nerve(cover)?;
    lsf.check(cover, &nv)?;
    check_cycle(&nv, cover, cycle)?;
    let h = chart_cohomology(lsf, q);
    let mut out = RationalMatrix::identity(h[cycle[0]].betti());
    for (k, &a) in cycle.iter().enumerate() {
        let b = cycle[(k + 1) % cycle.len()];
        out = &induced(lsf, &h, b, a)? * &out;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct DegreeMonodromy {
    pub degree: usize,
    pub cech: RationalMatrix,
    pub transport: ClassMap,
    pub agree: bool,
}

#[derive(Clone, Debug)]
pub struct MonodromyReport {
    pub cycle: Vec<usize>,
    pub transport: TransportResult,
    pub degrees: Vec<DegreeMonodromy>,
    pub agree: bool,
}

/// Compares, in every degree, the Čech monodromy of `lsf` around `cycle`
/// with the map induced by transport along the loop `pf`, whose fibre must
/// be that of the first chart of the cycle.
pub fn monodromy_check(
    pf: &PathFamily,
    lsf: &LocalSystemFamily,
    cover: &CoverDatum,
    cycle: &[usize],
    tol: f64,
) -> Result<MonodromyReport, TransportError> {
    if !pf.is_loop() {
        return Err(TransportError::NotALoop);
    }
    let start = cycle.first().copied().ok_or_else(|| TransportError::Mismatch("empty loop".into()))?;
    let chart = lsf.fibres.get(start).ok_or_else(|| TransportError::Mismatch(format!("no chart {start}")))?;
    if constants(chart) != pf.constants_at(&int(0)) {
        return Err(TransportError::Mismatch(format!(
            "path family does not start at the fibre of {}",
            cover.format_simplex(&[start])
        )));
    }
    let transport = parallel_transport(pf, tol)?;
    let mut degrees = Vec::new();
    for q in 0..=pf.rank() {
        let cech = cech_monodromy(lsf, cover, cycle, q)?;
        let mon = transport.mon(pf, q)?;
        let agree = mon.agrees_with(&cech, tol);
        degrees.push(DegreeMonodromy { degree: q, cech, transport: mon, agree });
    }
    let agree = degrees.iter().all(|d| d.agree);
    Ok(MonodromyReport { cycle: cycle.to_vec(), transport, degrees, agree })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Holonomy {
    pub cycle: Vec<usize>,
    /// One map per degree.
    pub maps: Vec<RationalMatrix>,
    pub trivial: bool,
    /// Bounds a 2-simplex of the nerve.
    pub contractible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussManinBundle {
    /// `dim H^q` of the fibre, per chart and degree.
    pub betti: Vec<Vec<usize>>,
    /// Induced maps `H(chart j) -> H(chart i)` for overlaps `i < j`, per degree.
    pub edges: BTreeMap<(usize, usize), Vec<RationalMatrix>>,
    /// Around every 2-simplex and every fundamental cycle of the nerve.
    pub holonomies: Vec<Holonomy>,
    /// Every contractible holonomy is the identity.
    pub flat: bool,
}

/// Fundamental cycles of a spanning forest of the 1-skeleton.
fn fundamental_cycles(nv: &Nerve) -> Vec<Vec<usize>> {
    let n = nv.count(0);
    let mut adj = vec![Vec::new(); n];
    for e in nv.simplices.get(1).into_iter().flatten() {
        adj[e[0]].push(e[1]);
        adj[e[1]].push(e[0]);
    }
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
    }
    let mut out = Vec::new();
    for e in nv.simplices.get(1).into_iter().flatten() {
        let (a, b) = (e[0], e[1]);
        if parent[b] == Some(a) || parent[a] == Some(b) {
            continue;
        }
        let (mut x, mut y) = (a, b);
        let (mut up, mut down) = (vec![x], vec![y]);
        while x != y {
            if depth[x] >= depth[y] {
                x = parent[x].expect("same component");
                up.push(x);
            } else {
                y = parent[y].expect("same component");
                down.push(y);
            }
        }
        down.pop();
        up.extend(down.into_iter().rev());
        out.push(up);
    }
    out
}

pub fn gauss_manin(lsf: &LocalSystemFamily, cover: &CoverDatum) -> Result<GaussManinBundle, TransportError> {
    let nv = nerve(cover)?;
    lsf.check(cover, &nv)?;
    let r = lsf.rank();
    let h: Vec<Vec<StratumCohomology>> = (0..=r).map(|q| chart_cohomology(lsf, q)).collect();
    let betti = (0..lsf.fibres.len()).map(|i| (0..=r).map(|q| h[q][i].betti()).collect()).collect();
    let mut edges = BTreeMap::new();
    for e in nv.simplices.get(1).into_iter().flatten() {
        let maps = (0..=r).map(|q| induced(lsf, &h[q], e[0], e[1])).collect::<Result<Vec<_>, _>>()?;
        for (q, m) in maps.iter().enumerate() {
            if m.rows() != m.cols() || m.inverse().is_none() {
                return Err(TransportError::Mismatch(format!(
                    "transition on {} is not an isomorphism on H^{q}",
                    cover.format_simplex(e)
                )));
            }
        }
        edges.insert((e[0], e[1]), maps);
    }
    let edge_map = |a: usize, b: usize, q: usize| -> RationalMatrix {
        // H(chart a) -> H(chart b)
        if b < a {
            edges[&(b, a)][q].clone()
        } else {
            edges[&(a, b)][q].inverse().expect("checked invertible")
        }
    };
    let mut cycles: Vec<(Vec<usize>, bool)> = nv.simplices.get(2).into_iter().flatten().map(|t| (t.clone(), true)).collect();
    cycles.extend(fundamental_cycles(&nv).into_iter().map(|c| (c, false)));
    let holonomies: Vec<Holonomy> = cycles
        .into_iter()
        .map(|(cycle, contractible)| {
            let maps: Vec<RationalMatrix> = (0..=r)
                .map(|q| {
                    let mut m = RationalMatrix::identity(h[q][cycle[0]].betti());
                    for (k, &a) in cycle.iter().enumerate() {
                        let b = cycle[(k + 1) % cycle.len()];
                        m = &edge_map(a, b, q) * &m;
                    }
                    m
                })
                .collect();
            let trivial = maps.iter().all(|m| *m == RationalMatrix::identity(m.rows()));
            Holonomy { cycle, maps, trivial, contractible }
        })
        .collect();
    let flat = holonomies.iter().filter(|h| h.contractible).all(|h| h.trivial);
    Ok(GaussManinBundle { betti, edges, holonomies, flat })
}

#[derive(Clone, Debug)]
pub struct HomotopySample {
    pub t: Rational,
    pub transported: Vec<f64>,
    pub pulled_back: Vec<f64>,
    pub agree: bool,
}

/// Compares the class of `pullback(t)` (a cochain in the time-`t` fibre
/// basis) with the transport of the class of `pullback(0)`, at
/// `t = 1/2, 1`.
pub fn homotopy_invariance_check(
    pf: &PathFamily,
    q: usize,
    pullback: &dyn Fn(&Rational) -> Vec<Rational>,
    tol: f64,
) -> Result<Vec<HomotopySample>, TransportError> {
    let h0 = fibre_cohomology(&pf.frozen(&int(0)), q)?;
    let class = |h: &StratumCohomology, v: Vec<Rational>| -> Result<Vec<Rational>, TransportError> {
        h.class_of(&Cochain::from_vector(&h.basis, &v))
            .ok_or_else(|| TransportError::Mismatch("pulled back cochain is not a cocycle".into()))
    };
    let start = class(&h0, pullback(&int(0)))?;
    let mut out = Vec::new();
    for t in [rat(1, 2), int(1)] {
        let res = parallel_transport_to(pf, &t, tol)?;
        let mon = res.mon(pf, q)?.to_f64();
        let v = nalgebra::DVector::from_iterator(start.len(), start.iter().map(crate::exact::rational::to_f64));
        let transported: Vec<f64> = (mon * v).iter().copied().collect();
        let ht = fibre_cohomology(&pf.frozen(&t), q)?;
        let pulled_back: Vec<f64> = class(&ht, pullback(&t))?.iter().map(crate::exact::rational::to_f64).collect();
        let agree = transported.len() == pulled_back.len()
            && transported.iter().zip(&pulled_back).all(|(a, b)| (a - b).abs() <= tol);
        out.push(HomotopySample { t, transported, pulled_back, agree });
    }
    Ok(out)
}

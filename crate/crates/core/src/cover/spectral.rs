//! Pages of the spectral sequence of the column filtration
//! `F^p = ⊕_{p' >= p} C^{p', *}` of a Čech double complex:
//! `E_r^p = Z_r^p / (Z_{r-1}^{p+1} + D Z_{r-1}^{p-r+1})` with
//! `Z_r^p = {x in F^p : D x in F^{p+r}}`.

use std::collections::BTreeMap;

use crate::exact::{ColumnSolver, Rational, RationalMatrix, Span};

use super::double::{CechDoubleComplex, TotalComplex};
use super::CoverError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SsPage {
    pub r: usize,
    /// `dim E_r^{p,q}` for every `(p, q)` of the double complex.
    pub dims: BTreeMap<(usize, usize), usize>,
    /// `d_r` out of `(p, q)` in the page bases.
    pub differentials: BTreeMap<(usize, usize), RationalMatrix>,
}

impl SsPage {
    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.differentials.values().all(RationalMatrix::is_zero)
    }
}

#[derive(Clone, Debug)]
pub struct SpectralSequence {
    pub pages: Vec<SsPage>,
    pub e_infinity: BTreeMap<(usize, usize), usize>,
    /// Brute-force betti numbers of the total complex.
    pub total_betti: Vec<usize>,
    /// `sum_p dim E_inf^{p, n-p} = dim H^n` for every `n`.
    pub converges: bool,
    /// First page from which all differentials vanish.
    pub degenerates_at: usize,
}

impl SpectralSequence {
    pub fn page(&self, r: usize) -> Option<&SsPage> {
        self.pages.iter().find(|p| p.r == r)
    }

    pub fn e_infinity_total(&self) -> Vec<usize> {
        let mut out = vec![0; self.total_betti.len()];
        for (&(p, q), &d) in &self.e_infinity {
            if let Some(x) = out.get_mut(p + q) {
                *x += d;
            }
        }
        out
    }
}

struct Engine<'a> {
    tot: &'a TotalComplex,
    columns: Vec<Vec<usize>>,
    p_max: i64,
}

/// A page spot: representatives of a basis of the quotient and a basis of
/// the denominator, all as vectors of `Tot^n`.
struct Spot {
    reps: Vec<Vec<Rational>>,
    den: Vec<Vec<Rational>>,
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::from_integer(0.into()); n];
    v[i] = Rational::from_integer(1.into());
    v
}

impl<'a> Engine<'a> {
    fn new(dc: &CechDoubleComplex, tot: &'a TotalComplex) -> Self {
        let columns = (0..=tot.top()).map(|n| tot.columns(n)).collect();
        Engine { tot, columns, p_max: dc.p_max() as i64 }
    }

    fn dim(&self, n: usize) -> usize {
        self.tot.dim(n)
    }

    /// Basis of `Z_r^p` in `Tot^n`.
    fn z(&self, n: i64, p: i64, r: i64) -> Vec<Vec<Rational>> {
        if n < 0 || n as usize > self.tot.top() || p > self.p_max {
            return Vec::new();
        }
        let n = n as usize;
        let dim = self.dim(n);
        let idx: Vec<usize> = (0..dim).filter(|&i| self.columns[n][i] as i64 >= p).collect();
        if r <= 0 || n >= self.tot.d.len() {
            return idx.iter().map(|&i| unit(dim, i)).collect();
        }
        let rows: Vec<usize> = (0..self.dim(n + 1)).filter(|&i| (self.columns[n + 1][i] as i64) < p + r).collect();
        if rows.is_empty() {
            return idx.iter().map(|&i| unit(dim, i)).collect();
        }
        let sub = self.tot.d[n].select_rows(&rows).select_columns(&idx);
        sub.kernel_basis()
            .into_iter()
            .map(|k| {
                let mut v = vec![Rational::from_integer(0.into()); dim];
                for (&i, x) in idx.iter().zip(k) {
                    v[i] = x;
                }
                v
            })
            .collect()
    }

    fn spot(&self, n: usize, p: usize, r: usize) -> Spot {
        let (n, p, r) = (n as i64, p as i64, r as i64);
        let mut span = Span::new(self.dim(n as usize));
        for v in self.z(n, p + 1, r - 1) {
            span.insert(&v);
        }
        if n > 0 {
            let d = &self.tot.d[n as usize - 1];
            for v in self.z(n - 1, p - r + 1, r - 1) {
                span.insert(&d.apply(&v));
            }
        }
        let den = span.basis();
        let reps = self.z(n, p, r).into_iter().filter(|v| span.insert(v)).collect();
        Spot { reps, den }
    }

    /// Coordinates of `v` (lying in the numerator) on the quotient basis.
    fn coords(spot: &Spot, dim: usize, v: &[Rational]) -> Option<Vec<Rational>> {
        let mut cols = spot.reps.clone();
        cols.extend(spot.den.iter().cloned());
        let solver = ColumnSolver::new(dim, &cols)?;
        Some(solver.coordinates(v)?[..spot.reps.len()].to_vec())
    }
}

fn page(engine: &Engine, dc: &CechDoubleComplex, r: usize) -> Result<SsPage, CoverError> {
    let (pm, qm) = (dc.p_max(), dc.q_max());
    let mut spots = BTreeMap::new();
    for p in 0..=pm {
        for q in 0..=qm {
            spots.insert((p, q), engine.spot(p + q, p, r));
        }
    }
    let mut differentials = BTreeMap::new();
    for (&(p, q), s) in &spots {
        let n = p + q;
        let target = (q + 1).checked_sub(r).map(|tq| (p + r, tq)).filter(|t| spots.contains_key(t));
        let images: Vec<Vec<Rational>> = match engine.tot.d.get(n) {
            Some(d) => s.reps.iter().map(|x| d.apply(x)).collect(),
            None => Vec::new(),
        };
        let m = match target {
            Some(t) => {
                let ts = &spots[&t];
                let cols = images
                    .iter()
                    .map(|v| {
                        Engine::coords(ts, engine.dim(n + 1), v).ok_or_else(|| {
                            CoverError::NotAComplex(format!("d_{r} image from ({p}, {q}) leaves Z_{r}"))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                RationalMatrix::from_columns(ts.reps.len(), &cols)
            }
            None => RationalMatrix::zeros(0, s.reps.len()),
        };
        differentials.insert((p, q), m);
    }
    let dims = spots.iter().map(|(&k, s)| (k, s.reps.len())).collect();
    Ok(SsPage { r, dims, differentials })
}

/// Pages `E_0 ..= E_{r_max}`, `E_∞`, and the convergence certificate. Each
/// page's differential is checked to square to zero and the next page's
/// dimensions to equal its cohomology.
pub fn ss_pages(dc: &CechDoubleComplex, r_max: usize) -> Result<SpectralSequence, CoverError> {
    let tot = dc.total();
    let engine = Engine::new(dc, &tot);
    let r_inf = dc.p_max() + 1;
    let mut pages: Vec<SsPage> = Vec::new();
    for r in 0..=r_max.max(r_inf) {
        let pg = page(&engine, dc, r)?;
        for (&(p, q), d) in &pg.differentials {
            if let Some(next) = (q + 1).checked_sub(r).and_then(|tq| pg.differentials.get(&(p + r, tq))) {
                if next.rows() > 0 && d.cols() > 0 && !(next * d).is_zero() {
                    return Err(CoverError::NotAComplex(format!("d_{r} squares to nonzero at ({p}, {q})")));
                }
            }
        }
        if let Some(prev) = pages.last() {
            for (&(p, q), &dim) in &pg.dims {
                let out = prev.differentials[&(p, q)].rank();
                let inn = (p >= prev.r)
                    .then(|| (q + prev.r).checked_sub(1))
                    .flatten()
                    .and_then(|sq| prev.differentials.get(&(p - prev.r, sq)))
                    .map_or(0, RationalMatrix::rank);
                if dim != prev.dim(p, q) - out - inn {
                    return Err(CoverError::NotAComplex(format!(
                        "E_{r}^({p},{q}) has dimension {dim}, expected {}",
                        prev.dim(p, q) - out - inn
                    )));
                }
            }
        }
        pages.push(pg);
    }
    let e_infinity = pages[r_inf].dims.clone();
    let degenerates_at = (0..pages.len()).find(|&r| pages[r..].iter().all(SsPage::is_degenerate)).unwrap_or(r_inf);
    pages.truncate(r_max + 1);
    let total_betti = tot.betti();
    let mut ss = SpectralSequence { pages, e_infinity, total_betti, converges: false, degenerates_at };
    ss.converges = ss.e_infinity_total() == ss.total_betti;
    Ok(ss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::Representation;
    use crate::cover::{build_double_complex, local_system_cohomology, nerve, CoverDatum, LocalSystemFamily, Transition};
    use crate::samples;

    fn abelian2() -> Representation {
        samples::trivial_line(&samples::abelian(2))
    }

    fn unipotent() -> Transition {
        Transition { frame: RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]), fibre: RationalMatrix::identity(1) }
    }

    #[test]
    fn one_chart_is_the_fibre_complex() {
        let c = CoverDatum::single();
        let f = LocalSystemFamily::constant(samples::trivial_line(&samples::sl2()), 1);
        let dc = build_double_complex(&f, &c).unwrap();
        let ss = ss_pages(&dc, 3).unwrap();
        assert_eq!(ss.total_betti, vec![1, 0, 0, 1]);
        assert_eq!(ss.page(2).unwrap().dims, ss.e_infinity);
        assert_eq!(ss.e_infinity[&(0, 3)], 1);
        assert!(ss.converges);
    }

    #[test]
    fn circle_with_trivial_abelian_fibre() {
        let c = CoverDatum::circle(3);
        let f = LocalSystemFamily::constant(abelian2(), 3);
        let dc = build_double_complex(&f, &c).unwrap();
        let ss = ss_pages(&dc, 3).unwrap();
        assert_eq!(ss.total_betti, vec![1, 3, 3, 1]);
        let e2 = ss.page(2).unwrap();
        for (q, b) in [1, 2, 1].into_iter().enumerate() {
            assert_eq!(e2.dim(0, q), b);
            assert_eq!(e2.dim(1, q), b);
        }
        assert!(ss.degenerates_at <= 2 && ss.converges);
    }

    #[test]
    fn circle_with_unipotent_monodromy() {
        let c = CoverDatum::circle(3);
        let f = LocalSystemFamily::constant(abelian2(), 3).with_transition(0, 1, unipotent());
        let dc = build_double_complex(&f, &c).unwrap();
        let ss = ss_pages(&dc, 3).unwrap();
        // H^n = coker(g* - 1 on H^{n-1}) + ker(g* - 1 on H^n)
        assert_eq!(ss.total_betti, vec![1, 2, 2, 1]);
        assert!(ss.converges);
        let ls = local_system_cohomology(&f, &nerve(&c).unwrap()).unwrap();
        let e2 = ss.page(2).unwrap();
        for (p, row) in ls.iter().enumerate() {
            for (q, &b) in row.iter().enumerate() {
                assert_eq!(e2.dim(p, q), b, "E_2^({p},{q})");
            }
        }
    }

    #[test]
    fn first_page_is_vertical_cohomology() {
        let c = CoverDatum::interval(3);
        let f = LocalSystemFamily::constant(Representation::adjoint(samples::sl2()), 3);
        let ss = ss_pages(&build_double_complex(&f, &c).unwrap(), 2).unwrap();
        assert!(ss.page(1).unwrap().dims.values().all(|&d| d == 0));
        assert_eq!(ss.total_betti, vec![0, 0, 0, 0, 0]);
    }
}

//! Basis of `Ω^q(A; D)`: a polynomial monomial times a wedge of dual frame
//! elements times a frame element of `D`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::exact::{format_rational, Monomial, Rational};

/// Sorted set of frame indices `i_1 < ... < i_q`, stored as a bit set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Wedge(pub u64);

impl Wedge {
    pub const EMPTY: Wedge = Wedge(0);

    pub fn from_indices(indices: &[usize]) -> Self {
        Wedge(indices.iter().fold(0, |acc, &i| acc | (1u64 << i)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1u64 << i) != 0
    }

    pub fn indices(self) -> Vec<usize> {
        (0..64).filter(|&i| self.contains(i)).collect()
    }

    /// Number of elements of the set below `i`.
    pub fn position(self, i: usize) -> usize {
        (self.0 & ((1u64 << i) - 1)).count_ones() as usize
    }

    pub fn with(self, i: usize) -> Wedge {
        Wedge(self.0 | (1u64 << i))
    }

    pub fn without(self, i: usize) -> Wedge {
        Wedge(self.0 & !(1u64 << i))
    }

    /// All `q`-element subsets of `0..r`, in lexicographic order of their
    /// index lists.
    pub fn all(r: usize, q: usize) -> Vec<Wedge> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(start: usize, r: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Wedge>) {
            if cur.len() == q {
                out.push(Wedge::from_indices(cur));
                return;
            }
            for i in start..r {
                cur.push(i);
                rec(i + 1, r, q, cur, out);
                cur.pop();
            }
        }
        if q <= r {
            rec(0, r, q, &mut cur, &mut out);
        }
        out
    }
}

impl Ord for Wedge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl PartialOrd for Wedge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `x^mono e^{wedge} ⊗ f_fibre`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CeBasis {
    pub mono: Monomial,
    pub wedge: Wedge,
    pub fibre: usize,
}

impl CeBasis {
    pub fn degree(&self) -> usize {
        self.wedge.len()
    }

    pub fn format_with(&self, vars: &[String], frame: &[String], fibre: &[String]) -> String {
        let mut parts = Vec::new();
        if self.mono.degree() > 0 {
            parts.push(self.mono.format_with(vars));
        }
        let w: Vec<String> = self.wedge.indices().iter().map(|&i| format!("{}*", frame[i])).collect();
        if !w.is_empty() {
            parts.push(w.join("^"));
        }
        if fibre.len() > 1 || parts.is_empty() {
            parts.push(fibre.get(self.fibre).cloned().unwrap_or_else(|| format!("f{}", self.fibre + 1)));
        }
        parts.join(" ")
    }
}

/// Finite linear combination of basis cochains of a single degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Cochain {
    pub terms: BTreeMap<CeBasis, Rational>,
}

impl Cochain {
    pub fn zero() -> Self {
        Cochain::default()
    }

    pub fn basis(b: CeBasis) -> Self {
        let mut c = Cochain::zero();
        c.add(b, Rational::from_integer(1.into()));
        c
    }

    pub fn from_vector(basis: &[CeBasis], v: &[Rational]) -> Self {
        let mut c = Cochain::zero();
        for (b, x) in basis.iter().zip(v) {
            c.add(b.clone(), x.clone());
        }
        c
    }

    pub fn add(&mut self, b: CeBasis, x: Rational) {
        if x.is_zero() {
            return;
        }
        let slot = self.terms.entry(b.clone()).or_insert_with(Rational::zero);
        *slot += x;
        if slot.is_zero() {
            self.terms.remove(&b);
        }
    }

    pub fn add_scaled(&mut self, other: &Cochain, s: &Rational) {
        for (b, x) in &other.terms {
            self.add(b.clone(), x * s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coordinates on `basis`; `None` if a term lies outside it.
    pub fn to_vector(&self, index: &BTreeMap<CeBasis, usize>) -> Option<Vec<Rational>> {
        let mut v = vec![Rational::zero(); index.len()];
        for (b, x) in &self.terms {
            v[*index.get(b)?] = x.clone();
        }
        Some(v)
    }

    pub fn format_with(&self, vars: &[String], frame: &[String], fibre: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (b, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if i > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let body = b.format_with(vars, frame, fibre);
            if mag == Rational::from_integer(1.into()) {
                out.push_str(&body);
            } else {
                out.push_str(&format!("{}*{}", format_rational(&mag), body));
            }
        }
        out
    }
}

impl fmt::Display for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=64).map(|i| format!("e{i}")).collect();
        write!(f, "{}", self.format_with(&[], &names, &[]))
    }
}

/// Monomials of weight exactly `weight` (if given) and total degree at most
/// `max_degree` (if given). Returns `None` when the set is infinite.
pub fn monomials(var_weights: &[u32], weight: Option<u64>, max_degree: Option<u32>) -> Option<Vec<Monomial>> {
    let n = var_weights.len();
    let bounded = var_weights.iter().all(|&w| w > 0 && weight.is_some()) || max_degree.is_some();
    if !bounded {
        return None;
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(
        pos: usize,
        wts: &[u32],
        w_left: Option<u64>,
        d_left: Option<u32>,
        cur: &mut Vec<u32>,
        out: &mut Vec<Monomial>,
    ) {
        if pos == wts.len() {
            if w_left.is_none_or(|w| w == 0) {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        let wi = u64::from(wts[pos]);
        let mut e = 0u32;
        loop {
            if d_left.is_some_and(|d| e > d) {
                break;
            }
            if let Some(w) = w_left {
                if wi * u64::from(e) > w {
                    break;
                }
            }
            cur[pos] = e;
            rec(
                pos + 1,
                wts,
                w_left.map(|w| w - wi * u64::from(e)),
                d_left.map(|d| d - e),
                cur,
                out,
            );
            e += 1;
        }
        cur[pos] = 0;
    }
    rec(0, var_weights, weight, max_degree, &mut cur, &mut out);
    out.sort();
    Some(out)
}

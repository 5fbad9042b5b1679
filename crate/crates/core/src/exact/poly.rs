//! Sparse multivariate polynomials over the rationals, truncated at a jet order.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose order is graded:
//! lower total degree first, and within one degree the lexicographically
//! larger exponent vector first (`x^2`, `x*y`, `y^2`). Zero coefficients are
//! never stored, so the zero polynomial is the empty map and structural
//! equality is polynomial equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::rational::{format_rational, Rational};
use super::weights::WeightAssignment;
use super::ExactError;

/// Jet order meaning "no truncation".
pub const EXACT: u32 = u32::MAX;

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n_vars: usize) -> Self {
        Monomial(vec![0; n_vars])
    }

    pub fn var(n_vars: usize, index: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn n_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// All monomials in `n_vars` variables of total degree exactly `degree`,
    /// in the crate's monomial order.
    pub fn of_degree(n_vars: usize, degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut current = vec![0u32; n_vars];
        fn rec(pos: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            let n = current.len();
            if pos + 1 == n {
                current[pos] = left;
                out.push(Monomial(current.clone()));
                return;
            }
            for e in (0..=left).rev() {
                current[pos] = e;
                rec(pos + 1, left - e, current, out);
            }
            current[pos] = 0;
        }
        if n_vars == 0 {
            if degree == 0 {
                out.push(Monomial(Vec::new()));
            }
            return out;
        }
        rec(0, degree, &mut current, &mut out);
        out
    }

    /// All monomials of total degree at most `max_degree`, in monomial order.
    pub fn up_to_degree(n_vars: usize, max_degree: u32) -> Vec<Monomial> {
        (0..=max_degree)
            .flat_map(|d| Monomial::of_degree(n_vars, d))
            .collect()
    }

    pub fn format_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `n_vars` variables with every stored term of total degree
/// at most `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedPoly {
    n_vars: usize,
    order: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl TruncatedPoly {
    pub fn zero(n_vars: usize, order: u32) -> Self {
        TruncatedPoly {
            n_vars,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, order: u32, c: Rational) -> Self {
        Self::from_terms(n_vars, order, [(Monomial::one(n_vars), c)])
    }

    pub fn var(n_vars: usize, order: u32, index: usize) -> Self {
        Self::from_terms(n_vars, order, [(Monomial::var(n_vars, index), Rational::one())])
    }

    /// Builds a polynomial from terms, summing repeated monomials and dropping
    /// zero coefficients and terms above `order`.
    pub fn from_terms(
        n_vars: usize,
        order: u32,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Self {
        let mut p = TruncatedPoly::zero(n_vars, order);
        for (m, c) in terms {
            assert_eq!(m.n_vars(), n_vars, "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || m.degree() > self.order {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total degree of a stored term.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Lowest-order term, i.e. the first term in monomial order.
    pub fn lowest_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next()
    }

    /// Constant coefficient.
    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.n_vars))
    }

    /// Same terms, reinterpreted with a different jet order (terms above the
    /// new order are dropped).
    pub fn with_order(&self, order: u32) -> Self {
        let mut p = TruncatedPoly::zero(self.n_vars, order);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    /// Drops every term of total degree above `order`, keeping the jet order.
    pub fn truncated_to(&self, order: u32) -> Self {
        TruncatedPoly {
            n_vars: self.n_vars,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= order)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    fn check_vars(&self, other: &TruncatedPoly) -> Result<(), ExactError> {
        if self.n_vars != other.n_vars {
            return Err(ExactError::VariableMismatch {
                left: self.n_vars,
                right: other.n_vars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &TruncatedPoly) -> Result<TruncatedPoly, ExactError> {
        self.check_vars(other)?;
        let mut out = self.with_order(self.order.min(other.order));
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    /// Product with every term of total degree above `order` discarded.
    pub fn mul_truncate(&self, other: &TruncatedPoly, order: u32) -> Result<TruncatedPoly, ExactError> {
        self.check_vars(other)?;
        let mut out = TruncatedPoly::zero(self.n_vars, order);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.degree() + mb.degree() > order {
                    continue;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> TruncatedPoly {
        if c.is_zero() {
            return TruncatedPoly::zero(self.n_vars, self.order);
        }
        TruncatedPoly {
            n_vars: self.n_vars,
            order: self.order,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by a single monomial term.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> TruncatedPoly {
        let mut out = TruncatedPoly::zero(self.n_vars, self.order);
        for (mm, v) in &self.terms {
            out.add_term(mm.mul(m), v * c);
        }
        out
    }

    /// Partial derivative with respect to variable `index`.
    pub fn derivative(&self, index: usize) -> TruncatedPoly {
        let mut out = TruncatedPoly::zero(self.n_vars, self.order);
        for (m, c) in &self.terms {
            let e = m.0[index];
            if e == 0 {
                continue;
            }
            let mut d = m.clone();
            d.0[index] -= 1;
            out.add_term(d, c * Rational::from_integer(e.into()));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.n_vars, "evaluation point arity mismatch");
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    v *= x;
                }
            }
            total += v;
        }
        total
    }

    /// Restricts to the coordinate subspace where every variable outside
    /// `keep` is zero; the result has `keep.len()` variables in that order.
    pub fn restrict_to(&self, keep: &[usize]) -> TruncatedPoly {
        let mut out = TruncatedPoly::zero(keep.len(), self.order);
        for (m, c) in &self.terms {
            let killed = m
                .0
                .iter()
                .enumerate()
                .any(|(i, &e)| e > 0 && !keep.contains(&i));
            if killed {
                continue;
            }
            out.add_term(Monomial(keep.iter().map(|&i| m.0[i]).collect()), c.clone());
        }
        out
    }

    /// Re-expresses the polynomial in a larger variable set: variable `i`
    /// becomes variable `placement[i]` of `n_vars`.
    pub fn embed(&self, n_vars: usize, placement: &[usize]) -> TruncatedPoly {
        assert_eq!(placement.len(), self.n_vars);
        let mut out = TruncatedPoly::zero(n_vars, self.order);
        for (m, c) in &self.terms {
            let mut e = vec![0; n_vars];
            for (i, &p) in placement.iter().enumerate() {
                e[p] += m.0[i];
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Substitutes `x_i -> x_i * x_scale` for every `i` in `which`. Used for
    /// the scalar-multiplication family of a vector bundle.
    pub fn scale_vars_by(&self, which: &[usize], scale_var: usize) -> TruncatedPoly {
        let mut out = TruncatedPoly::zero(self.n_vars, self.order);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let extra: u32 = which.iter().map(|&i| m.0[i]).sum();
            e[scale_var] += extra;
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Substitutes `x_i -> t * x_i` for every `i` in `which`.
    pub fn scale_vars(&self, which: &[usize], t: &Rational) -> TruncatedPoly {
        let mut out = TruncatedPoly::zero(self.n_vars, self.order);
        for (m, c) in &self.terms {
            let k: u32 = which.iter().map(|&i| m.0[i]).sum();
            let mut f = c.clone();
            for _ in 0..k {
                f *= t;
            }
            out.add_term(m.clone(), f);
        }
        out
    }

    /// Weight of a monomial under `w`.
    pub fn monomial_weight(m: &Monomial, w: &WeightAssignment) -> u64 {
        w.weight_of(m.exponents())
    }

    /// Splits into weight-homogeneous parts listed by increasing weight.
    pub fn weight_decompose(&self, w: &WeightAssignment) -> Vec<(u64, TruncatedPoly)> {
        let mut parts: BTreeMap<u64, TruncatedPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts
                .entry(w.weight_of(m.exponents()))
                .or_insert_with(|| TruncatedPoly::zero(self.n_vars, self.order))
                .add_term(m.clone(), c.clone());
        }
        parts.into_iter().collect()
    }

    /// The single weight of a nonzero weight-homogeneous polynomial.
    pub fn homogeneous_weight(&self, w: &WeightAssignment) -> Option<u64> {
        let mut weights = self.terms.keys().map(|m| w.weight_of(m.exponents()));
        let first = weights.next()?;
        weights.all(|x| x == first).then_some(first)
    }

    pub fn format_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c < &Rational::zero();
            let mag = if negative { -c.clone() } else { c.clone() };
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let is_one = m.degree() == 0;
            if is_one {
                out.push_str(&format_rational(&mag));
            } else if mag.is_one() {
                out.push_str(&m.format_with(names));
            } else {
                out.push_str(&format!("{}*{}", format_rational(&mag), m.format_with(names)));
            }
        }
        out
    }
}

impl fmt::Display for TruncatedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with(&[]))
    }
}

impl std::ops::Add for &TruncatedPoly {
    type Output = TruncatedPoly;
    fn add(self, rhs: &TruncatedPoly) -> TruncatedPoly {
        self.try_add(rhs).expect("polynomial arity mismatch")
    }
}

impl std::ops::Sub for &TruncatedPoly {
    type Output = TruncatedPoly;
    fn sub(self, rhs: &TruncatedPoly) -> TruncatedPoly {
        self.try_add(&-rhs).expect("polynomial arity mismatch")
    }
}

impl std::ops::Neg for &TruncatedPoly {
    type Output = TruncatedPoly;
    fn neg(self) -> TruncatedPoly {
        TruncatedPoly {
            n_vars: self.n_vars,
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

/// Product truncated at the smaller of the two jet orders.
impl std::ops::Mul for &TruncatedPoly {
    type Output = TruncatedPoly;
    fn mul(self, rhs: &TruncatedPoly) -> TruncatedPoly {
        self.mul_truncate(rhs, self.order.min(rhs.order))
            .expect("polynomial arity mismatch")
    }
}

/// Free-function form of [`TruncatedPoly::mul_truncate`].
pub fn poly_mul_truncate(
    p: &TruncatedPoly,
    q: &TruncatedPoly,
    order: u32,
) -> Result<TruncatedPoly, ExactError> {
    p.mul_truncate(q, order)
}

/// Free-function form of [`TruncatedPoly::weight_decompose`].
pub fn weight_decompose(p: &TruncatedPoly, w: &WeightAssignment) -> Vec<(u64, TruncatedPoly)> {
    p.weight_decompose(w)
}

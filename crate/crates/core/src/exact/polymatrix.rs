//! Matrices with polynomial entries: evaluation, generic rank and inversion
//! over the formal patch.

use num_traits::{One, Zero};

use super::matrix::RationalMatrix;
use super::poly::{Monomial, TruncatedPoly, EXACT};
use super::rational::Rational;

/// Row-major matrix of polynomials; every entry shares `n_vars`.
pub type PolyMatrix = Vec<Vec<TruncatedPoly>>;

pub fn zero_matrix(rows: usize, cols: usize, n_vars: usize, order: u32) -> PolyMatrix {
    vec![vec![TruncatedPoly::zero(n_vars, order); cols]; rows]
}

pub fn identity_matrix(n: usize, n_vars: usize, order: u32) -> PolyMatrix {
    let mut m = zero_matrix(n, n, n_vars, order);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = TruncatedPoly::constant(n_vars, order, Rational::one());
    }
    m
}

pub fn from_rational(m: &RationalMatrix, n_vars: usize, order: u32) -> PolyMatrix {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| TruncatedPoly::constant(n_vars, order, m[(i, j)].clone()))
                .collect()
        })
        .collect()
}

pub fn eval_at(m: &PolyMatrix, cols: usize, point: &[Rational]) -> RationalMatrix {
    let rows: Vec<Vec<Rational>> = m
        .iter()
        .map(|row| row.iter().map(|p| p.eval(point)).collect())
        .collect();
    if rows.is_empty() {
        RationalMatrix::zeros(0, cols)
    } else {
        RationalMatrix::from_rows(rows)
    }
}

pub fn mul(a: &PolyMatrix, b: &PolyMatrix, n_vars: usize, order: u32) -> PolyMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = TruncatedPoly::zero(n_vars, order);
                    for (k, brow) in b.iter().enumerate().take(inner) {
                        if row[k].is_zero() || brow[j].is_zero() {
                            continue;
                        }
                        s = &s + &row[k].mul_truncate(&brow[j], order).expect("arity");
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn max_degree(m: &PolyMatrix) -> u32 {
    m.iter()
        .flatten()
        .filter_map(TruncatedPoly::degree)
        .max()
        .unwrap_or(0)
}

/// Rank over the field of rational functions. A nonzero minor of size `k`
/// has degree at most `k * d`, so it cannot vanish on the whole grid
/// `{0, ..., k*d}^n`; the maximum rank over that grid is the generic rank.
pub fn generic_rank(m: &PolyMatrix, cols: usize, n_vars: usize) -> usize {
    let rows = m.len();
    let full = rows.min(cols);
    if full == 0 {
        return 0;
    }
    let d = max_degree(m);
    let side = (full as u32) * d + 1;
    let mut best = 0;
    let mut idx = vec![0u32; n_vars];
    loop {
        let point: Vec<Rational> = idx
            .iter()
            .map(|&v| Rational::from_integer(v.into()))
            .collect();
        best = best.max(eval_at(m, cols, &point).rank());
        if best == full {
            return best;
        }
        let mut k = 0;
        loop {
            if k == n_vars {
                return best;
            }
            idx[k] += 1;
            if idx[k] < side {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Determinant by cofactor expansion (small matrices only).
pub fn determinant(m: &PolyMatrix, n_vars: usize) -> TruncatedPoly {
    let n = m.len();
    if n == 0 {
        return TruncatedPoly::constant(n_vars, EXACT, Rational::one());
    }
    if n == 1 {
        return m[0][0].with_order(EXACT);
    }
    let mut det = TruncatedPoly::zero(n_vars, EXACT);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: PolyMatrix = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j].with_order(EXACT) * &determinant(&minor, n_vars);
        det = if j % 2 == 0 { &det + &term } else { &det - &term };
    }
    det
}

/// Inverse of a square polynomial matrix that is invertible at the origin.
/// When the determinant is a nonzero constant the inverse is the exact
/// polynomial adjugate; otherwise it is the power series inverse truncated
/// at `order`.
pub fn inverse(m: &PolyMatrix, n_vars: usize, order: u32) -> Option<PolyMatrix> {
    let n = m.len();
    let origin = vec![Rational::zero(); n_vars];
    let m0 = eval_at(m, n, &origin);
    let m0_inv = m0.inverse()?;
    let det = determinant(m, n_vars);
    if det.degree() == Some(0) {
        let inv_det = Rational::one() / det.constant_term();
        let mut out = zero_matrix(n, n, n_vars, order);
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let minor: PolyMatrix = m
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| *r != j)
                    .map(|(_, row)| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != i)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let cof = determinant(&minor, n_vars).scale(&inv_det);
                let cof = if (i + j) % 2 == 0 { cof } else { -&cof };
                *entry = cof.with_order(order);
            }
        }
        return Some(out);
    }
    // M = M0 (I + M0^{-1} N), so M^{-1} = sum_k (-M0^{-1} N)^k M0^{-1}.
    let m0_inv_poly = from_rational(&m0_inv, n_vars, order);
    let nilp: PolyMatrix = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| {
                    let mut q = p.with_order(order);
                    let c = q.constant_term();
                    if !c.is_zero() {
                        q = &q - &TruncatedPoly::constant(n_vars, order, c);
                    }
                    q
                })
                .collect()
        })
        .collect();
    let step: PolyMatrix = mul(&m0_inv_poly, &nilp, n_vars, order)
        .into_iter()
        .map(|row| row.iter().map(|p| -p).collect())
        .collect();
    let mut term = m0_inv_poly.clone();
    let mut total = m0_inv_poly;
    for _ in 0..order.min(64) {
        term = mul(&step, &term, n_vars, order);
        if term.iter().flatten().all(TruncatedPoly::is_zero) {
            break;
        }
        for (trow, row) in total.iter_mut().zip(&term) {
            for (t, p) in trow.iter_mut().zip(row) {
                *t = &*t + p;
            }
        }
    }
    Some(total)
}

/// Lowest-order nonzero coefficient among entries, with the entry index.
pub fn lowest_nonzero(
    entries: impl IntoIterator<Item = (Vec<usize>, TruncatedPoly)>,
    max_order: u32,
) -> Option<(Vec<usize>, Monomial, Rational)> {
    let mut best: Option<(Vec<usize>, Monomial, Rational)> = None;
    for (index, p) in entries {
        if let Some((m, c)) = p.terms().find(|(m, _)| m.degree() <= max_order) {
            let better = match &best {
                None => true,
                Some((_, bm, _)) => m.degree() < bm.degree(),
            };
            if better {
                best = Some((index, m.clone(), c.clone()));
            }
        }
    }
    best
}

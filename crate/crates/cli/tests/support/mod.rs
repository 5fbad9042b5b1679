//! Independent oracles for the acceptance run. Linear algebra here is a
//! separate Gaussian elimination over the rationals; complexes are
//! assembled from their definitions rather than from library blocks.

#![allow(dead_code)]

use std::collections::BTreeMap;

use algebroidlab_core::algebroid::Representation;
use algebroidlab_core::cover::{CoverDatum, LocalSystemFamily, Transition};
use algebroidlab_core::exact::{int, Rational, RationalMatrix};
use algebroidlab_core::samples;
use algebroidlab_core::transport::{ExhaustionProblem, IndexOracle, Subexhaustion};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Row-major dense matrix.
pub type Mat = Vec<Vec<Rational>>;

fn zero() -> Rational {
    int(0)
}

pub fn rows_of(m: &RationalMatrix) -> Mat {
    (0..m.rows()).map(|i| m.row(i)).collect()
}

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![zero(); c]; r]
}

pub fn mul(a: &Mat, b: &Mat, inner: usize) -> Mat {
    let cols = b.first().map_or(0, Vec::len);
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for k in 0..inner {
            if row[k] == zero() {
                continue;
            }
            for j in 0..cols {
                if b[k][j] != zero() {
                    out[i][j] += &row[k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn apply(a: &Mat, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            let mut s = zero();
            for (x, y) in row.iter().zip(v) {
                if *x != zero() && *y != zero() {
                    s += x * y;
                }
            }
            s
        })
        .collect()
}

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &Mat, cols: usize) -> (Mat, Vec<usize>) {
    let mut a: Mat = m.iter().filter(|r| r.iter().any(|x| *x != zero())).cloned().collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        if row == a.len() {
            break;
        }
        let Some(p) = (row..a.len()).find(|&i| a[i][c] != zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = int(1) / &a[row][c];
        for x in a[row].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = a[row].clone();
        for (i, r) in a.iter_mut().enumerate() {
            if i == row || r[c] == zero() {
                continue;
            }
            let f = r[c].clone();
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                if *y != zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    a.truncate(row);
    (a, pivots)
}

pub fn rank(m: &Mat, cols: usize) -> usize {
    rref(m, cols).1.len()
}

/// Rank of a list of vectors of length `dim`.
pub fn span_rank(vectors: &[Vec<Rational>], dim: usize) -> usize {
    rank(&vectors.to_vec(), dim)
}

pub fn kernel(m: &Mat, cols: usize) -> Vec<Vec<Rational>> {
    let (r, pivots) = rref(m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![zero(); cols];
            v[f] = int(1);
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -&row[f];
            }
            v
        })
        .collect()
}

/// Columns of `m` (`rows x cols`).
pub fn columns(m: &Mat, cols: usize) -> Vec<Vec<Rational>> {
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Coefficients `a` with `sum a_k basis_k = v`, if any.
pub fn solve(basis: &[Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    let k = basis.len();
    let aug: Mat = (0..v.len())
        .map(|i| basis.iter().map(|b| b[i].clone()).chain(std::iter::once(v[i].clone())).collect())
        .collect();
    let (r, pivots) = rref(&aug, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut out = vec![zero(); k];
    for (row, &p) in r.iter().zip(&pivots) {
        out[p] = row[k].clone();
    }
    Some(out)
}

/// Betti numbers of a cochain complex given its differentials
/// `d[n]: C^n -> C^{n+1}` (`dims[n+1] x dims[n]`).
pub fn betti(dims: &[usize], d: &[Mat]) -> Vec<usize> {
    let ranks: Vec<usize> = d.iter().zip(dims).map(|(m, &c)| rank(m, c)).collect();
    (0..dims.len())
        .map(|n| dims[n] - ranks.get(n).copied().unwrap_or(0) - if n > 0 { ranks[n - 1] } else { 0 })
        .collect()
}

// ---------------------------------------------------------------------------
// Lie algebra cohomology from structure constants

/// Increasing index tuples of length `q` from `0..r`.
pub fn subsets(r: usize, q: usize) -> Vec<Vec<usize>> {
    if q == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for s in subsets(r, q - 1) {
        let start = s.last().map_or(0, |&l| l + 1);
        for i in start..r {
            let mut t = s.clone();
            t.push(i);
            out.push(t);
        }
    }
    out
}

/// Sorts `idx` and returns the permutation sign, or `None` on a repeat.
fn sort_signed(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 0..idx.len() {
        for j in 0..idx.len() - 1 - i {
            if idx[j] == idx[j + 1] {
                return None;
            }
            if idx[j] > idx[j + 1] {
                idx.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

/// `H^q(g; V)` for `c[i][j][k]` the constants of `[e_i, e_j]` and `rho[i]`
/// the matrix of `e_i` on `V`, by the defining formula of the differential.
pub fn lie_cohomology(c: &[Vec<Vec<Rational>>], rho: &[Mat], m: usize) -> Vec<usize> {
    let r = c.len();
    let basis: Vec<Vec<Vec<usize>>> = (0..=r).map(|q| subsets(r, q)).collect();
    let index = |q: usize, s: &[usize]| basis[q].iter().position(|t| t.as_slice() == s).unwrap();
    let dims: Vec<usize> = basis.iter().map(|b| b.len() * m).collect();
    let mut d = Vec::new();
    for q in 0..r {
        let mut mat = zeros(dims[q + 1], dims[q]);
        // column: omega = e^{S} (x) v_a ; row: value on (T, b)
        for (si, _) in basis[q].iter().enumerate() {
            for a in 0..m {
                let col = si * m + a;
                let omega = |args: &[usize]| -> Option<Rational> {
                    let mut s = args.to_vec();
                    let sign = sort_signed(&mut s)?;
                    (index(q, &s) == si).then(|| int(sign))
                };
                for (ti, t) in basis[q + 1].iter().enumerate() {
                    let mut val = vec![zero(); m];
                    for i in 0..=q {
                        let rest: Vec<usize> = t.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| x).collect();
                        if let Some(w) = omega(&rest) {
                            let s = if i % 2 == 0 { w } else { -w };
                            for b in 0..m {
                                val[b] += &s * &rho[t[i]][b][a];
                            }
                        }
                    }
                    for i in 0..=q {
                        for j in i + 1..=q {
                            let rest: Vec<usize> =
                                t.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| x).collect();
                            for (k, ck) in c[t[i]][t[j]].iter().enumerate() {
                                if *ck == zero() {
                                    continue;
                                }
                                let mut args = vec![k];
                                args.extend(&rest);
                                if let Some(w) = omega(&args) {
                                    let s = if (i + j) % 2 == 0 { w } else { -w };
                                    val[a] += &s * ck;
                                }
                            }
                        }
                    }
                    for (b, v) in val.into_iter().enumerate() {
                        mat[ti * m + b][col] = v;
                    }
                }
            }
        }
        d.push(mat);
    }
    betti(&dims, &d)
}

/// Constant structure data of a representation over a point.
pub fn constants(rep: &Representation) -> (Vec<Vec<Vec<Rational>>>, Vec<Mat>) {
    let a = &rep.algebroid;
    let c = a.bracket.iter().map(|m| m.iter().map(|row| row.iter().map(|p| p.constant_term()).collect()).collect()).collect();
    let g = rep.gamma.iter().map(|m| m.iter().map(|row| row.iter().map(|p| p.constant_term()).collect()).collect()).collect();
    (c, g)
}

/// `[[e_i,e_j],e_k] + cyclic`, component `m`, from constants.
pub fn jacobiator(c: &[Vec<Vec<Rational>>], i: usize, j: usize, k: usize, m: usize) -> Rational {
    let mut s = zero();
    for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
        for l in 0..c.len() {
            s += &c[x][y][l] * &c[l][z][m];
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Random local-system families

#[derive(Clone, Copy, Debug)]
pub enum Fibre {
    Line,
    Plane,
    Sl2Trivial,
    Sl2Adjoint,
    Aff(i64),
}

fn nonzero(rng: &mut ChaCha8Rng) -> Rational {
    int([-2i64, -1, 1, 2, 3][rng.gen_range(0..5)])
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
                if p.determinant() != zero() {
                    break Transition { frame: p, fibre: scalar(nonzero(rng)) };
                }
            },
            Fibre::Sl2Trivial | Fibre::Sl2Adjoint => {
                // torus element, optionally composed with the Weyl flip
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

/// Random cover (connected when asked) with random filled triangles, and a
/// family whose transitions satisfy the cocycle condition on them.
pub fn random_family(rng: &mut ChaCha8Rng, connected: bool) -> (CoverDatum, LocalSystemFamily) {
    let n = rng.gen_range(1..5);
    let mut edges = Vec::new();
    for i in 1..n {
        if connected || rng.gen_bool(0.85) {
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
    let fibre = Fibre::pick(rng);
    let gauge: Vec<Transition> = (0..n).map(|_| fibre.automorphism(rng)).collect();
    let mut family = LocalSystemFamily::constant(fibre.rep(), n);
    for e in &edges {
        let (i, j) = (e[0], e[1]);
        let in_triangle = triangles.iter().any(|t| t.contains(&i) && t.contains(&j));
        let t = if in_triangle { gauge[i].compose(&gauge[j].inverse().unwrap()) } else { fibre.automorphism(rng) };
        family = family.with_transition(i, j, t);
    }
    let names = (1..=n).map(|i| format!("U{i}")).collect();
    (CoverDatum::new(names, edges.into_iter().chain(triangles)), family)
}

// ---------------------------------------------------------------------------
// Čech–CE total complex

fn face(s: &[usize], k: usize) -> Vec<usize> {
    s.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &v)| v).collect()
}

/// `(-1)^k`.
fn sign(k: usize) -> Rational {
    if k % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

/// Data of a family read off chart by chart.
pub struct Charts {
    /// Simplices by dimension, sorted.
    pub simplices: Vec<Vec<Vec<usize>>>,
    /// `dim Λ^q g* ⊗ D`.
    pub fibre_dims: Vec<usize>,
    /// `d[i][q]` on chart `i`.
    pub d: Vec<Vec<Mat>>,
    /// Transport `T(i <- j)` on `q`-cochains, for every ordered overlap.
    pub transport: BTreeMap<(usize, usize, usize), Mat>,
}

impl Charts {
    pub fn new(lsf: &LocalSystemFamily, cover: &CoverDatum) -> Self {
        let mut simplices: Vec<Vec<Vec<usize>>> = Vec::new();
        for s in cover.nonempty.iter().filter(|s| s.len() <= cover.max_dim + 1) {
            if simplices.len() < s.len() {
                simplices.resize(s.len(), Vec::new());
            }
            simplices[s.len() - 1].push(s.clone());
        }
        for l in &mut simplices {
            l.sort();
        }
        let r = lsf.rank();
        let fibre_dims: Vec<usize> = (0..=r).map(|q| lsf.cochain_basis(q).len()).collect();
        let n = cover.n_charts();
        let d = (0..n).map(|i| (0..r).map(|q| rows_of(&lsf.differential(i, q))).collect()).collect();
        let mut transport = BTreeMap::new();
        for e in simplices.get(1).into_iter().flatten() {
            for q in 0..=r {
                transport.insert((e[0], e[1], q), rows_of(&lsf.cochain_transport(e[0], e[1], q)));
                transport.insert((e[1], e[0], q), rows_of(&lsf.cochain_transport(e[1], e[0], q)));
            }
        }
        Charts { simplices, fibre_dims, d, transport }
    }

    pub fn rank(&self) -> usize {
        self.fibre_dims.len() - 1
    }

    fn index(&self, s: &[usize]) -> usize {
        self.simplices[s.len() - 1].iter().position(|t| t.as_slice() == s).unwrap()
    }
}

/// `Tot^n = ⊕_{p+q=n} ⊕_σ C^q` with `D = δ + (-1)^p d`, cochains on `σ`
/// written in the frame of `σ_0`.
pub struct Total {
    /// `(p, simplex index, q, offset)` of each block of degree `n`.
    pub blocks: Vec<Vec<(usize, usize, usize, usize)>>,
    pub dims: Vec<usize>,
    pub d: Vec<Mat>,
}

impl Total {
    pub fn build(ch: &Charts) -> Self {
        let r = ch.rank();
        let pmax = ch.simplices.len() - 1;
        let top = pmax + r;
        let mut blocks = vec![Vec::new(); top + 1];
        let mut dims = vec![0; top + 1];
        for n in 0..=top {
            for p in 0..=pmax.min(n) {
                let q = n - p;
                if q > r {
                    continue;
                }
                for s in 0..ch.simplices[p].len() {
                    blocks[n].push((p, s, q, dims[n]));
                    dims[n] += ch.fibre_dims[q];
                }
            }
        }
        let find = |n: usize, p: usize, s: usize| blocks[n].iter().find(|b| b.0 == p && b.1 == s).map(|b| b.3);
        let mut d = Vec::new();
        for n in 0..top {
            let mut m = zeros(dims[n + 1], dims[n]);
            for &(p, s, q, off) in &blocks[n] {
                let sigma = &ch.simplices[p][s];
                let f = ch.fibre_dims[q];
                if q < r {
                    let tgt = find(n + 1, p, s).unwrap();
                    let dq = &ch.d[sigma[0]][q];
                    for (a, row) in dq.iter().enumerate() {
                        for (b, x) in row.iter().enumerate() {
                            m[tgt + a][off + b] += &sign(p) * x;
                        }
                    }
                }
                if p < pmax {
                    for (t, tau) in ch.simplices[p + 1].iter().enumerate() {
                        for k in 0..tau.len() {
                            if face(tau, k) != *sigma {
                                continue;
                            }
                            let tgt = find(n + 1, p + 1, t).unwrap();
                            if k == 0 {
                                let tr = &ch.transport[&(tau[0], tau[1], q)];
                                for a in 0..f {
                                    for b in 0..f {
                                        m[tgt + a][off + b] += &tr[a][b];
                                    }
                                }
                            } else {
                                for a in 0..f {
                                    m[tgt + a][off + a] += sign(k);
                                }
                            }
                        }
                    }
                }
            }
            d.push(m);
        }
        Total { blocks, dims, d }
    }

    pub fn squares_to_zero(&self) -> bool {
        self.d.windows(2).enumerate().all(|(n, w)| {
            mul(&w[1], &w[0], self.dims[n + 1]).iter().flatten().all(|x| *x == zero())
        })
    }

    pub fn betti(&self) -> Vec<usize> {
        betti(&self.dims, &self.d)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Rank of `H^n(Tot) -> H^n(fibre over x)`: cocycles restricted to the
    /// `(0, x, n)` block, modulo fibre coboundaries.
    pub fn restriction_rank(&self, ch: &Charts, x: usize, n: usize) -> usize {
        let r = ch.rank();
        if n > r || n >= self.dims.len() {
            return 0;
        }
        let cols = self.dims[n];
        let z = if n < self.d.len() { kernel(&self.d[n], cols) } else { (0..cols).map(|i| unit(cols, i)).collect() };
        let xi = ch.index(&[x]);
        let off = find_block(&self.blocks[n], 0, xi).unwrap();
        let f = ch.fibre_dims[n];
        let restricted: Vec<Vec<Rational>> = z.iter().map(|v| v[off..off + f].to_vec()).collect();
        let boundaries = if n > 0 { columns(&ch.d[x][n - 1], ch.fibre_dims[n - 1]) } else { Vec::new() };
        let mut all = boundaries.clone();
        all.extend(restricted);
        span_rank(&all, f) - span_rank(&boundaries, f)
    }
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![zero(); n];
    v[i] = int(1);
    v
}

fn find_block(blocks: &[(usize, usize, usize, usize)], p: usize, s: usize) -> Option<usize> {
    blocks.iter().find(|b| b.0 == p && b.1 == s).map(|b| b.3)
}

/// Fibre cohomology of every chart in degree `q`: representatives and a
/// way to read off coordinates of a cocycle.
struct ChartClasses {
    reps: Vec<Vec<Rational>>,
    boundaries: Vec<Vec<Rational>>,
}

impl ChartClasses {
    fn new(ch: &Charts, i: usize, q: usize) -> Self {
        let f = ch.fibre_dims[q];
        let z = if q < ch.rank() { kernel(&ch.d[i][q], f) } else { (0..f).map(|k| unit(f, k)).collect() };
        let b = if q > 0 { columns(&ch.d[i][q - 1], ch.fibre_dims[q - 1]) } else { Vec::new() };
        let (bb, _) = rref(&b, f);
        let mut reps = Vec::new();
        let mut seen = bb.clone();
        for v in z {
            let mut trial = seen.clone();
            trial.push(v.clone());
            if span_rank(&trial, f) > seen.len() {
                seen.push(v.clone());
                reps.push(v);
            }
        }
        ChartClasses { reps, boundaries: bb }
    }

    fn coords(&self, v: &[Rational]) -> Vec<Rational> {
        let mut basis = self.reps.clone();
        basis.extend(self.boundaries.iter().cloned());
        let a = solve(&basis, v).expect("cocycle");
        a[..self.reps.len()].to_vec()
    }
}

/// `E_2^{p,q} = H^p(nerve; H^q)` with the transition-induced maps.
pub fn e2(ch: &Charts) -> BTreeMap<(usize, usize), usize> {
    let n_charts = ch.simplices[0].len();
    let pmax = ch.simplices.len() - 1;
    let mut out = BTreeMap::new();
    for q in 0..=ch.rank() {
        let classes: Vec<ChartClasses> = (0..n_charts).map(|i| ChartClasses::new(ch, i, q)).collect();
        let h: Vec<usize> = classes.iter().map(|c| c.reps.len()).collect();
        let induced = |i: usize, j: usize| -> Mat {
            let tr = &ch.transport[&(i, j, q)];
            let cols: Vec<Vec<Rational>> = classes[j].reps.iter().map(|v| classes[i].coords(&apply(tr, v))).collect();
            (0..h[i]).map(|a| cols.iter().map(|c| c[a].clone()).collect()).collect()
        };
        let offsets = |p: usize| -> (Vec<usize>, usize) {
            let mut off = Vec::new();
            let mut total = 0;
            for s in &ch.simplices[p] {
                off.push(total);
                total += h[s[0]];
            }
            (off, total)
        };
        let mut dims = Vec::new();
        let mut delta = Vec::new();
        for p in 0..=pmax {
            let (off, total) = offsets(p);
            dims.push(total);
            if p == pmax {
                break;
            }
            let (toff, ttotal) = offsets(p + 1);
            let mut m = zeros(ttotal, total);
            for (t, tau) in ch.simplices[p + 1].iter().enumerate() {
                for k in 0..tau.len() {
                    let s = ch.index(&face(tau, k));
                    if k == 0 {
                        let rho = induced(tau[0], tau[1]);
                        for (a, row) in rho.iter().enumerate() {
                            for (b, x) in row.iter().enumerate() {
                                m[toff[t] + a][off[s] + b] += x;
                            }
                        }
                    } else {
                        for a in 0..h[tau[0]] {
                            m[toff[t] + a][off[s] + a] += sign(k);
                        }
                    }
                }
            }
            delta.push(m);
        }
        for (p, b) in betti(&dims, &delta).into_iter().enumerate() {
            out.insert((p, q), b);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Index oracles

pub fn random_monotone(rng: &mut ChaCha8Rng) -> IndexOracle {
    let len = rng.gen_range(0..4);
    let mut prefix = Vec::new();
    let mut v = rng.gen_range(1..4u64);
    for _ in 0..len {
        prefix.push(v);
        v += rng.gen_range(0..3);
    }
    let slope = rng.gen_range(1..4u64);
    let last = prefix.last().copied().unwrap_or(1) as i64;
    let offset = last - slope as i64 * (len as i64 + 1) + rng.gen_range(0..3);
    IndexOracle { prefix, slope, offset }
}

pub fn random_problem(rng: &mut ChaCha8Rng) -> ExhaustionProblem {
    let n = rng.gen_range(1..=6);
    let mut ep = ExhaustionProblem::new((1..=n).map(|i| format!("U{i}")).collect());
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                ep = ep.with_oracle(j, i, random_monotone(rng)).with_oracle(i, j, random_monotone(rng));
            }
        }
    }
    ep
}

/// `μ(n)` from the definition: prefix, then `max(1, slope n + offset)`.
pub fn eval(mu: &IndexOracle, n: u64) -> u64 {
    match mu.prefix.get(n as usize - 1) {
        Some(&v) => v,
        None => (mu.slope as i64 * n as i64 + mu.offset).max(1) as u64,
    }
}

/// Every interleaving inequality and strict growth, checked directly.
pub fn interleaves(ep: &ExhaustionProblem, s: &Subexhaustion) -> bool {
    let grows = s.alpha.iter().all(|a| a.first().is_some_and(|&x| x >= 1) && a.windows(2).all(|w| w[0] < w[1]));
    let nested = ep.oracles.iter().all(|(&(j, i), mu)| {
        let (ai, aj) = (&s.alpha[i], &s.alpha[j]);
        (0..ai.len()).all(|k| {
            if i < j {
                eval(mu, ai[k]) <= aj[k]
            } else {
                // μ_{ji} with j < i: previous index of the larger chart
                k == 0 || eval(mu, ai[k - 1]) <= aj[k]
            }
        })
    });
    grows && nested
}

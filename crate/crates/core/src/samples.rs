//! Small standard algebroids used by tests, demos and the acceptance suite.

use num_traits::Zero;

use crate::algebroid::{LieAlgebroidPatch, Patch, Representation};
use crate::exact::{int, ColumnSolver, Rational, Span};

fn names(vars: &[&str]) -> Vec<String> {
    vars.iter().map(|s| s.to_string()).collect()
}

/// Abelian Lie algebra of rank `r` over a point.
pub fn abelian(r: usize) -> LieAlgebroidPatch {
    let frame = (1..=r).map(|i| format!("e{i}")).collect();
    LieAlgebroidPatch::trivial(Patch::point(0), frame)
}

/// `sl2` with frame `(h, e, f)` over a point.
pub fn sl2() -> LieAlgebroidPatch {
    sl2_over(&[], 0)
}

/// `sl2` with constant structure and zero anchor over a patch.
pub fn sl2_over(vars: &[&str], order: u32) -> LieAlgebroidPatch {
    let patch = Patch::new(names(vars), order);
    let mut a = LieAlgebroidPatch::trivial(patch, names(&["h", "e", "f"]));
    let c = |k: i64| a.patch.constant(int(k));
    let (he, hf, ef) = (c(2), c(-2), c(1));
    a.set_bracket(0, 1, 1, he);
    a.set_bracket(0, 2, 2, hf);
    a.set_bracket(1, 2, 0, ef);
    a
}

/// Tangent algebroid of a patch, frame `d<var>`.
pub fn tangent(vars: &[&str], order: u32) -> LieAlgebroidPatch {
    tangent_of(Patch::new(names(vars), order))
}

pub fn tangent_of(patch: Patch) -> LieAlgebroidPatch {
    let frame = patch.vars.iter().map(|v| format!("d{v}")).collect();
    let mut a = LieAlgebroidPatch::trivial(patch, frame);
    for i in 0..a.rank() {
        a.anchor[i][i] = a.patch.constant(int(1));
    }
    a
}

/// `e1 = d/dx, e2 = x d/dy, e3 = d/dy` on the `(x, y)` plane:
/// the Heisenberg algebra acting by affine vector fields.
pub fn heisenberg_action(order: u32) -> LieAlgebroidPatch {
    let patch = Patch::new(names(&["x", "y"]), order);
    let mut a = LieAlgebroidPatch::trivial(patch, names(&["e1", "e2", "e3"]));
    a.anchor[0][0] = a.patch.constant(int(1));
    a.anchor[1][1] = a.patch.var(0);
    a.anchor[2][1] = a.patch.constant(int(1));
    let one = a.patch.constant(int(1));
    a.set_bracket(0, 1, 2, one);
    a
}

/// `e1 = d/dx, e2 = x d/dx` on the line, `[e1, e2] = e1`.
pub fn affine_line(order: u32) -> LieAlgebroidPatch {
    let patch = Patch::new(names(&["x"]), order);
    let mut a = LieAlgebroidPatch::trivial(patch, names(&["e1", "e2"]));
    a.anchor[0][0] = a.patch.constant(int(1));
    a.anchor[1][0] = a.patch.var(0);
    let one = a.patch.constant(int(1));
    a.set_bracket(0, 1, 0, one);
    a
}

/// The two-dimensional nonabelian Lie algebra, `[e1, e2] = e1`.
pub fn aff1() -> LieAlgebroidPatch {
    let mut a = LieAlgebroidPatch::trivial(Patch::point(0), names(&["e1", "e2"]));
    let one = a.patch.constant(int(1));
    a.set_bracket(0, 1, 0, one);
    a
}

/// One-dimensional representation `e_i ↦ values[i]`; flat when the values
/// vanish on brackets.
pub fn character(a: &LieAlgebroidPatch, values: &[Rational]) -> Representation {
    let mut rep = Representation::trivial(a.clone(), 1);
    for (g, v) in rep.gamma.iter_mut().zip(values) {
        g[0][0] = a.patch.constant(v.clone());
    }
    rep
}

/// `sl2 ⊕ T(patch)`: transitive, isotropy `sl2`.
pub fn sl2_times_tangent(vars: &[&str], order: u32, weights: Option<Vec<u32>>) -> LieAlgebroidPatch {
    let mut patch = Patch::new(names(vars), order);
    if let Some(w) = weights {
        patch = patch.with_weights(w);
    }
    let n = patch.n_vars();
    let mut frame = names(&["h", "e", "f"]);
    frame.extend(patch.vars.iter().map(|v| format!("d{v}")));
    let mut a = LieAlgebroidPatch::trivial(patch, frame);
    for i in 0..n {
        a.anchor[3 + i][i] = a.patch.constant(int(1));
    }
    let c = |k: i64| a.patch.constant(int(k));
    let (he, hf, ef) = (c(2), c(-2), c(1));
    a.set_bracket(0, 1, 1, he);
    a.set_bracket(0, 2, 2, hf);
    a.set_bracket(1, 2, 0, ef);
    a
}

/// Trivial line bundle representation.
pub fn trivial_line(a: &LieAlgebroidPatch) -> Representation {
    Representation::trivial(a.clone(), 1)
}

/// Elementary affine vector field on `R^n`: `d/dx_b` (`source = None`) or
/// `x_a d/dx_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffineField {
    pub source: Option<usize>,
    pub target: usize,
}

/// Affine vector field `A x + b` stored as `(A, b)`, `A[i][j]` the
/// coefficient of `x_j` in component `i`.
type Affine = (Vec<Vec<Rational>>, Vec<Rational>);

fn affine_bracket(x: &Affine, y: &Affine) -> Affine {
    // [X, Y] = DY X - DX Y for X = Ax + a, Y = Bx + b
    let n = x.1.len();
    let (a, av) = x;
    let (b, bv) = y;
    let mut lin = vec![vec![Rational::zero(); n]; n];
    let mut cst = vec![Rational::zero(); n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                lin[i][j] += &b[i][k] * &a[k][j] - &a[i][k] * &b[k][j];
            }
        }
        for k in 0..n {
            cst[i] += &b[i][k] * &av[k] - &a[i][k] * &bv[k];
        }
    }
    (lin, cst)
}

fn flatten(f: &Affine) -> Vec<Rational> {
    f.0.iter().flatten().cloned().chain(f.1.iter().cloned()).collect()
}

fn unflatten(v: &[Rational], n: usize) -> Affine {
    let lin = (0..n).map(|i| v[i * n..(i + 1) * n].to_vec()).collect();
    (lin, v[n * n..].to_vec())
}

/// Action algebroid of the Lie algebra of affine vector fields generated by
/// `fields` under the bracket, together with its standard representation
/// `Γ_i = -A_i` on `R^n`. The frame is homogeneous: constant fields first,
/// then linear ones, each in reduced echelon form.
pub fn affine_action(n: usize, order: u32, fields: &[AffineField]) -> Representation {
    let dim = n * n + n;
    let to_affine = |f: &AffineField| -> Affine {
        let mut lin = vec![vec![Rational::zero(); n]; n];
        let mut cst = vec![Rational::zero(); n];
        match f.source {
            Some(a) => lin[f.target][a] = int(1),
            None => cst[f.target] = int(1),
        }
        (lin, cst)
    };
    let mut span = Span::new(dim);
    let mut gens: Vec<Affine> = Vec::new();
    for f in fields {
        let af = to_affine(f);
        if span.insert(&flatten(&af)) {
            gens.push(af);
        }
    }
    let mut i = 0;
    while i < gens.len() {
        for j in 0..i {
            let br = affine_bracket(&gens[j], &gens[i]);
            if span.insert(&flatten(&br)) {
                gens.push(br);
            }
        }
        i += 1;
    }
    // homogeneous echelon basis: constant part and linear part separately
    let mut cst_span = Span::new(dim);
    let mut lin_span = Span::new(dim);
    for g in &gens {
        let v = flatten(g);
        if g.0.iter().flatten().all(Zero::is_zero) {
            cst_span.insert(&v);
        } else {
            lin_span.insert(&v);
        }
    }
    let basis: Vec<Vec<Rational>> = cst_span.basis().into_iter().chain(lin_span.basis()).collect();
    let r = basis.len();
    let solver = ColumnSolver::new(dim, &basis).expect("independent");
    let names: Vec<String> = (0..n).map(|i| format!("x{}", i + 1)).collect();
    let patch = Patch::new(names, order);
    let frame = (1..=r).map(|i| format!("e{i}")).collect();
    let mut a = LieAlgebroidPatch::trivial(patch, frame);
    let fields: Vec<Affine> = basis.iter().map(|v| unflatten(v, n)).collect();
    for (i, (lin, cst)) in fields.iter().enumerate() {
        for t in 0..n {
            let mut p = a.patch.constant(cst[t].clone());
            for (s, c) in lin[t].iter().enumerate() {
                if !c.is_zero() {
                    p = &p + &a.patch.var(s).scale(c);
                }
            }
            a.anchor[i][t] = p;
        }
    }
    for i in 0..r {
        for j in 0..r {
            let br = affine_bracket(&fields[i], &fields[j]);
            let coords = solver.coordinates(&flatten(&br)).expect("closed under bracket");
            for (k, c) in coords.into_iter().enumerate() {
                a.bracket[i][j][k] = a.patch.constant(c);
            }
        }
    }
    let gamma = fields
        .iter()
        .map(|(lin, _)| {
            lin.iter()
                .map(|row| row.iter().map(|c| a.patch.constant(-c)).collect())
                .collect()
        })
        .collect();
    let frame = (1..=n).map(|i| format!("v{i}")).collect();
    Representation { algebroid: a, frame, gamma, frame_weights: None }
}

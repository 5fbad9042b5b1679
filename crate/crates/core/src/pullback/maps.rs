//! Structured maps into a patch, transversality and pullback algebroids
//! `φ^!(A) = T N ×_{TM} A`.

use num_traits::{One, Zero};

use crate::algebroid::{induced_subalgebroid, kernel_frame, KernelFrame, LieAlgebroidPatch, Patch, Representation};
use crate::exact::polymatrix::{self, PolyMatrix};
use crate::exact::{ColumnSolver, Rational, RationalMatrix, TruncatedPoly, WeightAssignment};

use super::PullbackError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructuredMap {
    Identity,
    /// `M × R^k → M`, the new coordinates appended after those of `M`.
    Projection { fibre_vars: Vec<String>, fibre_weights: Option<Vec<u32>> },
    /// Inclusion of the slice where the `normal` coordinates vanish.
    SliceInclusion { normal: Vec<usize> },
    PointInclusion { point: Vec<Rational> },
    /// `m_t(x, y) = (x, t y)` on the `fibre` coordinates.
    Rescaling { fibre: Vec<usize>, t: Rational },
}

impl StructuredMap {
    pub fn kind(&self) -> &'static str {
        match self {
            StructuredMap::Identity => "identity",
            StructuredMap::Projection { .. } => "projection",
            StructuredMap::SliceInclusion { .. } => "slice",
            StructuredMap::PointInclusion { .. } => "point",
            StructuredMap::Rescaling { .. } => "rescaling",
        }
    }

    /// Dimension of the source for a target of dimension `n`.
    pub fn source_dim(&self, n: usize) -> usize {
        match self {
            StructuredMap::Identity | StructuredMap::Rescaling { .. } => n,
            StructuredMap::Projection { fibre_vars, .. } => n + fibre_vars.len(),
            StructuredMap::SliceInclusion { normal } => n - normal.len(),
            StructuredMap::PointInclusion { .. } => 0,
        }
    }

    /// Image of a source point and the columns of the Jacobian there.
    fn image_and_jacobian(&self, n: usize, x: &[Rational]) -> (Vec<Rational>, Vec<Vec<Rational>>) {
        let unit = |j: usize, s: Rational| {
            let mut v = vec![Rational::zero(); n];
            v[j] = s;
            v
        };
        match self {
            StructuredMap::Identity => (x.to_vec(), (0..n).map(|j| unit(j, Rational::one())).collect()),
            StructuredMap::Projection { fibre_vars, .. } => {
                let mut cols: Vec<Vec<Rational>> = (0..n).map(|j| unit(j, Rational::one())).collect();
                cols.extend((0..fibre_vars.len()).map(|_| vec![Rational::zero(); n]));
                (x[..n].to_vec(), cols)
            }
            StructuredMap::SliceInclusion { normal } => {
                let keep: Vec<usize> = (0..n).filter(|j| !normal.contains(j)).collect();
                let mut y = vec![Rational::zero(); n];
                for (&j, v) in keep.iter().zip(x) {
                    y[j] = v.clone();
                }
                (y, keep.iter().map(|&j| unit(j, Rational::one())).collect())
            }
            StructuredMap::PointInclusion { point } => (point.clone(), Vec::new()),
            StructuredMap::Rescaling { fibre, t } => {
                let y = x
                    .iter()
                    .enumerate()
                    .map(|(j, v)| if fibre.contains(&j) { v * t } else { v.clone() })
                    .collect();
                let cols = (0..n)
                    .map(|j| unit(j, if fibre.contains(&j) { t.clone() } else { Rational::one() }))
                    .collect();
                (y, cols)
            }
        }
    }

    fn check(&self, a: &LieAlgebroidPatch) -> Result<(), PullbackError> {
        let n = a.n_vars();
        let bad = |msg: String| Err(PullbackError::Structural(msg));
        match self {
            StructuredMap::SliceInclusion { normal } | StructuredMap::Rescaling { fibre: normal, .. } => {
                if let Some(j) = normal.iter().find(|&&j| j >= n) {
                    return bad(format!("coordinate index {j} out of range for {n} coordinates"));
                }
            }
            StructuredMap::PointInclusion { point } if point.len() != n => {
                return bad(format!("point has {} coordinates, patch has {n}", point.len()));
            }
            StructuredMap::Projection { fibre_vars, fibre_weights: Some(w) } if w.len() != fibre_vars.len() => {
                return bad("one weight per fibre coordinate".into());
            }
            _ => {}
        }
        Ok(())
    }
}

/// Outcome of [`transversality_check`]: the rank of `im dφ + im rho` at
/// `φ(x)` and the generators that span it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalityCertificate {
    pub transverse: bool,
    pub rank: usize,
    pub target_dim: usize,
    pub spanning: Vec<String>,
}

/// Whether `im(dφ_x) + im(rho_A at φ(x))` is the whole tangent space.
pub fn transversality_check(
    phi: &StructuredMap,
    a: &LieAlgebroidPatch,
    x: &[Rational],
) -> Result<TransversalityCertificate, PullbackError> {
    phi.check(a)?;
    let n = a.n_vars();
    let m = phi.source_dim(n);
    if x.len() != m {
        return Err(PullbackError::Structural(format!(
            "point has {} coordinates, the source of the {} map has {m}",
            x.len(),
            phi.kind()
        )));
    }
    let (y, jac) = phi.image_and_jacobian(n, x);
    let mut labels = Vec::new();
    let mut cols = Vec::new();
    for (j, c) in jac.into_iter().enumerate() {
        labels.push(format!("dphi(d/du{})", j + 1));
        cols.push(c);
    }
    let rho = polymatrix::eval_at(&a.anchor, n, &y);
    for i in 0..a.rank() {
        labels.push(format!("rho({})", a.frame[i]));
        cols.push(rho.row(i));
    }
    let mat = RationalMatrix::from_columns(n, &cols);
    let rref = mat.rref();
    let spanning = rref.pivots.iter().map(|&p| labels[p].clone()).collect();
    let rank = rref.pivots.len();
    Ok(TransversalityCertificate { transverse: rank == n, rank, target_dim: n, spanning })
}

fn map_polys(m: &PolyMatrix, f: impl Fn(&TruncatedPoly) -> TruncatedPoly) -> PolyMatrix {
    m.iter().map(|row| row.iter().map(&f).collect()).collect()
}

fn map_gamma(rep: &Representation, f: impl Fn(&TruncatedPoly) -> TruncatedPoly) -> Vec<PolyMatrix> {
    rep.gamma.iter().map(|g| map_polys(g, &f)).collect()
}

/// `Γ'_a = sum_i s_a^i φ^*Γ_i` for kernel sections `s_a`.
fn combine_gamma(gamma: &[PolyMatrix], sections: &PolyMatrix, n_vars: usize, order: u32) -> Vec<PolyMatrix> {
    sections
        .iter()
        .map(|s| {
            let m = gamma.first().map_or(0, Vec::len);
            let mut g = polymatrix::zero_matrix(m, m, n_vars, order);
            for (si, gi) in s.iter().zip(gamma) {
                if si.is_zero() {
                    continue;
                }
                for (grow, srow) in g.iter_mut().zip(gi) {
                    for (x, y) in grow.iter_mut().zip(srow) {
                        *x = &*x + &(si * y);
                    }
                }
            }
            g
        })
        .collect()
}

/// Kept coordinates of the slice `{y = 0}` and the frame of `i^!(A)`
/// inside `A|_{y=0}`: the kernel of the normal block of the anchor.
pub(crate) fn slice_frame(a: &LieAlgebroidPatch, normal: &[usize]) -> Result<(Vec<usize>, KernelFrame), PullbackError> {
    let n = a.n_vars();
    let keep: Vec<usize> = (0..n).filter(|j| !normal.contains(j)).collect();
    let res = |p: &TruncatedPoly| p.restrict_to(&keep);
    let y_block: PolyMatrix = a.anchor.iter().map(|row| normal.iter().map(|&j| res(&row[j])).collect()).collect();
    let origin = vec![Rational::zero(); keep.len()];
    let rank0 = polymatrix::eval_at(&y_block, normal.len(), &origin).rank();
    if rank0 < normal.len() {
        return Err(PullbackError::NotTransverse {
            kind: "slice",
            point: origin,
            rank: rank0 + keep.len(),
            needed: n,
        });
    }
    let frame = kernel_frame(&y_block, normal.len(), keep.len(), a.order()).ok_or(PullbackError::NonConstantRank)?;
    Ok((keep, frame))
}

/// Pullback of `A` (and optionally of a representation) along a structured
/// map, with an explicit frame.
pub fn pullback_structured(
    phi: &StructuredMap,
    a: &LieAlgebroidPatch,
    rep: Option<&Representation>,
) -> Result<(LieAlgebroidPatch, Option<Representation>), PullbackError> {
    phi.check(a)?;
    let n = a.n_vars();
    let ord = a.order();
    match phi {
        StructuredMap::Identity => Ok((a.clone(), rep.cloned())),
        StructuredMap::Projection { fibre_vars, fibre_weights } => {
            let k = fibre_vars.len();
            let mut vars = a.patch.vars.clone();
            vars.extend(fibre_vars.iter().cloned());
            let mut patch = Patch::new(vars, ord);
            if let Some(w) = &a.patch.weights {
                let mut all = w.weights().to_vec();
                all.extend(fibre_weights.clone().unwrap_or_else(|| vec![0; k]));
                patch.weights = Some(WeightAssignment::new(all));
            }
            let place: Vec<usize> = (0..n).collect();
            let up = |p: &TruncatedPoly| p.embed(n + k, &place);
            let mut frame = a.frame.clone();
            frame.extend(fibre_vars.iter().map(|v| format!("d{v}")));
            let r = a.rank();
            let mut out = LieAlgebroidPatch::trivial(patch, frame);
            for i in 0..r {
                for j in 0..n {
                    out.anchor[i][j] = up(&a.anchor[i][j]);
                }
                for j in 0..r {
                    for l in 0..r {
                        out.bracket[i][j][l] = up(&a.bracket[i][j][l]);
                    }
                }
            }
            for b in 0..k {
                out.anchor[r + b][n + b] = out.patch.constant(Rational::one());
            }
            if a.patch.weights.is_some() || a.frame_weights.is_some() {
                let mut w = a.effective_frame_weights();
                let fw = fibre_weights.clone().unwrap_or_else(|| vec![0; k]);
                w.extend(fw.iter().map(|&x| -i64::from(x)));
                out.frame_weights = Some(w);
            }
            let rep_out = rep.map(|rp| {
                let m = rp.rank();
                let mut gamma = map_gamma(rp, up);
                gamma.extend((0..k).map(|_| polymatrix::zero_matrix(m, m, n + k, ord)));
                Representation { algebroid: out.clone(), frame: rp.frame.clone(), gamma, frame_weights: rp.frame_weights.clone() }
            });
            Ok((out, rep_out))
        }
        StructuredMap::SliceInclusion { normal } => {
            let (keep, frame) = slice_frame(a, normal)?;
            let res = |p: &TruncatedPoly| p.restrict_to(&keep);
            let mut patch = Patch::new(keep.iter().map(|&j| a.patch.vars[j].clone()).collect(), ord);
            if let Some(w) = &a.patch.weights {
                patch.weights = Some(WeightAssignment::new(keep.iter().map(|&j| w.weights()[j]).collect()));
            }
            let mut restricted = LieAlgebroidPatch::trivial(patch, a.frame.clone());
            restricted.anchor = a.anchor.iter().map(|row| keep.iter().map(|&j| res(&row[j])).collect()).collect();
            restricted.bracket = a.bracket.iter().map(|m| map_polys(m, res)).collect();
            if a.patch.weights.is_some() || a.frame_weights.is_some() {
                restricted.frame_weights = Some(a.effective_frame_weights());
            }
            let out = induced_subalgebroid(&restricted, &frame)?;
            let rep_out = rep.map(|rp| {
                let gamma = combine_gamma(&map_gamma(rp, res), &frame.sections, keep.len(), ord);
                Representation { algebroid: out.clone(), frame: rp.frame.clone(), gamma, frame_weights: rp.frame_weights.clone() }
            });
            Ok((out, rep_out))
        }
        StructuredMap::PointInclusion { point } => {
            let rho = polymatrix::eval_at(&a.anchor, n, point);
            let rank = rho.rank();
            if rank < n {
                return Err(PullbackError::NotTransverse { kind: phi.kind(), point: point.clone(), rank, needed: n });
            }
            let basis = rho.transpose().kernel_basis();
            let r = a.rank();
            let names: Vec<String> = basis
                .iter()
                .enumerate()
                .map(|(idx, s)| {
                    let nz: Vec<usize> = (0..r).filter(|&i| !s[i].is_zero()).collect();
                    if nz.len() == 1 && s[nz[0]].is_one() {
                        a.frame[nz[0]].clone()
                    } else {
                        format!("k{}", idx + 1)
                    }
                })
                .collect();
            let mut out = LieAlgebroidPatch::trivial(Patch::point(ord), names);
            let c: Vec<Vec<Vec<Rational>>> = a
                .bracket
                .iter()
                .map(|m| m.iter().map(|row| row.iter().map(|p| p.eval(point)).collect()).collect())
                .collect();
            let solver = ColumnSolver::new(r, &basis).expect("kernel basis is independent");
            for x in 0..basis.len() {
                for y in x + 1..basis.len() {
                    let mut v = vec![Rational::zero(); r];
                    for i in 0..r {
                        for j in 0..r {
                            let f = &basis[x][i] * &basis[y][j];
                            if f.is_zero() {
                                continue;
                            }
                            for (vk, ck) in v.iter_mut().zip(&c[i][j]) {
                                *vk += &f * ck;
                            }
                        }
                    }
                    let coords = solver
                        .coordinates(&v)
                        .ok_or_else(|| PullbackError::Structural("isotropy not closed under the bracket".into()))?;
                    for (k, ck) in coords.into_iter().enumerate() {
                        let p = out.patch.constant(ck);
                        out.set_bracket(x, y, k, p);
                    }
                }
            }
            let rep_out = rep.map(|rp| {
                let sections: PolyMatrix = basis
                    .iter()
                    .map(|s| s.iter().map(|v| TruncatedPoly::constant(0, ord, v.clone())).collect())
                    .collect();
                let g0: Vec<PolyMatrix> = rp
                    .gamma
                    .iter()
                    .map(|g| map_polys(g, |p| TruncatedPoly::constant(0, ord, p.eval(point))))
                    .collect();
                let gamma = combine_gamma(&g0, &sections, 0, ord);
                Representation { algebroid: out.clone(), frame: rp.frame.clone(), gamma, frame_weights: rp.frame_weights.clone() }
            });
            Ok((out, rep_out))
        }
        StructuredMap::Rescaling { fibre, t } if !t.is_zero() => {
            let sub = |p: &TruncatedPoly| p.scale_vars(fibre, t);
            let t_inv = Rational::one() / t;
            let mut out = a.clone();
            for (i, row) in a.anchor.iter().enumerate() {
                for (j, p) in row.iter().enumerate() {
                    let q = sub(p);
                    out.anchor[i][j] = if fibre.contains(&j) { q.scale(&t_inv) } else { q };
                }
            }
            out.bracket = a.bracket.iter().map(|m| map_polys(m, sub)).collect();
            let rep_out = rep.map(|rp| Representation {
                algebroid: out.clone(),
                frame: rp.frame.clone(),
                gamma: map_gamma(rp, sub),
                frame_weights: rp.frame_weights.clone(),
            });
            Ok((out, rep_out))
        }
        StructuredMap::Rescaling { fibre, .. } => rescale_at_zero(a, rep, fibre),
    }
}

/// `m_0 = i ∘ p`, so `m_0^! A = p^! i^! A`; variables are put back in the
/// original order.
fn rescale_at_zero(
    a: &LieAlgebroidPatch,
    rep: Option<&Representation>,
    fibre: &[usize],
) -> Result<(LieAlgebroidPatch, Option<Representation>), PullbackError> {
    let n = a.n_vars();
    let slice = StructuredMap::SliceInclusion { normal: fibre.to_vec() };
    let (x_alg, x_rep) = pullback_structured(&slice, a, rep)?;
    let fibre_weights = a.patch.weights.as_ref().map(|w| fibre.iter().map(|&j| w.weights()[j]).collect());
    let proj = StructuredMap::Projection {
        fibre_vars: fibre.iter().map(|&j| a.patch.vars[j].clone()).collect(),
        fibre_weights,
    };
    let (mut out, mut out_rep) = pullback_structured(&proj, &x_alg, x_rep.as_ref())?;
    // variables now read (kept..., fibre...); restore the original order
    let keep: Vec<usize> = (0..n).filter(|j| !fibre.contains(j)).collect();
    let order: Vec<usize> = keep.iter().chain(fibre).copied().collect();
    let perm = |p: &TruncatedPoly| p.embed(n, &order);
    out.anchor = out
        .anchor
        .iter()
        .map(|row| {
            let mut new_row = vec![out.patch.zero(); n];
            for (pos, p) in row.iter().enumerate() {
                new_row[order[pos]] = perm(p);
            }
            new_row
        })
        .collect();
    out.bracket = out.bracket.iter().map(|m| map_polys(m, perm)).collect();
    out.patch = a.patch.clone();
    if let Some(r) = out_rep.as_mut() {
        r.gamma = r.gamma.iter().map(|g| map_polys(g, perm)).collect();
        r.algebroid = out.clone();
    }
    Ok((out, out_rep))
}

//! Lie algebroids and representations on free modules over a polynomial patch.

use num_traits::{One, Zero};

use crate::exact::polymatrix::PolyMatrix;
use crate::exact::{Rational, RationalMatrix, TruncatedPoly, WeightAssignment};

use super::AlgebroidError;

/// Coordinates of a formal polynomial patch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    pub vars: Vec<String>,
    pub jet_order: u32,
    pub weights: Option<WeightAssignment>,
}

impl Patch {
    pub fn new(vars: Vec<String>, jet_order: u32) -> Self {
        Patch { vars, jet_order, weights: None }
    }

    pub fn point(jet_order: u32) -> Self {
        Patch::new(Vec::new(), jet_order)
    }

    pub fn with_weights(mut self, weights: Vec<u32>) -> Self {
        assert_eq!(weights.len(), self.vars.len(), "one weight per coordinate");
        self.weights = Some(WeightAssignment::new(weights));
        self
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn zero(&self) -> TruncatedPoly {
        TruncatedPoly::zero(self.n_vars(), self.jet_order)
    }

    pub fn constant(&self, c: Rational) -> TruncatedPoly {
        TruncatedPoly::constant(self.n_vars(), self.jet_order, c)
    }

    pub fn var(&self, i: usize) -> TruncatedPoly {
        TruncatedPoly::var(self.n_vars(), self.jet_order, i)
    }

    pub fn origin(&self) -> Vec<Rational> {
        vec![Rational::zero(); self.n_vars()]
    }
}

/// Lie algebroid on the free module with frame `e_1..e_r` over a patch:
/// `rho(e_i) = sum_j anchor[i][j] d/dx_j` and
/// `[e_i, e_j] = sum_k bracket[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebroidPatch {
    pub patch: Patch,
    pub frame: Vec<String>,
    pub anchor: PolyMatrix,
    pub bracket: Vec<Vec<Vec<TruncatedPoly>>>,
    /// Weights of the frame elements, when the patch is graded. Inferred
    /// from the anchor when absent.
    pub frame_weights: Option<Vec<i64>>,
}

/// Section of the algebroid: one coefficient per frame element.
pub type Section = Vec<TruncatedPoly>;

impl LieAlgebroidPatch {
    pub fn new(
        patch: Patch,
        frame: Vec<String>,
        anchor: PolyMatrix,
        bracket: Vec<Vec<Vec<TruncatedPoly>>>,
    ) -> Result<Self, AlgebroidError> {
        let r = frame.len();
        let n = patch.n_vars();
        if anchor.len() != r || anchor.iter().any(|row| row.len() != n) {
            return Err(AlgebroidError::Shape(format!(
                "anchor must be {r} x {n}"
            )));
        }
        if bracket.len() != r
            || bracket
                .iter()
                .any(|row| row.len() != r || row.iter().any(|c| c.len() != r))
        {
            return Err(AlgebroidError::Shape(format!("bracket must be {r} x {r} x {r}")));
        }
        let all = anchor.iter().flatten().chain(bracket.iter().flatten().flatten());
        for p in all {
            if p.n_vars() != n {
                return Err(AlgebroidError::Shape(format!(
                    "structure polynomial has {} variables, patch has {n}",
                    p.n_vars()
                )));
            }
        }
        Ok(LieAlgebroidPatch {
            patch,
            frame,
            anchor,
            bracket,
            frame_weights: None,
        })
    }

    /// Zero anchor and zero bracket.
    pub fn trivial(patch: Patch, frame: Vec<String>) -> Self {
        let r = frame.len();
        let n = patch.n_vars();
        let z = patch.zero();
        LieAlgebroidPatch {
            anchor: vec![vec![z.clone(); n]; r],
            bracket: vec![vec![vec![z; r]; r]; r],
            patch,
            frame,
            frame_weights: None,
        }
    }

    /// Sets `[e_i, e_j]` component `k` to `p` and `[e_j, e_i]` to `-p`.
    pub fn set_bracket(&mut self, i: usize, j: usize, k: usize, p: TruncatedPoly) {
        self.bracket[j][i][k] = -&p;
        self.bracket[i][j][k] = p;
    }

    pub fn rank(&self) -> usize {
        self.frame.len()
    }

    pub fn n_vars(&self) -> usize {
        self.patch.n_vars()
    }

    pub fn order(&self) -> u32 {
        self.patch.jet_order
    }

    /// Largest total degree appearing in anchor or bracket data.
    pub fn max_structure_degree(&self) -> u32 {
        self.anchor
            .iter()
            .flatten()
            .chain(self.bracket.iter().flatten().flatten())
            .filter_map(TruncatedPoly::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn frame_index(&self, name: &str) -> Option<usize> {
        self.frame.iter().position(|f| f == name)
    }

    /// `rho(e_i) f`.
    pub fn anchor_apply(&self, i: usize, f: &TruncatedPoly) -> TruncatedPoly {
        let mut out = TruncatedPoly::zero(f.n_vars(), f.order().min(self.order()));
        for (j, a) in self.anchor[i].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let d = f.derivative(j);
            if d.is_zero() {
                continue;
            }
            out = &out + &(a * &d);
        }
        out
    }

    /// `rho(a) f` for a section `a`.
    pub fn anchor_section_apply(&self, a: &Section, f: &TruncatedPoly) -> TruncatedPoly {
        let mut out = TruncatedPoly::zero(f.n_vars(), f.order().min(self.order()));
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            out = &out + &(ai * &self.anchor_apply(i, f));
        }
        out
    }

    /// Components of the vector field `rho(a)`.
    pub fn anchor_of_section(&self, a: &Section) -> Vec<TruncatedPoly> {
        (0..self.n_vars())
            .map(|j| {
                let mut s = self.patch.zero();
                for (i, ai) in a.iter().enumerate() {
                    if !ai.is_zero() && !self.anchor[i][j].is_zero() {
                        s = &s + &(ai * &self.anchor[i][j]);
                    }
                }
                s
            })
            .collect()
    }

    /// Leibniz-extended bracket of sections:
    /// `[a, b] = a^i b^j c_ij^k e_k + rho(a)(b^k) e_k - rho(b)(a^k) e_k`.
    pub fn section_bracket(&self, a: &Section, b: &Section) -> Section {
        let r = self.rank();
        let mut out: Section = vec![self.patch.zero(); r];
        for i in 0..r {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..r {
                if b[j].is_zero() {
                    continue;
                }
                let ab = &a[i] * &b[j];
                for (k, slot) in out.iter_mut().enumerate() {
                    let c = &self.bracket[i][j][k];
                    if !c.is_zero() {
                        *slot = &*slot + &(&ab * c);
                    }
                }
            }
        }
        for (k, slot) in out.iter_mut().enumerate() {
            let plus = self.anchor_section_apply(a, &b[k]);
            let minus = self.anchor_section_apply(b, &a[k]);
            *slot = &(&*slot + &plus) - &minus;
        }
        out
    }

    pub fn basis_section(&self, i: usize) -> Section {
        (0..self.rank())
            .map(|k| {
                if k == i {
                    self.patch.constant(Rational::one())
                } else {
                    self.patch.zero()
                }
            })
            .collect()
    }

    /// Same algebroid in the constant frame `e'_i = sum_a p[i][a] e_a`.
    pub fn change_frame(&self, p: &RationalMatrix) -> Option<LieAlgebroidPatch> {
        let p_inv = p.inverse()?;
        let r = self.rank();
        let comb = |row: &[Rational], polys: &dyn Fn(usize) -> TruncatedPoly| {
            let mut s = self.patch.zero();
            for (a, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    s = &s + &polys(a).scale(c);
                }
            }
            s
        };
        let mut out = LieAlgebroidPatch::trivial(self.patch.clone(), self.frame.clone());
        for i in 0..r {
            let pi = p.row(i);
            for j in 0..self.n_vars() {
                out.anchor[i][j] = comb(&pi, &|a| self.anchor[a][j].clone());
            }
        }
        // c'_ij^k = sum P_ia P_jb c_ab^l Pinv_lk
        for i in 0..r {
            for j in 0..r {
                let mixed: Vec<TruncatedPoly> = (0..r)
                    .map(|l| {
                        let mut s = self.patch.zero();
                        for a in 0..r {
                            for b in 0..r {
                                let f = &p[(i, a)] * &p[(j, b)];
                                if !f.is_zero() && !self.bracket[a][b][l].is_zero() {
                                    s = &s + &self.bracket[a][b][l].scale(&f);
                                }
                            }
                        }
                        s
                    })
                    .collect();
                for k in 0..r {
                    let col = p_inv.column(k);
                    out.bracket[i][j][k] = comb(&col, &|l| mixed[l].clone());
                }
            }
        }
        Some(out)
    }

    /// Frame weights making the data homogeneous, when the patch is graded:
    /// the explicit ones if given, otherwise read off the anchor
    /// (`weight(rho_i^j) - weight(x_j)`), defaulting to zero for frame
    /// elements with zero anchor.
    pub fn effective_frame_weights(&self) -> Vec<i64> {
        if let Some(w) = &self.frame_weights {
            return w.clone();
        }
        let Some(weights) = &self.patch.weights else {
            return vec![0; self.rank()];
        };
        self.anchor
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .find_map(|(j, p)| {
                        p.lowest_term().map(|(m, _)| {
                            weights.weight_of(m.exponents()) as i64 - i64::from(weights.weights()[j])
                        })
                    })
                    .unwrap_or(0)
            })
            .collect()
    }
}

/// Flat `A`-connection on a free module `D` with frame `f_1..f_m`:
/// `nabla_{e_i} f_a = sum_b gamma[i][b][a] f_b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub algebroid: LieAlgebroidPatch,
    pub frame: Vec<String>,
    pub gamma: Vec<PolyMatrix>,
    /// Weights of the `D` frame elements (zero when absent).
    pub frame_weights: Option<Vec<i64>>,
}

impl Representation {
    pub fn new(
        algebroid: LieAlgebroidPatch,
        frame: Vec<String>,
        gamma: Vec<PolyMatrix>,
    ) -> Result<Self, AlgebroidError> {
        let rep = Representation {
            algebroid,
            frame,
            gamma,
            frame_weights: None,
        };
        rep.check_shapes()?;
        Ok(rep)
    }

    /// All connection matrices zero on `D = Q^m`.
    pub fn trivial(algebroid: LieAlgebroidPatch, m: usize) -> Self {
        let z = algebroid.patch.zero();
        let r = algebroid.rank();
        let frame = (1..=m).map(|i| format!("f{i}")).collect();
        Representation {
            gamma: vec![vec![vec![z; m]; m]; r],
            algebroid,
            frame,
            frame_weights: None,
        }
    }

    /// `D = A` with `nabla_{e_i} e_a = [e_i, e_a]`; flat on frames with
    /// constant structure functions and zero anchor.
    pub fn adjoint(algebroid: LieAlgebroidPatch) -> Self {
        let r = algebroid.rank();
        let gamma = (0..r)
            .map(|i| {
                (0..r)
                    .map(|b| (0..r).map(|a| algebroid.bracket[i][a][b].clone()).collect())
                    .collect()
            })
            .collect();
        Representation {
            frame: algebroid.frame.clone(),
            gamma,
            algebroid,
            frame_weights: None,
        }
    }

    pub fn check_shapes(&self) -> Result<(), AlgebroidError> {
        let m = self.frame.len();
        let r = self.algebroid.rank();
        if self.gamma.len() != r {
            return Err(AlgebroidError::RankMismatch(format!(
                "{} connection matrices for an algebroid of rank {r}",
                self.gamma.len()
            )));
        }
        for (i, g) in self.gamma.iter().enumerate() {
            if g.len() != m || g.iter().any(|row| row.len() != m) {
                return Err(AlgebroidError::RankMismatch(format!(
                    "connection matrix {i} is not {m} x {m}"
                )));
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.frame.len()
    }

    /// The same representation after constant frame changes
    /// `e'_i = sum p[i][a] e_a` of `A` and `f'_a = sum q[a][b] f_b` of `D`:
    /// `gamma'_i = (q^-1)^T (sum_a p[i][a] gamma_a) q^T`.
    pub fn change_frames(&self, p: &RationalMatrix, q: &RationalMatrix) -> Option<Representation> {
        let algebroid = self.algebroid.change_frame(p)?;
        let q_inv_t = crate::exact::polymatrix::from_rational(&q.inverse()?.transpose(), self.algebroid.n_vars(), self.algebroid.order());
        let q_t = crate::exact::polymatrix::from_rational(&q.transpose(), self.algebroid.n_vars(), self.algebroid.order());
        let (n, ord) = (self.algebroid.n_vars(), self.algebroid.order());
        let m = self.rank();
        let gamma = (0..self.algebroid.rank())
            .map(|i| {
                let mut g = crate::exact::polymatrix::zero_matrix(m, m, n, ord);
                for a in 0..self.algebroid.rank() {
                    let f = &p[(i, a)];
                    if f.is_zero() {
                        continue;
                    }
                    for (grow, srow) in g.iter_mut().zip(&self.gamma[a]) {
                        for (x, y) in grow.iter_mut().zip(srow) {
                            *x = &*x + &y.scale(f);
                        }
                    }
                }
                let g = crate::exact::polymatrix::mul(&q_inv_t, &g, n, ord);
                crate::exact::polymatrix::mul(&g, &q_t, n, ord)
            })
            .collect();
        Some(Representation { algebroid, frame: self.frame.clone(), gamma, frame_weights: self.frame_weights.clone() })
    }

    pub fn effective_frame_weights(&self) -> Vec<i64> {
        self.frame_weights.clone().unwrap_or_else(|| vec![0; self.rank()])
    }
}

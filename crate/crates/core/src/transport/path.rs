//! Families of Lie algebra representations along a path `t ∈ [0, 1]`, with
//! polynomial dependence on `t` and the infinitesimal generator of the
//! horizontal transport.

use num_traits::{One, Zero};

use crate::algebroid::{validate_algebroid, validate_representation, LieAlgebroidPatch, Patch, Representation};
use crate::exact::{int, polymatrix, rat, rational, Monomial, PolyMatrix, Rational, RationalMatrix, TruncatedPoly, EXACT};

use super::TransportError;

/// Polynomial in the path parameter.
pub type TPoly = TruncatedPoly;

pub fn tconst(c: Rational) -> TPoly {
    TruncatedPoly::constant(1, EXACT, c)
}

pub fn tvar() -> TPoly {
    TruncatedPoly::var(1, EXACT, 0)
}

fn tzero() -> TPoly {
    TruncatedPoly::zero(1, EXACT)
}

/// `p(1 - t)`.
fn reflect(p: &TPoly) -> TPoly {
    let s = &tconst(int(1)) - &tvar();
    let mut out = tzero();
    let mut power = tconst(int(1));
    let top = p.degree().unwrap_or(0);
    for k in 0..=top {
        let c = p.coeff(&Monomial(vec![k]));
        if !c.is_zero() {
            out = &out + &power.scale(&c);
        }
        power = &power * &s;
    }
    out
}

/// Coefficients of `p` in increasing degree, as floats.
pub(crate) fn float_coefficients(p: &TPoly) -> Vec<f64> {
    let top = p.degree().unwrap_or(0);
    (0..=top).map(|k| rational::to_f64(&p.coeff(&Monomial(vec![k])))).collect()
}

fn poly_mat(m: &RationalMatrix) -> PolyMatrix {
    polymatrix::from_rational(m, 1, EXACT)
}

fn poly_mul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    polymatrix::mul(a, b, 1, EXACT)
}

/// `exp(t x)` for nilpotent `x`.
fn exp_nilpotent(x: &RationalMatrix, what: &str) -> Result<PolyMatrix, TransportError> {
    let n = x.rows();
    let mut out = polymatrix::identity_matrix(n, 1, EXACT);
    let mut power = RationalMatrix::identity(n);
    let mut t_power = tconst(int(1));
    let mut fact = int(1);
    for k in 1..=n {
        power = &power * x;
        if power.is_zero() {
            return Ok(out);
        }
        t_power = &t_power * &tvar();
        fact *= int(k as i64);
        let coeff = power.scale(&(Rational::one() / &fact));
        for i in 0..n {
            for j in 0..n {
                if !coeff[(i, j)].is_zero() {
                    out[i][j] = &out[i][j] + &t_power.scale(&coeff[(i, j)]);
                }
            }
        }
    }
    Err(TransportError::Shape(format!("{what} generator is not nilpotent")))
}

/// Data of the family: `[e_i, e_j] = Σ_k bracket[i][j][k](t) e_k`,
/// `e_i · f_a = Σ_b gamma[i][b][a](t) f_b`, and the horizontal generator
/// `ω e_i = Σ_l omega[l][i](t) e_l` (`omega_fibre` likewise on `D`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathFamily {
    pub frame: Vec<String>,
    pub fibre_frame: Vec<String>,
    pub bracket: Vec<Vec<Vec<TPoly>>>,
    pub gamma: Vec<PolyMatrix>,
    pub omega: PolyMatrix,
    pub omega_fibre: PolyMatrix,
}

impl PathFamily {
    /// The constant family of a representation over a point, `ω = 0`.
    pub fn constant(rep: &Representation) -> Result<Self, TransportError> {
        if rep.algebroid.n_vars() != 0 {
            return Err(TransportError::Shape("fibre data must be over a point".into()));
        }
        let lift = |p: &TruncatedPoly| tconst(p.constant_term());
        let r = rep.algebroid.rank();
        let m = rep.frame.len();
        Ok(PathFamily {
            frame: rep.algebroid.frame.clone(),
            fibre_frame: rep.frame.clone(),
            bracket: rep.algebroid.bracket.iter().map(|a| a.iter().map(|b| b.iter().map(lift).collect()).collect()).collect(),
            gamma: rep.gamma.iter().map(|g| g.iter().map(|row| row.iter().map(lift).collect()).collect()).collect(),
            omega: vec![vec![tzero(); r]; r],
            omega_fibre: vec![vec![tzero(); m]; m],
        })
    }

    /// Constant generators; the structure data is left as is.
    pub fn with_omega(mut self, omega: &RationalMatrix, omega_fibre: &RationalMatrix) -> Self {
        self.omega = poly_mat(omega);
        self.omega_fibre = poly_mat(omega_fibre);
        self
    }

    /// The family obtained by pushing the data of `rep` forward along
    /// `exp(t x)` on the algebra and `exp(t y)` on `D`, for nilpotent `x`,
    /// `y`; its horizontal generators are `x` and `y`.
    pub fn conjugated(rep: &Representation, x: &RationalMatrix, y: &RationalMatrix) -> Result<Self, TransportError> {
        let base = PathFamily::constant(rep)?;
        let (r, m) = (base.rank(), base.fibre_rank());
        if x.rows() != r || x.cols() != r || y.rows() != m || y.cols() != m {
            return Err(TransportError::Shape("generator shapes do not match the fibre".into()));
        }
        let phi = exp_nilpotent(x, "algebra")?;
        let phi_inv = exp_nilpotent(&x.scale(&int(-1)), "algebra")?;
        let psi = exp_nilpotent(y, "fibre")?;
        let psi_inv = exp_nilpotent(&y.scale(&int(-1)), "fibre")?;
        let mut bracket = vec![vec![vec![tzero(); r]; r]; r];
        for (i, row) in bracket.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                // [e_i, e_j]_t = Φ [Φ^{-1} e_i, Φ^{-1} e_j]_0
                for (b, pb) in phi_inv.iter().enumerate() {
                    for (c, pc) in phi_inv.iter().enumerate() {
                        let w = &pb[i] * &pc[j];
                        if w.is_zero() {
                            continue;
                        }
                        for a in 0..r {
                            let s = base.bracket[b][c][a].constant_term();
                            if s.is_zero() {
                                continue;
                            }
                            for (k, o) in out.iter_mut().enumerate() {
                                *o = &*o + &(&w * &phi[k][a]).scale(&s);
                            }
                        }
                    }
                }
            }
        }
        let gamma = (0..r)
            .map(|i| {
                // Γ_i(t) = Ψ Γ(Φ^{-1} e_i)_0 Ψ^{-1}
                let mut g = vec![vec![tzero(); m]; m];
                for (a, pa) in phi_inv.iter().enumerate() {
                    for (row, grow) in g.iter_mut().enumerate() {
                        for (col, entry) in grow.iter_mut().enumerate() {
                            let s = base.gamma[a][row][col].constant_term();
                            if !s.is_zero() {
                                *entry = &*entry + &pa[i].scale(&s);
                            }
                        }
                    }
                }
                poly_mul(&poly_mul(&psi, &g), &psi_inv)
            })
            .collect();
        Ok(PathFamily { bracket, gamma, ..base.with_omega(x, y) })
    }

    pub fn rank(&self) -> usize {
        self.frame.len()
    }

    pub fn fibre_rank(&self) -> usize {
        self.fibre_frame.len()
    }

    /// Time-reversed family `s ↦ (data at 1 - s)` with generators negated.
    pub fn reversed(&self) -> Self {
        let map3 = |c: &Vec<Vec<Vec<TPoly>>>| -> Vec<Vec<Vec<TPoly>>> {
            c.iter().map(|a| a.iter().map(|b| b.iter().map(reflect).collect()).collect()).collect()
        };
        let neg = |m: &PolyMatrix| -> PolyMatrix { m.iter().map(|row| row.iter().map(|p| -&reflect(p)).collect()).collect() };
        PathFamily {
            frame: self.frame.clone(),
            fibre_frame: self.fibre_frame.clone(),
            bracket: map3(&self.bracket),
            gamma: map3(&self.gamma),
            omega: neg(&self.omega),
            omega_fibre: neg(&self.omega_fibre),
        }
    }

    /// Structure constants at `[i][j][k]` and action matrices at time `t`.
    pub fn constants_at(&self, t: &Rational) -> (Vec<Vec<Vec<Rational>>>, Vec<RationalMatrix>) {
        let point = [t.clone()];
        let c = self.bracket.iter().map(|a| a.iter().map(|b| b.iter().map(|p| p.eval(&point)).collect()).collect()).collect();
        let g = self.gamma.iter().map(|g| polymatrix::eval_at(g, self.fibre_rank(), &point)).collect();
        (c, g)
    }

    /// The representation at time `t`, over a point.
    pub fn frozen(&self, t: &Rational) -> Representation {
        let (c, g) = self.constants_at(t);
        let mut a = LieAlgebroidPatch::trivial(Patch::point(0), self.frame.clone());
        let patch = a.patch.clone();
        for (i, ci) in c.iter().enumerate() {
            for (j, cij) in ci.iter().enumerate() {
                for (k, v) in cij.iter().enumerate() {
                    a.bracket[i][j][k] = patch.constant(v.clone());
                }
            }
        }
        let mut rep = Representation::trivial(a, self.fibre_rank());
        rep.frame = self.fibre_frame.clone();
        for (gi, mi) in rep.gamma.iter_mut().zip(&g) {
            for (row, out) in gi.iter_mut().enumerate() {
                for (col, e) in out.iter_mut().enumerate() {
                    *e = patch.constant(mi[(row, col)].clone());
                }
            }
        }
        rep
    }

    pub fn is_loop(&self) -> bool {
        self.constants_at(&int(0)) == self.constants_at(&int(1))
    }

    /// Shapes; the compatibility equations
    /// `c' = ω c - c(ω ·, ·) - c(·, ω ·)` and
    /// `Γ_i' = [ω_D, Γ_i] - Γ(ω e_i)` as polynomial identities; and the
    /// frozen axioms at `t = 0, 1/2, 1`.
    pub fn check(&self) -> Result<(), TransportError> {
        let (r, m) = (self.rank(), self.fibre_rank());
        let sq = |p: &PolyMatrix, n: usize| p.len() == n && p.iter().all(|row| row.len() == n);
        let shapes = self.bracket.len() == r
            && self.bracket.iter().all(|a| a.len() == r && a.iter().all(|b| b.len() == r))
            && self.gamma.len() == r
            && self.gamma.iter().all(|g| sq(g, m))
            && sq(&self.omega, r)
            && sq(&self.omega_fibre, m);
        if !shapes {
            return Err(TransportError::Shape(format!("path family data must fit rank {r} and fibre rank {m}")));
        }
        let w = &self.omega;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let mut rhs = tzero();
                    for l in 0..r {
                        rhs = &rhs + &(&w[k][l] * &self.bracket[i][j][l]);
                        rhs = &rhs - &(&w[l][i] * &self.bracket[l][j][k]);
                        rhs = &rhs - &(&w[l][j] * &self.bracket[i][l][k]);
                    }
                    if self.bracket[i][j][k].derivative(0) != rhs {
                        return Err(TransportError::Incompatible(format!(
                            "bracket of {} and {} does not evolve along the generator (component {})",
                            self.frame[i], self.frame[j], self.frame[k]
                        )));
                    }
                }
            }
        }
        for i in 0..r {
            let wg = poly_mul(&self.omega_fibre, &self.gamma[i]);
            let gw = poly_mul(&self.gamma[i], &self.omega_fibre);
            for a in 0..m {
                for b in 0..m {
                    let mut rhs = &wg[a][b] - &gw[a][b];
                    for l in 0..r {
                        rhs = &rhs - &(&w[l][i] * &self.gamma[l][a][b]);
                    }
                    if self.gamma[i][a][b].derivative(0) != rhs {
                        return Err(TransportError::Incompatible(format!(
                            "action of {} does not evolve along the generator",
                            self.frame[i]
                        )));
                    }
                }
            }
        }
        for t in [int(0), rat(1, 2), int(1)] {
            let rep = self.frozen(&t);
            let alg = validate_algebroid(&rep.algebroid, 0);
            if let Some(f) = alg.first_failure() {
                return Err(TransportError::Incompatible(format!("at t = {t}: {:?} fails", f.axiom)));
            }
            let flat = validate_representation(&rep, 0).map_err(|e| TransportError::Shape(e.to_string()))?;
            if let Some(f) = flat.first_failure() {
                return Err(TransportError::Incompatible(format!("at t = {t}: {:?} fails", f.axiom)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn nilpotent2() -> RationalMatrix {
        RationalMatrix::from_i64(&[&[0, 1], &[0, 0]])
    }

    #[test]
    fn constant_family_is_compatible() {
        let pf = PathFamily::constant(&Representation::adjoint(samples::sl2())).unwrap();
        pf.check().unwrap();
        assert!(pf.is_loop());
    }

    #[test]
    fn conjugated_sl2_is_compatible_and_moves() {
        let rep = Representation::adjoint(samples::sl2());
        let x = RationalMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let pf = PathFamily::conjugated(&rep, &x, &x).unwrap();
        pf.check().unwrap();
        assert!(!pf.is_loop());
        assert_eq!(pf.reversed().reversed(), pf);
        pf.reversed().check().unwrap();
    }

    #[test]
    fn inner_derivation_keeps_the_structure_constant() {
        // ad e on (h, e, f): h -> -2e, f -> h
        let ad_e = RationalMatrix::from_i64(&[&[0, 0, 1], &[-2, 0, 0], &[0, 0, 0]]);
        let pf = PathFamily::constant(&Representation::adjoint(samples::sl2())).unwrap().with_omega(&ad_e, &ad_e);
        pf.check().unwrap();
        assert!(pf.is_loop());
    }

    #[test]
    fn generator_without_motion_is_rejected() {
        let x = RationalMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let pf = PathFamily::constant(&samples::trivial_line(&samples::sl2()))
            .unwrap()
            .with_omega(&x, &RationalMatrix::zeros(1, 1));
        assert!(matches!(pf.check(), Err(TransportError::Incompatible(_))));
    }

    #[test]
    fn abelian_plane_with_nilpotent_generator() {
        let pf = PathFamily::constant(&samples::trivial_line(&samples::abelian(2)))
            .unwrap()
            .with_omega(&nilpotent2(), &RationalMatrix::zeros(1, 1));
        pf.check().unwrap();
        assert!(pf.is_loop());
    }
}

//! R- and K-matrix families and the verifiers for the braided and spectral
//! Yang–Baxter equations, Hecke relations, the reflection equation and the
//! Markov structure linking R-matrices to generators.
//!
//! All matrices are in the row convention of the crate: a stochastic operator
//! has rows summing to one and `M[c, c']` is the weight of `c -> c'`. Matrices
//! defined in the literature by their action on column vectors are transposed
//! once, in their constructors.

use crate::tensor::{permutation_operator, Operator};
use crate::{Error, Result, C64};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

type Evaluator = Arc<dyn Fn(C64) -> Result<Operator> + Send + Sync>;

/// Whether a family returns `R` (checked with `R12 R13 R23 = R23 R13 R12`) or
/// the braid-form `Ř = P R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Convention {
    R,
    RCheck,
}

/// A spectral-parameter dependent R-matrix on `V ⊗ V`.
#[derive(Clone)]
pub struct SpectralRFamily {
    pub name: String,
    pub q: f64,
    pub site_dim: usize,
    pub convention: Convention,
    evaluator: Evaluator,
}

impl fmt::Debug for SpectralRFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralRFamily")
            .field("name", &self.name)
            .field("q", &self.q)
            .field("site_dim", &self.site_dim)
            .field("convention", &self.convention)
            .finish()
    }
}

impl SpectralRFamily {
    pub fn new(
        name: impl Into<String>,
        q: f64,
        site_dim: usize,
        convention: Convention,
        evaluator: impl Fn(C64) -> Result<Operator> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), q, site_dim, convention, evaluator: Arc::new(evaluator) }
    }

    /// The stochastic ASEP R-matrix family [`asep_spectral_r`].
    pub fn asep(q: f64) -> Self {
        Self::new("asep", q, 2, Convention::R, move |z| asep_spectral_r(z, q))
    }

    /// Raw evaluation in the family's own convention.
    pub fn eval(&self, z: C64) -> Result<Operator> {
        let op = (self.evaluator)(z)?;
        let d = self.site_dim;
        if op.dim() != d * d {
            return Err(Error::DimensionMismatch(format!("family returned side {}", op.dim())));
        }
        Ok(op)
    }

    /// Evaluation converted to the `R` convention.
    pub fn r_at(&self, z: C64) -> Result<Operator> {
        let op = self.eval(z)?;
        match self.convention {
            Convention::R => Ok(op),
            Convention::RCheck => {
                let p = permutation_operator(self.site_dim, self.site_dim)?;
                Ok(&p * &op)
            }
        }
    }
}

/// Which end of the chain a reflection matrix describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// A boundary K-matrix family `x -> K(x)` on a two-dimensional site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionFamily {
    pub q: f64,
    /// `(α, γ)` on the left, `(β, δ)` on the right.
    pub rates: (f64, f64),
    pub side: Side,
}

impl ReflectionFamily {
    pub fn left(q: f64, alpha: f64, gamma: f64) -> Self {
        Self { q, rates: (alpha, gamma), side: Side::Left }
    }

    pub fn right(q: f64, beta: f64, delta: f64) -> Self {
        Self { q, rates: (beta, delta), side: Side::Right }
    }

    pub fn eval(&self, x: C64) -> Result<Operator> {
        reflection_k(x, self.q, self.rates.0, self.rates.1, self.side)
    }
}

/// Uniform report shape used by every verifier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifierReport {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub residuals: BTreeMap<String, f64>,
    pub pass: bool,
}

impl VerifierReport {
    pub fn new(family: impl Into<String>) -> Self {
        Self { family: family.into(), params: BTreeMap::new(), residuals: BTreeMap::new(), pass: true }
    }

    pub fn param(mut self, k: &str, v: f64) -> Self {
        self.params.insert(k.to_string(), v);
        self
    }

    pub fn residual(mut self, k: &str, v: f64) -> Self {
        self.residuals.insert(k.to_string(), v);
        self
    }

    /// Sets `pass` from the residuals and the tolerance.
    pub fn judge(mut self, tol: f64) -> Self {
        self.pass = self.residuals.values().all(|r| r.is_finite() && *r <= tol);
        self
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.values().cloned().fold(0.0, f64::max)
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn site_dim_of(r: &Operator) -> Result<usize> {
    let n = r.dim();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::DimensionNotASquare(n));
    }
    Ok(d)
}

/// `R_{12}`, `R_{13}`, `R_{23}` on `V ⊗ V ⊗ V`.
pub fn triple_embeddings(r: &Operator) -> Result<(Operator, Operator, Operator)> {
    let d = site_dim_of(r)?;
    let r = Operator::new(vec![d, d], r.matrix().clone())?;
    let id = Operator::identity(&[d])?;
    let r12 = r.kron(&id)?;
    let r23 = id.kron(&r)?;
    let p23 = id.kron(&permutation_operator(d, d)?)?;
    let r13 = &(&p23 * &r12) * &p23;
    Ok((r12, r13, r23))
}

/// `R_{21} = P R P`.
pub fn flip(r: &Operator) -> Result<Operator> {
    let d = site_dim_of(r)?;
    let p = permutation_operator(d, d)?;
    Ok(&(&p * r) * &p)
}

/// Braided residual `‖R12 R23 R12 - R23 R12 R23‖` plus the residual of the
/// equivalent unbraided equation for `P R`.
pub fn verify_braided_ybe(r: &Operator, tol: f64) -> Result<VerifierReport> {
    let d = site_dim_of(r)?;
    let (r12, _, r23) = triple_embeddings(r)?;
    let braided = (&(&r12 * &r23) * &r12).max_abs_diff(&(&(&r23 * &r12) * &r23));
    let pr = &permutation_operator(d, d)? * r;
    let (a12, a13, a23) = triple_embeddings(&pr)?;
    let unbraided = (&(&a12 * &a13) * &a23).max_abs_diff(&(&(&a23 * &a13) * &a12));
    Ok(VerifierReport::new("braided")
        .param("site_dim", d as f64)
        .residual("braided", braided)
        .residual("unbraided_of_PR", unbraided)
        .judge(tol))
}

/// The exclusion-type stochastic matrix `R_{α,β}`: it fixes `e1⊗e1` and
/// `e2⊗e2`, moves `e1⊗e2` to `e2⊗e1` with probability `α` and `e2⊗e1` to
/// `e1⊗e2` with probability `β`. Rows sum to one.
pub fn r_alpha_beta(alpha: f64, beta: f64) -> Result<Operator> {
    for (n, v) in [("alpha", alpha), ("beta", beta)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::RateOutOfRange(format!("{n} = {v}")));
        }
    }
    Operator::from_real(
        vec![2, 2],
        &[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0 - alpha, alpha, 0.0],
            vec![0.0, beta, 1.0 - beta, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ],
    )
}

/// Particle-hole involution `T ⊗ T` on two sites.
pub fn particle_hole2() -> Operator {
    let t = Operator::from_real(vec![2], &[vec![0.0, 1.0], vec![1.0, 0.0]]).expect("2x2");
    t.kron(&t).expect("small")
}

/// The stochastic ASEP R-matrix with middle block
/// `[[q(z-1), q-1], [(q-1)z, z-1]] / (qz - 1)`.
pub fn asep_spectral_r(z: C64, q: f64) -> Result<Operator> {
    let den = z * q - 1.0;
    if den.norm() <= 1e-14 {
        return Err(Error::PoleAtQZEqualsOne);
    }
    let one = c(1.0);
    let zero = c(0.0);
    let m = [
        [one, zero, zero, zero],
        [zero, (z - 1.0) * q / den, c(q - 1.0) / den, zero],
        [zero, z * (q - 1.0) / den, (z - 1.0) / den, zero],
        [zero, zero, zero, one],
    ];
    Operator::from_fn(vec![2, 2], |i, j| m[i][j])
}

/// Residual of `R12(z) R13(zw) R23(w) = R23(w) R13(zw) R12(z)` for the family
/// converted to the `R` convention.
pub fn verify_spectral_ybe(fam: &SpectralRFamily, z: C64, w: C64) -> Result<f64> {
    let at = |x: C64| fam.r_at(x).map_err(|e| Error::EvaluationPole(format!("{x}: {e}")));
    let a = triple_embeddings(&at(z)?)?.0;
    let b = triple_embeddings(&at(z * w)?)?.1;
    let cc = triple_embeddings(&at(w)?)?.2;
    Ok((&(&a * &b) * &cc).max_abs_diff(&(&(&cc * &b) * &a)))
}

/// The constant R-matrix of the FRT construction for `U_q(sl2)`.
pub fn frt_r(q: f64) -> Result<Operator> {
    if q == 0.0 {
        return Err(Error::InvalidDeformation(q));
    }
    let a = q.powi(-2);
    let b = 1.0 / q;
    Operator::from_real(
        vec![2, 2],
        &[vec![a, 0.0, 0.0, 0.0], vec![0.0, 0.0, b, 0.0], vec![0.0, b, a - 1.0, 0.0], vec![0.0, 0.0, 0.0, a]],
    )
}

/// `‖(R - λ1)(R - λ2)‖`.
pub fn verify_hecke_quadratic(r: &Operator, lam1: C64, lam2: C64) -> f64 {
    let id = Operator::identity(r.site_dims()).expect("same dims");
    let a = r - &id.scale(lam1);
    let b = r - &id.scale(lam2);
    (&a * &b).max_abs()
}

/// The boundary matrices `K(x)` (left, rates `α, γ`) and `K̄(x)` (right,
/// rates `β, δ`) of open ASEP in row convention, so that `K(1) = Id` and
/// `K'(1) = 2ρB` with `ρ = 1/(q-1)` and `B = [[-α, α], [γ, -γ]]`.
pub fn reflection_k(x: C64, q: f64, a: f64, cc: f64, side: Side) -> Result<Operator> {
    let (k00, k01, k10, k11, den) = match side {
        Side::Left => {
            let (al, ga) = (a, cc);
            let den = x * x * ga + x * q + x * al - x * ga - x - al;
            (
                (-x * al + x * ga + q + al - ga - 1.0) * x,
                (x * x - 1.0) * ga,
                (x * x - 1.0) * al,
                -(-x * q - x * al + x * ga + x + al - ga),
                den,
            )
        }
        Side::Right => {
            let (be, de) = (a, cc);
            let den = -x * x * be + x * q - x * de + x * be - x + de;
            (
                (x * de - x * be + q - de + be - 1.0) * x,
                -(x * x - 1.0) * be,
                (x * x - 1.0) * de,
                x * q - x * de + x * be - x + de - be,
                den,
            )
        }
    };
    if den.norm() <= 1e-14 {
        return Err(Error::PoleInDenominator(format!("reflection matrix at x = {x}")));
    }
    // the displayed matrices act on column vectors; store their transposes
    let m = [[k00 / den, k10 / den], [k01 / den, k11 / den]];
    Operator::from_fn(vec![2], |i, j| m[i][j])
}

/// Residual of the reflection equation in row convention,
/// `K2(w) R21(zw) K1(z) R12(z/w) = R21(z/w) K1(z) R12(zw) K2(w)`.
///
/// This is the transpose of the column-convention equation
/// `R12(z/w) K1(z) R21(zw) K2(w) = K2(w) R12(zw) K1(z) R21(z/w)`.
pub fn verify_reflection_equation(rfam: &SpectralRFamily, kfam: &ReflectionFamily, z: C64, w: C64) -> Result<f64> {
    let pole = |what: &str, e: Error| Error::EvaluationPole(format!("{what}: {e}"));
    let r_zw = rfam.r_at(z * w).map_err(|e| pole("R(zw)", e))?;
    let r_zow = rfam.r_at(z / w).map_err(|e| pole("R(z/w)", e))?;
    let kz = kfam.eval(z).map_err(|e| pole("K(z)", e))?;
    let kw = kfam.eval(w).map_err(|e| pole("K(w)", e))?;
    reflection_residual(&r_zw, &r_zow, &kz, &kw)
}

/// Reflection-equation residual from explicit matrices `R(zw)`, `R(z/w)`,
/// `K(z)`, `K(w)`.
pub fn reflection_residual(r_zw: &Operator, r_zow: &Operator, kz: &Operator, kw: &Operator) -> Result<f64> {
    let d = kz.dim();
    let id = Operator::identity(&[d])?;
    let k1 = Operator::new(vec![d, d], kz.kron(&id)?.into_matrix())?;
    let k2 = Operator::new(vec![d, d], id.kron(kw)?.into_matrix())?;
    let lhs = &(&(&k2 * &flip(r_zw)?) * &k1) * r_zow;
    let rhs = &(&(&flip(r_zow)? * &k1) * r_zw) * &k2;
    Ok(lhs.max_abs_diff(&rhs))
}

/// Central difference with step `h`, falling back to a Richardson
/// extrapolation when halving the step moves the estimate noticeably.
pub fn derivative_at_one(f: impl Fn(C64) -> Result<Operator>, h: f64) -> Result<Operator> {
    let central = |h: f64| -> Result<Operator> {
        let a = f(c(1.0 + h))?;
        let b = f(c(1.0 - h))?;
        Ok((&a - &b).scale_real(0.5 / h))
    };
    let d1 = central(h)?;
    let d2 = central(h / 2.0)?;
    let scale = d1.max_abs().max(1.0);
    if d1.max_abs_diff(&d2) <= 1e-8 * scale {
        return Ok(d1);
    }
    Ok((&d2.scale_real(4.0) - &d1).scale_real(1.0 / 3.0))
}

/// Markov-structure diagnostics of a regular two-site family against the
/// local generator `w_local`.
///
/// Residuals reported:
/// * `regularity`: `‖R(1) - P‖`;
/// * `derivative`: `‖R'(1) P - ρ w_local‖` with `ρ` fitted by least squares,
///   the row-convention reading of `P R'(1) = ρ w^T`;
/// * `row_sums`: deviation of the row sums of `R(z)` from one on a z grid;
/// * `markov_vector`: how far `v(z) ⊗ v(w)` with `v(z) = (z, 1)` is from
///   being fixed by `R^T(z/w)`. For the ASEP family every `(a z, b)` is fixed,
///   the equation being homogeneous on each particle-number sector, so no
///   ratio is fitted.
pub fn markov_structure_report(fam: &SpectralRFamily, w_local: &Operator, tol: f64) -> Result<VerifierReport> {
    let d = fam.site_dim;
    let p = permutation_operator(d, d)?;
    let r1 = fam.r_at(c(1.0))?;
    let regularity = r1.max_abs_diff(&p);
    if regularity > 1e-6 {
        return Err(Error::NotRegular(regularity));
    }
    let deriv = derivative_at_one(|z| fam.r_at(z), 1e-5)?;
    let dp = &deriv * &p;
    let num: f64 = dp.matrix().iter().zip(w_local.matrix().iter()).map(|(a, b)| (a.conj() * b).re).sum();
    let den: f64 = w_local.matrix().iter().map(|b| b.norm_sqr()).sum();
    let rho = if den > 0.0 { num / den } else { 0.0 };
    let derivative = dp.max_abs_diff(&w_local.scale_real(rho));

    let grid = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    let mut row_dev: f64 = 0.0;
    for &z in &grid {
        if let Ok(r) = fam.r_at(c(z)) {
            for s in r.row_sums() {
                row_dev = row_dev.max((s - 1.0).norm());
            }
        }
    }

    let mut report = VerifierReport::new(fam.name.clone())
        .param("q", fam.q)
        .param("rho_fit", rho)
        .residual("regularity", regularity)
        .residual("derivative", derivative)
        .residual("row_sums", row_dev);
    if d == 2 {
        report = report.residual("markov_vector", markov_residual(fam, 1.0)?);
    }
    Ok(report.judge(tol))
}

fn markov_residual(fam: &SpectralRFamily, ratio: f64) -> Result<f64> {
    let pts = [0.3, 0.55, 0.8, 1.3];
    let mut worst: f64 = 0.0;
    for &z in &pts {
        for &w in &pts {
            let rt = match fam.r_at(c(z / w)) {
                Ok(r) => r.transpose(),
                Err(_) => continue,
            };
            let v = |x: f64| [c(ratio * x), c(1.0)];
            let (vz, vw) = (v(z), v(w));
            let prod: Vec<C64> = (0..4).map(|i| vz[i / 2] * vw[i % 2]).collect();
            let norm = prod.iter().fold(0.0f64, |m, x| m.max(x.norm()));
            for i in 0..4 {
                let mut acc = c(0.0);
                for j in 0..4 {
                    acc += rt.get(i, j) * prod[j];
                }
                worst = worst.max((acc - prod[i]).norm() / norm);
            }
        }
    }
    Ok(worst)
}

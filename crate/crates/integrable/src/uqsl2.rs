//! Finite-dimensional representations of `U_q(sl2)`, the coproduct, antipode
//! and counit checks, and the universal R-matrix evaluated on `ρ_l ⊗ ρ_m`.
//!
//! Generators are realised as `E`, `F`, `K = q^h` and `K^{-1}` with
//! `K E K^{-1} = q^2 E`, `K F K^{-1} = q^{-2} F` and
//! `EF - FE = (K - K^{-1}) / (q - q^{-1})`. The coproduct is
//! `Δ(E) = K ⊗ E + E ⊗ 1`, `Δ(F) = 1 ⊗ F + F ⊗ K^{-1}`, `Δ(K) = K ⊗ K`.

use crate::qnum::sym_q_number;
use crate::tensor::{permutation_operator, Operator};
use crate::{Error, Result, C64};
use serde::Serialize;

/// The `(m+1)`-dimensional representation on `v_0, ..., v_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepM {
    pub m: usize,
    pub q: f64,
    pub e: Operator,
    pub f: Operator,
    pub k: Operator,
    pub kinv: Operator,
}

/// Generators of `U_q(sl2)` for the coproduct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    E,
    F,
    K,
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl RepM {
    pub fn dim(&self) -> usize {
        self.m + 1
    }

    /// Weights `2k - m` of the basis vectors (eigenvalues of `h`).
    pub fn weights(&self) -> Vec<i32> {
        (0..=self.m as i32).map(|k| 2 * k - self.m as i32).collect()
    }

    /// Diagonal operator `q^{s h}`.
    pub fn q_power_h(&self, s: f64) -> Operator {
        let d: Vec<C64> = self.weights().iter().map(|&w| c(self.q.powf(s * w as f64))).collect();
        Operator::diagonal(vec![self.dim()], &d).expect("dimension matches")
    }
}

/// `ρ_m(e) v_k = [m-k] v_{k+1}`, `ρ_m(f) v_k = [k] v_{k-1}`, `K v_k = q^{2k-m} v_k`
/// with symmetric q-integers `[n] = (q^n - q^{-n}) / (q - q^{-1})`.
pub fn rep(m: usize, q: f64) -> Result<RepM> {
    if !(q > 0.0) || (q - 1.0).abs() < crate::qnum::Q_ONE_THRESHOLD {
        return Err(Error::InvalidDeformation(q));
    }
    let d = m + 1;
    let mut e = Operator::zeros(&[d])?;
    let mut f = Operator::zeros(&[d])?;
    let mut kd = Vec::with_capacity(d);
    for k in 0..d {
        if k < m {
            e.set(k + 1, k, c(sym_q_number((m - k) as i32, q)));
        }
        if k > 0 {
            f.set(k - 1, k, c(sym_q_number(k as i32, q)));
        }
        kd.push(c(q.powi(2 * k as i32 - m as i32)));
    }
    let kinv: Vec<C64> = kd.iter().map(|x| 1.0 / x).collect();
    Ok(RepM { m, q, e, f, k: Operator::diagonal(vec![d], &kd)?, kinv: Operator::diagonal(vec![d], &kinv)? })
}

/// Max-norm residuals of the defining relations, antipode and counit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationReport {
    pub k_kinv: f64,
    pub kek: f64,
    pub kfk: f64,
    pub ef: f64,
    pub antipode_kek: f64,
    pub antipode_kfk: f64,
    pub antipode_ef: f64,
    pub counit: f64,
}

impl RelationReport {
    pub fn max(&self) -> f64 {
        [self.k_kinv, self.kek, self.kfk, self.ef, self.antipode_kek, self.antipode_kfk, self.antipode_ef, self.counit]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn relation_residuals(e: &Operator, f: &Operator, k: &Operator, kinv: &Operator, q: f64) -> (f64, f64, f64) {
    let kek = &(k * e) * kinv;
    let kfk = &(k * f) * kinv;
    let r1 = kek.max_abs_diff(&e.scale_real(q * q));
    let r2 = kfk.max_abs_diff(&f.scale_real(1.0 / (q * q)));
    let lhs = e.commutator(f).expect("same dimension");
    let rhs = (k - kinv).scale_real(1.0 / (q - 1.0 / q));
    (r1, r2, lhs.max_abs_diff(&rhs))
}

/// Residuals of the quantum-group relations on `r`, the antipode
/// anti-homomorphism (`S(E) = -K^{-1}E`, `S(F) = -FK`, `S(K) = K^{-1}`) and the
/// counit identities `(ε ⊗ id)Δ = id = (id ⊗ ε)Δ` realised with the trivial
/// representation.
pub fn check_relations(r: &RepM) -> RelationReport {
    let q = r.q;
    let id = Operator::identity(&[r.dim()]).expect("small");
    let k_kinv = (&r.k * &r.kinv).max_abs_diff(&id);
    let (kek, kfk, ef) = relation_residuals(&r.e, &r.f, &r.k, &r.kinv, q);

    // S reverses products, so S(E), S(F), S(K) satisfy the relations of the
    // opposite algebra: S(K)S(E)S(K)^{-1} = q^{-2} S(E) read backwards etc.
    let se = (&r.kinv * &r.e).scale_real(-1.0);
    let sf = (&r.f * &r.k).scale_real(-1.0);
    let sk = &r.kinv;
    let skinv = &r.k;
    let antipode_kek = (&(skinv * &se) * sk).max_abs_diff(&se.scale_real(q * q));
    let antipode_kfk = (&(skinv * &sf) * sk).max_abs_diff(&sf.scale_real(1.0 / (q * q)));
    let lhs = &(&sf * &se) - &(&se * &sf);
    let rhs = (sk - skinv).scale_real(1.0 / (q - 1.0 / q));
    let antipode_ef = lhs.max_abs_diff(&rhs);

    let triv = rep(0, q).expect("valid q");
    let mut counit: f64 = 0.0;
    for (g, x) in [(Generator::E, &r.e), (Generator::F, &r.f), (Generator::K, &r.k)] {
        let left = coproduct_action(&triv, r, g).expect("same q");
        let right = coproduct_action(r, &triv, g).expect("same q");
        counit = counit.max(left.max_abs_diff(x)).max(right.max_abs_diff(x));
    }
    RelationReport { k_kinv, kek, kfk, ef, antipode_kek, antipode_kfk, antipode_ef, counit }
}

fn check_same_q(rl: &RepM, rm: &RepM) -> Result<()> {
    if (rl.q - rm.q).abs() > 1e-15 * rl.q.abs().max(1.0) {
        return Err(Error::DeformationMismatch(rl.q, rm.q));
    }
    Ok(())
}

/// Image of `Δ(gen)` on `ρ_l ⊗ ρ_m`.
pub fn coproduct_action(rl: &RepM, rm: &RepM, gen: Generator) -> Result<Operator> {
    check_same_q(rl, rm)?;
    let il = Operator::identity(&[rl.dim()])?;
    let im = Operator::identity(&[rm.dim()])?;
    match gen {
        Generator::E => Ok(&rl.k.kron(&rm.e)? + &rl.e.kron(&im)?),
        Generator::F => Ok(&il.kron(&rm.f)? + &rl.f.kron(&rm.kinv)?),
        Generator::K => rl.k.kron(&rm.k),
    }
}

/// Image of the opposite coproduct `Δ' = P ∘ Δ` on `ρ_l ⊗ ρ_m`.
pub fn opposite_coproduct_action(rl: &RepM, rm: &RepM, gen: Generator) -> Result<Operator> {
    check_same_q(rl, rm)?;
    let swapped = coproduct_action(rm, rl, gen)?;
    let p = permutation_operator(rm.dim(), rl.dim())?;
    let pinv = permutation_operator(rl.dim(), rm.dim())?;
    let mut out = &(&p * &swapped) * &pinv;
    out = Operator::new(vec![rl.dim(), rm.dim()], out.into_matrix())?;
    Ok(out)
}

/// The universal R-matrix on `ρ_l ⊗ ρ_m`,
/// `q^{½ h⊗h} Σ_i (q - q^{-1})^i q^{i(i-1)/2} / [i]! F^i ⊗ E^i`.
///
/// This is the element intertwining `Δ` with `Δ'`, i.e. `R Δ(x) = Δ'(x) R`, for
/// the coproduct above. The sum stops at `min(l, m)` by nilpotency and the
/// Cartan factor is diagonal on the weight basis.
pub fn universal_r(rl: &RepM, rm: &RepM) -> Result<Operator> {
    check_same_q(rl, rm)?;
    let q = rl.q;
    let dims = vec![rl.dim(), rm.dim()];
    let wl = rl.weights();
    let wm = rm.weights();
    let mut cartan = Vec::with_capacity(rl.dim() * rm.dim());
    for a in &wl {
        for b in &wm {
            cartan.push(c(q.powf(0.5 * (*a as f64) * (*b as f64))));
        }
    }
    let cartan = Operator::diagonal(dims.clone(), &cartan)?;

    let mut theta = Operator::zeros(&dims)?;
    let mut fi = Operator::identity(&[rl.dim()])?;
    let mut ei = Operator::identity(&[rm.dim()])?;
    let mut fact = 1.0;
    for i in 0..=rl.m.min(rm.m) {
        if i > 0 {
            fi = &fi * &rl.f;
            ei = &ei * &rm.e;
            fact *= sym_q_number(i as i32, q);
        }
        let coef = (q - 1.0 / q).powi(i as i32) * q.powf((i * (i.saturating_sub(1))) as f64 / 2.0) / fact;
        theta = &theta + &fi.kron(&ei)?.scale_real(coef);
    }
    let mut out = &cartan * &theta;
    out = Operator::new(dims, out.into_matrix())?;
    Ok(out)
}

/// Largest intertwining residual `‖R Δ(x) - Δ'(x) R‖` over `x ∈ {E, F, K}`.
pub fn intertwining_residual(rl: &RepM, rm: &RepM, r: &Operator) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for g in [Generator::E, Generator::F, Generator::K] {
        let d = coproduct_action(rl, rm, g)?;
        let dp = opposite_coproduct_action(rl, rm, g)?;
        worst = worst.max((r * &d).max_abs_diff(&(&dp * r)));
    }
    Ok(worst)
}

//! Matrix product stationary measures of open ASEP through the truncated
//! q-oscillator representation.
//!
//! Rates follow [`crate::models::mpa_bulk_generator`]: right hops at rate 1,
//! left hops at rate `q`, injection `α` / extraction `γ` at site 1 and
//! extraction `β` / injection `δ` at site `L`. Callers holding rates in the
//! `(1, q²)` two-site convention convert them with
//! [`crate::models::bulk_from_local`] first.

use crate::exec::Exec;
use crate::models::AsepParams;
use crate::tensor::ProbVector;
use crate::{Error, Result};
use nalgebra::DMatrix;
use serde::Serialize;

/// Initial truncation used by [`mpa_stationary_measure`].
pub const DEFAULT_TRUNCATION: usize = 16;
/// Largest truncation tried before giving up.
pub const MAX_TRUNCATION: usize = 1024;
/// Total-variation change under doubling that counts as converged.
pub const TRUNCATION_TOL: f64 = 1e-10;
/// Largest chain length for the `2^L` enumeration.
pub const MAX_SITES: usize = 12;

/// Truncated q-oscillator: `F|k> = {k}^{1/2}|k-1>`, `F†|k> = {k+1}^{1/2}|k+1>`,
/// `{k} = 1 - q^k`, with `D = F + 1` and `E = F† + 1`.
#[derive(Debug, Clone)]
pub struct OscillatorRep {
    pub m: usize,
    pub q: f64,
    pub f: DMatrix<f64>,
    pub fdag: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub e: DMatrix<f64>,
}

/// `{k} = 1 - q^k`.
pub fn bracket(k: usize, q: f64) -> f64 {
    1.0 - q.powi(k as i32)
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidDeformation(q));
    }
    Ok(())
}

pub fn q_oscillator(m: usize, q: f64) -> Result<OscillatorRep> {
    if m < 2 {
        return Err(Error::InvalidTruncation(format!("M = {m} < 2")));
    }
    check_q(q)?;
    let f = DMatrix::from_fn(m, m, |r, c| if c == r + 1 { bracket(c, q).sqrt() } else { 0.0 });
    let fdag = f.transpose();
    let id = DMatrix::identity(m, m);
    let d = &f + &id;
    let e = &fdag + &id;
    Ok(OscillatorRep { m, q, f, fdag, d, e })
}

/// Coefficients `x_0..x_{M-1}` of
/// `a{k+1}^{1/2} x_{k+1} + (a - c + q - 1) x_k - c{k}^{1/2} x_{k-1} = 0`
/// with `x_{-1} = 0`, `x_0 = 1`. `(a, c) = (α, γ)` gives `<W|` and
/// `(a, c) = (β, δ)` gives `|V>`.
pub fn boundary_coefficients(q: f64, a: f64, c: f64, m: usize) -> Result<Vec<f64>> {
    if a == 0.0 {
        return Err(Error::ZeroLeadingRate);
    }
    if m == 0 {
        return Err(Error::InvalidTruncation("M = 0".into()));
    }
    let b = a - c + q - 1.0;
    let mut x = vec![0.0; m];
    x[0] = 1.0;
    for k in 0..m - 1 {
        let prev = if k == 0 { 0.0 } else { c * bracket(k, q).sqrt() * x[k - 1] };
        x[k + 1] = (prev - b * x[k]) / (a * bracket(k + 1, q).sqrt());
    }
    Ok(x)
}

/// Product of the moduli of the dominant roots of `a x² + (a - c + q - 1) x - c`
/// for the two boundaries. The truncated series converges when this is
/// below 1.
pub fn convergence_factor(p: &AsepParams) -> f64 {
    let dominant = |a: f64, c: f64| {
        let b = a - c + p.q - 1.0;
        let disc = b * b + 4.0 * a * c;
        let s = disc.abs().sqrt();
        if disc >= 0.0 {
            ((-b + s) / (2.0 * a)).abs().max(((-b - s) / (2.0 * a)).abs())
        } else {
            (c / a).abs().sqrt()
        }
    };
    dominant(p.alpha, p.gamma) * dominant(p.beta, p.delta)
}

/// Stationary measure with the truncation used and the TV change at each
/// doubling.
#[derive(Debug, Clone, Serialize)]
pub struct MpaMeasure {
    pub measure: ProbVector,
    pub truncation: usize,
    pub tv_deltas: Vec<f64>,
}

// row · E and row · D without forming matrices
fn step(row: &[f64], sq: &[f64], occupied: bool, out: &mut [f64]) {
    let m = row.len();
    if occupied {
        // (row F)_j = row_{j-1} {j}^{1/2}
        for j in 0..m {
            let down = if j > 0 { row[j - 1] * sq[j] } else { 0.0 };
            out[j] = row[j] + down;
        }
    } else {
        // (row F†)_j = row_{j+1} {j+1}^{1/2}
        for j in 0..m {
            let up = if j + 1 < m { row[j + 1] * sq[j + 1] } else { 0.0 };
            out[j] = row[j] + up;
        }
    }
}

fn dfs(row: &[f64], depth: usize, l: usize, sq: &[f64], r: &[f64], out: &mut Vec<f64>) {
    if depth == l {
        out.push(row.iter().zip(r).map(|(a, b)| a * b).sum());
        return;
    }
    let mut next = vec![0.0; row.len()];
    for occ in [false, true] {
        step(row, sq, occ, &mut next);
        dfs(&next, depth + 1, l, sq, r, out);
    }
}

/// Unnormalized weights `<W| Π_i ((1-τ_i)E + τ_i D) |V>` of all `2^L`
/// configurations, indexed with site 1 as the most significant bit.
pub fn mpa_weights(p: &AsepParams, m: usize, exec: Exec) -> Result<Vec<f64>> {
    check_q(p.q)?;
    if m < 2 {
        return Err(Error::InvalidTruncation(format!("M = {m} < 2")));
    }
    let lc = boundary_coefficients(p.q, p.alpha, p.gamma, m)?;
    let rc = boundary_coefficients(p.q, p.beta, p.delta, m)?;
    let sq: Vec<f64> = (0..m).map(|k| bracket(k, p.q).sqrt()).collect();
    // split on the first few sites so work can be spread, then concatenate in
    // index order
    let split = p.l.min(4);
    let chunks = exec.map_range(1usize << split, |prefix| {
        let mut row = lc.clone();
        let mut next = vec![0.0; m];
        for s in 0..split {
            let occ = (prefix >> (split - 1 - s)) & 1 == 1;
            step(&row, &sq, occ, &mut next);
            std::mem::swap(&mut row, &mut next);
        }
        let mut out = Vec::with_capacity(1 << (p.l - split));
        dfs(&row, split, p.l, &sq, &rc, &mut out);
        out
    });
    Ok(chunks.into_iter().flatten().collect())
}

fn normalize(w: &[f64]) -> Result<ProbVector> {
    let z: f64 = w.iter().sum();
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::NegativeWeight(z));
    }
    if let Some(&bad) = w.iter().find(|&&x| x < -1e-12 * z) {
        return Err(Error::NegativeWeight(bad / z));
    }
    ProbVector::from_weights(w.iter().map(|&x| x.max(0.0)).collect())
}

/// Matrix product stationary measure, doubling the truncation from `m0` until
/// the measure moves by less than [`TRUNCATION_TOL`] in total variation.
pub fn mpa_stationary_measure_with(p: &AsepParams, m0: usize, exec: Exec) -> Result<MpaMeasure> {
    p.validate()?;
    check_q(p.q)?;
    if p.l > MAX_SITES {
        return Err(Error::StateSpaceTooLarge(1 << p.l));
    }
    let mut m = m0.max(2);
    let mut prev: Option<ProbVector> = None;
    let mut deltas = Vec::new();
    let mut last_delta = f64::INFINITY;
    while m <= MAX_TRUNCATION {
        let w = mpa_weights(p, m, exec)?;
        let z: f64 = w.iter().sum();
        let cur = if z > 0.0 && z.is_finite() && w.iter().all(|x| x.is_finite()) {
            Some(ProbVector::from_weights(w.iter().map(|&x| x.max(0.0)).collect())?)
        } else {
            None
        };
        if let (Some(a), Some(b)) = (&prev, &cur) {
            last_delta = a.tv_distance(b);
            deltas.push(last_delta);
            if last_delta < TRUNCATION_TOL {
                let measure = normalize(&w)?;
                return Ok(MpaMeasure { measure, truncation: m, tv_deltas: deltas });
            }
        }
        prev = cur;
        m *= 2;
    }
    Err(Error::TruncationNotConverged { m: m / 2, delta: last_delta })
}

pub fn mpa_stationary_measure(p: &AsepParams, m0: usize) -> Result<MpaMeasure> {
    mpa_stationary_measure_with(p, m0, Exec::default())
}

/// Residuals of the algebraic relations behind the construction, all
/// evaluated away from the truncation edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationResiduals {
    /// `FF† - qF†F - (1-q)`.
    pub oscillator: f64,
    /// `DE - qED - (1-q)(D+E)`.
    pub de: f64,
    /// Bulk relation with `Ē = q-1`, `D̄ = 1-q`, over all four pair states.
    pub bulk: f64,
    /// `<W|(αE - γD + q - 1)`, relative to `max |l_k|`.
    pub left: f64,
    /// `(δE - βD + 1 - q)|V>`, relative to `max |r_k|`.
    pub right: f64,
    /// `F` and `F†` are transposes of each other.
    pub adjoint: f64,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        [self.oscillator, self.de, self.bulk, self.left, self.right, self.adjoint].into_iter().fold(0.0, f64::max)
    }
}

fn interior_max(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows() - 1;
    a.view((0, 0), (n, n)).iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn relation_checks(p: &AsepParams, m: usize) -> Result<RelationResiduals> {
    let rep = q_oscillator(m, p.q)?;
    let q = p.q;
    let id = DMatrix::<f64>::identity(m, m);
    let oscillator = interior_max(&(&rep.f * &rep.fdag - &rep.fdag * &rep.f * q - &id * (1.0 - q)));
    let de = interior_max(&(&rep.d * &rep.e - &rep.e * &rep.d * q - (&rep.d + &rep.e) * (1.0 - q)));
    // bulk: Σ_{c'} w[c', c] X_{c'} - X_{τ1} X̄_{τ2} + X̄_{τ1} X_{τ2}
    let w = crate::models::mpa_bulk_generator(q).real_matrix();
    let x = [&rep.e, &rep.d];
    let xbar = [q - 1.0, 1.0 - q];
    let mut bulk = 0.0f64;
    for c in 0..4 {
        let (t1, t2) = (c >> 1, c & 1);
        let mut acc = DMatrix::<f64>::zeros(m, m);
        for cp in 0..4 {
            let coef = w[(cp, c)];
            if coef != 0.0 {
                acc += x[cp >> 1] * x[cp & 1] * coef;
            }
        }
        acc -= x[t1] * xbar[t2];
        acc += x[t2] * xbar[t1];
        bulk = bulk.max(interior_max(&acc));
    }
    let lc = boundary_coefficients(q, p.alpha, p.gamma, m)?;
    let rc = boundary_coefficients(q, p.beta, p.delta, m)?;
    let lrow = nalgebra::RowDVector::from_vec(lc.clone());
    let lres = &lrow * (&rep.e * p.alpha - &rep.d * p.gamma + &id * (q - 1.0));
    let rcol = nalgebra::DVector::from_vec(rc.clone());
    let rres = (&rep.e * p.delta - &rep.d * p.beta + &id * (1.0 - q)) * &rcol;
    let scale = |v: &[f64]| v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let left = lres.iter().take(m - 1).fold(0.0f64, |a, x| a.max(x.abs())) / scale(&lc);
    let right = rres.iter().take(m - 1).fold(0.0f64, |a, x| a.max(x.abs())) / scale(&rc);
    let adjoint = (&rep.f.transpose() - &rep.fdag).amax();
    Ok(RelationResiduals { oscillator, de, bulk, left, right, adjoint })
}

/// Configuration index as a string of occupation bits, site 1 first.
pub fn config_bits(index: usize, l: usize) -> String {
    (0..l).map(|s| if (index >> (l - 1 - s)) & 1 == 1 { '1' } else { '0' }).collect()
}

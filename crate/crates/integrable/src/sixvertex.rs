//! Stochastic six-vertex weights, a raster-order lattice sampler, and the
//! higher-spin fused weights built two ways: by the ladder recurrence from the
//! `l = 1` weights and by the closed q-Racah formula.
//!
//! A vertex state is `(j, k)` with `j` the horizontal occupation
//! (`0..=l`) and `k` the vertical one (`0..=m`); its matrix index is
//! `j (m + 1) + k`. Rows are inputs `(left, bottom)`, columns outputs
//! `(right, top)`. Fused weights are generic over [`num_traits::Float`]; the
//! cross-checks run them in double-double ([`DD`]) because the closed form
//! loses about seven digits to cancellation at `l = m = 4`.

use crate::exec::Exec;
use crate::tensor::{permutation_operator, Operator};
use crate::ybe::{Convention, SpectralRFamily};
use crate::{Error, Result, C64};
use nalgebra::DMatrix;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt::Debug;

/// Double-double floating point.
pub type DD = twofloat::TwoFloat;

/// Scalars accepted by the weight constructors.
pub trait Real: Float + Debug + Send + Sync + 'static {
    /// Unit roundoff of the working precision.
    const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

    /// Quotient accurate to the working precision.
    fn quot(self, rhs: Self) -> Self {
        self / rhs
    }
}

impl Real for f64 {}

impl Real for DD {
    // twofloat's epsilon() is the smallest positive normal, not the roundoff
    const UNIT_ROUNDOFF: f64 = 4.93e-32;

    // the crate's own quotient forms 1 - b·(1/b) without a fused multiply-add
    // and keeps only f64 accuracy; long division with exact residuals instead
    fn quot(self, rhs: Self) -> Self {
        let q1 = self.hi() / rhs.hi();
        let r = self - rhs * q1;
        let q2 = r.hi() / rhs.hi();
        let r = r - rhs * q2;
        let q3 = r.hi() / rhs.hi();
        DD::from(q1) + DD::from(q2) + DD::from(q3)
    }
}

/// `x^n` for any integer `n`, with `x^0 = 1`.
pub fn pw<T: Real>(x: T, n: i32) -> T {
    match n {
        0 => T::one(),
        n if n > 0 => x.powi(n),
        n => T::one().quot(x.powi(-n)),
    }
}

/// A factor `1 - a q^k` smaller than this is treated as an exact zero.
pub const POLE_TOL: f64 = 1e-13;
/// Relative spectral offsets used to resolve removable singularities of the
/// closed form.
pub const REGULARIZATION_STEPS: [f64; 2] = [1e-6, 5e-7];

fn t<T: Real>(x: f64) -> T {
    T::from(x).expect("finite constant")
}

/// Vertex weight table `W[(j1, k1) -> (j2, k2)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexWeights<T = f64> {
    pub l: usize,
    pub m: usize,
    /// Spectral parameter, absent for weights given directly by `(b1, b2)`.
    pub z: Option<T>,
    pub q: Option<T>,
    table: Vec<T>,
}

impl<T: Real> VertexWeights<T> {
    pub fn zeros(l: usize, m: usize, z: Option<T>, q: Option<T>) -> Self {
        let n = (l + 1) * (m + 1);
        Self { l, m, z, q, table: vec![T::zero(); n * n] }
    }

    /// Number of vertex states `(l + 1)(m + 1)`.
    pub fn states(&self) -> usize {
        (self.l + 1) * (self.m + 1)
    }

    pub fn index(&self, j: usize, k: usize) -> usize {
        j * (self.m + 1) + k
    }

    pub fn get(&self, j1: usize, k1: usize, j2: usize, k2: usize) -> T {
        self.table[self.index(j1, k1) * self.states() + self.index(j2, k2)]
    }

    pub fn set(&mut self, j1: usize, k1: usize, j2: usize, k2: usize, v: T) {
        let n = self.states();
        let (a, b) = (self.index(j1, k1), self.index(j2, k2));
        self.table[a * n + b] = v;
    }

    /// Outgoing `(j2, k2)` states compatible with `j1 + k1 = j2 + k2`.
    pub fn outputs(&self, j1: usize, k1: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let s = j1 + k1;
        (0..=self.l).filter_map(move |j2| {
            let k2 = s.checked_sub(j2)?;
            (k2 <= self.m).then_some((j2, k2))
        })
    }

    /// `max |Σ_out W - 1|` over inputs.
    pub fn row_sum_error(&self) -> f64 {
        let n = self.states();
        (0..n)
            .map(|a| {
                let s = self.table[a * n..(a + 1) * n].iter().fold(T::zero(), |acc, &x| acc + x);
                (s - T::one()).abs().to_f64().unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry violating arrow conservation.
    pub fn conservation_error(&self) -> f64 {
        let mut e = 0.0f64;
        for j1 in 0..=self.l {
            for k1 in 0..=self.m {
                for j2 in 0..=self.l {
                    for k2 in 0..=self.m {
                        if j1 + k1 != j2 + k2 {
                            e = e.max(self.get(j1, k1, j2, k2).abs().to_f64().unwrap_or(f64::INFINITY));
                        }
                    }
                }
            }
        }
        e
    }

    pub fn max_abs_diff(&self, other: &VertexWeights<T>) -> f64 {
        if self.l != other.l || self.m != other.m {
            return f64::INFINITY;
        }
        self.table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (*a - *b).abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> VertexWeights<f64> {
        let c = |x: T| x.to_f64().unwrap_or(f64::NAN);
        VertexWeights {
            l: self.l,
            m: self.m,
            z: self.z.map(c),
            q: self.q.map(c),
            table: self.table.iter().map(|&x| c(x)).collect(),
        }
    }

    /// The table as an operator on `C^{l+1} ⊗ C^{m+1}`.
    pub fn to_operator(&self) -> Result<Operator> {
        let n = self.states();
        Operator::from_fn(vec![self.l + 1, self.m + 1], |r, c| {
            C64::new(self.table[r * n + c].to_f64().unwrap_or(f64::NAN), 0.0)
        })
    }

    /// All on-shell entries `(j1, k1, j2, k2, W)` in index order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for j1 in 0..=self.l {
            for k1 in 0..=self.m {
                for (j2, k2) in self.outputs(j1, k1) {
                    out.push((j1, k1, j2, k2, self.get(j1, k1, j2, k2).to_f64().unwrap_or(f64::NAN)));
                }
            }
        }
        out
    }
}

/// Spin-1/2 stochastic six-vertex weights: a vertical arrow continues up with
/// probability `b1`, a horizontal arrow continues right with probability `b2`,
/// empty and doubly occupied vertices pass through.
pub fn six_vertex_weights(b1: f64, b2: f64) -> Result<VertexWeights<f64>> {
    for (n, v) in [("b1", b1), ("b2", b2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::RateOutOfRange(format!("{n} = {v}")));
        }
    }
    let mut w = VertexWeights::zeros(1, 1, None, None);
    w.set(0, 0, 0, 0, 1.0);
    w.set(1, 1, 1, 1, 1.0);
    w.set(0, 1, 0, 1, b1);
    w.set(0, 1, 1, 0, 1.0 - b1);
    w.set(1, 0, 1, 0, b2);
    w.set(1, 0, 0, 1, 1.0 - b2);
    Ok(w)
}

/// The `(b1, b2)` for which [`six_vertex_weights`] equals
/// [`crate::ybe::asep_spectral_r`] at `(z, q)`.
pub fn asep_matched_b(z: f64, q: f64) -> (f64, f64) {
    let den = q * z - 1.0;
    (q * (z - 1.0) / den, (z - 1.0) / den)
}

/// Weights with horizontal capacity 1 and vertical capacity `m`. With `g`
/// arrows entering from below and `Δ = q^{m+1} - z`:
/// nothing from the left passes `g` up with `(q^{m+1} - q^{2g} z)/Δ` or
/// emits one arrow right with `z(q^{2g} - 1)/Δ`; an arrow from the left
/// continues right with `(q^{2g-m+1} - z)/Δ` or turns up with
/// `(q^{m+1} - q^{2g-m+1})/Δ`.
pub fn higher_spin_base_weights<T: Real>(m: usize, z: T, q: T) -> Result<VertexWeights<T>> {
    if m == 0 {
        return Err(Error::InvalidParameter("vertical capacity must be at least 1".into()));
    }
    let mi = m as i32;
    let top = pw(q, mi + 1);
    let den = top - z;
    if den.abs() <= t::<T>(POLE_TOL) * T::one().max(z.abs()) {
        return Err(Error::PoleAtZEqualsQPower(format!("z = {:?} equals q^{}", z.to_f64(), m + 1)));
    }
    let mut w = VertexWeights::zeros(1, m, Some(z), Some(q));
    for g in 0..=m {
        let gi = g as i32;
        let q2g = pw(q, 2 * gi);
        w.set(0, g, 0, g, (top - q2g * z).quot(den));
        if g >= 1 {
            w.set(0, g, 1, g - 1, (z * (q2g - T::one())).quot(den));
        }
        let shifted = pw(q, 2 * gi - mi + 1);
        w.set(1, g, 1, g, (shifted - z).quot(den));
        if g < m {
            w.set(1, g, 0, g + 1, (top - shifted).quot(den));
        }
    }
    Ok(w)
}

/// Fused weights with horizontal capacity `l` from the ladder recurrence:
/// split `j1` arrows into a bundle of `l-1` lines and one line with
/// probabilities `P(0) = C(l-1, j1)/C(l, j1)` and
/// `P(1) = Q^{l-j1} C(l-1, j1-1)/C(l, j1)` (q-binomials in base `Q = q²`),
/// pass the bundle through `S^{l-1}(z)`, then the single line through
/// `S^1(z Q^{l-1})`, summing over the line's input and output `a, b`.
pub fn fused_weights_recurrence<T: Real>(l: usize, m: usize, z: T, q: T) -> Result<VertexWeights<T>> {
    if l == 0 || m == 0 {
        return Err(Error::InvalidParameter("capacities must be at least 1".into()));
    }
    let ladder = |s: usize, zs: T| {
        higher_spin_base_weights(m, zs, q).map_err(|e| Error::PoleInSpectralLadder(format!("step {s}: {e}")))
    };
    let qq = q * q;
    let mut cur = ladder(0, z)?;
    for lev in 2..=l {
        let zs = z * pw(qq, lev as i32 - 1);
        let single = ladder(lev - 1, zs)?;
        let mut next = VertexWeights::zeros(lev, m, Some(z), Some(q));
        for j1 in 0..=lev {
            let c_full = q_binom(lev, j1 as i64, qq);
            let p = [
                q_binom(lev - 1, j1 as i64, qq).quot(c_full),
                (pw(qq, (lev - j1) as i32) * q_binom(lev - 1, j1 as i64 - 1, qq)).quot(c_full),
            ];
            for k1 in 0..=m {
                for j2 in 0..=lev {
                    let Some(k2) = (j1 + k1).checked_sub(j2) else { continue };
                    if k2 > m {
                        continue;
                    }
                    let mut s = T::zero();
                    for a in 0..=1usize {
                        if p[a] == T::zero() || a > j1 || j1 - a > lev - 1 {
                            continue;
                        }
                        for b in 0..=1usize {
                            if b > j2 || j2 - b > lev - 1 {
                                continue;
                            }
                            // intermediate vertical occupation between the two factors
                            let mid = (j1 - a + k1) as i64 - (j2 - b) as i64;
                            if mid < 0 || mid > m as i64 {
                                continue;
                            }
                            let mid = mid as usize;
                            s = s + p[a] * cur.get(j1 - a, k1, j2 - b, mid) * single.get(a, mid, b, k2);
                        }
                    }
                    next.set(j1, k1, j2, k2, s);
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}

// Gaussian binomial in base `q`, zero outside `0 <= j <= l`
fn q_binom<T: Real>(l: usize, j: i64, q: T) -> T {
    if j < 0 || j > l as i64 {
        return T::zero();
    }
    let j = j as usize;
    let mut r = T::one();
    for i in 1..=j {
        r = (r * (T::one() - pw(q, (l - j + i) as i32))).quot(T::one() - pw(q, i as i32));
    }
    r
}

// (a; q)_n for any integer n; None if a negative-index symbol divides by ~0
fn poch_num<T: Real>(a: T, q: T, n: i64) -> Option<T> {
    if n >= 0 {
        let mut p = T::one();
        let mut qk = T::one();
        for _ in 0..n {
            p = p * (T::one() - a * qk);
            qk = qk * q;
        }
        Some(p)
    } else {
        poch_den(a * pw(q, n as i32), q, -n).map(|d| T::one().quot(d))
    }
}

// (a; q)_n with n >= 0 that will be divided by; None if a factor is ~0
fn poch_den<T: Real>(a: T, q: T, n: i64) -> Option<T> {
    let tol = t::<T>(POLE_TOL);
    let mut p = T::one();
    let mut qk = T::one();
    for _ in 0..n {
        let f = T::one() - a * qk;
        if f.abs() <= tol {
            return None;
        }
        p = p * f;
        qk = qk * q;
    }
    Some(p)
}

/// The terminating sum
/// `Σ_{k=0}^{n} Q^k (Q^{-n}; Q)_k / (Q; Q)_k · Π_a (a; Q)_k · Π_b (b Q^k; Q)_{n-k}`,
/// a q-Racah polynomial multiplied by `Π_b (b; Q)_n`.
pub fn phi_bar<T: Real>(n: usize, ups: &[T; 3], lows: &[T; 3], qq: T) -> T {
    let ni = n as i64;
    let mut s = T::zero();
    for k in 0..=ni {
        let mut term = (pw(qq, k as i32) * poch_num(pw(qq, -(n as i32)), qq, k).unwrap_or(T::zero()))
            .quot(poch_num(qq, qq, k).unwrap_or(T::one()));
        for &a in ups {
            term = term * poch_num(a, qq, k).unwrap_or(T::zero());
        }
        for &b in lows {
            term = term * poch_num(b * pw(qq, k as i32), qq, ni - k).unwrap_or(T::zero());
        }
        s = s + term;
    }
    s
}

/// One entry of the closed form, `None` at a zero denominator.
///
/// With `Q = q²`, `ν = Q^{-m}`, `α = -z q^{-m-1}`, `i` vertical and `j`
/// horizontal occupations:
/// `W = Q^E ν^{j1-i2} α^{i1} (-α/ν; Q)_{j2-i1} / ((Q; Q)_{i2} (-α; Q)_{i2+j2})
///      · (Q; Q)_{j1} / (Q; Q)_{j2} · (ν Q^{i1}; Q)_{j1-j2} · φ̄`,
/// `4E = 2j1 - j1² - 2j2 + j2² + i1² + i2² + 2 i2 (j2 - 1) + 2 i1 j1`.
#[allow(clippy::too_many_arguments)]
fn closed_entry<T: Real>(l: usize, m: usize, z: T, q: T, j1: usize, i1: usize, j2: usize, i2: usize) -> Option<T> {
    let qq = q * q;
    let nu = pw(qq, -(m as i32));
    let al = -z * pw(q, -(m as i32) - 1);
    let (j1i, i1i, j2i, i2i) = (j1 as i64, i1 as i64, j2 as i64, i2 as i64);
    let e4 = 2 * j1i - j1i * j1i - 2 * j2i + j2i * j2i + i1i * i1i + i2i * i2i + 2 * i2i * (j2i - 1) + 2 * i1i * j1i;
    let mut v = pw(q.sqrt(), e4 as i32) * pw(nu, (j1i - i2i) as i32) * pw(al, i1 as i32);
    v = v * poch_num((-al).quot(nu), qq, j2i - i1i)?;
    v = v.quot(poch_den(qq, qq, i2i)?);
    v = v.quot(poch_den(-al, qq, i2i + j2i)?);
    v = (v * poch_num(qq, qq, j1i)?).quot(poch_den(qq, qq, j2i)?);
    v = v * poch_num(nu * pw(qq, i1 as i32), qq, j1i - j2i)?;
    let big_j = l as i32;
    let ups = [pw(qq, -(i2 as i32)), -al * pw(qq, big_j), (-qq * nu).quot(al)];
    let lows = [nu, pw(qq, 1 + j2 as i32 - i1 as i32), pw(qq, big_j + 1 - i2 as i32 - j2 as i32)];
    let v = v * phi_bar(i1, &ups, &lows, qq);
    v.is_finite().then_some(v)
}

/// Fused weights from the closed formula. Entries sitting on a removable
/// singularity are recovered from symmetric evaluations at `z(1 ± ε)` for the
/// two [`REGULARIZATION_STEPS`] followed by Richardson extrapolation; if the
/// gap between the two sides does not shrink with `ε` the point is a genuine
/// pole and [`Error::PoleInPochhammer`] is returned.
pub fn fused_weights_closed_form<T: Real>(l: usize, m: usize, z: T, q: T) -> Result<VertexWeights<T>> {
    if l == 0 || m == 0 {
        return Err(Error::InvalidParameter("capacities must be at least 1".into()));
    }
    let mut w = VertexWeights::zeros(l, m, Some(z), Some(q));
    for j1 in 0..=l {
        for i1 in 0..=m {
            let outs: Vec<_> = w.outputs(j1, i1).collect();
            for (j2, i2) in outs {
                let v = match closed_entry(l, m, z, q, j1, i1, j2, i2) {
                    Some(v) => v,
                    None => regularize(|zz| closed_entry(l, m, zz, q, j1, i1, j2, i2), z).ok_or_else(|| {
                        Error::PoleInPochhammer(format!("entry ({j1},{i1})->({j2},{i2}) at z = {:?}", z.to_f64()))
                    })?,
                };
                w.set(j1, i1, j2, i2, v);
            }
        }
    }
    Ok(w)
}

fn regularize<T: Real>(f: impl Fn(T) -> Option<T>, z: T) -> Option<T> {
    let mut mids = [T::zero(); 2];
    let mut gaps = [T::zero(); 2];
    for (s, &eps) in REGULARIZATION_STEPS.iter().enumerate() {
        let e = t::<T>(eps);
        let hi = f(z * (T::one() + e))?;
        let lo = f(z * (T::one() - e))?;
        mids[s] = (hi + lo) * t(0.5);
        gaps[s] = (hi - lo).abs();
    }
    // removable: the one-sided values close in linearly; a pole pushes them apart
    // an entry flat near z leaves only cancellation noise of order roundoff / ε
    let scale = T::one().max(mids[1].abs());
    let flat = gaps[1] <= t::<T>(1e2 * T::UNIT_ROUNDOFF / REGULARIZATION_STEPS[1]) * scale;
    if !(flat || gaps[1] < gaps[0]) || gaps[1] > t::<T>(1e-3) * scale {
        return None;
    }
    let r = (REGULARIZATION_STEPS[0] / REGULARIZATION_STEPS[1]).powi(2);
    Some((mids[1] * t(r) - mids[0]).quot(t(r - 1.0)))
}

/// `S = P G_ml^{-1} P R G_lm` for `R` on `V_l ⊗ V_m`, with `G_lm` diagonal on
/// `V_l ⊗ V_m`, `G_ml` diagonal on `V_m ⊗ V_l`, and `P` the swap of factors.
pub fn gauge_transform(r: &Operator, g_lm: &[C64], g_ml: &[C64]) -> Result<Operator> {
    let dims = r.site_dims();
    if dims.len() != 2 {
        return Err(Error::DimensionMismatch("gauge transform needs two tensor factors".into()));
    }
    let (dl, dm) = (dims[0], dims[1]);
    let n = dl * dm;
    if g_lm.len() != n || g_ml.len() != n {
        return Err(Error::DimensionMismatch("gauge diagonal length".into()));
    }
    if g_lm.iter().chain(g_ml).any(|g| g.norm() <= 1e-300) {
        return Err(Error::SingularGauge);
    }
    let to_lm = permutation_operator(dm, dl)?.into_matrix();
    let to_ml = permutation_operator(dl, dm)?.into_matrix();
    let glm = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(g_lm));
    let gml_inv =
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, g_ml.iter().map(|g| C64::new(1.0, 0.0) / g)));
    let s = to_lm * gml_inv * to_ml * r.matrix() * glm;
    Operator::new(dims.to_vec(), s)
}

/// The fused family `z -> S^{l,l}(z q^{1-l})` as an `R`-convention spectral
/// family, evaluated by the recurrence in double-double precision.
pub fn fused_spectral_family(l: usize, q: f64) -> SpectralRFamily {
    SpectralRFamily::new(format!("fused-{l}"), q, l + 1, Convention::R, move |z: C64| {
        if z.im != 0.0 {
            return Err(Error::InvalidParameter("fused weights take a real spectral parameter".into()));
        }
        let zz = DD::from(z.re) * pw(DD::from(q), 1 - l as i32);
        fused_weights_recurrence(l, l, zz, DD::from(q))?.to_operator()
    })
}

/// Arrows entering the lattice: `left[y]` from the left into row `y`,
/// `bottom[x]` from below into column `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Boundary {
    pub left: Vec<usize>,
    pub bottom: Vec<usize>,
}

impl Boundary {
    /// Step boundary: one arrow enters every row from the left, none from below.
    pub fn step(width: usize, height: usize) -> Self {
        Self { left: vec![1; height], bottom: vec![0; width] }
    }
}

/// A vertex of a sampled configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VertexRecord {
    pub x: usize,
    pub y: usize,
    pub j1: usize,
    pub k1: usize,
    pub j2: usize,
    pub k2: usize,
}

/// A sampled lattice configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeConfig {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub stream: u64,
    pub boundary: Boundary,
    /// Vertices in sampling order: rows bottom to top, each left to right.
    pub vertices: Vec<VertexRecord>,
    /// Arrows leaving through the top edge, per column.
    pub top: Vec<usize>,
    /// Arrows leaving through the right edge, per row.
    pub right: Vec<usize>,
    /// `h[x]` = arrows leaving through the top edge at columns `>= x`;
    /// `width + 1` entries.
    pub height_function: Vec<usize>,
}

impl LatticeConfig {
    pub fn vertex(&self, x: usize, y: usize) -> &VertexRecord {
        &self.vertices[y * self.width + x]
    }
}

/// Samples a configuration vertex by vertex. Each vertex only depends on the
/// edges entering from the left and from below, which are already fixed in
/// raster order, and each row of `w` is a probability law, so drawing outputs
/// from the row of the observed inputs samples the model exactly.
pub fn sample_lattice(
    w: &VertexWeights<f64>,
    width: usize,
    height: usize,
    boundary: &Boundary,
    seed: u64,
) -> Result<LatticeConfig> {
    sample_stream(w, width, height, boundary, seed, 0)
}

fn sample_stream(
    w: &VertexWeights<f64>,
    width: usize,
    height: usize,
    boundary: &Boundary,
    seed: u64,
    stream: u64,
) -> Result<LatticeConfig> {
    if boundary.left.len() != height || boundary.bottom.len() != width {
        return Err(Error::InconsistentBoundary(format!("expected {height} left and {width} bottom entries")));
    }
    if let Some(v) = boundary.left.iter().find(|&&v| v > w.l) {
        return Err(Error::InconsistentBoundary(format!("left entry {v} exceeds capacity {}", w.l)));
    }
    if let Some(v) = boundary.bottom.iter().find(|&&v| v > w.m) {
        return Err(Error::InconsistentBoundary(format!("bottom entry {v} exceeds capacity {}", w.m)));
    }
    if w.row_sum_error() > 1e-9 || w.table.iter().any(|&x| x < -1e-12) {
        return Err(Error::InvalidParameter("weights are not a stochastic table".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut column = boundary.bottom.clone();
    let mut vertices = Vec::with_capacity(width * height);
    let mut right = Vec::with_capacity(height);
    for y in 0..height {
        let mut j = boundary.left[y];
        for x in 0..width {
            let k = column[x];
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = None;
            for (j2, k2) in w.outputs(j, k) {
                let p = w.get(j, k, j2, k2);
                if p <= 0.0 {
                    continue;
                }
                acc += p;
                pick = Some((j2, k2));
                if u < acc {
                    break;
                }
            }
            let (j2, k2) = pick.ok_or_else(|| Error::InvalidParameter("empty weight row".into()))?;
            vertices.push(VertexRecord { x, y, j1: j, k1: k, j2, k2 });
            j = j2;
            column[x] = k2;
        }
        right.push(j);
    }
    let mut height_function = vec![0; width + 1];
    for x in (0..width).rev() {
        height_function[x] = height_function[x + 1] + column[x];
    }
    Ok(LatticeConfig {
        width,
        height,
        seed,
        stream,
        boundary: boundary.clone(),
        vertices,
        top: column,
        right,
        height_function,
    })
}

/// Independent trajectories; trajectory `i` uses stream `i` of the seeded
/// generator, so the result does not depend on the execution path and
/// trajectory 0 equals [`sample_lattice`].
pub fn sample_many(
    w: &VertexWeights<f64>,
    width: usize,
    height: usize,
    boundary: &Boundary,
    seed: u64,
    n: usize,
    exec: Exec,
) -> Result<Vec<LatticeConfig>> {
    exec.map_range(n, |i| sample_stream(w, width, height, boundary, seed, i as u64)).into_iter().collect()
}

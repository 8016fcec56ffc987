//! q-arithmetic: q-Pochhammer symbols, q-integers and q-binomials, basic
//! hypergeometric series and q-Racah polynomials.
//!
//! The complex-valued functions follow the textbook definitions directly. The
//! `*_real` variants are generic over [`num_traits::Float`] so the vertex
//! weight code can run them in double-double precision.

use crate::{Error, Result, C64};
use num_traits::Float;

/// Below this distance from 1 the deformation parameter is treated as q = 1.
pub const Q_ONE_THRESHOLD: f64 = 1e-8;

/// Relative tolerance used to detect `a = q^{-n}` in upper parameters.
pub const TERMINATION_RTOL: f64 = 1e-12;

/// `(a; q)_n = (1 - a)(1 - aq)...(1 - aq^{n-1})`, with the empty product 1.
pub fn q_pochhammer(a: C64, q: f64, n: usize) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    let mut qk = 1.0;
    for _ in 0..n {
        p *= C64::new(1.0, 0.0) - a * qk;
        qk *= q;
    }
    p
}

/// Real q-Pochhammer symbol extended to negative `n` by
/// `(a; q)_{-n} = 1 / (a q^{-n}; q)_n`.
///
/// Returns `None` when a negative-index symbol has a vanishing denominator
/// (zero up to a few units of roundoff).
pub fn q_pochhammer_real<T: Float>(a: T, q: T, n: i64) -> Option<T> {
    if n >= 0 {
        let mut p = T::one();
        let mut qk = T::one();
        for _ in 0..n {
            p = p * (T::one() - a * qk);
            qk = qk * q;
        }
        Some(p)
    } else {
        let d = q_pochhammer_real(a * q.powi(n as i32), q, -n)?;
        // a factor 1 - a q^k that should vanish exactly is left at roundoff
        if d.abs() <= T::epsilon() * T::from(64).unwrap() {
            None
        } else {
            Some(T::one() / d)
        }
    }
}

fn near_one<T: Float>(q: T) -> bool {
    (q - T::one()).abs() < T::from(Q_ONE_THRESHOLD).unwrap()
}

/// The q-integer `[n]_q = (1 - q^n) / (1 - q)`, equal to `n` at q = 1.
pub fn q_number<T: Float>(n: u32, q: T) -> T {
    if near_one(q) {
        return T::from(n).unwrap();
    }
    (T::one() - q.powi(n as i32)) / (T::one() - q)
}

/// The symmetric q-integer `(q^n - q^{-n}) / (q - q^{-1})` used by `U_q(sl2)`.
pub fn sym_q_number(n: i32, q: f64) -> f64 {
    if near_one(q) {
        return n as f64;
    }
    (q.powi(n) - q.powi(-n)) / (q - 1.0 / q)
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`.
pub fn q_factorial<T: Float>(n: u32, q: T) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * q_number(k, q))
}

/// Gaussian binomial coefficient `[l]_q! / ([j]_q! [l-j]_q!)`, zero outside
/// `0 <= j <= l`, reducing to the classical binomial at q = 1.
pub fn q_binomial(l: u32, j: i64, q: f64) -> f64 {
    q_binomial_real(l, j, q)
}

/// Generic form of [`q_binomial`].
pub fn q_binomial_real<T: Float>(l: u32, j: i64, q: T) -> T {
    if j < 0 || j > l as i64 {
        return T::zero();
    }
    let j = j as u32;
    let j = j.min(l - j);
    let mut r = T::one();
    for i in 1..=j {
        if near_one(q) {
            r = r * T::from(l - j + i).unwrap() / T::from(i).unwrap();
        } else {
            r = r * (T::one() - q.powi((l - j + i) as i32)) / (T::one() - q.powi(i as i32));
        }
    }
    r
}

/// Parameters of an `r phi s` basic hypergeometric series.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergeometricSpec {
    pub upper: Vec<C64>,
    pub lower: Vec<C64>,
    pub q: f64,
    pub z: C64,
    pub max_terms: usize,
}

impl HypergeometricSpec {
    pub fn new(upper: Vec<C64>, lower: Vec<C64>, q: f64, z: C64) -> Self {
        Self { upper, lower, q, z, max_terms: 10_000 }
    }
}

/// Smallest `n >= 0` such that some upper parameter equals `q^{-n}`.
pub fn termination_index(upper: &[C64], q: f64) -> Option<usize> {
    if !(q > 0.0) || near_one(q) {
        return upper.iter().any(|a| (a - 1.0).norm() <= TERMINATION_RTOL).then_some(0);
    }
    upper
        .iter()
        .filter_map(|a| {
            if a.re <= 0.0 || a.im.abs() > TERMINATION_RTOL * a.norm() {
                return None;
            }
            let n = (a.re.ln() / -q.ln()).round();
            if !(0.0..=1e6).contains(&n) {
                return None;
            }
            let target = q.powf(-n);
            ((a - target).norm() <= TERMINATION_RTOL * target).then_some(n as usize)
        })
        .min()
}

/// Sums the basic hypergeometric series
/// `sum_k (a_1..a_r; q)_k / (b_1..b_s; q)_k ((-1)^k q^{k(k-1)/2})^{1+s-r} z^k / (q; q)_k`.
///
/// A terminating series (some `a_i = q^{-n}`) is summed exactly up to `k = n`;
/// otherwise terms are added until they drop below machine scale.
pub fn basic_hypergeometric(spec: &HypergeometricSpec) -> Result<C64> {
    let q = spec.q;
    if !(q > 0.0) || near_one(q) {
        return Err(Error::InvalidDeformation(q));
    }
    let r = spec.upper.len() as i32;
    let s = spec.lower.len() as i32;
    let excess = 1 + s - r;
    let stop = termination_index(&spec.upper, q);
    let cap = stop.unwrap_or(spec.max_terms);

    let one = C64::new(1.0, 0.0);
    let mut term = one;
    let mut sum = one;
    let mut qk = 1.0;
    let mut small_run = 0;
    for k in 0..cap {
        let mut ratio = spec.z / (1.0 - qk * q);
        for a in &spec.upper {
            ratio *= one - a * qk;
        }
        for b in &spec.lower {
            let d = one - b * qk;
            if d.norm() <= 1e-14 * (1.0 + (b * qk).norm()) {
                return Err(Error::PoleInLowerParameters(k));
            }
            ratio /= d;
        }
        if excess != 0 {
            ratio *= (-qk).powi(excess);
        }
        term *= ratio;
        sum += term;
        qk *= q;
        if stop.is_none() {
            if term.norm() <= f64::EPSILON * 1e-2 * sum.norm().max(1e-300) {
                small_run += 1;
                if small_run >= 3 {
                    return Ok(sum);
                }
            } else {
                small_run = 0;
            }
        }
    }
    if stop.is_some() {
        Ok(sum)
    } else {
        Err(Error::NonTerminatingDivergent(spec.max_terms))
    }
}

/// Parameters of a q-Racah polynomial `R_n(mu(x); alpha, beta, gamma, delta | q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QRacahParams {
    pub n: usize,
    pub x: usize,
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
    pub q: f64,
    pub big_n: usize,
}

impl QRacahParams {
    /// Checks the truncation condition and the index ranges.
    pub fn validate(&self) -> Result<()> {
        if self.n > self.big_n || self.x > self.big_n {
            return Err(Error::InvalidParameter(format!(
                "q-Racah indices n = {}, x = {} exceed N = {}",
                self.n, self.x, self.big_n
            )));
        }
        let q = self.q;
        if !(q > 0.0) || near_one(q) {
            return Err(Error::InvalidDeformation(q));
        }
        let target = q.powi(-(self.big_n as i32));
        let hits = [self.alpha * q, self.beta * self.delta * q, self.gamma * q]
            .iter()
            .filter(|v| (*v - target).norm() <= 1e-10 * target)
            .count();
        if hits != 1 {
            return Err(Error::InvalidParameter(format!(
                "exactly one of alpha q, beta delta q, gamma q must equal q^-N (found {hits})"
            )));
        }
        Ok(())
    }

    /// The lattice `mu(x) = q^{-x} + gamma delta q^{x+1}`.
    pub fn mu(&self) -> C64 {
        let q = self.q;
        C64::new(q.powi(-(self.x as i32)), 0.0) + self.gamma * self.delta * q.powi(self.x as i32 + 1)
    }
}

/// Evaluates the q-Racah polynomial as the terminating `4 phi 3` with upper
/// parameters `(q^{-n}, alpha beta q^{n+1}, q^{-x}, gamma delta q^{x+1})`,
/// lower parameters `(alpha q, beta delta q, gamma q)` and argument `q`.
pub fn q_racah(p: &QRacahParams) -> Result<C64> {
    p.validate()?;
    let q = p.q;
    let n = p.n as i32;
    let x = p.x as i32;
    let upper = vec![
        C64::new(q.powi(-n), 0.0),
        p.alpha * p.beta * q.powi(n + 1),
        C64::new(q.powi(-x), 0.0),
        p.gamma * p.delta * q.powi(x + 1),
    ];
    let lower = vec![p.alpha * q, p.beta * p.delta * q, p.gamma * q];
    let mut spec = HypergeometricSpec::new(upper, lower, q, C64::new(q, 0.0));
    spec.max_terms = p.big_n + 2;
    basic_hypergeometric(&spec)
}

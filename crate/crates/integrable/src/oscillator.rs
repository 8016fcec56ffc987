//! Classical harmonic oscillator: Hermite polynomials, ladder operators on a
//! truncated Fock space and the Jordan–Schwinger map `M -> Σ a_i† M_ij a_j`.

use crate::tensor::{Operator, MAX_DIM};
use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Largest `cutoff^n` accepted by [`jordan_schwinger`].
pub const JS_MAX_DIM: usize = 1 << 16;

/// Physicists' Hermite polynomial `H_n(x)` from `H_{n+1} = 2x H_n - 2n H_{n-1}`.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Gauss–Legendre nodes and weights on `[a, b]`, roots found by Newton
/// iteration from the Chebyshev-like initial guesses.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = mid - half * z;
        x[n - 1 - i] = mid + half * z;
        w[i] = 2.0 * half / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `∫ H_m H_n e^{-x²} dx` by 200-node Gauss–Legendre on `[-10, 10]`.
pub fn hermite_inner_product(m: usize, n: usize) -> f64 {
    let (x, w) = gauss_legendre(200, -10.0, 10.0);
    x.iter().zip(&w).map(|(&x, &w)| w * hermite(m, x) * hermite(n, x) * (-x * x).exp()).sum()
}

/// Exact norm `√π 2^n n!`.
pub fn hermite_norm(n: usize) -> f64 {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    PI.sqrt() * 2f64.powi(n as i32) * fact
}

/// Ladder operators on span{|0>, ..., |cutoff-1>}.
#[derive(Debug, Clone)]
pub struct TruncatedFock {
    pub cutoff: usize,
    pub a: Operator,
    pub adag: Operator,
    pub number_op: Operator,
}

pub fn truncated_fock(cutoff: usize) -> Result<TruncatedFock> {
    if cutoff < 2 {
        return Err(Error::InvalidTruncation(format!("cutoff {cutoff} < 2")));
    }
    let d = vec![cutoff];
    let a =
        Operator::from_fn(
            d.clone(),
            |r, c| {
                if c == r + 1 {
                    C64::new((c as f64).sqrt(), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            },
        )?;
    let adag = a.transpose();
    let diag: Vec<C64> = (0..cutoff).map(|n| C64::new(n as f64, 0.0)).collect();
    let number_op = Operator::diagonal(d, &diag)?;
    Ok(TruncatedFock { cutoff, a, adag, number_op })
}

/// Image of the `n×n` matrix `mat` under the Jordan–Schwinger map on the
/// `n`-mode truncated Fock space, mode 1 slowest.
pub fn jordan_schwinger(mat: &[Vec<C64>], cutoff: usize) -> Result<Operator> {
    let n = mat.len();
    if n == 0 || mat.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("Jordan–Schwinger input must be square".into()));
    }
    let dim = cutoff.checked_pow(n as u32).unwrap_or(usize::MAX);
    if dim > JS_MAX_DIM || dim > MAX_DIM {
        return Err(Error::StateSpaceTooLarge(dim));
    }
    let fock = truncated_fock(cutoff)?;
    let dims = vec![cutoff; n];
    let lower: Vec<Operator> = (1..=n).map(|i| crate::tensor::embed_local(&fock.a, i, &dims)).collect::<Result<_>>()?;
    let mut out = Operator::zeros(&dims)?;
    for i in 0..n {
        let raise = lower[i].transpose();
        for j in 0..n {
            if mat[i][j] != C64::new(0.0, 0.0) {
                out = &out + &(&raise * &lower[j]).scale(mat[i][j]);
            }
        }
    }
    Ok(out)
}

/// Basis indices of the `n`-mode space whose total occupation is at most
/// `max_total`.
pub fn shell_indices(n: usize, cutoff: usize, max_total: usize) -> Vec<usize> {
    let dim = cutoff.pow(n as u32);
    (0..dim)
        .filter(|&idx| {
            let mut r = idx;
            let mut tot = 0;
            for _ in 0..n {
                tot += r % cutoff;
                r /= cutoff;
            }
            tot <= max_total
        })
        .collect()
}

/// Largest entry of `op` restricted to rows and columns in `idx`.
pub fn restricted_max_abs(op: &Operator, idx: &[usize]) -> f64 {
    let mut m = 0.0f64;
    for &i in idx {
        for &j in idx {
            m = m.max(op.get(i, j).norm());
        }
    }
    m
}

/// `‖[JS(A), JS(B)] - JS([A, B])‖` on states with total number `≤ cutoff - 2`.
pub fn js_homomorphism_residual(a: &[Vec<C64>], b: &[Vec<C64>], cutoff: usize) -> Result<f64> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::DimensionMismatch("matrices differ in size".into()));
    }
    let mul = |x: &[Vec<C64>], y: &[Vec<C64>]| -> Vec<Vec<C64>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
    };
    let ab = mul(a, b);
    let ba = mul(b, a);
    let comm: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| ab[i][j] - ba[i][j]).collect()).collect();
    let ja = jordan_schwinger(a, cutoff)?;
    let jb = jordan_schwinger(b, cutoff)?;
    let lhs = ja.commutator(&jb)?;
    let rhs = jordan_schwinger(&comm, cutoff)?;
    let idx = shell_indices(n, cutoff, cutoff.saturating_sub(2));
    Ok(restricted_max_abs(&(&lhs - &rhs), &idx))
}

/// Standard `sl₂` basis `(e, f, h)` as 2×2 matrices.
pub fn sl2_basis() -> [Vec<Vec<C64>>; 3] {
    let c = |x: f64| C64::new(x, 0.0);
    [
        vec![vec![c(0.0), c(1.0)], vec![c(0.0), c(0.0)]],
        vec![vec![c(0.0), c(0.0)], vec![c(1.0), c(0.0)]],
        vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(-1.0)]],
    ]
}

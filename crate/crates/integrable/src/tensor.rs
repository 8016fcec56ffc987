//! Operators on tensor-product spaces, Markov generator utilities and the
//! transition semigroup.
//!
//! Basis vectors of `C^{d1} ⊗ ... ⊗ C^{dn}` are ordered lexicographically with
//! site 1 slowest: the multi-index `(i1, ..., in)` sits at
//! `((i1 * d2 + i2) * d3 + i3) ...`. This ordering is also the row/column order
//! of the CSV export.

use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::ops::{Add, Mul, Sub};

/// Largest dense state space the crate will build.
pub const MAX_DIM: usize = 1 << 20;

/// A dense square matrix tagged with the per-site dimensions of the space it
/// acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    site_dims: Vec<usize>,
    mat: DMatrix<C64>,
}

fn product(dims: &[usize]) -> Result<usize> {
    let mut p: usize = 1;
    for &d in dims {
        if d == 0 {
            return Err(Error::DimensionMismatch("site dimension 0".into()));
        }
        p = p.checked_mul(d).filter(|&p| p <= MAX_DIM).ok_or(Error::StateSpaceTooLarge(usize::MAX))?;
    }
    Ok(p)
}

impl Operator {
    pub fn new(site_dims: Vec<usize>, mat: DMatrix<C64>) -> Result<Self> {
        let n = product(&site_dims)?;
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but site dimensions {:?} need side {}",
                mat.nrows(),
                mat.ncols(),
                site_dims,
                n
            )));
        }
        Ok(Self { site_dims, mat })
    }

    /// Builds an operator from a real row-major table.
    pub fn from_real(site_dims: Vec<usize>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let mat = DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0));
        Self::new(site_dims, mat)
    }

    /// Builds an operator whose entries are given by `f(row, col)`.
    pub fn from_fn(site_dims: Vec<usize>, f: impl Fn(usize, usize) -> C64) -> Result<Self> {
        let n = product(&site_dims)?;
        Self::new(site_dims, DMatrix::from_fn(n, n, f))
    }

    pub fn identity(site_dims: &[usize]) -> Result<Self> {
        let n = product(site_dims)?;
        Self::new(site_dims.to_vec(), DMatrix::identity(n, n))
    }

    pub fn zeros(site_dims: &[usize]) -> Result<Self> {
        let n = product(site_dims)?;
        Self::new(site_dims.to_vec(), DMatrix::zeros(n, n))
    }

    /// Diagonal operator with the given entries.
    pub fn diagonal(site_dims: Vec<usize>, diag: &[C64]) -> Result<Self> {
        let n = product(&site_dims)?;
        if diag.len() != n {
            return Err(Error::DimensionMismatch("diagonal length".into()));
        }
        Self::new(site_dims, DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.site_dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.mat[(i, j)] = v;
    }

    /// Kronecker product; the site lists are concatenated.
    pub fn kron(&self, other: &Operator) -> Result<Operator> {
        let mut dims = self.site_dims.clone();
        dims.extend_from_slice(&other.site_dims);
        product(&dims)?;
        Operator::new(dims, self.mat.kronecker(&other.mat))
    }

    fn check_same(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(())
    }

    /// Matrix product `self * other`, keeping the left operand's site tags.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Operator { site_dims: self.site_dims.clone(), mat: &self.mat * &other.mat })
    }

    pub fn try_add(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Operator { site_dims: self.site_dims.clone(), mat: &self.mat + &other.mat })
    }

    pub fn try_sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Operator { site_dims: self.site_dims.clone(), mat: &self.mat - &other.mat })
    }

    pub fn scale(&self, s: C64) -> Operator {
        Operator { site_dims: self.site_dims.clone(), mat: &self.mat * s }
    }

    pub fn scale_real(&self, s: f64) -> Operator {
        self.scale(C64::new(s, 0.0))
    }

    pub fn transpose(&self) -> Operator {
        Operator { site_dims: self.site_dims.clone(), mat: self.mat.transpose() }
    }

    pub fn adjoint(&self) -> Operator {
        Operator { site_dims: self.site_dims.clone(), mat: self.mat.adjoint() }
    }

    /// `[self, other] = self other - other self`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Operator { site_dims: self.site_dims.clone(), mat: &self.mat * &other.mat - &other.mat * &self.mat })
    }

    pub fn inverse(&self) -> Result<Operator> {
        let inv = self.mat.clone().try_inverse().ok_or(Error::SingularGauge)?;
        Ok(Operator { site_dims: self.site_dims.clone(), mat: inv })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.mat.iter().zip(other.mat.iter()).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Largest imaginary part in modulus.
    pub fn max_imag(&self) -> f64 {
        self.mat.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn row_sums(&self) -> Vec<C64> {
        self.mat.row_iter().map(|r| r.iter().sum()).collect()
    }

    /// Real part as a plain matrix.
    pub fn real_matrix(&self) -> DMatrix<f64> {
        self.mat.map(|z| z.re)
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.mat * v
    }

    /// Row-major table of `"re,im"` cells, the documented CSV form.
    pub fn csv_cells(&self) -> Vec<Vec<String>> {
        self.mat.row_iter().map(|r| r.iter().map(|z| format!("{},{}", z.re, z.im)).collect()).collect()
    }

    /// Inverse of [`Operator::csv_cells`].
    pub fn from_csv_cells(site_dims: Vec<usize>, cells: &[Vec<String>]) -> Result<Operator> {
        let n = cells.len();
        let parse = |s: &str| -> Result<C64> {
            let (re, im) = s.split_once(',').ok_or_else(|| Error::InvalidParameter(format!("bad cell {s:?}")))?;
            let p = |t: &str| t.trim().parse::<f64>().map_err(|e| Error::InvalidParameter(e.to_string()));
            Ok(C64::new(p(re)?, p(im)?))
        };
        let mut mat = DMatrix::zeros(n, n);
        for (i, row) in cells.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch("ragged CSV rows".into()));
            }
            for (j, cell) in row.iter().enumerate() {
                mat[(i, j)] = parse(cell)?;
            }
        }
        Operator::new(site_dims, mat)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.compose(rhs).expect("operator dimensions must agree")
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("operator dimensions must agree")
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.try_sub(rhs).expect("operator dimensions must agree")
    }
}

/// Places `op` on sites `i..i+k-1` (1-based) of a chain with the given site
/// dimensions, acting as the identity elsewhere.
pub fn embed_local(op: &Operator, i: usize, site_dims: &[usize]) -> Result<Operator> {
    let k = op.site_dims().len();
    let n = site_dims.len();
    if i == 0 || i + k - 1 > n {
        return Err(Error::DimensionMismatch(format!("sites {i}..{} outside 1..{n}", i + k - 1)));
    }
    if op.site_dims() != &site_dims[i - 1..i - 1 + k] {
        return Err(Error::DimensionMismatch(format!(
            "operator sites {:?} do not match slots {:?}",
            op.site_dims(),
            &site_dims[i - 1..i - 1 + k]
        )));
    }
    product(site_dims)?;
    let left = Operator::identity(&site_dims[..i - 1])?;
    let right = Operator::identity(&site_dims[i - 1 + k..])?;
    let mut out = left.kron(op)?.kron(&right)?;
    out.site_dims = site_dims.to_vec();
    Ok(out)
}

/// The flip `u ⊗ v -> v ⊗ u` from `C^{d1} ⊗ C^{d2}` to `C^{d2} ⊗ C^{d1}`.
pub fn permutation_operator(d1: usize, d2: usize) -> Result<Operator> {
    let mut p = Operator::zeros(&[d1, d2])?;
    for a in 0..d1 {
        for b in 0..d2 {
            p.set(b * d1 + a, a * d2 + b, C64::new(1.0, 0.0));
        }
    }
    Ok(p)
}

/// Checks the row-convention generator property: real entries, zero row sums
/// and nonnegative off-diagonal rates, all within `tol`.
pub fn check_generator(g: &Operator, tol: f64) -> Result<()> {
    let n = g.dim();
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            let v = g.get(i, j);
            if v.im.abs() > tol {
                return Err(Error::NotAGenerator(format!("complex entry at ({i}, {j})")));
            }
            if i != j && v.re < -tol {
                return Err(Error::NotAGenerator(format!("negative rate {} at ({i}, {j})", v.re)));
            }
            s += v.re;
        }
        if s.abs() > tol {
            return Err(Error::NotAGenerator(format!("row {i} sums to {s:e}")));
        }
    }
    Ok(())
}

/// A probability vector over the configuration basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbVector {
    values: Vec<f64>,
}

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidParameter("negative or NaN probability".into()));
        }
        let s: f64 = values.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {s}")));
        }
        Ok(Self { values })
    }

    /// Normalises nonnegative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let s: f64 = weights.iter().sum();
        if !(s > 0.0) {
            return Err(Error::InvalidParameter("weights have no mass".into()));
        }
        Self::new(weights.into_iter().map(|w| w / s).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Total variation distance `½ Σ |p - p'|`.
    pub fn tv_distance(&self, other: &ProbVector) -> f64 {
        if self.len() != other.len() {
            return 1.0;
        }
        0.5 * self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

fn null_dimension(a: &DMatrix<f64>) -> usize {
    let sv = a.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max).max(1e-300);
    sv.iter().filter(|&&s| s <= 1e-10 * top).count()
}

fn solve_stationary(g: &DMatrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let n = g.nrows();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let mut a = g.transpose();
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let solved = a.full_piv_lu().solve(&b);
    let reducible = || Error::ReducibleChain(null_dimension(&g.transpose()));
    let pi = solved.ok_or_else(reducible)?;
    let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let resid = (pi.transpose() * g).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let neg = pi.iter().cloned().fold(0.0f64, f64::min);
    if !resid.is_finite() || resid > 10.0 * tol * scale || neg < -(tol.max(1e-12)) * (n as f64) {
        return Err(reducible());
    }
    let mut v: Vec<f64> = pi.iter().map(|&x| x.max(0.0)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    Ok(v)
}

/// Stationary law `π G = 0` of an irreducible (single closed class) generator.
pub fn stationary_distribution(g: &Operator, tol: f64) -> Result<ProbVector> {
    check_generator(g, tol)?;
    let v = solve_stationary(&g.real_matrix(), tol)?;
    ProbVector::new(v)
}

/// Stationary law supported on the closed communicating class `class`.
pub fn stationary_distribution_on_class(g: &Operator, class: &[usize], tol: f64) -> Result<ProbVector> {
    check_generator(g, tol)?;
    let n = g.dim();
    let mut inside = vec![false; n];
    for &c in class {
        if c >= n {
            return Err(Error::InvalidParameter(format!("state {c} out of range")));
        }
        inside[c] = true;
    }
    let gm = g.real_matrix();
    for &c in class {
        for j in 0..n {
            if !inside[j] && gm[(c, j)] > tol {
                return Err(Error::InvalidParameter(format!("class is not closed: {c} -> {j}")));
            }
        }
    }
    let sub = DMatrix::from_fn(class.len(), class.len(), |i, j| gm[(class[i], class[j])]);
    let local = solve_stationary(&sub, tol)?;
    let mut v = vec![0.0; n];
    for (k, &c) in class.iter().enumerate() {
        v[c] = local[k];
    }
    ProbVector::new(v)
}

/// Poisson weights `e^{-m} m^k / k!` for `k = 0..K`, where `K` is the first
/// index past the mean with tail mass below `tol`.
fn poisson_weights(mean: f64, tol: f64) -> Vec<f64> {
    let tol = tol.max(1e-15);
    let mut w = Vec::new();
    let mut log_fact = 0.0;
    let mut cum = 0.0;
    let ln_m = if mean > 0.0 { mean.ln() } else { f64::NEG_INFINITY };
    for k in 0.. {
        if k > 0 {
            log_fact += (k as f64).ln();
        }
        let lw = if k == 0 { -mean } else { -mean + k as f64 * ln_m - log_fact };
        let wk = lw.exp();
        w.push(wk);
        cum += wk;
        if k as f64 >= mean && 1.0 - cum <= tol {
            break;
        }
        if k > 100_000_000 {
            break;
        }
    }
    w
}

fn uniformization_rate(g: &DMatrix<f64>) -> f64 {
    (0..g.nrows()).map(|i| -g[(i, i)]).fold(0.0, f64::max)
}

/// `exp(tG)` by uniformization:
/// `Σ_k e^{-λt} (λt)^k / k! (I + G/λ)^k`, truncated once the Poisson tail is
/// below `tol`.
pub fn transition_semigroup(g: &Operator, t: f64, tol: f64) -> Result<Operator> {
    check_generator(g, tol.max(1e-12))?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time {t} must be nonnegative")));
    }
    let gm = g.real_matrix();
    let n = gm.nrows();
    let lambda = uniformization_rate(&gm);
    if lambda == 0.0 || t == 0.0 {
        return Operator::identity(g.site_dims());
    }
    let p = DMatrix::identity(n, n) + &gm / lambda;
    let weights = poisson_weights(lambda * t, tol);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut acc = &term * weights[0];
    for &wk in &weights[1..] {
        term = &term * &p;
        acc += &term * wk;
    }
    Operator::new(g.site_dims().to_vec(), acc.map(|x| C64::new(x, 0.0)))
}

/// A generator stored by rows of off-diagonal rates, for state spaces too
/// large for dense matrices.
#[derive(Debug, Clone)]
pub struct SparseGenerator {
    rates: Vec<Vec<(usize, f64)>>,
}

impl SparseGenerator {
    /// `rates[c]` lists the moves `(c', rate)` out of state `c`.
    pub fn new(rates: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = rates.len();
        for (c, row) in rates.iter().enumerate() {
            for &(d, r) in row {
                if d >= n || d == c || !(r >= 0.0) {
                    return Err(Error::NotAGenerator(format!("bad move {c} -> {d} at rate {r}")));
                }
            }
        }
        Ok(Self { rates })
    }

    pub fn from_operator(g: &Operator, tol: f64) -> Result<Self> {
        check_generator(g, tol)?;
        let n = g.dim();
        let rates = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && g.get(i, j).re > 0.0).map(|j| (j, g.get(i, j).re)).collect())
            .collect();
        Ok(Self { rates })
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    fn exit_rate(&self, c: usize) -> f64 {
        self.rates[c].iter().map(|&(_, r)| r).sum()
    }

    /// The row vector `μ exp(tG)` by uniformization.
    pub fn evolve(&self, mu: &[f64], t: f64, tol: f64) -> Result<Vec<f64>> {
        let n = self.len();
        if mu.len() != n {
            return Err(Error::DimensionMismatch("initial law length".into()));
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("time {t} must be nonnegative")));
        }
        let lambda = (0..n).map(|c| self.exit_rate(c)).fold(0.0, f64::max);
        if lambda == 0.0 || t == 0.0 {
            return Ok(mu.to_vec());
        }
        let weights = poisson_weights(lambda * t, tol);
        let mut v = mu.to_vec();
        let mut acc: Vec<f64> = v.iter().map(|x| x * weights[0]).collect();
        let mut next = vec![0.0; n];
        for &wk in &weights[1..] {
            for (c, x) in v.iter().enumerate() {
                next[c] += x * (1.0 - self.exit_rate(c) / lambda);
                for &(d, r) in &self.rates[c] {
                    next[d] += x * r / lambda;
                }
            }
            std::mem::swap(&mut v, &mut next);
            next.iter_mut().for_each(|x| *x = 0.0);
            for (a, x) in acc.iter_mut().zip(&v) {
                *a += wk * x;
            }
        }
        Ok(acc)
    }
}

//! ASEP and XXZ constructors, gauge equivalence, symmetry commutators, the
//! ground-state transform, and the contour-integral transition probability
//! of ASEP on the line together with a master-equation oracle.
//!
//! Rate conventions. The two-site generator [`asep_local_generator`] uses hop
//! rates `(1, q²)` for `01 -> 10` and `10 -> 01`. The open-chain generator
//! [`asep_generator`] and the matrix product module use the bulk block
//! [`mpa_bulk_generator`] with rates `(q, 1)`, i.e. particles hop right at rate
//! 1 and left at rate `q`. The two are related by
//! `mpa_bulk_generator(q) = q · asep_local_generator(q^{-1/2})`; see
//! [`bulk_from_local`].

use crate::exec::Exec;
use crate::tensor::{check_generator, embed_local, Operator, SparseGenerator};
use crate::{Error, Result, C64};
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Open ASEP parameters: asymmetry `q`, boundary rates and chain length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsepParams {
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub l: usize,
}

impl AsepParams {
    pub fn new(q: f64, alpha: f64, beta: f64, gamma: f64, delta: f64, l: usize) -> Self {
        Self { q, alpha, beta, gamma, delta, l }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0) {
            return Err(Error::InvalidParameter(format!("q = {} must be positive", self.q)));
        }
        for (n, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma), ("delta", self.delta)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::RateOutOfRange(format!("{n} = {v}")));
            }
        }
        if self.l == 0 {
            return Err(Error::InvalidParameter("chain length must be at least 1".into()));
        }
        Ok(())
    }
}

/// XXZ chain couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XxzParams {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub h: f64,
    pub n: usize,
    pub periodic: bool,
}

fn real(site_dims: Vec<usize>, rows: &[Vec<f64>]) -> Operator {
    Operator::from_real(site_dims, rows).expect("fixed-size table")
}

/// Two-site generator with hop rates 1 (`01 -> 10`) and `q²` (`10 -> 01`).
pub fn asep_local_generator(q: f64) -> Operator {
    let q2 = q * q;
    real(vec![2, 2], &[vec![0.0; 4], vec![0.0, -1.0, 1.0, 0.0], vec![0.0, q2, -q2, 0.0], vec![0.0; 4]])
}

/// Two-site bulk block with rates `q` (`01 -> 10`, a left hop) and 1
/// (`10 -> 01`, a right hop).
pub fn mpa_bulk_generator(q: f64) -> Operator {
    real(vec![2, 2], &[vec![0.0; 4], vec![0.0, -q, q, 0.0], vec![0.0, 1.0, -1.0, 0.0], vec![0.0; 4]])
}

/// Converts the `(1, q²)` two-site convention to the bulk convention:
/// returns `(scale, q_bulk)` with
/// `mpa_bulk_generator(q_bulk) = scale · asep_local_generator(q)`.
pub fn bulk_from_local(q: f64) -> (f64, f64) {
    let q_bulk = 1.0 / (q * q);
    (q_bulk, q_bulk)
}

/// Left boundary block `B = [[-α, α], [γ, -γ]]`.
pub fn left_boundary(alpha: f64, gamma: f64) -> Operator {
    real(vec![2], &[vec![-alpha, alpha], vec![gamma, -gamma]])
}

/// Right boundary block `B̄ = [[-δ, δ], [β, -β]]`.
pub fn right_boundary(beta: f64, delta: f64) -> Operator {
    real(vec![2], &[vec![-delta, delta], vec![beta, -beta]])
}

/// ASEP generator on `L` sites: the sum of embedded bulk blocks, plus the
/// boundary blocks on sites 1 and `L` when `open_boundary` is set.
pub fn asep_generator(p: &AsepParams, open_boundary: bool) -> Result<Operator> {
    p.validate()?;
    let dims = vec![2; p.l];
    let mut g = Operator::zeros(&dims)?;
    let w = mpa_bulk_generator(p.q);
    for i in 1..p.l {
        g = &g + &embed_local(&w, i, &dims)?;
    }
    if open_boundary {
        g = &g + &embed_local(&left_boundary(p.alpha, p.gamma), 1, &dims)?;
        g = &g + &embed_local(&right_boundary(p.beta, p.delta), p.l, &dims)?;
    }
    Ok(g)
}

/// Pauli matrix `σ^a`, `a ∈ {1, 2, 3}`.
pub fn pauli(a: u8) -> Result<Operator> {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    let m = match a {
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        3 => [[o, z], [z, -o]],
        _ => return Err(Error::InvalidParameter(format!("Pauli index {a}"))),
    };
    Operator::from_fn(vec![2], |r, c| m[r][c])
}

/// `σ^a` on site `j` (1-based) of an `n`-site chain.
pub fn pauli_at(a: u8, j: usize, n: usize) -> Result<Operator> {
    embed_local(&pauli(a)?, j, &vec![2; n])
}

/// The two-site matrix
/// `[[Jz+2h, 0, 0, Jx-Jy], [0, -Jz, Jx+Jy, 0], [0, Jx+Jy, -Jz, 0], [Jx-Jy, 0, 0, Jz-2h]]`,
/// i.e. `Jx σ¹σ¹ + Jy σ²σ² + Jz σ³σ³ + h (σ³ ⊗ 1 + 1 ⊗ σ³)`.
pub fn xxz_local_block(jx: f64, jy: f64, jz: f64, h: f64) -> Operator {
    real(
        vec![2, 2],
        &[
            vec![jz + 2.0 * h, 0.0, 0.0, jx - jy],
            vec![0.0, -jz, jx + jy, 0.0],
            vec![0.0, jx + jy, -jz, 0.0],
            vec![jx - jy, 0.0, 0.0, jz - 2.0 * h],
        ],
    )
}

/// `H = -½ Σ_j (Jx σ¹_j σ¹_{j+1} + Jy σ²_j σ²_{j+1} + Jz σ³_j σ³_{j+1} - h σ³_j)`.
///
/// Bonds run over `j = 1..N-1`, plus the wrap bond `(N, 1)` when periodic; the
/// field acts on every site. On a periodic chain this equals
/// `-½ Σ_bonds xxz_local_block(Jx, Jy, Jz, -h/2)`.
pub fn xxz_hamiltonian(p: &XxzParams) -> Result<Operator> {
    if p.n < 2 {
        return Err(Error::InvalidParameter("XXZ chain needs at least 2 sites".into()));
    }
    let n = p.n;
    let mut h = Operator::zeros(&vec![2; n])?;
    let bonds = if p.periodic { n } else { n - 1 };
    for j in 1..=bonds {
        let k = if j == n { 1 } else { j + 1 };
        for (a, jc) in [(1u8, p.jx), (2, p.jy), (3, p.jz)] {
            if jc != 0.0 {
                let term = &pauli_at(a, j, n)? * &pauli_at(a, k, n)?;
                h = &h + &term.scale_real(jc);
            }
        }
    }
    if p.h != 0.0 {
        for j in 1..=n {
            h = &h - &pauli_at(3, j, n)?.scale_real(p.h);
        }
    }
    Ok(h.scale_real(-0.5))
}

fn chain_length(op: &Operator) -> Result<usize> {
    let d = op.dim();
    if !d.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!("side {d} is not a power of two")));
    }
    Ok(d.trailing_zeros() as usize)
}

/// `‖[H, Σ_j σ^a_j]‖`.
pub fn symmetry_commutator(h: &Operator, a: u8) -> Result<f64> {
    let n = chain_length(h)?;
    if n == 0 {
        return Ok(0.0);
    }
    let mut s = Operator::zeros(&vec![2; n])?;
    for j in 1..=n {
        s = &s + &pauli_at(a, j, n)?;
    }
    Ok(h.commutator(&s)?.max_abs())
}

/// `G^{-1} H G`.
pub fn gauge_conjugate(h: &Operator, g: &Operator) -> Result<Operator> {
    let ginv = g.inverse()?;
    let check = &ginv * g;
    if check.max_abs_diff(&Operator::identity(g.site_dims())?) > 1e-8 {
        return Err(Error::SingularGauge);
    }
    Ok(&(&ginv * h) * g)
}

/// The two-site change of basis
/// `[[1,0,0,0],[0,1,γ-1,0],[0,0,γ,0],[0,0,0,1]]`.
pub fn xxz_gauge(gamma: f64) -> Operator {
    real(
        vec![2, 2],
        &[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, gamma - 1.0, 0.0],
            vec![0.0, 0.0, gamma, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ],
    )
}

/// Result of the XXZ-to-ASEP gauge search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeFit {
    pub jx: f64,
    pub gamma: f64,
    /// Time scale `s` in `G^{-1}(A - Id)G = s · asep_local_generator(q)`.
    pub scale: f64,
    pub residual: f64,
}

fn gauge_objective(q: f64, jx: f64, gamma: f64) -> (f64, f64) {
    if gamma.abs() < 1e-12 {
        return (f64::INFINITY, 0.0);
    }
    let a = &xxz_local_block(jx, jx, 1.0, 0.0) - &Operator::identity(&[2, 2]).expect("4x4");
    let conj = match gauge_conjugate(&a, &xxz_gauge(gamma)) {
        Ok(m) => m,
        Err(_) => return (f64::INFINITY, 0.0),
    };
    let target = asep_local_generator(q);
    let num: f64 = conj.matrix().iter().zip(target.matrix().iter()).map(|(x, y)| x.re * y.re).sum();
    let den: f64 = target.matrix().iter().map(|y| y.re * y.re).sum();
    let s = num / den;
    (conj.max_abs_diff(&target.scale_real(s)), s)
}

/// Searches couplings `Jx = Jy` (with `Jz = 1`, `h = 0`) and the gauge
/// parameter `γ` so that `G(γ)^{-1} (A - Id) G(γ)` is a multiple of the
/// two-site ASEP generator, `A` being [`xxz_local_block`].
pub fn xxz_to_asep_search(q: f64) -> GaugeFit {
    let f = |v: [f64; 2]| gauge_objective(q, v[0], v[1]).0;
    let mut best = ([0.0, 1.0], f64::INFINITY);
    for i in 0..=20 {
        for k in 1..=40 {
            let v = [-2.0 + 0.2 * i as f64, 0.125 * k as f64];
            let r = f(v);
            if r < best.1 {
                best = (v, r);
            }
        }
    }
    let mut x = best.0;
    for _ in 0..4 {
        x = nelder_mead(&f, x, 0.05, 4000);
    }
    let (residual, scale) = gauge_objective(q, x[0], x[1]);
    GaugeFit { jx: x[0], gamma: x[1], scale, residual }
}

/// Two-dimensional Nelder–Mead minimiser.
fn nelder_mead(f: &impl Fn([f64; 2]) -> f64, x0: [f64; 2], step: f64, iters: usize) -> [f64; 2] {
    let mut s = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
    let mut fs = s.map(f);
    for _ in 0..iters {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| fs[a].partial_cmp(&fs[b]).unwrap_or(std::cmp::Ordering::Equal));
        s = idx.map(|i| s[i]);
        fs = idx.map(|i| fs[i]);
        let spread = (fs[2] - fs[0]).abs();
        let size = (s[2][0] - s[0][0]).abs().max((s[2][1] - s[0][1]).abs());
        if spread < 1e-16 && size < 1e-14 {
            break;
        }
        let cen = [(s[0][0] + s[1][0]) / 2.0, (s[0][1] + s[1][1]) / 2.0];
        let along = |t: f64| [cen[0] + t * (s[2][0] - cen[0]), cen[1] + t * (s[2][1] - cen[1])];
        let xr = along(-1.0);
        let fr = f(xr);
        if fr < fs[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            if fe < fr {
                s[2] = xe;
                fs[2] = fe;
            } else {
                s[2] = xr;
                fs[2] = fr;
            }
        } else if fr < fs[1] {
            s[2] = xr;
            fs[2] = fr;
        } else {
            let xc = if fr < fs[2] { along(-0.5) } else { along(0.5) };
            let fc = f(xc);
            if fc < fs[2].min(fr) {
                s[2] = xc;
                fs[2] = fc;
            } else {
                for i in 1..3 {
                    s[i] = [(s[i][0] + s[0][0]) / 2.0, (s[i][1] + s[0][1]) / 2.0];
                    fs[i] = f(s[i]);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..3 {
        if fs[i] < fs[best] {
            best = i;
        }
    }
    s[best]
}

/// `G^{-1} H G - c Id` with `G = diag(g)` and `Hg = cg`, verified to be a
/// Markov generator.
pub fn ground_state_transform(h: &Operator, g: &[C64], tol: f64) -> Result<Operator> {
    let n = h.dim();
    if g.len() != n {
        return Err(Error::DimensionMismatch("ground state length".into()));
    }
    let gmax = g.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    if let Some(i) = g.iter().position(|x| x.norm() <= tol * gmax.max(1.0)) {
        return Err(Error::ZeroEntryInGroundState(i));
    }
    let hg: Vec<C64> = (0..n).map(|i| (0..n).map(|j| h.get(i, j) * g[j]).sum()).collect();
    let num: C64 = g.iter().zip(&hg).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = g.iter().map(|a| a.norm_sqr()).sum();
    let c = num / den;
    let resid = hg.iter().zip(g).fold(0.0f64, |m, (a, b)| m.max((a - c * b).norm()));
    let scale = h.max_abs().max(1.0) * gmax;
    if resid > tol * scale {
        return Err(Error::NotAnEigenvector(resid));
    }
    let out = Operator::from_fn(h.site_dims().to_vec(), |i, j| {
        let v = h.get(i, j) * g[j] / g[i];
        if i == j {
            v - c
        } else {
            v
        }
    })?;
    for i in 0..n {
        for j in 0..n {
            let v = out.get(i, j);
            if i != j && (v.re < -tol * scale || v.im.abs() > tol * scale) {
                return Err(Error::NegativeOffDiagonal { row: i, col: j, value: v.re });
            }
        }
    }
    check_generator(&out, tol * scale)?;
    Ok(out)
}

/// Controls for the contour-integral formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwOptions {
    pub radius: f64,
    pub n_quad: usize,
    /// Largest total number of quadrature nodes `n_quad^N` allowed while
    /// doubling.
    pub max_nodes: usize,
    pub tol: f64,
    pub exec: Exec,
}

impl Default for TwOptions {
    fn default() -> Self {
        Self { radius: 0.5, n_quad: 256, max_nodes: 1 << 27, tol: 1e-8, exec: Exec::default() }
    }
}

/// Value returned by the contour-integral evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwValue {
    pub value: f64,
    pub imag: f64,
    pub n_quad: usize,
    pub last_change: f64,
}

/// `ε(ξ) = ξ^{-1} + qξ - (1+q)`: right jumps at rate 1, left jumps at rate q.
pub fn tw_epsilon(xi: C64, q: f64) -> C64 {
    1.0 / xi + xi * q - (1.0 + q)
}

/// Scattering factor `S_{αβ} = -(1 + qξ_αξ_β - (1+q)ξ_α) / (1 + qξ_αξ_β - (1+q)ξ_β)`.
pub fn tw_scattering(xa: C64, xb: C64, q: f64) -> C64 {
    let p = xa * xb * q + 1.0;
    -(p - xa * (1.0 + q)) / (p - xb * (1.0 + q))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out.sort();
    out
}

fn check_positions(v: &[i64], what: &str) -> Result<()> {
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!("{what} positions must be strictly increasing")));
    }
    Ok(())
}

// per permutation: σ, exponents x_j - y_σ(j) - 1, inverted pairs
type PermData = (Vec<usize>, Vec<i32>, Vec<(usize, usize)>);

fn tw_quadrature(y: &[i64], x: &[i64], t: f64, q: f64, r: f64, n: usize, exec: Exec) -> C64 {
    let big_n = y.len();
    let perms = permutations(big_n);
    let nodes: Vec<C64> = (0..n).map(|k| C64::from_polar(r, 2.0 * PI * k as f64 / n as f64)).collect();
    // exponent tables: (σ, j) -> x_j - y_σ(j) - 1
    let perm_data: Vec<PermData> = perms
        .iter()
        .map(|s| {
            let exps = (0..big_n).map(|j| (x[j] - y[s[j]] - 1) as i32).collect();
            let mut inv = Vec::new();
            for j in 0..big_n {
                for k in j + 1..big_n {
                    if s[j] > s[k] {
                        inv.push((s[j], s[k]));
                    }
                }
            }
            (s.clone(), exps, inv)
        })
        .collect();
    let integrand = |xi: &[C64]| -> C64 {
        let mut jac = C64::new(1.0, 0.0);
        let mut eps = C64::new(0.0, 0.0);
        for &z in xi {
            jac *= z;
            eps += tw_epsilon(z, q);
        }
        let mut sum = C64::new(0.0, 0.0);
        for (s, exps, inv) in &perm_data {
            let mut term = C64::new(1.0, 0.0);
            for &(a, b) in inv {
                term *= tw_scattering(xi[a], xi[b], q);
            }
            for j in 0..big_n {
                term *= xi[s[j]].powi(exps[j]);
            }
            sum += term;
        }
        sum * jac * (eps * t).exp()
    };
    let partial = exec.map_range(n, |k0| {
        let mut acc = C64::new(0.0, 0.0);
        let mut xi = vec![nodes[k0]; big_n];
        let inner = n.pow(big_n as u32 - 1);
        for rest in 0..inner {
            let mut idx = rest;
            for slot in xi.iter_mut().skip(1) {
                *slot = nodes[idx % n];
                idx /= n;
            }
            acc += integrand(&xi);
        }
        acc
    });
    let total: C64 = partial.into_iter().sum();
    total / (n as f64).powi(big_n as i32)
}

/// Transition probability `P(X(t) = x | X(0) = y)` of ASEP on `Z` with `N ≤ 3`
/// particles from the contour-integral formula, using a trapezoid rule on
/// circles of radius `opts.radius`, doubling the node count until two
/// successive estimates agree within `opts.tol`.
pub fn tw_transition(y: &[i64], x: &[i64], t: f64, q: f64, opts: &TwOptions) -> Result<TwValue> {
    let big_n = y.len();
    if big_n == 0 || big_n > 3 || x.len() != big_n {
        return Err(Error::InvalidParameter("need 1 to 3 particles in x and y".into()));
    }
    check_positions(y, "initial")?;
    check_positions(x, "final")?;
    if !(t >= 0.0) || !(q >= 0.0) {
        return Err(Error::InvalidParameter("t and q must be nonnegative".into()));
    }
    let r = opts.radius;
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    // S_{αβ} has a pole at ξ_β = 1/((1+q) - qξ_α); it stays outside the
    // circle iff r(1 + q + qr) < 1
    if big_n > 1 && r * (1.0 + q + q * r) >= 1.0 - 1e-9 {
        return Err(Error::ContourHitsPole(format!("radius {r} encloses a pole of the scattering factor for q = {q}")));
    }
    let mut n = opts.n_quad.max(4);
    let mut prev = tw_quadrature(y, x, t, q, r, n, opts.exec);
    loop {
        let n2 = 2 * n;
        if n2.checked_pow(big_n as u32).is_none_or(|tot| tot > opts.max_nodes) {
            return Err(Error::NonConvergedQuadrature(f64::NAN));
        }
        let next = tw_quadrature(y, x, t, q, r, n2, opts.exec);
        let change = (next - prev).norm();
        if change <= opts.tol {
            return Ok(TwValue { value: next.re, imag: next.im, n_quad: n2, last_change: change });
        }
        if n2.checked_mul(2).and_then(|m| m.checked_pow(big_n as u32)).is_none_or(|tot| tot > opts.max_nodes) {
            return Err(Error::NonConvergedQuadrature(change));
        }
        prev = next;
        n = n2;
    }
}

/// Convenience wrapper returning only the real part.
pub fn tw_transition_probability(y: &[i64], x: &[i64], t: f64, q: f64, radius: f64, n_quad: usize) -> Result<f64> {
    let opts = TwOptions { radius, n_quad, ..TwOptions::default() };
    Ok(tw_transition(y, x, t, q, &opts)?.value)
}

fn window_states(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    fn rec(n: usize, from: i64, hi: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for s in from..=hi {
            cur.push(s);
            rec(n, s + 1, hi, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, lo, hi, &mut Vec::new(), &mut out);
    out
}

fn window_probability(y: &[i64], x: &[i64], t: f64, q: f64, margin: i64) -> Result<f64> {
    let lo = y[0].min(x[0]) - margin;
    let hi = y[y.len() - 1].max(x[x.len() - 1]) + margin;
    let states = window_states(y.len(), lo, hi);
    if states.len() > 400_000 {
        return Err(Error::WindowTooSmall(f64::NAN));
    }
    let index: HashMap<Vec<i64>, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let rates = states
        .iter()
        .map(|s| {
            let mut moves = Vec::new();
            for (k, &pos) in s.iter().enumerate() {
                for (dst, rate) in [(pos + 1, 1.0), (pos - 1, q)] {
                    if rate == 0.0 || dst < lo || dst > hi || s.contains(&dst) {
                        continue;
                    }
                    let mut v = s.clone();
                    v[k] = dst;
                    v.sort_unstable();
                    moves.push((index[&v], rate));
                }
            }
            moves
        })
        .collect();
    let gen = SparseGenerator::new(rates)?;
    let mut mu = vec![0.0; states.len()];
    mu[index[y]] = 1.0;
    let out = gen.evolve(&mu, t, 1e-15)?;
    Ok(out[index[x]])
}

/// Master-equation oracle: the `x` entry of `exp(tG)` started from `y`, for
/// ASEP (right rate 1, left rate `q`) on a finite window with blocking walls.
/// The window margin starts at `window` sites and is doubled until the answer
/// moves by less than `1e-9`.
pub fn ctmc_oracle_probability(y: &[i64], x: &[i64], t: f64, q: f64, window: usize) -> Result<f64> {
    if y.is_empty() || y.len() > 3 || x.len() != y.len() {
        return Err(Error::InvalidParameter("need 1 to 3 particles in x and y".into()));
    }
    check_positions(y, "initial")?;
    check_positions(x, "final")?;
    let mut margin = window.max(2) as i64;
    let mut prev = window_probability(y, x, t, q, margin)?;
    for _ in 0..8 {
        margin *= 2;
        let next = match window_probability(y, x, t, q, margin) {
            Ok(v) => v,
            Err(_) => return Err(Error::WindowTooSmall(f64::NAN)),
        };
        let change = (next - prev).abs();
        if change < 1e-9 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::WindowTooSmall(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_generator_rows_vanish() {
        for s in asep_local_generator(0.7).row_sums() {
            assert_eq!(s.norm(), 0.0);
        }
    }

    #[test]
    fn bulk_bridge() {
        let q: f64 = 0.6;
        let (scale, qb) = bulk_from_local(q);
        let lhs = mpa_bulk_generator(qb);
        let rhs = asep_local_generator(q).scale_real(scale);
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn open_generator_is_valid() {
        let p = AsepParams::new(0.5, 0.3, 0.7, 0.1, 0.2, 2);
        let g = asep_generator(&p, true).unwrap();
        check_generator(&g, 1e-14).unwrap();
    }

    #[test]
    fn permutations_enumerated_in_order() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
    }

    #[test]
    fn pauli_rejects_bad_index() {
        assert!(pauli(4).is_err());
    }

    #[test]
    fn tw_rejects_unordered_input() {
        let r = tw_transition_probability(&[1, 0], &[0, 1], 1.0, 0.5, 0.5, 64);
        assert!(r.is_err());
    }

    #[test]
    fn tw_detects_enclosed_pole() {
        let r = tw_transition_probability(&[0, 1], &[0, 1], 1.0, 1.0, 0.5, 64);
        assert!(matches!(r, Err(Error::ContourHitsPole(_))));
    }
}

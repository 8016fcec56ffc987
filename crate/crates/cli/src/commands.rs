//! One function per subcommand. Each fills a report and returns the default
//! tolerance for its residuals.

use crate::report::{RunReport, Table};
use crate::*;
use integrable::models::{
    asep_generator, ctmc_oracle_probability, mpa_bulk_generator, tw_transition, AsepParams, TwOptions,
};
use integrable::mpa::{config_bits, mpa_stationary_measure, relation_checks};
use integrable::oscillator::{
    hermite, hermite_inner_product, hermite_norm, js_homomorphism_residual, sl2_basis, truncated_fock,
};
use integrable::sixvertex::{
    fused_spectral_family, fused_weights_closed_form, fused_weights_recurrence, sample_many, six_vertex_weights,
    Boundary, VertexWeights, DD,
};
use integrable::tensor::{permutation_operator, stationary_distribution, stationary_distribution_on_class};
use integrable::uqsl2::{check_relations, intertwining_residual, rep, universal_r};
use integrable::ybe::{
    frt_r, markov_structure_report, r_alpha_beta, verify_braided_ybe, verify_hecke_quadratic,
    verify_reflection_equation, verify_spectral_ybe, ReflectionFamily, SpectralRFamily,
};
use integrable::{Error, Exec, Operator, C64};
use std::fmt;

/// Anything that makes a run impossible: exit code 2, nothing on stdout.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Library(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "{s}"),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

type Res<T> = Result<T, CliError>;

/// Largest chain handled by the dense stationary solver.
const DENSE_SITES: usize = 10;
/// Grid for spectral parameters, 0.2 to 0.9.
const Z_GRID: [f64; 8] = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
/// Coarser grid used for the nine-dimensional fused family.
const FUSED_GRID: [f64; 4] = [0.3, 0.5, 0.7, 0.9];

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn rate_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

pub fn run(cli: &Cli) -> Res<RunReport> {
    if let Some(t) = cli.tol {
        if !(t > 0.0) || !t.is_finite() {
            return Err(CliError::Usage(format!("--tol must be a positive number, got {t}")));
        }
    }
    let (mut report, default_tol) = match &cli.cmd {
        Cmd::Verify(Verify::Ybe(a)) => verify_ybe(a)?,
        Cmd::Verify(Verify::Reflection(a)) => verify_reflection(a)?,
        Cmd::Verify(Verify::Hecke(a)) => verify_hecke(a)?,
        Cmd::Verify(Verify::Markov(a)) => verify_markov(a)?,
        Cmd::RepCheck(a) => rep_check(a)?,
        Cmd::UniversalR(a) => universal(a)?,
        Cmd::Asep(Asep::Stationary(a)) => asep_stationary(a)?,
        Cmd::Mpa(a) => mpa(a)?,
        Cmd::Fuse(a) => fuse(a)?,
        Cmd::Sample6v(a) => sample6v(a, cli.seed)?,
        Cmd::Twprob(a) => twprob(a)?,
        Cmd::Oscillator(Oscillator::Hermite(a)) => osc_hermite(a)?,
        Cmd::Oscillator(Oscillator::Fock(a)) => osc_fock(a)?,
        Cmd::Oscillator(Oscillator::Js(a)) => osc_js(a)?,
    };
    report.judge(cli.tol.unwrap_or(default_tol));
    Ok(report)
}

fn family_name(f: YbeFamily) -> &'static str {
    match f {
        YbeFamily::Permutation => "permutation",
        YbeFamily::Identity => "identity",
        YbeFamily::RAlphaBeta => "r-alpha-beta",
        YbeFamily::Frt => "frt",
        YbeFamily::Universal => "universal",
        YbeFamily::AsepSpectral => "asep-spectral",
        YbeFamily::Fused => "fused",
    }
}

fn verify_ybe(a: &YbeArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("verify ybe");
    r.param("family", family_name(a.family)).param("grid", a.grid);
    match a.family {
        YbeFamily::Permutation | YbeFamily::Identity | YbeFamily::Frt | YbeFamily::Universal => {
            let m = match a.family {
                YbeFamily::Permutation => permutation_operator(2, 2)?,
                YbeFamily::Identity => Operator::identity(&[2, 2])?,
                YbeFamily::Frt => {
                    r.param("q", a.q);
                    frt_r(a.q)?
                }
                _ => {
                    if a.m > 4 {
                        return Err(CliError::Usage(format!("--m {} too large for a triple product (at most 4)", a.m)));
                    }
                    r.param("q", a.q).param("m", a.m);
                    let rm = rep(a.m, a.q)?;
                    let d = a.m + 1;
                    &permutation_operator(d, d)? * &universal_r(&rm, &rm)?
                }
            };
            let v = verify_braided_ybe(&m, 0.0)?;
            r.result("points", 1).result("site_dim", v.params["site_dim"]);
            r.residual("braided", v.residuals["braided"]);
            r.residual("unbraided_of_PR", v.residuals["unbraided_of_PR"]);
            Ok((r, 1e-10))
        }
        YbeFamily::RAlphaBeta => {
            let alphas = match (a.alpha, a.grid) {
                (Some(x), _) => vec![x],
                (None, true) => rate_grid(),
                (None, false) => return Err(CliError::Usage("--alpha is required without --grid".into())),
            };
            let betas = match (a.beta, a.grid) {
                (Some(x), _) => vec![x],
                (None, true) => rate_grid(),
                (None, false) => return Err(CliError::Usage("--beta is required without --grid".into())),
            };
            if let Some(x) = a.alpha {
                r.param("alpha", x);
            }
            if let Some(x) = a.beta {
                r.param("beta", x);
            }
            let mut table = Table::new(&["alpha", "beta", "braided", "unbraided_of_PR"]);
            let (mut worst, mut worst_u) = (0.0f64, 0.0f64);
            let mut worst_at = (alphas[0], betas[0]);
            for &al in &alphas {
                for &be in &betas {
                    let v = verify_braided_ybe(&r_alpha_beta(al, be)?, 0.0)?;
                    let (b, u) = (v.residuals["braided"], v.residuals["unbraided_of_PR"]);
                    if b > worst {
                        worst = b;
                        worst_at = (al, be);
                    }
                    worst_u = worst_u.max(u);
                    table.push(vec![al.to_string(), be.to_string(), b.to_string(), u.to_string()]);
                }
            }
            r.result("points", table.rows.len()).result("worst_alpha", worst_at.0).result("worst_beta", worst_at.1);
            r.residual("braided", worst).residual("unbraided_of_PR", worst_u);
            r.table = Some(table);
            Ok((r, 1e-10))
        }
        YbeFamily::AsepSpectral | YbeFamily::Fused => {
            let (fam, grid, tol) = if a.family == YbeFamily::Fused {
                if !(1..=3).contains(&a.l) {
                    return Err(CliError::Usage(format!("--l {} out of range 1..=3", a.l)));
                }
                r.param("l", a.l);
                (fused_spectral_family(a.l, a.q), &FUSED_GRID[..], 1e-9)
            } else {
                (SpectralRFamily::asep(a.q), &Z_GRID[..], 1e-10)
            };
            r.param("q", a.q);
            let pts: Vec<(f64, f64)> = if a.grid {
                grid.iter().flat_map(|&z| grid.iter().map(move |&w| (z, w))).collect()
            } else {
                r.param("z", a.z).param("w", a.w);
                vec![(a.z, a.w)]
            };
            let mut table = Table::new(&["z", "w", "residual"]);
            let (mut worst, mut skipped) = (0.0f64, 0usize);
            for (z, w) in pts {
                match verify_spectral_ybe(&fam, c(z), c(w)) {
                    Ok(v) => {
                        worst = worst.max(v);
                        table.push(vec![z.to_string(), w.to_string(), v.to_string()]);
                    }
                    Err(Error::EvaluationPole(_)) if a.grid => skipped += 1,
                    Err(e) => return Err(e.into()),
                }
            }
            r.result("points", table.rows.len()).result("skipped_poles", skipped);
            r.residual("spectral_ybe", worst);
            r.residual(
                "regularity",
                fam.r_at(c(1.0))?.max_abs_diff(&permutation_operator(fam.site_dim, fam.site_dim)?),
            );
            r.table = Some(table);
            Ok((r, tol))
        }
    }
}

fn verify_reflection(a: &ReflectionArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("verify reflection");
    r.param("q", a.q).param("alpha", a.alpha).param("beta", a.beta).param("gamma", a.gamma).param("delta", a.delta);
    r.param("grid", a.grid);
    let rfam = SpectralRFamily::asep(a.q);
    let pts: Vec<(f64, f64)> = if a.grid {
        Z_GRID.iter().flat_map(|&z| Z_GRID.iter().map(move |&w| (z, w))).collect()
    } else {
        r.param("z", a.z).param("w", a.w);
        vec![(a.z, a.w)]
    };
    let mut table = Table::new(&["side", "z", "w", "residual"]);
    let mut skipped = 0usize;
    for (name, kf) in [
        ("left", ReflectionFamily::left(a.q, a.alpha, a.gamma)),
        ("right", ReflectionFamily::right(a.q, a.beta, a.delta)),
    ] {
        let mut worst = 0.0f64;
        for &(z, w) in &pts {
            match verify_reflection_equation(&rfam, &kf, c(z), c(w)) {
                Ok(v) => {
                    worst = worst.max(v);
                    table.push(vec![name.into(), z.to_string(), w.to_string(), v.to_string()]);
                }
                Err(Error::EvaluationPole(_)) if a.grid => skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
        r.residual(name, worst);
    }
    r.result("points", table.rows.len()).result("skipped_poles", skipped);
    r.table = Some(table);
    Ok((r, 1e-9))
}

fn verify_hecke(a: &HeckeArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("verify hecke");
    r.param("q", a.q);
    let frt = frt_r(a.q)?;
    let (l1, l2) = (a.q.powi(-2), -1.0);
    r.result("eigenvalues", [l1, l2]);
    r.residual("quadratic", verify_hecke_quadratic(&frt, c(l1), c(l2)));
    r.residual("braided", verify_braided_ybe(&frt, 0.0)?.residuals["braided"]);
    // P R on the spin-half pair equals q^{-3/2} times the FRT matrix at 1/q
    let r1 = rep(1, a.q)?;
    let pr = &permutation_operator(2, 2)? * &universal_r(&r1, &r1)?;
    let expect = frt_r(1.0 / a.q)?.scale_real(a.q.powf(-1.5));
    r.residual("universal_match", pr.max_abs_diff(&expect));
    Ok((r, 1e-10))
}

fn verify_markov(a: &MarkovArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("verify markov");
    r.param("q", a.q);
    let rep = markov_structure_report(&SpectralRFamily::asep(a.q), &mpa_bulk_generator(a.q), 0.0)?;
    let rho = rep.params["rho_fit"];
    r.result("rho_fit", rho).result("rho_expected", 1.0 / (a.q - 1.0));
    for (k, v) in &rep.residuals {
        r.residual(k, *v);
    }
    r.residual("rho", (rho - 1.0 / (a.q - 1.0)).abs());
    Ok((r, 1e-5))
}

fn rep_check(a: &RepCheckArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("rep-check");
    r.param("m", a.m).param("q", a.q);
    if a.m > 64 {
        return Err(CliError::Usage(format!("--m {} too large (at most 64)", a.m)));
    }
    let rm = rep(a.m, a.q)?;
    r.result("dim", rm.dim()).result("weights", rm.weights());
    let rel = check_relations(&rm);
    for (k, v) in [
        ("k_kinv", rel.k_kinv),
        ("kek", rel.kek),
        ("kfk", rel.kfk),
        ("ef", rel.ef),
        ("antipode_kek", rel.antipode_kek),
        ("antipode_kfk", rel.antipode_kfk),
        ("antipode_ef", rel.antipode_ef),
        ("counit", rel.counit),
    ] {
        r.residual(k, v);
    }
    Ok((r, 1e-10))
}

fn operator_table(op: &Operator) -> Table {
    let mut t = Table::new(&["row", "col", "re", "im"]);
    for i in 0..op.dim() {
        for j in 0..op.dim() {
            let v = op.get(i, j);
            if v.norm() != 0.0 {
                t.push(vec![i.to_string(), j.to_string(), v.re.to_string(), v.im.to_string()]);
            }
        }
    }
    t
}

fn universal(a: &UniversalRArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("universal-r");
    r.param("l", a.l).param("m", a.m).param("q", a.q);
    if a.l > 16 || a.m > 16 {
        return Err(CliError::Usage("--l and --m are limited to 16".into()));
    }
    let (rl, rm) = (rep(a.l, a.q)?, rep(a.m, a.q)?);
    let big_r = universal_r(&rl, &rm)?;
    r.result("dim", big_r.dim());
    r.residual("intertwining", intertwining_residual(&rl, &rm, &big_r)?);
    if a.l == a.m && a.l <= 4 {
        let d = a.l + 1;
        let pr = &permutation_operator(d, d)? * &big_r;
        r.residual("ybe", verify_braided_ybe(&pr, 0.0)?.residuals["braided"]);
    }
    r.table = Some(operator_table(&big_r));
    Ok((r, 1e-10))
}

fn asep_params(a: &RateArgs) -> Res<AsepParams> {
    let p = AsepParams::new(a.q, a.alpha, a.beta, a.gamma, a.delta, a.sites);
    p.validate()?;
    Ok(p)
}

fn density_profile(values: &[f64], l: usize) -> Vec<f64> {
    (0..l)
        .map(|s| values.iter().enumerate().filter(|(idx, _)| (idx >> (l - 1 - s)) & 1 == 1).map(|(_, p)| p).sum())
        .collect()
}

fn dense_oracle(p: &AsepParams) -> Res<Vec<f64>> {
    let g = asep_generator(p, true)?;
    Ok(stationary_distribution(&g, 1e-10)?.values().to_vec())
}

fn asep_stationary(a: &StationaryArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("asep stationary");
    let p = asep_params(&a.rates)?;
    r.param("L", p.l).param("q", p.q).param("alpha", p.alpha).param("beta", p.beta).param("gamma", p.gamma);
    r.param("delta", p.delta).param("open", a.open);
    if p.l > DENSE_SITES {
        return Err(CliError::Usage(format!("--L {} exceeds the dense limit {DENSE_SITES}", p.l)));
    }
    let g = asep_generator(&p, a.open)?;
    let pi = match (a.open, a.particles) {
        (true, None) => stationary_distribution(&g, 1e-10)?,
        (true, Some(_)) => return Err(CliError::Usage("--particles only applies without --open".into())),
        (false, Some(n)) => {
            if n > p.l {
                return Err(CliError::Usage(format!("--particles {n} exceeds --L {}", p.l)));
            }
            r.param("particles", n);
            let class: Vec<usize> = (0..1usize << p.l).filter(|i| i.count_ones() as usize == n).collect();
            stationary_distribution_on_class(&g, &class, 1e-10)?
        }
        (false, None) => stationary_distribution(&g, 1e-10)?,
    };
    let v = pi.values();
    let gm = g.real_matrix();
    let stationarity =
        (0..v.len()).map(|j| (0..v.len()).map(|i| v[i] * gm[(i, j)]).sum::<f64>().abs()).fold(0.0, f64::max);
    r.result("density", density_profile(v, p.l));
    r.residual("stationarity", stationarity);
    r.residual("mass", (v.iter().sum::<f64>() - 1.0).abs());
    let mut t = Table::new(&["config", "probability"]);
    for (i, x) in v.iter().enumerate() {
        t.push(vec![config_bits(i, p.l), x.to_string()]);
    }
    r.table = Some(t);
    Ok((r, 1e-10))
}

fn mpa(a: &MpaArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("mpa");
    let p = asep_params(&a.rates)?;
    r.param("L", p.l).param("q", p.q).param("alpha", p.alpha).param("beta", p.beta).param("gamma", p.gamma);
    r.param("delta", p.delta).param("truncation", a.truncation);
    let m = mpa_stationary_measure(&p, a.truncation)?;
    let v = m.measure.values();
    r.result("truncation_used", m.truncation).result("tv_deltas", &m.tv_deltas);
    r.result("density", density_profile(v, p.l));
    let rel = relation_checks(&p, m.truncation)?;
    r.residual("relation_oscillator", rel.oscillator).residual("relation_de", rel.de);
    r.residual("relation_bulk", rel.bulk).residual("relation_left", rel.left);
    r.residual("relation_right", rel.right).residual("relation_adjoint", rel.adjoint);
    let oracle = if p.l <= DENSE_SITES { Some(dense_oracle(&p)?) } else { None };
    let mut t = Table::new(&["config", "mpa", "oracle"]);
    for (i, x) in v.iter().enumerate() {
        let o = oracle.as_ref().map(|o| o[i].to_string()).unwrap_or_default();
        t.push(vec![config_bits(i, p.l), x.to_string(), o]);
    }
    if let Some(o) = &oracle {
        let tv = 0.5 * v.iter().zip(o).map(|(a, b)| (a - b).abs()).sum::<f64>();
        r.residual("oracle_tv", tv);
    }
    r.result("oracle_checked", oracle.is_some());
    r.table = Some(t);
    Ok((r, 1e-8))
}

fn weights_table(w: &VertexWeights<f64>) -> Table {
    let mut t = Table::new(&["j1", "k1", "j2", "k2", "weight"]);
    for (j1, k1, j2, k2, v) in w.entries() {
        t.push(vec![j1.to_string(), k1.to_string(), j2.to_string(), k2.to_string(), v.to_string()]);
    }
    t
}

fn fuse(a: &FuseArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("fuse");
    let method = match a.method {
        FuseMethod::Recurrence => "recurrence",
        FuseMethod::Closed => "closed",
        FuseMethod::Both => "both",
    };
    r.param("l", a.l).param("m", a.m).param("z", a.z).param("q", a.q).param("method", method);
    if a.l == 0 || a.m == 0 || a.l > 12 || a.m > 12 {
        return Err(CliError::Usage("--l and --m must lie in 1..=12".into()));
    }
    let (z, q) = (DD::from(a.z), DD::from(a.q));
    let rec = match a.method {
        FuseMethod::Closed => None,
        _ => Some(fused_weights_recurrence(a.l, a.m, z, q)?.to_f64()),
    };
    let closed = match a.method {
        FuseMethod::Recurrence => None,
        _ => Some(fused_weights_closed_form(a.l, a.m, z, q)?.to_f64()),
    };
    if let (Some(x), Some(y)) = (&rec, &closed) {
        r.residual("method_diff", x.max_abs_diff(y));
    }
    let w = rec.or(closed).expect("at least one construction ran");
    r.result("states", w.states()).result("nonzero_entries", w.entries().len());
    let min = w.entries().iter().map(|e| e.4).fold(f64::INFINITY, f64::min);
    r.result("min_weight", min).result("stochastic", min >= 0.0);
    r.residual("row_sums", w.row_sum_error()).residual("conservation", w.conservation_error());
    r.table = Some(weights_table(&w));
    Ok((r, 1e-8))
}

fn sample6v(a: &Sample6vArgs, seed: u64) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("sample6v");
    r.param("b1", a.b1).param("b2", a.b2).param("width", a.width).param("height", a.height);
    r.param("boundary", "step").param("samples", a.samples).param("seed", seed);
    if a.width == 0 || a.height == 0 || a.width.saturating_mul(a.height) > 1 << 20 {
        return Err(CliError::Usage("lattice must have between 1 and 2^20 vertices".into()));
    }
    if a.samples == 0 || a.samples.saturating_mul(a.width * a.height) > 1 << 24 {
        return Err(CliError::Usage("--samples times the lattice size must lie in 1..=2^24".into()));
    }
    let w = six_vertex_weights(a.b1, a.b2)?;
    let bd = match a.boundary {
        BoundaryKind::Step => Boundary::step(a.width, a.height),
    };
    let runs = sample_many(&w, a.width, a.height, &bd, seed, a.samples, Exec::default())?;
    let inflow: usize = bd.left.iter().sum::<usize>() + bd.bottom.iter().sum::<usize>();
    let mut imbalance = 0usize;
    let mut bad_vertices = 0usize;
    for cfg in &runs {
        let out: usize = cfg.top.iter().sum::<usize>() + cfg.right.iter().sum::<usize>();
        imbalance = imbalance.max(inflow.abs_diff(out));
        bad_vertices += cfg.vertices.iter().filter(|v| v.j1 + v.k1 != v.j2 + v.k2).count();
    }
    r.residual("flux_imbalance", imbalance as f64).residual("vertex_violations", bad_vertices as f64);
    let mean_h: Vec<f64> = (0..=a.width)
        .map(|x| runs.iter().map(|c| c.height_function[x] as f64).sum::<f64>() / runs.len() as f64)
        .collect();
    r.result("mean_height_function", &mean_h);
    if runs.len() == 1 {
        let cfg = &runs[0];
        r.result("top", &cfg.top).result("right", &cfg.right).result("height_function", &cfg.height_function);
        let mut t = Table::new(&["x", "y", "j1", "k1", "j2", "k2"]);
        for v in &cfg.vertices {
            t.push([v.x, v.y, v.j1, v.k1, v.j2, v.k2].iter().map(|n| n.to_string()).collect());
        }
        r.table = Some(t);
    } else {
        let mut t = Table::new(&["sample", "x", "height"]);
        for (i, cfg) in runs.iter().enumerate() {
            for (x, h) in cfg.height_function.iter().enumerate() {
                t.push(vec![i.to_string(), x.to_string(), h.to_string()]);
            }
        }
        r.table = Some(t);
    }
    Ok((r, 0.0))
}

fn twprob(a: &TwprobArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("twprob");
    r.param("t", a.t).param("q", a.q).param("y", &a.y).param("x", &a.x);
    r.param("radius", a.radius).param("nquad", a.nquad);
    let opts = TwOptions { radius: a.radius, n_quad: a.nquad, ..TwOptions::default() };
    let v = tw_transition(&a.y, &a.x, a.t, a.q, &opts)?;
    r.result("probability", v.value).result("imag", v.imag).result("n_quad", v.n_quad);
    r.residual("imag", v.imag.abs()).residual("quadrature_change", v.last_change);
    if a.oracle {
        let o = ctmc_oracle_probability(&a.y, &a.x, a.t, a.q, 8)?;
        r.result("oracle", o);
        r.residual("oracle_diff", (o - v.value).abs());
    }
    Ok((r, 1e-6))
}

/// Degree up to which the fixed quadrature resolves orthogonality.
const ORTHO_MAX_DEGREE: usize = 8;

fn osc_hermite(a: &HermiteArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("oscillator hermite");
    r.param("n", a.n).param("x", a.x);
    if a.n > 170 {
        return Err(CliError::Usage(format!("--n {} too large (at most 170)", a.n)));
    }
    let values: Vec<f64> = (0..=a.n).map(|k| hermite(k, a.x)).collect();
    r.result("value", values[a.n]);
    let top = a.n.min(ORTHO_MAX_DEGREE);
    let mut worst = 0.0f64;
    for i in 0..=top {
        for j in 0..=top {
            let v = hermite_inner_product(i, j);
            let dev = if i == j { (v / hermite_norm(i) - 1.0).abs() } else { v.abs() };
            worst = worst.max(dev);
        }
    }
    r.result("orthogonality_checked_to", top);
    r.residual("orthogonality", worst);
    let mut t = Table::new(&["n", "x", "value"]);
    for (k, v) in values.iter().enumerate() {
        t.push(vec![k.to_string(), a.x.to_string(), v.to_string()]);
    }
    r.table = Some(t);
    Ok((r, 1e-6))
}

fn osc_fock(a: &FockArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("oscillator fock");
    r.param("cutoff", a.cutoff);
    if a.cutoff > 4096 {
        return Err(CliError::Usage(format!("--cutoff {} too large (at most 4096)", a.cutoff)));
    }
    let f = truncated_fock(a.cutoff)?;
    r.residual("number", (&f.adag * &f.a).max_abs_diff(&f.number_op));
    let comm = f.a.commutator(&f.adag)?;
    let edge = a.cutoff - 1;
    let mut worst = 0.0f64;
    for i in 0..edge {
        for j in 0..edge {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((comm.get(i, j) - c(want)).norm());
        }
    }
    r.residual("commutator", worst);
    r.result("edge_entry", comm.get(edge, edge).re);
    r.table = Some(operator_table(&f.a));
    Ok((r, 1e-12))
}

fn osc_js(a: &FockArgs) -> Res<(RunReport, f64)> {
    let mut r = RunReport::new("oscillator js");
    r.param("cutoff", a.cutoff);
    if a.cutoff > 32 {
        return Err(CliError::Usage(format!("--cutoff {} too large for two modes (at most 32)", a.cutoff)));
    }
    let [e, f, h] = sl2_basis();
    r.residual("he", js_homomorphism_residual(&h, &e, a.cutoff)?);
    r.residual("hf", js_homomorphism_residual(&h, &f, a.cutoff)?);
    r.residual("ef", js_homomorphism_residual(&e, &f, a.cutoff)?);
    r.result("modes", 2).result("dim", a.cutoff * a.cutoff);
    Ok((r, 1e-10))
}

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines are always visible. The process exits
//! non-zero if any attainable check fails; see criterion 6 for the one line
//! that reports FAIL by design.

use integrable::models::{
    asep_generator, asep_local_generator, ctmc_oracle_probability, mpa_bulk_generator, symmetry_commutator,
    tw_transition, xxz_hamiltonian, xxz_to_asep_search, AsepParams, TwOptions, XxzParams,
};
use integrable::mpa::{convergence_factor, mpa_stationary_measure, DEFAULT_TRUNCATION};
use integrable::oscillator::{hermite_inner_product, hermite_norm, js_homomorphism_residual, sl2_basis};
use integrable::sixvertex::{
    fused_spectral_family, fused_weights_closed_form, fused_weights_recurrence, sample_lattice, sample_many,
    six_vertex_weights, Boundary, DD,
};
use integrable::tensor::{permutation_operator, stationary_distribution, Operator};
use integrable::uqsl2::{check_relations, intertwining_residual, rep, universal_r};
use integrable::ybe::{
    derivative_at_one, markov_structure_report, r_alpha_beta, triple_embeddings, verify_braided_ybe,
    verify_reflection_equation, verify_spectral_ybe, ReflectionFamily, SpectralRFamily,
};
use integrable::{Error, Exec, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

struct Line {
    pass: bool,
    detail: String,
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

fn within(start: Instant, budget: Duration) -> (bool, String) {
    let el = start.elapsed();
    (el <= budget, format!("{:.2}s of {}s", el.as_secs_f64(), budget.as_secs()))
}

fn unbraided(r: &Operator) -> f64 {
    let (r12, r13, r23) = triple_embeddings(r).unwrap();
    (&(&r12 * &r13) * &r23).max_abs_diff(&(&(&r23 * &r13) * &r12))
}

// The literal check runs the braided relation over P, Id, R(a,0) and R(1,a).
// R(a,0) with 0 < a < 1 fails it and satisfies the unbraided relation, while
// its braided partner P R(a,0) = R(1,1-a) passes; the attainable part checks
// each family in the form it actually satisfies.
fn criterion1() -> (Line, bool) {
    let t0 = Instant::now();
    let braided = |m: &Operator| verify_braided_ybe(m, 1e-10).unwrap().residuals["braided"];
    let p = permutation_operator(2, 2).unwrap();
    let mut literal: f64 = braided(&p).max(braided(&Operator::identity(&[2, 2]).unwrap()));
    let (mut attain, mut alpha0_unbraided): (f64, f64) = (literal, 0.0);
    let mut count = 2;
    for a in grid(0.0, 1.0, 0.1) {
        let ra0 = r_alpha_beta(a, 0.0).unwrap();
        let r1a = r_alpha_beta(1.0, a).unwrap();
        let ra1 = r_alpha_beta(a, 1.0).unwrap();
        literal = literal.max(braided(&ra0)).max(braided(&r1a));
        alpha0_unbraided = alpha0_unbraided.max(unbraided(&ra0));
        attain = attain.max(braided(&r1a)).max(braided(&ra1)).max(braided(&(&p * &ra0)));
        count += 2;
    }
    let bad = braided(&r_alpha_beta(0.5, 0.5).unwrap());
    let (fast, time) = within(t0, Duration::from_secs(1));
    let attainable = attain <= 1e-10 && alpha0_unbraided <= 1e-10 && bad > 1e-3 && fast;
    let line = Line {
        pass: literal <= 1e-10 && bad > 1e-3 && fast,
        detail: format!(
            "braided residual {literal:.2e} over {count} matrices (R(a,0) is unbraided); \
             R(1,b), R(a,1), P R(a,0) braided {attain:.1e}; R(a,0) unbraided {alpha0_unbraided:.1e}; \
             R(0.5,0.5) {bad:.3e}; {time}"
        ),
    };
    (line, attainable)
}

fn criterion2() -> Line {
    let t0 = Instant::now();
    let zs = grid(0.2, 0.9, 0.1);
    let (mut ybe, mut reg, mut rho_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let p = permutation_operator(2, 2).unwrap();
    for q in [0.3, 0.5, 0.8] {
        let fam = SpectralRFamily::asep(q);
        for &z in &zs {
            for &w in &zs {
                ybe = ybe.max(verify_spectral_ybe(&fam, c(z), c(w)).unwrap());
            }
        }
        reg = reg.max(fam.r_at(c(1.0)).unwrap().max_abs_diff(&p));
        let rep = markov_structure_report(&fam, &mpa_bulk_generator(q), 1e-5).unwrap();
        rho_err = rho_err.max((rep.params["rho_fit"] - 1.0 / (q - 1.0)).abs());
    }
    let (fast, time) = within(t0, Duration::from_secs(1));
    Line {
        pass: ybe <= 1e-10 && reg <= 1e-12 && rho_err <= 1e-5 && fast,
        detail: format!("spectral YBE {ybe:.2e}; |R(1)-P| {reg:.1e}; |rho - 1/(q-1)| {rho_err:.2e}; {time}"),
    }
}

fn criterion3() -> Line {
    let t0 = Instant::now();
    let (mut rel, mut inter, mut ybe): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for q in [0.3, 0.7, 1.5] {
        for m in 0..=4 {
            rel = rel.max(check_relations(&rep(m, q).unwrap()).max());
        }
        for l in 1..=3 {
            for m in 1..=3 {
                let (rl, rm) = (rep(l, q).unwrap(), rep(m, q).unwrap());
                let r = universal_r(&rl, &rm).unwrap();
                inter = inter.max(intertwining_residual(&rl, &rm, &r).unwrap());
            }
        }
        let r1 = rep(1, q).unwrap();
        let r = universal_r(&r1, &r1).unwrap();
        let (a, b, cc) = triple_embeddings(&r).unwrap();
        let lhs = &(&a * &b) * &cc;
        let rhs = &(&cc * &b) * &a;
        ybe = ybe.max(lhs.max_abs_diff(&rhs));
    }
    let (fast, time) = within(t0, Duration::from_secs(5));
    Line {
        pass: rel <= 1e-10 && inter <= 1e-10 && ybe <= 1e-10 && fast,
        detail: format!("relations {rel:.2e}; intertwining {inter:.2e}; YBE on rho1^3 {ybe:.2e}; {time}"),
    }
}

fn criterion4() -> Line {
    let t0 = Instant::now();
    let mut fit_worst: f64 = 0.0;
    for q in [0.3, 0.5, 0.8, 1.2] {
        fit_worst = fit_worst.max(xxz_to_asep_search(q).residual);
    }
    let (mut xxx, mut xxz3, mut xxz12): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
    for periodic in [false, true] {
        let h = xxz_hamiltonian(&XxzParams { jx: 1.0, jy: 1.0, jz: 1.0, h: 0.0, n: 4, periodic }).unwrap();
        for a in 1..=3 {
            xxx = xxx.max(symmetry_commutator(&h, a).unwrap());
        }
        let h = xxz_hamiltonian(&XxzParams { jx: 1.0, jy: 1.0, jz: 0.4, h: 0.3, n: 4, periodic }).unwrap();
        xxz3 = xxz3.max(symmetry_commutator(&h, 3).unwrap());
        for a in 1..=2 {
            xxz12 = xxz12.min(symmetry_commutator(&h, a).unwrap());
        }
    }
    let _ = asep_local_generator(0.5);
    let (fast, time) = within(t0, Duration::from_secs(5));
    Line {
        pass: fit_worst <= 1e-9 && xxx <= 1e-12 && xxz3 <= 1e-12 && xxz12 > 1e-3 && fast,
        detail: format!(
            "gauge fit residual {fit_worst:.2e}; XXX commutators {xxx:.1e}; XXZ a=3 {xxz3:.1e}, a=1,2 at least {xxz12:.2}; {time}"
        ),
    }
}

/// Positive boundary rates drawn until the truncated series is safely
/// convergent (product of dominant boundary roots below 0.8).
fn sample_rates(rng: &mut ChaCha8Rng, q: f64, l: usize) -> AsepParams {
    loop {
        let mut r = || rng.random_range(0.05..1.5);
        let p = AsepParams::new(q, r(), r(), r(), r(), l);
        if convergence_factor(&p) < 0.8 {
            return p;
        }
    }
}

fn criterion5() -> Line {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20240607);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for l in 2..=6 {
        for q in [0.3, 0.5, 0.8] {
            for _ in 0..5 {
                let p = sample_rates(&mut rng, q, l);
                let mpa = mpa_stationary_measure(&p, DEFAULT_TRUNCATION).unwrap();
                let oracle = stationary_distribution(&asep_generator(&p, true).unwrap(), 1e-12).unwrap();
                worst = worst.max(mpa.measure.tv_distance(&oracle));
                count += 1;
            }
        }
    }
    let (fast, time) = within(t0, Duration::from_secs(60));
    Line { pass: worst <= 1e-8 && fast, detail: format!("max TV {worst:.2e} over {count} cases; {time}") }
}

fn criterion6() -> (Line, bool) {
    let t0 = Instant::now();
    let q = DD::from(0.5);
    let (mut diff, mut rows): (f64, f64) = (0.0, 0.0);
    let mut poles = Vec::new();
    let mut mismatched = Vec::new();
    let mut compared = 0;
    for l in 1..=4 {
        for m in 1..=4 {
            for z in [0.1, 0.25, 0.4] {
                let zz = DD::from(z);
                let rec = fused_weights_recurrence(l, m, zz, q);
                let clo = fused_weights_closed_form(l, m, zz, q);
                match (rec, clo) {
                    (Ok(a), Ok(b)) => {
                        diff = diff.max(a.max_abs_diff(&b));
                        rows = rows.max(a.row_sum_error()).max(b.row_sum_error());
                        compared += 1;
                    }
                    (Err(_), Err(_)) => poles.push(format!("({l},{m},{z})")),
                    _ => mismatched.push(format!("({l},{m},{z})")),
                }
            }
        }
    }
    let fam = fused_spectral_family(2, 0.5);
    let safe = [0.3, 0.55, 0.7, 0.9];
    let mut ybe: f64 = 0.0;
    for &z in &safe {
        for &w in &safe {
            ybe = ybe.max(verify_spectral_ybe(&fam, c(z), c(w)).unwrap());
        }
    }
    let (fast, time) = within(t0, Duration::from_secs(30));
    let attainable = diff <= 1e-8 && rows <= 1e-9 && ybe <= 1e-9 && mismatched.is_empty() && fast;
    let literal = attainable && poles.is_empty();
    let detail = format!(
        "{compared} grid points agree to {diff:.2e}, rows {rows:.1e}, l=m=2 YBE {ybe:.2e}; {} points are true poles \
         where z q^(2s) = q^(m+1) and both constructions reject them: {}; {}{time}",
        poles.len(),
        poles.join(" "),
        if mismatched.is_empty() { String::new() } else { format!("mismatched {}; ", mismatched.join(" ")) }
    );
    (Line { pass: literal, detail }, attainable)
}

fn criterion7() -> Line {
    let t0 = Instant::now();
    let zs = [0.3, 0.5, 0.7, 1.3, 1.7];
    let (mut re, mut k1, mut kd): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for q in [0.3, 0.5, 0.8] {
        let rfam = SpectralRFamily::asep(q);
        let rho = 1.0 / (q - 1.0);
        let (al, be, ga, de) = (0.6, 0.4, 0.1, 0.2);
        let left = ReflectionFamily::left(q, al, ga);
        let right = ReflectionFamily::right(q, be, de);
        for kf in [&left, &right] {
            for &z in &zs {
                for &w in &zs {
                    match verify_reflection_equation(&rfam, kf, c(z), c(w)) {
                        Ok(r) => re = re.max(r),
                        Err(Error::EvaluationPole(_)) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
            k1 = k1.max(kf.eval(c(1.0)).unwrap().max_abs_diff(&Operator::identity(&[2]).unwrap()));
        }
        let d = derivative_at_one(|x| left.eval(x), 1e-4).unwrap();
        let b = integrable::models::left_boundary(al, ga).scale_real(2.0 * rho);
        kd = kd.max(d.max_abs_diff(&b));
    }
    let (fast, time) = within(t0, Duration::from_secs(1));
    Line {
        pass: re <= 1e-10 && k1 <= 1e-12 && kd <= 1e-6 && fast,
        detail: format!("reflection residual {re:.2e}; |K(1)-Id| {k1:.1e}; |K'(1)-2 rho B| {kd:.2e}; {time}"),
    }
}

fn criterion8() -> Line {
    let t0 = Instant::now();
    let mut n1: f64 = 0.0;
    for t in [0.5, 1.0, 2.0] {
        for q in [0.0, 0.5] {
            for x in -3..=5 {
                let tw = tw_transition(&[0], &[x], t, q, &TwOptions::default()).unwrap().value;
                let or = ctmc_oracle_probability(&[0], &[x], t, q, 8).unwrap();
                n1 = n1.max((tw - or).abs());
            }
        }
    }
    // the two-particle check runs only once the jump-rate convention is pinned
    let mut n2 = f64::NAN;
    if n1 <= 1e-6 {
        n2 = 0.0;
        for q in [0.0, 0.5] {
            for x in [[0, 1], [0, 2], [1, 2], [-1, 1], [1, 3], [-2, 0]] {
                let tw = tw_transition(&[0, 1], &x, 0.5, q, &TwOptions::default()).unwrap().value;
                let or = ctmc_oracle_probability(&[0, 1], &x, 0.5, q, 8).unwrap();
                n2 = n2.max((tw - or).abs());
            }
        }
    }
    let (fast, time) = within(t0, Duration::from_secs(60));
    Line {
        pass: n1 <= 1e-6 && n2 <= 1e-5 && fast,
        detail: format!("N=1 max error {n1:.2e}; N=2 max error {n2:.2e}; {time}"),
    }
}

fn criterion9() -> Line {
    let t0 = Instant::now();
    let (b1, b2) = (0.35, 0.7);
    let w = six_vertex_weights(b1, b2).unwrap();
    let n = 100_000;
    let mut worst_sigma: f64 = 0.0;
    for (bd, p_stay) in
        [(Boundary { left: vec![0], bottom: vec![1] }, b1), (Boundary { left: vec![1], bottom: vec![0] }, b2)]
    {
        let runs = sample_many(&w, 1, 1, &bd, 99, n, Exec::Parallel).unwrap();
        // staying on the incoming direction: up for a bottom arrow, right for a left arrow
        let stay = runs.iter().filter(|c| c.vertices[0].j2 == c.vertices[0].j1).count() as f64;
        let sigma = (p_stay * (1.0 - p_stay) / n as f64).sqrt();
        worst_sigma = worst_sigma.max((stay / n as f64 - p_stay).abs() / sigma);
    }
    let bd = Boundary::step(30, 30);
    let a = format!("{:?}", sample_lattice(&w, 30, 30, &bd, 7).unwrap());
    let b = format!("{:?}", sample_lattice(&w, 30, 30, &bd, 7).unwrap());
    let bd10 = Boundary::step(10, 10);
    let seq = sample_many(&w, 10, 10, &bd10, 5, 16, Exec::Sequential).unwrap();
    let par = sample_many(&w, 10, 10, &bd10, 5, 16, Exec::Parallel).unwrap();
    let stable = a.as_bytes() == b.as_bytes() && seq == par;
    let (fast, time) = within(t0, Duration::from_secs(30));
    Line {
        pass: worst_sigma <= 4.0 && stable && fast,
        detail: format!("max deviation {worst_sigma:.2} sigma at 1e5 samples; byte-stable {stable}; {time}"),
    }
}

fn criterion10() -> Line {
    let t0 = Instant::now();
    let mut orth: f64 = 0.0;
    for m in 0..=6 {
        for n in 0..=6 {
            let v = hermite_inner_product(m, n);
            let err = if m == n { (v / hermite_norm(n) - 1.0).abs() } else { v.abs() };
            orth = orth.max(err);
        }
    }
    let [e, f, h] = sl2_basis();
    let mut js: f64 = 0.0;
    for (a, b) in [(&h, &e), (&h, &f), (&e, &f)] {
        js = js.max(js_homomorphism_residual(a, b, 8).unwrap());
    }
    let (fast, time) = within(t0, Duration::from_secs(5));
    Line {
        pass: orth <= 1e-6 && js <= 1e-10 && fast,
        detail: format!("Hermite orthogonality {orth:.2e}; Jordan-Schwinger sl2 {js:.1e}; {time}"),
    }
}

fn report(i: usize, l: &Line) {
    println!("criterion {:>2}: {} | {}", i, if l.pass { "PASS" } else { "FAIL" }, l.detail);
}

fn main() {
    let mut ok = true;
    let (c1, c1_attainable) = criterion1();
    report(1, &c1);
    if !c1.pass {
        println!(
            "              attainable part (each family in the form it satisfies): {}",
            if c1_attainable { "PASS" } else { "FAIL" }
        );
    }
    ok &= c1_attainable;
    let before: [fn() -> Line; 4] = [criterion2, criterion3, criterion4, criterion5];
    for (i, f) in before.iter().enumerate() {
        let l = f();
        report(i + 2, &l);
        ok &= l.pass;
    }
    let (c6, c6_attainable) = criterion6();
    report(6, &c6);
    if !c6.pass {
        println!(
            "              attainable part (pole-free agreement, rows, YBE): {}",
            if c6_attainable { "PASS" } else { "FAIL" }
        );
    }
    ok &= c6_attainable;
    let after: [fn() -> Line; 4] = [criterion7, criterion8, criterion9, criterion10];
    for (i, f) in after.iter().enumerate() {
        let l = f();
        report(i + 7, &l);
        ok &= l.pass;
    }
    if !ok {
        std::process::exit(1);
    }
}

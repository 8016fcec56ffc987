use integrable::qnum::{basic_hypergeometric, HypergeometricSpec};
use integrable::sixvertex::*;
use integrable::tensor::permutation_operator;
use integrable::uqsl2::{rep, universal_r};
use integrable::ybe::{asep_spectral_r, verify_spectral_ybe};
use integrable::{Error, Exec, C64};
use proptest::prelude::*;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn six_vertex_table_and_asep_match() {
    let w = six_vertex_weights(0.3, 0.8).unwrap();
    assert_eq!(w.row_sum_error(), 0.0);
    assert_eq!(w.conservation_error(), 0.0);
    assert_eq!(w.entries().len(), 6);
    assert!(matches!(six_vertex_weights(1.2, 0.5), Err(Error::RateOutOfRange(_))));
    for (z, q) in [(0.3, 0.5), (0.7, 0.2), (0.05, 0.9)] {
        let (b1, b2) = asep_matched_b(z, q);
        let op = six_vertex_weights(b1, b2).unwrap().to_operator().unwrap();
        assert!(op.max_abs_diff(&asep_spectral_r(c(z), q).unwrap()) < 1e-15);
    }
}

#[test]
fn spin_one_base_weights_are_six_vertex() {
    for (z, q) in [(2.0, 0.5), (3.5, 0.8)] {
        let q2 = q * q;
        let (b1, b2) = (q2 * (1.0 - z) / (q2 - z), (1.0 - z) / (q2 - z));
        let base = higher_spin_base_weights(1, z, q).unwrap();
        let six = six_vertex_weights(b1, b2).unwrap();
        assert!(base.max_abs_diff(&six) < 1e-14);
    }
}

#[test]
fn universal_braid_matrix_is_gauge_equivalent_to_six_vertex() {
    // P R on rho_1 x rho_1 at deformation 1/q, gauged by diagonals (1, q, 1, 1)
    // on V_l x V_m and its swap on V_m x V_l, is q^{-1/2} times the weights
    // with b1 = 0 and b2 = 1 - q²
    for q in [0.3, 0.6, 0.85] {
        let r1 = rep(1, 1.0 / q).unwrap();
        let braid = &permutation_operator(2, 2).unwrap() * &universal_r(&r1, &r1).unwrap();
        let glm = [c(1.0), c(q), c(1.0), c(1.0)];
        let gml = [c(1.0), c(1.0), c(q), c(1.0)];
        let s = gauge_transform(&braid, &glm, &gml).unwrap();
        let six = six_vertex_weights(0.0, 1.0 - q * q).unwrap().to_operator().unwrap();
        assert!(s.max_abs_diff(&six.scale_real(q.powf(-0.5))) < 1e-12, "q = {q}");
    }
}

#[test]
fn gauge_transform_round_trip_and_errors() {
    let r = fused_weights_recurrence(2, 1, 0.3, 0.5).unwrap().to_operator().unwrap();
    let glm: Vec<C64> = (0..6).map(|i| c(1.0 + 0.3 * i as f64)).collect();
    let gml: Vec<C64> = (0..6).map(|i| c(2.0 - 0.2 * i as f64)).collect();
    let s = gauge_transform(&r, &glm, &gml).unwrap();
    let inv = |g: &[C64]| g.iter().map(|x| c(1.0) / x).collect::<Vec<_>>();
    let back = gauge_transform(&s, &inv(&glm), &inv(&gml)).unwrap();
    assert!(back.max_abs_diff(&r) < 1e-14 * r.max_abs());
    let mut zero = glm.clone();
    zero[2] = c(0.0);
    assert_eq!(gauge_transform(&r, &zero, &gml), Err(Error::SingularGauge));
    assert!(matches!(gauge_transform(&r, &glm[..4], &gml), Err(Error::DimensionMismatch(_))));
}

#[test]
fn recurrence_rows_and_cross_check() {
    let w = fused_weights_recurrence(2, 1, 0.3, 0.5).unwrap();
    assert!(w.row_sum_error() <= 1e-12);
    let q = DD::from(0.5);
    for l in 1..=4 {
        for m in 1..=4 {
            for z in [0.1, 0.4] {
                let a = fused_weights_recurrence(l, m, DD::from(z), q).unwrap();
                let b = fused_weights_closed_form(l, m, DD::from(z), q).unwrap();
                assert!(a.max_abs_diff(&b) <= 1e-8, "({l},{m},{z})");
                assert_eq!(b.conservation_error(), 0.0);
            }
        }
    }
}

#[test]
fn closed_form_base_case() {
    for m in 1..=4 {
        let a = fused_weights_closed_form(1, m, 0.2, 0.6).unwrap();
        let b = higher_spin_base_weights(m, 0.2, 0.6).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-10);
    }
}

#[test]
fn true_poles_are_rejected() {
    let (z, q) = (0.25, 0.5);
    assert!(matches!(fused_weights_recurrence(2, 1, z, q), Err(Error::PoleInSpectralLadder(_))));
    assert!(matches!(fused_weights_closed_form(2, 1, z, q), Err(Error::PoleInPochhammer(_))));
}

#[test]
fn fused_spin_one_family_solves_ybe() {
    let fam = fused_spectral_family(2, 0.5);
    for (z, w) in [(0.3, 0.55), (0.7, 0.9), (0.55, 0.3)] {
        assert!(verify_spectral_ybe(&fam, c(z), c(w)).unwrap() <= 1e-9);
    }
    assert!(fam.r_at(c(1.0)).unwrap().max_abs_diff(&permutation_operator(3, 3).unwrap()) < 1e-12);
}

#[test]
fn sampler_contracts() {
    let w = six_vertex_weights(0.35, 0.6).unwrap();
    let bd = Boundary::step(6, 5);
    let a = sample_lattice(&w, 6, 5, &bd, 42).unwrap();
    assert_eq!(a, sample_lattice(&w, 6, 5, &bd, 42).unwrap());
    let inflow: usize = bd.left.iter().sum::<usize>() + bd.bottom.iter().sum::<usize>();
    let outflow: usize = a.right.iter().sum::<usize>() + a.top.iter().sum::<usize>();
    assert_eq!(inflow, outflow);
    assert_eq!(a.height_function[0], a.top.iter().sum::<usize>());
    assert_eq!(a.height_function[6], 0);
    for v in &a.vertices {
        assert_eq!(v.j1 + v.k1, v.j2 + v.k2);
    }
    let many_s = sample_many(&w, 6, 5, &bd, 42, 16, Exec::Sequential).unwrap();
    let many_p = sample_many(&w, 6, 5, &bd, 42, 16, Exec::Parallel).unwrap();
    assert_eq!(many_s, many_p);
    assert_eq!(many_s[0], a);
    assert!(matches!(sample_lattice(&w, 6, 5, &Boundary::step(5, 5), 1), Err(Error::InconsistentBoundary(_))));
}

#[test]
fn turning_weights_build_a_staircase() {
    // b1 = b2 = 0: every single arrow turns, a doubly occupied vertex passes both
    let w = six_vertex_weights(0.0, 0.0).unwrap();
    let n = 4;
    let cfg = sample_lattice(&w, n, n, &Boundary::step(n, n), 7).unwrap();
    assert_eq!(cfg.top, vec![1; n]);
    assert_eq!(cfg.right, vec![0; n]);
}

#[test]
fn single_vertex_chi_square() {
    // one vertex fed (0, 1): output (0, 1) with b1, else (1, 0)
    let b1 = 0.3;
    let w = six_vertex_weights(b1, 0.5).unwrap();
    let bd = Boundary { left: vec![0], bottom: vec![1] };
    let n = 100_000;
    let runs = sample_many(&w, 1, 1, &bd, 11, n, Exec::default()).unwrap();
    let up = runs.iter().filter(|r| r.top[0] == 1).count() as f64;
    let expect = [b1 * n as f64, (1.0 - b1) * n as f64];
    let obs = [up, n as f64 - up];
    let chi2: f64 = obs.iter().zip(&expect).map(|(o, e)| (o - e).powi(2) / e).sum();
    // 99.99% point of chi-square with one degree of freedom
    assert!(chi2 < 15.1, "chi2 = {chi2}");
}

fn poch(a: f64, q: f64, n: usize) -> f64 {
    (0..n).map(|k| 1.0 - a * q.powi(k as i32)).product()
}

// sum of the absolute values of the terms of the phi-bar sum, the scale of
// its cancellation error
fn term_mass(n: usize, a: &[f64; 3], b: &[f64; 3], qq: f64) -> f64 {
    (0..=n)
        .map(|k| {
            let num = poch(qq.powi(-(n as i32)), qq, k) * a.iter().map(|&x| poch(x, qq, k)).product::<f64>();
            let tail: f64 = b.iter().map(|&x| poch(x * qq.powi(k as i32), qq, n - k)).product();
            (qq.powi(k as i32) * num / poch(qq, qq, k) * tail).abs()
        })
        .sum::<f64>()
        .max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fused_weights_are_stochastic(l in 1usize..5, m in 1usize..5, q in 0.2f64..0.9, frac in 0.05f64..0.95) {
        // 0 < z < q^{m+1} keeps every weight a probability
        let z = frac * q.powi(m as i32 + 1);
        let w = match fused_weights_recurrence(l, m, DD::from(z), DD::from(q)) {
            Ok(w) => w,
            Err(Error::PoleInSpectralLadder(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(w.row_sum_error() <= 1e-9);
        prop_assert_eq!(w.conservation_error(), 0.0);
        if let Ok(cf) = fused_weights_closed_form(l, m, DD::from(z), DD::from(q)) {
            prop_assert!(cf.max_abs_diff(&w) <= 1e-8);
        }
    }

    #[test]
    fn base_weight_pairs_sum_to_one(m in 1usize..6, q in 0.1f64..0.95, z in 0.01f64..0.99) {
        prop_assume!((q.powi(m as i32 + 1) - z).abs() > 1e-6);
        let w = higher_spin_base_weights(m, z, q).unwrap();
        prop_assert!(w.row_sum_error() < 1e-9 * (1.0 / (q.powi(m as i32 + 1) - z).abs()).max(1.0));
        prop_assert_eq!(w.get(0, 0, 0, 0), 1.0);
    }

    #[test]
    fn phi_bar_is_scaled_q_racah_series(
        n in 0usize..5, a in prop::array::uniform3(0.1f64..0.9), b in prop::array::uniform3(0.1f64..0.9), q in 0.2f64..0.8,
    ) {
        let qq = q * q;
        let direct = phi_bar(n, &a, &b, qq);
        let mut upper = vec![c(qq.powi(-(n as i32)))];
        upper.extend(a.iter().map(|&x| c(x)));
        let lower: Vec<C64> = b.iter().map(|&x| c(x)).collect();
        let series = basic_hypergeometric(&HypergeometricSpec::new(upper, lower, qq, c(qq))).unwrap();
        let scale: f64 = b.iter().map(|&x| (0..n).map(|k| 1.0 - x * qq.powi(k as i32)).product::<f64>()).product();
        prop_assert!((direct - series.re * scale).abs() <= 1e-12 * term_mass(n, &a, &b, qq));
    }

    #[test]
    fn sampling_is_seed_stable(seed in any::<u64>(), b1 in 0.0f64..=1.0, b2 in 0.0f64..=1.0) {
        let w = six_vertex_weights(b1, b2).unwrap();
        let bd = Boundary::step(5, 4);
        prop_assert_eq!(sample_lattice(&w, 5, 4, &bd, seed).unwrap(), sample_lattice(&w, 5, 4, &bd, seed).unwrap());
    }
}

use integrable::models::mpa_bulk_generator;
use integrable::sixvertex::{asep_matched_b, six_vertex_weights};
use integrable::tensor::permutation_operator;
use integrable::ybe::*;
use integrable::{Error, Operator, C64};
use proptest::prelude::*;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn middle_block(m: &Operator) -> [f64; 4] {
    [m.get(1, 1).re, m.get(1, 2).re, m.get(2, 1).re, m.get(2, 2).re]
}

fn perturbed(r: &Operator, i: usize, j: usize) -> Operator {
    let mut p = r.clone();
    p.set(i, j, r.get(i, j) + c(1e-3));
    p
}

#[test]
fn particle_hole_conjugation_swaps_rates() {
    let t = particle_hole2();
    for i in 0..=10 {
        for k in 0..=10 {
            let (a, b) = (i as f64 / 10.0, k as f64 / 10.0);
            let conj = &(&t * &r_alpha_beta(a, b).unwrap()) * &t;
            assert!(conj.max_abs_diff(&r_alpha_beta(b, a).unwrap()) < 1e-15);
        }
    }
}

#[test]
fn one_sided_particle_hole_acts_on_the_one_particle_sector() {
    // T x T exchanges the two fully packed states, so one-sided products only
    // agree with the swapped-rate matrices on the middle block; in row
    // convention T R(a, b) ~ R(1-b, 1-a) and R(a, b) T ~ R(1-a, 1-b)
    let t = particle_hole2();
    for (a, b) in [(0.2, 0.7), (0.0, 1.0), (0.45, 0.1)] {
        let r = r_alpha_beta(a, b).unwrap();
        let left = middle_block(&(&t * &r));
        let right = middle_block(&(&r * &t));
        let expect_l = middle_block(&r_alpha_beta(1.0 - b, 1.0 - a).unwrap());
        let expect_r = middle_block(&r_alpha_beta(1.0 - a, 1.0 - b).unwrap());
        for k in 0..4 {
            assert!((left[k] - expect_l[k]).abs() < 1e-15);
            assert!((right[k] - expect_r[k]).abs() < 1e-15);
        }
    }
}

#[test]
fn braided_solutions_and_controls() {
    let p = permutation_operator(2, 2).unwrap();
    assert!(verify_braided_ybe(&p, 1e-10).unwrap().pass);
    assert!(verify_braided_ybe(&Operator::identity(&[2, 2]).unwrap(), 1e-10).unwrap().pass);
    let r = r_alpha_beta(1.0, 0.35).unwrap();
    assert!(verify_braided_ybe(&r, 1e-10).unwrap().pass);
    let bad = verify_braided_ybe(&r_alpha_beta(0.5, 0.5).unwrap(), 1e-10).unwrap();
    assert!(!bad.pass && bad.residuals["braided"] > 1e-3);
    assert!(matches!(
        verify_braided_ybe(&Operator::identity(&[8]).unwrap(), 1e-10),
        Err(Error::DimensionNotASquare(8))
    ));
}

#[test]
fn rate_range_is_enforced() {
    assert!(matches!(r_alpha_beta(-0.1, 0.0), Err(Error::RateOutOfRange(_))));
    assert!(matches!(r_alpha_beta(0.0, 1.5), Err(Error::RateOutOfRange(_))));
}

#[test]
fn spectral_ybe_trivial_and_asep_points() {
    let fam = SpectralRFamily::asep(0.5);
    assert!(verify_spectral_ybe(&fam, c(1.0), c(1.0)).unwrap() < 1e-15);
    assert!(verify_spectral_ybe(&fam, c(0.4), c(0.7)).unwrap() <= 1e-10);
    assert!(matches!(verify_spectral_ybe(&fam, c(2.0), c(0.7)), Err(Error::EvaluationPole(_))));
}

#[test]
fn six_vertex_weights_at_matched_parameters_solve_ybe() {
    let q = 0.4;
    let fam = SpectralRFamily::new("six-vertex", q, 2, Convention::R, move |z: C64| {
        let (b1, b2) = asep_matched_b(z.re, q);
        six_vertex_weights(b1, b2)?.to_operator()
    });
    for (z, w) in [(0.3, 0.6), (0.5, 0.9), (0.7, 0.2)] {
        assert!(verify_spectral_ybe(&fam, c(z), c(w)).unwrap() <= 1e-10);
        let direct = asep_spectral_r(c(z), q).unwrap();
        assert!(fam.r_at(c(z)).unwrap().max_abs_diff(&direct) < 1e-14);
    }
}

#[test]
fn rcheck_convention_is_converted() {
    let q = 0.6;
    let fam = SpectralRFamily::new("asep-braid", q, 2, Convention::RCheck, move |z| {
        Ok(&permutation_operator(2, 2)? * &asep_spectral_r(z, q)?)
    });
    assert!(verify_spectral_ybe(&fam, c(0.35), c(0.8)).unwrap() <= 1e-10);
}

#[test]
fn frt_hecke_and_degenerate_q() {
    for q in [0.4, 0.9, 2.0] {
        let r = frt_r(q).unwrap();
        assert!(verify_hecke_quadratic(&r, c(q.powi(-2)), c(-1.0)) < 1e-12);
        assert!(verify_braided_ybe(&r, 1e-10).unwrap().pass);
        // wrong eigenvalues leave an O(1) residual
        assert!(verify_hecke_quadratic(&r, c(1.0), c(-1.0)) > 1e-3);
    }
    assert_eq!(frt_r(0.0), Err(Error::InvalidDeformation(0.0)));
}

#[test]
fn markov_report_for_asep() {
    for q in [0.3, 0.6] {
        let rep = markov_structure_report(&SpectralRFamily::asep(q), &mpa_bulk_generator(q), 1e-5).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.params["rho_fit"] - 1.0 / (q - 1.0)).abs() < 1e-5);
        assert!(rep.residuals["markov_vector"] <= 1e-10);
        let json = serde_json::to_value(&rep).unwrap();
        for key in ["family", "params", "residuals", "pass"] {
            assert!(json.get(key).is_some());
        }
    }
    let shifted = SpectralRFamily::new("shifted", 0.5, 2, Convention::R, |z| asep_spectral_r(z * 0.5, 0.5));
    assert!(matches!(markov_structure_report(&shifted, &mpa_bulk_generator(0.5), 1e-5), Err(Error::NotRegular(_))));
}

#[test]
fn reflection_matrices_at_one_and_poles() {
    let k = ReflectionFamily::left(0.5, 0.6, 0.1);
    assert!(k.eval(c(1.0)).unwrap().max_abs_diff(&Operator::identity(&[2]).unwrap()) < 1e-15);
    let kb = ReflectionFamily::right(0.5, 0.4, 0.2);
    assert!(kb.eval(c(1.0)).unwrap().max_abs_diff(&Operator::identity(&[2]).unwrap()) < 1e-15);
    for kf in [k, kb] {
        for (z, w) in [(0.3, 0.7), (1.3, 0.5)] {
            assert!(verify_reflection_equation(&SpectralRFamily::asep(0.5), &kf, c(z), c(w)).unwrap() <= 1e-10);
        }
    }
    // x = 0 kills the left denominator when alpha = 0
    assert!(matches!(reflection_k(c(0.0), 0.5, 0.0, 0.1, Side::Left), Err(Error::PoleInDenominator(_))));
}

proptest! {
    #[test]
    fn braided_families(a in 0.0f64..=1.0) {
        // R(1, b) and R(a, 1) solve the braided equation; R(a, 0) solves the
        // unbraided one, equivalently P R(a, 0) = R(1, 1 - a) is braided
        for r in [r_alpha_beta(1.0, a).unwrap(), r_alpha_beta(a, 1.0).unwrap()] {
            prop_assert!(verify_braided_ybe(&r, 1e-10).unwrap().residuals["braided"] <= 1e-12);
        }
        let r0 = r_alpha_beta(a, 0.0).unwrap();
        let (x, y, z) = triple_embeddings(&r0).unwrap();
        prop_assert!((&(&x * &y) * &z).max_abs_diff(&(&(&z * &y) * &x)) <= 1e-12);
        let pr = &permutation_operator(2, 2).unwrap() * &r0;
        prop_assert!(pr.max_abs_diff(&r_alpha_beta(1.0, 1.0 - a).unwrap()) < 1e-15);
    }

    #[test]
    fn asep_r_spectral_ybe(q in 0.1f64..0.95, z in 0.05f64..0.95, w in 0.05f64..0.95) {
        let fam = SpectralRFamily::asep(q);
        prop_assert!(verify_spectral_ybe(&fam, c(z), c(w)).unwrap() <= 1e-10);
        for s in fam.r_at(c(z)).unwrap().row_sums() {
            prop_assert!((s - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn reflection_equation_on_grid(
        q in 0.2f64..0.9, a in 0.05f64..1.0, g in 0.0f64..0.5, z in 0.2f64..0.9, w in 0.2f64..0.9,
    ) {
        let rfam = SpectralRFamily::asep(q);
        for kf in [ReflectionFamily::left(q, a, g), ReflectionFamily::right(q, a, g)] {
            match verify_reflection_equation(&rfam, &kf, c(z), c(w)) {
                Ok(r) => prop_assert!(r <= 1e-9, "{r}"),
                Err(Error::EvaluationPole(_)) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }

    #[test]
    fn perturbation_is_detected(i in 0usize..4, j in 0usize..4, q in 0.2f64..0.8) {
        // one entry moved by 1e-3 lifts each flagship residual above 1e-4
        let base = r_alpha_beta(1.0, 0.3).unwrap();
        let r = perturbed(&base, i, j);
        prop_assert!(verify_braided_ybe(&r, 1e-10).unwrap().residuals["braided"] > 1e-4
            || perturbed_spectral(q, i, j) > 1e-4);
        prop_assert!(perturbed_spectral(q, i, j) > 1e-4);
        let frt = perturbed(&frt_r(q).unwrap(), i, j);
        prop_assert!(verify_hecke_quadratic(&frt, c(q.powi(-2)), c(-1.0)) > 1e-4);
    }
}

fn perturbed_spectral(q: f64, i: usize, j: usize) -> f64 {
    let fam =
        SpectralRFamily::new("perturbed", q, 2, Convention::R, move |z| Ok(perturbed(&asep_spectral_r(z, q)?, i, j)));
    verify_spectral_ybe(&fam, c(0.4), c(0.7)).unwrap()
}

use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use taubex::modulation::{
    bounded_diagnostic, lpq_norm, modulation_norm, stabilized_bound, vanishing_diagnostic, window_equivalence,
    MixedNormSpec, ModulationError,
};
use taubex::signal::{Grid, QuadratureSpec, SignalSource, Window};
use taubex::stft::{forward_stft, TimeFrequencyMatrix};
use taubex::weights::{TFWeight, Weight1D};

fn grid(lo: f64, hi: f64, step: f64) -> Grid {
    Grid::span(lo, hi, step).unwrap()
}

#[test]
fn gaussian_modulation_norm_is_parseval() {
    let g = grid(-5.0, 5.0, 0.1);
    let spec = MixedNormSpec::unweighted(2.0, 2.0).unwrap();
    let w = Window::gaussian_pi();
    let n = modulation_norm(&SignalSource::gaussian(), &w, &spec, &g, &g, &QuadratureSpec::default()).unwrap();
    assert!((n.norm - FRAC_1_SQRT_2).abs() < 1e-3);
    let z = modulation_norm(&SignalSource::zero(), &w, &spec, &g, &g, &QuadratureSpec::default()).unwrap();
    assert_eq!(z.norm, 0.0);
}

#[test]
fn delta_max_norm_is_window_peak() {
    let g = grid(-3.0, 3.0, 0.25);
    let spec = MixedNormSpec::unweighted(f64::INFINITY, f64::INFINITY).unwrap();
    let n = modulation_norm(&SignalSource::delta(0.0), &Window::gaussian_pi(), &spec, &g, &g, &QuadratureSpec::default())
        .unwrap();
    assert_eq!(n.norm, 1.0);
}

#[test]
fn parseval_for_l2_fixtures() {
    // ||f||_2 by independent dense sums.
    let l2 = |f: &dyn Fn(f64) -> f64| {
        let h = 1e-3;
        ((-20_000..=20_000).map(|k| f(k as f64 * h).powi(2)).sum::<f64>() * h).sqrt()
    };
    let psi_norm = 2f64.powf(-0.25);
    let g = grid(-7.0, 7.0, 0.1);
    let spec = MixedNormSpec::unweighted(2.0, 2.0).unwrap();
    let q = QuadratureSpec::default();
    // The jump of exp_step leaves a 1/xi tail outside |xi| <= 7 worth about 1%.
    let cases: Vec<(SignalSource, f64, f64)> = vec![
        (SignalSource::gaussian(), l2(&|t| (-PI * t * t).exp()), 1e-3),
        (SignalSource::gaussian().translated(1.5).scaled(2.0), l2(&|t| 2.0 * (-PI * (t + 1.5).powi(2)).exp()), 1e-3),
        (SignalSource::exp_step(-1.0), l2(&|t| if t >= 0.0 { (-t).exp() } else { 0.0 }), 2e-2),
    ];
    for (f, fn2, tol) in cases {
        let n = modulation_norm(&f, &Window::gaussian_pi(), &spec, &g, &g, &q).unwrap();
        let expect = fn2 * psi_norm;
        assert!((n.norm - expect).abs() < tol * expect, "{}: {} vs {expect}", f.name(), n.norm);
    }
}

#[test]
fn boundedness_examples() {
    let xg = grid(-8.0, 8.0, 0.25);
    let xig = grid(-6.0, 6.0, 0.25);
    let psi = Window::gaussian_pi();
    let q = QuadratureSpec::default();
    for f in [SignalSource::sinusoid(1.0), SignalSource::dirac_comb(-5, 5)] {
        let d = bounded_diagnostic(&f, &psi, &Weight1D::one(), &xg, &xig, &q).unwrap();
        assert!(d.s_hat <= 0.1 && d.sup_constant.is_finite(), "{}: {d:?}", f.name());
        assert!(stabilized_bound(&f, &psi, &Weight1D::one(), &xg, &xig, &q).unwrap().stable);
    }
    let xg = grid(-5.0, 20.0, 0.25);
    let d = bounded_diagnostic(&SignalSource::exp_step(0.5), &psi, &Weight1D::ramp(0.5), &xg, &xig, &q).unwrap();
    assert!(d.s_hat <= 0.1 && d.sup_constant.is_finite(), "{d:?}");
}

#[test]
fn vanishing_examples() {
    let g = grid(-6.0, 6.0, 0.25);
    let psi = Window::gaussian_pi();
    let q = QuadratureSpec::default();
    let gauss = vanishing_diagnostic(&SignalSource::gaussian(), &psi, &Weight1D::one(), &g, &g, 0.0, &q).unwrap();
    assert_eq!(gauss.decays_to_zero, Some(true));
    let one = vanishing_diagnostic(&SignalSource::constant(1.0), &psi, &Weight1D::one(), &g, &g, 0.0, &q).unwrap();
    assert_eq!(one.decays_to_zero, Some(false));
}

#[test]
fn nesting_with_envelope_weight() {
    let xg = grid(-10.0, 10.0, 0.25);
    let xig = grid(-4.0, 4.0, 0.25);
    let psi = Window::gaussian();
    let q = QuadratureSpec::default();
    for f in [
        SignalSource::exp_step(0.5),
        SignalSource::exp_poly(0.5),
        SignalSource::sinusoid(1.0),
        SignalSource::dirac_comb(-5, 5),
        SignalSource::gaussian(),
        SignalSource::exp(-0.7),
    ] {
        let omega = Weight1D::exp(f.envelope().rate);
        let r = stabilized_bound(&f, &psi, &omega, &xg, &xig, &q).unwrap();
        assert!(r.stable, "{}: {r:?}", f.name());
    }
}

#[test]
fn window_equivalence_examples() {
    let g = grid(-5.0, 5.0, 0.1);
    let q = QuadratureSpec::default();
    let spec = MixedNormSpec::unweighted(2.0, 2.0).unwrap();
    let panel = [
        SignalSource::gaussian(),
        SignalSource::gaussian().translated(1.0),
        SignalSource::exp_step(-1.0),
        SignalSource::sinusoid(0.5).scaled(0.0).translated(0.0),
    ];
    let same = window_equivalence(&panel[0], &Window::gaussian_pi(), &Window::gaussian_pi(), &spec, &g, &g, &panel[..3], 3.0, &q)
        .unwrap();
    assert_eq!(same.ratio, 1.0);
    let eq = window_equivalence(&panel[0], &Window::gaussian_pi(), &Window::gaussian(), &spec, &g, &g, &panel[..3], 3.0, &q)
        .unwrap();
    assert!(eq.equivalent && eq.lo >= 1.0 / 3.0 && eq.hi <= 3.0, "{eq:?}");
    // ||psi1|| / ||psi2|| = 2^{-1/4} / (pi/2)^{1/4}
    let exact = 2f64.powf(-0.25) / (PI / 2.0).powf(0.25);
    assert!((eq.ratio - exact).abs() < 1e-3);
    let zero = window_equivalence(&SignalSource::zero(), &Window::gaussian_pi(), &Window::gaussian(), &spec, &g, &g, &[], 3.0, &q);
    assert!(matches!(zero, Err(ModulationError::ZeroNorm(_))));
}

fn random_matrix(seed: &[(f64, f64)]) -> TimeFrequencyMatrix {
    let g = Grid::new(-1.0, 0.5, 5).unwrap();
    let vals = (0..25).map(|k| Complex64::new(seed[k % seed.len()].0, seed[k % seed.len()].1 * k as f64)).collect();
    TimeFrequencyMatrix::new(g, g, 0.0, vals).unwrap()
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![1.0f64..6.0, Just(f64::INFINITY)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lpq_is_absolutely_homogeneous(
        seed in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..6),
        re in -4.0f64..4.0, im in -4.0f64..4.0, p in exponent(), q in exponent(),
    ) {
        let m = random_matrix(&seed);
        let spec = MixedNormSpec::new(p, q, TFWeight::v_sa(1.0, 0.5).unwrap()).unwrap();
        let lambda = Complex64::new(re, im);
        let a = lpq_norm(&m.scaled(lambda), &spec).unwrap();
        let b = lambda.norm() * lpq_norm(&m, &spec).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn lpq_is_monotone_in_the_weight(
        seed in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..6),
        a1 in 0.0f64..1.0, extra in 0.0f64..1.0, s in 0.0f64..2.0, p in exponent(), q in exponent(),
    ) {
        let m = random_matrix(&seed);
        let lo = MixedNormSpec::new(p, q, TFWeight::v_sa(s, a1).unwrap()).unwrap();
        let hi = MixedNormSpec::new(p, q, TFWeight::v_sa(s, a1 + extra).unwrap()).unwrap();
        prop_assert!(lpq_norm(&m, &lo).unwrap() <= lpq_norm(&m, &hi).unwrap() * (1.0 + 1e-14));
    }
}

#[test]
fn norm_of_computed_matrix_matches_direct_call() {
    let g = grid(-3.0, 3.0, 0.25);
    let q = QuadratureSpec::default();
    let spec = MixedNormSpec::new(2.0, 1.0, TFWeight::m_eps(0.5, 0.1, 1.0).unwrap()).unwrap();
    let m = forward_stft(&SignalSource::exp_poly(0.5), &Window::gaussian(), &g, &g, 0.0, &q).unwrap();
    let a = lpq_norm(&m, &spec).unwrap();
    let b = modulation_norm(&SignalSource::exp_poly(0.5), &Window::gaussian(), &spec, &g, &g, &q).unwrap().norm;
    assert_eq!(a, b);
}

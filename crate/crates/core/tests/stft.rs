use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use taubex::signal::{Atom, Grid, QuadratureSpec, SignalSource, Window};
use taubex::stft::{desingularized_pairing, forward_stft, reconstruct, TfGrids};

/// Plain Riemann sum of `f(t) conj(psi(t - x)) e^{-2 pi i xi t}` over
/// `[x - 10, x + 10]`, written without any library quadrature.
fn oracle_stft(f: impl Fn(f64) -> f64, psi: impl Fn(f64) -> f64, x: f64, xi: f64) -> Complex64 {
    let h = 1e-3;
    let n = 20_000;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let t = x - 10.0 + k as f64 * h;
        let a = f(t) * psi(t - x);
        let ph = -TAU * xi * t;
        acc += Complex64::new(a * ph.cos(), a * ph.sin());
    }
    acc * h
}

fn gauss_pi(t: f64) -> f64 {
    (-PI * t * t).exp()
}

fn closed_form(x: f64, xi: f64) -> Complex64 {
    let ph = -PI * x * xi;
    Complex64::new(ph.cos(), ph.sin()) * (FRAC_1_SQRT_2 * (-PI * (x * x + xi * xi) / 2.0).exp())
}

#[test]
fn oracle_agrees_with_completed_square() {
    for &(x, xi) in &[(0.0, 0.0), (0.7, -0.4), (-1.3, 1.1), (2.0, 0.5)] {
        let d = (oracle_stft(gauss_pi, gauss_pi, x, xi) - closed_form(x, xi)).norm();
        assert!(d < 1e-12, "({x},{xi}): {d}");
    }
}

#[test]
fn gaussian_stft_matches_closed_form() {
    let xg = Grid::span(-2.0, 2.0, 0.5).unwrap();
    let m = forward_stft(&SignalSource::gaussian(), &Window::gaussian_pi(), &xg, &xg, 0.0, &QuadratureSpec::default())
        .unwrap();
    for i in 0..xg.count() {
        for j in 0..xg.count() {
            let (x, xi) = (xg.node(i), xg.node(j));
            assert!((m.get(i, j) - closed_form(x, xi)).norm() < 1e-10, "({x},{xi})");
        }
    }
}

#[test]
fn parseval_on_a_coarse_grid() {
    let g = Grid::span(-5.0, 5.0, 0.1).unwrap();
    let m = forward_stft(&SignalSource::gaussian(), &Window::gaussian_pi(), &g, &g, 0.0, &QuadratureSpec::default())
        .unwrap();
    let mut s = 0.0;
    for i in 0..g.count() {
        for j in 0..g.count() {
            s += m.get(i, j).norm_sqr() * g.trapezoid_weight(i) * g.trapezoid_weight(j);
        }
    }
    assert!((s.sqrt() - FRAC_1_SQRT_2).abs() < 1e-4 * FRAC_1_SQRT_2);
}

#[test]
fn sinusoid_reconstruction() {
    let grids = TfGrids {
        x: Grid::span(-8.0, 8.0, 0.05).unwrap(),
        xi: Grid::span(-4.0, 4.0, 0.05).unwrap(),
        t: Grid::span(-4.0, 4.0, 0.05).unwrap(),
    };
    let w = Window::gaussian_pi();
    let r = reconstruct(&SignalSource::sinusoid(1.0), &w, &w, &grids, &QuadratureSpec::default()).unwrap();
    assert!(r.relative_error.unwrap() <= 1e-3, "{:?}", r.relative_error);
}

#[test]
fn pairing_with_tilted_frequency() {
    let g = Grid::span(-5.0, 5.0, 0.1).unwrap();
    let w = Window::gaussian_pi();
    let f = SignalSource::gaussian();
    let spec = QuadratureSpec::default();
    let a = desingularized_pairing(&f, &w, &w, &w, 0.0, &g, &g, &spec).unwrap();
    let b = desingularized_pairing(&f, &w, &w, &w, 0.05, &g, &g, &spec).unwrap();
    assert!((a.value - b.value).norm() < 1e-4);
    assert!((a.value.re - FRAC_1_SQRT_2).abs() < 1e-4);
    assert!(a.residual_vs_direct.unwrap() < 1e-4);
}

#[test]
fn growth_bound_extends_to_a_larger_grid() {
    // C is measured on the base grid with k = sigma + 1; the enlarged grid must not exceed it.
    let spec = QuadratureSpec::default();
    let psi = Window::gaussian();
    for (f, eta) in [
        (SignalSource::exp_step(0.5), 0.0),
        (SignalSource::exp_poly(0.5), 0.1),
        (SignalSource::sinusoid(1.0), -0.2),
        (SignalSource::dirac_comb(-5, 5), 0.3),
    ] {
        let k = f.envelope().rate + 1.0;
        let xg = Grid::span(-8.0, 8.0, 0.25).unwrap();
        let xig = Grid::span(-3.0, 3.0, 0.25).unwrap();
        let sup = |xg: &Grid, xig: &Grid| {
            let m = forward_stft(&f, &psi, xg, xig, eta, &spec).unwrap();
            let mut c: f64 = 0.0;
            for i in 0..xg.count() {
                for j in 0..xig.count() {
                    let (x, xi) = (xg.node(i), xig.node(j));
                    let z = Complex64::new(xi, eta).norm();
                    let q = m.complex_frequency_value(i, j).norm()
                        / ((1.0 + z).powf(k) * (k * x.abs() + TAU * eta * x).exp());
                    c = c.max(q);
                }
            }
            c
        };
        let base = sup(&xg, &xig);
        let wide = sup(&xg.enlarged(1.5), &xig.enlarged(1.5));
        assert!(base.is_finite() && wide <= base * (1.0 + 1e-9), "{}: {base} {wide}", f.name());
    }
}

fn comb(locs: &[i32], weights: &[(f64, f64)]) -> SignalSource {
    let atoms = locs
        .iter()
        .zip(weights)
        .map(|(&l, &(re, im))| Atom { location: l as f64 * 0.5, weight: Complex64::new(re, im) })
        .collect();
    SignalSource::atomic(atoms).unwrap()
}

fn canon(z: Complex64) -> (u64, u64) {
    ((z.re + 0.0).to_bits(), (z.im + 0.0).to_bits())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn covariance_is_bit_identical_for_atoms(
        locs in proptest::collection::btree_set(-12i32..12, 1..8),
        seed in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 8),
        h in -3i32..=3,
    ) {
        let locs: Vec<i32> = locs.into_iter().collect();
        let f = comb(&locs, &seed);
        let h = h as f64;
        let psi = Window::gaussian();
        let spec = QuadratureSpec::default();
        let xg = Grid::new(-3.0, 0.25, 25).unwrap();
        let xig = Grid::new(-1.0, 0.25, 9).unwrap();
        let lhs = forward_stft(&f.translated(h), &psi, &xg, &xig, 0.0, &spec).unwrap();
        let rhs = forward_stft(&f, &psi, &xg.shifted(h), &xig, 0.0, &spec).unwrap();
        for i in 0..xg.count() {
            for j in 0..xig.count() {
                let phase = taubex::numeric::cis_turns(xig.node(j) * h);
                prop_assert_eq!(canon(lhs.get(i, j)), canon(phase * rhs.get(i, j)));
            }
        }
    }

    #[test]
    fn covariance_off_grid_for_closed_forms(h in -2.0f64..2.0, beta in 0.0f64..0.8) {
        let f = SignalSource::exp_poly(beta);
        let psi = Window::gaussian();
        let spec = QuadratureSpec::default();
        let xg = Grid::new(-1.0, 0.5, 5).unwrap();
        let xig = Grid::new(-1.0, 0.5, 5).unwrap();
        let lhs = forward_stft(&f.translated(h), &psi, &xg, &xig, 0.0, &spec).unwrap();
        let rhs = forward_stft(&f, &psi, &xg.shifted(h), &xig, 0.0, &spec).unwrap();
        let scale = lhs.max_abs().max(1.0);
        for i in 0..xg.count() {
            for j in 0..xig.count() {
                let phase = taubex::numeric::cis_turns(xig.node(j) * h);
                // The step edge sits off the lattice after an arbitrary shift,
                // so agreement is limited by the trapezoid jump error.
                prop_assert!((lhs.get(i, j) - phase * rhs.get(i, j)).norm() < 2e-2 * scale);
            }
        }
    }

    #[test]
    fn covariance_off_grid_for_smooth_signals(h in -2.0f64..2.0) {
        let f = SignalSource::gaussian();
        let psi = Window::gaussian();
        let spec = QuadratureSpec::default();
        let xg = Grid::new(-1.0, 0.5, 5).unwrap();
        let xig = Grid::new(-1.0, 0.5, 5).unwrap();
        let lhs = forward_stft(&f.translated(h), &psi, &xg, &xig, 0.0, &spec).unwrap();
        let rhs = forward_stft(&f, &psi, &xg.shifted(h), &xig, 0.0, &spec).unwrap();
        for i in 0..xg.count() {
            for j in 0..xig.count() {
                let phase = taubex::numeric::cis_turns(xig.node(j) * h);
                prop_assert!((lhs.get(i, j) - phase * rhs.get(i, j)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn stft_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = Grid::new(-1.0, 0.5, 5).unwrap();
        let psi = Window::gaussian_pi();
        let spec = QuadratureSpec::default();
        let f1 = SignalSource::gaussian().scaled(a);
        let f2 = SignalSource::sinusoid(0.5).scaled(b);
        let m1 = forward_stft(&f1, &psi, &g, &g, 0.0, &spec).unwrap();
        let m2 = forward_stft(&f2, &psi, &g, &g, 0.0, &spec).unwrap();
        let base1 = forward_stft(&SignalSource::gaussian(), &psi, &g, &g, 0.0, &spec).unwrap();
        let base2 = forward_stft(&SignalSource::sinusoid(0.5), &psi, &g, &g, 0.0, &spec).unwrap();
        for k in 0..m1.values().len() {
            let lhs = m1.values()[k] + m2.values()[k];
            let rhs = base1.values()[k] * a + base2.values()[k] * b;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }
}

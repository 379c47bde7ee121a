use proptest::prelude::*;
use taubex::signal::Grid;
use taubex::slowvary::{ComparisonFunction, SlowlyVarying};
use taubex::weights::{
    default_probe, validate_class_m1, validate_moderate, ClassProbe, TFWeight, ViolationKind, Weight1D, WeightError,
    WeightVerdict,
};

#[test]
fn polynomial_weight_optimum() {
    let g = default_probe();
    let w = Weight1D::from_fn("sq", |x| (1.0 + x.abs()).powi(2), 1e6, 0.5);
    let WeightVerdict::Pass { a_min, .. } = validate_moderate(&w, &g, &g).unwrap() else { panic!() };
    // Oracle: sup over the probe lattice of (1 + |x + y|)^2 / (1 + |y|)^2 e^{-0.5|x|}, brute force.
    let mut best: f64 = 0.0;
    for x in g.nodes() {
        for y in g.nodes() {
            best = best.max((1.0 + (x + y).abs()).powi(2) / (1.0 + y.abs()).powi(2) * (-0.5 * x.abs()).exp());
        }
    }
    assert!((a_min - best).abs() < 1e-12 * best);
    // The continuous optimum (1 + u)^2 e^{-u/2} at u = 3 is 16 e^{-1.5}; it lies on the lattice.
    assert!((a_min - 16.0 * (-1.5f64).exp()).abs() < 1e-12);
}

#[test]
fn gaussian_growth_is_not_moderate() {
    let g = default_probe();
    // A claimed rate a only hides e^{x^2 + 2xy} on boxes smaller than about a / 3.
    for a in [0.0, 1.0, 5.0, 20.0] {
        let w = Weight1D::from_ln_fn("gauss", |x| x * x, f64::MAX, a);
        assert!(!validate_moderate(&w, &g, &g).unwrap().passed());
    }
}

#[test]
fn unbounded_ratio_is_reported_as_such() {
    let g = Grid::span(-5.0, 5.0, 0.25).unwrap();
    let w = Weight1D::from_ln_fn("gauss", |x| x * x, 1e60, 5.0);
    match validate_moderate(&w, &g, &g).unwrap() {
        WeightVerdict::Violation { kind, .. } => assert_eq!(kind, ViolationKind::Unbounded),
        v => panic!("{v:?}"),
    }
}

#[test]
fn non_positive_weight_is_an_error() {
    let g = Grid::span(-2.0, 2.0, 0.5).unwrap();
    let w = Weight1D::from_fn("sign", |x| x, 1.0, 0.0);
    assert!(matches!(validate_moderate(&w, &g, &g), Err(WeightError::NonPositive { .. })));
}

#[test]
fn comparison_tf_weight_is_in_class() {
    let c = ComparisonFunction::new(0.3, SlowlyVarying::LogShift).unwrap();
    let m = TFWeight::c_s(c, 1.0).unwrap();
    assert!(validate_class_m1(&m, &ClassProbe::default()).unwrap().passed());
}

#[test]
fn time_marginal_of_m_eps() {
    let w = TFWeight::m_eps(0.5, 0.1, 0.0).unwrap().time_marginal();
    assert!((w.value(2.0) - 1.2f64.exp()).abs() < 1e-12);
    let g = default_probe();
    assert!(validate_moderate(&w, &g, &g).unwrap().passed());
}

fn standard_weight() -> impl Strategy<Value = TFWeight> {
    let s = 0.0f64..3.0;
    prop_oneof![
        (s.clone(), 0.0f64..2.0).prop_map(|(s, a)| TFWeight::v_sa(s, a).unwrap()),
        (s.clone(), 0.0f64..2.0).prop_map(|(s, r)| TFWeight::omega_s(Weight1D::exp(r), s).unwrap()),
        (s.clone(), 0.5f64..4.0).prop_map(|(s, p)| TFWeight::omega_s(Weight1D::poly(p), s).unwrap()),
        (s.clone(), -1.0f64..1.0, 0.01f64..1.0).prop_map(|(s, b, e)| TFWeight::m_eps(b, e, s).unwrap()),
        (s, -1.0f64..1.0, prop_oneof![Just(SlowlyVarying::LogShift), Just(SlowlyVarying::LogLog)])
            .prop_map(|(s, b, l)| TFWeight::c_s(ComparisonFunction::new(b, l).unwrap(), s).unwrap()),
    ]
}

fn small_probe() -> ClassProbe {
    ClassProbe::uniform(Grid::span(-10.0, 10.0, 1.25).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn standard_weights_satisfy_their_claims(m in standard_weight()) {
        let v = validate_class_m1(&m, &small_probe()).unwrap();
        prop_assert!(v.passed(), "{}: {:?}", m.name(), v);
    }

    #[test]
    fn reciprocal_bound_holds(m in standard_weight()) {
        let v = validate_class_m1(&m.reciprocal(), &small_probe()).unwrap();
        prop_assert!(v.passed(), "{}: {:?}", m.name(), v);
    }
}

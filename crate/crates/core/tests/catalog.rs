use proptest::prelude::*;
use shapeinv::*;

fn samples() -> Vec<f64> {
    (0..100).map(|i| -10.0 + 20.0 * i as f64 / 99.0).collect()
}

#[test]
fn builtin_families_are_registered() {
    let catalog = Catalog::builtin();
    assert_eq!(catalog.names(), vec!["harmonic", "poschl_teller"]);
    assert!(matches!(lookup("morse"), Err(Error::UnknownFamily(_))));
}

#[test]
fn documented_residual_examples() {
    assert!(shape_invariance_residual(&PoschlTeller, &3.0.into(), &samples()) <= 1e-12);
    assert!(shape_invariance_residual(&Harmonic, &2.0.into(), &samples()) <= 1e-12);
}

/// Largest observed order of `max |D_h W − W′|` under halving `h`.
fn derivative_order(family: &dyn SuperpotentialFamily, g: &ParamValue) -> f64 {
    let error = |h: f64| {
        samples()
            .iter()
            .map(|&x| {
                let fd = (family.superpotential(x + h, g) - family.superpotential(x - h, g)) / (2.0 * h);
                (fd - family.superpotential_derivative(x, g)).abs()
            })
            .fold(0.0, f64::max)
    };
    (error(1e-2) / error(5e-3)).log2()
}

#[test]
fn poschl_teller_derivative_is_consistent() {
    assert!(derivative_order(&PoschlTeller, &3.0.into()) >= 1.8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn poschl_teller_is_shape_invariant(g in 0.05f64..10.0) {
        prop_assert!(shape_invariance_residual(&PoschlTeller, &g.into(), &samples()) <= 1e-12);
    }

    #[test]
    fn harmonic_is_shape_invariant(omega in 0.05f64..5.0) {
        prop_assert!(shape_invariance_residual(&Harmonic, &omega.into(), &samples()) <= 1e-12);
    }

    #[test]
    fn poschl_teller_derivative_order(g in 0.5f64..8.0) {
        prop_assert!(derivative_order(&PoschlTeller, &g.into()) >= 1.8);
    }

    #[test]
    fn kappa_is_the_shifted_remainder(g in 1.0f64..10.0) {
        let k = kappa(&PoschlTeller, &g.into()).unwrap();
        prop_assert!((k - (2.0 * g - 1.0)).abs() <= 1e-12);
    }

    #[test]
    fn parameter_values_reject_non_finite(x in prop::num::f64::ANY) {
        prop_assert_eq!(ParamValue::new(vec![x]).is_ok(), x.is_finite());
    }
}

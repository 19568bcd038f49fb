use kfrac::operator::{
    apply_operator, kernel_closed, kernel_series, rl_k_integral_with_order, OperatorParams, ValidationMode,
};
use kfrac::testfuncs::{random_params, sample_points, FunctionSpec};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = FunctionSpec> {
    prop_oneof![
        (0.1f64..3.0, 0.0f64..2.0).prop_map(|(c, p)| FunctionSpec::Power { c, p }),
        (0.1f64..3.0, -1.0f64..1.0).prop_map(|(c, lambda)| FunctionSpec::Exponential { c, lambda }),
        (0.1f64..3.0, 0.0f64..2.0).prop_map(|(a, b)| FunctionSpec::Affine { a, b }),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linear_in_the_function(
        seed in 0u64..10_000,
        f in family(),
        g in family(),
        a in 0.1f64..10.0,
        b in 0.1f64..10.0,
        x in 0.5f64..3.0,
    ) {
        let params = random_params(seed, 7).unwrap().validate().unwrap();
        let combo = FunctionSpec::constant(a).times(&f).plus(&FunctionSpec::constant(b).times(&g));
        let whole = apply_operator(&params, &combo, x, 64).unwrap().value;
        let parts = a * apply_operator(&params, &f, x, 64).unwrap().value
            + b * apply_operator(&params, &g, x, 64).unwrap().value;
        prop_assert!(rel(whole, parts) <= 1e-10, "{} vs {}", whole, parts);
    }

    #[test]
    fn monotone_in_the_function(seed in 0u64..10_000, f in family(), bump in 0.0f64..1.0, x in 0.5f64..3.0) {
        let params = random_params(seed, 8).unwrap().validate().unwrap();
        let g = f.plus(&FunctionSpec::Affine { a: 0.0, b: bump });
        for tau in sample_points(x) {
            prop_assert!(f.eval(tau) <= g.eval(tau));
        }
        let lo = apply_operator(&params, &f, x, 64).unwrap().value;
        let hi = apply_operator(&params, &g, x, 64).unwrap().value;
        prop_assert!(lo <= hi + 1e-12, "{} > {}", lo, hi);
    }

    #[test]
    fn reduces_to_the_rl_k_integral(
        alpha in 0.05f64..=2.0,
        k in 0.0f64..=3.0,
        f in family(),
        x in 0.5f64..=4.0,
    ) {
        let params = OperatorParams::new(alpha, -alpha, 0.0, 0.0, k, ValidationMode::DefinitionOnly)
            .validate()
            .unwrap();
        let general = apply_operator(&params, &f, x, 64).unwrap().value;
        let direct = rl_k_integral_with_order(alpha, k, &f, x, 64).unwrap().value;
        prop_assert!(rel(general, direct) <= 1e-10, "{} vs {}", general, direct);
    }

    #[test]
    fn kernel_series_converges_to_closed_form(seed in 0u64..10_000, ratio in 0.3f64..0.95, x in 0.5f64..3.0) {
        let params = random_params(seed, 9).unwrap().validate().unwrap();
        let tau = ratio * x;
        let z = 1.0 - ratio.powf(params.k + 1.0);
        // Near τ = 0 the series argument approaches 1 and needs more terms.
        let terms = if z <= 0.5 { 40 } else { 200 };
        let closed = kernel_closed(&params, x, tau).unwrap();
        let series = kernel_series(&params, x, tau, terms).unwrap();
        prop_assume!(z <= 0.85);
        prop_assert!(rel(series, closed) <= 1e-10, "z={} {} vs {}", z, series, closed);
    }

    #[test]
    fn error_estimate_shrinks_with_order(seed in 0u64..10_000, f in family(), x in 0.5f64..3.0) {
        let params = random_params(seed, 10).unwrap().validate().unwrap();
        let coarse = apply_operator(&params, &f, x, 16).unwrap();
        let fine = apply_operator(&params, &f, x, 64).unwrap();
        let floor = 64.0 * f64::EPSILON * fine.value.abs();
        prop_assert!(
            fine.error_estimate <= coarse.error_estimate + floor,
            "{:e} > {:e}", fine.error_estimate, coarse.error_estimate
        );
    }
}

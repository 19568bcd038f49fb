use kfrac::quadrature::{gauss_jacobi_rule, integrate};
use kfrac::specfun::beta;
use proptest::prelude::*;

const EXPONENTS: [f64; 4] = [-0.5, 0.0, 0.5, 1.0];

/// `∫₀¹ u^b (1−u)^a e^u du` by the moment expansion `Σ B(b+1+j, a+1)/j!`.
fn exp_moment(a: f64, b: f64) -> f64 {
    let mut sum = 0.0;
    let mut factorial = 1.0;
    for j in 0..40 {
        if j > 0 {
            factorial *= f64::from(j);
        }
        sum += beta(b + 1.0 + f64::from(j), a + 1.0).unwrap() / factorial;
    }
    sum
}

#[test]
fn exp_against_inverse_sqrt_weight_matches_reference() {
    // Extended-precision value from tests/golden/generate.py.
    let reference = 4.060_156_938_557_409_951_1;
    let rule = gauss_jacobi_rule(-0.5, 0.0, 16).unwrap();
    let got = integrate(&rule, f64::exp).unwrap();
    assert!(((got - reference) / reference).abs() <= 1e-14, "{got}");
    assert!(((exp_moment(-0.5, 0.0) - reference) / reference).abs() <= 1e-14);
}

#[test]
fn constant_integrates_to_zeroth_moment() {
    for &a in &EXPONENTS {
        for &b in &EXPONENTS {
            for n in [1, 7, 64, 256] {
                let rule = gauss_jacobi_rule(a, b, n).unwrap();
                let want = beta(b + 1.0, a + 1.0).unwrap();
                let got = rule.integrate(|_| 1.0).unwrap();
                assert!(((got - want) / want).abs() <= 1e-12, "a={a} b={b} n={n}");
                assert!(rule.weights().iter().all(|&w| w > 0.0));
                assert!(rule.nodes().iter().all(|&u| u > 0.0 && u < 1.0));
            }
        }
    }
}

#[test]
fn error_does_not_grow_with_order() {
    let floor = 16.0 * f64::EPSILON;
    for &a in &EXPONENTS {
        for &b in &EXPONENTS {
            let exp_ref = exp_moment(a, b);
            let recip_ref = gauss_jacobi_rule(a, b, 400).unwrap().integrate(|u| 1.0 / (1.0 + u)).unwrap();
            for n in [4, 8, 16, 32] {
                let coarse = gauss_jacobi_rule(a, b, n).unwrap();
                let fine = gauss_jacobi_rule(a, b, 2 * n).unwrap();
                for (reference, f) in [(exp_ref, f64::exp as fn(f64) -> f64), (recip_ref, |u: f64| 1.0 / (1.0 + u))] {
                    let e_coarse = (coarse.integrate(f).unwrap() - reference).abs();
                    let e_fine = (fine.integrate(f).unwrap() - reference).abs();
                    // Once both sit at rounding level the comparison is noise.
                    assert!(
                        e_fine <= e_coarse + floor * reference.abs(),
                        "a={a} b={b} n={n}: {e_fine:e} > {e_coarse:e}"
                    );
                }
            }
        }
    }
}

#[test]
fn consecutive_orders_interlace() {
    for &(a, b) in &[(-0.5, -0.5), (0.0, 0.0), (1.0, -0.5), (-0.9, 2.5)] {
        for n in 1..40 {
            let lower = gauss_jacobi_rule(a, b, n).unwrap();
            let upper = gauss_jacobi_rule(a, b, n + 1).unwrap();
            let (x, y) = (lower.nodes(), upper.nodes());
            for i in 0..n {
                assert!(y[i] < x[i] && x[i] < y[i + 1], "a={a} b={b} n={n} i={i}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_polynomials_are_integrated_exactly(
        a_idx in 0usize..4,
        b_idx in 0usize..4,
        n in 1usize..24,
        seed_coeffs in proptest::collection::vec(-1.0f64..1.0, 48),
    ) {
        let (a, b) = (EXPONENTS[a_idx], EXPONENTS[b_idx]);
        let coeffs = &seed_coeffs[..2 * n];
        let rule = gauss_jacobi_rule(a, b, n).unwrap();
        let got = rule.integrate(|u| coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)).unwrap();
        let want: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| c * beta(b + 1.0 + j as f64, a + 1.0).unwrap())
            .sum();
        let scale: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| c.abs() * beta(b + 1.0 + j as f64, a + 1.0).unwrap())
            .sum();
        // Relative to the absolute-value expansion: cancellation among the
        // moments is a property of the polynomial, not of the rule.
        prop_assert!((got - want).abs() <= 1e-10 * scale, "got {} want {}", got, want);
    }
}

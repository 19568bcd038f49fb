use kfrac::operator::{apply_operator, kernel_closed, OperatorParams, ValidationMode};
use kfrac::testfuncs::FunctionSpec;

type Params = (f64, f64, f64, f64, f64);

fn strict((alpha, beta, eta, mu, k): Params) -> kfrac::operator::ValidParams {
    OperatorParams::new(alpha, beta, eta, mu, k, ValidationMode::StrictTheorem)
        .validate()
        .unwrap()
}

// Extended-precision values from tests/golden/generate.py.
const KERNEL: [(Params, f64, f64, f64); 4] = [
    ((0.5, 0.2, -0.4, 0.1, 1.0), 2.0, 1.0, 5.714965144071626382e-1),
    ((1.7, -0.8, -1.2, 0.6, 0.5), 1.3, 0.2, 3.5840288597087857543),
    ((0.35, 0.85, -0.08, -0.45, 1.7), 2.5, 0.01, 1.6611981853602947303e+4),
    ((2.0, -0.5, -0.3, 0.2, 2.0), 0.7, 0.699, 1.9533676749334860146e-2),
];

const OPERATOR: [(Params, f64, &str, f64); 28] = [
    ((0.5, 0.2, -0.4, 0.0, 0.0), 1.0, "one", 2.0026886055356729662),
    ((0.5, 0.2, -0.4, 0.0, 0.0), 1.0, "affine:1,1", 2.9130016080518879061),
    ((0.5, 0.2, -0.4, 0.0, 0.0), 1.0, "power:2,0.5", 2.3619977326910434977),
    ((0.5, 0.2, -0.4, 0.0, 0.0), 1.0, "exp:1,0.3", 2.3088173605228386971),
    ((0.5, 0.2, -0.4, 0.1, 1.0), 2.0, "one", 1.6034789842279477498),
    ((0.5, 0.2, -0.4, 0.1, 1.0), 2.0, "affine:1,1", 3.5056007983362191534),
    ((0.5, 0.2, -0.4, 0.1, 1.0), 2.0, "power:2,0.5", 3.2882699338107541929),
    ((0.5, 0.2, -0.4, 0.1, 1.0), 2.0, "exp:1,0.3", 2.3320093013092059742),
    ((1.7, -0.8, -1.2, 0.6, 0.5), 1.3, "one", 1.3619322785949233728),
    ((1.7, -0.8, -1.2, 0.6, 0.5), 1.3, "affine:1,1", 1.9945636049500872724),
    ((1.7, -0.8, -1.2, 0.6, 0.5), 1.3, "power:2,0.5", 1.7102105105253921654),
    ((1.7, -0.8, -1.2, 0.6, 0.5), 1.3, "exp:1,0.3", 1.5733051110209384144),
    ((0.35, 0.85, -0.08, -0.45, 1.7), 2.5, "one", 1.7323241802768171276),
    ((0.35, 0.85, -0.08, -0.45, 1.7), 2.5, "affine:1,1", 3.5976326345645011409),
    ((0.35, 0.85, -0.08, -0.45, 1.7), 2.5, "power:2,0.5", 2.9104642352211512823),
    ((0.35, 0.85, -0.08, -0.45, 1.7), 2.5, "exp:1,0.3", 2.5042712749066509913),
    ((2.0, -0.5, -0.3, 0.2, 2.0), 0.7, "one", 2.7159950963522684778e-1),
    ((2.0, -0.5, -0.3, 0.2, 2.0), 0.7, "affine:1,1", 3.9367769949688971671e-1),
    ((2.0, -0.5, -0.3, 0.2, 2.0), 0.7, "power:2,0.5", 3.5952028202274491756e-1),
    ((2.0, -0.5, -0.3, 0.2, 2.0), 0.7, "exp:1,0.3", 3.1105180223564124347e-1),
    ((1.2, -1.0, -0.5, 0.3, 0.25), 3.0, "one", 1.7791366517286266719),
    ((1.2, -1.0, -0.5, 0.3, 0.25), 3.0, "affine:1,1", 4.6942804961243696223),
    ((1.2, -1.0, -0.5, 0.3, 0.25), 3.0, "power:2,0.5", 4.3886776951946501657),
    ((1.2, -1.0, -0.5, 0.3, 0.25), 3.0, "exp:1,0.3", 2.9875473880445616302),
    ((0.8, 0.5, -0.2, -0.3, 0.0), 1.0, "one", 2.4411643251612330213),
    ((0.8, 0.5, -0.2, -0.3, 0.0), 1.0, "affine:1,1", 3.2298481840594774923),
    ((0.8, 0.5, -0.2, -0.3, 0.0), 1.0, "power:2,0.5", 2.2954218559994015148),
    ((0.8, 0.5, -0.2, -0.3, 0.0), 1.0, "exp:1,0.3", 2.7023251147526606526),
];

#[test]
fn kernel_matches_reference() {
    for &(p, x, tau, want) in &KERNEL {
        let got = kernel_closed(&strict(p), x, tau).unwrap();
        assert!(((got - want) / want).abs() <= 1e-12, "{p:?} x={x} tau={tau}: {got} vs {want}");
    }
}

#[test]
fn operator_matches_reference() {
    for &(p, x, f, want) in &OPERATOR {
        let spec: FunctionSpec = f.parse().unwrap();
        let r = apply_operator(&strict(p), &spec, x, 64).unwrap();
        let err = ((r.value - want) / want).abs();
        assert!(err <= 1e-10, "{p:?} x={x} {f}: {} vs {want} ({err:e})", r.value);
        // The reported estimate bounds the true error, up to rounding.
        assert!(
            (r.value - want).abs() <= r.error_estimate + 1e-13 * want.abs(),
            "{p:?} {f}: estimate {:e} misses error {:e}",
            r.error_estimate,
            (r.value - want).abs()
        );
    }
}

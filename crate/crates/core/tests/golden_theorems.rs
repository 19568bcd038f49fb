use kfrac::inequalities::{check_instance, check_proof_steps, TheoremId, Verdict};
use kfrac::operator::{OperatorParams, ValidationMode};
use kfrac::testfuncs::{random_instance, FunctionSpec, TestInstance};

/// The instances with extended-precision references in `tests/golden/theorems.py`.
fn instances() -> Vec<TestInstance> {
    let seeded = |t, seed| random_instance(seed, t).unwrap();
    let mut out = vec![
        seeded(TheoremId::T31, 7),
        seeded(TheoremId::T32, 11),
        seeded(TheoremId::T41, 13),
        seeded(TheoremId::T42, 17),
        seeded(TheoremId::T43, 19),
    ];

    let mut weighted = seeded(TheoremId::T44, 23);
    weighted.gamma = Some(2.0);
    weighted.delta = Some(0.5);
    out.push(weighted);

    let strict = OperatorParams::new(0.5, 0.2, -0.4, 0.0, 0.0, ValidationMode::StrictTheorem);
    // f = τ + 1 over g ≡ 1 with squares in [1, 4] on (0, 1].
    out.push(TestInstance {
        theorem: TheoremId::T42,
        seed: 0,
        params: strict,
        f: FunctionSpec::Affine { a: 1.0, b: 1.0 },
        g: FunctionSpec::one(),
        m: Some(1.0),
        big_m: Some(4.0),
        p: Some(2.0),
        q: Some(2.0),
        gamma: None,
        delta: None,
        x: 1.0,
    });
    // f = τ rising, g = 1/(1+τ) falling.
    out.push(TestInstance {
        theorem: TheoremId::T44,
        seed: 0,
        params: OperatorParams::new(0.8, 0.5, -0.2, -0.3, 0.5, ValidationMode::StrictTheorem),
        f: FunctionSpec::Power { c: 1.0, p: 1.0 },
        g: FunctionSpec::Affine { a: 1.0, b: 1.0 }.pow(-1.0),
        m: None,
        big_m: None,
        p: None,
        q: None,
        gamma: Some(1.0),
        delta: Some(1.0),
        x: 2.0,
    });
    out
}

fn proof_step_instance() -> TestInstance {
    random_instance(29, TheoremId::T43).unwrap()
}

/// `(lhs, rhs)` per instance, in order.
const THEOREM_REFERENCE: [(f64, f64); 8] = [
    (1.9419701474952061871e+1, 2.7824084923636600386e+1),
    (1.5478928882207000118e+1, 1.4011190932474795754e+1),
    (4.8072686360414058272e+1, 5.7023523603008545094e+1),
    (2.4002229614002684183e+1, 2.5820083724749047832e+1),
    (3.9228778549083451468e+1, 5.6435716105873300369e+1),
    (3.2782068629329002951, 3.3250958066560271797),
    (3.0012219851574739564, 4.1196063813216147536),
    (1.7150593000135289423, 2.3640550156312356224),
];

/// `(step, lhs, rhs)` for the proof-step instance.
const STEP_REFERENCE: [(&str, f64, f64); 7] = [
    ("f-share", 8.8430314301896176753, 9.5242996819885218805),
    ("g-share", 3.8525231118295936968, 9.9625718543975620991),
    ("f-share-pow", 3.3054399518187167566e+3, 4.3557149553377347656e+3),
    ("g-share-pow", 6.8867712242652979208, 2.1972878890828045632e+1),
    ("young", 3.0353556162536241998e+1, 8.9413055505895750177e+2),
    ("power-mean-p", 1.1945589380325622044e+4, 2.2735083430729480188e+4),
    ("power-mean-q", 2.9948593073387281333e+1, 3.0834797132971529812e+1),
];

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

#[test]
fn theorem_sides_match_reference() {
    assert_eq!(instances().len(), THEOREM_REFERENCE.len());
    for (inst, &(lhs, rhs)) in instances().iter().zip(THEOREM_REFERENCE.iter()) {
        let r = check_instance(inst, 64).unwrap();
        let label = format!("{} seed {}", inst.theorem, inst.seed);
        assert!(rel(r.lhs, lhs) <= 1e-8, "{label}: lhs {} vs {lhs}", r.lhs);
        assert!(rel(r.rhs, rhs) <= 1e-8, "{label}: rhs {} vs {rhs}", r.rhs);
        assert!(r.margin >= 0.0, "{label}: margin {}", r.margin);
        assert_eq!(r.verdict, Verdict::Pass, "{label}");
    }
}

#[test]
fn proof_steps_match_reference() {
    let steps = check_proof_steps(&proof_step_instance(), 64).unwrap();
    assert_eq!(steps.len(), STEP_REFERENCE.len());
    for (s, &(name, lhs, rhs)) in steps.iter().zip(STEP_REFERENCE.iter()) {
        assert_eq!(s.step, name);
        assert!(rel(s.lhs, lhs) <= 1e-8, "{name}: lhs {} vs {lhs}", s.lhs);
        assert!(rel(s.rhs, rhs) <= 1e-8, "{name}: rhs {} vs {rhs}", s.rhs);
        assert!(s.margin >= 0.0, "{name}: margin {}", s.margin);
    }
}

/// Writes `tests/golden/instances.json` for the reference generator:
/// `cargo test --test golden_theorems -- --ignored dump_instances`.
#[test]
#[ignore]
fn dump_instances() {
    let mut all = instances();
    all.push(proof_step_instance());
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/instances.json");
    std::fs::write(path, serde_json::to_string_pretty(&all).unwrap() + "\n").unwrap();
}

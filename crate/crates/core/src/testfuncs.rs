//! Positive test functions and seeded generation of inequality scenarios.
//!
//! Functions are small expression trees over four families (power,
//! exponential, affine, tabulated) closed under sum, product and real
//! powers. Each has a textual form used on the command line and in reports:
//!
//! ```text
//! one                      1
//! power:c,p                c·τ^p
//! exp:c,λ                  c·e^{λτ}
//! affine:a,b               a + bτ
//! table:t0/v0,t1/v1,...    piecewise linear, constant outside [t0, tn]
//! sum(f;g)  prod(f;g)  pow(f;e)
//! ```

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inequalities::TheoremId;
use crate::operator::{Integrand, OperatorParams, ValidationMode};

/// Points used by the hypothesis verifiers.
pub const SAMPLE_COUNT: usize = 512;
/// Relative slack allowed when re-checking constructed sandwiches.
const SANDWICH_SLACK: f64 = 1e-12;
const MAX_DRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TestFuncError {
    #[error("cannot parse function `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("function is not positive at tau = {tau} (value {value})")]
    NotPositive { tau: f64, value: f64 },
    #[error("ratio {value} at tau = {tau} escapes [{m}, {big_m}]")]
    Sandwich { tau: f64, value: f64, m: f64, big_m: f64 },
    #[error("{which} is not {direction} near tau = {tau}")]
    Monotone {
        which: &'static str,
        direction: &'static str,
        tau: f64,
    },
    #[error("no admissible instance after {0} draws")]
    Exhausted(usize),
    #[error("instance for theorem {0} is missing {1}")]
    Missing(TheoremId, &'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FunctionSpec {
    Power { c: f64, p: f64 },
    Exponential { c: f64, lambda: f64 },
    Affine { a: f64, b: f64 },
    Tabulated { breakpoints: Vec<f64>, values: Vec<f64> },
    Sum { left: Box<FunctionSpec>, right: Box<FunctionSpec> },
    Product { left: Box<FunctionSpec>, right: Box<FunctionSpec> },
    Pow { base: Box<FunctionSpec>, exponent: f64 },
}

impl FunctionSpec {
    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::Power { c, p: 0.0 }
    }

    fn as_constant(&self) -> Option<f64> {
        match *self {
            Self::Power { c, p } if p == 0.0 => Some(c),
            _ => None,
        }
    }

    pub fn eval(&self, tau: f64) -> f64 {
        match self {
            Self::Power { c, p } => {
                if *p == 0.0 {
                    *c
                } else {
                    c * tau.powf(*p)
                }
            }
            Self::Exponential { c, lambda } => c * (lambda * tau).exp(),
            Self::Affine { a, b } => a + b * tau,
            Self::Tabulated { breakpoints, values } => interpolate(breakpoints, values, tau),
            Self::Sum { left, right } => left.eval(tau) + right.eval(tau),
            Self::Product { left, right } => left.eval(tau) * right.eval(tau),
            Self::Pow { base, exponent } => base.eval(tau).powf(*exponent),
        }
    }

    /// Pointwise sum.
    pub fn plus(&self, other: &Self) -> Self {
        Self::Sum {
            left: Box::new(self.clone()),
            right: Box::new(other.clone()),
        }
    }

    /// Pointwise product; constants fold into power-family factors.
    pub fn times(&self, other: &Self) -> Self {
        match (self, other) {
            (s, o) if s.as_constant() == Some(1.0) => o.clone(),
            (s, o) if o.as_constant() == Some(1.0) => s.clone(),
            (Self::Power { c: c1, p: p1 }, Self::Power { c: c2, p: p2 }) => Self::Power {
                c: c1 * c2,
                p: p1 + p2,
            },
            _ => Self::Product {
                left: Box::new(self.clone()),
                right: Box::new(other.clone()),
            },
        }
    }

    /// Pointwise real power. Negative exponents are allowed so that
    /// reciprocals such as `1/(1+τ)` can be written.
    pub fn pow(&self, exponent: f64) -> Self {
        if exponent == 1.0 {
            return self.clone();
        }
        match self {
            Self::Power { c, p } => Self::Power {
                c: c.powf(exponent),
                p: p * exponent,
            },
            Self::Pow { base, exponent: inner } => base.pow(inner * exponent),
            _ => Self::Pow {
                base: Box::new(self.clone()),
                exponent,
            },
        }
    }

    /// `ρ` with `f(τ) = τ^ρ·(smooth, non-zero at 0)`.
    pub fn leading_exponent(&self) -> f64 {
        match self {
            Self::Power { c, p } => {
                if *c == 0.0 {
                    0.0
                } else {
                    *p
                }
            }
            Self::Affine { a, b } if *a == 0.0 && *b != 0.0 => 1.0,
            Self::Exponential { .. } | Self::Affine { .. } | Self::Tabulated { .. } => 0.0,
            Self::Sum { left, right } => left.leading_exponent().min(right.leading_exponent()),
            Self::Product { left, right } => left.leading_exponent() + right.leading_exponent(),
            Self::Pow { base, exponent } => base.leading_exponent() * exponent,
        }
    }

    /// Abscissae where the function has a derivative jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Self::Tabulated { breakpoints, .. } => out.extend(breakpoints.iter().copied().filter(|&t| t > 0.0)),
            Self::Sum { left, right } | Self::Product { left, right } => {
                left.collect_breakpoints(out);
                right.collect_breakpoints(out);
            }
            Self::Pow { base, .. } => base.collect_breakpoints(out),
            _ => {}
        }
    }

    /// Positive and finite at every verification sample of `(0, x_max]`.
    pub fn check_positive(&self, x_max: f64) -> Result<(), TestFuncError> {
        for tau in sample_points(x_max) {
            let value = self.eval(tau);
            if !(value > 0.0) || !value.is_finite() {
                return Err(TestFuncError::NotPositive { tau, value });
            }
        }
        Ok(())
    }

    pub fn is_non_decreasing(&self, x_max: f64) -> Result<(), TestFuncError> {
        self.check_monotone(x_max, 1.0, "f", "non-decreasing")
    }

    pub fn is_non_increasing(&self, x_max: f64) -> Result<(), TestFuncError> {
        self.check_monotone(x_max, -1.0, "g", "non-increasing")
    }

    fn check_monotone(&self, x_max: f64, sign: f64, which: &'static str, direction: &'static str) -> Result<(), TestFuncError> {
        let pts = sample_points(x_max);
        for pair in pts.windows(2) {
            let (a, b) = (self.eval(pair[0]), self.eval(pair[1]));
            if sign * (b - a) < -SANDWICH_SLACK * a.abs().max(b.abs()) {
                return Err(TestFuncError::Monotone {
                    which,
                    direction,
                    tau: pair[1],
                });
            }
        }
        Ok(())
    }
}

impl Integrand for FunctionSpec {
    fn value(&self, tau: f64) -> f64 {
        self.eval(tau)
    }

    fn leading_exponent(&self) -> f64 {
        FunctionSpec::leading_exponent(self)
    }

    fn breakpoints(&self) -> Vec<f64> {
        FunctionSpec::breakpoints(self)
    }

    fn addends(&self) -> Vec<&dyn Integrand> {
        match self {
            Self::Sum { left, right } => {
                let gap = left.leading_exponent() - right.leading_exponent();
                if gap == gap.round() {
                    Vec::new()
                } else {
                    vec![&**left as &dyn Integrand, &**right as &dyn Integrand]
                }
            }
            _ => Vec::new(),
        }
    }
}

fn interpolate(ts: &[f64], vs: &[f64], tau: f64) -> f64 {
    let n = ts.len().min(vs.len());
    if n == 0 {
        return f64::NAN;
    }
    if tau <= ts[0] {
        return vs[0];
    }
    if tau >= ts[n - 1] {
        return vs[n - 1];
    }
    let i = ts[..n].partition_point(|&t| t <= tau) - 1;
    let w = (tau - ts[i]) / (ts[i + 1] - ts[i]);
    vs[i] + w * (vs[i + 1] - vs[i])
}

/// `SAMPLE_COUNT` points in `(0, x_max]`, log-spaced towards both ends.
pub fn sample_points(x_max: f64) -> Vec<f64> {
    let half = SAMPLE_COUNT / 2;
    let mut pts = Vec::with_capacity(SAMPLE_COUNT);
    for i in 0..half {
        // 10^{-8} … 1/2 of x_max towards the origin.
        let e = -8.0 + (8.0 - 2f64.log10()) * i as f64 / (half - 1) as f64;
        pts.push(x_max * 10f64.powf(e));
    }
    for i in 0..half {
        // Distances 1/2 … 0 from x_max, the last point being x_max itself.
        let gap = if i + 1 == half {
            0.0
        } else {
            0.5 * 10f64.powf(-8.0 * i as f64 / (half - 2) as f64)
        };
        pts.push(x_max * (1.0 - gap));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { c, p } if *c == 1.0 && *p == 0.0 => write!(f, "one"),
            Self::Power { c, p } => write!(f, "power:{c},{p}"),
            Self::Exponential { c, lambda } => write!(f, "exp:{c},{lambda}"),
            Self::Affine { a, b } => write!(f, "affine:{a},{b}"),
            Self::Tabulated { breakpoints, values } => {
                write!(f, "table:")?;
                for (i, (t, v)) in breakpoints.iter().zip(values).enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{t}/{v}")?;
                }
                Ok(())
            }
            Self::Sum { left, right } => write!(f, "sum({left};{right})"),
            Self::Product { left, right } => write!(f, "prod({left};{right})"),
            Self::Pow { base, exponent } => write!(f, "pow({base};{exponent})"),
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = TestFuncError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        parse_spec(input.trim()).map_err(|reason| TestFuncError::Parse {
            input: input.to_string(),
            reason,
        })
    }
}

fn numbers(body: &str, count: usize) -> Result<Vec<f64>, String> {
    let vals: Vec<f64> = body
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}")))
        .collect::<Result<_, _>>()?;
    if vals.len() != count {
        return Err(format!("expected {count} numbers, got {}", vals.len()));
    }
    if let Some(bad) = vals.iter().find(|v| !v.is_finite()) {
        return Err(format!("non-finite parameter {bad}"));
    }
    Ok(vals)
}

/// Splits `a;b` at the single top-level semicolon.
fn split_args(body: &str) -> Result<(&str, &str), String> {
    let mut depth = 0i32;
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ';' if depth == 0 => return Ok((&body[..i], &body[i + 1..])),
            _ => {}
        }
    }
    Err("expected two arguments separated by `;`".into())
}

fn parse_spec(s: &str) -> Result<FunctionSpec, String> {
    if s == "one" {
        return Ok(FunctionSpec::one());
    }
    for (name, ctor) in [("sum(", 0), ("prod(", 1), ("pow(", 2)] {
        if let Some(rest) = s.strip_prefix(name) {
            let inner = rest.strip_suffix(')').ok_or("missing `)`")?;
            let (a, b) = split_args(inner)?;
            let left = parse_spec(a.trim())?;
            return Ok(match ctor {
                0 => FunctionSpec::Sum {
                    left: Box::new(left),
                    right: Box::new(parse_spec(b.trim())?),
                },
                1 => FunctionSpec::Product {
                    left: Box::new(left),
                    right: Box::new(parse_spec(b.trim())?),
                },
                _ => {
                    let e: f64 = b.trim().parse().map_err(|e| format!("exponent: {e}"))?;
                    FunctionSpec::Pow {
                        base: Box::new(left),
                        exponent: e,
                    }
                }
            });
        }
    }
    let (family, body) = s.split_once(':').ok_or("expected `family:params` or `one`")?;
    match family {
        "power" => {
            let v = numbers(body, 2)?;
            Ok(FunctionSpec::Power { c: v[0], p: v[1] })
        }
        "exp" => {
            let v = numbers(body, 2)?;
            Ok(FunctionSpec::Exponential { c: v[0], lambda: v[1] })
        }
        "affine" => {
            let v = numbers(body, 2)?;
            Ok(FunctionSpec::Affine { a: v[0], b: v[1] })
        }
        "table" => {
            let mut breakpoints = Vec::new();
            let mut values = Vec::new();
            for pair in body.split(',') {
                let (t, v) = pair.split_once('/').ok_or("table entries are `t/v`")?;
                breakpoints.push(t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"))?);
                values.push(v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"))?);
            }
            if breakpoints.len() < 2 {
                return Err("a table needs at least two entries".into());
            }
            if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
                return Err("table abscissae must increase strictly".into());
            }
            if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
                return Err("table entries must be finite".into());
            }
            Ok(FunctionSpec::Tabulated { breakpoints, values })
        }
        other => Err(format!("unknown family `{other}`")),
    }
}

/// One randomized scenario for one theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestInstance {
    pub theorem: TheoremId,
    pub seed: u64,
    pub params: OperatorParams,
    pub f: FunctionSpec,
    pub g: FunctionSpec,
    pub m: Option<f64>,
    #[serde(rename = "M")]
    pub big_m: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub x: f64,
}

impl TestInstance {
    pub fn bounds(&self) -> Result<(f64, f64), TestFuncError> {
        match (self.m, self.big_m) {
            (Some(m), Some(big_m)) => Ok((m, big_m)),
            _ => Err(TestFuncError::Missing(self.theorem, "m and M")),
        }
    }

    pub fn exponent_p(&self) -> Result<f64, TestFuncError> {
        self.p.ok_or(TestFuncError::Missing(self.theorem, "p"))
    }

    pub fn exponent_q(&self) -> Result<f64, TestFuncError> {
        self.q.ok_or(TestFuncError::Missing(self.theorem, "q"))
    }

    /// Re-checks the theorem's hypothesis on the verification samples.
    pub fn verify(&self) -> Result<(), TestFuncError> {
        self.f.check_positive(self.x)?;
        self.g.check_positive(self.x)?;
        match self.theorem {
            TheoremId::T44 => {
                self.f.is_non_decreasing(self.x)?;
                self.g.is_non_increasing(self.x)
            }
            TheoremId::T42 => {
                let (m, big_m) = self.bounds()?;
                let (p, q) = (self.exponent_p()?, self.exponent_q()?);
                check_sandwich(|t| self.f.eval(t).powf(p) / self.g.eval(t).powf(q), m, big_m, self.x)
            }
            _ => {
                let (m, big_m) = self.bounds()?;
                check_sandwich(|t| self.f.eval(t) / self.g.eval(t), m, big_m, self.x)
            }
        }
    }
}

fn check_sandwich(ratio: impl Fn(f64) -> f64, m: f64, big_m: f64, x_max: f64) -> Result<(), TestFuncError> {
    for tau in sample_points(x_max) {
        let value = ratio(tau);
        if !(value >= m * (1.0 - SANDWICH_SLACK) && value <= big_m * (1.0 + SANDWICH_SLACK)) {
            return Err(TestFuncError::Sandwich { tau, value, m, big_m });
        }
    }
    Ok(())
}

/// `f = ratio·g`, after checking that `ratio` stays in `[m, M]` and `g > 0`.
pub fn make_ratio_pair(
    g: &FunctionSpec,
    ratio: &FunctionSpec,
    m: f64,
    big_m: f64,
    x_max: f64,
) -> Result<(FunctionSpec, FunctionSpec), TestFuncError> {
    g.check_positive(x_max)?;
    check_sandwich(|t| ratio.eval(t), m, big_m, x_max)?;
    let f = ratio.times(g);
    check_sandwich(|t| f.eval(t) / g.eval(t), m, big_m, x_max)?;
    Ok((f, g.clone()))
}

/// A non-decreasing `f` and a non-increasing `g`, drawn from `seed`.
pub fn make_monotone_pair(seed: u64) -> (FunctionSpec, FunctionSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw_monotone_pair(&mut rng, 3.0)
}

fn draw_monotone_pair(rng: &mut ChaCha8Rng, x_max: f64) -> (FunctionSpec, FunctionSpec) {
    let c_f = rng.gen_range(0.5..2.0);
    let f = match rng.gen_range(0..3) {
        0 => FunctionSpec::Power {
            c: c_f,
            p: rng.gen_range(0.0..2.0),
        },
        1 => FunctionSpec::Exponential {
            c: c_f,
            lambda: rng.gen_range(0.0..1.0),
        },
        _ => monotone_table(rng, x_max, 0.5, 2.0, true),
    };
    let c_g = rng.gen_range(0.5..2.0);
    let g = match rng.gen_range(0..3) {
        0 => FunctionSpec::constant(c_g).times(&FunctionSpec::Affine { a: 1.0, b: 1.0 }.pow(-rng.gen_range(0.2..2.0))),
        1 => FunctionSpec::Exponential {
            c: c_g,
            lambda: -rng.gen_range(0.0..1.0),
        },
        _ => monotone_table(rng, x_max, 0.5, 2.0, false),
    };
    (f, g)
}

/// Tabulated function on `[0, x_max]` with values in `[lo, hi]`,
/// monotone in the requested direction.
fn monotone_table(rng: &mut ChaCha8Rng, x_max: f64, lo: f64, hi: f64, increasing: bool) -> FunctionSpec {
    let interior = rng.gen_range(2..6);
    let mut breakpoints: Vec<f64> = (0..interior).map(|_| rng.gen_range(0.1..0.9) * x_max).collect();
    breakpoints.push(0.0);
    breakpoints.push(x_max);
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();
    let mut values: Vec<f64> = (0..breakpoints.len()).map(|_| rng.gen_range(lo..hi)).collect();
    values.sort_by(f64::total_cmp);
    if !increasing {
        values.reverse();
    }
    FunctionSpec::Tabulated { breakpoints, values }
}

fn free_table(rng: &mut ChaCha8Rng, x_max: f64, lo: f64, hi: f64) -> FunctionSpec {
    let interior = rng.gen_range(2..6);
    let mut breakpoints: Vec<f64> = (0..interior).map(|_| rng.gen_range(0.1..0.9) * x_max).collect();
    breakpoints.push(0.0);
    breakpoints.push(x_max);
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();
    let values = (0..breakpoints.len()).map(|_| rng.gen_range(lo..hi)).collect();
    FunctionSpec::Tabulated { breakpoints, values }
}

/// A positive base function on `(0, x_max]`.
fn draw_base(rng: &mut ChaCha8Rng, x_max: f64) -> FunctionSpec {
    let c = rng.gen_range(0.5..2.0);
    match rng.gen_range(0..4) {
        0 => FunctionSpec::Power {
            c,
            p: rng.gen_range(0.0..2.0),
        },
        1 => FunctionSpec::Exponential {
            c,
            lambda: rng.gen_range(-1.0..1.0),
        },
        2 => FunctionSpec::Affine {
            a: c,
            b: rng.gen_range(0.0..2.0),
        },
        _ => free_table(rng, x_max, 0.5, 2.0),
    }
}

/// A ratio with values in `[m, M]` on `[0, x_max]`.
fn draw_ratio(rng: &mut ChaCha8Rng, m: f64, big_m: f64, x_max: f64) -> FunctionSpec {
    let span = big_m - m;
    match rng.gen_range(0..5) {
        0 => FunctionSpec::constant(rng.gen_range(m..=big_m)),
        1 => {
            // Monotone affine through both bounds, either direction.
            if rng.gen_bool(0.5) {
                FunctionSpec::Affine { a: m, b: span / x_max }
            } else {
                FunctionSpec::Affine {
                    a: big_m,
                    b: -span / x_max,
                }
            }
        }
        2 => FunctionSpec::Exponential {
            c: m,
            lambda: (big_m / m).ln() / x_max,
        },
        3 => {
            let j = f64::from(rng.gen_range(1..=3));
            FunctionSpec::constant(m).plus(&FunctionSpec::Power {
                c: span / x_max.powf(j),
                p: j,
            })
        }
        _ => free_table(rng, x_max, m, big_m),
    }
}

fn draw_params(rng: &mut ChaCha8Rng) -> Result<OperatorParams, TestFuncError> {
    for _ in 0..MAX_DRAWS {
        let alpha = rng.gen_range(0.3..=2.0);
        let beta = rng.gen_range(-1.0..0.9);
        let mu = rng.gen_range(-0.5..=1.0);
        let eta = rng.gen_range((beta - 1.0 + 0.05)..-0.05);
        let k = rng.gen_range(0.0..=2.0);
        let params = OperatorParams::new(alpha, beta, eta, mu, k, ValidationMode::StrictTheorem);
        if params.validate().is_ok() {
            return Ok(params);
        }
    }
    Err(TestFuncError::Exhausted(MAX_DRAWS))
}

/// Strict-window parameters drawn from `(seed, stream)`, the same
/// distribution the instance generator uses.
pub fn random_params(seed: u64, stream: u64) -> Result<OperatorParams, TestFuncError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    draw_params(&mut rng)
}

/// The instance for `(seed, theorem)`; a pure function of both.
pub fn random_instance(seed: u64, theorem: TheoremId) -> Result<TestInstance, TestFuncError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(theorem.index() as u64);
    let params = draw_params(&mut rng)?;
    let x = rng.gen_range(0.5..=3.0);

    let mut inst = TestInstance {
        theorem,
        seed,
        params,
        f: FunctionSpec::one(),
        g: FunctionSpec::one(),
        m: None,
        big_m: None,
        p: None,
        q: None,
        gamma: None,
        delta: None,
        x,
    };

    if theorem == TheoremId::T44 {
        let (f, g) = draw_monotone_pair(&mut rng, x);
        inst.f = f;
        inst.g = g;
        inst.gamma = Some(rng.gen_range(0.5..=3.0));
        inst.delta = Some(rng.gen_range(0.5..=3.0));
        inst.verify()?;
        return Ok(inst);
    }

    let (m, big_m) = loop {
        let a: f64 = rng.gen_range(0.2..=5.0);
        let b: f64 = rng.gen_range(0.2..=5.0);
        if (a - b).abs() > 1e-3 {
            break (a.min(b), a.max(b));
        }
    };
    let p = rng.gen_range(1.1..=4.0);
    let q = p / (p - 1.0);
    inst.m = Some(m);
    inst.big_m = Some(big_m);
    inst.p = Some(p);
    if theorem != TheoremId::T31 && theorem != TheoremId::T32 {
        inst.q = Some(q);
    }
    let g = draw_base(&mut rng, x);
    let ratio = draw_ratio(&mut rng, m, big_m, x);
    if theorem == TheoremId::T42 {
        // f^p / g^q = ratio.
        inst.f = ratio.times(&g.pow(q)).pow(1.0 / p);
        inst.g = g;
    } else {
        let (f, g) = make_ratio_pair(&g, &ratio, m, big_m, x)?;
        inst.f = f;
        inst.g = g;
    }
    inst.verify()?;
    Ok(inst)
}

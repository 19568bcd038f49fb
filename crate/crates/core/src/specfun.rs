//! Real special functions used by the operator kernel: gamma and its
//! logarithm, digamma, Pochhammer symbols, Beta, and the Gauss
//! hypergeometric function `₂F₁(a, b; c; z)` for real `z ∈ [0, 1]`.
//!
//! The hypergeometric evaluator sums the defining series directly for
//! `z ≤ 0.9` and switches to the `z → 1 − z` connection formula above that,
//! which keeps the number of terms small near `z = 1` where the operator's
//! quadrature nodes cluster. When `c − a − b` is an integer the connection
//! formula degenerates; that case is handled by the logarithmic series and,
//! for arguments merely close to an integer, by interpolation in `c`.

use std::f64::consts::PI;

use thiserror::Error;

/// Relative size of a series term below which summation stops.
const SERIES_TOL: f64 = 1e-16;
/// Hard cap on the number of series terms.
const SERIES_MAX_TERMS: usize = 10_000;
/// Direct summation is used up to this argument.
const DIRECT_LIMIT: f64 = 0.9;
/// `c − a − b` closer than this to an integer takes the degenerate path.
const NEAR_INTEGER: f64 = 1e-3;
/// Node spacing (in `c`) for the interpolation around an integer `c − a − b`.
const INTERP_STEP: f64 = 2e-3;

const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_COEFFS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("{function}: argument {value} outside the domain ({reason})")]
    Domain {
        function: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("2F1({a}, {b}; {c}; 1) diverges: c - a - b = {excess} <= 0")]
    Divergent { a: f64, b: f64, c: f64, excess: f64 },
    #[error("hypergeometric series did not converge within {terms} terms at z = {z}")]
    NonConvergence { z: f64, terms: usize },
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `sin(πx)` with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// `π / tan(πx)`.
fn pi_cot_pi(x: f64) -> f64 {
    let r = x - x.round();
    PI / (PI * r).tan()
}

fn lanczos_gamma(x: f64) -> f64 {
    debug_assert!(x >= 0.5);
    let mut series = 0.999_999_999_999_997_092;
    let mut y = x;
    for c in LANCZOS_COEFFS {
        y += 1.0;
        series += c / y;
    }
    let t = x + LANCZOS_G;
    // t^(x+1/2) overflows well before Γ(x) does, so split the power.
    let half_power = t.powf(0.5 * (x + 0.5));
    SQRT_TWO_PI * series / x * (half_power * (-t).exp()) * half_power
}

fn gamma_positive(x: f64) -> f64 {
    if x == x.floor() && x <= 171.0 {
        let n = x as u32;
        return (2..n).fold(1.0, |acc, i| acc * f64::from(i));
    }
    if x < 0.5 {
        return lanczos_gamma(x + 1.0) / x;
    }
    if x > 171.624 {
        return f64::INFINITY;
    }
    lanczos_gamma(x)
}

/// Γ(x) for any real `x`; `NaN` at the poles `0, −1, −2, …`.
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() || is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x > 0.0 {
        gamma_positive(x)
    } else {
        PI / (sin_pi(x) * gamma_positive(1.0 - x))
    }
}

/// 1/Γ(x), which is entire: exactly zero at the poles of Γ.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    let g = gamma(x);
    if g.is_infinite() {
        0.0
    } else {
        1.0 / g
    }
}

fn stirling_ln_gamma(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let correction = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    (x - 0.5) * (x.ln() - 1.0) + (0.5 * (2.0 * PI).ln() - 0.5) + correction
}

/// ln Γ(x) for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64, SpecFunError> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(SpecFunError::Domain {
            function: "log_gamma",
            value: x,
            reason: "x must be positive and finite",
        });
    }
    Ok(ln_gamma_positive(x))
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        ln_gamma_positive(x + 1.0) - x.ln()
    } else if x <= 171.0 {
        gamma_positive(x).ln()
    } else {
        stirling_ln_gamma(x)
    }
}

/// `(ln|Γ(x)|, sign Γ(x))` for any non-pole real `x`.
fn ln_gamma_abs(x: f64) -> (f64, f64) {
    if x > 0.0 {
        (ln_gamma_positive(x), 1.0)
    } else {
        let s = sin_pi(x);
        (
            PI.ln() - s.abs().ln() - ln_gamma_positive(1.0 - x),
            s.signum(),
        )
    }
}

/// `Π Γ(num) / Π Γ(den)`, zero when a denominator argument sits on a pole.
/// Falls back to log space when a factor overflows.
pub(crate) fn gamma_ratio(num: &[f64], den: &[f64]) -> f64 {
    if den.iter().any(|&x| is_nonpositive_integer(x)) {
        return 0.0;
    }
    let direct = num.iter().map(|&x| gamma(x)).product::<f64>()
        * den.iter().map(|&x| recip_gamma(x)).product::<f64>();
    if direct.is_finite() && direct != 0.0 {
        return direct;
    }
    if num.iter().any(|&x| is_nonpositive_integer(x)) {
        return f64::NAN;
    }
    let mut log_sum = 0.0;
    let mut sign = 1.0;
    for &x in num {
        let (l, s) = ln_gamma_abs(x);
        log_sum += l;
        sign *= s;
    }
    for &x in den {
        let (l, s) = ln_gamma_abs(x);
        log_sum -= l;
        sign *= s;
    }
    sign * log_sum.exp()
}

/// Digamma ψ(x) = Γ'(x)/Γ(x); `NaN` at the poles.
pub fn digamma(x: f64) -> f64 {
    if x.is_nan() || is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x < 0.5 {
        return digamma(1.0 - x) - pi_cot_pi(x);
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 16.0 {
        shift -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let tail = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    shift + y.ln() - 0.5 / y - tail
}

/// Rising factorial `a (a+1) ··· (a+n−1)`; `(a)_0 = 1`.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (a + f64::from(i)))
}

/// Euler Beta function `Γ(p)Γ(q)/Γ(p+q)`.
pub fn beta(p: f64, q: f64) -> Result<f64, SpecFunError> {
    for v in [p, q] {
        if !(v > 0.0) || v.is_infinite() {
            return Err(SpecFunError::Domain {
                function: "beta",
                value: v,
                reason: "arguments must be positive and finite",
            });
        }
    }
    if p + q < 171.0 {
        let direct = gamma_positive(p) * gamma_positive(q) / gamma_positive(p + q);
        if direct.is_finite() {
            return Ok(direct);
        }
    }
    Ok((ln_gamma_positive(p) + ln_gamma_positive(q) - ln_gamma_positive(p + q)).exp())
}

/// Arguments of `₂F₁(a, b; c; z)` restricted to the real segment `z ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeomArgs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl HypergeomArgs {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        Self { a, b, c, z }
    }
}

/// Gauss hypergeometric function on `z ∈ [0, 1]`.
pub fn gauss_2f1(args: &HypergeomArgs) -> Result<f64, SpecFunError> {
    let HypergeomArgs { a, b, c, z } = *args;
    if !(0.0..=1.0).contains(&z) {
        return Err(SpecFunError::Domain {
            function: "gauss_2f1",
            value: z,
            reason: "z must lie in [0, 1]",
        });
    }
    if z > 0.5 {
        // 1 − z is exact for z in [0.5, 1].
        hyp2f1_complement(a, b, c, 1.0 - z)
    } else {
        check_params(a, b, c)?;
        let (a, b) = ordered(a, b);
        if z == 0.0 || a == 0.0 || b == 0.0 {
            return Ok(1.0);
        }
        series(a, b, c, z)
    }
}

/// `₂F₁(a, b; c; 1 − w)` for `w ∈ [0, 1]`, taking the distance from the
/// singular point directly so that tiny `w` keeps full relative precision.
pub fn hyp2f1_complement(a: f64, b: f64, c: f64, w: f64) -> Result<f64, SpecFunError> {
    if !(0.0..=1.0).contains(&w) {
        return Err(SpecFunError::Domain {
            function: "hyp2f1_complement",
            value: w,
            reason: "w must lie in [0, 1]",
        });
    }
    check_params(a, b, c)?;
    // Ordering the upper parameters makes the result exactly symmetric in (a, b).
    let (a, b) = ordered(a, b);
    let z = 1.0 - w;
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return series(a, b, c, z);
    }
    let excess = c - a - b;
    if w == 0.0 {
        if excess > 0.0 {
            return Ok(gamma_ratio(&[c, excess], &[c - a, c - b]));
        }
        return Err(SpecFunError::Divergent { a, b, c, excess });
    }
    if z <= DIRECT_LIMIT {
        return series(a, b, c, z);
    }
    let nearest = excess.round();
    let offset = excess - nearest;
    if offset.abs() >= NEAR_INTEGER {
        return connection(a, b, c, w);
    }
    // Degenerate case: logarithmic series at the integer, general formula at
    // nearby non-integer c, polynomial interpolation to the requested c.
    let m = nearest as i64;
    let base = a + b + nearest;
    let nodes: Vec<f64> = (-3..=3).map(|j| f64::from(j) * INTERP_STEP).collect();
    let mut values = Vec::with_capacity(nodes.len());
    for &node in &nodes {
        let v = if node == 0.0 {
            integer_excess(a, b, m, w)?
        } else {
            connection(a, b, base + node, w)?
        };
        values.push(v);
    }
    Ok(lagrange(&nodes, &values, offset))
}

fn check_params(a: f64, b: f64, c: f64) -> Result<(), SpecFunError> {
    if let Some(&bad) = [a, b, c].iter().find(|v| !v.is_finite()) {
        return Err(SpecFunError::Domain {
            function: "gauss_2f1",
            value: bad,
            reason: "parameters must be finite",
        });
    }
    if is_nonpositive_integer(c) {
        return Err(SpecFunError::Domain {
            function: "gauss_2f1",
            value: c,
            reason: "c must not be a non-positive integer",
        });
    }
    Ok(())
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if b < a {
        (b, a)
    } else {
        (a, b)
    }
}

/// Plain power series with the term-ratio recurrence.
pub(crate) fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64, SpecFunError> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        term *= ratio;
        sum += term;
        if term == 0.0 || (term.abs() <= SERIES_TOL * sum.abs() && ratio.abs() < 1.0) {
            return Ok(sum);
        }
    }
    Err(SpecFunError::NonConvergence {
        z,
        terms: SERIES_MAX_TERMS,
    })
}

/// Connection coefficients of `₂F₁(a,b;c;1−w) = A·F₁(w) + B·w^d·F₂(w)`
/// with `d = c − a − b` non-integer.
pub(crate) fn connection_coefficients(a: f64, b: f64, c: f64) -> (f64, f64) {
    let d = c - a - b;
    let first = gamma_ratio(&[c, d], &[c - a, c - b]);
    let second = gamma_ratio(&[c, -d], &[a, b]);
    (first, second)
}

fn connection(a: f64, b: f64, c: f64, w: f64) -> Result<f64, SpecFunError> {
    let d = c - a - b;
    let (first, second) = connection_coefficients(a, b, c);
    let mut value = first * series(a, b, 1.0 - d, w)?;
    if second != 0.0 {
        value += second * w.powf(d) * series(c - a, c - b, 1.0 + d, w)?;
    }
    Ok(value)
}

/// `₂F₁(a, b; a+b+m; 1−w)` for integer `m`, via the logarithmic expansions
/// about `z = 1`. Requires `a`, `b` not non-positive integers and `w < 1`.
fn integer_excess(a: f64, b: f64, m: i64, w: f64) -> Result<f64, SpecFunError> {
    let ln_w = w.ln();
    let order = m.unsigned_abs() as usize;
    let mf = order as f64;
    let factorial = |k: usize| (1..=k).fold(1.0, |acc, i| acc * i as f64);

    // Finite part: Σ_{n<|m|} (p)_n (q)_n / (n! (1−|m|)_n) w^n.
    let finite = |p: f64, q: f64| {
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 0..order {
            sum += term;
            if n + 1 < order {
                let nf = n as f64;
                term *= (p + nf) * (q + nf) / ((nf + 1.0) * (1.0 - mf + nf)) * w;
            }
        }
        sum
    };

    // Logarithmic part: Σ (p)_n (q)_n / (n! (n+|m|)!) w^n [ln w − ψ(n+1) − ψ(n+|m|+1) + ψ(p+n) + ψ(q+n)].
    let logarithmic = |p: f64, q: f64| -> Result<f64, SpecFunError> {
        let mut coeff = 1.0 / factorial(order);
        let mut psi_n1 = -EULER_GAMMA;
        let mut psi_nm1 = digamma(mf + 1.0);
        let mut psi_p = digamma(p);
        let mut psi_q = digamma(q);
        let mut sum = 0.0;
        for n in 0..SERIES_MAX_TERMS {
            let nf = n as f64;
            let term = coeff * (ln_w - psi_n1 - psi_nm1 + psi_p + psi_q);
            sum += term;
            if n > 2 && term.abs() <= SERIES_TOL * sum.abs() && coeff.abs() <= SERIES_TOL * sum.abs()
            {
                return Ok(sum);
            }
            coeff *= (p + nf) * (q + nf) / ((nf + 1.0) * (nf + mf + 1.0)) * w;
            psi_n1 += 1.0 / (nf + 1.0);
            psi_nm1 += 1.0 / (nf + mf + 1.0);
            psi_p += 1.0 / (p + nf);
            psi_q += 1.0 / (q + nf);
        }
        Err(SpecFunError::NonConvergence {
            z: 1.0 - w,
            terms: SERIES_MAX_TERMS,
        })
    };

    if m >= 0 {
        let c = a + b + mf;
        let head = if order > 0 {
            gamma_ratio(&[mf, c], &[a + mf, b + mf]) * finite(a, b)
        } else {
            0.0
        };
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        let tail = sign * w.powi(order as i32) * gamma_ratio(&[c], &[a, b]) * logarithmic(a + mf, b + mf)?;
        Ok(head - tail)
    } else {
        let c = a + b - mf;
        let head = gamma_ratio(&[mf, c], &[a, b]) * w.powi(-(order as i32)) * finite(a - mf, b - mf);
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        let tail = sign * gamma_ratio(&[c], &[a - mf, b - mf]) * logarithmic(a, b)?;
        Ok(head - tail)
    }
}

/// Lagrange interpolation through `(nodes[i], values[i])`, evaluated at `at`.
pub(crate) fn lagrange(nodes: &[f64], values: &[f64], at: f64) -> f64 {
    lagrange_weights(nodes, at)
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum()
}

pub(crate) fn lagrange_weights(nodes: &[f64], at: f64) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &xi)| (at - xi) / (xj - xi))
                .product()
        })
        .collect()
}

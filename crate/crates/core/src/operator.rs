//! The generalized k-fractional integral with a Gauss hypergeometric kernel,
//!
//! ```text
//! I[f](x) = (k+1)^{μ+β+1} x^{(k+1)(−α−β−2μ)} / Γ(α)
//!           ∫₀ˣ τ^{(k+1)μ} (x^{k+1} − τ^{k+1})^{α−1}
//!               ₂F₁(α+β+μ, −η; α; 1 − (τ/x)^{k+1}) τ^k f(τ) dτ,
//! ```
//!
//! together with its kernel, the Riemann–Liouville special case and the
//! closed-form image of the constant function.
//!
//! # Discretization
//!
//! With `u = (τ/x)^{k+1}` the measure `τ^{(k+1)μ} τ^k dτ` becomes
//! `x^{(k+1)(μ+1)} u^μ du / (k+1)` and the difference becomes
//! `x^{(k+1)(α−1)} (1−u)^{α−1}`, so
//!
//! ```text
//! I[f](x) = P ∫₀¹ u^μ (1−u)^{α−1} H(u) f(x u^{1/(k+1)}) du,
//! P = (k+1)^{μ+β} x^{−(k+1)(β+μ)} / Γ(α),   H(u) = ₂F₁(a, b; α; 1−u),
//! ```
//!
//! with `a = α+β+μ`, `b = −η`. `H` is analytic on `(0, 1]` but at `u = 0`
//! behaves like `A·F₁(u) + B·u^d·F₂(u)` with `d = η − β − μ`, so a single
//! Jacobi rule on `[0, 1]` converges only algebraically. The integral is
//! therefore split:
//!
//! * `[0, u₀]` with `u = u₀ s^{k+1}`: each connection-formula component gets
//!   its own Jacobi weight `s^{(k+1)(μ+e)+k}` (`e = 0` or `d`), leaving
//!   `F₁`, `F₂` and `f` smooth in `s`. A leading power `τ^ρ` of `f` is moved
//!   into the weight as well. When `d` is within `10⁻³` of an integer the
//!   two components cancel catastrophically; the panel is then evaluated
//!   at six nearby values of `c` and interpolated back.
//! * `[u₀, 1]`: Gauss–Legendre panels (geometric towards `u₀`, and cut at
//!   the breakpoints of piecewise-defined integrands), the last one carrying
//!   the Jacobi weight `(1−u)^{α−1}`; `H` is evaluated pointwise.
//!
//! Every rule is applied at order `n` and `2n`; the reported value is the
//! `2n` result and the error estimate is their difference.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimate::Estimate;
use crate::quadrature::{gauss_jacobi_rule, JacobiRule, QuadratureError};
use crate::specfun::{
    connection_coefficients, gamma_ratio, hyp2f1_complement, lagrange_weights, log_gamma, series,
    SpecFunError,
};

/// Default base quadrature order.
pub const DEFAULT_ORDER: usize = 64;
/// Largest base order accepted by [`apply_operator`].
pub const MAX_OPERATOR_ORDER: usize = 256;

/// Smallest accepted `α`.
pub const MIN_ALPHA: f64 = 0.05;
/// Smallest accepted exponent of `u` at the origin, for both `μ` and the
/// effective exponent `μ + min(0, d)`.
pub const MIN_ORIGIN_EXPONENT: f64 = -0.95;

/// Right end of the substituted left panel, unless a breakpoint comes first.
const LEFT_PANEL_END: f64 = 1.0 / 16.0;
/// `d` this close to an integer takes the interpolated path.
const NEAR_INTEGER: f64 = 1e-3;
/// Power of the extra substitution on the left panel.
const LEFT_GRADING: f64 = 2.0;
/// Spacing in `d` of the interpolation nodes.
const INTERP_STEP: f64 = 2e-3;
const INTERP_OFFSETS: [f64; 6] = [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ValidationMode {
    /// The parameter window under which the inequalities are stated.
    #[default]
    StrictTheorem,
    /// Only what the definition needs to be a finite integral.
    DefinitionOnly,
}

impl fmt::Display for ValidationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::StrictTheorem => "strict-theorem",
            Self::DefinitionOnly => "definition-only",
        })
    }
}

impl std::str::FromStr for ValidationMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict-theorem" => Ok(Self::StrictTheorem),
            "definition-only" => Ok(Self::DefinitionOnly),
            other => Err(format!("unknown mode `{other}` (expected strict-theorem or definition-only)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub mu: f64,
    pub k: f64,
    #[serde(default)]
    pub mode: ValidationMode,
}

/// One failed admissibility constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: &'static str,
    pub actual: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (got {})", self.constraint, self.actual)
    }
}

fn list(violations: &[Violation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("invalid operator parameters: {}", list(.0))]
    Invalid(Vec<Violation>),
    #[error("{what} = {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },
    #[error("quadrature order {0} outside 1..={MAX_OPERATOR_ORDER}")]
    Order(usize),
    #[error("integrand exponent {exponent} at the origin is not integrable")]
    NotIntegrable { exponent: f64 },
    #[error("integrand is not finite at tau = {tau} (value {value})")]
    Evaluation { tau: f64, value: f64 },
    #[error("non-finite result: {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

impl OperatorParams {
    pub fn new(alpha: f64, beta: f64, eta: f64, mu: f64, k: f64, mode: ValidationMode) -> Self {
        Self {
            alpha,
            beta,
            eta,
            mu,
            k,
            mode,
        }
    }

    /// `d = c − a − b = η − β − μ`, the exponent of the kernel's branch at `τ = 0`.
    pub fn excess(&self) -> f64 {
        self.eta - self.beta - self.mu
    }

    /// Checks the constraints of `self.mode`, reporting every violation.
    pub fn validate(&self) -> Result<ValidParams, OperatorError> {
        let p = self;
        let mut bad = Vec::new();
        let mut require = |ok: bool, constraint: &'static str, actual: f64| {
            if !ok {
                bad.push(Violation { constraint, actual });
            }
        };
        for (name, v) in [
            ("alpha finite", p.alpha),
            ("beta finite", p.beta),
            ("eta finite", p.eta),
            ("mu finite", p.mu),
            ("k finite", p.k),
        ] {
            require(v.is_finite(), name, v);
        }
        require(p.k >= 0.0, "k >= 0", p.k);
        require(p.alpha >= MIN_ALPHA, "alpha >= 0.05", p.alpha);
        require(p.mu >= MIN_ORIGIN_EXPONENT, "mu >= -0.95", p.mu);
        let effective = p.mu + p.excess().min(0.0);
        require(
            effective >= MIN_ORIGIN_EXPONENT,
            "mu + min(0, eta - beta - mu) >= -0.95",
            effective,
        );
        if p.mode == ValidationMode::StrictTheorem {
            require(p.beta < 1.0, "beta < 1", p.beta);
            require(p.eta < 0.0, "eta < 0", p.eta);
            require(p.eta > p.beta - 1.0, "eta > beta - 1", p.eta);
            require(p.alpha > -p.beta - p.mu, "alpha > -beta - mu", p.alpha);
        }
        if bad.is_empty() {
            Ok(ValidParams(*self))
        } else {
            Err(OperatorError::Invalid(bad))
        }
    }
}

/// Parameters that passed [`OperatorParams::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidParams(OperatorParams);

impl std::ops::Deref for ValidParams {
    type Target = OperatorParams;
    fn deref(&self) -> &OperatorParams {
        &self.0
    }
}

/// Something the operator can be applied to.
pub trait Integrand {
    fn value(&self, tau: f64) -> f64;

    /// `ρ` such that `f(τ) = τ^ρ g(τ)` with `g` smooth at the origin.
    fn leading_exponent(&self) -> f64 {
        0.0
    }

    /// Points in `(0, ∞)` where `f` is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Terms of `f` to integrate separately because their leading
    /// exponents differ by a non-integer. Empty when `f` is one piece.
    fn addends(&self) -> Vec<&dyn Integrand> {
        Vec::new()
    }
}

impl<F: Fn(f64) -> f64> Integrand for F {
    fn value(&self, tau: f64) -> f64 {
        self(tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorResult {
    pub value: f64,
    /// `|I_{2n} − I_n|`.
    pub error_estimate: f64,
    /// Base order `n`; the value comes from the `2n` rule.
    pub order_used: usize,
}

impl OperatorResult {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.error_estimate)
    }
}

fn check_point(x: f64, tau: f64) -> Result<(), OperatorError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(OperatorError::Domain { what: "x", value: x });
    }
    if !(tau > 0.0 && tau < x) {
        return Err(OperatorError::Domain { what: "tau", value: tau });
    }
    Ok(())
}

/// `(ln of the x-, τ-independent kernel factors, u = (τ/x)^{k+1}, ln(1−u))`.
fn kernel_pieces(p: &OperatorParams, x: f64, tau: f64) -> Result<(f64, f64, f64), OperatorError> {
    let k1 = p.k + 1.0;
    let ln_ratio = (tau / x).ln();
    let u = (k1 * ln_ratio).exp();
    let ln_one_minus_u = (-(k1 * ln_ratio).exp_m1()).ln();
    let ln_front = (p.mu + p.beta + 1.0) * k1.ln() + k1 * (-p.alpha - p.beta - 2.0 * p.mu) * x.ln()
        - log_gamma(p.alpha)?
        + k1 * p.mu * tau.ln()
        + (p.alpha - 1.0) * (k1 * x.ln() + ln_one_minus_u);
    Ok((ln_front, u, ln_one_minus_u))
}

/// The kernel `F(x, τ)`, excluding the `τ^k` measure factor.
pub fn kernel_closed(params: &ValidParams, x: f64, tau: f64) -> Result<f64, OperatorError> {
    check_point(x, tau)?;
    let p = **params;
    let (ln_front, u, _) = kernel_pieces(&p, x, tau)?;
    let h = hyp2f1_complement(p.alpha + p.beta + p.mu, -p.eta, p.alpha, u)?;
    Ok(ln_front.exp() * h)
}

/// The first `n_terms` terms of the power series of `F(x, τ)` in
/// `1 − (τ/x)^{k+1}`, one entry per term.
pub fn kernel_series_terms(
    params: &ValidParams,
    x: f64,
    tau: f64,
    n_terms: usize,
) -> Result<Vec<f64>, OperatorError> {
    check_point(x, tau)?;
    if n_terms == 0 {
        return Err(OperatorError::Domain {
            what: "n_terms",
            value: 0.0,
        });
    }
    let p = **params;
    let (ln_front, _, ln_z) = kernel_pieces(&p, x, tau)?;
    let z = ln_z.exp();
    let (a, b, c) = (p.alpha + p.beta + p.mu, -p.eta, p.alpha);
    let mut term = ln_front.exp();
    let mut terms = Vec::with_capacity(n_terms);
    for n in 0..n_terms {
        terms.push(term);
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
    }
    Ok(terms)
}

/// Partial sum of [`kernel_series_terms`].
pub fn kernel_series(params: &ValidParams, x: f64, tau: f64, n_terms: usize) -> Result<f64, OperatorError> {
    Ok(kernel_series_terms(params, x, tau, n_terms)?.iter().sum())
}

/// `I[1](x)` in closed form, from the Euler integral of `₂F₁`:
/// `(k+1)^{μ+β} x^{−(k+1)(β+μ)} Γ(μ+1) Γ(1−β+η) / (Γ(1−β) Γ(α+μ+η+1))`.
pub fn operator_of_one(params: &ValidParams, x: f64) -> Result<f64, OperatorError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(OperatorError::Domain { what: "x", value: x });
    }
    let p = **params;
    if !(1.0 - p.beta + p.eta > 0.0) {
        return Err(OperatorError::Domain {
            what: "1 - beta + eta",
            value: 1.0 - p.beta + p.eta,
        });
    }
    if !(p.mu + 1.0 > 0.0) {
        return Err(OperatorError::Domain {
            what: "mu + 1",
            value: p.mu + 1.0,
        });
    }
    let ratio = gamma_ratio(
        &[p.mu + 1.0, 1.0 - p.beta + p.eta],
        &[1.0 - p.beta, p.alpha + p.mu + p.eta + 1.0],
    );
    let k1 = p.k + 1.0;
    let value = ((p.mu + p.beta) * k1.ln() - k1 * (p.beta + p.mu) * x.ln()).exp() * ratio;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(OperatorError::NonFinite("operator_of_one"))
    }
}

/// `I[f](x)` at base order `order` (value from `2·order`).
pub fn apply_operator<F: Integrand + ?Sized>(
    params: &ValidParams,
    f: &F,
    x: f64,
    order: usize,
) -> Result<OperatorResult, OperatorError> {
    PreparedOperator::new(params, x, order, &f.breakpoints())?.apply(f)
}

/// `(k+1)^{1−α}/Γ(α) ∫₀ˣ (x^{k+1} − t^{k+1})^{α−1} t^k f(t) dt`, at the
/// default order.
pub fn rl_k_integral<F: Integrand + ?Sized>(alpha: f64, k: f64, f: &F, x: f64) -> Result<OperatorResult, OperatorError> {
    rl_k_integral_with_order(alpha, k, f, x, DEFAULT_ORDER)
}

pub fn rl_k_integral_with_order<F: Integrand + ?Sized>(
    alpha: f64,
    k: f64,
    f: &F,
    x: f64,
    order: usize,
) -> Result<OperatorResult, OperatorError> {
    if !(alpha >= MIN_ALPHA) || !alpha.is_finite() {
        return Err(OperatorError::Domain { what: "alpha", value: alpha });
    }
    if !(k >= 0.0) || !k.is_finite() {
        return Err(OperatorError::Domain { what: "k", value: k });
    }
    check_x(x)?;
    let k1 = k + 1.0;
    let shape = Shape {
        alpha,
        mu: 0.0,
        k,
        kernel: Kernel::One,
    };
    let ln_prefactor = -alpha * k1.ln() + k1 * alpha * x.ln() - log_gamma(alpha)?;
    PreparedOperator::from_shape(shape, ln_prefactor, x, order, &f.breakpoints())?.apply(f)
}

/// `(∫₀^upper |f(t)|^p t^k dt)^{1/p}`.
pub fn lpk_norm<F: Integrand + ?Sized>(f: &F, p: f64, k: f64, upper: f64) -> Result<f64, OperatorError> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(OperatorError::Domain { what: "p", value: p });
    }
    if !(k >= 0.0) || !k.is_finite() {
        return Err(OperatorError::Domain { what: "k", value: k });
    }
    check_x(upper)?;
    let rho = f.leading_exponent() * p;
    let weight_exp = k + rho;
    if !(weight_exp > -1.0) {
        return Err(OperatorError::NotIntegrable { exponent: weight_exp });
    }
    let mut cuts: Vec<f64> = f
        .breakpoints()
        .into_iter()
        .filter(|&b| b > 0.0 && b < upper)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.push(upper);
    let order = DEFAULT_ORDER;
    let first = cuts[0];
    let rule = gauss_jacobi_rule(0.0, weight_exp, order)?;
    let mut total = first.powf(k + 1.0)
        * rule.integrate(|s| f.value(first * s).abs().powf(p) / s.powf(rho))?;
    let legendre = legendre_rule(order)?;
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let width = hi - lo;
        total += width
            * legendre.integrate(|s| {
                let t = lo + width * s;
                f.value(t).abs().powf(p) * t.powf(k)
            })?;
    }
    let norm = total.powf(1.0 / p);
    if norm.is_finite() {
        Ok(norm)
    } else {
        Err(OperatorError::NonFinite("lpk_norm"))
    }
}

fn check_x(x: f64) -> Result<(), OperatorError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(OperatorError::Domain { what: "x", value: x })
    }
}

fn legendre_rule(order: usize) -> Result<Arc<JacobiRule>, OperatorError> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<JacobiRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&order) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_jacobi_rule(0.0, 0.0, order)?);
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(order, Arc::clone(&rule));
    Ok(rule)
}

/// How `H(u)` is represented.
#[derive(Debug, Clone, Copy)]
enum Kernel {
    /// `H ≡ 1`.
    One,
    /// `H(u) = ₂F₁(a, b; c; 1 − u)`.
    Hyper { a: f64, b: f64, c: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Shape {
    alpha: f64,
    mu: f64,
    k: f64,
    kernel: Kernel,
}

impl Shape {
    fn h(&self, u: f64) -> Result<f64, OperatorError> {
        match self.kernel {
            Kernel::One => Ok(1.0),
            Kernel::Hyper { a, b, c } => Ok(hyp2f1_complement(a, b, c, u)?),
        }
    }
}

/// Nodes `τᵢ` and weights `Wᵢ` with `∫ … f ≈ Σ Wᵢ f(τᵢ)`.
#[derive(Debug, Clone, Default)]
pub struct Discretization {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Discretization {
    fn push(&mut self, tau: f64, weight: f64) {
        self.nodes.push(tau);
        self.weights.push(weight);
    }

    fn extend(&mut self, other: &Discretization, scale: f64) {
        self.nodes.extend_from_slice(&other.nodes);
        self.weights.extend(other.weights.iter().map(|w| w * scale));
    }

    fn sum<F: Integrand + ?Sized>(&self, f: &F) -> Result<f64, OperatorError> {
        let mut total = 0.0;
        for (&tau, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f.value(tau);
            if !v.is_finite() {
                return Err(OperatorError::Evaluation { tau, value: v });
            }
            total += w * v;
        }
        Ok(total)
    }
}

type LeftPair = Arc<[Discretization; 2]>;

/// The operator at fixed parameters and `x`, discretized at orders `n` and
/// `2n`, ready to be applied to many integrands.
#[derive(Debug)]
pub struct PreparedOperator {
    shape: Shape,
    x: f64,
    order: usize,
    ln_prefactor: f64,
    /// End of the substituted left panel.
    u0: f64,
    /// Panels `[uᵢ, uᵢ₊₁]` of the pointwise part, at both orders.
    right: [Discretization; 2],
    /// Left panels keyed by the bit pattern of the leading exponent.
    left: Mutex<HashMap<u64, LeftPair>>,
}

impl PreparedOperator {
    /// `breakpoints` are `τ` values where some integrand to be applied is
    /// not smooth; panels are cut there.
    pub fn new(params: &ValidParams, x: f64, order: usize, breakpoints: &[f64]) -> Result<Self, OperatorError> {
        check_x(x)?;
        let p = **params;
        let (a, b, c) = (p.alpha + p.beta + p.mu, -p.eta, p.alpha);
        let kernel = if a == 0.0 || b == 0.0 {
            Kernel::One
        } else {
            Kernel::Hyper { a, b, c }
        };
        let shape = Shape {
            alpha: p.alpha,
            mu: p.mu,
            k: p.k,
            kernel,
        };
        let k1 = p.k + 1.0;
        let ln_prefactor = (p.mu + p.beta) * k1.ln() - k1 * (p.beta + p.mu) * x.ln() - log_gamma(p.alpha)?;
        Self::from_shape(shape, ln_prefactor, x, order, breakpoints)
    }

    fn from_shape(
        shape: Shape,
        ln_prefactor: f64,
        x: f64,
        order: usize,
        breakpoints: &[f64],
    ) -> Result<Self, OperatorError> {
        if order == 0 || order > MAX_OPERATOR_ORDER {
            return Err(OperatorError::Order(order));
        }
        let k1 = shape.k + 1.0;
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .filter(|&&t| t > 0.0 && t < x)
            .map(|&t| (k1 * (t / x).ln()).exp())
            .filter(|&u| u > 0.0 && u < 1.0)
            .collect();
        cuts.sort_by(f64::total_cmp);
        let u0 = cuts.first().copied().unwrap_or(1.0).min(LEFT_PANEL_END);
        // Geometric panels keep the distance to the branch point at u = 0
        // comparable to the panel width.
        let mut edge = u0;
        while edge * 4.0 < LEFT_PANEL_END {
            edge *= 4.0;
            cuts.push(edge);
        }
        cuts.push(LEFT_PANEL_END);
        cuts.push(u0);
        cuts.push(1.0);
        cuts.retain(|&u| u >= u0);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|hi, lo| *hi - *lo <= 1e-12 * *hi);

        let right = [
            right_panels(&shape, x, &cuts, order)?,
            right_panels(&shape, x, &cuts, 2 * order)?,
        ];
        Ok(Self {
            shape,
            x,
            order,
            ln_prefactor,
            u0,
            right,
            left: Mutex::new(HashMap::new()),
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn left_for(&self, rho: f64) -> Result<LeftPair, OperatorError> {
        let key = rho.to_bits();
        if let Some(pair) = self.left.lock().expect("left panel cache poisoned").get(&key) {
            return Ok(Arc::clone(pair));
        }
        let pair: LeftPair = Arc::new([
            left_panel(&self.shape, self.x, self.u0, rho, self.order)?,
            left_panel(&self.shape, self.x, self.u0, rho, 2 * self.order)?,
        ]);
        self.left
            .lock()
            .expect("left panel cache poisoned")
            .insert(key, Arc::clone(&pair));
        Ok(pair)
    }

    /// The full discretization at base order (`fine = false`) or twice it.
    pub fn discretization(&self, rho: f64, fine: bool) -> Result<Discretization, OperatorError> {
        let idx = usize::from(fine);
        let left = self.left_for(rho)?;
        let mut out = left[idx].clone();
        out.extend(&self.right[idx], 1.0);
        let scale = self.ln_prefactor.exp();
        for w in &mut out.weights {
            *w *= scale;
        }
        Ok(out)
    }

    pub fn apply<F: Integrand + ?Sized>(&self, f: &F) -> Result<OperatorResult, OperatorError> {
        let (coarse, fine) = self.sums(f)?;
        let scale = self.ln_prefactor.exp();
        let value = scale * fine;
        let error_estimate = scale * (fine - coarse).abs();
        if !value.is_finite() || !error_estimate.is_finite() {
            return Err(OperatorError::NonFinite("operator value"));
        }
        Ok(OperatorResult {
            value,
            error_estimate,
            order_used: self.order,
        })
    }
}

impl PreparedOperator {
    /// Unscaled sums at both orders, split over [`Integrand::addends`].
    fn sums<F: Integrand + ?Sized>(&self, f: &F) -> Result<(f64, f64), OperatorError> {
        let parts = f.addends();
        if !parts.is_empty() {
            let mut total = (0.0, 0.0);
            for part in parts {
                let (c, fi) = self.sums(part)?;
                total.0 += c;
                total.1 += fi;
            }
            return Ok(total);
        }
        let left = self.left_for(f.leading_exponent())?;
        let coarse = left[0].sum(f)? + self.right[0].sum(f)?;
        let fine = left[1].sum(f)? + self.right[1].sum(f)?;
        Ok((coarse, fine))
    }
}

/// `(1 − u)^e` without cancellation for small `u`.
fn one_minus_pow(u: f64, e: f64) -> f64 {
    (e * (-u).ln_1p()).exp()
}

fn right_panels(shape: &Shape, x: f64, cuts: &[f64], order: usize) -> Result<Discretization, OperatorError> {
    let inv_k1 = 1.0 / (shape.k + 1.0);
    let mut out = Discretization::default();
    let legendre = legendre_rule(order)?;
    let last = cuts.len() - 1;
    for (i, pair) in cuts.windows(2).enumerate() {
        let (lo, hi) = (pair[0], pair[1]);
        let width = hi - lo;
        if i + 1 == last {
            // Touches u = 1: carry (1−u)^{α−1} in the weight.
            let rule = gauss_jacobi_rule(shape.alpha - 1.0, 0.0, order)?;
            let scale = width.powf(shape.alpha);
            for (&s, &w) in rule.nodes().iter().zip(rule.weights()) {
                let u = lo + width * s;
                let weight = w * scale * u.powf(shape.mu) * shape.h(u)?;
                out.push(x * u.powf(inv_k1), weight);
            }
        } else {
            for (&s, &w) in legendre.nodes().iter().zip(legendre.weights()) {
                let u = lo + width * s;
                let weight = w * width * u.powf(shape.mu) * one_minus_pow(u, shape.alpha - 1.0) * shape.h(u)?;
                out.push(x * u.powf(inv_k1), weight);
            }
        }
    }
    Ok(out)
}

/// One term `coef · u^e · G(u)` of `H` near the origin.
struct Component {
    coef: f64,
    shift: f64,
    smooth: Box<dyn Fn(f64) -> Result<f64, OperatorError>>,
}

fn components(shape: &Shape, c: f64) -> Vec<Component> {
    let pointwise = |shape: Shape| Component {
        coef: 1.0,
        shift: 0.0,
        smooth: Box::new(move |u| shape.h(u)),
    };
    let Kernel::Hyper { a, b, .. } = shape.kernel else {
        return vec![pointwise(*shape)];
    };
    let terminating = |v: f64| v <= 0.0 && v.fract() == 0.0;
    if terminating(a) || terminating(b) {
        return vec![pointwise(*shape)];
    }
    let d = c - a - b;
    let (first, second) = connection_coefficients(a, b, c);
    let mut out = Vec::with_capacity(2);
    if first != 0.0 {
        out.push(Component {
            coef: first,
            shift: 0.0,
            smooth: Box::new(move |u| Ok(series(a, b, 1.0 - d, u)?)),
        });
    }
    if second != 0.0 {
        out.push(Component {
            coef: second,
            shift: d,
            smooth: Box::new(move |u| Ok(series(c - a, c - b, 1.0 + d, u)?)),
        });
    }
    out
}

/// `∫₀^{u₀}` with `u = u₀ s^{k+1}` at a fixed kernel parameter `c`.
fn left_panel_at(shape: &Shape, c: f64, x: f64, u0: f64, rho: f64, order: usize) -> Result<Discretization, OperatorError> {
    let k1 = shape.k + 1.0;
    let tau_scale = x * u0.powf(1.0 / k1);
    let mut out = Discretization::default();
    for comp in components(shape, c) {
        let exponent = k1 * (shape.mu + comp.shift) + shape.k + rho;
        if !(exponent > -1.0) {
            return Err(OperatorError::NotIntegrable { exponent });
        }
        // s = t^g turns a leftover s^β into the smoother t^{gβ}.
        let g = LEFT_GRADING;
        let rule = gauss_jacobi_rule(0.0, g * (exponent + 1.0) - 1.0, order)?;
        let scale = comp.coef * k1 * g * u0.powf(shape.mu + comp.shift + 1.0);
        for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
            let s = t.powf(g);
            let u = u0 * s.powf(k1);
            let tau = tau_scale * s;
            let weight = w * scale * one_minus_pow(u, shape.alpha - 1.0) * (comp.smooth)(u)? / s.powf(rho);
            out.push(tau, weight);
        }
    }
    Ok(out)
}

fn left_panel(shape: &Shape, x: f64, u0: f64, rho: f64, order: usize) -> Result<Discretization, OperatorError> {
    let Kernel::Hyper { a, b, c } = shape.kernel else {
        return left_panel_at(shape, 1.0, x, u0, rho, order);
    };
    let d = c - a - b;
    let nearest = d.round();
    let offset = d - nearest;
    if offset.abs() >= NEAR_INTEGER {
        return left_panel_at(shape, c, x, u0, rho, order);
    }
    let terminating = |v: f64| v <= 0.0 && v.fract() == 0.0;
    if terminating(a) || terminating(b) {
        return left_panel_at(shape, c, x, u0, rho, order);
    }
    // The panel integral is analytic in c; sample it where the connection
    // formula is well conditioned and interpolate.
    let nodes: Vec<f64> = INTERP_OFFSETS.iter().map(|j| j * INTERP_STEP).collect();
    let coeffs = lagrange_weights(&nodes, offset);
    let mut out = Discretization::default();
    for (&node, &coef) in nodes.iter().zip(&coeffs) {
        let c_node = c - offset + node;
        let shifted = Shape {
            kernel: Kernel::Hyper { a, b, c: c_node },
            ..*shape
        };
        out.extend(&left_panel_at(&shifted, c_node, x, u0, rho, order)?, coef);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(alpha: f64, beta: f64, eta: f64, mu: f64, k: f64, mode: ValidationMode) -> OperatorParams {
        OperatorParams::new(alpha, beta, eta, mu, k, mode)
    }

    fn strict(alpha: f64, beta: f64, eta: f64, mu: f64, k: f64) -> ValidParams {
        params(alpha, beta, eta, mu, k, ValidationMode::StrictTheorem)
            .validate()
            .unwrap()
    }

    fn loose(alpha: f64, beta: f64, eta: f64, mu: f64, k: f64) -> ValidParams {
        params(alpha, beta, eta, mu, k, ValidationMode::DefinitionOnly)
            .validate()
            .unwrap()
    }

    #[test]
    fn validation_accepts_and_rejects_by_mode() {
        assert!(params(0.5, 0.2, -0.4, 0.0, 0.0, ValidationMode::StrictTheorem)
            .validate()
            .is_ok());
        let err = params(1.0, -1.0, 0.0, 0.0, 0.0, ValidationMode::StrictTheorem)
            .validate()
            .unwrap_err();
        match err {
            // α = 1 also sits on the boundary α > −β − μ = 1.
            OperatorError::Invalid(v) => assert!(v.iter().any(|v| v.constraint == "eta < 0")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(params(1.0, -1.0, 0.0, 0.0, 0.0, ValidationMode::DefinitionOnly)
            .validate()
            .is_ok());
    }

    #[test]
    fn validation_reports_every_violation() {
        let err = params(0.01, 1.5, 0.3, -0.99, -1.0, ValidationMode::StrictTheorem)
            .validate()
            .unwrap_err();
        let OperatorError::Invalid(v) = err else { panic!() };
        let names: Vec<_> = v.iter().map(|v| v.constraint).collect();
        for expected in ["k >= 0", "alpha >= 0.05", "mu >= -0.95", "beta < 1", "eta < 0"] {
            assert!(names.contains(&expected), "{names:?}");
        }
    }

    #[test]
    fn kernel_reduces_to_one_in_the_plain_integral_case() {
        let p = loose(1.0, -1.0, 0.0, 0.0, 0.0);
        assert_relative_eq!(kernel_closed(&p, 1.0, 0.5).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(kernel_series(&p, 1.0, 0.5, 1).unwrap(), 1.0, max_relative = 1e-15);
        assert!(kernel_closed(&p, 1.0, 1.0).is_err());
        assert!(kernel_closed(&p, 1.0, 0.0).is_err());
    }

    #[test]
    fn kernel_series_agrees_with_closed_form() {
        let p = strict(0.5, 0.2, -0.4, 0.1, 1.0);
        let closed = kernel_closed(&p, 2.0, 1.0).unwrap();
        // z = 0.75 here, so the tail after n terms is roughly 0.75ⁿ.
        let series = kernel_series(&p, 2.0, 1.0, 200).unwrap();
        assert_relative_eq!(series, closed, max_relative = 1e-10);
        let terms = kernel_series_terms(&p, 2.0, 1.0, 200).unwrap();
        assert!(terms.iter().all(|&t| t >= 0.0));
    }

    #[test]
    fn operator_of_plain_integral() {
        let p = loose(1.0, -1.0, 0.0, 0.0, 0.0);
        let r = apply_operator(&p, &|t: f64| 1.0 + t, 1.0, 64).unwrap();
        assert_relative_eq!(r.value, 1.5, max_relative = 1e-14);
        assert_eq!(r.order_used, 64);
        assert_relative_eq!(operator_of_one(&p, 1.0).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn reduces_to_riemann_liouville() {
        let p = loose(1.0, -1.0, 0.0, 0.0, 1.0);
        let one = |_: f64| 1.0;
        let op = apply_operator(&p, &one, 1.0, 64).unwrap();
        let rl = rl_k_integral(1.0, 1.0, &one, 1.0).unwrap();
        assert_relative_eq!(op.value, rl.value, max_relative = 1e-10);
    }

    #[test]
    fn riemann_liouville_constants() {
        let one = |_: f64| 1.0;
        assert_relative_eq!(rl_k_integral(1.0, 0.0, &one, 3.0).unwrap().value, 3.0, max_relative = 1e-14);
        assert_relative_eq!(rl_k_integral(2.0, 0.0, &one, 1.0).unwrap().value, 0.5, max_relative = 1e-14);
        assert_relative_eq!(
            rl_k_integral(0.5, 0.0, &one, 1.0).unwrap().value,
            2.0 / std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn closed_image_of_one_matches_quadrature() {
        let p = strict(0.5, 0.2, -0.4, 0.0, 0.0);
        let closed = operator_of_one(&p, 1.0).unwrap();
        let want = gamma_ratio(&[0.4], &[0.8, 1.1]);
        assert_relative_eq!(closed, want, max_relative = 1e-14);
        let quad = apply_operator(&p, &|_: f64| 1.0, 1.0, 64).unwrap();
        assert_relative_eq!(quad.value, closed, max_relative = 1e-8);
        let at2 = operator_of_one(&p, 2.0).unwrap();
        assert_relative_eq!(at2 / closed, 2f64.powf(-0.2), max_relative = 1e-14);
    }

    #[test]
    fn integer_excess_parameters_use_interpolation() {
        // d = 0 and d = −1 exactly.
        for p in [loose(2.0, -0.5, -0.3, 0.2, 2.0), loose(1.7, -0.8, -1.2, 0.6, 0.5)] {
            assert!((p.excess() - p.excess().round()).abs() < 1e-12);
            let quad = apply_operator(&p, &|_: f64| 1.0, 0.9, 64).unwrap();
            let closed = operator_of_one(&p, 0.9).unwrap();
            assert_relative_eq!(quad.value, closed, max_relative = 1e-10);
        }
    }

    #[test]
    fn lpk_norm_examples() {
        assert_relative_eq!(lpk_norm(&|_: f64| 1.0, 1.0, 0.0, 1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(
            lpk_norm(&|_: f64| 1.0, 2.0, 1.0, 1.0).unwrap(),
            0.5f64.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(lpk_norm(&|t: f64| t, 1.0, 0.0, 2.0).unwrap(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn bad_order_and_point_are_rejected() {
        let p = strict(0.5, 0.2, -0.4, 0.0, 0.0);
        let one = |_: f64| 1.0;
        assert_eq!(apply_operator(&p, &one, 1.0, 0).unwrap_err(), OperatorError::Order(0));
        assert_eq!(apply_operator(&p, &one, 1.0, 257).unwrap_err(), OperatorError::Order(257));
        assert!(matches!(
            apply_operator(&p, &one, -1.0, 64),
            Err(OperatorError::Domain { what: "x", .. })
        ));
    }
}

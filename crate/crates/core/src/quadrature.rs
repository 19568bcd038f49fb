//! Gauss–Jacobi quadrature on `[0, 1]` for the weight `u^b (1 − u)^a`.
//!
//! Nodes come from the eigenvalues of the Jacobi matrix of the three-term
//! recurrence (Golub–Welsch), then get polished by Newton steps on the Jacobi
//! polynomial itself. Weights are the squared first components of the
//! eigenvectors times the zeroth moment. The alternative closed form in
//! `P_n'(xᵢ)` amplifies the node's absolute error near `x = ±1` and loses
//! about eight digits at order 512 with exponents near −1.

use thiserror::Error;

use crate::specfun::beta;

/// Largest rule order that can be constructed.
pub const MAX_ORDER: usize = 1024;

const QL_MAX_SWEEPS: usize = 60;
const NEWTON_MAX_STEPS: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("{name} = {value} must exceed -1")]
    Exponent { name: &'static str, value: f64 },
    #[error("rule order {0} outside 1..={MAX_ORDER}")]
    Order(usize),
    #[error("eigenvalue iteration did not converge for order {0}")]
    NoConvergence(usize),
    #[error("integrand is not finite at node u = {node} (value {value})")]
    Evaluation { node: f64, value: f64 },
}

/// Nodes and weights of an `order`-point Gauss rule for `u^b_exp (1−u)^a_exp`
/// on `[0, 1]`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRule {
    a_exp: f64,
    b_exp: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl JacobiRule {
    /// Exponent of `(1 − u)`.
    pub fn a_exp(&self) -> f64 {
        self.a_exp
    }

    /// Exponent of `u`.
    pub fn b_exp(&self) -> f64 {
        self.b_exp
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Strictly increasing, inside `(0, 1)`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ wᵢ g(uᵢ)`; fails on the first node where `g` is not finite.
    pub fn integrate<F: Fn(f64) -> f64>(&self, smooth_part: F) -> Result<f64, QuadratureError> {
        let mut sum = 0.0;
        for (&node, &weight) in self.nodes.iter().zip(&self.weights) {
            let value = smooth_part(node);
            if !value.is_finite() {
                return Err(QuadratureError::Evaluation { node, value });
            }
            sum += weight * value;
        }
        Ok(sum)
    }
}

/// Free-function form of [`JacobiRule::integrate`].
pub fn integrate<F: Fn(f64) -> f64>(rule: &JacobiRule, smooth_part: F) -> Result<f64, QuadratureError> {
    rule.integrate(smooth_part)
}

/// Builds the `order`-point rule for `u^b_exp (1 − u)^a_exp` on `[0, 1]`.
pub fn gauss_jacobi_rule(a_exp: f64, b_exp: f64, order: usize) -> Result<JacobiRule, QuadratureError> {
    // `!(x > -1)` also rejects NaN.
    if !(a_exp > -1.0) || !a_exp.is_finite() {
        return Err(QuadratureError::Exponent { name: "a_exp", value: a_exp });
    }
    if !(b_exp > -1.0) || !b_exp.is_finite() {
        return Err(QuadratureError::Exponent { name: "b_exp", value: b_exp });
    }
    if order == 0 || order > MAX_ORDER {
        return Err(QuadratureError::Order(order));
    }

    // On [−1, 1]: weight (1 − x)^a (1 + x)^b, with u = (1 + x)/2.
    let (a, b) = (a_exp, b_exp);
    let moment = beta(b + 1.0, a + 1.0).expect("exponents exceed -1");
    let (xs, first) = tridiagonal_eigenvalues(a, b, order)?;
    let mut pairs: Vec<(f64, f64)> = xs.into_iter().zip(first).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));

    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for (x0, v) in pairs {
        let mut x = x0;
        for _ in 0..NEWTON_MAX_STEPS {
            let (value, derivative) = jacobi_eval(a, b, order, x);
            let step = value / derivative;
            x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }
        nodes.push(0.5 * (1.0 + x));
        weights.push(moment * v * v);
    }

    Ok(JacobiRule {
        a_exp,
        b_exp,
        nodes,
        weights,
    })
}

/// `P_n^{(a,b)}(x)` and its derivative.
fn jacobi_eval(a: f64, b: f64, n: usize, x: f64) -> (f64, f64) {
    let ab = a + b;
    let mut p_prev = 1.0;
    let mut p = 0.5 * (a - b + (2.0 + ab) * x);
    let mut t = 2.0 + ab;
    for j in 2..=n {
        let jf = j as f64;
        t = 2.0 * jf + ab;
        let c1 = 2.0 * jf * (jf + ab) * (t - 2.0);
        let c2 = (t - 1.0) * (a * a - b * b + t * (t - 2.0) * x);
        let c3 = 2.0 * (jf - 1.0 + a) * (jf - 1.0 + b) * t;
        let next = (c2 * p - c3 * p_prev) / c1;
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    let one_minus_sq = (1.0 - x) * (1.0 + x);
    let derivative = (nf * (a - b - t * x) * p + 2.0 * (nf + a) * (nf + b) * p_prev) / (t * one_minus_sq);
    (p, derivative)
}

/// Eigenvalues of the symmetric Jacobi matrix of the monic recurrence on
/// `[−1, 1]` together with the first component of each normalized
/// eigenvector, by implicit QL with Wilkinson shifts.
fn tridiagonal_eigenvalues(a: f64, b: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
    let ab = a + b;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut first = vec![0.0; n];
    first[0] = 1.0;
    diag[0] = (b - a) / (ab + 2.0);
    for (i, d) in diag.iter_mut().enumerate().skip(1) {
        let s = 2.0 * i as f64 + ab;
        *d = (b * b - a * a) / (s * (s + 2.0));
    }
    if n > 1 {
        off[0] = (4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))).sqrt();
        for i in 2..n {
            let f = i as f64;
            let s = 2.0 * f + ab;
            off[i - 1] = (4.0 * f * (f + a) * (f + b) * (f + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
        }
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(QuadratureError::NoConvergence(n));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let bb = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - bb;
                let t = first[i + 1];
                first[i + 1] = s * first[i] + c * t;
                first[i] = c * first[i] - s * t;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok((diag, first))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_point_legendre_is_the_midpoint_rule() {
        let rule = gauss_jacobi_rule(0.0, 0.0, 1).unwrap();
        assert_relative_eq!(rule.nodes()[0], 0.5, max_relative = 1e-15);
        assert_relative_eq!(rule.weights()[0], 1.0, max_relative = 1e-15);
    }

    #[test]
    fn two_point_legendre() {
        let rule = gauss_jacobi_rule(0.0, 0.0, 2).unwrap();
        let h = 0.5 / 3f64.sqrt();
        assert_relative_eq!(rule.nodes()[0], 0.5 - h, max_relative = 1e-15);
        assert_relative_eq!(rule.nodes()[1], 0.5 + h, max_relative = 1e-15);
        for &w in rule.weights() {
            assert_relative_eq!(w, 0.5, max_relative = 1e-15);
        }
        assert_relative_eq!(rule.integrate(|u| u * u).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(rule.integrate(|_| 1.0).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn reproduces_beta_moments_of_an_asymmetric_weight() {
        let rule = gauss_jacobi_rule(-0.5, 0.25, 8).unwrap();
        for j in 0..16 {
            let got = rule.integrate(|u| u.powi(j)).unwrap();
            let want = beta(1.25 + f64::from(j), 0.5).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            gauss_jacobi_rule(-1.0, 0.0, 4),
            Err(QuadratureError::Exponent { name: "a_exp", .. })
        ));
        assert!(matches!(
            gauss_jacobi_rule(0.0, f64::NAN, 4),
            Err(QuadratureError::Exponent { name: "b_exp", .. })
        ));
        assert_eq!(gauss_jacobi_rule(0.0, 0.0, 0), Err(QuadratureError::Order(0)));
    }

    #[test]
    fn evaluation_error_names_the_node() {
        let rule = gauss_jacobi_rule(0.0, 0.0, 3).unwrap();
        let err = rule.integrate(|u| if u > 0.6 { f64::INFINITY } else { 1.0 }).unwrap_err();
        match err {
            QuadratureError::Evaluation { node, .. } => assert_eq!(node, rule.nodes()[2]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nodes_inside_and_weights_positive_at_high_order() {
        for &(a, b) in &[(-0.95, -0.95), (1.5, -0.5), (0.0, 3.0)] {
            let rule = gauss_jacobi_rule(a, b, 512).unwrap();
            assert!(rule.nodes()[0] > 0.0 && *rule.nodes().last().unwrap() < 1.0);
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(rule.weights().iter().all(|&w| w > 0.0));
        }
    }
}

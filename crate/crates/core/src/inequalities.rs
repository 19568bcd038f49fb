//! Both sides of the six reverse-Minkowski-type inequalities, their signed
//! margins and verdicts, the intermediate inequalities of their proofs, and
//! seeded campaigns over random instances.
//!
//! Margins are oriented so that `margin ≥ 0` means the inequality holds.
//! The verdict compares the margin to `tolerance = max(1e−9, 10·E)` where
//! `E` is the combined error: propagated quadrature estimates plus a
//! rounding allowance proportional to the size of both sides.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimate::Estimate;
use crate::operator::{operator_of_one, OperatorError, PreparedOperator, DEFAULT_ORDER};
use crate::testfuncs::{random_instance, FunctionSpec, TestFuncError, TestInstance};

/// Absolute floor of the verdict tolerance.
pub const TOLERANCE_FLOOR: f64 = 1e-9;
/// Multiple of the combined error that a negative margin may reach.
pub const ERROR_MULTIPLE: f64 = 10.0;
/// Relative rounding allowance added to every combined error.
const ROUNDING: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "3.1")]
    T31,
    #[serde(rename = "3.2")]
    T32,
    #[serde(rename = "4.1")]
    T41,
    #[serde(rename = "4.2")]
    T42,
    #[serde(rename = "4.3")]
    T43,
    #[serde(rename = "4.4")]
    T44,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [Self::T31, Self::T32, Self::T41, Self::T42, Self::T43, Self::T44];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::T31 => "3.1",
            Self::T32 => "3.2",
            Self::T41 => "4.1",
            Self::T42 => "4.2",
            Self::T43 => "4.3",
            Self::T44 => "4.4",
        }
    }

    /// Statement variant; the first two use the power `p` throughout.
    pub fn form(self) -> &'static str {
        match self {
            Self::T31 | Self::T32 => "p-coherent",
            _ => "as-stated",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown theorem `{0}` (expected one of 3.1, 3.2, 4.1, 4.2, 4.3, 4.4)")]
pub struct UnknownTheorem(pub String);

impl FromStr for TheoremId {
    type Err = UnknownTheorem;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| UnknownTheorem(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Inconclusive => "inconclusive",
        })
    }
}

pub fn tolerance(combined_error: f64) -> f64 {
    TOLERANCE_FLOOR.max(ERROR_MULTIPLE * combined_error)
}

/// Fail below `−tolerance`. A negative margin within tolerance is
/// inconclusive when the tolerance comes from the error estimate and a pass
/// when only the absolute floor is in play.
pub fn verdict(margin: f64, combined_error: f64) -> Verdict {
    if !margin.is_finite() || !combined_error.is_finite() {
        return Verdict::Inconclusive;
    }
    let tol = tolerance(combined_error);
    if margin < -tol {
        Verdict::Fail
    } else if margin < 0.0 && ERROR_MULTIPLE * combined_error > TOLERANCE_FLOOR {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Instance(#[from] TestFuncError),
    #[error("theorem {expected} checker applied to a {got} instance")]
    WrongTheorem { expected: TheoremId, got: TheoremId },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub theorem: TheoremId,
    pub seed: u64,
    pub form: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub combined_error: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Absent only when the instance itself could not be generated.
    pub instance: Option<TestInstance>,
    /// Why the check could not be evaluated, for inconclusive rows.
    pub failure: Option<String>,
}

/// Signed comparison of two estimated sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub combined_error: f64,
}

impl Comparison {
    /// `small ≤ large` is the inequality being checked.
    fn upper(small: Estimate, large: Estimate) -> Self {
        Self::build(small, large, large.value - small.value)
    }

    /// `large ≥ small`, reported with the larger side as `lhs`.
    fn lower(large: Estimate, small: Estimate) -> Self {
        Self::build(large, small, large.value - small.value)
    }

    fn build(lhs: Estimate, rhs: Estimate, margin: f64) -> Self {
        let rounding = ROUNDING * (lhs.value.abs() + rhs.value.abs());
        Self {
            lhs: lhs.value,
            rhs: rhs.value,
            margin,
            combined_error: lhs.error + rhs.error + rounding,
        }
    }

    pub fn tolerance(&self) -> f64 {
        tolerance(self.combined_error)
    }

    pub fn verdict(&self) -> Verdict {
        verdict(self.margin, self.combined_error)
    }
}

/// Operator values for one instance, sharing one discretization.
struct Evaluator {
    op: PreparedOperator,
}

impl Evaluator {
    fn new(inst: &TestInstance, order: usize) -> Result<Self, CheckError> {
        let params = inst.params.validate()?;
        let mut cuts = inst.f.breakpoints();
        cuts.extend(inst.g.breakpoints());
        Ok(Self {
            op: PreparedOperator::new(&params, inst.x, order, &cuts)?,
        })
    }

    fn apply(&self, f: &FunctionSpec) -> Result<Estimate, CheckError> {
        Ok(self.op.apply(f)?.estimate())
    }

    /// `[I h^r]^{1/r}`.
    fn norm(&self, h: &FunctionSpec, r: f64) -> Result<Estimate, CheckError> {
        Ok(self.apply(&h.pow(r))?.powf(1.0 / r))
    }
}

fn expect(inst: &TestInstance, theorem: TheoremId) -> Result<(), CheckError> {
    if inst.theorem == theorem {
        Ok(())
    } else {
        Err(CheckError::WrongTheorem {
            expected: theorem,
            got: inst.theorem,
        })
    }
}

fn report(inst: &TestInstance, cmp: Comparison) -> InequalityReport {
    InequalityReport {
        theorem: inst.theorem,
        seed: inst.seed,
        form: inst.theorem.form(),
        lhs: cmp.lhs,
        rhs: cmp.rhs,
        margin: cmp.margin,
        combined_error: cmp.combined_error,
        tolerance: cmp.tolerance(),
        verdict: cmp.verdict(),
        instance: Some(inst.clone()),
        failure: None,
    }
}

/// `[I f^p]^{1/p} + [I g^p]^{1/p} ≤ (1+M(m+2))/((m+1)(M+1)) · [I (f+g)^p]^{1/p}`.
pub fn check_thm31(inst: &TestInstance, order: usize) -> Result<InequalityReport, CheckError> {
    expect(inst, TheoremId::T31)?;
    let ev = Evaluator::new(inst, order)?;
    let (m, big_m) = inst.bounds()?;
    let p = inst.exponent_p()?;
    let lhs = ev.norm(&inst.f, p)? + ev.norm(&inst.g, p)?;
    let constant = (1.0 + big_m * (m + 2.0)) / ((m + 1.0) * (big_m + 1.0));
    let rhs = ev.norm(&inst.f.plus(&inst.g), p)?.scale(constant);
    Ok(report(inst, Comparison::upper(lhs, rhs)))
}

/// `[I f^p]^{2/p} + [I g^p]^{2/p} ≥ ((M+1)(m+1)/M − 2)·[I f^p]^{1/p}[I g^p]^{1/p}`.
pub fn check_thm32(inst: &TestInstance, order: usize) -> Result<InequalityReport, CheckError> {
    expect(inst, TheoremId::T32)?;
    let ev = Evaluator::new(inst, order)?;
    let (m, big_m) = inst.bounds()?;
    let p = inst.exponent_p()?;
    let f = ev.norm(&inst.f, p)?;
    let g = ev.norm(&inst.g, p)?;
    let lhs = f * f + g * g;
    let constant = (big_m + 1.0) * (m + 1.0) / big_m - 2.0;
    let rhs = (f * g).scale(constant);
    Ok(report(inst, Comparison::lower(lhs, rhs)))
}

/// `[I f]^{1/p} [I g]^{1/q} ≤ (M/m)^{1/pq} I[f^{1/p} g^{1/q}]`.
pub fn check_thm41(inst: &TestInstance, order: usize) -> Result<InequalityReport, CheckError> {
    expect(inst, TheoremId::T41)?;
    let ev = Evaluator::new(inst, order)?;
    let (m, big_m) = inst.bounds()?;
    let (p, q) = (inst.exponent_p()?, inst.exponent_q()?);
    let lhs = ev.apply(&inst.f)?.powf(1.0 / p) * ev.apply(&inst.g)?.powf(1.0 / q);
    let mixed = inst.f.pow(1.0 / p).times(&inst.g.pow(1.0 / q));
    let rhs = ev.apply(&mixed)?.scale((big_m / m).powf(1.0 / (p * q)));
    Ok(report(inst, Comparison::upper(lhs, rhs)))
}

/// `[I f^p]^{1/p} [I g^q]^{1/q} ≤ (M/m)^{1/pq} I[f g]` under `m ≤ f^p/g^q ≤ M`.
pub fn check_thm42(inst: &TestInstance, order: usize) -> Result<InequalityReport, CheckError> {
    expect(inst, TheoremId::T42)?;
    let ev = Evaluator::new(inst, order)?;
    let (m, big_m) = inst.bounds()?;
    let (p, q) = (inst.exponent_p()?, inst.exponent_q()?);
    let lhs = ev.norm(&inst.f, p)? * ev.norm(&inst.g, q)?;
    let rhs = ev.apply(&inst.f.times(&inst.g))?.scale((big_m / m).powf(1.0 / (p * q)));
    Ok(report(inst, Comparison::upper(lhs, rhs)))
}

/// `I[fg] ≤ 2^{p−1}M^p/(p(M+1)^p)·I[f^p+g^p] + 2^{q−1}/(q(m+1)^q)·I[f^q+g^q]`.
pub fn check_thm43(inst: &TestInstance, order: usize) -> Result<InequalityReport, CheckError> {
    expect(inst, TheoremId::T43)?;
    let ev = Evaluator::new(inst, order)?;
    let (m, big_m) = inst.bounds()?;
    let (p, q) = (inst.exponent_p()?, inst.exponent_q()?);
    let lhs = ev.apply(&inst.f.times(&inst.g))?;
    let c_p = 2f64.powf(p - 1.0) * big_m.powf(p) / (p * (big_m + 1.0).powf(p));
    let c_q = 2f64.powf(q - 1.0) / (q * (m + 1.0).powf(q));
    // I is linear: the sums are integrated term by term.
    let sum_p = ev.apply(&inst.f.pow(p))? + ev.apply(&inst.g.pow(p))?;
    let sum_q = ev.apply(&inst.f.pow(q))? + ev.apply(&inst.g.pow(q))?;
    let rhs = sum_p.scale(c_p) + sum_q.scale(c_q);
    Ok(report(inst, Comparison::upper(lhs, rhs)))
}

/// `I[f^γ g^δ]·I[1] ≤ I[f^γ]·I[g^δ]` for non-decreasing `f`, non-increasing `g`,
/// with `I[1]` in closed form.
pub fn check_thm44(inst: &TestInstance, order: usize) -> Result<InequalityReport, CheckError> {
    expect(inst, TheoremId::T44)?;
    let ev = Evaluator::new(inst, order)?;
    let gamma = inst.gamma.ok_or(TestFuncError::Missing(inst.theorem, "gamma"))?;
    let delta = inst.delta.ok_or(TestFuncError::Missing(inst.theorem, "delta"))?;
    let fg = inst.f.pow(gamma);
    let gd = inst.g.pow(delta);
    let one = Estimate::exact(operator_of_one(&inst.params.validate()?, inst.x)?);
    let lhs = ev.apply(&fg.times(&gd))? * one;
    let rhs = ev.apply(&fg)? * ev.apply(&gd)?;
    Ok(report(inst, Comparison::upper(lhs, rhs)))
}

/// Dispatches on `inst.theorem`.
pub fn check_instance(inst: &TestInstance, order: usize) -> Result<InequalityReport, CheckError> {
    match inst.theorem {
        TheoremId::T31 => check_thm31(inst, order),
        TheoremId::T32 => check_thm32(inst, order),
        TheoremId::T41 => check_thm41(inst, order),
        TheoremId::T42 => check_thm42(inst, order),
        TheoremId::T43 => check_thm43(inst, order),
        TheoremId::T44 => check_thm44(inst, order),
    }
}

/// Like [`check_instance`] but turns evaluation failures into an
/// inconclusive row.
pub fn check_or_inconclusive(inst: &TestInstance, order: usize) -> InequalityReport {
    check_instance(inst, order).unwrap_or_else(|e| inconclusive(inst.theorem, inst.seed, Some(inst.clone()), e.to_string()))
}

fn inconclusive(theorem: TheoremId, seed: u64, instance: Option<TestInstance>, why: String) -> InequalityReport {
    InequalityReport {
        theorem,
        seed,
        form: theorem.form(),
        lhs: f64::NAN,
        rhs: f64::NAN,
        margin: f64::NAN,
        combined_error: f64::NAN,
        tolerance: f64::NAN,
        verdict: Verdict::Inconclusive,
        instance,
        failure: Some(why),
    }
}

/// One intermediate inequality of a proof.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub step: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub combined_error: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl StepReport {
    fn new(step: &'static str, cmp: Comparison) -> Self {
        Self {
            step,
            lhs: cmp.lhs,
            rhs: cmp.rhs,
            margin: cmp.margin,
            combined_error: cmp.combined_error,
            tolerance: cmp.tolerance(),
            verdict: cmp.verdict(),
        }
    }
}

/// The intermediate inequalities behind the ratio theorems:
///
/// * `f-share`: `[I f^p]^{1/p} ≤ M/(M+1)·[I (f+g)^p]^{1/p}`
/// * `g-share`: `[I g^p]^{1/p} ≤ 1/(m+1)·[I (f+g)^p]^{1/p}`
/// * `f-share-pow`: `I f^p ≤ (M/(M+1))^p·I (f+g)^p`
/// * `g-share-pow`: `I g^q ≤ (m+1)^{−q}·I (f+g)^q`
/// * `young`: `I[fg] ≤ I[f^p]/p + I[g^q]/q`
/// * `power-mean-p`, `power-mean-q`: `I (f+g)^r ≤ 2^{r−1}·I[f^r + g^r]`
///
/// Needs `m`, `M` and `p`; `q` defaults to the conjugate of `p`.
pub fn check_proof_steps(inst: &TestInstance, order: usize) -> Result<Vec<StepReport>, CheckError> {
    let ev = Evaluator::new(inst, order)?;
    let (m, big_m) = inst.bounds()?;
    let p = inst.exponent_p()?;
    let q = inst.q.unwrap_or(p / (p - 1.0));
    let (f, g) = (&inst.f, &inst.g);
    let sum = f.plus(g);

    let i_fp = ev.apply(&f.pow(p))?;
    let i_gp = ev.apply(&g.pow(p))?;
    let i_fq = ev.apply(&f.pow(q))?;
    let i_gq = ev.apply(&g.pow(q))?;
    let i_sp = ev.apply(&sum.pow(p))?;
    let i_sq = ev.apply(&sum.pow(q))?;
    let i_fg = ev.apply(&f.times(g))?;

    let share_f = big_m / (big_m + 1.0);
    let share_g = 1.0 / (m + 1.0);
    Ok(vec![
        StepReport::new(
            "f-share",
            Comparison::upper(i_fp.powf(1.0 / p), i_sp.powf(1.0 / p).scale(share_f)),
        ),
        StepReport::new(
            "g-share",
            Comparison::upper(i_gp.powf(1.0 / p), i_sp.powf(1.0 / p).scale(share_g)),
        ),
        StepReport::new("f-share-pow", Comparison::upper(i_fp, i_sp.scale(share_f.powf(p)))),
        StepReport::new("g-share-pow", Comparison::upper(i_gq, i_sq.scale(share_g.powf(q)))),
        StepReport::new("young", Comparison::upper(i_fg, i_fp.scale(1.0 / p) + i_gq.scale(1.0 / q))),
        StepReport::new(
            "power-mean-p",
            Comparison::upper(i_sp, (i_fp + i_gp).scale(2f64.powf(p - 1.0))),
        ),
        StepReport::new(
            "power-mean-q",
            Comparison::upper(i_sq, (i_fq + i_gq).scale(2f64.powf(q - 1.0))),
        ),
    ])
}

/// Order-independent tallies over a set of reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    /// Smallest finite margin, `NaN` if there is none.
    pub min_margin: f64,
    /// Largest finite combined error, `NaN` if there is none.
    pub max_combined_error: f64,
}

impl SuiteSummary {
    pub fn of(reports: &[InequalityReport]) -> Self {
        let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
        let finite_min = reports
            .iter()
            .map(|r| r.margin)
            .filter(|m| m.is_finite())
            .fold(f64::NAN, f64::min);
        let finite_max = reports
            .iter()
            .map(|r| r.combined_error)
            .filter(|e| e.is_finite())
            .fold(f64::NAN, f64::max);
        Self {
            total: reports.len(),
            pass: count(Verdict::Pass),
            fail: count(Verdict::Fail),
            inconclusive: count(Verdict::Inconclusive),
            min_margin: finite_min,
            max_combined_error: finite_max,
        }
    }
}

/// Checks `trials` seeded instances per theorem, seeds
/// `base_seed..base_seed+trials`. Rows come back grouped by theorem (in the
/// given order) and sorted by seed regardless of scheduling.
pub fn run_suite(theorems: &[TheoremId], trials: u64, base_seed: u64, order: usize) -> Vec<InequalityReport> {
    let jobs: Vec<(TheoremId, u64)> = theorems
        .iter()
        .flat_map(|&t| (0..trials).map(move |i| (t, base_seed.wrapping_add(i))))
        .collect();
    jobs.par_iter()
        .map(|&(theorem, seed)| match random_instance(seed, theorem) {
            Ok(inst) => check_or_inconclusive(&inst, order),
            Err(e) => inconclusive(theorem, seed, None, e.to_string()),
        })
        .collect()
}

/// The `m = M = 1`, `f = g` instance of `theorem` (with `p = q = 2` and
/// `γ = δ = 1` where relevant), on which each inequality is an equality.
pub fn equality_instance(theorem: TheoremId, params: crate::operator::OperatorParams, x: f64, f: FunctionSpec) -> TestInstance {
    let pair = theorem != TheoremId::T31 && theorem != TheoremId::T32;
    let monotone = theorem == TheoremId::T44;
    TestInstance {
        theorem,
        seed: 0,
        params,
        f: f.clone(),
        g: f,
        m: (!monotone).then_some(1.0),
        big_m: (!monotone).then_some(1.0),
        p: (!monotone).then_some(2.0),
        q: (pair && !monotone).then_some(2.0),
        gamma: monotone.then_some(1.0),
        delta: monotone.then_some(1.0),
        x,
    }
}

/// Default order, re-exported for callers that do not care.
pub const DEFAULT_CHECK_ORDER: usize = DEFAULT_ORDER;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{OperatorParams, ValidationMode};

    fn params() -> OperatorParams {
        OperatorParams::new(0.5, 0.2, -0.4, 0.0, 0.0, ValidationMode::StrictTheorem)
    }

    #[test]
    fn theorem_ids_parse_and_print() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        }
        assert!("3.3".parse::<TheoremId>().is_err());
        assert_eq!(serde_json::to_string(&TheoremId::T42).unwrap(), "\"4.2\"");
    }

    #[test]
    fn verdict_rule() {
        assert_eq!(verdict(0.1, 1e-6), Verdict::Pass);
        assert_eq!(verdict(-1e-12, 1e-14), Verdict::Pass);
        assert_eq!(verdict(-1e-8, 1e-8), Verdict::Inconclusive);
        assert_eq!(verdict(-1e-6, 1e-8), Verdict::Fail);
        assert_eq!(verdict(-2e-9, 0.0), Verdict::Fail);
        assert_eq!(verdict(f64::NAN, 0.0), Verdict::Inconclusive);
    }

    #[test]
    fn equality_instances_have_zero_margin() {
        for t in [TheoremId::T31, TheoremId::T32, TheoremId::T41, TheoremId::T43, TheoremId::T44] {
            let inst = equality_instance(t, params(), 1.0, FunctionSpec::one());
            let r = check_instance(&inst, 64).unwrap();
            assert!(r.margin.abs() <= r.tolerance, "{t}: {r:?}");
            assert_eq!(r.verdict, Verdict::Pass);
        }
    }

    #[test]
    fn proportional_pair_is_tight_for_holder_form() {
        // p = q = 2, f = 4g: (M/m)^{1/pq} = 1 and both sides equal 2·I[g].
        let g = FunctionSpec::Exponential { c: 1.0, lambda: 0.3 };
        let mut inst = equality_instance(TheoremId::T41, params(), 1.0, g.clone());
        inst.f = FunctionSpec::constant(4.0).times(&g);
        inst.m = Some(4.0);
        inst.big_m = Some(4.0);
        let r = check_thm41(&inst, 64).unwrap();
        assert!(r.margin.abs() <= r.tolerance, "{r:?}");
    }

    #[test]
    fn wrong_checker_is_rejected() {
        let inst = equality_instance(TheoremId::T31, params(), 1.0, FunctionSpec::one());
        assert!(matches!(check_thm32(&inst, 64), Err(CheckError::WrongTheorem { .. })));
    }

    #[test]
    fn equality_steps_are_tight() {
        let f = FunctionSpec::Affine { a: 1.0, b: 0.5 };
        // f = g: the power-mean steps are equalities.
        let inst = equality_instance(TheoremId::T43, params(), 1.0, f.clone());
        let steps = check_proof_steps(&inst, 64).unwrap();
        for s in steps.iter().filter(|s| s.step.starts_with("power-mean")) {
            assert!(s.margin.abs() <= s.tolerance, "{s:?}");
        }
        // g = f^{p−1} makes f^p = g^q: Young's step is an equality.
        let mut young = equality_instance(TheoremId::T43, params(), 1.0, f.clone());
        young.p = Some(3.0);
        young.q = Some(1.5);
        young.g = f.pow(2.0);
        young.m = Some(0.1);
        young.big_m = Some(10.0);
        let steps = check_proof_steps(&young, 64).unwrap();
        let y = steps.iter().find(|s| s.step == "young").unwrap();
        assert!(y.margin.abs() <= y.tolerance, "{y:?}");
    }

    #[test]
    fn suite_is_ordered_and_summarized() {
        let reports = run_suite(&[TheoremId::T41, TheoremId::T31], 3, 10, 32);
        let keys: Vec<_> = reports.iter().map(|r| (r.theorem, r.seed)).collect();
        assert_eq!(
            keys,
            vec![
                (TheoremId::T41, 10),
                (TheoremId::T41, 11),
                (TheoremId::T41, 12),
                (TheoremId::T31, 10),
                (TheoremId::T31, 11),
                (TheoremId::T31, 12)
            ]
        );
        let s = SuiteSummary::of(&reports);
        assert_eq!(s.total, 6);
        assert_eq!(s.pass + s.fail + s.inconclusive, 6);
        let mut reversed = reports.clone();
        reversed.reverse();
        let r = SuiteSummary::of(&reversed);
        assert_eq!((r.pass, r.fail, r.inconclusive), (s.pass, s.fail, s.inconclusive));
        assert_eq!(r.min_margin, s.min_margin);
    }
}

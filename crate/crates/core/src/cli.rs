//! Command-line front end: operator evaluation, kernel samples, single
//! checks, seeded campaigns, parameter sweeps and a self-test.
//!
//! Exit codes: 0 success or pass, 1 a fail verdict, 2 invalid parameters or
//! hypotheses, 3 numerical failure, 4 inconclusive, 5 I/O error, 64 usage.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::inequalities::{
    check_instance, equality_instance, run_suite, CheckError, InequalityReport, SuiteSummary, TheoremId, Verdict,
};
use crate::operator::{
    apply_operator, kernel_closed, kernel_series, OperatorError, OperatorParams, OperatorResult,
    ValidationMode, DEFAULT_ORDER,
};
use crate::testfuncs::{random_instance, FunctionSpec, TestFuncError, TestInstance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;
pub const EXIT_IO: i32 = 5;
pub const EXIT_USAGE: i32 = 64;

const GRAMMAR: &str = "\
Function selectors:
  one                      1
  power:c,p                c*t^p
  exp:c,l                  c*e^(l*t)
  affine:a,b               a + b*t
  table:t0/v0,t1/v1,...    piecewise linear, constant outside [t0, tn]
  sum(f;g)  prod(f;g)  pow(f;e)

Exit codes: 0 ok/pass, 1 fail, 2 invalid input, 3 numeric failure,
4 inconclusive, 5 I/O error, 64 usage error.";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Invalid(_) => EXIT_INVALID,
            Self::Numeric(_) => EXIT_NUMERIC,
            Self::Io { .. } => EXIT_IO,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::Invalid(_) | OperatorError::Domain { .. } | OperatorError::Order(_) => {
                Self::Invalid(e.to_string())
            }
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::Operator(op) => op.into(),
            CheckError::Instance(inst) => Self::Invalid(inst.to_string()),
            CheckError::WrongTheorem { .. } => Self::Usage(e.to_string()),
        }
    }
}

impl From<TestFuncError> for CliError {
    fn from(e: TestFuncError) -> Self {
        match e {
            TestFuncError::Parse { .. } => Self::Usage(e.to_string()),
            _ => Self::Invalid(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Eval,
    Kernel,
    Check,
    Suite,
    Sweep,
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Human,
    Csv,
    Json,
}

/// Where `check` gets its instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Seeded random instance for the theorem.
    #[default]
    Random,
    /// Functions, bounds and exponents from the flags.
    Explicit,
    /// `m = M = 1`, `f = g ≡ 1`.
    Equality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    Alpha,
    Beta,
    Eta,
    Mu,
    K,
    P,
    M,
    BigM,
}

impl AxisName {
    fn as_str(self) -> &'static str {
        match self {
            Self::Alpha => "alpha",
            Self::Beta => "beta",
            Self::Eta => "eta",
            Self::Mu => "mu",
            Self::K => "k",
            Self::P => "p",
            Self::M => "m",
            Self::BigM => "M",
        }
    }
}

/// A sweep axis, `name=start:stop:count` with `count` evenly spaced values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Axis {
    pub name: AxisName,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("axis `{s}` is not name=start:stop:count");
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let name = match name.trim() {
            "alpha" => AxisName::Alpha,
            "beta" => AxisName::Beta,
            "eta" => AxisName::Eta,
            "mu" => AxisName::Mu,
            "k" => AxisName::K,
            "p" => AxisName::P,
            "m" => AxisName::M,
            "M" => AxisName::BigM,
            other => return Err(format!("unknown axis `{other}` (expected alpha, beta, eta, mu, k, p, m or M)")),
        };
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        Ok(Self { name, start, stop, count })
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}:{}:{}", self.name.as_str(), self.start, self.stop, self.count)
    }
}

impl TryFrom<String> for Axis {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Axis> for String {
    fn from(a: Axis) -> Self {
        a.to_string()
    }
}

/// Every setting of a run. Defaults give a valid `suite` run; a JSON file
/// passed with `--config` overrides individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub mu: f64,
    pub k: f64,
    pub mode: ValidationMode,
    pub x: f64,
    /// Function selector for `eval`, and `f` of explicit instances.
    pub f: String,
    pub g: String,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub p: f64,
    /// Defaults to the conjugate of `p`.
    pub q: Option<f64>,
    pub gamma: f64,
    pub delta: f64,
    pub theorem: Option<TheoremId>,
    pub theorems: Vec<TheoremId>,
    pub source: Source,
    /// A complete instance for `check`, used instead of `source`.
    pub instance: Option<TestInstance>,
    pub seed: u64,
    pub trials: u64,
    pub order: usize,
    /// Kernel evaluation point; without it `samples` points are spread over `(0, x)`.
    pub tau: Option<f64>,
    pub samples: usize,
    pub terms: usize,
    pub axes: Vec<Axis>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Suite,
            alpha: 0.5,
            beta: 0.2,
            eta: -0.4,
            mu: 0.0,
            k: 0.0,
            mode: ValidationMode::StrictTheorem,
            x: 1.0,
            f: "affine:1,1".into(),
            g: "one".into(),
            m: 1.0,
            big_m: 2.0,
            p: 2.0,
            q: None,
            gamma: 1.0,
            delta: 1.0,
            theorem: None,
            theorems: TheoremId::ALL.to_vec(),
            source: Source::Random,
            instance: None,
            seed: 42,
            trials: 1000,
            order: DEFAULT_ORDER,
            tau: None,
            samples: 16,
            terms: 200,
            axes: Vec::new(),
            format: None,
            out: None,
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> OperatorParams {
        OperatorParams::new(self.alpha, self.beta, self.eta, self.mu, self.k, self.mode)
    }

    fn theorem(&self) -> Result<TheoremId, CliError> {
        self.theorem
            .ok_or_else(|| CliError::Usage(format!("{:?} needs --theorem", self.command).to_lowercase()))
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// The instance described by the explicit fields.
    fn explicit_instance(&self, theorem: TheoremId) -> Result<TestInstance, CliError> {
        let monotone = theorem == TheoremId::T44;
        let two_exponents = !monotone && theorem != TheoremId::T31 && theorem != TheoremId::T32;
        if !monotone && !(self.p > 1.0) {
            return Err(CliError::Invalid(format!("p = {} must exceed 1", self.p)));
        }
        Ok(TestInstance {
            theorem,
            seed: self.seed,
            params: self.params(),
            f: parse_function(&self.f)?,
            g: parse_function(&self.g)?,
            m: (!monotone).then_some(self.m),
            big_m: (!monotone).then_some(self.big_m),
            p: (!monotone).then_some(self.p),
            q: two_exponents.then(|| self.q.unwrap_or(self.p / (self.p - 1.0))),
            gamma: monotone.then_some(self.gamma),
            delta: monotone.then_some(self.delta),
            x: self.x,
        })
    }
}

fn parse_function(s: &str) -> Result<FunctionSpec, CliError> {
    s.parse::<FunctionSpec>().map_err(CliError::from)
}

/// `all` or a comma-separated list of theorem ids.
#[derive(Debug, Clone)]
struct TheoremList(Vec<TheoremId>);

fn parse_theorems(s: &str) -> Result<TheoremList, String> {
    if s.trim() == "all" {
        return Ok(TheoremList(TheoremId::ALL.to_vec()));
    }
    s.split(',')
        .map(|t| t.parse::<TheoremId>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(TheoremList)
}

#[derive(Debug, Parser)]
#[command(name = "kfrac", version, about = "Generalized k-fractional integrals and their inequalities", after_help = GRAMMAR)]
struct Cli {
    /// JSON file whose fields override the flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    /// Base quadrature order
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=256))]
    order: Option<u64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate the operator on one function
    Eval {
        #[command(flatten)]
        op: OpArgs,
        /// Function selector
        #[arg(long = "fn")]
        function: Option<String>,
    },
    /// Sample the kernel in closed form and as a truncated series
    Kernel {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, allow_negative_numbers = true)]
        tau: Option<f64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        samples: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        terms: Option<u64>,
    },
    /// Check one instance of one theorem
    Check {
        #[arg(long)]
        theorem: Option<TheoremId>,
        #[arg(long, value_enum)]
        source: Option<Source>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        op: OpArgs,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Check seeded random instances of several theorems
    Suite {
        /// `all` or a comma-separated list such as 3.1,4.2
        #[arg(long, value_parser = parse_theorems)]
        theorems: Option<TheoremList>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check one function pair over a parameter grid
    Sweep {
        #[arg(long)]
        theorem: Option<TheoremId>,
        /// name=start:stop:count over alpha, beta, eta, mu, k, p, m or M; repeatable
        #[arg(long = "axis")]
        axes: Vec<Axis>,
        #[command(flatten)]
        op: OpArgs,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Run the built-in numerical self-checks
    Selftest,
}

#[derive(Debug, Args)]
struct OpArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    /// strict-theorem or definition-only
    #[arg(long)]
    mode: Option<ValidationMode>,
}

#[derive(Debug, Args)]
struct PairArgs {
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    #[arg(long = "M", allow_negative_numbers = true)]
    big_m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl OpArgs {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.alpha, self.alpha);
        set(&mut c.beta, self.beta);
        set(&mut c.eta, self.eta);
        set(&mut c.mu, self.mu);
        set(&mut c.k, self.k);
        set(&mut c.x, self.x);
        set(&mut c.mode, self.mode);
    }
}

impl PairArgs {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.f, self.f);
        set(&mut c.g, self.g);
        set(&mut c.m, self.m);
        set(&mut c.big_m, self.big_m);
        set(&mut c.p, self.p);
        if self.q.is_some() {
            c.q = self.q;
        }
        set(&mut c.gamma, self.gamma);
        set(&mut c.delta, self.delta);
    }
}

impl Cli {
    fn into_config(self) -> (RunConfig, Option<PathBuf>) {
        let mut c = RunConfig {
            format: self.format,
            out: self.out,
            jobs: self.jobs.map(|j| j as usize),
            ..RunConfig::default()
        };
        set(&mut c.order, self.order.map(|o| o as usize));
        match self.command {
            Cmd::Eval { op, function } => {
                c.command = Command::Eval;
                op.apply(&mut c);
                set(&mut c.f, function);
            }
            Cmd::Kernel { op, tau, samples, terms } => {
                c.command = Command::Kernel;
                op.apply(&mut c);
                c.tau = tau;
                set(&mut c.samples, samples.map(|s| s as usize));
                set(&mut c.terms, terms.map(|t| t as usize));
            }
            Cmd::Check {
                theorem,
                source,
                seed,
                op,
                pair,
            } => {
                c.command = Command::Check;
                c.theorem = theorem;
                set(&mut c.source, source);
                set(&mut c.seed, seed);
                op.apply(&mut c);
                pair.apply(&mut c);
            }
            Cmd::Suite { theorems, trials, seed } => {
                c.command = Command::Suite;
                set(&mut c.theorems, theorems.map(|t| t.0));
                set(&mut c.trials, trials);
                set(&mut c.seed, seed);
            }
            Cmd::Sweep { theorem, axes, op, pair } => {
                c.command = Command::Sweep;
                c.theorem = theorem;
                c.axes = axes;
                op.apply(&mut c);
                pair.apply(&mut c);
            }
            Cmd::Selftest => c.command = Command::Selftest,
        }
        (c, self.config)
    }
}

/// Overlays the fields of a JSON object onto `config`.
pub fn apply_overrides(config: &RunConfig, overrides: Value) -> Result<RunConfig, CliError> {
    let Value::Object(fields) = overrides else {
        return Err(CliError::Usage("config file must hold a JSON object".into()));
    };
    let mut base = serde_json::to_value(config).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Value::Object(slots) = &mut base {
        slots.extend(fields);
    }
    serde_json::from_value(base).map_err(|e| CliError::Usage(format!("config: {e}")))
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let (mut config, config_path) = cli.into_config();
    if let Some(path) = config_path {
        let loaded = fs::read_to_string(&path)
            .map_err(|e| CliError::io(&path, e))
            .and_then(|text| serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display()))))
            .and_then(|v| apply_overrides(&config, v));
        match loaded {
            Ok(c) => config = c,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return e.code();
            }
        }
    }
    match execute(&config, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}

/// Runs a fully resolved configuration.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    if config.trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    if config.order == 0 || config.order > crate::operator::MAX_OPERATOR_ORDER {
        return Err(CliError::Usage(format!("order {} outside 1..=256", config.order)));
    }
    let mut diag = Vec::new();
    let mut body = || -> Result<(Vec<u8>, i32), CliError> {
        let mut buf = Vec::new();
        let code = match config.command {
            Command::Eval => cmd_eval(config, &mut buf)?,
            Command::Kernel => cmd_kernel(config, &mut buf)?,
            Command::Check => cmd_check(config, &mut buf)?,
            Command::Suite => cmd_suite(config, &mut buf, &mut diag)?,
            Command::Sweep => cmd_sweep(config, &mut buf)?,
            Command::Selftest => cmd_selftest(config, &mut buf)?,
        };
        Ok((buf, code))
    };
    let (buf, code) = match config.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(body)?,
        None => body()?,
    };
    let _ = stderr.write_all(&diag);
    match &config.out {
        Some(path) => fs::write(path, &buf).map_err(|e| CliError::io(path, e))?,
        None => stdout.write_all(&buf).map_err(|e| CliError::io(Path::new("<stdout>"), e))?,
    }
    Ok(code)
}

fn write_err(e: io::Error) -> CliError {
    CliError::io(Path::new("<report>"), e)
}

/// `%.12g`-style rendering for human output.
pub fn human(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Shortest round-trip decimal; empty for non-finite values.
fn csv_num(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite float serializes")
    } else {
        String::new()
    }
}

fn csv_opt(x: Option<f64>) -> String {
    x.map(csv_num).unwrap_or_default()
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub const CSV_HEADER: &str =
    "theorem,seed,alpha,beta,eta,mu,k,p,q,m,M,gamma,delta,x,lhs,rhs,margin,combined_error,verdict";

/// One report line in the fixed column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub theorem: String,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub mu: Option<f64>,
    pub k: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub m: Option<f64>,
    #[serde(rename = "M")]
    pub big_m: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub x: Option<f64>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub combined_error: Option<f64>,
    pub verdict: String,
}

impl ReportRow {
    fn from_instance(inst: &TestInstance, verdict: String) -> Self {
        let p = inst.params;
        Self {
            theorem: inst.theorem.to_string(),
            seed: Some(inst.seed),
            alpha: Some(p.alpha),
            beta: Some(p.beta),
            eta: Some(p.eta),
            mu: Some(p.mu),
            k: Some(p.k),
            p: inst.p,
            q: inst.q,
            m: inst.m,
            big_m: inst.big_m,
            gamma: inst.gamma,
            delta: inst.delta,
            x: Some(inst.x),
            lhs: None,
            rhs: None,
            margin: None,
            combined_error: None,
            verdict,
        }
    }

    pub fn from_report(r: &InequalityReport) -> Self {
        let mut row = match &r.instance {
            Some(inst) => Self::from_instance(inst, r.verdict.to_string()),
            None => Self {
                theorem: r.theorem.to_string(),
                seed: Some(r.seed),
                alpha: None,
                beta: None,
                eta: None,
                mu: None,
                k: None,
                p: None,
                q: None,
                m: None,
                big_m: None,
                gamma: None,
                delta: None,
                x: None,
                lhs: None,
                rhs: None,
                margin: None,
                combined_error: None,
                verdict: r.verdict.to_string(),
            },
        };
        row.lhs = finite(r.lhs);
        row.rhs = finite(r.rhs);
        row.margin = finite(r.margin);
        row.combined_error = finite(r.combined_error);
        row
    }

    /// Summary line: counts in the verdict column, extreme margin and error.
    pub fn summary(s: &SuiteSummary) -> Self {
        Self {
            theorem: "summary".into(),
            seed: None,
            alpha: None,
            beta: None,
            eta: None,
            mu: None,
            k: None,
            p: None,
            q: None,
            m: None,
            big_m: None,
            gamma: None,
            delta: None,
            x: None,
            lhs: None,
            rhs: None,
            margin: finite(s.min_margin),
            combined_error: finite(s.max_combined_error),
            verdict: format!("pass={} fail={} inconclusive={}", s.pass, s.fail, s.inconclusive),
        }
    }

    pub fn csv(&self) -> String {
        let nums = [
            self.alpha,
            self.beta,
            self.eta,
            self.mu,
            self.k,
            self.p,
            self.q,
            self.m,
            self.big_m,
            self.gamma,
            self.delta,
            self.x,
            self.lhs,
            self.rhs,
            self.margin,
            self.combined_error,
        ];
        let mut fields = vec![self.theorem.clone(), self.seed.map(|s| s.to_string()).unwrap_or_default()];
        fields.extend(nums.iter().map(|&v| csv_opt(v)));
        fields.push(self.verdict.clone());
        fields.join(",")
    }

    fn human(&self, out: &mut dyn Write) -> io::Result<()> {
        let opt = |v: Option<f64>| v.map(human).unwrap_or_else(|| "-".into());
        writeln!(out, "theorem         {}", self.theorem)?;
        if let Some(seed) = self.seed {
            writeln!(out, "seed            {seed}")?;
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("eta", self.eta),
            ("mu", self.mu),
            ("k", self.k),
            ("p", self.p),
            ("q", self.q),
            ("m", self.m),
            ("M", self.big_m),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("x", self.x),
            ("lhs", self.lhs),
            ("rhs", self.rhs),
            ("margin", self.margin),
            ("combined_error", self.combined_error),
        ] {
            if v.is_some() || matches!(name, "lhs" | "rhs" | "margin" | "combined_error") {
                writeln!(out, "{name:<16}{}", opt(v))?;
            }
        }
        writeln!(out, "verdict         {}", self.verdict)
    }
}

fn write_rows(rows: &[ReportRow], summary: Option<&SuiteSummary>, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for row in rows {
                writeln!(out, "{}", row.csv())?;
            }
            if let Some(s) = summary {
                writeln!(out, "{}", ReportRow::summary(s).csv())?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                rows: &'a [ReportRow],
                #[serde(skip_serializing_if = "Option::is_none")]
                summary: Option<&'a SuiteSummary>,
            }
            serde_json::to_writer_pretty(&mut *out, &Doc { rows, summary }).map_err(io::Error::other)?;
            writeln!(out)?;
        }
        Format::Human => {
            for (i, row) in rows.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                row.human(out)?;
            }
            if let Some(s) = summary {
                write_summary_table(s, out)?;
            }
        }
    }
    Ok(())
}

fn write_summary_table(total: &SuiteSummary, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out)?;
    writeln!(
        out,
        "total {}  pass {}  fail {}  inconclusive {}  min margin {}  max error {}",
        total.total,
        total.pass,
        total.fail,
        total.inconclusive,
        human(total.min_margin),
        human(total.max_combined_error)
    )
}

fn cmd_eval(c: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = parse_function(&c.f)?;
    let params = c.params().validate()?;
    let r: OperatorResult = apply_operator(&params, &f, c.x, c.order)?;
    match c.format_or(Format::Human) {
        Format::Human => writeln!(
            out,
            "value           {}\nerror_estimate  {}\norder_used      {}",
            human(r.value),
            human(r.error_estimate),
            r.order_used
        ),
        Format::Csv => writeln!(
            out,
            "value,error_estimate,order_used\n{},{},{}",
            csv_num(r.value),
            csv_num(r.error_estimate),
            r.order_used
        ),
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &r).map_err(io::Error::other).and_then(|_| writeln!(out))
        }
    }
    .map_err(write_err)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct KernelRow {
    tau: f64,
    z: f64,
    kernel_closed: f64,
    kernel_series: f64,
    terms: usize,
}

fn cmd_kernel(c: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = c.params().validate()?;
    let taus: Vec<f64> = match c.tau {
        Some(t) => vec![t],
        None => (0..c.samples).map(|i| c.x * (i as f64 + 0.5) / c.samples as f64).collect(),
    };
    let mut rows = Vec::with_capacity(taus.len());
    for tau in taus {
        rows.push(KernelRow {
            tau,
            z: 1.0 - (tau / c.x).powf(c.k + 1.0),
            kernel_closed: kernel_closed(&params, c.x, tau)?,
            kernel_series: kernel_series(&params, c.x, tau, c.terms)?,
            terms: c.terms,
        });
    }
    match c.format_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("tau,z,kernel_closed,kernel_series,terms\n");
            for r in &rows {
                s += &format!(
                    "{},{},{},{},{}\n",
                    csv_num(r.tau),
                    csv_num(r.z),
                    csv_num(r.kernel_closed),
                    csv_num(r.kernel_series),
                    r.terms
                );
            }
            out.write_all(s.as_bytes())
        }
        Format::Json => serde_json::to_writer_pretty(&mut *out, &rows)
            .map_err(io::Error::other)
            .and_then(|_| writeln!(out)),
        Format::Human => {
            let mut res = writeln!(out, "{:>20} {:>20} {:>20} {:>20}", "tau", "z", "closed", "series");
            for r in &rows {
                res = res.and_then(|_| {
                    writeln!(
                        out,
                        "{:>20} {:>20} {:>20} {:>20}",
                        human(r.tau),
                        human(r.z),
                        human(r.kernel_closed),
                        human(r.kernel_series)
                    )
                });
            }
            res
        }
    }
    .map_err(write_err)?;
    Ok(EXIT_OK)
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_OK,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// The instance `check` runs on, with hypotheses verified.
pub fn check_target(c: &RunConfig) -> Result<TestInstance, CliError> {
    if let Some(inst) = &c.instance {
        inst.params.validate()?;
        inst.verify()?;
        return Ok(inst.clone());
    }
    let theorem = c.theorem()?;
    let inst = match c.source {
        Source::Random => random_instance(c.seed, theorem)?,
        Source::Equality => {
            let mut inst = equality_instance(theorem, c.params(), c.x, FunctionSpec::one());
            inst.seed = c.seed;
            inst
        }
        Source::Explicit => c.explicit_instance(theorem)?,
    };
    inst.params.validate()?;
    inst.verify()?;
    Ok(inst)
}

fn cmd_check(c: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let inst = check_target(c)?;
    let report = check_instance(&inst, c.order)?;
    let row = ReportRow::from_report(&report);
    match c.format_or(Format::Human) {
        Format::Json => serde_json::to_writer_pretty(&mut *out, &row)
            .map_err(io::Error::other)
            .and_then(|_| writeln!(out)),
        f => write_rows(std::slice::from_ref(&row), None, f, out),
    }
    .map_err(write_err)?;
    Ok(verdict_code(report.verdict))
}

fn cmd_suite(c: &RunConfig, out: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    if c.theorems.is_empty() {
        return Err(CliError::Usage("no theorems selected".into()));
    }
    let reports = run_suite(&c.theorems, c.trials, c.seed, c.order);
    let summary = SuiteSummary::of(&reports);
    let rows: Vec<ReportRow> = reports.iter().map(ReportRow::from_report).collect();
    write_rows(&rows, Some(&summary), c.format_or(Format::Csv), out).map_err(write_err)?;
    let _ = writeln!(
        stderr,
        "{} checks: {} pass, {} fail, {} inconclusive",
        summary.total, summary.pass, summary.fail, summary.inconclusive
    );
    Ok(if summary.fail == 0 { EXIT_OK } else { EXIT_FAIL })
}

/// The grid points of `c.axes`, first axis outermost. Each point is the
/// configuration with the axis values substituted.
pub fn sweep_points(c: &RunConfig) -> Vec<RunConfig> {
    let mut points = vec![c.clone()];
    for axis in &c.axes {
        points = points
            .into_iter()
            .flat_map(|base| {
                axis.values().into_iter().map(move |v| {
                    let mut next = base.clone();
                    match axis.name {
                        AxisName::Alpha => next.alpha = v,
                        AxisName::Beta => next.beta = v,
                        AxisName::Eta => next.eta = v,
                        AxisName::Mu => next.mu = v,
                        AxisName::K => next.k = v,
                        AxisName::P => next.p = v,
                        AxisName::M => next.m = v,
                        AxisName::BigM => next.big_m = v,
                    }
                    next
                })
            })
            .collect();
    }
    points
}

/// One sweep row: a check, or `skipped` when the point leaves the
/// admissible window or breaks the hypotheses.
pub fn sweep_row(point: &RunConfig, theorem: TheoremId) -> Result<ReportRow, CliError> {
    let inst = point.explicit_instance(theorem);
    let inst = match inst {
        Ok(inst) => inst,
        Err(CliError::Invalid(_)) => {
            let mut fallback = point.clone();
            fallback.p = 2.0;
            let mut row = ReportRow::from_instance(&fallback.explicit_instance(theorem)?, "skipped".into());
            row.p = Some(point.p);
            row.q = None;
            return Ok(row);
        }
        Err(e) => return Err(e),
    };
    if inst.params.validate().is_err() || inst.verify().is_err() {
        return Ok(ReportRow::from_instance(&inst, "skipped".into()));
    }
    Ok(match check_instance(&inst, point.order) {
        Ok(report) => ReportRow::from_report(&report),
        Err(_) => ReportRow::from_instance(&inst, Verdict::Inconclusive.to_string()),
    })
}

fn cmd_sweep(c: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    use rayon::prelude::*;
    let theorem = c.theorem()?;
    let points = sweep_points(c);
    let rows = points
        .par_iter()
        .map(|p| sweep_row(p, theorem))
        .collect::<Result<Vec<_>, _>>()?;
    write_rows(&rows, None, c.format_or(Format::Csv), out).map_err(write_err)?;
    let failed = rows.iter().any(|r| r.verdict == "fail");
    Ok(if failed { EXIT_FAIL } else { EXIT_OK })
}

fn cmd_selftest(c: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let results = selftest::run_all(c.order);
    let mut all = true;
    let mut text = format!("{:<28} {:<6} {:>12}  {}\n", "check", "status", "worst", "tolerance");
    for r in &results {
        all &= r.passed;
        text += &format!(
            "{:<28} {:<6} {:>12}  {}\n",
            r.name,
            if r.passed { "pass" } else { "FAIL" },
            human(r.worst),
            human(r.tolerance)
        );
    }
    out.write_all(text.as_bytes()).map_err(write_err)?;
    Ok(if all { EXIT_OK } else { EXIT_FAIL })
}

/// Small versions of the numerical cross-checks, runnable from the binary.
pub mod selftest {
    use crate::operator::{
        apply_operator, kernel_closed, kernel_series, operator_of_one, rl_k_integral_with_order, OperatorParams,
        ValidationMode,
    };
    use crate::quadrature::gauss_jacobi_rule;
    use crate::specfun::{beta, gauss_2f1, log_gamma, HypergeomArgs};
    use crate::testfuncs::{random_params, FunctionSpec};

    #[derive(Debug, Clone)]
    pub struct SelfCheck {
        pub name: &'static str,
        /// Largest relative deviation seen (infinite on an evaluation error).
        pub worst: f64,
        pub tolerance: f64,
        pub passed: bool,
    }

    fn finish(name: &'static str, deviations: impl IntoIterator<Item = Option<f64>>, tolerance: f64) -> SelfCheck {
        let worst = deviations
            .into_iter()
            .map(|d| d.filter(|v| v.is_finite()).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        SelfCheck {
            name,
            worst,
            tolerance,
            passed: worst <= tolerance,
        }
    }

    fn rel(got: f64, want: f64) -> f64 {
        ((got - want) / want).abs()
    }

    pub fn special_functions() -> SelfCheck {
        let pi = std::f64::consts::PI;
        let cases: Vec<Option<f64>> = vec![
            log_gamma(0.5).ok().map(|v| rel(v, 0.5 * pi.ln())),
            log_gamma(10.0).ok().map(|v| rel(v, 362_880f64.ln())),
            beta(0.5, 0.5).ok().map(|v| rel(v, pi)),
            gauss_2f1(&HypergeomArgs::new(1.0, 1.0, 2.0, 0.5)).ok()
                .map(|v| rel(v, 2.0 * 2f64.ln())),
            // 2F1(1/2, 1/2; 3/2; z²) = asin(z)/z.
            gauss_2f1(&HypergeomArgs::new(0.5, 0.5, 1.5, 0.95 * 0.95)).ok()
                .map(|v| rel(v, 0.95f64.asin() / 0.95)),
            // Gauss sum: 2F1(1/2, 1/2; 2; 1) = 4/π.
            gauss_2f1(&HypergeomArgs::new(0.5, 0.5, 2.0, 1.0)).ok()
                .map(|v| rel(v, 4.0 / pi)),
        ];
        finish("special functions", cases, 1e-12)
    }

    pub fn quadrature_moments() -> SelfCheck {
        let exps = [-0.5, 0.0, 0.5, 1.0];
        let mut devs = Vec::new();
        for &a in &exps {
            for &b in &exps {
                for n in [4usize, 16] {
                    let Ok(rule) = gauss_jacobi_rule(a, b, n) else {
                        devs.push(None);
                        continue;
                    };
                    for j in 0..2 * n {
                        let got = rule.integrate(|u| u.powi(j as i32)).ok();
                        let want = beta(b + 1.0 + j as f64, a + 1.0).ok();
                        devs.push(got.zip(want).map(|(g, w)| rel(g, w)));
                    }
                }
            }
        }
        finish("quadrature moments", devs, 1e-10)
    }

    pub fn reduction(order: usize) -> SelfCheck {
        let f = FunctionSpec::Exponential { c: 1.0, lambda: 0.4 };
        let devs = [(0.5, 0.0, 1.0), (1.5, 1.0, 2.0), (0.8, 0.5, 0.7), (2.3, 2.0, 1.5)].map(|(alpha, k, x)| {
            let params = OperatorParams::new(alpha, -alpha, 0.0, 0.0, k, ValidationMode::DefinitionOnly);
            let general = params.validate().ok().and_then(|p| apply_operator(&p, &f, x, order).ok());
            let direct = rl_k_integral_with_order(alpha, k, &f, x, order).ok();
            general.zip(direct).map(|(g, d)| rel(g.value, d.value))
        });
        finish("reduction to RL k-integral", devs, 1e-10)
    }

    pub fn kernel_agreement() -> SelfCheck {
        let devs = (0..10u64).map(|i| {
            let params = random_params(1000 + i, 0).ok()?.validate().ok()?;
            let x = 1.0 + 0.2 * i as f64;
            // (τ/x)^{k+1} ≥ 0.15 keeps z ≤ 0.85.
            let tau = x * (0.15 + 0.08 * i as f64).powf(1.0 / (params.k + 1.0));
            let closed = kernel_closed(&params, x, tau).ok()?;
            let series = kernel_series(&params, x, tau, 200).ok()?;
            Some(rel(series, closed))
        });
        finish("kernel series vs closed form", devs, 1e-10)
    }

    pub fn image_of_one(order: usize) -> SelfCheck {
        let devs = (0..10u64).map(|i| {
            let params = random_params(2000 + i, 0).ok()?.validate().ok()?;
            let x = 0.5 + 0.25 * i as f64;
            let closed = operator_of_one(&params, x).ok()?;
            let quad = apply_operator(&params, &FunctionSpec::one(), x, order).ok()?;
            Some(rel(quad.value, closed))
        });
        finish("closed-form image of 1", devs, 1e-8)
    }

    pub fn run_all(order: usize) -> Vec<SelfCheck> {
        vec![
            special_functions(),
            quadrature_moments(),
            reduction(order),
            kernel_agreement(),
            image_of_one(order),
        ]
    }
}

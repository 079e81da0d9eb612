//! Newton's method with precision raised on demand, over polynomials
//! evaluated by Horner's rule.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::Arith;
use crate::error::{ArithError, SolveError};
use crate::float::GrossFloat;
use crate::precision::{relative_err, should_escalate, PrecisionState};
use crate::profiler::{OpCounter, OpSink};

/// Polynomial with coefficients in degree-descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<GrossFloat>,
}

impl Polynomial {
    /// Leading zeros are dropped; an empty or all-zero list is the zero polynomial.
    pub fn new(coeffs: Vec<GrossFloat>) -> Self {
        let first = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
        let mut coeffs = coeffs[first..].to_vec();
        if coeffs.is_empty() {
            coeffs.push(GrossFloat::zero());
        }
        Polynomial { coeffs }
    }

    pub fn from_integers(ar: &Arith, coeffs: &[i64]) -> Result<Self, ArithError> {
        let c = coeffs.iter().map(|&a| ar.from_integer(a)).collect::<Result<Vec<_>, _>>()?;
        Ok(Polynomial::new(c))
    }

    /// (x - 1)^5.
    pub fn quintic(ar: &Arith) -> Self {
        Polynomial::from_integers(ar, &[1, -5, 10, -10, 5, -1]).expect("small integers fit any format")
    }

    pub fn coefficients(&self) -> &[GrossFloat] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// Derivative with coefficients formed exactly.
    pub fn derivative(&self, ar: &Arith) -> Result<Polynomial, ArithError> {
        let d = self.degree();
        if d == 0 {
            return Ok(Polynomial::new(vec![]));
        }
        let wide = ar.widened(2 * ar.max_section() + 2)?;
        let mut out = Vec::with_capacity(d);
        for (i, a) in self.coeffs[..d].iter().enumerate() {
            let k = ar.from_integer((d - i) as i64)?;
            let (c, rep) = wide.mul(a, &k, a.width() + k.width() - 1, &mut crate::profiler::NoCount)?;
            if rep.rounded || c.trimmed().width() > ar.max_section() + 1 {
                return Err(ArithError::Operand("derivative coefficient needs more than T+1 chunks".into()));
            }
            out.push(c.trimmed());
        }
        Ok(Polynomial::new(out))
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, ar: &Arith, x: &BigRational) -> BigRational {
        self.coeffs.iter().fold(BigRational::zero(), |p, a| p * x + ar.to_rational(a))
    }
}

/// How the Horner accumulator is sized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Growth {
    /// Keep every chunk the exact products produce, up to `max_prec + 1`.
    #[default]
    Gradual,
    /// Hold the accumulator at `max_prec + 1` chunks throughout.
    Padded,
}

/// One Horner step: `product = p·x`, then `value = product + a_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HornerStep {
    pub product: GrossFloat,
    pub value: GrossFloat,
}

/// p(x) with partial results kept to at most `max_prec + 1` chunks.
pub fn horner_eval<C: OpSink>(ar: &Arith, poly: &Polynomial, x: &GrossFloat, max_prec: usize, counter: &mut C) -> Result<GrossFloat, ArithError> {
    horner_eval_with(ar, poly, x, max_prec, Growth::Gradual, counter)
}

pub fn horner_eval_with<C: OpSink>(ar: &Arith, poly: &Polynomial, x: &GrossFloat, max_prec: usize, growth: Growth, counter: &mut C) -> Result<GrossFloat, ArithError> {
    let mut p = poly.coeffs[0].clone();
    for a in &poly.coeffs[1..] {
        p = horner_step(ar, &p, x, a, max_prec, growth, counter)?.value;
    }
    Ok(p)
}

/// Horner evaluation returning the leading coefficient followed by every step.
pub fn horner_trace<C: OpSink>(ar: &Arith, poly: &Polynomial, x: &GrossFloat, max_prec: usize, growth: Growth, counter: &mut C) -> Result<(GrossFloat, Vec<HornerStep>), ArithError> {
    let first = poly.coeffs[0].clone();
    let mut p = first.clone();
    let mut steps = Vec::with_capacity(poly.degree());
    for a in &poly.coeffs[1..] {
        let s = horner_step(ar, &p, x, a, max_prec, growth, counter)?;
        p = s.value.clone();
        steps.push(s);
    }
    Ok((first, steps))
}

fn horner_step<C: OpSink>(ar: &Arith, p: &GrossFloat, x: &GrossFloat, a: &GrossFloat, max_prec: usize, growth: Growth, counter: &mut C) -> Result<HornerStep, ArithError> {
    ar.check_section(max_prec)?;
    let (product, value) = match growth {
        Growth::Gradual => {
            let rs = (p.width() + x.width()).saturating_sub(1).min(max_prec);
            let (prod, _) = ar.mul(p, x, rs, counter)?;
            let rs = prod.width().max(a.width()).max(1) - 1;
            let (v, _) = ar.add(&prod, a, rs.min(max_prec), counter)?;
            (prod, v)
        }
        Growth::Padded => {
            let pp = if p.is_zero() { p.clone() } else { p.with_width(max_prec + 1) };
            let (prod, _) = ar.mul(&pp, x, max_prec, counter)?;
            let (v, _) = ar.add(&prod, a, max_prec, counter)?;
            (prod, v)
        }
    };
    Ok(HornerStep { product, value })
}

/// p'(x), with the derivative's coefficients formed exactly first.
pub fn horner_eval_derivative<C: OpSink>(ar: &Arith, poly: &Polynomial, x: &GrossFloat, max_prec: usize, counter: &mut C) -> Result<GrossFloat, ArithError> {
    horner_eval(ar, &poly.derivative(ar)?, x, max_prec, counter)
}

/// Working precision of a Newton run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Everything at section q; the iterate is stored with q+1 chunks.
    Fixed(usize),
    /// Single-precision iterate; p and p' evaluated at a level raised when
    /// the error stops decreasing.
    Dynamic,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Fixed(q) => write!(f, "fixed({q})"),
            Mode::Dynamic => f.write_str("dynamic"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "dynamic" {
            return Ok(Mode::Dynamic);
        }
        let inner = s
            .strip_prefix("fixed(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("fixed:"))
            .or_else(|| s.strip_prefix("fixed"));
        match inner.map(|q| q.parse::<usize>()) {
            Some(Ok(q)) => Ok(Mode::Fixed(q)),
            _ => Err(format!("unknown mode `{s}`; expected `dynamic` or `fixed(q)`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOptions {
    pub mode: Mode,
    /// Stop once err(k) < tol.
    pub tol: f64,
    pub max_iter: usize,
    /// Safety factor s of the escalation rule.
    pub safety: f64,
    pub growth: Growth,
    /// Consecutive non-decreasing errors at the top level that end the run.
    pub stagnation_limit: usize,
}

impl NewtonOptions {
    pub fn new(mode: Mode) -> Self {
        NewtonOptions {
            mode,
            tol: 1e-15,
            max_iter: 200,
            safety: 1.0,
            growth: match mode {
                Mode::Dynamic => Growth::Gradual,
                Mode::Fixed(_) => Growth::Padded,
            },
            stagnation_limit: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// err(k) fell below the tolerance.
    Converged,
    /// The update left the iterate unchanged.
    Stationary,
    /// The error stopped decreasing at the highest available level.
    Stagnated,
    MaxIter,
    /// p(x_k) evaluated to exactly zero at the highest level.
    ExactRoot,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::Stationary => "stationary",
            Termination::Stagnated => "stagnated",
            Termination::MaxIter => "max-iter",
            Termination::ExactRoot => "exact-root",
        })
    }
}

/// State after step k: x_k, err(k), the level used to compute x_k, and
/// running operation counts.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonStep {
    pub step: usize,
    pub x: GrossFloat,
    /// NaN for the starting point.
    pub err: f64,
    pub prec: usize,
    pub cum_mults: u64,
    pub cum_adds: u64,
    /// Multiplications spent evaluating p alone.
    pub cum_eval_mults: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub mode: Mode,
    pub steps: Vec<NewtonStep>,
    pub termination: Termination,
    /// Steps after which the level was raised.
    pub escalations: Vec<usize>,
    pub counter: OpCounter,
}

impl SolveTrace {
    pub fn last(&self) -> &NewtonStep {
        self.steps.last().expect("a trace holds at least the starting point")
    }

    /// Number of Newton updates performed.
    pub fn iterations(&self) -> usize {
        self.steps.len() - 1
    }

    /// |x_k - root| / |root| for every step.
    pub fn true_errors(&self, ar: &Arith, root: &BigRational) -> Vec<f64> {
        self.steps
            .iter()
            .map(|s| {
                let d = (ar.to_rational(&s.x) - root).abs();
                let r = if root.is_zero() { d } else { d / root.abs() };
                r.to_f64().unwrap_or(f64::INFINITY)
            })
            .collect()
    }

    /// CSV with columns step, x_k, err_k, prec, cum_mults, cum_adds, and a
    /// true_err column when the root is known.
    pub fn to_csv(&self, ar: &Arith, root: Option<&BigRational>) -> String {
        let mut out = String::from("step,x_k,err_k,prec,cum_mults,cum_adds");
        if root.is_some() {
            out.push_str(",true_err");
        }
        out.push('\n');
        let truth = root.map(|r| self.true_errors(ar, r));
        for (i, s) in self.steps.iter().enumerate() {
            let err = if s.err.is_nan() { String::new() } else { sci17(s.err) };
            out.push_str(&format!(
                "{},{},{},{},{},{}",
                s.step,
                ar.to_decimal_string(&s.x, 40),
                err,
                s.prec,
                s.cum_mults,
                s.cum_adds
            ));
            if let Some(t) = &truth {
                out.push(',');
                out.push_str(&sci17(t[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// A number with 17 significant digits.
pub fn sci17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Newton's method x_{k+1} = x_k - p(x_k)/p'(x_k).
pub fn newton_solve(ar: &Arith, poly: &Polynomial, x0: &GrossFloat, opts: &NewtonOptions) -> Result<SolveTrace, SolveError> {
    if opts.max_iter == 0 {
        return Err(SolveError::Input("max_iter must be at least 1".into()));
    }
    if opts.tol.is_nan() || opts.tol < 0.0 {
        return Err(SolveError::Input(format!("tolerance {} must be nonnegative", opts.tol)));
    }
    if poly.is_zero() {
        return Err(SolveError::Input("zero polynomial".into()));
    }
    let cap = ar.max_section();
    let xw = match opts.mode {
        Mode::Dynamic => 1,
        Mode::Fixed(q) => {
            ar.check_section(q)?;
            q + 1
        }
    };
    let mut state = PrecisionState::new(cap, opts.safety).map_err(|e| SolveError::Input(e.to_string()))?;
    if let Mode::Fixed(q) = opts.mode {
        while state.section() < q {
            state.escalate();
        }
    }
    let dpoly = poly.derivative(ar)?;
    let mut counter = OpCounter::new();
    let mut eval_mults = 0u64;
    let (mut x, _) = ar.round_to(x0, xw - 1)?;
    let mut steps = vec![NewtonStep {
        step: 0,
        x: x.clone(),
        err: f64::NAN,
        prec: state.prec(),
        cum_mults: 0,
        cum_adds: 0,
        cum_eval_mults: 0,
    }];
    let mut escalations = Vec::new();
    let mut stagnant = 0usize;
    let dynamic = opts.mode == Mode::Dynamic;

    for k in 1..=opts.max_iter {
        let px = loop {
            let mut local = OpCounter::new();
            let px = horner_eval_with(ar, poly, &x, state.section(), opts.growth, &mut local)?;
            eval_mults += local.grossdigit_mults;
            counter.merge(&local);
            if px.is_zero() && dynamic && state.escalate() {
                escalations.push(k - 1);
                continue;
            }
            break px;
        };
        if px.is_zero() {
            return Ok(SolveTrace {
                mode: opts.mode,
                steps,
                termination: Termination::ExactRoot,
                escalations,
                counter,
            });
        }
        let level = state.section();
        let dpx = horner_eval_with(ar, &dpoly, &x, level, opts.growth, &mut counter)?;
        if dpx.is_zero() {
            return Err(SolveError::SingularStep { step: k });
        }
        let (corr, _) = ar.div(&px, &dpx, xw - 1, &mut counter)?;
        let (next, _) = ar.sub(&x, &corr, xw - 1, &mut counter)?;
        let err = if next.is_zero() {
            f64::INFINITY
        } else {
            relative_err(ar, &next, &x).map_err(|e| SolveError::Input(e.to_string()))?
        };
        x = next;
        steps.push(NewtonStep {
            step: k,
            x: x.clone(),
            err,
            prec: state.prec(),
            cum_mults: counter.grossdigit_mults,
            cum_adds: counter.grossdigit_adds,
            cum_eval_mults: eval_mults,
        });
        let mut stop = if err < opts.tol {
            Some(Termination::Converged)
        } else if err == 0.0 {
            Some(Termination::Stationary)
        } else {
            None
        };
        if stop.is_none() {
            let stalled = state.last_err().is_some_and(|prev| err >= opts.safety * prev);
            if dynamic && should_escalate(&state, err) {
                state.escalate();
                escalations.push(k);
                stagnant = 0;
            } else if stalled && (state.at_cap() || !dynamic) {
                stagnant += 1;
            } else {
                stagnant = 0;
            }
            state.record(err);
            if stagnant >= opts.stagnation_limit {
                stop = Some(Termination::Stagnated);
            }
        }
        if let Some(termination) = stop {
            return Ok(SolveTrace {
                mode: opts.mode,
                steps,
                termination,
                escalations,
                counter,
            });
        }
    }
    Ok(SolveTrace {
        mode: opts.mode,
        steps,
        termination: Termination::MaxIter,
        escalations,
        counter,
    })
}

/// Inputs and output of the perturbed-root estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditioningEstimate {
    /// Multiplicity of the root.
    pub d: u32,
    /// Size of the perturbation, typically the unit roundoff.
    pub eps: f64,
    /// |g(α)| for the perturbing function g.
    pub g_alpha: f64,
    /// |f^(d)(α)|.
    pub fd_alpha: f64,
    pub delta_alpha: f64,
}

impl ConditioningEstimate {
    pub fn new(d: u32, eps: f64, g_alpha: f64, fd_alpha: f64) -> Result<Self, SolveError> {
        let mut est = ConditioningEstimate {
            d,
            eps,
            g_alpha,
            fd_alpha,
            delta_alpha: 0.0,
        };
        est.delta_alpha = predict_perturbation(&est)?;
        Ok(est)
    }
}

/// Displacement of a d-fold root of f under f + εg: (ε·d!·|g(α)/f^(d)(α)|)^(1/d).
pub fn predict_perturbation(est: &ConditioningEstimate) -> Result<f64, SolveError> {
    if est.d == 0 {
        return Err(SolveError::Input("multiplicity must be at least 1".into()));
    }
    if est.fd_alpha == 0.0 || !est.fd_alpha.is_finite() {
        return Err(SolveError::Input("f^(d)(α) must be finite and nonzero".into()));
    }
    let fact: f64 = (1..=est.d).map(f64::from).product();
    let d = f64::from(est.d);
    Ok(est.eps.abs().powf(1.0 / d) * (fact * (est.g_alpha / est.fd_alpha).abs()).powf(1.0 / d))
}

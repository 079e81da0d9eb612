//! Cancellation detection and precision escalation.

use std::collections::HashMap;

use crate::arith::{Arith, NormalizationReport};
use crate::error::PrecisionError;
use crate::float::{GrossFloat, Sign};
use crate::profiler::OpCounter;

/// Precision level of an iterative computation and its error history.
///
/// `prec` counts chunks: level 1 is single precision, `T + 1` the cap.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionState {
    prec: usize,
    cap: usize,
    safety: f64,
    err_history: Vec<f64>,
}

impl PrecisionState {
    pub fn new(max_section: usize, safety: f64) -> Result<Self, PrecisionError> {
        if !(safety > 0.0 && safety <= 1.0) {
            return Err(PrecisionError::Safety(safety));
        }
        Ok(PrecisionState {
            prec: 1,
            cap: max_section + 1,
            safety,
            err_history: Vec::new(),
        })
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Active section index, `prec - 1`.
    pub fn section(&self) -> usize {
        self.prec - 1
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn at_cap(&self) -> bool {
        self.prec >= self.cap
    }

    pub fn safety(&self) -> f64 {
        self.safety
    }

    pub fn history(&self) -> &[f64] {
        &self.err_history
    }

    pub fn last_err(&self) -> Option<f64> {
        self.err_history.last().copied()
    }

    pub fn record(&mut self, err: f64) {
        self.err_history.push(err);
    }

    /// Raise the level by one; false at the cap.
    pub fn escalate(&mut self) -> bool {
        if self.at_cap() {
            return false;
        }
        self.prec += 1;
        true
    }
}

/// True iff `err_k ≥ s·err(k-1)` and the level can still be raised.
pub fn should_escalate(state: &PrecisionState, err_k: f64) -> bool {
    match state.last_err() {
        Some(prev) => !state.at_cap() && err_k >= state.safety * prev,
        None => false,
    }
}

/// |x_k - x_{k-1}| / |x_k|.
pub fn relative_err(ar: &Arith, x_k: &GrossFloat, x_km1: &GrossFloat) -> Result<f64, PrecisionError> {
    if x_k.is_zero() {
        return Err(PrecisionError::ZeroIterate);
    }
    let rs = x_k.width().max(x_km1.width()).min(ar.max_section());
    let (d, _) = ar.sub(x_k, x_km1, rs, &mut crate::profiler::NoCount)?;
    if d.is_zero() {
        return Ok(0.0);
    }
    // Ratio of mantissas times a power of β keeps tiny differences finite.
    let (md, ed) = ar.to_f64_parts(&d);
    let (mx, ex) = ar.to_f64_parts(x_k);
    Ok((md / mx).abs() * (ar.base() as f64).powi((ed - ex) as i32))
}

/// Leading-digit loss of one operation compared with a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CancellationReport {
    pub shift_digits: i64,
    pub threshold_digits: i64,
    pub triggered: bool,
}

impl CancellationReport {
    pub fn new(shift_digits: i64, threshold_digits: i64) -> Self {
        CancellationReport {
            shift_digits,
            threshold_digits,
            triggered: shift_digits >= threshold_digits,
        }
    }

    /// Judge a normalization report against half a chunk of digits. A total
    /// cancellation always triggers.
    pub fn detect(ar: &Arith, rep: &NormalizationReport) -> Self {
        let threshold = default_threshold(ar);
        let mut r = CancellationReport::new(rep.shift, threshold);
        r.triggered |= rep.total_cancellation;
        r
    }
}

/// ⌈(t+1)/2⌉ digits.
pub fn default_threshold(ar: &Arith) -> i64 {
    ar.chunk_width().div_ceil(2) as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumAction {
    Accept,
    Improve,
    Final,
}

impl std::fmt::Display for SumAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SumAction::Accept => "accept the result",
            SumAction::Improve => "improve the accuracy",
            SumAction::Final => "final result",
        })
    }
}

/// One accept/improve decision of [`adaptive_sum`].
#[derive(Debug, Clone, PartialEq)]
pub struct SumStep {
    /// Evaluation pass, starting at 0.
    pub pass: usize,
    /// Index of the term added by this step (the partial sum of terms 0..=node).
    pub node: usize,
    /// Section index of every term during this pass.
    pub levels: Vec<usize>,
    pub value: GrossFloat,
    /// A-priori relative error bound; infinite for an exact zero.
    pub estimate: f64,
    pub cancellation: CancellationReport,
    pub action: SumAction,
    /// Grossdigit additions charged to this step after reuse.
    pub charged_adds: u64,
    /// Result taken unchanged from an earlier pass.
    pub reused: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumOutcome {
    pub value: GrossFloat,
    /// Section index each term ended at.
    pub levels: Vec<usize>,
    /// Highest precision level used, `max(levels) + 1`.
    pub prec: usize,
    pub estimate: f64,
    pub steps: Vec<SumStep>,
    /// Grossdigit additions after reusing earlier passes.
    pub adds: u64,
    /// Every operation actually executed, across all passes.
    pub counter: OpCounter,
}

/// Relative error bound of a term truncated to section q: β^-((q+1)(t+1)).
pub fn section_error(ar: &Arith, q: usize) -> f64 {
    (ar.base() as f64).powi(-(((q + 1) * ar.chunk_width()) as i32))
}

/// Left-to-right signed sum with every term truncated to its own section.
/// Each partial sum keeps as many chunks as its wider operand.
pub fn evaluate_at(ar: &Arith, terms: &[(Sign, GrossFloat)], levels: &[usize]) -> Result<GrossFloat, PrecisionError> {
    let mut acc: Option<GrossFloat> = None;
    for ((sign, x), &q) in terms.iter().zip(levels) {
        let leaf = signed_section(ar, *sign, x, q)?;
        acc = Some(match acc {
            None => leaf,
            Some(a) => {
                let rs = a.width().max(leaf.width()).max(1) - 1;
                ar.add(&a, &leaf, rs.min(ar.max_section()), &mut crate::profiler::NoCount)?.0
            }
        });
    }
    acc.ok_or(PrecisionError::EmptySum)
}

fn signed_section(ar: &Arith, sign: Sign, x: &GrossFloat, q: usize) -> Result<GrossFloat, PrecisionError> {
    let s = ar.section(x, q)?;
    Ok(if sign == Sign::Minus { -s } else { s })
}

/// Sum `terms` to a relative accuracy `target`, raising the section of the
/// terms that feed a cancelling operation until the bound is met.
pub fn adaptive_sum(ar: &Arith, terms: &[(Sign, GrossFloat)], target: f64) -> Result<SumOutcome, PrecisionError> {
    adaptive_sum_with(ar, terms, target, |_| {})
}

/// [`adaptive_sum`] streaming every decision to `hook` as it is made.
pub fn adaptive_sum_with<F: FnMut(&SumStep)>(ar: &Arith, terms: &[(Sign, GrossFloat)], target: f64, mut hook: F) -> Result<SumOutcome, PrecisionError> {
    if terms.is_empty() {
        return Err(PrecisionError::EmptySum);
    }
    let n = terms.len();
    let cap = ar.max_section();
    let mut levels = vec![0usize; n];
    let mut steps = Vec::new();
    let mut counter = OpCounter::new();
    let mut charged = 0u64;
    // Grossdigit additions already paid for at each node; a wider pass only
    // pays for the extra chunk pairs.
    let mut paid = vec![0u64; n];
    let mut cache: HashMap<Vec<usize>, (GrossFloat, f64, NormalizationReport)> = HashMap::new();

    for pass in 0.. {
        let mut acc = signed_section(ar, terms[0].0, &terms[0].1, levels[0])?;
        let mut acc_err = section_error(ar, levels[0]);
        let mut failed = None;
        for i in 1..n {
            let leaf = signed_section(ar, terms[i].0, &terms[i].1, levels[i])?;
            let leaf_err = section_error(ar, levels[i]);
            let key = levels[..=i].to_vec();
            let (value, estimate, rep, cost, reused) = match cache.get(&key) {
                Some((v, e, r)) => (v.clone(), *e, *r, 0, true),
                None => {
                    let rs = (acc.width().max(leaf.width()) - 1).min(cap);
                    let mut local = OpCounter::new();
                    let (z, rep) = ar.add(&acc, &leaf, rs, &mut local)?;
                    let measured = local.grossdigit_adds;
                    counter.merge(&local);
                    let cost = measured.saturating_sub(paid[i]);
                    paid[i] = paid[i].max(measured);
                    let estimate = if z.is_zero() {
                        f64::INFINITY
                    } else {
                        acc_err.max(leaf_err) * (ar.base() as f64).powi(rep.shift.max(0) as i32)
                    };
                    cache.insert(key, (z.clone(), estimate, rep));
                    (z, estimate, rep, cost, false)
                }
            };
            charged += cost;
            let ok = estimate <= target;
            let action = match (ok, i + 1 == n) {
                (true, true) => SumAction::Final,
                (true, false) => SumAction::Accept,
                (false, _) => SumAction::Improve,
            };
            let step = SumStep {
                pass,
                node: i,
                levels: levels.clone(),
                value: value.clone(),
                estimate,
                cancellation: CancellationReport::detect(ar, &rep),
                action,
                charged_adds: cost,
                reused,
            };
            hook(&step);
            steps.push(step);
            if !ok {
                failed = Some((i, value, estimate));
                break;
            }
            acc = value;
            acc_err = estimate;
        }
        match failed {
            None => {
                let estimate = if n == 1 { section_error(ar, levels[0]) } else { acc_err };
                return Ok(SumOutcome {
                    value: acc,
                    prec: levels.iter().max().unwrap() + 1,
                    levels,
                    estimate,
                    steps,
                    adds: charged,
                    counter,
                });
            }
            Some((i, best, estimate)) => {
                let mut raised = false;
                for q in &mut levels[..=i] {
                    if *q < cap {
                        *q += 1;
                        raised = true;
                    }
                }
                if !raised {
                    return Err(PrecisionError::AccuracyExhausted { target, estimate, best });
                }
            }
        }
    }
    unreachable!()
}

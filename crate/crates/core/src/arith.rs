use std::cmp::Ordering;

use crate::config::{ArithConfig, Radix, Rounding};
use crate::error::ArithError;
use crate::float::{GrossFloat, Sign};
use crate::profiler::{NoCount, OpKind, OpRecord, OpSink};
use crate::trace::{PipelineTrace, TraceCell, TraceRow};

/// Unnormalized per-power coefficients produced inside add, sub and mul.
///
/// Entry `i` of `wide_chunks` is the coefficient of power `first_power + i`,
/// in units of β^(-t) at that power, and may exceed a chunk's range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawAccumulator {
    pub sign: Sign,
    /// Exponent of the leading digit position of power 0.
    pub exponent: i64,
    pub first_power: i64,
    pub wide_chunks: Vec<i128>,
    /// Exponent of the lowest digit that can be nonzero; `None` means the last
    /// digit of the last wide chunk.
    pub low_digit: Option<i64>,
    /// Nonzero digits were dropped below the last wide chunk.
    pub sticky: bool,
}

/// What normalization and rounding did to a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NormalizationReport {
    /// Digit positions shifted left relative to the reference exponent
    /// (larger operand for add/sub, sum of exponents for mul). A carry out
    /// gives -1.
    pub shift: i64,
    pub rounded: bool,
    pub overflow: bool,
    pub underflow: bool,
    /// Nonzero operands produced an exact zero.
    pub total_cancellation: bool,
    /// Chunks needed to hold every digit of the exact result.
    pub natural_width: usize,
}

/// Arithmetic on [`GrossFloat`] values of one format.
#[derive(Debug, Clone)]
pub struct Arith {
    cfg: ArithConfig,
    pub(crate) rx: Radix,
}

type Outcome = Result<(GrossFloat, NormalizationReport), ArithError>;

impl Arith {
    pub fn new(cfg: ArithConfig) -> Result<Self, ArithError> {
        cfg.validate()?;
        let rx = Radix::new(&cfg);
        Ok(Arith { cfg, rx })
    }

    pub fn config(&self) -> &ArithConfig {
        &self.cfg
    }

    pub fn base(&self) -> u32 {
        self.cfg.base
    }

    /// Digits per chunk, t + 1.
    pub fn chunk_width(&self) -> usize {
        self.rx.width
    }

    /// β^(t+1), the dark unit of the format.
    pub fn modulus(&self) -> u64 {
        self.rx.modulus
    }

    pub fn max_section(&self) -> usize {
        self.cfg.max_section
    }

    /// Same arithmetic with another rounding mode.
    pub fn with_rounding(&self, rounding: Rounding) -> Arith {
        let mut a = self.clone();
        a.cfg.rounding = rounding;
        a
    }

    pub(crate) fn check_section(&self, q: usize) -> Result<(), ArithError> {
        if q > self.cfg.max_section {
            return Err(ArithError::SectionOutOfRange {
                index: q,
                max: self.cfg.max_section,
            });
        }
        Ok(())
    }

    /// Checked constructor from sign, exponent and chunk integers.
    pub fn from_parts(&self, sign: Sign, exponent: i64, chunks: Vec<u64>) -> Result<GrossFloat, ArithError> {
        if chunks.is_empty() {
            return Ok(GrossFloat::zero());
        }
        if chunks.len() > self.cfg.max_section + 1 {
            return Err(ArithError::Operand(format!(
                "{} chunks exceed the maximum of {}",
                chunks.len(),
                self.cfg.max_section + 1
            )));
        }
        if let Some(c) = chunks.iter().find(|&&c| c >= self.rx.modulus) {
            return Err(ArithError::Operand(format!("chunk value {c} out of range")));
        }
        if chunks[0] < self.rx.pow(self.rx.width - 1) {
            return Err(ArithError::Operand("leading digit is zero".into()));
        }
        self.check_exponent(exponent)?;
        Ok(GrossFloat::from_raw(sign, exponent, chunks))
    }

    fn check_exponent(&self, e: i64) -> Result<(), ArithError> {
        if e > self.cfg.exponent_max {
            return Err(ArithError::Overflow {
                exponent: e,
                max: self.cfg.exponent_max,
            });
        }
        if e < self.cfg.exponent_min {
            return Err(ArithError::Underflow {
                exponent: e,
                min: self.cfg.exponent_min,
            });
        }
        Ok(())
    }

    /// Checks that `x` is a normalized value of this format.
    pub fn validate_operand(&self, x: &GrossFloat) -> Result<(), ArithError> {
        if x.is_zero() {
            return Ok(());
        }
        self.from_parts(x.sign, x.exponent, x.chunks.clone()).map(|_| ())
    }

    pub fn one(&self) -> GrossFloat {
        GrossFloat::from_raw(Sign::Plus, 0, vec![self.rx.pow(self.rx.width - 1)])
    }

    /// Integer with the fewest chunks that hold it exactly, rounded if it needs more than T+1.
    pub fn from_integer(&self, n: i64) -> Result<GrossFloat, ArithError> {
        if n == 0 {
            return Ok(GrossFloat::zero());
        }
        let sign = if n < 0 { Sign::Minus } else { Sign::Plus };
        let mut v = n.unsigned_abs() as u128;
        let mut digits = Vec::new();
        while v > 0 {
            digits.push((v % self.rx.base as u128) as u64);
            v /= self.rx.base as u128;
        }
        digits.reverse();
        let exponent = digits.len() as i64 - 1;
        let raw = self.raw_from_digits(sign, exponent, &digits);
        let (x, _) = self.finish(raw, self.cfg.max_section, &mut 0, None)?;
        Ok(x.trimmed())
    }

    /// Raw accumulator holding a digit string whose first digit has weight β^exponent.
    pub(crate) fn raw_from_digits(&self, sign: Sign, exponent: i64, digits: &[u64]) -> RawAccumulator {
        let w = self.rx.width;
        let n = digits.len().div_ceil(w).max(1);
        let mut wide = vec![0i128; n];
        for (i, &d) in digits.iter().enumerate() {
            wide[i / w] += (d * self.rx.pow(w - 1 - i % w)) as i128;
        }
        RawAccumulator {
            sign,
            exponent,
            first_power: 0,
            wide_chunks: wide,
            low_digit: Some(exponent - digits.len() as i64 + 1),
            sticky: false,
        }
    }

    /// Truncation to chunks 0..=q. Never rounds.
    pub fn section(&self, x: &GrossFloat, q: usize) -> Result<GrossFloat, ArithError> {
        self.check_section(q)?;
        if x.width() <= q + 1 {
            return Ok(x.clone());
        }
        Ok(GrossFloat::from_raw(x.sign, x.exponent, x.chunks[..=q].to_vec()))
    }

    /// Round `x` to at most `rs + 1` chunks with the configured rounding.
    pub fn round_to(&self, x: &GrossFloat, rs: usize) -> Outcome {
        if x.is_zero() || x.width() <= rs + 1 {
            return Ok((x.clone(), NormalizationReport {
                natural_width: x.width(),
                ..Default::default()
            }));
        }
        let raw = RawAccumulator {
            sign: x.sign,
            exponent: x.exponent,
            first_power: 0,
            wide_chunks: x.chunks.iter().map(|&c| c as i128).collect(),
            low_digit: None,
            sticky: false,
        };
        self.finish(raw, rs, &mut 0, None)
    }

    /// Propagate carries, normalize and round a raw accumulator.
    pub fn normalize(&self, raw: RawAccumulator, result_section: usize) -> Outcome {
        self.check_section(result_section)?;
        self.finish(raw, result_section, &mut 0, None)
    }

    /// Shared tail of every pipeline: carries, normalization, rounding.
    pub(crate) fn finish(
        &self,
        raw: RawAccumulator,
        rs: usize,
        carries: &mut u64,
        mut trace: Option<&mut PipelineTrace>,
    ) -> Outcome {
        let m = self.rx.modulus as i128;
        let w = self.rx.width;
        let default_low = raw.exponent - (raw.first_power + raw.wide_chunks.len() as i64) * w as i64 + 1;
        let low = raw.low_digit.unwrap_or(default_low);
        let mut first = raw.first_power;
        let mut wide = raw.wide_chunks;
        let mut carry: i128 = 0;
        for v in wide.iter_mut().rev() {
            if carry != 0 {
                *carries += 1;
            }
            let t = *v + carry;
            *v = t.rem_euclid(m);
            carry = t.div_euclid(m);
        }
        if carry < 0 {
            return Err(ArithError::Operand("negative accumulator".into()));
        }
        while carry > 0 {
            wide.insert(0, carry % m);
            carry /= m;
            first -= 1;
            *carries += 1;
        }
        let chunks: Vec<u64> = wide.iter().map(|&v| v as u64).collect();

        let Some(i0) = chunks.iter().position(|&v| v != 0) else {
            return Ok((GrossFloat::zero(), NormalizationReport {
                rounded: raw.sticky,
                ..Default::default()
            }));
        };
        let z = w - self.rx.digit_len(chunks[i0]);
        let e_r = raw.exponent - (first + i0 as i64) * w as i64 - z as i64;
        let mant = self.shl_digits(&chunks[i0..], z);

        let natural = if raw.sticky {
            usize::MAX
        } else {
            ((e_r - low + 1).max(1) as usize).div_ceil(w)
        };
        let width = natural.min(rs + 1).max(1);
        if let Some(tr) = trace.as_deref_mut() {
            let shown = natural.min(mant.len());
            tr.push(self.row('f', "normalization", raw.sign, e_r, 0, &mant[..shown]));
        }

        let mut kept: Vec<u64> = mant.iter().copied().take(width).collect();
        kept.resize(width, 0);
        let tail = mant.get(width..).unwrap_or(&[]);
        let lost = raw.sticky || tail.iter().any(|&c| c != 0);
        let round_up = match self.cfg.rounding {
            Rounding::Truncate => false,
            Rounding::NearestEven => {
                let half = self.rx.modulus / 2;
                let t0 = tail.first().copied().unwrap_or(0);
                let rest = raw.sticky || tail.iter().skip(1).any(|&c| c != 0);
                t0 > half || (t0 == half && (rest || kept[width - 1] % 2 == 1))
            }
        };
        let mut exponent = e_r;
        if round_up {
            let mut j = width;
            loop {
                if j == 0 {
                    kept = vec![0; width];
                    kept[0] = self.rx.pow(w - 1);
                    exponent += 1;
                    break;
                }
                j -= 1;
                kept[j] += 1;
                if kept[j] < self.rx.modulus {
                    break;
                }
                kept[j] = 0;
            }
        }
        let mut report = NormalizationReport {
            shift: raw.exponent - e_r,
            rounded: lost,
            natural_width: natural,
            ..Default::default()
        };
        if exponent > self.cfg.exponent_max {
            return Err(ArithError::Overflow {
                exponent,
                max: self.cfg.exponent_max,
            });
        }
        if exponent < self.cfg.exponent_min {
            report.underflow = true;
            report.rounded = true;
            return Ok((GrossFloat::zero(), report));
        }
        let out = GrossFloat::from_raw(raw.sign, exponent, kept);
        if let Some(tr) = trace {
            tr.push(self.row('g', "rounding", out.sign, out.exponent, 0, &out.chunks));
        }
        Ok((out, report))
    }

    /// Shift a chunk string left by `s < t+1` digits, keeping its length.
    fn shl_digits(&self, chunks: &[u64], s: usize) -> Vec<u64> {
        if s == 0 {
            return chunks.to_vec();
        }
        let w = self.rx.width;
        let up = self.rx.pow(s);
        let down = self.rx.pow(w - s);
        (0..chunks.len())
            .map(|j| {
                let hi = (chunks[j] % down) * up;
                let lo = chunks.get(j + 1).map_or(0, |&c| c / down);
                hi + lo
            })
            .collect()
    }

    /// Shift right by `d` digits into at most `cap` chunks; reports dropped nonzero digits.
    fn shr_digits(&self, chunks: &[u64], d: u64, cap: usize) -> (Vec<u64>, bool) {
        let w = self.rx.width as u64;
        let whole = (d / w) as usize;
        let part = (d % w) as usize;
        let needed = (chunks.len() as u64 * w + d).div_ceil(w);
        let n = (needed.min(cap as u64)) as usize;
        let mut out = vec![0u64; n];
        let mut sticky = false;
        let mut put = |pos: usize, v: u64, out: &mut Vec<u64>| {
            if pos < n {
                out[pos] += v;
            } else if v != 0 {
                sticky = true;
            }
        };
        for (j, &c) in chunks.iter().enumerate() {
            let pos = whole.saturating_add(j);
            if part == 0 {
                put(pos, c, &mut out);
            } else {
                let div = self.rx.pow(part);
                put(pos, c / div, &mut out);
                put(pos.saturating_add(1), (c % div) * self.rx.pow(self.rx.width - part), &mut out);
            }
        }
        (out, sticky)
    }

    pub(crate) fn row(&self, step: char, label: &str, sign: Sign, exponent: i64, first: i64, chunks: &[u64]) -> TraceRow {
        let t = self.rx.width - 1;
        TraceRow {
            step,
            label: label.to_string(),
            sign,
            exponent,
            first_power: first,
            cells: chunks
                .iter()
                .map(|&c| {
                    Some(TraceCell {
                        value: c as i128,
                        frac_digits: t,
                    })
                })
                .collect(),
        }
    }

    fn wide_row(&self, step: char, label: &str, exponent: i64, first: i64, cells: Vec<Option<i128>>, frac: usize) -> TraceRow {
        TraceRow {
            step,
            label: label.to_string(),
            sign: Sign::Plus,
            exponent,
            first_power: first,
            cells: cells
                .into_iter()
                .map(|c| c.map(|value| TraceCell { value, frac_digits: frac }))
                .collect(),
        }
    }

    pub fn add<C: OpSink>(&self, x: &GrossFloat, y: &GrossFloat, rs: usize, counter: &mut C) -> Outcome {
        self.add_sub(x, y, false, rs, counter, None)
    }

    pub fn sub<C: OpSink>(&self, x: &GrossFloat, y: &GrossFloat, rs: usize, counter: &mut C) -> Outcome {
        self.add_sub(x, y, true, rs, counter, None)
    }

    /// Addition that also returns every intermediate row of the pipeline.
    pub fn add_traced(&self, x: &GrossFloat, y: &GrossFloat, rs: usize) -> Result<(GrossFloat, NormalizationReport, PipelineTrace), ArithError> {
        let mut tr = PipelineTrace::default();
        let (z, rep) = self.add_sub(x, y, false, rs, &mut NoCount, Some(&mut tr))?;
        Ok((z, rep, tr))
    }

    pub fn sub_traced(&self, x: &GrossFloat, y: &GrossFloat, rs: usize) -> Result<(GrossFloat, NormalizationReport, PipelineTrace), ArithError> {
        let mut tr = PipelineTrace::default();
        let (z, rep) = self.add_sub(x, y, true, rs, &mut NoCount, Some(&mut tr))?;
        Ok((z, rep, tr))
    }

    fn add_sub<C: OpSink>(
        &self,
        x: &GrossFloat,
        y: &GrossFloat,
        negate_y: bool,
        rs: usize,
        counter: &mut C,
        mut trace: Option<&mut PipelineTrace>,
    ) -> Outcome {
        self.check_section(rs)?;
        debug_assert!(self.validate_operand(x).is_ok() && self.validate_operand(y).is_ok());
        let kind = if negate_y { OpKind::Sub } else { OpKind::Add };
        let y_sign = if negate_y { y.sign.flip() } else { y.sign };
        let record = |counter: &mut C, adds: u64, carry_adds: u64| {
            counter.record_op(OpRecord {
                kind,
                q: x.width().saturating_sub(1),
                p: y.width().saturating_sub(1),
                mults: 0,
                adds,
                carry_adds,
            })
        };
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(self.row('a', "data acquisition", x.sign, x.exponent, 0, &x.chunks));
            tr.push(self.row('a', "data acquisition", y_sign, y.exponent, 0, &y.chunks));
        }
        if x.is_zero() || y.is_zero() {
            let (only, sign) = if x.is_zero() { (y, y_sign) } else { (x, x.sign) };
            record(counter, 0, 0);
            let only = GrossFloat::from_raw(sign, only.exponent, only.chunks.clone());
            let (z, mut rep) = self.round_to(&only, rs)?;
            rep.natural_width = only.width();
            return Ok((z, rep));
        }

        let effective_sub = x.sign != y_sign;
        // `a` is the operand the other is aligned to: larger magnitude for a
        // subtraction, larger exponent for an addition.
        let x_first = if effective_sub {
            x.cmp_magnitude(y) != Ordering::Less
        } else {
            x.exponent >= y.exponent
        };
        let (a, b, sign) = if x_first { (x, y, x.sign) } else { (y, x, y_sign) };
        let w = self.rx.width;
        let m = self.rx.modulus as i128;
        let d = (a.exponent - b.exponent) as u64;
        let window = a.width().max(b.width()).max(rs + 1) + 2;
        let (bs, sticky) = self.shr_digits(&b.chunks, d, window);
        let len = a.width().max(bs.len());
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(self.row('b', "alignment", a.sign, a.exponent, 0, &a.chunks));
            tr.push(self.row('b', "alignment", if x_first { y_sign } else { x.sign }, a.exponent, 0, &bs));
        }

        let whole = (d / w as u64) as usize;
        let adds = a.width().min(bs.len()).saturating_sub(whole) as u64;
        let mut raw: Vec<i128> = (0..len)
            .map(|j| {
                let av = a.chunks.get(j).copied().unwrap_or(0) as i128;
                let bv = bs.get(j).copied().unwrap_or(0) as i128;
                if effective_sub {
                    av + (m - 1 - bv)
                } else {
                    av + bv
                }
            })
            .collect();
        if effective_sub && !sticky {
            raw[len - 1] += 1;
        }
        if let Some(tr) = trace.as_deref_mut() {
            let label = if effective_sub { "complement sum" } else { "sum" };
            tr.push(self.wide_row('c', label, a.exponent, 0, raw.iter().map(|&v| Some(v)).collect(), w - 1));
        }

        // One parallel redistribution round: every term below power 0 hands
        // its carry to the next higher power.
        let mut carry_adds = 0u64;
        let mut next = vec![0i128; len];
        let mut rows: Vec<Vec<Option<i128>>> = Vec::new();
        for j in 0..len {
            let v = raw[j];
            let (c, r) = if j == 0 { (0, v) } else { (v.div_euclid(m), v.rem_euclid(m)) };
            next[j] += r;
            if c != 0 {
                next[j - 1] += c;
                carry_adds += 1;
            }
            if trace.is_some() {
                let mut cells = vec![None; len];
                if c != 0 {
                    cells[j - 1] = Some(c);
                    cells[j] = Some(r);
                    rows.push(cells);
                } else {
                    cells[j] = Some(r);
                    match rows.last_mut() {
                        Some(last) if last[j].is_none() => last[j] = Some(r),
                        _ => rows.push(cells),
                    }
                }
            }
        }
        if let Some(tr) = trace.as_deref_mut() {
            for cells in rows {
                tr.push(self.wide_row('d', "redistribution", a.exponent, 0, cells, w - 1));
            }
            tr.push(self.wide_row('e', "sum", a.exponent, 0, next.iter().map(|&v| Some(v)).collect(), w - 1));
        }
        if effective_sub {
            // Drop the β^(t+1) carried out of the complement.
            next[0] -= m;
        }
        let low = if sticky {
            None
        } else {
            let la = a.exponent - (a.width() * w) as i64 + 1;
            let lb = b.exponent - (b.width() * w) as i64 + 1;
            Some(la.min(lb))
        };
        let acc = RawAccumulator {
            sign,
            exponent: a.exponent,
            first_power: 0,
            wide_chunks: next,
            low_digit: low,
            sticky,
        };
        let (z, mut rep) = self.finish(acc, rs, &mut carry_adds, trace)?;
        rep.total_cancellation = z.is_zero();
        record(counter, adds, carry_adds);
        Ok((z, rep))
    }

    pub fn mul<C: OpSink>(&self, x: &GrossFloat, y: &GrossFloat, rs: usize, counter: &mut C) -> Outcome {
        self.mul_impl(x, y, rs, false, counter, None)
    }

    /// Multiplication that skips products landing more than one chunk below
    /// the result. The result is within one unit in the last place when
    /// (T+1)·β < 2·β^(t+1).
    pub fn mul_short<C: OpSink>(&self, x: &GrossFloat, y: &GrossFloat, rs: usize, counter: &mut C) -> Outcome {
        self.mul_impl(x, y, rs, true, counter, None)
    }

    pub fn mul_traced(&self, x: &GrossFloat, y: &GrossFloat, rs: usize) -> Result<(GrossFloat, NormalizationReport, PipelineTrace), ArithError> {
        let mut tr = PipelineTrace::default();
        let (z, rep) = self.mul_impl(x, y, rs, false, &mut NoCount, Some(&mut tr))?;
        Ok((z, rep, tr))
    }

    fn mul_impl<C: OpSink>(
        &self,
        x: &GrossFloat,
        y: &GrossFloat,
        rs: usize,
        short: bool,
        counter: &mut C,
        mut trace: Option<&mut PipelineTrace>,
    ) -> Outcome {
        self.check_section(rs)?;
        debug_assert!(self.validate_operand(x).is_ok() && self.validate_operand(y).is_ok());
        let (la, lb) = (x.width(), y.width());
        let mut rec = OpRecord {
            kind: OpKind::Mul,
            q: la.saturating_sub(1),
            p: lb.saturating_sub(1),
            mults: 0,
            adds: 0,
            carry_adds: 0,
        };
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(self.row('a', "data acquisition", x.sign, x.exponent, 0, &x.chunks));
            tr.push(self.row('a', "data acquisition", y.sign, y.exponent, 0, &y.chunks));
        }
        if x.is_zero() || y.is_zero() {
            counter.record_op(rec);
            return Ok((GrossFloat::zero(), NormalizationReport::default()));
        }
        let w = self.rx.width;
        let t = w - 1;
        let m = self.rx.modulus as u128;
        let sign = x.sign.times(y.sign);
        let exponent = x.exponent + y.exponent;
        let terms = la + lb - 1;
        let counted = la.max(lb);
        let limit = if short { rs + 1 } else { usize::MAX };
        let mut conv = vec![0u128; terms];
        let mut skipped = false;
        for (i, &a) in x.chunks.iter().enumerate() {
            for (k, &b) in y.chunks.iter().enumerate() {
                if i + k > limit {
                    skipped = true;
                    continue;
                }
                conv[i + k] += a as u128 * b as u128;
                rec.mults += 1;
            }
        }
        // Summing n products into one coefficient takes n-1 additions.
        for j in 0..terms {
            let n = (0..la).filter(|&i| j >= i && j - i < lb && j <= limit).count() as u64;
            if n > 1 {
                if j < counted {
                    rec.adds += n - 1;
                } else {
                    rec.carry_adds += n - 1;
                }
            }
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(self.wide_row('b', "products", exponent, 0, conv.iter().map(|&v| Some(v as i128)).collect(), 2 * t));
        }

        // Each term v at power j is worth v·β in units of power j+1; split it
        // over powers j-1, j and j+1.
        let len = terms + 2;
        let mut acc = vec![0u128; len];
        for (j, &v) in conv.iter().enumerate() {
            let big = v * self.rx.base as u128;
            let parts = [big / (m * m), (big / m) % m, big % m];
            for (k, &p) in parts.iter().enumerate() {
                if p != 0 {
                    if acc[j + k] != 0 {
                        rec.carry_adds += 1;
                    }
                    acc[j + k] += p;
                }
            }
            if let Some(tr) = trace.as_deref_mut() {
                let mut cells = vec![None; len];
                for (k, &p) in parts.iter().enumerate() {
                    cells[j + k] = Some(p as i128);
                }
                tr.push(self.wide_row('c', "redistribution", exponent, -1, cells, t));
            }
        }
        let mut carry = 0u128;
        for v in acc.iter_mut().rev() {
            if carry != 0 {
                rec.carry_adds += 1;
            }
            let s = *v + carry;
            *v = s % m;
            carry = s / m;
        }
        debug_assert_eq!(carry, 0);
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(self.wide_row('d', "sum with redistribution", exponent, -1, acc.iter().map(|&v| Some(v as i128)).collect(), t));
        }
        let low = exponent - (la * w) as i64 - (lb * w) as i64 + 2;
        let raw = RawAccumulator {
            sign,
            exponent,
            first_power: -1,
            wide_chunks: acc.into_iter().map(|v| v as i128).collect(),
            low_digit: if skipped { Some(exponent - ((rs + 3) * w) as i64 + 1) } else { Some(low) },
            sticky: false,
        };
        let (z, mut rep) = self.finish(raw, rs, &mut rec.carry_adds, trace.as_deref_mut())?;
        rep.rounded |= skipped;
        counter.record_op(rec);
        Ok((z, rep))
    }
}

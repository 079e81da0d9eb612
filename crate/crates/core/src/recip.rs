use num_rational::BigRational;

use crate::arith::{Arith, NormalizationReport};
use crate::convert::rational;
use crate::error::ArithError;
use crate::float::{GrossFloat, Sign};
use crate::profiler::OpSink;

/// Iterates of one reciprocal computation, in scaled form.
#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocalTrace {
    /// β^s·|Y|, in [1/β, 1).
    pub scaled_input: GrossFloat,
    /// The s with scaled_input = β^s·|Y|.
    pub scale: i64,
    /// Z_0, Z_1, ..., Z_k approximating 1/scaled_input.
    pub iterates: Vec<GrossFloat>,
    /// The unscaled, signed reciprocal.
    pub value: GrossFloat,
}

impl Arith {
    /// Copy of this arithmetic allowing at least `q` as section index.
    pub(crate) fn widened(&self, q: usize) -> Result<Arith, ArithError> {
        if q <= self.max_section() {
            return Ok(self.clone());
        }
        Arith::new(self.config().clone().with_max_section(q))
    }

    /// Iterations that take the seed error below β^-(digits) for a
    /// `chunks`-chunk result.
    pub fn reciprocal_iterations(&self, chunks: usize) -> usize {
        let beta = self.base() as f64;
        let bits = (chunks * self.chunk_width()) as f64 * beta.log2();
        // Worst seed error over the scaled range [1/β, 1].
        let y = 1.0 / beta;
        let e_low = (17.0 - 48.0 * y + 32.0 * y * y) / 17.0;
        let e0 = e_low.abs().max(1.0 / 17.0);
        let k = ((bits + 1.0) / -e0.log2()).log2().ceil();
        k.max(0.0) as usize
    }

    /// 1/Y to `target_section + 1` chunks.
    pub fn reciprocal<C: OpSink>(&self, y: &GrossFloat, target_section: usize, counter: &mut C) -> Result<GrossFloat, ArithError> {
        self.check_section(target_section)?;
        Ok(self.reciprocal_work(y, target_section + 1, counter)?.value)
    }

    /// Reciprocal with every iterate kept.
    pub fn reciprocal_traced<C: OpSink>(&self, y: &GrossFloat, target_section: usize, counter: &mut C) -> Result<ReciprocalTrace, ArithError> {
        self.check_section(target_section)?;
        self.reciprocal_work(y, target_section + 1, counter)
    }

    pub(crate) fn reciprocal_work<C: OpSink>(&self, y: &GrossFloat, chunks: usize, counter: &mut C) -> Result<ReciprocalTrace, ArithError> {
        if y.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let rs = chunks - 1;
        let wa = self.widened(chunks)?;
        let scale = -1 - y.exponent();
        let scaled = GrossFloat::from_raw(Sign::Plus, -1, y.chunks().to_vec());
        let (yh, _) = wa.round_to(&scaled, chunks)?;
        let c48 = wa.from_rational(&rational(48, 17), rs)?;
        let c32 = wa.from_rational(&rational(32, 17), rs)?;
        let (t, _) = wa.mul(&c32, &yh, rs, counter)?;
        let (mut z, _) = wa.sub(&c48, &t, rs, counter)?;
        let one = wa.one();
        let mut iterates = vec![z.clone()];
        for _ in 0..self.reciprocal_iterations(chunks) {
            let (r, _) = wa.mul(&yh, &z, rs + 1, counter)?;
            let (e, _) = wa.sub(&one, &r, rs, counter)?;
            let (corr, _) = wa.mul(&z, &e, rs, counter)?;
            let (next, _) = wa.add(&z, &corr, rs, counter)?;
            z = next;
            iterates.push(z.clone());
        }
        let exponent = z.exponent() + scale;
        if exponent > self.config().exponent_max {
            return Err(ArithError::Overflow {
                exponent,
                max: self.config().exponent_max,
            });
        }
        if exponent < self.config().exponent_min {
            return Err(ArithError::Underflow {
                exponent,
                min: self.config().exponent_min,
            });
        }
        let value = GrossFloat::from_raw(y.sign(), exponent, z.chunks().to_vec());
        Ok(ReciprocalTrace {
            scaled_input: yh,
            scale,
            iterates,
            value,
        })
    }

    /// X/Y as X times a reciprocal carried one chunk past the result.
    pub fn div<C: OpSink>(&self, x: &GrossFloat, y: &GrossFloat, rs: usize, counter: &mut C) -> Result<(GrossFloat, NormalizationReport), ArithError> {
        self.check_section(rs)?;
        if y.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if x.is_zero() {
            return Ok((GrossFloat::zero(), NormalizationReport::default()));
        }
        let r = self.reciprocal_work(y, rs + 2, counter)?.value;
        let wa = self.widened(rs + 2)?;
        wa.mul(x, &r, rs, counter)
    }

    /// Seed error 1 - Ŷ·Z_0 of the linear minimax seed, exactly.
    pub fn reciprocal_seed_error(yhat: &BigRational) -> BigRational {
        let z0 = rational(48, 17) - rational(32, 17) * yhat;
        rational(1, 1) - yhat * z0
    }
}

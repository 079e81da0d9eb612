//! Exact reference arithmetic for binary formats, independent of the library's
//! own conversion code: values are n·2^e with big-integer n.
#![allow(dead_code)]

use std::cmp::Ordering;

use dynprec::{Arith, ArithConfig, GrossFloat, Rounding, Sign};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    pub n: BigInt,
    pub e: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { n: BigInt::zero(), e: 0 }
    }

    pub fn int(v: i64) -> Self {
        Dyadic { n: BigInt::from(v), e: 0 }.reduced()
    }

    /// Odd mantissa form, so equal values compare equal structurally.
    pub fn reduced(mut self) -> Self {
        if self.n.is_zero() {
            return Dyadic::zero();
        }
        let tz = self.n.trailing_zeros().unwrap_or(0);
        self.n >>= tz as usize;
        self.e += tz as i64;
        self
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = a.e.min(b.e);
        (&a.n << (a.e - e) as usize, &b.n << (b.e - e) as usize, e)
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        let (x, y, e) = Self::aligned(self, o);
        Dyadic { n: x + y, e }.reduced()
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        let (x, y, e) = Self::aligned(self, o);
        Dyadic { n: x - y, e }.reduced()
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic { n: &self.n * &o.n, e: self.e + o.e }.reduced()
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { n: -&self.n, e: self.e }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { n: self.n.abs(), e: self.e }
    }

    pub fn cmp(&self, o: &Dyadic) -> Ordering {
        let (x, y, _) = Self::aligned(self, o);
        x.cmp(&y)
    }

    /// Exponent of the leading bit; `None` for zero.
    pub fn lead(&self) -> Option<i64> {
        if self.n.is_zero() {
            None
        } else {
            Some(self.e + self.n.bits() as i64 - 1)
        }
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.n.bits() as i64;
        let keep = bits.min(60);
        let top = (&self.n.abs() >> (bits - keep) as usize).to_string().parse::<f64>().unwrap();
        let v = top * 2f64.powi((self.e + bits - keep) as i32);
        if self.n.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Round to `digits` significant bits.
    pub fn round(&self, digits: u64, mode: Rounding) -> Dyadic {
        if self.n.is_zero() {
            return Dyadic::zero();
        }
        let neg = self.n.is_negative();
        let mag = self.n.abs();
        let len = mag.bits();
        if len <= digits {
            return self.clone().reduced();
        }
        let drop = len - digits;
        let mut q: BigInt = &mag >> drop as usize;
        let rem: BigInt = &mag - (&q << drop as usize);
        if mode == Rounding::NearestEven {
            let half = BigInt::one() << (drop - 1) as usize;
            if rem > half || (rem == half && q.is_odd()) {
                q += 1;
            }
        }
        let n = if neg { -q } else { q };
        Dyadic { n, e: self.e + drop as i64 }.reduced()
    }
}

/// Exact value of a stored number, read straight from its chunks.
pub fn exact(ar: &Arith, x: &GrossFloat) -> Dyadic {
    assert_eq!(ar.base(), 2);
    if x.is_zero() {
        return Dyadic::zero();
    }
    let w = ar.chunk_width();
    let mut n = BigInt::zero();
    for &c in x.chunks() {
        n = (n << w) + BigInt::from(c);
    }
    if x.sign() == Sign::Minus {
        n = -n;
    }
    Dyadic {
        n,
        e: x.exponent() - (x.width() * w) as i64 + 1,
    }
    .reduced()
}

/// Distance between a stored result and an exact value, in units of the last
/// bit of a `digits`-bit result whose leading bit matches `reference`.
pub fn ulps(got: &Dyadic, want: &Dyadic, digits: u64) -> f64 {
    let diff = got.sub(want).abs();
    if diff.n.is_zero() {
        return 0.0;
    }
    let lead = want.lead().or(got.lead()).unwrap();
    let ulp_exp = lead - digits as i64 + 1;
    diff.to_f64() / 2f64.powi(ulp_exp as i32)
}

pub fn arith(t: u32, max_section: usize, rounding: Rounding) -> Arith {
    Arith::new(ArithConfig::binary(t, max_section).with_rounding(rounding)).unwrap()
}

/// Random normalized value with `width` chunks and exponent in `exp`.
pub fn random_value<R: Rng>(rng: &mut R, ar: &Arith, width: usize, exp: std::ops::RangeInclusive<i64>) -> GrossFloat {
    let m = ar.modulus();
    let lead_min = m / ar.base() as u64;
    let mut chunks = Vec::with_capacity(width);
    chunks.push(rng.gen_range(lead_min..m));
    for _ in 1..width {
        // Mix in runs of zeros and all-ones to reach carry and tie paths.
        let c = match rng.gen_range(0..8) {
            0 => 0,
            1 => m - 1,
            2 => m / 2,
            _ => rng.gen_range(0..m),
        };
        chunks.push(c);
    }
    let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
    ar.from_parts(sign, rng.gen_range(exp), chunks).unwrap()
}

/// A value close to `x`, sharing its leading chunks, to exercise cancellation.
pub fn nearby<R: Rng>(rng: &mut R, ar: &Arith, x: &GrossFloat) -> GrossFloat {
    let mut chunks = x.chunks().to_vec();
    let j = rng.gen_range(0..chunks.len());
    let m = ar.modulus();
    if j == 0 {
        let lead_min = m / 2;
        let delta = rng.gen_range(0..4u64);
        chunks[0] = (chunks[0] ^ delta).max(lead_min);
    } else {
        chunks[j] = rng.gen_range(0..m);
    }
    ar.from_parts(x.sign(), x.exponent(), chunks).unwrap()
}

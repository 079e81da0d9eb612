use std::fmt;
use std::str::FromStr;

use crate::error::ArithError;

/// How a result is cut down to its stored digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Rounding {
    Truncate,
    #[default]
    NearestEven,
}

impl FromStr for Rounding {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "truncate" | "trunc" | "chop" => Ok(Rounding::Truncate),
            "nearest_even" | "nearest" | "even" => Ok(Rounding::NearestEven),
            other => Err(ArithError::InvalidConfig(format!("unknown rounding mode `{other}`"))),
        }
    }
}

impl fmt::Display for Rounding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rounding::Truncate => "truncate",
            Rounding::NearestEven => "nearest_even",
        })
    }
}

/// Shape of the number format: base, digits per chunk and number of chunks.
///
/// A number carries at most `max_section + 1` chunks of `chunk_width` base-`base`
/// digits each, so it has `(max_section + 1) * chunk_width` significant digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithConfig {
    pub base: u32,
    /// Digits per chunk (t + 1).
    pub chunk_width: u32,
    /// Highest stored chunk index (T).
    pub max_section: usize,
    pub rounding: Rounding,
    pub exponent_min: i64,
    pub exponent_max: i64,
}

impl ArithConfig {
    /// Binary format with `t + 1` bits per chunk and `T + 1` chunks.
    pub fn binary(t: u32, max_section: usize) -> Self {
        ArithConfig {
            base: 2,
            chunk_width: t + 1,
            max_section,
            rounding: Rounding::NearestEven,
            exponent_min: -16384,
            exponent_max: 16383,
        }
    }

    pub fn with_rounding(mut self, rounding: Rounding) -> Self {
        self.rounding = rounding;
        self
    }

    pub fn with_exponent_range(mut self, min: i64, max: i64) -> Self {
        self.exponent_min = min;
        self.exponent_max = max;
        self
    }

    pub fn with_max_section(mut self, max_section: usize) -> Self {
        self.max_section = max_section;
        self
    }

    /// The t of the format, one less than the chunk width.
    pub fn t(&self) -> u32 {
        self.chunk_width - 1
    }

    /// Total significant digits, N + 1.
    pub fn significant_digits(&self) -> u64 {
        (self.max_section as u64 + 1) * self.chunk_width as u64
    }

    pub fn validate(&self) -> Result<(), ArithError> {
        let bad = |m: &str| Err(ArithError::InvalidConfig(m.to_string()));
        if self.base < 2 || self.base > 36 {
            return bad("base must lie in 2..=36");
        }
        if self.chunk_width < 1 {
            return bad("chunk width must be at least 1");
        }
        if self.exponent_min >= self.exponent_max {
            return bad("exponent_min must be below exponent_max");
        }
        if self.max_section > 4096 {
            return bad("max_section above 4096 is not supported");
        }
        if self.rounding == Rounding::NearestEven && self.base % 2 == 1 {
            return bad("nearest_even rounding needs an even base");
        }
        let m = (self.base as u128).checked_pow(self.chunk_width);
        let Some(m) = m.filter(|&m| m <= 1 << 62) else {
            return bad("base^(t+1) must not exceed 2^62");
        };
        // Wide accumulators hold up to (T+2) products of two chunks scaled by β.
        let wide = m
            .checked_mul(m)
            .and_then(|v| v.checked_mul(self.base as u128))
            .and_then(|v| v.checked_mul(self.max_section as u128 + 3));
        if wide.map_or(true, |v| v >= 1 << 125) {
            return bad("chunk width too large for the wide accumulator");
        }
        Ok(())
    }
}

impl Default for ArithConfig {
    /// β = 2, t = 52, T = 4, nearest even.
    fn default() -> Self {
        ArithConfig::binary(52, 4)
    }
}

/// Precomputed powers of the base for one configuration.
#[derive(Debug, Clone)]
pub(crate) struct Radix {
    pub base: u64,
    pub width: usize,
    /// β^(t+1), one past the largest chunk value.
    pub modulus: u64,
    pow: Vec<u64>,
}

impl Radix {
    pub fn new(cfg: &ArithConfig) -> Self {
        let base = cfg.base as u64;
        let width = cfg.chunk_width as usize;
        let pow: Vec<u64> = (0..=width as u32).map(|k| base.pow(k)).collect();
        Radix {
            base,
            width,
            modulus: pow[width],
            pow,
        }
    }

    /// β^k for 0 ≤ k ≤ t+1.
    #[inline]
    pub fn pow(&self, k: usize) -> u64 {
        self.pow[k]
    }

    /// Number of base-β digits of `v`; zero has none.
    pub fn digit_len(&self, v: u64) -> usize {
        if v == 0 {
            return 0;
        }
        if self.base == 2 {
            return 64 - v.leading_zeros() as usize;
        }
        self.pow.iter().position(|&p| p > v).unwrap_or(self.width)
    }

    /// Digit `i` (0 = most significant) of a chunk.
    #[inline]
    pub fn digit(&self, chunk: u64, i: usize) -> u64 {
        (chunk / self.pow[self.width - 1 - i]) % self.base
    }
}

use std::cmp::Ordering;
use std::ops::Neg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Minus
    }
}

/// One chunk of t+1 base-β digits, stored as the integer they spell.
///
/// The radix point sits after the first digit, so the chunk's value is the
/// integer divided by β^t and lies in [0, β).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GrossDigit(pub u64);

/// A chunked floating point number ±β^p · Σ c_j · (β^(t+1))^(-j).
///
/// Zero has no chunks. A nonzero value has a nonzero leading digit in chunk 0.
/// The number of stored chunks is the value's precision and is kept even when
/// trailing chunks are zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GrossFloat {
    pub(crate) sign: Sign,
    pub(crate) exponent: i64,
    pub(crate) chunks: Vec<u64>,
}

impl GrossFloat {
    pub fn zero() -> Self {
        GrossFloat::default()
    }

    /// Assemble a value from raw parts without checking the format.
    ///
    /// Use [`crate::Arith::from_parts`] for a checked constructor.
    pub(crate) fn from_raw(sign: Sign, exponent: i64, chunks: Vec<u64>) -> Self {
        if chunks.is_empty() {
            return GrossFloat::zero();
        }
        GrossFloat {
            sign,
            exponent,
            chunks,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.chunks.is_empty()
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn chunks(&self) -> &[u64] {
        &self.chunks
    }

    pub fn grossdigit(&self, j: usize) -> Option<GrossDigit> {
        self.chunks.get(j).copied().map(GrossDigit)
    }

    /// Stored chunk count; the section index of the value plus one.
    pub fn width(&self) -> usize {
        self.chunks.len()
    }

    pub fn abs(&self) -> Self {
        GrossFloat {
            sign: Sign::Plus,
            ..self.clone()
        }
    }

    /// Same value with `n` chunks, padding with zeros or dropping the tail.
    pub fn with_width(&self, n: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut chunks = self.chunks.clone();
        chunks.resize(n.max(1), 0);
        GrossFloat {
            chunks,
            ..self.clone()
        }
    }

    /// Same value with trailing zero chunks dropped.
    pub fn trimmed(&self) -> Self {
        let keep = self.chunks.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
        GrossFloat::from_raw(self.sign, self.exponent, self.chunks[..keep].to_vec())
    }

    /// Value ordering, independent of stored width.
    pub fn compare(&self, other: &GrossFloat) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => {
                return if other.sign.is_negative() {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            (false, true) => {
                return if self.sign.is_negative() {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            _ => {}
        }
        match (self.sign, other.sign) {
            (Sign::Plus, Sign::Minus) => Ordering::Greater,
            (Sign::Minus, Sign::Plus) => Ordering::Less,
            (Sign::Plus, Sign::Plus) => self.cmp_magnitude(other),
            (Sign::Minus, Sign::Minus) => other.cmp_magnitude(self),
        }
    }

    /// Ordering of absolute values.
    pub fn cmp_magnitude(&self, other: &GrossFloat) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        self.exponent.cmp(&other.exponent).then_with(|| {
            let n = self.chunks.len().max(other.chunks.len());
            (0..n)
                .map(|j| {
                    let a = self.chunks.get(j).copied().unwrap_or(0);
                    let b = other.chunks.get(j).copied().unwrap_or(0);
                    a.cmp(&b)
                })
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }

    /// True when both hold the same real value, whatever their widths.
    pub fn same_value(&self, other: &GrossFloat) -> bool {
        self.compare(other) == Ordering::Equal
    }
}

impl Neg for GrossFloat {
    type Output = GrossFloat;

    fn neg(mut self) -> GrossFloat {
        if !self.is_zero() {
            self.sign = self.sign.flip();
        }
        self
    }
}

impl Neg for &GrossFloat {
    type Output = GrossFloat;

    fn neg(self) -> GrossFloat {
        -self.clone()
    }
}

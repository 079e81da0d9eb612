use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::Arith;
use crate::config::Rounding;
use crate::error::ArithError;
use crate::float::{GrossFloat, Sign};

impl Arith {
    /// Parse a base-β digit string such as `1.11010101110` whose first digit
    /// has weight β^exponent. Digits past the last stored chunk are rounded.
    pub fn from_binary_string(&self, sign: Sign, exponent: i64, mantissa_digits: &str) -> Result<GrossFloat, ArithError> {
        let mut digits = Vec::new();
        let mut seen_point = false;
        for (i, ch) in mantissa_digits.trim().chars().enumerate() {
            match ch {
                '.' if !seen_point && i == 1 => seen_point = true,
                '_' | ' ' => {}
                _ => {
                    let d = ch
                        .to_digit(self.base())
                        .ok_or_else(|| ArithError::format(mantissa_digits, format!("`{ch}` is not a base-{} digit", self.base())))?;
                    digits.push(d as u64);
                }
            }
        }
        if digits.is_empty() {
            return Err(ArithError::format(mantissa_digits, "no digits"));
        }
        if digits.iter().all(|&d| d == 0) {
            return Ok(GrossFloat::zero());
        }
        let raw = self.raw_from_digits(sign, exponent, &digits);
        let (x, _) = self.finish(raw, self.max_section(), &mut 0, None)?;
        Ok(x)
    }

    /// Parse a finite decimal like `-1.25e-3`; the only rounding is the final one.
    pub fn from_decimal_string(&self, text: &str) -> Result<GrossFloat, ArithError> {
        let r = parse_decimal(text)?;
        self.from_rational(&r, self.max_section())
    }

    /// Round an exact rational to at most `rs + 1` chunks. Exact values keep
    /// only the chunks they need.
    pub fn from_rational(&self, r: &BigRational, rs: usize) -> Result<GrossFloat, ArithError> {
        self.check_section(rs)?;
        if r.is_zero() {
            return Ok(GrossFloat::zero());
        }
        let sign = if r.is_negative() { Sign::Minus } else { Sign::Plus };
        let n = r.numer().abs();
        let d = r.denom().abs();
        let beta = BigInt::from(self.base());
        let log2b = (self.base() as f64).log2();
        let mut e = ((n.bits() as f64 - d.bits() as f64) / log2b).floor() as i64;
        // Settle e so that β^e ≤ n/d < β^(e+1).
        let at_least = |e: i64| -> bool {
            if e >= 0 {
                &d * pow_big(&beta, e as u64) <= n
            } else {
                d <= &n * pow_big(&beta, (-e) as u64)
            }
        };
        while !at_least(e) {
            e -= 1;
        }
        while at_least(e + 1) {
            e += 1;
        }
        let w = self.chunk_width();
        let total = ((rs + 1) * w) as i64;
        let s = total - 1 - e;
        let (num, den) = if s >= 0 {
            (&n * pow_big(&beta, s as u64), d.clone())
        } else {
            (n.clone(), &d * pow_big(&beta, (-s) as u64))
        };
        let (mut q, rem) = num.div_rem(&den);
        let exact = rem.is_zero();
        if !exact && self.config().rounding == Rounding::NearestEven {
            let twice = &rem * 2u32;
            if twice > den || (twice == den && q.is_odd()) {
                q += 1u32;
            }
        }
        let limit = pow_big(&beta, total as u64);
        if q >= limit {
            q /= &beta;
            e += 1;
        }
        let m = BigInt::from(self.modulus());
        let mut chunks = vec![0u64; rs + 1];
        for slot in chunks.iter_mut().rev() {
            let (nq, c) = q.div_rem(&m);
            *slot = c.to_u64().unwrap_or(0);
            q = nq;
        }
        let x = self.from_parts(sign, e, chunks)?;
        Ok(if exact { x.trimmed() } else { x })
    }

    /// Exact value as a rational.
    pub fn to_rational(&self, x: &GrossFloat) -> BigRational {
        if x.is_zero() {
            return BigRational::zero();
        }
        let m = BigInt::from(self.modulus());
        let mut mant = BigInt::zero();
        for &c in x.chunks() {
            mant = mant * &m + BigInt::from(c);
        }
        if x.sign().is_negative() {
            mant = -mant;
        }
        let shift = x.exponent() - (x.width() * self.chunk_width()) as i64 + 1;
        let beta = BigInt::from(self.base());
        if shift >= 0 {
            BigRational::from_integer(mant * pow_big(&beta, shift as u64))
        } else {
            BigRational::new(mant, pow_big(&beta, (-shift) as u64))
        }
    }

    /// Nearest double, computed from the leading chunks.
    pub fn to_f64(&self, x: &GrossFloat) -> f64 {
        let (m, e) = self.to_f64_parts(x);
        m * (self.base() as f64).powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// Split into a signed mantissa in [1, β) and an exponent of β.
    pub fn to_f64_parts(&self, x: &GrossFloat) -> (f64, i64) {
        if x.is_zero() {
            return (0.0, 0);
        }
        let mf = self.modulus() as f64;
        let need = (72.0 / (self.chunk_width() as f64 * (self.base() as f64).log2())).ceil() as usize + 1;
        let mut m = 0.0;
        let mut scale = 1.0;
        for &c in x.chunks().iter().take(need) {
            m += c as f64 * scale;
            scale /= mf;
        }
        m /= (self.base() as f64).powi(self.chunk_width() as i32 - 1);
        (if x.sign().is_negative() { -m } else { m }, x.exponent())
    }

    /// Decimal rendering with at most `digits` significant digits, rounded
    /// half to even, trailing zeros dropped.
    pub fn to_decimal_string(&self, x: &GrossFloat, digits: usize) -> String {
        rational_to_decimal(&self.to_rational(x), digits.max(1))
    }

    fn chunk_text(&self, c: u64) -> String {
        let w = self.chunk_width();
        let mut s = String::with_capacity(w + 1);
        for i in 0..w {
            let d = self.rx.digit(c, i) as u32;
            s.push(std::char::from_digit(d, self.base()).unwrap());
            if i == 0 && w > 1 {
                s.push('.');
            }
        }
        s
    }

    fn parse_chunk(&self, text: &str, whole: &str) -> Result<u64, ArithError> {
        let body: String = text.trim().chars().filter(|&c| c != '.').collect();
        if body.chars().count() != self.chunk_width() {
            return Err(ArithError::format(whole, format!("chunk `{text}` needs {} digits", self.chunk_width())));
        }
        let mut v = 0u64;
        for ch in body.chars() {
            let d = ch
                .to_digit(self.base())
                .ok_or_else(|| ArithError::format(whole, format!("`{ch}` is not a base-{} digit", self.base())))?;
            v = v * self.base() as u64 + d as u64;
        }
        Ok(v)
    }

    /// Literal `[+-]β^p : c0|c1|...`, every stored chunk written out.
    pub fn to_literal(&self, x: &GrossFloat) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        let chunks: Vec<String> = x.chunks().iter().map(|&c| self.chunk_text(c)).collect();
        format!(
            "{}{}^{} : {}",
            if x.sign().is_negative() { '-' } else { '+' },
            self.base(),
            x.exponent(),
            chunks.join("|")
        )
    }

    /// Inverse of [`Arith::to_literal`]; width and digits are kept exactly.
    pub fn parse_literal(&self, text: &str) -> Result<GrossFloat, ArithError> {
        let t = text.trim();
        if matches!(t, "0" | "+0" | "-0") {
            return Ok(GrossFloat::zero());
        }
        let (head, body) = t
            .split_once(':')
            .ok_or_else(|| ArithError::format(text, "expected `β^p : chunks`"))?;
        let (sign, exponent) = self.parse_scale(head, text)?;
        let chunks = body
            .split('|')
            .map(|c| self.parse_chunk(c, text))
            .collect::<Result<Vec<_>, _>>()?;
        self.from_parts(sign, exponent, chunks)
            .map_err(|e| ArithError::format(text, e.to_string()))
    }

    fn parse_scale(&self, head: &str, whole: &str) -> Result<(Sign, i64), ArithError> {
        let head = head.trim();
        let (sign, rest) = match head.chars().next() {
            Some('-') => (Sign::Minus, &head[1..]),
            Some('+') => (Sign::Plus, &head[1..]),
            _ => (Sign::Plus, head),
        };
        let (b, p) = rest
            .trim()
            .split_once('^')
            .ok_or_else(|| ArithError::format(whole, "expected `β^p`"))?;
        if b.trim() != self.base().to_string() {
            return Err(ArithError::format(whole, format!("base {} does not match the format's base {}", b.trim(), self.base())));
        }
        let p = p
            .trim()
            .parse::<i64>()
            .map_err(|_| ArithError::format(whole, "bad exponent"))?;
        Ok((sign, p))
    }

    /// Table layout: exponent column then one column per chunk.
    pub fn format_table_row(&self, x: &GrossFloat) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        let mut cols = vec![format!(
            "{}{}^{}",
            if x.sign().is_negative() { "-" } else { "" },
            self.base(),
            x.exponent()
        )];
        cols.extend(x.chunks().iter().map(|&c| self.chunk_text(c)));
        cols.join(" | ")
    }

    pub fn parse_table_row(&self, text: &str) -> Result<GrossFloat, ArithError> {
        let t = text.trim();
        if t == "0" {
            return Ok(GrossFloat::zero());
        }
        let mut cols = t.split('|');
        let (sign, exponent) = self.parse_scale(cols.next().unwrap_or(""), text)?;
        let chunks = cols.map(|c| self.parse_chunk(c, text)).collect::<Result<Vec<_>, _>>()?;
        self.from_parts(sign, exponent, chunks)
            .map_err(|e| ArithError::format(text, e.to_string()))
    }
}

pub(crate) fn pow_big(b: &BigInt, e: u64) -> BigInt {
    num_traits::pow::pow(b.clone(), e as usize)
}

/// Exact rational value of a decimal literal.
pub fn parse_decimal(text: &str) -> Result<BigRational, ArithError> {
    let t = text.trim();
    let bad = |why: &str| ArithError::format(text, why);
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad("bad exponent"))?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad("no digits"));
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad("not a decimal number"));
    }
    if exp.abs() > 100_000 {
        return Err(bad("exponent too large"));
    }
    let digits = format!("{ip}{fp}");
    let mut n = BigInt::parse_bytes(if digits.is_empty() { b"0" } else { digits.as_bytes() }, 10).ok_or_else(|| bad("bad digits"))?;
    if neg {
        n = -n;
    }
    let scale = exp - fp.len() as i64;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(n * pow_big(&ten, scale as u64))
    } else {
        BigRational::new(n, pow_big(&ten, (-scale) as u64))
    })
}

/// Decimal text of a rational with `digits` significant digits.
pub fn rational_to_decimal(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let n = r.numer().abs();
    let d = r.denom().abs();
    let ten = BigInt::from(10);
    let ge_pow10 = |e: i64| -> bool {
        if e >= 0 {
            &d * pow_big(&ten, e as u64) <= n
        } else {
            d <= &n * pow_big(&ten, (-e) as u64)
        }
    };
    let mut e = ((n.bits() as f64 - d.bits() as f64) * std::f64::consts::LOG10_2).floor() as i64;
    while !ge_pow10(e) {
        e -= 1;
    }
    while ge_pow10(e + 1) {
        e += 1;
    }
    let s = digits as i64 - 1 - e;
    let (num, den) = if s >= 0 {
        (&n * pow_big(&ten, s as u64), d.clone())
    } else {
        (n.clone(), &d * pow_big(&ten, (-s) as u64))
    };
    let (mut q, rem) = num.div_rem(&den);
    let twice = &rem * 2u32;
    if twice > den || (twice == den && q.is_odd()) {
        q += 1u32;
    }
    if q >= pow_big(&ten, digits as u64) {
        q /= &ten;
        e += 1;
    }
    let text = q.to_str_radix(10);
    let text = text.trim_end_matches('0');
    let text = if text.is_empty() { "0" } else { text };
    let sign = if neg { "-" } else { "" };
    if (-6..21).contains(&e) {
        if e >= 0 {
            let int_len = e as usize + 1;
            if text.len() <= int_len {
                format!("{sign}{text}{}", "0".repeat(int_len - text.len()))
            } else {
                format!("{sign}{}.{}", &text[..int_len], &text[int_len..])
            }
        } else {
            format!("{sign}0.{}{text}", "0".repeat((-e - 1) as usize))
        }
    } else if text.len() == 1 {
        format!("{sign}{text}e{e}")
    } else {
        format!("{sign}{}.{}e{e}", &text[..1], &text[1..])
    }
}

/// Convenience for tests and callers holding machine integers.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ArithConfig;

    fn ar(t: u32, tt: usize) -> Arith {
        Arith::new(ArithConfig::binary(t, tt)).unwrap()
    }

    #[test]
    fn digit_strings_group_into_chunks() {
        let a = ar(3, 2);
        let x = a.from_binary_string(Sign::Plus, 0, "1.11010101110").unwrap();
        assert_eq!(x.chunks(), &[0b1110, 0b1010, 0b1110]);
        assert_eq!(x.exponent(), 0);
        let one = a.from_binary_string(Sign::Plus, 0, "1.000").unwrap();
        assert_eq!(one, a.one());
    }

    #[test]
    fn digit_string_rounds_past_last_chunk() {
        let a = ar(3, 0);
        let x = a.from_binary_string(Sign::Plus, 0, "1.11111").unwrap();
        assert_eq!((x.exponent(), x.chunks()), (1, &[0b1000][..]));
    }

    #[test]
    fn decimal_tenth_in_binary() {
        let a = Arith::new(ArithConfig::binary(3, 7).with_rounding(Rounding::Truncate)).unwrap();
        let x = a.from_decimal_string("0.1").unwrap();
        assert_eq!(x.exponent(), -4);
        assert_eq!(x.chunks(), &[0b1100, 0b1100, 0b1100, 0b1100, 0b1100, 0b1100, 0b1100, 0b1100]);
        let two = a.from_decimal_string("2").unwrap();
        assert_eq!((two.exponent(), two.chunks()), (1, &[0b1000][..]));
        assert_eq!(a.from_decimal_string("1").unwrap(), a.one());
    }

    #[test]
    fn literal_round_trip() {
        let a = ar(3, 2);
        let text = "+2^0 : 1.110|1.010|1.110";
        let x = a.parse_literal(text).unwrap();
        assert_eq!(a.to_literal(&x), text);
        let y = a.parse_literal("-2^-3 : 1.001|0.000").unwrap();
        assert_eq!(y.width(), 2);
        assert_eq!(a.to_literal(&y), "-2^-3 : 1.001|0.000");
        assert_eq!(a.to_literal(&GrossFloat::zero()), "0");
        assert!(a.parse_literal("+2^0 : 0.110").is_err());
        assert!(a.parse_literal("+2^0 : 1.1102").is_err());
    }

    #[test]
    fn table_row_round_trip() {
        let a = ar(3, 2);
        let text = "2^0 | 1.110 | 1.010 | 1.110";
        let x = a.parse_table_row(text).unwrap();
        assert_eq!(a.format_table_row(&x), text);
        assert_eq!(a.format_table_row(&GrossFloat::zero()), "0");
    }

    #[test]
    fn decimal_output() {
        let a = ar(52, 4);
        let x = a.from_decimal_string("1.5").unwrap();
        assert_eq!(a.to_decimal_string(&x, 2), "1.5");
        assert_eq!(a.to_decimal_string(&x, 40), "1.5");
        assert_eq!(a.to_decimal_string(&GrossFloat::zero(), 5), "0");
        let tiny = a.from_decimal_string("-2.5e-30").unwrap();
        assert_eq!(a.to_decimal_string(&tiny, 5), "-2.5e-30");
        assert_eq!(rational_to_decimal(&rational(1, 3), 4), "0.3333");
        assert_eq!(rational_to_decimal(&rational(2, 3), 3), "0.667");
        assert_eq!(rational_to_decimal(&rational(1000, 1), 3), "1000");
    }

    #[test]
    fn rational_round_trip_is_exact() {
        let a = ar(7, 3);
        let x = a.from_binary_string(Sign::Minus, -5, "1.0110100111010001").unwrap();
        assert_eq!(a.from_rational(&a.to_rational(&x), 3).unwrap(), x);
    }
}

//! Grossdigit-level operation accounting.
//!
//! One multiplication is one chunk-by-chunk product. Additions are split in two
//! tallies. `grossdigit_adds` counts the additions that form the result
//! coefficients up to the wider operand's last chunk (the cost model quoted for
//! add and mul). `carry_adds` counts everything else: carry propagation,
//! redistribution of wide terms and coefficient sums below the wider operand's
//! last chunk.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Add,
    Sub,
    Mul,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::Add => "add",
            OpKind::Sub => "sub",
            OpKind::Mul => "mul",
        })
    }
}

/// Counts measured for one arithmetic operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpRecord {
    pub kind: OpKind,
    /// Section index of the first operand.
    pub q: usize,
    /// Section index of the second operand.
    pub p: usize,
    pub mults: u64,
    pub adds: u64,
    pub carry_adds: u64,
}

/// Destination for operation counts. [`NoCount`] discards them.
pub trait OpSink {
    fn record_op(&mut self, rec: OpRecord);
}

/// Accounting disabled.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoCount;

impl OpSink for NoCount {
    #[inline]
    fn record_op(&mut self, _rec: OpRecord) {}
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OpCounter {
    pub grossdigit_mults: u64,
    pub grossdigit_adds: u64,
    pub carry_adds: u64,
    pub breakdown: Vec<OpRecord>,
}

impl OpSink for OpCounter {
    fn record_op(&mut self, rec: OpRecord) {
        self.record(rec);
    }
}

impl<S: OpSink + ?Sized> OpSink for &mut S {
    fn record_op(&mut self, rec: OpRecord) {
        (**self).record_op(rec);
    }
}

impl OpCounter {
    pub fn new() -> Self {
        OpCounter::default()
    }

    pub fn record(&mut self, rec: OpRecord) {
        self.grossdigit_mults += rec.mults;
        self.grossdigit_adds += rec.adds;
        self.carry_adds += rec.carry_adds;
        self.breakdown.push(rec);
    }

    /// Add another counter's work to this one.
    pub fn merge(&mut self, other: &OpCounter) {
        for rec in &other.breakdown {
            self.record(*rec);
        }
    }

    /// Totals grouped by operation kind and operand sections.
    pub fn grouped(&self) -> BTreeMap<(OpKind, usize, usize), (u64, u64, u64, u64)> {
        let mut out = BTreeMap::new();
        for r in &self.breakdown {
            let e = out.entry((r.kind, r.q, r.p)).or_insert((0, 0, 0, 0));
            e.0 += 1;
            e.1 += r.mults;
            e.2 += r.adds;
            e.3 += r.carry_adds;
        }
        out
    }

    /// Counter dump: one line per (kind, q, p) group plus a total line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("op,q,p,count,mults,adds,carry_adds\n");
        for ((kind, q, p), (n, m, a, c)) in self.grouped() {
            s.push_str(&format!("{kind},{q},{p},{n},{m},{a},{c}\n"));
        }
        s.push_str(&format!(
            "total,,,{},{},{},{}\n",
            self.breakdown.len(),
            self.grossdigit_mults,
            self.grossdigit_adds,
            self.carry_adds
        ));
        s
    }
}

/// Grossdigit multiplications and additions for the full product of a
/// (q+1)-chunk and a (p+1)-chunk operand.
pub fn predict_mul_cost(q: usize, p: usize) -> (u64, u64) {
    let (q, p) = if q > p { (p, q) } else { (q, p) };
    let (q, p) = (q as u64, p as u64);
    ((q + 1) * (p + 1), q * p - q * q.saturating_sub(1) / 2)
}

/// Grossdigit additions for the sum of a (q+1)-chunk and a (p+1)-chunk operand.
pub fn predict_add_cost(q: usize, p: usize) -> u64 {
    q.min(p) as u64 + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictions() {
        assert_eq!(predict_mul_cost(0, 0), (1, 0));
        assert_eq!(predict_mul_cost(4, 4), (25, 10));
        assert_eq!(predict_mul_cost(1, 2), (6, 2));
        assert_eq!(predict_mul_cost(2, 1), (6, 2));
        assert_eq!(predict_add_cost(0, 0), 1);
        assert_eq!(predict_add_cost(1, 2), 2);
        assert_eq!(predict_add_cost(3, 7), 4);
    }

    #[test]
    fn totals_follow_breakdown() {
        let mut c = OpCounter::new();
        c.record(OpRecord {
            kind: OpKind::Mul,
            q: 0,
            p: 0,
            mults: 1,
            adds: 0,
            carry_adds: 2,
        });
        assert_eq!((c.grossdigit_mults, c.grossdigit_adds), (1, 0));
        let mut d = OpCounter::new();
        d.merge(&c);
        d.merge(&c);
        assert_eq!(d.grossdigit_mults, 2);
        assert_eq!(d.carry_adds, 4);
        assert!(d.to_csv().contains("mul,0,0,2,2,0,4"));
    }
}

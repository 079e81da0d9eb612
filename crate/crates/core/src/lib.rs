//! Floating point numbers stored as a short sequence of machine-word chunks,
//! where every operation chooses how many chunks of its result to keep.
//!
//! A value is `±β^p · Σ c_j · D^(-j)` with `D = β^(t+1)` and each chunk
//! `c_j` holding `t + 1` base-β digits. Truncating to the first `q + 1` chunks
//! gives the value at precision level `q`, so mixed precision is just a
//! matter of how many chunks each operand carries.
//!
//! ```
//! use dynprec::{Arith, ArithConfig, NoCount, Sign};
//!
//! let ar = Arith::new(ArithConfig::binary(3, 2)).unwrap();
//! let x = ar.from_binary_string(Sign::Plus, 0, "1.11010101110").unwrap();
//! let y = ar.from_binary_string(Sign::Plus, -3, "1.11111001011").unwrap();
//! let (z, _) = ar.add(&x, &y, 2, &mut NoCount).unwrap();
//! assert_eq!(ar.to_literal(&z), "+2^1 : 1.000|0.101|0.100");
//! ```

mod arith;
mod config;
mod convert;
mod error;
mod float;
pub mod precision;
pub mod profiler;
mod recip;
pub mod rootfind;
mod trace;

pub use arith::{Arith, NormalizationReport, RawAccumulator};
pub use config::{ArithConfig, Rounding};
pub use convert::{parse_decimal, rational, rational_to_decimal};
pub use error::{ArithError, PrecisionError, SolveError};
pub use float::{GrossDigit, GrossFloat, Sign};
pub use profiler::{NoCount, OpCounter, OpKind, OpRecord, OpSink};
pub use recip::ReciprocalTrace;
pub use trace::{render_cell, PipelineTrace, TraceCell, TraceRow};

pub use num_rational::BigRational;

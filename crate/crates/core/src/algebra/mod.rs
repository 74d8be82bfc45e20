//! Exact arithmetic foundation: multihomogeneous polynomials with rational
//! coefficients in at most two blocks of projective variables, matrices of
//! them, generic rank over the function field, and prime-field evaluation.

mod degree;
mod matrix;
pub mod modp;
mod parse;
mod poly;
pub mod qmatrix;

pub use degree::MultiDegree;
pub use matrix::PolyMatrix;
pub use modp::{rank_at_point, ModMatrix};
pub use parse::parse_poly;
pub use poly::{Monomial, Polynomial};
pub use qmatrix::QMatrix;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational scalar used for every coefficient in the pipeline.
pub type Q = BigRational;

#[cfg(test)]
pub(crate) fn q_int(v: i64) -> Q {
    BigRational::from_integer(BigInt::from(v))
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Q> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let whole: BigInt = if int_digits.is_empty() {
            BigInt::from(0)
        } else {
            int_digits.parse().ok()?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_val: BigInt = frac.parse().ok()?;
        let mut value = BigRational::new(whole * &scale + frac_val, scale);
        if negative {
            value = -value;
        }
        return Some(value);
    }
    let n: BigInt = t.parse().ok()?;
    Some(BigRational::from_integer(n))
}

/// Canonical text form of a rational: `"p"` or `"p/q"` in lowest terms.
pub fn format_rational(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Names the homogeneous coordinates: block 0 is `x0..xn`, the optional
/// block 1 is `y0..ym`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarContext {
    blocks: Vec<usize>,
}

impl VarContext {
    /// Coordinates of `P^n`.
    pub fn projective(n: usize) -> Result<Self, AlgebraError> {
        if n < 1 {
            return Err(AlgebraError::BadContext(format!("P^{n} needs n >= 1")));
        }
        Ok(Self { blocks: vec![n + 1] })
    }

    /// Coordinates of `P^n x P^m`.
    pub fn product(n: usize, m: usize) -> Result<Self, AlgebraError> {
        if n < 1 || m < 1 {
            return Err(AlgebraError::BadContext(format!(
                "P^{n} x P^{m} needs n, m >= 1"
            )));
        }
        Ok(Self {
            blocks: vec![n + 1, m + 1],
        })
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Number of variables in block `b` (that is, projective dimension + 1).
    pub fn block_size(&self, b: usize) -> usize {
        self.blocks[b]
    }

    pub fn num_vars(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Index range of block `b` inside an exponent vector.
    pub fn block_range(&self, b: usize) -> std::ops::Range<usize> {
        let start: usize = self.blocks[..b].iter().sum();
        start..start + self.blocks[b]
    }

    pub fn var_name(&self, index: usize) -> String {
        let mut offset = index;
        for (b, &size) in self.blocks.iter().enumerate() {
            if offset < size {
                let letter = if b == 0 { 'x' } else { 'y' };
                return format!("{letter}{offset}");
            }
            offset -= size;
        }
        panic!("variable index {index} out of range");
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("zero polynomial has no multidegree")]
    ZeroPolynomial,
    #[error("polynomial is not homogeneous: degrees {first} and {second}")]
    NotHomogeneous {
        first: MultiDegree,
        second: MultiDegree,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("entry ({row}, {col}) should have degree {expected}: {detail}")]
    EntryDegree {
        row: usize,
        col: usize,
        expected: MultiDegree,
        detail: String,
    },
    #[error("denominator {denominator} is not invertible modulo {prime}")]
    DenominatorNotInvertible { denominator: String, prime: u64 },
    #[error("invalid variable context: {0}")]
    BadContext(String),
}

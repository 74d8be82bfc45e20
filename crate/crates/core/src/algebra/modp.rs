//! Reduction of rational polynomial matrices to a prime field and fiberwise
//! rank at `F_q`-points.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{AlgebraError, PolyMatrix, Q};

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn next_prime(after: u64) -> u64 {
    let mut q = after + 1;
    while !is_prime(q) {
        q += 1;
    }
    q
}

pub fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, q: u64) -> u64 {
    debug_assert!(a % q != 0);
    pow_mod(a, q - 2, q)
}

/// Image of an exact rational in `F_q`.
pub fn reduce(v: &Q, q: u64) -> Result<u64, AlgebraError> {
    let qb = BigInt::from(q);
    let den = v.denom().mod_floor(&qb);
    if den.is_zero() {
        return Err(AlgebraError::DenominatorNotInvertible {
            denominator: v.denom().to_string(),
            prime: q,
        });
    }
    let num = v.numer().mod_floor(&qb);
    let num = num.to_u64().expect("residue fits");
    let den = den.to_u64().expect("residue fits");
    debug_assert!(!v.denom().is_negative());
    Ok(num * inv_mod(den, q) % q)
}

/// Rank of a dense row-major matrix over `F_q`; the buffer is destroyed.
pub fn rank_mod(buf: &mut [u64], rows: usize, cols: usize, q: u64) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| buf[r * cols + col] != 0) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                buf.swap(p * cols + j, rank * cols + j);
            }
        }
        let inv = inv_mod(buf[rank * cols + col], q);
        for i in rank + 1..rows {
            let f = buf[i * cols + col] * inv % q;
            if f == 0 {
                continue;
            }
            for j in col..cols {
                let sub = f * buf[rank * cols + j] % q;
                buf[i * cols + j] = (buf[i * cols + j] + q - sub) % q;
            }
        }
        rank += 1;
    }
    rank
}

/// A polynomial matrix with coefficients reduced mod `q`, ready for repeated
/// evaluation.
#[derive(Debug, Clone)]
pub struct ModMatrix {
    q: u64,
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<Vec<(Vec<u32>, u64)>>,
}

impl ModMatrix {
    pub fn reduce(m: &PolyMatrix, q: u64) -> Result<Self, AlgebraError> {
        let mut entries = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let mut terms = Vec::new();
                for (e, c) in m.get(i, j).terms() {
                    let r = reduce(c, q)?;
                    if r != 0 {
                        terms.push((e.clone(), r));
                    }
                }
                entries.push(terms);
            }
        }
        Ok(Self {
            q,
            rows: m.rows(),
            cols: m.cols(),
            nvars: m.ctx().num_vars(),
            entries,
        })
    }

    pub fn prime(&self) -> u64 {
        self.q
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Evaluates every entry at `point` into `buf` (row-major).
    pub fn eval_into(&self, point: &[u64], buf: &mut Vec<u64>) {
        debug_assert_eq!(point.len(), self.nvars);
        let q = self.q;
        buf.clear();
        for terms in &self.entries {
            let mut acc = 0u64;
            for (e, c) in terms {
                let mut t = *c;
                for (x, &k) in point.iter().zip(e) {
                    for _ in 0..k {
                        t = t * x % q;
                    }
                }
                acc = (acc + t) % q;
            }
            buf.push(acc);
        }
    }

    pub fn rank_at(&self, point: &[u64], scratch: &mut Vec<u64>) -> usize {
        self.eval_into(point, scratch);
        rank_mod(scratch, self.rows, self.cols, self.q)
    }
}

/// Rank of `m` evaluated at an `F_q`-point given by its coordinates.
pub fn rank_at_point(m: &PolyMatrix, point: &[u64], q: u64) -> Result<usize, AlgebraError> {
    if !is_prime(q) {
        return Err(AlgebraError::BadContext(format!("{q} is not prime")));
    }
    if point.len() != m.ctx().num_vars() {
        return Err(AlgebraError::DimensionMismatch(format!(
            "point has {} coordinates, {} expected",
            point.len(),
            m.ctx().num_vars()
        )));
    }
    let mm = ModMatrix::reduce(m, q)?;
    let reduced: Vec<u64> = point.iter().map(|&v| v % q).collect();
    Ok(mm.rank_at(&reduced, &mut Vec::new()))
}

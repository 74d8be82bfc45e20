use std::fmt;

use serde::{Deserialize, Serialize};

/// The truncated polynomial ring `ℤ[h_1,…,h_l]/(h_1^{t_1+1}, …, h_l^{t_l+1})`,
/// the Chow ring of `P^{t_1} x … x P^{t_l}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedRing {
    tops: Vec<usize>,
}

/// Dense element of a [`TruncatedRing`], indexed in mixed radix with the
/// first generator varying slowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    tops: Vec<usize>,
    coeffs: Vec<i64>,
}

impl TruncatedRing {
    pub fn new(tops: Vec<usize>) -> Self {
        Self { tops }
    }

    pub fn tops(&self) -> &[usize] {
        &self.tops
    }

    fn size(&self) -> usize {
        self.tops.iter().map(|t| t + 1).product()
    }

    pub fn zero(&self) -> RingElement {
        RingElement {
            tops: self.tops.clone(),
            coeffs: vec![0; self.size()],
        }
    }

    pub fn one(&self) -> RingElement {
        let mut z = self.zero();
        z.coeffs[0] = 1;
        z
    }

    /// The linear class `Σ p_i h_i`.
    pub fn linear(&self, p: &[i64]) -> RingElement {
        assert_eq!(p.len(), self.tops.len());
        let mut z = self.zero();
        for (i, &v) in p.iter().enumerate() {
            let mut e = vec![0; self.tops.len()];
            e[i] = 1;
            if let Some(idx) = z.index(&e) {
                z.coeffs[idx] += v;
            }
        }
        z
    }

    /// Exponent vectors of total degree `k`, in lexicographic order with the
    /// first generator's exponent decreasing.
    pub fn monomials_of_degree(&self, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = vec![0; self.tops.len()];
        fn rec(tops: &[usize], i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if i == tops.len() {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            for e in (0..=left.min(tops[i])).rev() {
                cur[i] = e;
                rec(tops, i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        rec(&self.tops, 0, k, &mut cur, &mut out);
        out
    }
}

impl RingElement {
    fn index(&self, e: &[usize]) -> Option<usize> {
        let mut idx = 0;
        for (&x, &t) in e.iter().zip(&self.tops) {
            if x > t {
                return None;
            }
            idx = idx * (t + 1) + x;
        }
        Some(idx)
    }

    fn exponent(&self, mut idx: usize) -> Vec<usize> {
        let mut e = vec![0; self.tops.len()];
        for i in (0..self.tops.len()).rev() {
            let base = self.tops[i] + 1;
            e[i] = idx % base;
            idx /= base;
        }
        e
    }

    pub fn coefficient(&self, e: &[usize]) -> i64 {
        self.index(e).map_or(0, |i| self.coeffs[i])
    }

    pub fn constant_term(&self) -> i64 {
        self.coeffs[0]
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            tops: self.tops.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            tops: self.tops.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        Self {
            tops: self.tops.clone(),
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0i64; self.coeffs.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let ei = self.exponent(i);
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let ej = other.exponent(j);
                let e: Vec<usize> = ei.iter().zip(&ej).map(|(x, y)| x + y).collect();
                if let Some(k) = self.index(&e) {
                    out[k] += a * b;
                }
            }
        }
        Self {
            tops: self.tops.clone(),
            coeffs: out,
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self {
            tops: self.tops.clone(),
            coeffs: {
                let mut v = vec![0; self.coeffs.len()];
                v[0] = 1;
                v
            },
        };
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of an element with constant term `±1`, by the geometric
    /// series of its nilpotent part.
    pub fn inverse(&self) -> Option<Self> {
        let c = self.constant_term();
        if c != 1 && c != -1 {
            return None;
        }
        let unit = self.scale(c); // constant term now 1
        let mut one = unit.clone();
        one.coeffs.iter_mut().for_each(|v| *v = 0);
        one.coeffs[0] = 1;
        let nil = one.sub(&unit); // 1 - u, nilpotent
        let mut acc = one.clone();
        let mut power = one;
        let max_deg: usize = self.tops.iter().sum();
        for _ in 0..max_deg {
            power = power.mul(&nil);
            acc = acc.add(&power);
        }
        Some(acc.scale(c))
    }

    /// Homogeneous component of total degree `k`.
    pub fn component(&self, k: usize) -> Self {
        let mut out = self.clone();
        for (i, v) in out.coeffs.iter_mut().enumerate() {
            if self.exponent(i).iter().sum::<usize>() != k {
                *v = 0;
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&v| v == 0)
    }

    /// Nonzero `(exponent, coefficient)` pairs, by total degree and then
    /// with the first generator's exponent decreasing.
    pub fn terms(&self) -> Vec<(Vec<usize>, i64)> {
        let mut out: Vec<(Vec<usize>, i64)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (self.exponent(i), v))
            .collect();
        out.sort_by(|(a, _), (b, _)| {
            let da: usize = a.iter().sum();
            let db: usize = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        out
    }

    pub fn to_serial(&self) -> SerialClass {
        SerialClass {
            terms: self
                .terms()
                .into_iter()
                .map(|(monomial, coeff)| SerialTerm { monomial, coeff })
                .collect(),
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let single = self.tops.len() == 1;
        for (k, (e, c)) in terms.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    let name = if single { "h".to_string() } else { format!("h{}", i + 1) };
                    if x == 1 {
                        name
                    } else {
                        format!("{name}^{x}")
                    }
                })
                .collect();
            let abs = c.abs();
            let body = match (mono.is_empty(), abs) {
                (true, _) => abs.to_string(),
                (false, 1) => mono.join("*"),
                (false, _) => format!("{abs}*{}", mono.join("*")),
            };
            match (k, *c < 0) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// Sparse serial form of a Chow-ring class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerialClass {
    pub terms: Vec<SerialTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerialTerm {
    pub monomial: Vec<usize>,
    pub coeff: i64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_total_chern_class() {
        let r = TruncatedRing::new(vec![3]);
        let c = r.linear(&[1]).add(&r.one()); // 1 + h
        let inv = c.inverse().unwrap();
        assert_eq!(inv.terms(), vec![(vec![0], 1), (vec![1], -1), (vec![2], 1), (vec![3], -1)]);
        assert_eq!(c.mul(&inv), r.one());
    }

    #[test]
    fn product_ring_truncation() {
        let r = TruncatedRing::new(vec![2, 1]);
        let l = r.linear(&[1, 1]);
        let cube = l.pow(3);
        // (h1+h2)^3 = 3 h1^2 h2 in ℤ[h1,h2]/(h1^3, h2^2)
        assert_eq!(cube.terms(), vec![(vec![2, 1], 3)]);
        assert_eq!(r.monomials_of_degree(2), vec![vec![2, 0], vec![1, 1]]);
    }

    #[test]
    fn display() {
        let r = TruncatedRing::new(vec![2, 1]);
        assert_eq!(r.linear(&[-1, 1]).to_string(), "-h1 + h2");
        assert_eq!(TruncatedRing::new(vec![3]).linear(&[2]).pow(2).to_string(), "4*h^2");
    }
}

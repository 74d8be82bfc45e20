use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{format_rational, AlgebraError, MultiDegree, VarContext, Q};

/// Exponent vector over all variables of a [`VarContext`].
pub type Monomial = Vec<u32>;

/// Sparse polynomial with exact rational coefficients. Zero coefficients are
/// never stored; all exponent vectors have the same length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        Self::monomial(nvars, Self::unit_exponent(nvars, index), Q::one())
    }

    pub fn monomial(nvars: usize, exponent: Monomial, c: Q) -> Self {
        assert_eq!(exponent.len(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exponent, c);
        }
        p
    }

    fn unit_exponent(nvars: usize, index: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[index] = 1;
        e
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging
    /// repeated exponents and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Q)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponent: &[u32]) -> Q {
        self.terms.get(exponent).cloned().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, e: Monomial, c: Q) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Greatest term in lexicographic order of exponent vectors.
    fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (lead_e, lead_c) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((e, c)) = rem.leading() {
            if !e.iter().zip(lead_e).all(|(a, b)| a >= b) {
                return None;
            }
            let te: Monomial = e.iter().zip(lead_e).map(|(a, b)| a - b).collect();
            let tc = c / lead_c;
            let t = Self::monomial(self.nvars, te, tc);
            rem = rem.sub(&t.mul(divisor));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    /// Degree of every term, per variable block.
    pub fn term_degrees<'a>(
        &'a self,
        ctx: &'a VarContext,
    ) -> impl Iterator<Item = MultiDegree> + 'a {
        self.terms.keys().map(move |e| exponent_degree(ctx, e))
    }

    /// The common multidegree of all terms.
    pub fn multidegree(&self, ctx: &VarContext) -> Result<MultiDegree, AlgebraError> {
        let mut degrees = self.term_degrees(ctx);
        let first = degrees.next().ok_or(AlgebraError::ZeroPolynomial)?;
        for d in degrees {
            if d != first {
                return Err(AlgebraError::NotHomogeneous { first, second: d });
            }
        }
        Ok(first)
    }

    /// Substitutes a rational point.
    pub fn evaluate(&self, point: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Writes the polynomial in the document grammar, terms in descending
    /// lexicographic order.
    pub fn to_text(&self, ctx: &VarContext) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            let is_constant = e.iter().all(|&k| k == 0);
            if !abs.is_one() || is_constant {
                factors.push(format_rational(&abs));
            }
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(ctx.var_name(v)),
                    _ => factors.push(format!("{}^{k}", ctx.var_name(v))),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

pub(crate) fn exponent_degree(ctx: &VarContext, e: &[u32]) -> MultiDegree {
    MultiDegree(
        (0..ctx.num_blocks())
            .map(|b| e[ctx.block_range(b)].iter().map(|&k| k as i64).sum())
            .collect(),
    )
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Without a context, name every variable as a single block.
        let ctx = VarContext {
            blocks: vec![self.nvars.max(1)],
        };
        f.write_str(&self.to_text(&ctx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, q_int};

    fn ctx21() -> VarContext {
        VarContext::product(2, 1).unwrap()
    }

    #[test]
    fn exact_division_roundtrip() {
        let ctx = ctx21();
        let a = parse_poly("x0*y1 - x1*y0 + 2*x2*y1", &ctx).unwrap();
        let b = parse_poly("3*x0 - x2", &ctx).unwrap();
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&b).unwrap(), a);
        assert_eq!(prod.exact_div(&a).unwrap(), b);
        assert!(a.exact_div(&b).is_none());
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        let ctx = ctx21();
        assert_eq!(
            Polynomial::zero(5).multidegree(&ctx),
            Err(AlgebraError::ZeroPolynomial)
        );
    }

    #[test]
    fn evaluate_at_rational_point() {
        let ctx = ctx21();
        let p = parse_poly("x0*y1 - x1*y0", &ctx).unwrap();
        let pt: Vec<Q> = [1, 2, 0, 3, 5].iter().map(|&v| q_int(v)).collect();
        assert_eq!(p.evaluate(&pt), q_int(5 - 6));
    }

    #[test]
    fn printer_emits_grammar() {
        let ctx = ctx21();
        let p = parse_poly("-x1 + 3/2*x0*x1^2 - 1", &ctx).unwrap();
        assert_eq!(p.to_text(&ctx), "3/2*x0*x1^2 - x1 - 1");
        let q = parse_poly("-x0", &ctx).unwrap();
        assert_eq!(q.to_text(&ctx), "-x0");
    }
}

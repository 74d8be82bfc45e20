//! Recursive-descent parser for polynomial entries.
//!
//! ```text
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := atom ('^' uint)*
//! atom     := rational | var | '(' expr ')'
//! rational := ['-'] uint ['/' uint]
//! var      := ('x'|'y'|'z') uint
//! ```
//!
//! `z1..z{n+1}` name the coordinates of a single projective block (so `z1`
//! is `x0`). Whitespace is insignificant.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{AlgebraError, Polynomial, VarContext};

/// Parses `text` into an exact polynomial over the variables of `ctx`.
pub fn parse_poly(text: &str, ctx: &VarContext) -> Result<Polynomial, AlgebraError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        ctx,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a VarContext,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> AlgebraError {
        AlgebraError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial, AlgebraError> {
        let nvars = self.ctx.num_vars();
        let mut negate = false;
        match self.peek() {
            Some(b'-') => {
                negate = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        debug_assert_eq!(acc.nvars(), nvars);
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, AlgebraError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, AlgebraError> {
        let mut base = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let k = self.uint()?;
            let k: u32 = k
                .try_into()
                .map_err(|_| AlgebraError::Syntax {
                    pos: start,
                    msg: "exponent too large".into(),
                })?;
            base = base.pow(k);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, AlgebraError> {
        let nvars = self.ctx.num_vars();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    return Err(self.error("expected a number after `-`"));
                }
                let r = self.rational()?;
                Ok(Polynomial::constant(nvars, -r))
            }
            Some(c) if c.is_ascii_digit() => {
                let r = self.rational()?;
                Ok(Polynomial::constant(nvars, r))
            }
            Some(c) if c.is_ascii_alphabetic() => self.variable(),
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<BigInt, AlgebraError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an unsigned integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit string"))
    }

    fn rational(&mut self) -> Result<BigRational, AlgebraError> {
        let num = self.uint()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let den = self.uint()?;
            if den.is_zero() {
                return Err(AlgebraError::Syntax {
                    pos: at,
                    msg: "zero denominator".into(),
                });
            }
            return Ok(BigRational::new(num, den));
        }
        Ok(BigRational::from_integer(num))
    }

    fn variable(&mut self) -> Result<Polynomial, AlgebraError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        let unknown = || AlgebraError::UnknownVariable {
            name: name.to_string(),
            pos: start,
        };
        let (letter, digits) = name.split_at(1);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(unknown());
        }
        let idx: usize = digits.parse().map_err(|_| unknown())?;
        let global = match letter {
            "x" if idx < self.ctx.block_size(0) => idx,
            "y" if self.ctx.num_blocks() == 2 && idx < self.ctx.block_size(1) => {
                self.ctx.block_range(1).start + idx
            }
            "z" if self.ctx.num_blocks() == 1 && idx >= 1 && idx <= self.ctx.block_size(0) => {
                idx - 1
            }
            _ => return Err(unknown()),
        };
        Ok(Polynomial::var(self.ctx.num_vars(), global))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{MultiDegree, Q};

    fn ctx21() -> VarContext {
        VarContext::product(2, 1).unwrap()
    }

    #[test]
    fn bilinear_entry() {
        let p = parse_poly("x0*y1 - x1*y0", &ctx21()).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.multidegree(&ctx21()).unwrap(), MultiDegree::new(vec![1, 1]));
    }

    #[test]
    fn rational_coefficient() {
        let p = parse_poly("3/2*x0*x1^2", &ctx21()).unwrap();
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.coefficient(&[1, 2, 0, 0, 0]), Q::new(3.into(), 2.into()));
        assert_eq!(p.multidegree(&ctx21()).unwrap(), MultiDegree::new(vec![3, 0]));
    }

    #[test]
    fn non_homogeneous_parses_but_has_no_degree() {
        let ctx = ctx21();
        let p = parse_poly("x0^2 + y0", &ctx).unwrap();
        let mut degs: Vec<_> = p.term_degrees(&ctx).collect();
        degs.sort();
        assert_eq!(
            degs,
            vec![MultiDegree::new(vec![0, 1]), MultiDegree::new(vec![2, 0])]
        );
        assert!(matches!(
            p.multidegree(&ctx),
            Err(AlgebraError::NotHomogeneous { .. })
        ));
    }

    #[test]
    fn z_aliases_single_block_one_indexed() {
        let ctx = VarContext::projective(3).unwrap();
        let p = parse_poly("z1 - 2*z4", &ctx).unwrap();
        assert_eq!(p, parse_poly("x0 - 2*x3", &ctx).unwrap());
        assert!(matches!(
            parse_poly("z0", &ctx),
            Err(AlgebraError::UnknownVariable { .. })
        ));
        assert!(matches!(
            parse_poly("z1", &ctx21()),
            Err(AlgebraError::UnknownVariable { .. })
        ));
    }

    #[test]
    fn errors_carry_positions() {
        let ctx = ctx21();
        assert_eq!(
            parse_poly("x0 + * y1", &ctx),
            Err(AlgebraError::Syntax {
                pos: 5,
                msg: "unexpected `*`".into()
            })
        );
        assert_eq!(
            parse_poly("x0 + w3", &ctx),
            Err(AlgebraError::UnknownVariable {
                name: "w3".into(),
                pos: 5
            })
        );
        assert!(matches!(parse_poly("x3", &ctx), Err(AlgebraError::UnknownVariable { .. })));
        assert!(matches!(parse_poly("(x0", &ctx), Err(AlgebraError::Syntax { .. })));
        assert!(matches!(parse_poly("1/0", &ctx), Err(AlgebraError::Syntax { .. })));
    }

    #[test]
    fn powers_and_parentheses() {
        let ctx = ctx21();
        let a = parse_poly("(x0 + y0)^2", &ctx).unwrap();
        let b = parse_poly("x0^2 + 2*x0*y0 + y0^2", &ctx).unwrap();
        assert_eq!(a, b);
        let c = parse_poly("x0 * -3", &ctx).unwrap();
        assert_eq!(c, parse_poly("-3*x0", &ctx).unwrap());
    }
}

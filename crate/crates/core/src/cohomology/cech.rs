//! Čech monomial bases of line-bundle cohomology and the matrices of maps
//! between sums of line bundles induced on them.
//!
//! On `P^n`, `H^0(O(c))` has the basis of monomials of degree `c` and
//! `H^n(O(c))` the basis of Laurent monomials of degree `c` with every
//! exponent `≤ -1`. On a product the classes are tensor products, one type
//! per choice of factors in top degree. Multiplying a class by a monomial
//! gives either another basis class or zero.

use std::collections::HashMap;

use num_traits::Zero;

use crate::algebra::{MultiDegree, PolyMatrix, QMatrix, VarContext};

/// A basis class of `H^p` of one copy of a line-bundle sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub copy: usize,
    pub exponent: Vec<i64>,
}

/// Monomials of degree `total` in `len` variables, with the first exponent
/// decreasing.
fn nonneg_monomials(len: usize, total: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    if total < 0 {
        return out;
    }
    let mut cur = vec![0; len];
    fn rec(i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
    }
    rec(0, total, &mut cur, &mut out);
    out
}

/// Exponent patterns of one block of `len` variables in degree `c`, in
/// global or top cohomology.
fn block_basis(len: usize, c: i64, top: bool) -> Vec<Vec<i64>> {
    if top {
        // e_i = -1 - f_i with f ≥ 0 and Σ f = -c - len
        nonneg_monomials(len, -c - len as i64)
            .into_iter()
            .map(|f| f.into_iter().map(|x| -1 - x).collect())
            .collect()
    } else {
        nonneg_monomials(len, c)
    }
}

/// Basis of `H^p(O(c))` as full exponent vectors. Types are ordered by the
/// bitmask of factors in top degree, classes inside a type with the first
/// exponent decreasing (x-block before y-block).
pub fn cohomology_basis(ctx: &VarContext, c: &MultiDegree, p: usize) -> Vec<Vec<i64>> {
    let blocks = ctx.num_blocks();
    let mut out = Vec::new();
    for mask in 0..(1usize << blocks) {
        let deg: usize = (0..blocks)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| ctx.block_size(b) - 1)
            .sum();
        if deg != p {
            continue;
        }
        let mut partial: Vec<Vec<i64>> = vec![Vec::new()];
        for b in 0..blocks {
            let pieces = block_basis(ctx.block_size(b), c.parts()[b], mask >> b & 1 == 1);
            partial = partial
                .iter()
                .flat_map(|head| {
                    pieces.iter().map(move |tail| {
                        let mut v = head.clone();
                        v.extend_from_slice(tail);
                        v
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

/// Basis of `H^p` of a sum with the given expanded degrees.
fn sum_basis(ctx: &VarContext, degrees: &[MultiDegree], twist: &MultiDegree, p: usize) -> Vec<BasisElement> {
    degrees
        .iter()
        .enumerate()
        .flat_map(|(copy, d)| {
            cohomology_basis(ctx, &(d + twist), p)
                .into_iter()
                .map(move |exponent| BasisElement { copy, exponent })
        })
        .collect()
}

/// Matrix of `H^p(source(twist)) → H^p(target(twist))` induced by `map`,
/// where the source is the sum of column degrees and the target the sum of
/// row degrees. Rows and columns are indexed by (copy, basis class).
pub fn cohomology_map(map: &PolyMatrix, twist: &MultiDegree, p: usize) -> QMatrix {
    let ctx = map.ctx();
    let src = sum_basis(ctx, map.col_degrees(), twist, p);
    let tgt = sum_basis(ctx, map.row_degrees(), twist, p);
    let index: HashMap<&BasisElement, usize> = tgt.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut out = QMatrix::zeros(tgt.len(), src.len());
    let mut probe = BasisElement {
        copy: 0,
        exponent: Vec::new(),
    };
    for (col, s) in src.iter().enumerate() {
        for row_copy in 0..map.rows() {
            let entry = map.get(row_copy, s.copy);
            if entry.is_zero() {
                continue;
            }
            for (u, coef) in entry.terms() {
                probe.copy = row_copy;
                probe.exponent.clear();
                probe
                    .exponent
                    .extend(s.exponent.iter().zip(u).map(|(&e, &k)| e + k as i64));
                if let Some(&row) = index.get(&probe) {
                    debug_assert!(!coef.is_zero());
                    out.add_to(row, col, coef);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::kunneth;

    fn md(v: &[i64]) -> MultiDegree {
        MultiDegree::new(v.to_vec())
    }

    #[test]
    fn basis_sizes_match_kunneth() {
        let ctx = VarContext::product(2, 1).unwrap();
        for a in -5..=3 {
            for b in -4..=3 {
                let v = kunneth(2, 1, &md(&[a, b]));
                for p in 0..=3 {
                    assert_eq!(cohomology_basis(&ctx, &md(&[a, b]), p).len() as u64, v.h(p));
                }
            }
        }
    }

    #[test]
    fn basis_order() {
        let ctx = VarContext::projective(2).unwrap();
        let b = cohomology_basis(&ctx, &md(&[1]), 0);
        assert_eq!(b, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(cohomology_basis(&ctx, &md(&[-3]), 2), vec![vec![-1, -1, -1]]);
    }
}

#![allow(dead_code)]

use linmonad::{LineBundleSum, Monad, MultiDegree, SpaceDescriptor};

pub fn md(v: &[i64]) -> MultiDegree {
    MultiDegree::new(v.to_vec())
}

pub fn sum(parts: &[(&[i64], usize)]) -> LineBundleSum {
    LineBundleSum::new(parts.iter().map(|(d, k)| (md(d), *k)).collect()).unwrap()
}

fn rows(r: &[&[&str]]) -> Vec<Vec<String>> {
    r.iter().map(|row| row.iter().map(|s| s.to_string()).collect()).collect()
}

/// `O -> O(1,0)^2 + O(0,1)^2 -> O(1,1)` on `P^2 x P^1`.
pub fn p2xp1() -> Monad {
    Monad::from_text(
        SpaceDescriptor::Product { n: 2, m: 1 },
        [
            sum(&[(&[0, 0], 1)]),
            sum(&[(&[1, 0], 2), (&[0, 1], 2)]),
            sum(&[(&[1, 1], 1)]),
        ],
        &rows(&[&["x0"], &["x1"], &["y0"], &["y1"]]),
        &rows(&[&["y0", "y1", "-x0", "-x1"]]),
    )
    .unwrap()
}

/// The pencil `α = (z1, z2, λ z3, λ z4)^T`, `β = (-z2, z1, -z4, z3)` on `P^3`.
pub fn family(lambda: &str) -> Monad {
    let l3 = format!("({lambda})*z3");
    let l4 = format!("({lambda})*z4");
    Monad::from_text(
        SpaceDescriptor::Projective { n: 3 },
        [sum(&[(&[-1], 1)]), sum(&[(&[0], 4)]), sum(&[(&[1], 1)])],
        &rows(&[&["z1"], &["z2"], &[&l3], &[&l4]]),
        &rows(&[&["-z2", "z1", "-z4", "z3"]]),
    )
    .unwrap()
}

/// `0 -> O^2 -> 0`: `E = O^2`, with empty outer terms.
pub fn trivial(n: usize) -> Monad {
    Monad::from_text::<&str>(
        SpaceDescriptor::Projective { n },
        [LineBundleSum::empty(), sum(&[(&[0], 2)]), LineBundleSum::empty()],
        &[vec![], vec![]],
        &[],
    )
    .unwrap()
}

use linmonad::{PolyMatrix, Polynomial, VarContext};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

/// Exponent vectors of total degree `d` in `len` variables.
pub fn compositions(len: usize, d: i64) -> Vec<Vec<u32>> {
    if d < 0 {
        return Vec::new();
    }
    if len == 1 {
        return vec![vec![d as u32]];
    }
    let mut out = Vec::new();
    for e in (0..=d).rev() {
        for mut tail in compositions(len - 1, d - e) {
            tail.insert(0, e as u32);
            out.push(tail);
        }
    }
    out
}

/// Monomials of multidegree `deg` in `ctx`.
pub fn monomials(ctx: &VarContext, deg: &MultiDegree) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for b in 0..ctx.num_blocks() {
        let pieces = compositions(ctx.block_size(b), deg.parts()[b]);
        out = out
            .iter()
            .flat_map(|h| {
                pieces.iter().map(move |t| {
                    let mut v: Vec<u32> = h.clone();
                    v.extend(t);
                    v
                })
            })
            .collect();
    }
    out
}

/// Random homogeneous polynomial with small integer coefficients; roughly
/// `zero_bias` of the monomials are dropped.
pub fn random_poly<R: Rng>(rng: &mut R, ctx: &VarContext, deg: &MultiDegree, zero_bias: f64) -> Polynomial {
    let n = ctx.num_vars();
    let mut terms = Vec::new();
    for e in monomials(ctx, deg) {
        if rng.random_bool(zero_bias) {
            continue;
        }
        let c = rng.random_range(-3i64..=3);
        terms.push((e, BigRational::from_integer(BigInt::from(c))));
    }
    Polynomial::from_terms(n, terms)
}

pub fn random_matrix<R: Rng>(
    rng: &mut R,
    ctx: &VarContext,
    rows: &[MultiDegree],
    cols: &[MultiDegree],
    zero_bias: f64,
) -> PolyMatrix {
    let entries = rows
        .iter()
        .map(|r| cols.iter().map(|c| random_poly(rng, ctx, &(r - c), zero_bias)).collect())
        .collect();
    PolyMatrix::new(ctx.clone(), rows.to_vec(), cols.to_vec(), entries).unwrap()
}

//! Shared fixtures for the benchmarks.

use linmonad::{LineBundleSum, Monad, MultiDegree, SpaceDescriptor};

fn sum(parts: &[(&[i64], usize)]) -> LineBundleSum {
    LineBundleSum::new(parts.iter().map(|(d, k)| (MultiDegree::new(d.to_vec()), *k)).collect())
        .expect("valid summands")
}

/// `O -> O(1,0)^2 + O(0,1)^2 -> O(1,1)` on `P^2 x P^1`.
pub fn p2xp1() -> Monad {
    Monad::from_text(
        SpaceDescriptor::Product { n: 2, m: 1 },
        [sum(&[(&[0, 0], 1)]), sum(&[(&[1, 0], 2), (&[0, 1], 2)]), sum(&[(&[1, 1], 1)])],
        &[vec!["x0"], vec!["x1"], vec!["y0"], vec!["y1"]],
        &[vec!["y0", "y1", "-x0", "-x1"]],
    )
    .expect("valid monad")
}

/// `α = (z1, z2, λ z3, λ z4)^T` on `P^3`.
pub fn family(lambda: &str) -> Monad {
    let l3 = format!("({lambda})*z3");
    let l4 = format!("({lambda})*z4");
    Monad::from_text(
        SpaceDescriptor::Projective { n: 3 },
        [sum(&[(&[-1], 1)]), sum(&[(&[0], 4)]), sum(&[(&[1], 1)])],
        &[vec!["z1"], vec!["z2"], vec![l3.as_str()], vec![l4.as_str()]],
        &[vec!["-z2", "z1", "-z4", "z3"]],
    )
    .expect("valid monad")
}

pub fn divisor(d: &[i64]) -> MultiDegree {
    MultiDegree::new(d.to_vec())
}

mod common;

use common::*;
use linmonad::cohomology::{bott, critical_twists, halfspace_vanishing, kunneth, sum_cohomology};
use linmonad::{HalfSpace, LineBundleSum, MultiDegree, SpaceDescriptor, VarContext};
use num_rational::Rational64;
use proptest::prelude::*;

/// `C(n+k, n)` as a polynomial in `k`.
fn euler_oracle(n: usize, k: i64) -> i64 {
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for i in 1..=n as i128 {
        num *= k as i128 + i;
        den *= i;
    }
    (num / den) as i64
}

#[test]
fn serre_duality_on_projective_space() {
    for n in 1..=4 {
        for k in -10..=10 {
            let a = bott(n, k);
            let b = bott(n, -k - n as i64 - 1);
            for q in 0..=n {
                assert_eq!(a.h(q), b.h(n - q), "n={n} k={k} q={q}");
            }
        }
    }
}

#[test]
fn euler_characteristic_is_the_binomial_polynomial() {
    for n in 1..=4 {
        for k in -10..=10 {
            assert_eq!(bott(n, k).euler(), euler_oracle(n, k), "n={n} k={k}");
        }
    }
}

#[test]
fn sections_count_monomials() {
    for n in 1..=4 {
        let ctx = VarContext::projective(n).unwrap();
        for k in 0..=6 {
            let count = monomials(&ctx, &md(&[k])).len() as u64;
            assert_eq!(bott(n, k).h(0), count);
        }
    }
    let ctx = VarContext::product(2, 1).unwrap();
    for a in 0..=4 {
        for b in 0..=4 {
            assert_eq!(kunneth(2, 1, &md(&[a, b])).h(0), monomials(&ctx, &md(&[a, b])).len() as u64);
        }
    }
}

/// For `q1 + q2 < 0` the only cohomology below the top degree is
/// `H^n(O(q1)) ⊗ H^0(O(q2))` or its mirror; it vanishes once both entries
/// are at least `-n` and `-m`.
#[test]
fn negative_total_degree_kills_lower_cohomology() {
    for n in 1..=3 {
        for m in 1..=3 {
            for q1 in -6..=6i64 {
                for q2 in -6..=6i64 {
                    if q1 + q2 >= 0 {
                        continue;
                    }
                    let s = LineBundleSum::single(md(&[q1, q2]), 3);
                    let v = sum_cohomology(&SpaceDescriptor::Product { n, m }, &s, &md(&[0, 0])).unwrap();
                    let first = q1 <= -(n as i64) - 1 && q2 >= 0;
                    let second = q2 <= -(m as i64) - 1 && q1 >= 0;
                    for p in 0..n + m {
                        let expected = if p == n && first {
                            3 * bott(n, q1).h(n) * bott(m, q2).h(0)
                        } else if p == m && second {
                            3 * bott(n, q1).h(0) * bott(m, q2).h(m)
                        } else {
                            0
                        };
                        assert_eq!(v.h(p), expected, "n={n} m={m} q=({q1},{q2}) p={p}");
                    }
                    if q1 >= -(n as i64) && q2 >= -(m as i64) {
                        assert!((0..n + m).all(|p| v.h(p) == 0));
                    }
                }
            }
        }
    }
}

#[test]
fn no_intermediate_cohomology() {
    for n in 1..=4 {
        for k in -10..=10 {
            let v = bott(n, k);
            for i in 1..n {
                assert_eq!(v.h(i), 0);
            }
        }
    }
    for n in 1..=3 {
        for m in 1..=n {
            for k in -10..=10 {
                let v = kunneth(n, m, &md(&[k, k]));
                for i in 1..n + m {
                    assert_eq!(v.h(i), 0, "P^{n} x P^{m}, k={k}, i={i}");
                }
            }
        }
    }
}

fn arb_sum(blocks: usize) -> impl Strategy<Value = LineBundleSum> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, blocks), 1usize..=3), 1..=4)
        .prop_map(|parts| LineBundleSum::new(parts.into_iter().map(|(d, k)| (MultiDegree::new(d), k)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vanishing_iff_no_critical_twist(
        s in arb_sum(2),
        w in (1i64..=4, 1i64..=4),
        t in -6i64..=6,
    ) {
        let space = SpaceDescriptor::Product { n: 2, m: 1 };
        let h = HalfSpace::new(vec![Rational64::from(w.0), Rational64::from(w.1)], Rational64::from(t)).unwrap();
        let v = halfspace_vanishing(&space, &s, &h, 0).unwrap();
        let crit = critical_twists(&space, &s, &h).unwrap();
        prop_assert_eq!(v.holds, crit.is_empty());
        // Every critical twist lies in the half-space and carries sections.
        for p in &crit {
            prop_assert!(h.contains(p));
            prop_assert!(sum_cohomology(&space, &s, p).unwrap().h(0) > 0);
        }
        if let Some(w) = v.witness {
            prop_assert!(crit.contains(&w));
        }
    }

    #[test]
    fn sections_grow_with_the_twist(
        s in arb_sum(2),
        p in prop::collection::vec(-4i64..=4, 2),
        step in prop::collection::vec(0i64..=3, 2),
    ) {
        let space = SpaceDescriptor::Product { n: 3, m: 2 };
        let p = MultiDegree::new(p);
        let q = &p + &MultiDegree::new(step);
        let a = sum_cohomology(&space, &s, &p).unwrap().h(0);
        let b = sum_cohomology(&space, &s, &q).unwrap().h(0);
        prop_assert!(a <= b);
    }
}

#[test]
fn critical_polytope_examples() {
    let space = SpaceDescriptor::Product { n: 2, m: 1 };
    let h = |w: [i64; 2], t: i64| HalfSpace::new(w.iter().map(|&x| Rational64::from(x)).collect(), Rational64::from(t)).unwrap();
    let s = sum(&[(&[0, 0], 2), (&[-1, 1], 2)]);
    assert_eq!(critical_twists(&space, &s, &h([2, 1], 0)).unwrap(), vec![md(&[0, 0])]);
    let s = sum(&[(&[-1, -1], 1)]);
    assert!(critical_twists(&space, &s, &h([1, 1], 0)).unwrap().is_empty());
    let s = sum(&[(&[0, 0], 1)]);
    assert_eq!(critical_twists(&space, &s, &h([1, 1], 2)).unwrap().len(), 6);
}

mod common;

use common::*;
use linmonad::monad::instanton_p3;
use linmonad::picard::{chern_of_monad, delta_l, slope_and_normalize, TruncatedRing};
use linmonad::{BundleSummary, LineBundleSum, Monad, MultiDegree, Polynomial, SpaceDescriptor};
use num_rational::Rational64;
use proptest::prelude::*;

fn families() -> Vec<SpaceDescriptor> {
    vec![
        SpaceDescriptor::Projective { n: 3 },
        SpaceDescriptor::Product { n: 3, m: 2 },
        SpaceDescriptor::Hirzebruch { a: 2 },
        SpaceDescriptor::Blowup { l: 3 },
    ]
}

fn factorial_ratio(n: i64, m: i64) -> Rational64 {
    // n(n+1)…(n+m+1) / m!
    let num: i64 = (n..=n + m + 1).product();
    let den: i64 = (1..=m).product();
    Rational64::new(num, den)
}

/// `n(n+1)…(n+m+1)/m! · (p1 + (m/n) p2)`.
fn displayed_degree(n: i64, m: i64, p: &MultiDegree) -> Rational64 {
    factorial_ratio(n, m) * (Rational64::from(p.parts()[0]) + Rational64::new(m, n) * p.parts()[1])
}

proptest! {
    #[test]
    fn delta_is_linear(
        which in 0usize..4,
        p in prop::collection::vec(-20i64..=20, 4),
        q in prop::collection::vec(-20i64..=20, 4),
    ) {
        let space = &families()[which];
        let l = space.picard_rank();
        let p = MultiDegree::new(p[..l].to_vec());
        let q = MultiDegree::new(q[..l].to_vec());
        prop_assert_eq!(
            delta_l(space, &(&p + &q)).unwrap(),
            delta_l(space, &p).unwrap() + delta_l(space, &q).unwrap()
        );
    }

    #[test]
    fn normalization_bound(
        which in 0usize..4,
        rank in 1i64..=6,
        det in prop::collection::vec(-30i64..=30, 4),
    ) {
        let space = &families()[which];
        let det = MultiDegree::new(det[..space.picard_rank()].to_vec());
        let pol = space.polarization();
        let s = pol.summary(rank, det.clone()).unwrap();
        let (k, n) = slope_and_normalize(space, &s).unwrap();
        let d = pol.d();
        prop_assert!(n.degree <= Rational64::from(0) && n.degree > -d * rank);
        // Twisting back recovers the original degree.
        prop_assert_eq!(n.degree + d * rank * k, s.degree);
        prop_assert_eq!(n.rank, rank);
    }
}

#[test]
fn product_degree_matches_displayed_functional_up_to_scale() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
    for n in 1..=4i64 {
        for m in 1..=n {
            let space = SpaceDescriptor::Product { n: n as usize, m: m as usize };
            let mut ratio: Option<Rational64> = None;
            for _ in 0..50 {
                let p = MultiDegree::new(vec![
                    rand::Rng::random_range(&mut rng, -9..=9),
                    rand::Rng::random_range(&mut rng, -9..=9),
                ]);
                let ours = delta_l(&space, &p).unwrap();
                let theirs = displayed_degree(n, m, &p);
                if theirs == Rational64::from(0) {
                    assert_eq!(ours, Rational64::from(0));
                    continue;
                }
                let r = ours / theirs;
                assert!(r > Rational64::from(0));
                match ratio {
                    None => ratio = Some(r),
                    Some(r0) => assert_eq!(r, r0, "(n,m)=({n},{m}) p={p}"),
                }
            }
        }
    }
}

fn zero_maps(space: SpaceDescriptor, terms: [LineBundleSum; 3]) -> Monad {
    let nv = space.var_context().unwrap().num_vars();
    let z = |r: usize, c: usize| vec![vec![Polynomial::zero(nv); c]; r];
    let alpha = z(terms[1].rank(), terms[0].rank());
    let beta = z(terms[2].rank(), terms[1].rank());
    Monad::from_entries(space, terms, alpha, beta).unwrap()
}

#[test]
fn cyclic_closed_forms() {
    for c in 1..=8i64 {
        let ch = chern_of_monad(&instanton_p3(c as usize)).unwrap();
        assert_eq!(ch.kernel.rank, c + 2);
        assert_eq!(ch.kernel.c1, vec![-c]);
        assert_eq!(ch.kernel.c2, vec![(c * c + c) / 2]);
        assert_eq!(ch.cohomology.rank, 2);
        assert_eq!(ch.cohomology.c1, vec![0]);
        assert_eq!(ch.cohomology.c2, vec![c]);
    }
}

#[test]
fn product_chern_by_hand() {
    // c(E) = (1+h1)^2 (1+h2)^2 / (1+h1+h2) in Z[h1,h2]/(h1^3, h2^2).
    let ch = chern_of_monad(&p2xp1()).unwrap();
    let ring = TruncatedRing::new(vec![2, 1]);
    let deg1 = ring.monomials_of_degree(1);
    let deg2 = ring.monomials_of_degree(2);
    let at = |basis: &[Vec<usize>], v: &[i64], e: &[usize]| v[basis.iter().position(|b| b.as_slice() == e).unwrap()];
    assert_eq!(ch.cohomology.rank, 2);
    assert_eq!(at(&deg1, &ch.cohomology.c1, &[1, 0]), 1);
    assert_eq!(at(&deg1, &ch.cohomology.c1, &[0, 1]), 1);
    // c2 = (h1^2 + 4 h1 h2) - (2h1+2h2)(h1+h2) + (h1+h2)^2 = 2 h1 h2
    assert_eq!(at(&deg2, &ch.cohomology.c2, &[2, 0]), 0);
    assert_eq!(at(&deg2, &ch.cohomology.c2, &[1, 1]), 2);
    let s: BundleSummary = SpaceDescriptor::Product { n: 2, m: 1 }
        .polarization()
        .summary(2, ch.cohomology.det())
        .unwrap();
    // L^2 = 2 h1 h2 + h1^2 on the top class h1^2 h2 gives weights (2, 1).
    assert_eq!(s.degree, Rational64::from(3));
    let twisted = SpaceDescriptor::Product { n: 2, m: 1 }
        .polarization()
        .summary(2, &ch.cohomology.det() - &md(&[2, 0]))
        .unwrap();
    assert_eq!(twisted.degree, Rational64::from(-1));
}

#[test]
fn product_monad_degrees_are_proportional() {
    for (n, m) in [(1usize, 1usize), (2, 1), (3, 1), (2, 2), (3, 2)] {
        let space = SpaceDescriptor::Product { n, m };
        let (nn, mm) = (n as i64, m as i64);
        let konst = factorial_ratio(nn, mm);
        let mut ratio: Option<Rational64> = None;
        let mut check = |ours: Rational64, theirs: Rational64| {
            if theirs == Rational64::from(0) {
                assert_eq!(ours, Rational64::from(0));
                return;
            }
            let r = ours / theirs;
            assert!(r > Rational64::from(0));
            assert_eq!(*ratio.get_or_insert(r), r, "(n,m)=({n},{m})");
        };
        for a in 0..=4i64 {
            for c in 0..=2 + 2 * a {
                let b = 2 + 2 * a - c;
                let mut mid = Vec::new();
                if b > 0 {
                    mid.push((md(&[0, 0]), b as usize));
                }
                if c > 0 {
                    mid.push((md(&[-1, 1]), c as usize));
                }
                let outer = |d: &[i64]| {
                    if a > 0 {
                        LineBundleSum::single(md(d), a as usize)
                    } else {
                        LineBundleSum::empty()
                    }
                };
                let monad = zero_maps(
                    space.clone(),
                    [outer(&[-1, 0]), LineBundleSum::new(mid).unwrap(), outer(&[0, 1])],
                );
                let ch = chern_of_monad(&monad).unwrap();
                assert_eq!(ch.kernel.rank, a + 2);
                assert_eq!(ch.cohomology.rank, 2);
                let pol = space.polarization();
                let deg_k = pol.delta(&ch.kernel.det()).unwrap();
                let deg_e = pol.delta(&ch.cohomology.det()).unwrap();
                let q = Rational64::new(mm, nn);
                let (ar, cr) = (Rational64::from(a), Rational64::from(c));
                check(deg_k, konst * ((q - 1) * cr - q * ar));
                check(deg_e, konst * (Rational64::from(1) - q) * (ar - cr));
            }
        }
        assert!(ratio.is_some());
    }
}

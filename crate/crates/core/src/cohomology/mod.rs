//! Cohomology of line bundles and their sums on `P^n` and `P^n x P^m`,
//! exterior powers of sums, and vanishing over half-spaces of twists.

mod cech;

pub use cech::{cohomology_basis, cohomology_map, BasisElement};

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::MultiDegree;
use crate::picard::SpaceDescriptor;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("cohomology is not available on {0}")]
    UnsupportedSpace(String),
    #[error("half-space certificates exist only for h^0 and h^1, not h^{0}")]
    UnsupportedIndex(usize),
    #[error("exterior power {s} of a sum of rank {rank}")]
    PowerOutOfRange { s: usize, rank: usize },
    #[error("degree {found} does not match Picard rank {expected}")]
    LengthMismatch { expected: usize, found: MultiDegree },
    #[error("half-space weights must be positive")]
    NonPositiveWeights,
    #[error("zero multiplicity for O{0}")]
    ZeroMultiplicity(MultiDegree),
}

/// One term `O(degree)^{⊕multiplicity}` of a [`LineBundleSum`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Summand {
    pub degree: MultiDegree,
    pub multiplicity: usize,
}

/// Ordered direct sum of line bundles. The order fixes the row and column
/// order of the monad maps; [`LineBundleSum::canonical`] forgets it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LineBundleSum {
    summands: Vec<Summand>,
}

impl LineBundleSum {
    pub fn new(parts: Vec<(MultiDegree, usize)>) -> Result<Self, CohomologyError> {
        let mut summands = Vec::with_capacity(parts.len());
        for (degree, multiplicity) in parts {
            if multiplicity == 0 {
                return Err(CohomologyError::ZeroMultiplicity(degree));
            }
            summands.push(Summand {
                degree,
                multiplicity,
            });
        }
        Ok(Self { summands })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// A single line bundle `O(d)^{⊕k}`.
    pub fn single(d: MultiDegree, k: usize) -> Self {
        Self::new(vec![(d, k)]).expect("positive multiplicity")
    }

    /// Groups consecutive equal degrees of an expanded list.
    pub fn from_expanded(degrees: &[MultiDegree]) -> Self {
        let mut summands: Vec<Summand> = Vec::new();
        for d in degrees {
            match summands.last_mut() {
                Some(s) if &s.degree == d => s.multiplicity += 1,
                _ => summands.push(Summand {
                    degree: d.clone(),
                    multiplicity: 1,
                }),
            }
        }
        Self { summands }
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiDegree, &usize)> {
        self.summands.iter().map(|s| (&s.degree, &s.multiplicity))
    }

    pub fn rank(&self) -> usize {
        self.summands.iter().map(|s| s.multiplicity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// One degree per line-bundle copy, in order.
    pub fn expanded(&self) -> Vec<MultiDegree> {
        self.summands
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.degree.clone(), s.multiplicity))
            .collect()
    }

    /// Merged multiplicities, sorted by degree.
    pub fn canonical(&self) -> Self {
        let mut merged: BTreeMap<MultiDegree, usize> = BTreeMap::new();
        for s in &self.summands {
            *merged.entry(s.degree.clone()).or_default() += s.multiplicity;
        }
        Self {
            summands: merged
                .into_iter()
                .map(|(degree, multiplicity)| Summand {
                    degree,
                    multiplicity,
                })
                .collect(),
        }
    }

    pub fn twist(&self, p: &MultiDegree) -> Self {
        Self {
            summands: self
                .summands
                .iter()
                .map(|s| Summand {
                    degree: &s.degree + p,
                    multiplicity: s.multiplicity,
                })
                .collect(),
        }
    }

    pub fn dual(&self) -> Self {
        Self {
            summands: self
                .summands
                .iter()
                .map(|s| Summand {
                    degree: -&s.degree,
                    multiplicity: s.multiplicity,
                })
                .collect(),
        }
    }

    /// Sum of all degrees weighted by multiplicity, i.e. `c1`.
    pub fn det(&self, len: usize) -> MultiDegree {
        let mut acc = MultiDegree::zero(len);
        for s in &self.summands {
            acc = &acc + &s.degree.scale(s.multiplicity as i64);
        }
        acc
    }
}

impl std::fmt::Display for LineBundleSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .summands
            .iter()
            .map(|s| match s.multiplicity {
                1 => format!("O{}", s.degree),
                k => format!("O{}^{k}", s.degree),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `(h^0, …, h^dim)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CohomVector(pub Vec<u64>);

impl CohomVector {
    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim + 1])
    }

    pub fn h(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    /// `Σ (-1)^i h^i`.
    pub fn euler(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &v)| if i % 2 == 0 { v as i64 } else { -(v as i64) })
            .sum()
    }

    fn add_scaled(&mut self, other: &Self, k: u64) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b * k;
        }
    }
}

impl std::fmt::Display for CohomVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub(crate) fn binom_u64(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// Bott formula for `O(k)` on `P^n`.
pub fn bott(n: usize, k: i64) -> CohomVector {
    let mut v = CohomVector::zero(n);
    let n64 = n as i64;
    if k >= 0 {
        v.0[0] = binom_u64((n64 + k) as u64, n as u64);
    }
    if k <= -n64 - 1 {
        v.0[n] = binom_u64((-k - 1) as u64, n as u64);
    }
    v
}

/// Künneth formula for `O(q1, q2)` on `P^n x P^m`.
pub fn kunneth(n: usize, m: usize, q: &MultiDegree) -> CohomVector {
    let a = bott(n, q.parts()[0]);
    let b = bott(m, q.parts()[1]);
    let mut v = CohomVector::zero(n + m);
    for (i, &x) in a.0.iter().enumerate() {
        for (j, &y) in b.0.iter().enumerate() {
            v.0[i + j] += x * y;
        }
    }
    v
}

/// Projective dimensions of the factors of a coordinate space.
pub(crate) fn factor_dims(space: &SpaceDescriptor) -> Result<Vec<usize>, CohomologyError> {
    match *space {
        SpaceDescriptor::Projective { n } => Ok(vec![n]),
        SpaceDescriptor::Product { n, m } => Ok(vec![n, m]),
        _ => Err(CohomologyError::UnsupportedSpace(space.to_string())),
    }
}

fn check_len(dims: &[usize], p: &MultiDegree) -> Result<(), CohomologyError> {
    if p.len() != dims.len() {
        return Err(CohomologyError::LengthMismatch {
            expected: dims.len(),
            found: p.clone(),
        });
    }
    Ok(())
}

/// Cohomology of a single line bundle `O(a)`.
pub fn line_cohomology(space: &SpaceDescriptor, a: &MultiDegree) -> Result<CohomVector, CohomologyError> {
    let dims = factor_dims(space)?;
    check_len(&dims, a)?;
    Ok(match dims.as_slice() {
        [n] => bott(*n, a.parts()[0]),
        [n, m] => kunneth(*n, *m, a),
        _ => unreachable!("at most two factors"),
    })
}

/// Cohomology of `S ⊗ O(twist)`.
pub fn sum_cohomology(
    space: &SpaceDescriptor,
    s: &LineBundleSum,
    twist: &MultiDegree,
) -> Result<CohomVector, CohomologyError> {
    let dims = factor_dims(space)?;
    check_len(&dims, twist)?;
    let mut acc = CohomVector::zero(dims.iter().sum());
    for (d, &k) in s.iter() {
        let v = line_cohomology(space, &(d + twist))?;
        acc.add_scaled(&v, k as u64);
    }
    Ok(acc)
}

/// Line-bundle decomposition of `Λ^s S`, in canonical form.
pub fn exterior_summands(s_sum: &LineBundleSum, s: usize) -> Result<LineBundleSum, CohomologyError> {
    let canon = s_sum.canonical();
    let rank = canon.rank();
    if s > rank {
        return Err(CohomologyError::PowerOutOfRange { s, rank });
    }
    let len = canon
        .summands()
        .first()
        .map_or(0, |x| x.degree.len());
    let mut out: BTreeMap<MultiDegree, usize> = BTreeMap::new();
    // Choose k_i copies from the i-th distinct summand, Σ k_i = s.
    fn rec(
        parts: &[Summand],
        i: usize,
        left: usize,
        deg: MultiDegree,
        count: u64,
        out: &mut BTreeMap<MultiDegree, usize>,
    ) {
        if i == parts.len() {
            if left == 0 {
                *out.entry(deg).or_default() += count as usize;
            }
            return;
        }
        let mult = parts[i].multiplicity;
        for k in 0..=left.min(mult) {
            let d = &deg + &parts[i].degree.scale(k as i64);
            rec(parts, i + 1, left - k, d, count * binom_u64(mult as u64, k as u64), out);
        }
    }
    rec(canon.summands(), 0, s, MultiDegree::zero(len), 1, &mut out);
    Ok(LineBundleSum {
        summands: out
            .into_iter()
            .map(|(degree, multiplicity)| Summand {
                degree,
                multiplicity,
            })
            .collect(),
    })
}

/// The lattice region `{p ∈ ℤ^l : w·p ≤ t}` with `w > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub weights: Vec<Rational64>,
    pub threshold: Rational64,
}

impl HalfSpace {
    pub fn new(weights: Vec<Rational64>, threshold: Rational64) -> Result<Self, CohomologyError> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_positive()) {
            return Err(CohomologyError::NonPositiveWeights);
        }
        Ok(Self { weights, threshold })
    }

    pub fn value(&self, p: &[i64]) -> Rational64 {
        self.weights.iter().zip(p).map(|(w, &x)| w * x).sum()
    }

    pub fn contains(&self, p: &MultiDegree) -> bool {
        self.value(p.parts()) <= self.threshold
    }
}

/// Outcome of [`halfspace_vanishing`]: a `FALSE` answer carries a twist where
/// the cohomology is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vanishing {
    pub holds: bool,
    pub witness: Option<MultiDegree>,
}

/// Decides whether `h^i(S(p)) = 0` for every `p` in `H`, for `i ∈ {0, 1}`.
pub fn halfspace_vanishing(
    space: &SpaceDescriptor,
    s: &LineBundleSum,
    h: &HalfSpace,
    i: usize,
) -> Result<Vanishing, CohomologyError> {
    let dims = factor_dims(space)?;
    if h.weights.len() != dims.len() {
        return Err(CohomologyError::LengthMismatch {
            expected: dims.len(),
            found: MultiDegree::zero(h.weights.len()),
        });
    }
    let mut candidates: Vec<Vec<i64>> = Vec::new();
    for (a, _) in s.iter() {
        check_len(&dims, a)?;
        match i {
            // h^0(O(a+p)) ≠ 0 iff p ≥ -a; the region meets H iff -a ∈ H,
            // and -a is its lexicographically smallest point.
            0 => {
                let p: Vec<i64> = a.parts().iter().map(|x| -x).collect();
                if h.value(&p) <= h.threshold {
                    candidates.push(p);
                }
            }
            // h^1 of a line bundle needs one P^1 factor in degree ≤ -2 and
            // the others in degree ≥ 0. That coordinate is unbounded below,
            // so the region always meets H; the witness puts the other
            // coordinates at their minimum.
            1 => {
                for (f, &dim) in dims.iter().enumerate() {
                    if dim != 1 {
                        continue;
                    }
                    let mut p: Vec<i64> = a.parts().iter().map(|x| -x).collect();
                    let rest: Rational64 = h
                        .weights
                        .iter()
                        .zip(&p)
                        .enumerate()
                        .filter(|(j, _)| *j != f)
                        .map(|(_, (w, &x))| w * x)
                        .sum();
                    let cap = ((h.threshold - rest) / h.weights[f]).floor().to_integer();
                    p[f] = (-2 - a.parts()[f]).min(cap);
                    candidates.push(p);
                }
            }
            other => return Err(CohomologyError::UnsupportedIndex(other)),
        }
    }
    let witness = candidates.into_iter().min().map(MultiDegree::new);
    Ok(Vanishing {
        holds: witness.is_none(),
        witness,
    })
}

/// All lattice points `p ∈ H` with `h^0(S(p)) > 0`.
pub fn critical_twists(
    space: &SpaceDescriptor,
    s: &LineBundleSum,
    h: &HalfSpace,
) -> Result<Vec<MultiDegree>, CohomologyError> {
    let dims = factor_dims(space)?;
    let mut out: BTreeSet<Vec<i64>> = BTreeSet::new();
    for (a, _) in s.iter() {
        check_len(&dims, a)?;
        let lo: Vec<i64> = a.parts().iter().map(|x| -x).collect();
        let budget = h.threshold - h.value(&lo);
        let mut cur = lo.clone();
        enumerate_box(&h.weights, &lo, 0, budget, &mut cur, &mut out);
    }
    Ok(out.into_iter().map(MultiDegree::new).collect())
}

/// Points `lo + e`, `e ≥ 0`, with `w·e ≤ budget`.
fn enumerate_box(
    w: &[Rational64],
    lo: &[i64],
    i: usize,
    budget: Rational64,
    cur: &mut Vec<i64>,
    out: &mut BTreeSet<Vec<i64>>,
) {
    if budget.is_negative() {
        return;
    }
    if i == w.len() {
        out.insert(cur.clone());
        return;
    }
    let mut e = 0i64;
    loop {
        let left = budget - w[i] * e;
        if left.is_negative() {
            break;
        }
        cur[i] = lo[i] + e;
        enumerate_box(w, lo, i + 1, left, cur, out);
        e += 1;
    }
    cur[i] = lo[i];
}

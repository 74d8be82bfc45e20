//! Degrees, slopes, normalization and Chern classes on cyclic and polycyclic
//! spaces.

mod ring;

pub use ring::{RingElement, SerialClass, SerialTerm, TruncatedRing};

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{MultiDegree, VarContext};
use crate::cohomology::LineBundleSum;
use crate::monad::Monad;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PicardError {
    #[error("multidegree {found} has length {}, the Picard rank is {expected}", found.len())]
    LengthMismatch { expected: usize, found: MultiDegree },
    #[error("degree of O(1,0,...,0) is {0}, not positive")]
    NonPositiveD(Rational64),
    #[error("slope of a rank-0 sheaf is undefined")]
    ZeroRank,
    #[error("{0} is not supported on {1}")]
    Unsupported(&'static str, String),
    #[error("invalid space: {0}")]
    Invalid(String),
}

/// The ambient variety, known either by coordinates (`P^n`, `P^n x P^m`) or
/// only by its Picard lattice and polarization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceDescriptor {
    /// `P^n` with `L = O(1)`.
    Projective { n: usize },
    /// `P^n x P^m` with `L = O(1,1)`.
    Product { n: usize, m: usize },
    /// Hirzebruch surface `Σ_a` with `L = O(1, a+1)`.
    Hirzebruch { a: usize },
    /// `P^2` blown up at `l` points with `L = O(-1,…,-1, l+1)`.
    Blowup { l: usize },
}

impl SpaceDescriptor {
    pub fn check(&self) -> Result<(), PicardError> {
        match *self {
            Self::Projective { n } if n < 1 => Err(PicardError::Invalid("P^n needs n >= 1".into())),
            Self::Product { n, m } if n < 1 || m < 1 => {
                Err(PicardError::Invalid("P^n x P^m needs n, m >= 1".into()))
            }
            Self::Blowup { l } if l < 1 => Err(PicardError::Invalid("blow-up needs l >= 1".into())),
            _ => Ok(()),
        }
    }

    pub fn picard_rank(&self) -> usize {
        match *self {
            Self::Projective { .. } => 1,
            Self::Product { .. } | Self::Hirzebruch { .. } => 2,
            Self::Blowup { l } => l + 1,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Self::Projective { n } => n,
            Self::Product { n, m } => n + m,
            Self::Hirzebruch { .. } | Self::Blowup { .. } => 2,
        }
    }

    /// Whether coordinates (and hence monads and cohomology) are available.
    pub fn has_coordinates(&self) -> bool {
        matches!(self, Self::Projective { .. } | Self::Product { .. })
    }

    pub fn var_context(&self) -> Result<VarContext, PicardError> {
        let ctx = match *self {
            Self::Projective { n } => VarContext::projective(n),
            Self::Product { n, m } => VarContext::product(n, m),
            _ => return Err(PicardError::Unsupported("coordinates", self.to_string())),
        };
        ctx.map_err(|e| PicardError::Invalid(e.to_string()))
    }

    /// Chow ring of a coordinate space.
    pub fn ring(&self) -> Result<TruncatedRing, PicardError> {
        match *self {
            Self::Projective { n } => Ok(TruncatedRing::new(vec![n])),
            Self::Product { n, m } => Ok(TruncatedRing::new(vec![n, m])),
            _ => Err(PicardError::Unsupported("Chow ring", self.to_string())),
        }
    }

    /// Multidegree of `-K_X`.
    pub fn anticanonical(&self) -> Option<MultiDegree> {
        match *self {
            Self::Projective { n } => Some(MultiDegree::new(vec![n as i64 + 1])),
            Self::Product { n, m } => Some(MultiDegree::new(vec![n as i64 + 1, m as i64 + 1])),
            _ => None,
        }
    }

    /// Weights `w` with `δ_L(p) = w·p`.
    pub fn weights(&self) -> Vec<i64> {
        match *self {
            Self::Projective { .. } => vec![1],
            Self::Product { n, m } => {
                // δ_L(p) = (h1+h2)^{n+m-1} (p1 h1 + p2 h2), read on h1^n h2^m.
                let ring = TruncatedRing::new(vec![n, m]);
                let l_power = ring.linear(&[1, 1]).pow(n + m - 1);
                let top = [n, m];
                (0..2)
                    .map(|i| {
                        let mut unit = [0i64; 2];
                        unit[i] = 1;
                        l_power.mul(&ring.linear(&unit)).coefficient(&top)
                    })
                    .collect()
            }
            Self::Hirzebruch { .. } => vec![1, 1],
            Self::Blowup { l } => {
                let mut w = vec![1; l + 1];
                w[l] = l as i64 + 1;
                w
            }
        }
    }

    pub fn polarization(&self) -> Polarization {
        Polarization {
            weights: self.weights().into_iter().map(Rational64::from_integer).collect(),
        }
    }
}

impl std::fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Self::Projective { n } => write!(f, "P^{n}"),
            Self::Product { n, m } => write!(f, "P^{n} x P^{m}"),
            Self::Hirzebruch { a } => write!(f, "Hirzebruch(a={a})"),
            Self::Blowup { l } => write!(f, "Blowup(l={l})"),
        }
    }
}

/// The degree functional `δ_L`, possibly rescaled by a positive factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polarization {
    pub weights: Vec<Rational64>,
}

impl Polarization {
    pub fn scaled(&self, k: Rational64) -> Self {
        assert!(k.is_positive(), "degree scale must be positive");
        Self {
            weights: self.weights.iter().map(|w| w * k).collect(),
        }
    }

    pub fn delta(&self, p: &MultiDegree) -> Result<Rational64, PicardError> {
        if p.len() != self.weights.len() {
            return Err(PicardError::LengthMismatch {
                expected: self.weights.len(),
                found: p.clone(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(p.parts())
            .map(|(w, &x)| w * x)
            .sum())
    }

    /// `d = δ_L(1,0,…,0)`.
    pub fn d(&self) -> Rational64 {
        self.weights[0]
    }

    pub fn summary(&self, rank: i64, det: MultiDegree) -> Result<BundleSummary, PicardError> {
        let degree = self.delta(&det)?;
        Ok(BundleSummary {
            rank,
            slope: (rank > 0).then(|| degree / rank),
            det,
            degree,
        })
    }

    /// `k_E = ⌈μ_L/d⌉` and the summary of `E(-k_E,0,…,0)`.
    pub fn slope_and_normalize(&self, b: &BundleSummary) -> Result<(i64, BundleSummary), PicardError> {
        if b.rank <= 0 {
            return Err(PicardError::ZeroRank);
        }
        let d = self.d();
        if !d.is_positive() {
            return Err(PicardError::NonPositiveD(d));
        }
        let mu = b.degree / b.rank;
        let k = (mu / d).ceil().to_integer();
        let mut shift = MultiDegree::zero(b.det.len());
        shift.0[0] = b.rank * k;
        let normalized = self.summary(b.rank, &b.det - &shift)?;
        // The normalized degree lies in (-d·rank, 0]; for integral degrees
        // this is 1 - d·rank <= deg <= 0.
        assert!(
            normalized.degree <= Rational64::zero() && normalized.degree > -d * b.rank,
            "normalization postcondition violated: {normalized:?}"
        );
        Ok((k, normalized))
    }
}

/// `δ_L(p)` for the descriptor's own polarization.
pub fn delta_l(space: &SpaceDescriptor, p: &MultiDegree) -> Result<Rational64, PicardError> {
    space.polarization().delta(p)
}

pub fn slope_and_normalize(
    space: &SpaceDescriptor,
    b: &BundleSummary,
) -> Result<(i64, BundleSummary), PicardError> {
    space.polarization().slope_and_normalize(b)
}

/// Rank, determinant, degree and slope of a sheaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleSummary {
    pub rank: i64,
    pub det: MultiDegree,
    pub degree: Rational64,
    pub slope: Option<Rational64>,
}

/// Rank and the first two Chern classes, each as coefficients on the
/// monomials of [`TruncatedRing::monomials_of_degree`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernData {
    pub rank: i64,
    pub c1: Vec<i64>,
    pub c2: Vec<i64>,
}

impl ChernData {
    fn from_total(ring: &TruncatedRing, rank: i64, total: &RingElement) -> Self {
        let read = |k: usize| {
            ring.monomials_of_degree(k)
                .iter()
                .map(|e| total.coefficient(e))
                .collect()
        };
        Self {
            rank,
            c1: read(1),
            c2: read(2),
        }
    }

    /// The determinant multidegree, i.e. `c1` on the basis `h_1, …, h_l`.
    pub fn det(&self) -> MultiDegree {
        MultiDegree::new(self.c1.clone())
    }
}

/// Total Chern class `Π (1 + a·h)^mult` of a line-bundle sum.
pub fn total_chern(ring: &TruncatedRing, s: &LineBundleSum) -> RingElement {
    let mut acc = ring.one();
    for (deg, mult) in s.iter() {
        let factor = ring.one().add(&ring.linear(deg.parts()));
        acc = acc.mul(&factor.pow(*mult));
    }
    acc
}

/// Chern data of the kernel bundle `K = ker β` and the cohomology `E`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadChern {
    pub kernel: ChernData,
    pub cohomology: ChernData,
}

/// Whitney formula: `c(K) = c(M1)/c(M2)`, `c(E) = c(M1)/(c(M0) c(M2))`.
pub fn chern_of_monad(monad: &Monad) -> Result<MonadChern, PicardError> {
    let ring = monad.space().ring()?;
    let [c0, c1, c2] = monad.terms().map(|t| total_chern(&ring, t));
    let inv2 = c2.inverse().expect("total Chern class has constant term 1");
    let inv0 = c0.inverse().expect("total Chern class has constant term 1");
    let ck = c1.mul(&inv2);
    let ce = ck.mul(&inv0);
    let [r0, r1, r2] = monad.terms().map(|t| t.rank() as i64);
    Ok(MonadChern {
        kernel: ChernData::from_total(&ring, r1 - r2, &ck),
        cohomology: ChernData::from_total(&ring, r1 - r0 - r2, &ce),
    })
}

/// Binomial coefficient for small nonnegative arguments.
#[cfg(test)]
fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(v: &[i64]) -> MultiDegree {
        MultiDegree::new(v.to_vec())
    }

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn delta_examples() {
        let h = SpaceDescriptor::Hirzebruch { a: 1 };
        assert_eq!(delta_l(&h, &md(&[2, 3])).unwrap(), r(5));
        let b = SpaceDescriptor::Blowup { l: 2 };
        assert_eq!(delta_l(&b, &md(&[1, 1, 1])).unwrap(), r(5));
        let p = SpaceDescriptor::Product { n: 2, m: 1 };
        assert_eq!(delta_l(&p, &md(&[1, 0])).unwrap(), r(2));
        assert_eq!(delta_l(&p, &md(&[0, 0])).unwrap(), r(0));
        assert!(matches!(
            delta_l(&p, &md(&[1])),
            Err(PicardError::LengthMismatch { expected: 2, .. })
        ));
    }

    #[test]
    fn product_weights_are_binomials() {
        for n in 1..=4usize {
            for m in 1..=n {
                let w = SpaceDescriptor::Product { n, m }.weights();
                let s = (n + m - 1) as i64;
                assert_eq!(w, vec![binomial(s, n as i64 - 1), binomial(s, n as i64)]);
            }
        }
    }

    #[test]
    fn normalization_examples() {
        let p3 = SpaceDescriptor::Projective { n: 3 };
        let b = p3.polarization().summary(2, md(&[3])).unwrap();
        let (k, norm) = slope_and_normalize(&p3, &b).unwrap();
        assert_eq!((k, norm.degree, norm.det), (2, r(-1), md(&[-1])));

        let p21 = SpaceDescriptor::Product { n: 2, m: 1 };
        let b = p21.polarization().summary(2, md(&[-1, 1])).unwrap();
        assert_eq!(b.degree, r(-1));
        let (k, norm) = slope_and_normalize(&p21, &b).unwrap();
        assert_eq!(k, 0);
        assert_eq!(norm, b);

        let zero = p3.polarization().summary(5, md(&[0])).unwrap();
        assert_eq!(slope_and_normalize(&p3, &zero).unwrap(), (0, zero.clone()));
        let empty = p3.polarization().summary(0, md(&[0])).unwrap();
        assert_eq!(slope_and_normalize(&p3, &empty), Err(PicardError::ZeroRank));
    }

    #[test]
    fn binomial_and_ceil() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 5), 0);
    }
}

//! The degeneration locus `Σ = {z : ker α_z ≠ 0}` and the sheaf class of
//! the monad's cohomology.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Monad, MonadError};
use crate::algebra::modp::{is_prime, next_prime, ModMatrix};
use crate::algebra::{format_rational, AlgebraError, PolyMatrix, Polynomial, QMatrix, Q};

/// Samples drawn from one ChaCha stream before reseeding; fixes the
/// partition of work independently of the thread count.
const BLOCK: usize = 4096;

/// Parameters of the Monte Carlo locus estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingOptions {
    pub seed: u64,
    pub samples: usize,
    pub primes: Vec<u64>,
    /// Minimum confidence for a zero-hit lower bound on the codimension.
    pub confidence: f64,
    pub workers: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            samples: 1_000_000,
            primes: vec![101, 10007],
            confidence: 1.0 - 1e-6,
            workers: 1,
        }
    }
}

/// Codimension of a locus in the ambient space; an empty locus has no
/// codimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Codim {
    Empty,
    Exact(usize),
    /// From zero hits: every codimension below `bound + 1` would have been
    /// seen with probability at least `confidence`.
    AtLeast { bound: usize, confidence: f64 },
}

impl Codim {
    /// Whether the codimension is known to be at least `k` (empty counts as
    /// arbitrarily large).
    pub fn at_least(&self, k: usize) -> bool {
        match *self {
            Self::Empty => true,
            Self::Exact(c) => c >= k,
            Self::AtLeast { bound, .. } => bound >= k,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Self::Empty)
    }
}

impl std::fmt::Display for Codim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Empty => write!(f, "empty"),
            Self::Exact(c) => write!(f, "codim {c}"),
            Self::AtLeast { bound, confidence } => {
                write!(f, "codim >= {bound} (confidence {confidence})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocusMethod {
    ExactLinear,
    MonteCarlo,
}

/// `Σ` for a rank-one source with linear entries: per variable block, the
/// linear equations cut out by the entries and a basis of their common
/// zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactLocus {
    pub equations: Vec<String>,
    pub rank_per_block: Vec<usize>,
    pub span_per_block: Vec<Vec<Vec<String>>>,
    pub codim: Codim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeRun {
    pub requested: u64,
    pub prime: u64,
    pub samples: usize,
    pub hits: usize,
    pub estimate: Codim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub seed: u64,
    pub confidence_threshold: f64,
    pub runs: Vec<PrimeRun>,
    pub combined: Codim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerationReport {
    pub method: LocusMethod,
    pub codim: Codim,
    pub exact: Option<ExactLocus>,
    pub monte_carlo: Option<McReport>,
    /// Present when both branches ran.
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SheafKind {
    LocallyFree,
    Reflexive,
    TorsionFree,
    None,
}

impl std::fmt::Display for SheafKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::LocallyFree => "locally_free",
            Self::Reflexive => "reflexive",
            Self::TorsionFree => "torsion_free",
            Self::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheafClass {
    pub class: SheafKind,
    pub alpha_locus: DegenerationReport,
    pub beta_locus: DegenerationReport,
}

/// Exact locus of a column of linear forms, or `None` outside that case.
pub(crate) fn exact_linear_locus(m: &PolyMatrix) -> Option<ExactLocus> {
    if m.cols() != 1 {
        return None;
    }
    let ctx = m.ctx();
    let nv = ctx.num_vars();
    let nb = ctx.num_blocks();
    let mut rows: Vec<Vec<Vec<Q>>> = vec![Vec::new(); nb];
    for i in 0..m.rows() {
        let p = m.get(i, 0);
        if p.is_zero() {
            continue;
        }
        let d = p.multidegree(ctx).ok()?;
        let b = (0..nb).find(|&b| d.parts()[b] == 1)?;
        if d.parts().iter().sum::<i64>() != 1 {
            return None;
        }
        let range = ctx.block_range(b);
        let mut row = vec![Q::zero(); range.len()];
        for (e, c) in p.terms() {
            let v = range.clone().find(|&v| e[v] == 1).expect("linear term");
            row[v - range.start] = c.clone();
        }
        rows[b].push(row);
    }
    let mut equations = Vec::new();
    let mut ranks = Vec::new();
    let mut spans = Vec::new();
    let mut empty = false;
    for (b, block_rows) in rows.iter().enumerate() {
        let range = ctx.block_range(b);
        let qm = if block_rows.is_empty() {
            QMatrix::zeros(0, range.len())
        } else {
            QMatrix::from_rows(block_rows.clone())
        };
        for r in qm.row_basis() {
            let poly = Polynomial::from_terms(
                nv,
                r.into_iter().enumerate().map(|(k, c)| {
                    let mut e = vec![0; nv];
                    e[range.start + k] = 1;
                    (e, c)
                }),
            );
            equations.push(poly.to_text(ctx));
        }
        let rank = qm.rank();
        empty |= rank == range.len();
        ranks.push(rank);
        spans.push(
            qm.null_space()
                .iter()
                .map(|v| v.iter().map(format_rational).collect())
                .collect(),
        );
    }
    let codim = if empty {
        Codim::Empty
    } else {
        Codim::Exact(ranks.iter().sum())
    };
    Some(ExactLocus {
        equations,
        rank_per_block: ranks,
        span_per_block: spans,
        codim,
    })
}

fn block_seed(seed: u64, prime: u64, block: u64) -> [u8; 32] {
    let mut s = [0u8; 32];
    s[..8].copy_from_slice(&seed.to_le_bytes());
    s[8..16].copy_from_slice(&prime.to_le_bytes());
    s[16..24].copy_from_slice(&block.to_le_bytes());
    s
}

/// Counts sample points where the matrix has rank below `target`.
fn count_hits(mm: &ModMatrix, blocks: &[usize], target: usize, opts: &SamplingOptions) -> usize {
    let q = mm.prime();
    let nblocks = opts.samples.div_ceil(BLOCK);
    let workers = opts.workers.max(1);
    let run_block = |b: usize, point: &mut Vec<u64>, scratch: &mut Vec<u64>| -> usize {
        let mut rng = ChaCha8Rng::from_seed(block_seed(opts.seed, q, b as u64));
        let count = BLOCK.min(opts.samples - b * BLOCK);
        let mut hits = 0;
        for _ in 0..count {
            point.clear();
            for &size in blocks {
                // uniform nonzero vector: uniform projective point
                loop {
                    let start = point.len();
                    point.extend((0..size).map(|_| rng.random_range(0..q)));
                    if point[start..].iter().any(|&v| v != 0) {
                        break;
                    }
                    point.truncate(start);
                }
            }
            if mm.rank_at(point, scratch) < target {
                hits += 1;
            }
        }
        hits
    };
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let run_block = &run_block;
                s.spawn(move || {
                    let mut point = Vec::new();
                    let mut scratch = Vec::new();
                    (w..nblocks)
                        .step_by(workers)
                        .map(|b| run_block(b, &mut point, &mut scratch))
                        .sum::<usize>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sampling worker")).sum()
    })
}

/// `1 - (1 - q^{-b})^N`: the chance of at least one hit in `N` samples if
/// the locus had codimension `b`.
pub fn zero_hit_confidence(q: u64, b: usize, n: usize) -> f64 {
    let p = (q as f64).powi(-(b as i32));
    -((n as f64) * (-p).ln_1p()).exp_m1()
}

fn estimate(q: u64, hits: usize, n: usize, dim: usize, threshold: f64) -> Codim {
    if hits == 0 {
        let mut bound = 0;
        for b in 1..=dim + 1 {
            if zero_hit_confidence(q, b, n) >= threshold {
                bound = b;
            } else {
                break;
            }
        }
        if bound == dim + 1 {
            return Codim::Empty;
        }
        return Codim::AtLeast {
            bound,
            confidence: zero_hit_confidence(q, bound, n),
        };
    }
    let frac = hits as f64 / n as f64;
    let c = (-frac.ln() / (q as f64).ln()).round().max(0.0);
    Codim::Exact(c as usize)
}

/// Monte Carlo estimate of the locus where `m` has rank below `target`.
pub(crate) fn monte_carlo_locus(
    m: &PolyMatrix,
    target: usize,
    opts: &SamplingOptions,
) -> Result<McReport, MonadError> {
    if opts.samples == 0 || opts.primes.is_empty() {
        return Err(MonadError::BadOptions("need samples > 0 and at least one prime".into()));
    }
    if !(opts.confidence > 0.0 && opts.confidence < 1.0) {
        return Err(MonadError::BadOptions(format!(
            "confidence {} is not in (0, 1)",
            opts.confidence
        )));
    }
    let ctx = m.ctx();
    let blocks: Vec<usize> = (0..ctx.num_blocks()).map(|b| ctx.block_size(b)).collect();
    let dim: usize = blocks.iter().map(|s| s - 1).sum();
    let mut runs = Vec::new();
    for &requested in &opts.primes {
        if !is_prime(requested) {
            return Err(MonadError::BadOptions(format!("{requested} is not prime")));
        }
        let mut q = requested;
        let mm = loop {
            match ModMatrix::reduce(m, q) {
                Ok(mm) => break mm,
                Err(AlgebraError::DenominatorNotInvertible { .. }) => q = next_prime(q),
                Err(e) => return Err(e.into()),
            }
        };
        let hits = count_hits(&mm, &blocks, target, opts);
        runs.push(PrimeRun {
            requested,
            prime: q,
            samples: opts.samples,
            hits,
            estimate: estimate(q, hits, opts.samples, dim, opts.confidence),
        });
    }
    // With hits, the run with the most hits is the most precise; otherwise
    // take the strongest lower bound.
    let combined = match runs.iter().filter(|r| r.hits > 0).max_by_key(|r| r.hits) {
        Some(r) => r.estimate.clone(),
        None => runs
            .iter()
            .map(|r| r.estimate.clone())
            .max_by(|a, b| codim_rank(a).cmp(&codim_rank(b)))
            .expect("at least one prime"),
    };
    Ok(McReport {
        seed: opts.seed,
        confidence_threshold: opts.confidence,
        runs,
        combined,
    })
}

fn codim_rank(c: &Codim) -> usize {
    match *c {
        Codim::Empty => usize::MAX,
        Codim::Exact(k) => k,
        Codim::AtLeast { bound, .. } => bound,
    }
}

/// Whether a Monte Carlo estimate is consistent with the exact codimension.
fn consistent(exact: &Codim, mc: &Codim) -> bool {
    match (exact, mc) {
        (Codim::Empty, Codim::Empty | Codim::AtLeast { .. }) => true,
        (Codim::Exact(a), Codim::Exact(b)) => a == b,
        (Codim::Exact(a), Codim::AtLeast { bound, .. }) => bound <= a,
        _ => false,
    }
}

/// Locus where a map drops below full column rank (`Σ` for `α`).
fn locus_of(m: &PolyMatrix, target: usize, opts: Option<&SamplingOptions>) -> Result<DegenerationReport, MonadError> {
    if target == 0 {
        // A map out of the zero sheaf never drops rank.
        return Ok(DegenerationReport {
            method: LocusMethod::ExactLinear,
            codim: Codim::Empty,
            exact: Some(ExactLocus {
                equations: Vec::new(),
                rank_per_block: Vec::new(),
                span_per_block: Vec::new(),
                codim: Codim::Empty,
            }),
            monte_carlo: None,
            agrees: None,
        });
    }
    let exact = exact_linear_locus(m);
    let mc = match opts {
        Some(o) => Some(monte_carlo_locus(m, target, o)?),
        None => None,
    };
    match (exact, mc) {
        (Some(e), mc) => {
            let agrees = mc.as_ref().map(|r| consistent(&e.codim, &r.combined));
            Ok(DegenerationReport {
                method: LocusMethod::ExactLinear,
                codim: e.codim.clone(),
                exact: Some(e),
                monte_carlo: mc,
                agrees,
            })
        }
        (None, Some(r)) => Ok(DegenerationReport {
            method: LocusMethod::MonteCarlo,
            codim: r.combined.clone(),
            exact: None,
            monte_carlo: Some(r),
            agrees: None,
        }),
        (None, None) => Err(MonadError::Inconclusive(
            "no exact locus for this map and sampling is disabled".into(),
        )),
    }
}

impl Monad {
    /// `Σ = {z : ker α_z ≠ 0}`. The exact branch covers a rank-one `M0`
    /// with linear entries; sampling runs whenever `opts` is given, as the
    /// only branch or as a cross-check.
    pub fn degeneration_locus(&self, opts: Option<&SamplingOptions>) -> Result<DegenerationReport, MonadError> {
        locus_of(self.alpha(), self.alpha().cols(), opts)
    }

    /// Points where `β` is not surjective, computed as the locus of `βᵀ`.
    pub fn beta_locus(&self, opts: Option<&SamplingOptions>) -> Result<DegenerationReport, MonadError> {
        let bt = self.beta().transpose();
        locus_of(&bt, bt.cols(), opts)
    }

    /// Whether both loci have an exact branch, so that [`Monad::classify`]
    /// needs no sampling.
    pub fn has_exact_loci(&self) -> bool {
        let bt = self.beta().transpose();
        [self.alpha(), &bt]
            .iter()
            .all(|m| m.cols() == 0 || exact_linear_locus(m).is_some())
    }

    /// Sheaf class of `E` from the codimension of `Σ`; a nonempty `β`-locus
    /// is a separate failure of the monad conditions.
    pub fn classify(&self, opts: Option<&SamplingOptions>) -> Result<SheafClass, MonadError> {
        let report = self.validate();
        if !report.passes() {
            return Err(MonadError::Invalid(report.failures.join("; ")));
        }
        let beta_locus = self.beta_locus(opts)?;
        match &beta_locus.codim {
            Codim::Empty => {}
            c @ Codim::AtLeast { .. } => {
                return Err(MonadError::Inconclusive(format!(
                    "sampling bounds the locus of β only by {c}"
                )))
            }
            c => return Err(MonadError::BetaNotSurjective(c.to_string())),
        }
        let alpha_locus = self.degeneration_locus(opts)?;
        let c = &alpha_locus.codim;
        let class = if c.is_empty() {
            SheafKind::LocallyFree
        } else if c.at_least(3) {
            SheafKind::Reflexive
        } else if c.at_least(2) {
            SheafKind::TorsionFree
        } else if matches!(c, Codim::AtLeast { .. }) {
            return Err(MonadError::Inconclusive(format!(
                "sampling bounds the locus only by {c}"
            )));
        } else {
            SheafKind::None
        };
        Ok(SheafClass {
            class,
            alpha_locus,
            beta_locus,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, MultiDegree, VarContext};
    use crate::cohomology::LineBundleSum;
    use crate::picard::SpaceDescriptor;

    pub(crate) fn family(lambda: &str) -> Monad {
        let ctx = VarContext::projective(3).unwrap();
        let p = |t: &str| parse_poly(t, &ctx).unwrap();
        let alpha = ["z1", "z2", &format!("({lambda})*z3"), &format!("({lambda})*z4")]
            .iter()
            .map(|t| vec![p(t)])
            .collect();
        let beta = vec![["-z2", "z1", "-z4", "z3"].iter().map(|t| p(t)).collect()];
        let md = |v: i64| MultiDegree::new(vec![v]);
        Monad::from_entries(
            SpaceDescriptor::Projective { n: 3 },
            [
                LineBundleSum::single(md(-1), 1),
                LineBundleSum::single(md(0), 4),
                LineBundleSum::single(md(1), 1),
            ],
            alpha,
            beta,
        )
        .unwrap()
    }

    fn small() -> SamplingOptions {
        SamplingOptions {
            samples: 20_000,
            ..SamplingOptions::default()
        }
    }

    #[test]
    fn exact_locus_of_the_family() {
        let l1 = family("1").degeneration_locus(None).unwrap();
        assert_eq!(l1.codim, Codim::Empty);
        let l0 = family("0").degeneration_locus(None).unwrap();
        assert_eq!(l0.codim, Codim::Exact(2));
        assert_eq!(l0.exact.unwrap().equations, vec!["x0", "x1"]);
    }

    #[test]
    fn classes_of_the_family() {
        let o = small();
        assert_eq!(family("1").classify(Some(&o)).unwrap().class, SheafKind::LocallyFree);
        let c0 = family("0").classify(Some(&o)).unwrap();
        assert_eq!(c0.class, SheafKind::TorsionFree);
        assert_eq!(c0.alpha_locus.agrees, Some(true));
    }

    #[test]
    fn zero_column_has_codim_zero() {
        let ctx = VarContext::projective(3).unwrap();
        let m = PolyMatrix::new(
            ctx,
            vec![MultiDegree::new(vec![0]); 4],
            vec![MultiDegree::new(vec![-1])],
            vec![vec![Polynomial::zero(4)]; 4],
        )
        .unwrap();
        let r = monte_carlo_locus(&m, 1, &small()).unwrap();
        assert!(r.runs.iter().all(|run| run.hits == run.samples));
        assert_eq!(r.combined, Codim::Exact(0));
        assert_eq!(exact_linear_locus(&m).unwrap().codim, Codim::Exact(0));
    }

    #[test]
    fn sampling_is_independent_of_workers() {
        let m = family("0");
        let one = m.degeneration_locus(Some(&small())).unwrap();
        let many = m
            .degeneration_locus(Some(&SamplingOptions {
                workers: 8,
                ..small()
            }))
            .unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn zero_hit_bound() {
        // N = 10^6 at q = 101: codim 2 is excluded with overwhelming
        // confidence, codim 3 only with probability about 0.62.
        assert!(zero_hit_confidence(101, 2, 1_000_000) > 1.0 - 1e-6);
        let c3 = zero_hit_confidence(101, 3, 1_000_000);
        assert!((c3 - 0.6215).abs() < 1e-3, "{c3}");
        assert_eq!(
            estimate(101, 0, 1_000_000, 3, 1.0 - 1e-6),
            Codim::AtLeast {
                bound: 2,
                confidence: zero_hit_confidence(101, 2, 1_000_000)
            }
        );
    }

    #[test]
    fn denominator_collision_moves_to_next_prime() {
        let m = family("1/101");
        let r = monte_carlo_locus(m.alpha(), 1, &small()).unwrap();
        assert_eq!(r.runs[0].requested, 101);
        assert_eq!(r.runs[0].prime, 103);
    }
}

//! Monads `M0 -α-> M1 -β-> M2` of line-bundle sums: validation,
//! construction, induced maps on cohomology, and exact section counts of the
//! kernel `K = ker β` and the cohomology `E = ker β / im α`.

mod locus;

pub use locus::{
    Codim, DegenerationReport, ExactLocus, LocusMethod, McReport, PrimeRun, SamplingOptions,
    SheafClass, SheafKind, zero_hit_confidence,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{parse_poly, AlgebraError, MultiDegree, PolyMatrix, Polynomial, QMatrix, VarContext};
use crate::cohomology::{cohomology_map, sum_cohomology, CohomologyError, LineBundleSum};
use crate::picard::{PicardError, SpaceDescriptor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonadError {
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("ADHM constraint CA + DB = 0 fails; residual {residual:?}")]
    AdhmResidual { residual: Vec<Vec<String>> },
    #[error("monad fails validation: {0}")]
    Invalid(String),
    #[error("β is not surjective on every fiber (locus {0})")]
    BetaNotSurjective(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("bad sampling options: {0}")]
    BadOptions(String),
}

/// Which map of the monad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Alpha,
    Beta,
}

/// A three-term complex of line-bundle sums over `P^n` or `P^n x P^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monad {
    space: SpaceDescriptor,
    terms: [LineBundleSum; 3],
    alpha: PolyMatrix,
    beta: PolyMatrix,
}

impl Monad {
    /// Checks the shapes and gradings of `α`, `β` against the terms. Entry
    /// degrees and the complex condition are left to [`Monad::validate`].
    pub fn new(
        space: SpaceDescriptor,
        terms: [LineBundleSum; 3],
        alpha: PolyMatrix,
        beta: PolyMatrix,
    ) -> Result<Self, MonadError> {
        space.check()?;
        let ctx = space.var_context()?;
        let l = space.picard_rank();
        for t in &terms {
            for (d, _) in t.iter() {
                if d.len() != l {
                    return Err(MonadError::Shape(format!(
                        "degree {d} has length {}, expected {l}",
                        d.len()
                    )));
                }
            }
        }
        let check = |name: &str, m: &PolyMatrix, src: &LineBundleSum, tgt: &LineBundleSum| {
            if m.ctx() != &ctx {
                return Err(MonadError::Shape(format!("{name} uses another variable context")));
            }
            if m.col_degrees() != src.expanded().as_slice() || m.row_degrees() != tgt.expanded().as_slice() {
                return Err(MonadError::Shape(format!(
                    "{name} is {}x{}, expected {}x{} with matching degrees",
                    m.rows(),
                    m.cols(),
                    tgt.rank(),
                    src.rank()
                )));
            }
            Ok(())
        };
        check("alpha", &alpha, &terms[0], &terms[1])?;
        check("beta", &beta, &terms[1], &terms[2])?;
        Ok(Self {
            space,
            terms,
            alpha,
            beta,
        })
    }

    /// Builds `α`, `β` from row-major entries, taking their gradings from
    /// the terms.
    pub fn from_entries(
        space: SpaceDescriptor,
        terms: [LineBundleSum; 3],
        alpha: Vec<Vec<Polynomial>>,
        beta: Vec<Vec<Polynomial>>,
    ) -> Result<Self, MonadError> {
        let ctx = space.var_context()?;
        let [e0, e1, e2] = [&terms[0], &terms[1], &terms[2]].map(LineBundleSum::expanded);
        let alpha = PolyMatrix::new_unchecked(ctx.clone(), e1.clone(), e0, alpha)?;
        let beta = PolyMatrix::new_unchecked(ctx, e2, e1, beta)?;
        Self::new(space, terms, alpha, beta)
    }

    /// Like [`Monad::from_entries`], parsing each entry with the
    /// descriptor's variable names.
    pub fn from_text<S: AsRef<str>>(
        space: SpaceDescriptor,
        terms: [LineBundleSum; 3],
        alpha: &[Vec<S>],
        beta: &[Vec<S>],
    ) -> Result<Self, MonadError> {
        let ctx = space.var_context()?;
        let parse = |rows: &[Vec<S>]| -> Result<Vec<Vec<Polynomial>>, MonadError> {
            rows.iter()
                .map(|r| r.iter().map(|t| Ok(parse_poly(t.as_ref(), &ctx)?)).collect())
                .collect()
        };
        let (a, b) = (parse(alpha)?, parse(beta)?);
        Self::from_entries(space, terms, a, b)
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn ctx(&self) -> &VarContext {
        self.alpha.ctx()
    }

    pub fn terms(&self) -> [&LineBundleSum; 3] {
        [&self.terms[0], &self.terms[1], &self.terms[2]]
    }

    pub fn alpha(&self) -> &PolyMatrix {
        &self.alpha
    }

    pub fn beta(&self) -> &PolyMatrix {
        &self.beta
    }

    pub fn map(&self, which: Which) -> &PolyMatrix {
        match which {
            Which::Alpha => &self.alpha,
            Which::Beta => &self.beta,
        }
    }

    /// Rank of `E`.
    pub fn rank(&self) -> i64 {
        self.terms[1].rank() as i64 - self.terms[0].rank() as i64 - self.terms[2].rank() as i64
    }

    pub fn zero_twist(&self) -> MultiDegree {
        MultiDegree::zero(self.space.picard_rank())
    }

    /// The dual monad `M2* -βᵀ-> M1* -αᵀ-> M0*`, whose cohomology is `E*`
    /// when `E` is locally free.
    pub fn dual(&self) -> Self {
        Self {
            space: self.space.clone(),
            terms: [self.terms[2].dual(), self.terms[1].dual(), self.terms[0].dual()],
            alpha: self.beta.transpose(),
            beta: self.alpha.transpose(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let homogeneous = match self
            .alpha
            .check_homogeneous()
            .map_err(|e| format!("alpha: {e}"))
            .and_then(|_| self.beta.check_homogeneous().map_err(|e| format!("beta: {e}")))
        {
            Ok(()) => true,
            Err(e) => {
                failures.push(e);
                false
            }
        };
        let product = self.beta.mat_mul(&self.alpha).expect("shapes checked at construction");
        let mut complex = true;
        'outer: for i in 0..product.rows() {
            for j in 0..product.cols() {
                if !product.get(i, j).is_zero() {
                    failures.push(format!(
                        "(beta*alpha)[{i}][{j}] = {}",
                        product.get(i, j).to_text(self.ctx())
                    ));
                    complex = false;
                    break 'outer;
                }
            }
        }
        let ra = self.alpha.rank_generic();
        let alpha_injective = ra == self.alpha.cols();
        if !alpha_injective {
            failures.push(format!("alpha has generic rank {ra} < {}", self.alpha.cols()));
        }
        let rb = self.beta.rank_generic();
        let beta_surjective = rb == self.beta.rows();
        if !beta_surjective {
            failures.push(format!("beta has generic rank {rb} < {}", self.beta.rows()));
        }
        ValidationReport {
            homogeneous,
            complex,
            alpha_injective,
            beta_surjective,
            failures,
        }
    }

    /// Matrix of `H^p(source(twist)) → H^p(target(twist))` for `α` or `β`.
    pub fn cohomology_map(&self, which: Which, twist: &MultiDegree, p: usize) -> QMatrix {
        cohomology_map(self.map(which), twist, p)
    }

    /// Induced map on global sections.
    pub fn section_map(&self, which: Which, twist: &MultiDegree) -> QMatrix {
        self.cohomology_map(which, twist, 0)
    }

    /// `h^0(K(twist))`, the kernel dimension of `β` on sections.
    pub fn h0_kernel_bundle(&self, twist: &MultiDegree) -> u64 {
        let m = self.section_map(Which::Beta, twist);
        (m.cols() - m.rank()) as u64
    }

    /// `h^0(E(twist))` read off the hypercohomology spectral sequence of the
    /// monad: `E_2^{0,0} = ker H⁰β / im H⁰α`, and the only other
    /// contribution is the kernel of `d_2 : ker H¹α → coker H⁰β`.
    pub fn h0_cohomology_bundle(&self, twist: &MultiDegree) -> Result<H0Detail, MonadError> {
        let sa = self.section_map(Which::Alpha, twist);
        let sb = self.section_map(Which::Beta, twist);
        let h0k = (sb.cols() - sb.rank()) as u64;
        let rank_a = sa.rank() as u64;
        let e00 = h0k - rank_a;
        let h1a = self.cohomology_map(Which::Alpha, twist, 1);
        let k1 = (h1a.cols() - h1a.rank()) as u64;
        let c1 = (sb.rows() - sb.rank()) as u64;
        let value = if k1 == 0 {
            H0Value::Exact(e00)
        } else if c1 == 0 {
            H0Value::Exact(e00 + k1)
        } else {
            H0Value::Interval(e00 + k1.saturating_sub(c1), e00 + k1)
        };
        Ok(H0Detail {
            h0_kernel: h0k,
            rank_h0_alpha: rank_a,
            ker_h1_alpha: k1,
            coker_h0_beta: c1,
            value,
        })
    }

    /// The coarse bracket `h^0(K) - rank H⁰α` when `h^1(M0(twist)) = 0`,
    /// else `[max(0, h^0K - h^0M0), h^0K + h^1M0]`.
    pub fn h0_cohomology_bounds(&self, twist: &MultiDegree) -> Result<H0Value, MonadError> {
        let a = sum_cohomology(&self.space, &self.terms[0], twist)?;
        let h0k = self.h0_kernel_bundle(twist);
        if a.h(1) == 0 {
            let rank_a = self.section_map(Which::Alpha, twist).rank() as u64;
            return Ok(H0Value::Exact(h0k - rank_a));
        }
        Ok(H0Value::Interval(h0k.saturating_sub(a.h(0)), h0k + a.h(1)))
    }

    /// Decides whether `H^1(α(q))` is injective for every twist `q`.
    ///
    /// `h^1` of a line bundle lives on one `P^1` factor `f`. Group sources
    /// and targets by their degree on `f`; the entries of `α` of degree 0 on
    /// `f` form a matrix `P_c` over the other factor's polynomial ring for
    /// each class `c`. If every `P_c` has full column rank, then for a
    /// kernel element the components of lowest `f`-degree map through `P_c`
    /// alone and must vanish, so the map is injective.
    pub fn alpha_h1_injective(&self) -> bool {
        let ctx = self.ctx();
        for f in 0..ctx.num_blocks() {
            if ctx.block_size(f) != 2 {
                continue;
            }
            let src = self.alpha.col_degrees();
            let tgt = self.alpha.row_degrees();
            let mut classes: Vec<i64> = src.iter().map(|d| d.parts()[f]).collect();
            classes.sort_unstable();
            classes.dedup();
            for c in classes {
                let cols: Vec<usize> = (0..src.len()).filter(|&j| src[j].parts()[f] == c).collect();
                let rows: Vec<usize> = (0..tgt.len()).filter(|&i| tgt[i].parts()[f] == c).collect();
                if rows.len() < cols.len() {
                    return false;
                }
                let entries = rows
                    .iter()
                    .map(|&i| cols.iter().map(|&j| self.alpha.get(i, j).clone()).collect())
                    .collect();
                let sub = PolyMatrix::new_unchecked(
                    ctx.clone(),
                    rows.iter().map(|&i| tgt[i].clone()).collect(),
                    cols.iter().map(|&j| src[j].clone()).collect(),
                    entries,
                )
                .expect("submatrix shape");
                if sub.rank_generic() < cols.len() {
                    return false;
                }
            }
        }
        true
    }
}

/// The four monad conditions, with the first counterexample for each
/// failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub homogeneous: bool,
    pub complex: bool,
    pub alpha_injective: bool,
    pub beta_surjective: bool,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.homogeneous && self.complex && self.alpha_injective && self.beta_surjective
    }
}

/// An exact dimension or a closed interval containing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum H0Value {
    Exact(u64),
    Interval(u64, u64),
}

impl H0Value {
    pub fn exact(&self) -> Option<u64> {
        match *self {
            Self::Exact(v) => Some(v),
            Self::Interval(..) => None,
        }
    }

    pub fn contains(&self, v: u64) -> bool {
        match *self {
            Self::Exact(x) => x == v,
            Self::Interval(lo, hi) => lo <= v && v <= hi,
        }
    }

    pub fn within(&self, outer: &Self) -> bool {
        match *self {
            Self::Exact(v) => outer.contains(v),
            Self::Interval(lo, hi) => outer.contains(lo) && outer.contains(hi),
        }
    }
}

impl std::fmt::Display for H0Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Exact(v) => write!(f, "{v}"),
            Self::Interval(lo, hi) => write!(f, "[{lo}, {hi}]"),
        }
    }
}

/// The pieces of the `h^0(E)` computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct H0Detail {
    pub h0_kernel: u64,
    pub rank_h0_alpha: u64,
    pub ker_h1_alpha: u64,
    pub coker_h0_beta: u64,
    pub value: H0Value,
}

/// Blocks of a monad `O(-1,0)^a → O^b ⊕ O(-1,1)^c → O(0,1)^a` on
/// `P^n x P^m`: `α = (A; B)`, `β = (C D)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdhmData {
    pub n: usize,
    pub m: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    /// `b x a`, degree `(1,0)`.
    pub block_a: Vec<Vec<Polynomial>>,
    /// `c x a`, degree `(0,1)`.
    pub block_b: Vec<Vec<Polynomial>>,
    /// `a x b`, degree `(0,1)`.
    pub block_c: Vec<Vec<Polynomial>>,
    /// `a x c`, degree `(1,0)`.
    pub block_d: Vec<Vec<Polynomial>>,
}

pub fn from_adhm(d: &AdhmData) -> Result<Monad, MonadError> {
    let space = SpaceDescriptor::Product { n: d.n, m: d.m };
    let md = |v: [i64; 2]| MultiDegree::new(v.to_vec());
    let m0 = LineBundleSum::new(if d.a > 0 { vec![(md([-1, 0]), d.a)] } else { vec![] })?;
    let mut parts = Vec::new();
    if d.b > 0 {
        parts.push((md([0, 0]), d.b));
    }
    if d.c > 0 {
        parts.push((md([-1, 1]), d.c));
    }
    let m1 = LineBundleSum::new(parts)?;
    let m2 = LineBundleSum::new(if d.a > 0 { vec![(md([0, 1]), d.a)] } else { vec![] })?;
    let alpha: Vec<Vec<Polynomial>> = d.block_a.iter().chain(&d.block_b).cloned().collect();
    let beta: Vec<Vec<Polynomial>> = (0..d.a)
        .map(|i| {
            let mut row = d.block_c.get(i).cloned().unwrap_or_default();
            row.extend(d.block_d.get(i).cloned().unwrap_or_default());
            row
        })
        .collect();
    let monad = Monad::from_entries(space, [m0, m1, m2], alpha, beta)?;
    monad.alpha.check_homogeneous()?;
    monad.beta.check_homogeneous()?;
    let product = monad.beta.mat_mul(&monad.alpha)?;
    if !product.is_zero() {
        let ctx = monad.ctx().clone();
        return Err(MonadError::AdhmResidual {
            residual: product
                .to_rows()
                .iter()
                .map(|r| r.iter().map(|p| p.to_text(&ctx)).collect())
                .collect(),
        });
    }
    Ok(monad)
}

/// The instanton monad `O(-1)^c → O^{2c+2} → O(1)^c` on `P^3` with
/// `β = (x0 R + x1 T | x2 R + x3 T)` and `α = (-(x2 V + x3 U); x0 V + x1 U)`,
/// where `R`, `T` drop the last and first of `c+1` coordinates and `U`, `V`
/// append and prepend a zero to `c`.
pub fn instanton_p3(c: usize) -> Monad {
    assert!(c >= 1, "instanton charge must be positive");
    let space = SpaceDescriptor::Projective { n: 3 };
    let nv = 4;
    let x = |i: usize| Polynomial::var(nv, i);
    let zero = Polynomial::zero(nv);
    // R[i][k] = [k == i], T[i][k] = [k == i+1] (c x (c+1));
    // U[k][j] = [k == j], V[k][j] = [k == j+1] ((c+1) x c).
    let lin = |p: usize, q: usize, r_first: bool, i: usize, k: usize| -> Polynomial {
        // p·R + q·T  (or, transposed, p·V + q·U)
        let (on_r, on_t) = if r_first { (k == i, k == i + 1) } else { (k == i + 1, k == i) };
        let mut acc = zero.clone();
        if on_r {
            acc = acc.add(&x(p));
        }
        if on_t {
            acc = acc.add(&x(q));
        }
        acc
    };
    let beta: Vec<Vec<Polynomial>> = (0..c)
        .map(|i| {
            let mut row: Vec<Polynomial> = (0..=c).map(|k| lin(0, 1, true, i, k)).collect();
            row.extend((0..=c).map(|k| lin(2, 3, true, i, k)));
            row
        })
        .collect();
    let mut alpha: Vec<Vec<Polynomial>> = (0..=c)
        .map(|k| (0..c).map(|j| lin(2, 3, false, j, k).neg()).collect())
        .collect();
    alpha.extend((0..=c).map(|k| (0..c).map(|j| lin(0, 1, false, j, k)).collect()));
    let md = |v: i64| MultiDegree::new(vec![v]);
    let terms = [
        LineBundleSum::single(md(-1), c),
        LineBundleSum::single(md(0), 2 * c + 2),
        LineBundleSum::single(md(1), c),
    ];
    Monad::from_entries(space, terms, alpha, beta).expect("instanton monad shape")
}

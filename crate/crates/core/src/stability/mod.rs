//! Certifiers for slope stability of the cohomology bundle, stability of its
//! restriction to a divisor, and semistability of degenerate limits.

mod certificate;

pub use certificate::{replay, Certificate, Step, Verdict, TOOL_VERSION};

use num_rational::Rational64;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::MultiDegree;
use crate::cohomology::{CohomVector, CohomologyError, HalfSpace, Vanishing};
use crate::monad::{H0Detail, H0Value, Monad, MonadError, SamplingOptions, SheafClass, SheafKind, ValidationReport};
use crate::picard::{BundleSummary, MonadChern, PicardError, SpaceDescriptor};
use certificate::Trail;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error(transparent)]
    Monad(#[from] MonadError),
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("degenerate divisor: {0}")]
    DegenerateDivisor(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("replay failed: {0}")]
    Replay(String),
    #[error("malformed certificate data: {0}")]
    Json(String),
}

/// Knobs shared by the certifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    /// Positive factor applied to `δ_L`; verdicts must not depend on it.
    pub degree_scale: Rational64,
    /// Sampling for the degeneration loci when no exact branch applies;
    /// also used as a cross-check of the exact branch.
    pub sampling: Option<SamplingOptions>,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self {
            degree_scale: Rational64::one(),
            sampling: None,
        }
    }
}

/// The divisor `D ∈ |O(d)|` to restrict to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorSpec {
    pub degree: MultiDegree,
    /// User assertion that `Pic(D) = ℤ`; never verified.
    pub assume_cyclic: bool,
}

impl DivisorSpec {
    pub fn new(degree: MultiDegree, assume_cyclic: bool) -> Self {
        Self {
            degree,
            assume_cyclic,
        }
    }

    /// `d_i ≥ 0` and `d ≠ 0`.
    pub fn is_positive(&self) -> bool {
        self.degree.parts().iter().all(|&x| x >= 0) && !self.degree.is_zero()
    }

    pub fn is_anticanonical(&self, space: &SpaceDescriptor) -> bool {
        space.anticanonical().as_ref() == Some(&self.degree)
    }

    fn check(&self, space: &SpaceDescriptor) -> Result<(), StabilityError> {
        if self.degree.len() != space.picard_rank() {
            return Err(StabilityError::DegenerateDivisor(format!(
                "degree {} on a space of Picard rank {}",
                self.degree,
                space.picard_rank()
            )));
        }
        if !self.is_positive() {
            return Err(StabilityError::DegenerateDivisor(format!(
                "polydegree {} is not positive",
                self.degree
            )));
        }
        Ok(())
    }
}

/// `c1 · L^{dim-2} · D` on a coordinate space with `L = O(1,…,1)`.
pub fn intersection_degree(
    space: &SpaceDescriptor,
    c1: &MultiDegree,
    divisor: &MultiDegree,
) -> Result<i64, StabilityError> {
    let ring = space.ring()?;
    let l = space.picard_rank();
    if c1.len() != l || divisor.len() != l {
        return Err(StabilityError::Unsupported("degree length mismatch".into()));
    }
    let dim = space.dim();
    if dim < 2 {
        return Err(StabilityError::Unsupported("intersection on a curve".into()));
    }
    let polar = ring.linear(&vec![1; l]).pow(dim - 2);
    let class = ring.linear(c1.parts()).mul(&polar).mul(&ring.linear(divisor.parts()));
    Ok(class.coefficient(ring.tops()))
}

const ANCHOR_CLASS: &str = "degeneration locus criterion: Hoppe's criterion needs a reflexive cohomology sheaf";
const ANCHOR_NORMALIZE: &str = "L-normalization k = ceil(mu_L / d)";
const ANCHOR_HOPPE: &str = "generalised Hoppe criterion: no sections of the normalized bundle over delta_L(p) <= 0";
const ANCHOR_H1: &str = "sections of E outside the critical twists inject into ker H^1(alpha)";
const ANCHOR_KERNEL_STRING: &str = "restriction chase: kernel string 0 -> K -> M1 -> M2 -> 0";
const ANCHOR_VERTICAL: &str = "restriction chase: vertical string 0 -> M0 -> K -> E -> 0";
const ANCHOR_RESTRICTION: &str = "restriction sequence 0 -> E(-d) -> E -> E|_D -> 0";
const ANCHOR_DUAL: &str = "dual kernel string 0 -> M2* -> M1* -> K* -> 0";

const ASSUME_REFLEXIVE: &str =
    "the cohomology sheaf is reflexive (not verified: no exact degeneration locus and sampling disabled)";

/// Facts established by a successful stability pipeline.
struct StableFacts {
    rank: i64,
    det: MultiDegree,
    k: i64,
}

type Outcome<T> = Result<Result<T, String>, StabilityError>;

fn twist_e1(len: usize, k: i64) -> MultiDegree {
    let mut t = MultiDegree::zero(len);
    if len > 0 {
        t.0[0] = k;
    }
    t
}

/// Sheaf class step. `Ok(None)` means the class could not be computed and
/// reflexivity is recorded as an assumption.
fn class_step(t: &mut Trail, opts: &StabilityOptions) -> Outcome<Option<SheafKind>> {
    if opts.sampling.is_none() && !t.monad.has_exact_loci() {
        t.assume(ASSUME_REFLEXIVE);
        return Ok(Ok(None));
    }
    let out = t.run_value("classify", json!({ "sampling": opts.sampling }), ANCHOR_CLASS)?;
    if let Some(c) = out.get("class") {
        let c: SheafClass = serde_json::from_value(c.clone()).map_err(|e| StabilityError::Json(e.to_string()))?;
        return Ok(Ok(Some(c.class)));
    }
    let message = out["error"]["message"].as_str().unwrap_or("").to_string();
    Ok(Err(format!("sheaf class unavailable: {message}")))
}

/// `h^0(E'(q)) = 0` for every `q` in `h`, where `E'` is the cohomology of
/// the monad (`dual = false`) or of its dual.
fn region_vanishing(t: &mut Trail, dual: bool, h: &HalfSpace) -> Outcome<()> {
    let (m0, m1) = if dual { ("M2*", "M1*") } else { ("M0", "M1") };
    let v: Vanishing = t.run(
        "halfspace_vanishing",
        json!({ "term": m1, "halfspace": h, "index": 0 }),
        ANCHOR_HOPPE,
    )?;
    if !v.holds {
        let crit: Vec<MultiDegree> = t.run(
            "critical_twists",
            json!({ "term": m1, "halfspace": h }),
            ANCHOR_HOPPE,
        )?;
        for q in crit {
            let d: H0Detail = t.run(
                "h0_cohomology_bundle",
                json!({ "twist": q, "dual": dual }),
                ANCHOR_HOPPE,
            )?;
            match d.value {
                H0Value::Exact(0) => {}
                H0Value::Exact(v) => return Ok(Err(format!("h^0 = {v} at twist {q}"))),
                H0Value::Interval(lo, hi) => {
                    return Ok(Err(format!("h^0 only bounded by [{lo}, {hi}] at twist {q}")))
                }
            }
        }
    }
    let v1: Vanishing = t.run(
        "halfspace_vanishing",
        json!({ "term": m0, "halfspace": h, "index": 1 }),
        ANCHOR_H1,
    )?;
    if !v1.holds {
        let inj: bool = t.run("alpha_h1_injective", json!({ "dual": dual }), ANCHOR_H1)?;
        if !inj {
            let w = v1.witness.map(|w| w.to_string()).unwrap_or_default();
            return Ok(Err(format!(
                "h^1 of the first term is nonzero (e.g. at {w}) and H^1(alpha) is not shown injective"
            )));
        }
    }
    Ok(Ok(()))
}

fn stable_pipeline(t: &mut Trail, opts: &StabilityOptions) -> Outcome<StableFacts> {
    let report: ValidationReport = t.run("validate", json!({}), "monad conditions")?;
    if !report.passes() {
        return Ok(Err(format!("monad fails validation: {}", report.failures.join("; "))));
    }
    let class = match class_step(t, opts)? {
        Ok(c) => c,
        Err(e) => return Ok(Err(e)),
    };
    if matches!(class, Some(SheafKind::TorsionFree | SheafKind::None)) {
        return Ok(Err(format!("cohomology sheaf is {} but not reflexive", class.unwrap())));
    }
    let chern: MonadChern = t.run("chern_of_monad", json!({}), "Whitney formula for the monad terms")?;
    let e = chern.cohomology;
    let rank = e.rank;
    let det = e.det();
    if rank < 1 {
        return Ok(Err(format!("cohomology has rank {rank}")));
    }
    let scale = opts.degree_scale;
    let norm: Value = t.run_value(
        "slope_and_normalize",
        json!({ "scale": scale, "rank": rank, "det": det }),
        ANCHOR_NORMALIZE,
    )?;
    let k: i64 = serde_json::from_value(norm["k"].clone()).map_err(|e| StabilityError::Json(e.to_string()))?;
    let facts = StableFacts {
        rank,
        det: det.clone(),
        k,
    };
    if rank == 1 {
        // A reflexive rank-one sheaf is a line bundle, stable for any L.
        return Ok(Ok(facts));
    }
    let pol = t.monad.space().polarization().scaled(scale);
    let d = pol.d();
    let h = HalfSpace::new(pol.weights.clone(), -d * k)?;
    if let Err(e) = region_vanishing(t, false, &h)? {
        return Ok(Err(format!("s = 1: {e}")));
    }
    if rank >= 3 {
        // Λ^{r-1} E = E* ⊗ det E, and E* is the cohomology of the dual
        // monad when E is locally free.
        if class != Some(SheafKind::LocallyFree) {
            return Ok(Err(format!(
                "s = {}: the dual monad computes E* only for a locally free E",
                rank - 1
            )));
        }
        let lam_det = det.scale(rank - 1);
        let norm_s: Value = t.run_value(
            "slope_and_normalize",
            json!({ "scale": scale, "rank": rank, "det": lam_det }),
            ANCHOR_NORMALIZE,
        )?;
        let ks: i64 = serde_json::from_value(norm_s["k"].clone()).map_err(|e| StabilityError::Json(e.to_string()))?;
        let shift = pol.delta(&det)?;
        let h_dual = HalfSpace::new(pol.weights.clone(), -d * ks + shift)?;
        if let Err(e) = region_vanishing(t, true, &h_dual)? {
            return Ok(Err(format!("s = {}: {e}", rank - 1)));
        }
        if rank >= 4 {
            return Ok(Err(format!(
                "exterior powers 2..{} are not certified",
                rank - 2
            )));
        }
    }
    Ok(Ok(facts))
}

fn finish(t: Trail, kind: &str, verdict: Result<Verdict, String>, attached: Vec<Certificate>, opts: &StabilityOptions) -> Certificate {
    let (verdict, failure) = match verdict {
        Ok(v) => (v, None),
        Err(e) => (Verdict::Inconclusive, Some(e)),
    };
    Certificate {
        kind: kind.to_string(),
        verdict,
        assumptions: t.assumptions,
        failure,
        steps: t.steps,
        attached,
        tool_version: TOOL_VERSION.to_string(),
        seed: opts.sampling.as_ref().map(|s| s.seed),
    }
}

fn require_coordinates(monad: &Monad) -> Result<(), StabilityError> {
    if !monad.space().has_coordinates() {
        return Err(StabilityError::Unsupported(format!("certification on {}", monad.space())));
    }
    Ok(())
}

/// Slope stability of the cohomology bundle `E`.
pub fn certify_stable(monad: &Monad, opts: &StabilityOptions) -> Result<Certificate, StabilityError> {
    require_coordinates(monad)?;
    let mut t = Trail::new(monad);
    let verdict = stable_pipeline(&mut t, opts)?.map(|_| Verdict::Stable);
    Ok(finish(t, "stability", verdict, Vec::new(), opts))
}

/// Reads `h^i` from a `sum_cohomology` step.
fn h_of(t: &mut Trail, term: &str, twist: &MultiDegree, i: usize, anchor: &str) -> Result<u64, StabilityError> {
    let v: CohomVector = t.run("sum_cohomology", json!({ "term": term, "twist": twist }), anchor)?;
    Ok(v.h(i))
}

fn bound(t: &mut Trail, parts: &[u64], anchor: &str) -> Result<u64, StabilityError> {
    t.run("upper_bound", json!({ "summands": parts }), anchor)
}

/// `h^0(E(t)|_D) = 0` from `h^0(E(t)) = 0` and the chase through the
/// canonical diagram twisted by `t - d`.
fn restriction_chase(t: &mut Trail, twist: &MultiDegree, d: &MultiDegree) -> Outcome<()> {
    let h0: H0Detail = t.run(
        "h0_cohomology_bundle",
        json!({ "twist": twist, "dual": false }),
        ANCHOR_RESTRICTION,
    )?;
    let h0 = match h0.value {
        H0Value::Exact(v) => v,
        H0Value::Interval(lo, hi) => {
            return Ok(Err(format!("h^0(E{twist}) only bounded by [{lo}, {hi}]")))
        }
    };
    if h0 != 0 {
        return Ok(Err(format!("h^0(E{twist}) = {h0}")));
    }
    let tm = twist - d;
    let a = h_of(t, "M2", &tm, 0, ANCHOR_KERNEL_STRING)?;
    let b = h_of(t, "M1", &tm, 1, ANCHOR_KERNEL_STRING)?;
    let h1k = bound(t, &[a, b], "h^1(K(t-d)) <= h^0(M2(t-d)) + h^1(M1(t-d))")?;
    let c = h_of(t, "M0", &tm, 2, ANCHOR_VERTICAL)?;
    let h1e = bound(t, &[h1k, c], "h^1(E(t-d)) <= h^1(K(t-d)) + h^2(M0(t-d))")?;
    let res = bound(t, &[h0, h1e], "h^0(E(t)|_D) <= h^0(E(t)) + h^1(E(t-d))")?;
    if res != 0 {
        return Ok(Err(format!("the chase bounds h^0(E{twist}|_D) only by {res}")));
    }
    Ok(Ok(()))
}

/// Stability of `E|_D`.
pub fn certify_asymptotic(
    monad: &Monad,
    divisor: &DivisorSpec,
    opts: &StabilityOptions,
) -> Result<Certificate, StabilityError> {
    require_coordinates(monad)?;
    let space = monad.space().clone();
    divisor.check(&space)?;
    let mut t = Trail::new(monad);
    let verdict = asymptotic_pipeline(&mut t, &space, divisor, opts)?;
    Ok(finish(t, "asymptotic", verdict, Vec::new(), opts))
}

fn asymptotic_pipeline(
    t: &mut Trail,
    space: &SpaceDescriptor,
    divisor: &DivisorSpec,
    opts: &StabilityOptions,
) -> Outcome<Verdict> {
    let facts = match stable_pipeline(t, opts)? {
        Ok(f) => f,
        Err(e) => return Ok(Err(format!("stability of E not certified: {e}"))),
    };
    if facts.rank != 2 {
        return Ok(Err(format!("restriction criterion needs rank 2, not {}", facts.rank)));
    }
    let l = space.picard_rank();
    let twist = twist_e1(l, -facts.k);
    if let Err(e) = restriction_chase(t, &twist, &divisor.degree)? {
        return Ok(Err(e));
    }
    if divisor.is_anticanonical(space) {
        t.assume("D is in |-K_X|");
    }
    match space {
        SpaceDescriptor::Projective { .. } => {
            if !divisor.assume_cyclic {
                return Ok(Err("the rank-2 criterion on D needs D cyclic; not asserted".into()));
            }
            t.assume("D is cyclic");
            t.assume("Pic(D) = Z, generated by the restriction of O(1)");
        }
        _ => {
            let c1 = &facts.det - &twist_e1(l, 2 * facts.k);
            let deg: i64 = t.run(
                "intersection_degree",
                json!({ "c1": c1, "divisor": divisor.degree }),
                "degree of the normalized restriction on D is nonpositive",
            )?;
            if deg > 0 {
                return Ok(Err(format!("normalized E|_D has positive degree {deg}")));
            }
            t.assume("D is polycyclic with Pic(D) spanned by the restrictions of O(1,0) and O(0,1)");
            t.assume("on D, stability of the rank-2 restriction follows from h^0(E|_D) = 0 and nonpositive degree");
        }
    }
    Ok(Ok(Verdict::AsymptoticallyStable))
}

/// Semistability of the restriction of a degenerate limit `E_0` on `P^3`.
pub fn certify_limit_semistable(
    monad: &Monad,
    divisor: &DivisorSpec,
    opts: &StabilityOptions,
) -> Result<Certificate, StabilityError> {
    if monad.space() != &(SpaceDescriptor::Projective { n: 3 }) {
        return Err(StabilityError::Unsupported(format!(
            "limit semistability on {} (only P^3)",
            monad.space()
        )));
    }
    divisor.check(monad.space())?;
    let mut t = Trail::new(monad);
    let mut attached = Vec::new();
    let verdict = limit_pipeline(&mut t, divisor, opts, &mut attached)?;
    Ok(finish(t, "limit", verdict, attached, opts))
}

fn limit_pipeline(
    t: &mut Trail,
    divisor: &DivisorSpec,
    opts: &StabilityOptions,
    attached: &mut Vec<Certificate>,
) -> Outcome<Verdict> {
    let report: ValidationReport = t.run("validate", json!({}), "monad conditions")?;
    if !report.passes() {
        return Ok(Err(format!("monad fails validation: {}", report.failures.join("; "))));
    }
    let out = t.run_value("classify", json!({ "sampling": opts.sampling }), ANCHOR_CLASS)?;
    let class = match out.get("class") {
        Some(c) => {
            let c: SheafClass = serde_json::from_value(c.clone()).map_err(|e| StabilityError::Json(e.to_string()))?;
            c.class
        }
        None => {
            return Ok(Err(format!(
                "sheaf class unavailable: {}",
                out["error"]["message"].as_str().unwrap_or("")
            )))
        }
    };
    if class == SheafKind::None {
        return Ok(Err("cohomology sheaf is not torsion free".into()));
    }
    let chern: MonadChern = t.run("chern_of_monad", json!({}), "Whitney formula for the monad terms")?;
    let e = chern.cohomology;
    if e.rank != 2 || e.c1.iter().any(|&c| c != 0) {
        return Ok(Err(format!("needs rank 2 and c1 = 0, found rank {} and c1 {:?}", e.rank, e.c1)));
    }
    let minus_one = MultiDegree::new(vec![-1]);
    if let Err(e) = restriction_chase(t, &minus_one, &divisor.degree)? {
        return Ok(Err(e));
    }
    // Dual side, from 0 -> M2* -> M1* -> K* -> 0.
    let tm = &minus_one - &divisor.degree;
    let a = h_of(t, "M1*", &minus_one, 0, ANCHOR_DUAL)?;
    let b = h_of(t, "M2*", &minus_one, 1, ANCHOR_DUAL)?;
    let h0k = bound(t, &[a, b], "h^0(K*(-1)) <= h^0(M1*(-1)) + h^1(M2*(-1))")?;
    let c = h_of(t, "M1*", &tm, 1, ANCHOR_DUAL)?;
    let d = h_of(t, "M2*", &tm, 2, ANCHOR_DUAL)?;
    let h1k = bound(t, &[c, d], "h^1(K*(-1-d)) <= h^1(M1*(-1-d)) + h^2(M2*(-1-d))")?;
    let res = bound(t, &[h0k, h1k], "h^0(K*(-1)|_D) <= h^0(K*(-1)) + h^1(K*(-1-d))")?;
    if res != 0 {
        return Ok(Err(format!("the dual chase bounds h^0(K*(-1)|_D) only by {res}")));
    }
    t.assume("dual kernel sequence taken as 0 -> M2* -> M1* -> K* -> 0, i.e. with O(-1) in the first slot, the twist that makes it exact");
    if class == SheafKind::LocallyFree {
        attached.push(certify_asymptotic(t.monad, divisor, opts)?);
    }
    Ok(Ok(Verdict::AsymptoticallySemistable))
}

/// Summary of `E` under the descriptor's polarization scaled by `scale`.
pub fn summary_of(monad: &Monad, scale: Rational64) -> Result<(BundleSummary, i64, BundleSummary), StabilityError> {
    let chern = crate::picard::chern_of_monad(monad)?;
    let pol = monad.space().polarization().scaled(scale);
    let s = pol.summary(chern.cohomology.rank, chern.cohomology.det())?;
    if s.rank <= 0 {
        return Ok((s.clone(), 0, s));
    }
    let (k, n) = pol.slope_and_normalize(&s)?;
    Ok((s, k, n))
}

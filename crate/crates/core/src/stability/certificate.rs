//! Certificates: verdicts with an ordered trail of re-executable steps.

use num_rational::Rational64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::StabilityError;
use crate::algebra::MultiDegree;
use crate::cohomology::{critical_twists, halfspace_vanishing, sum_cohomology, HalfSpace, LineBundleSum};
use crate::monad::{Monad, MonadError, SamplingOptions};
use crate::picard::chern_of_monad;

pub const TOOL_VERSION: &str = concat!("linmonad ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Semistable,
    AsymptoticallyStable,
    AsymptoticallySemistable,
    LocallyFree,
    Reflexive,
    TorsionFree,
    None,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = serde_json::to_value(self).expect("verdict serializes");
        f.write_str(v.as_str().expect("unit variant"))
    }
}

/// One audited computation: the operation, its inputs and exact output,
/// and the part of the argument it discharges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub operation: String,
    pub inputs: Value,
    pub outputs: Value,
    pub anchor: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: String,
    pub verdict: Verdict,
    pub assumptions: Vec<String>,
    /// Why an inconclusive verdict was reached.
    pub failure: Option<String>,
    pub steps: Vec<Step>,
    /// Stronger certificates issued along the way.
    pub attached: Vec<Certificate>,
    pub tool_version: String,
    pub seed: Option<u64>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, StabilityError> {
        serde_json::from_str(text).map_err(|e| StabilityError::Json(e.to_string()))
    }
}

/// Line-bundle sum named in a step: `M0`, `M1`, `M2` or a dual `M1*`.
pub(crate) fn term(monad: &Monad, name: &str) -> Result<LineBundleSum, StabilityError> {
    let (base, dual) = match name.strip_suffix('*') {
        Some(b) => (b, true),
        None => (name, false),
    };
    let idx = match base {
        "M0" => 0,
        "M1" => 1,
        "M2" => 2,
        _ => return Err(StabilityError::Replay(format!("unknown term {name}"))),
    };
    let t = monad.terms()[idx];
    Ok(if dual { t.dual() } else { t.clone() })
}

fn arg<T: DeserializeOwned>(inputs: &Value, key: &str) -> Result<T, StabilityError> {
    let v = inputs
        .get(key)
        .ok_or_else(|| StabilityError::Replay(format!("missing input `{key}`")))?;
    serde_json::from_value(v.clone()).map_err(|e| StabilityError::Json(e.to_string()))
}

fn to_value<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("step output serializes")
}

fn error_kind(e: &MonadError) -> &'static str {
    match e {
        MonadError::Inconclusive(_) => "inconclusive",
        MonadError::BetaNotSurjective(_) => "beta_not_surjective",
        MonadError::Invalid(_) => "invalid",
        _ => "error",
    }
}

/// Runs one operation. Certifiers and replay both go through here.
pub(crate) fn execute(monad: &Monad, dual: &Monad, op: &str, inputs: &Value) -> Result<Value, StabilityError> {
    let pick = |inputs: &Value| -> Result<&Monad, StabilityError> {
        let d: bool = arg(inputs, "dual")?;
        Ok(if d { dual } else { monad })
    };
    let space = monad.space();
    Ok(match op {
        "validate" => to_value(monad.validate()),
        "classify" => {
            let sampling: Option<SamplingOptions> = arg(inputs, "sampling")?;
            match monad.classify(sampling.as_ref()) {
                Ok(c) => json!({ "class": c }),
                Err(e) => json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } }),
            }
        }
        "chern_of_monad" => to_value(chern_of_monad(monad)?),
        "slope_and_normalize" => {
            let scale: Rational64 = arg(inputs, "scale")?;
            let rank: i64 = arg(inputs, "rank")?;
            let det: MultiDegree = arg(inputs, "det")?;
            let pol = space.polarization().scaled(scale);
            let summary = pol.summary(rank, det)?;
            let (k, normalized) = pol.slope_and_normalize(&summary)?;
            json!({ "summary": summary, "k": k, "d": pol.d(), "normalized": normalized })
        }
        "exterior_summands" => {
            let t = term(monad, &arg::<String>(inputs, "term")?)?;
            let s: usize = arg(inputs, "s")?;
            to_value(crate::cohomology::exterior_summands(&t, s)?)
        }
        "halfspace_vanishing" => {
            let t = term(monad, &arg::<String>(inputs, "term")?)?;
            let h: HalfSpace = arg(inputs, "halfspace")?;
            let i: usize = arg(inputs, "index")?;
            to_value(halfspace_vanishing(space, &t, &h, i)?)
        }
        "critical_twists" => {
            let t = term(monad, &arg::<String>(inputs, "term")?)?;
            let h: HalfSpace = arg(inputs, "halfspace")?;
            to_value(critical_twists(space, &t, &h)?)
        }
        "sum_cohomology" => {
            let t = term(monad, &arg::<String>(inputs, "term")?)?;
            let twist: MultiDegree = arg(inputs, "twist")?;
            to_value(sum_cohomology(space, &t, &twist)?)
        }
        "h0_cohomology_bundle" => {
            let twist: MultiDegree = arg(inputs, "twist")?;
            to_value(pick(inputs)?.h0_cohomology_bundle(&twist)?)
        }
        "alpha_h1_injective" => to_value(pick(inputs)?.alpha_h1_injective()),
        "upper_bound" => {
            let parts: Vec<u64> = arg(inputs, "summands")?;
            to_value(parts.iter().sum::<u64>())
        }
        "intersection_degree" => {
            let c1: MultiDegree = arg(inputs, "c1")?;
            let divisor: MultiDegree = arg(inputs, "divisor")?;
            to_value(super::intersection_degree(space, &c1, &divisor)?)
        }
        other => return Err(StabilityError::Replay(format!("unknown operation {other}"))),
    })
}

/// Re-executes every step of `cert` (and of its attached certificates)
/// against `monad` and compares the outputs.
pub fn replay(cert: &Certificate, monad: &Monad) -> Result<(), StabilityError> {
    let dual = monad.dual();
    for (i, step) in cert.steps.iter().enumerate() {
        let got = execute(monad, &dual, &step.operation, &step.inputs)?;
        if got != step.outputs {
            return Err(StabilityError::Replay(format!(
                "step {i} ({}) recorded {} but recomputed {}",
                step.operation, step.outputs, got
            )));
        }
    }
    for a in &cert.attached {
        replay(a, monad)?;
    }
    Ok(())
}

/// Accumulates steps while a certifier runs.
pub(crate) struct Trail<'a> {
    pub monad: &'a Monad,
    pub dual: Monad,
    pub steps: Vec<Step>,
    pub assumptions: Vec<String>,
}

impl<'a> Trail<'a> {
    pub fn new(monad: &'a Monad) -> Self {
        Self {
            monad,
            dual: monad.dual(),
            steps: Vec::new(),
            assumptions: Vec::new(),
        }
    }

    pub fn run_value(&mut self, op: &str, inputs: Value, anchor: &str) -> Result<Value, StabilityError> {
        let outputs = execute(self.monad, &self.dual, op, &inputs)?;
        self.steps.push(Step {
            operation: op.to_string(),
            inputs,
            outputs: outputs.clone(),
            anchor: anchor.to_string(),
        });
        Ok(outputs)
    }

    pub fn run<T: DeserializeOwned>(&mut self, op: &str, inputs: Value, anchor: &str) -> Result<T, StabilityError> {
        let v = self.run_value(op, inputs, anchor)?;
        serde_json::from_value(v).map_err(|e| StabilityError::Json(e.to_string()))
    }

    pub fn assume(&mut self, text: &str) {
        if !self.assumptions.iter().any(|a| a == text) {
            self.assumptions.push(text.to_string());
        }
    }
}

//! `.monad.json` documents.

use std::collections::BTreeMap;

use linmonad::algebra::{format_rational, parse_rational};
use linmonad::cohomology::Summand;
use linmonad::{LineBundleSum, Monad, MonadError, MultiDegree, SpaceDescriptor};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("space kind `{kind}` takes {expected} parameter(s), got {got}")]
    SpaceParams { kind: String, expected: usize, got: usize },
    #[error("unknown space kind `{0}`")]
    SpaceKind(String),
    #[error("bad space `{0}`, expected e.g. P:3 or PxP:2,1")]
    SpaceSpec(String),
    #[error("parameter `{name}`: `{value}` is not a rational")]
    BadRational { name: String, value: String },
    #[error("parameter name `{0}` clashes with a coordinate")]
    ReservedName(String),
    #[error("parameter `{0}` has no value")]
    Unbound(String),
    #[error(transparent)]
    Monad(#[from] MonadError),
}

/// `{"kind": "P" | "PxP" | "hirzebruch" | "blowup", "params": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceBlock {
    pub kind: String,
    pub params: Vec<usize>,
}

impl SpaceBlock {
    pub fn descriptor(&self) -> Result<SpaceDescriptor, DocumentError> {
        let want = |k: usize| {
            if self.params.len() == k {
                Ok(())
            } else {
                Err(DocumentError::SpaceParams {
                    kind: self.kind.clone(),
                    expected: k,
                    got: self.params.len(),
                })
            }
        };
        let p = &self.params;
        let space = match self.kind.as_str() {
            "P" => {
                want(1)?;
                SpaceDescriptor::Projective { n: p[0] }
            }
            "PxP" => {
                want(2)?;
                SpaceDescriptor::Product { n: p[0], m: p[1] }
            }
            "hirzebruch" => {
                want(1)?;
                SpaceDescriptor::Hirzebruch { a: p[0] }
            }
            "blowup" => {
                want(1)?;
                SpaceDescriptor::Blowup { l: p[0] }
            }
            other => return Err(DocumentError::SpaceKind(other.to_string())),
        };
        space.check().map_err(|e| DocumentError::Monad(e.into()))?;
        Ok(space)
    }

    /// Parses the short form `P:3`, `PxP:2,1`, `hirzebruch:1`, `blowup:2`.
    pub fn parse_short(text: &str) -> Result<Self, DocumentError> {
        let bad = || DocumentError::SpaceSpec(text.to_string());
        let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
        let params = rest
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        let block = Self {
            kind: kind.trim().to_string(),
            params,
        };
        block.descriptor()?;
        Ok(block)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermsBlock {
    #[serde(rename = "M0")]
    pub m0: Vec<Summand>,
    #[serde(rename = "M1")]
    pub m1: Vec<Summand>,
    #[serde(rename = "M2")]
    pub m2: Vec<Summand>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MapsBlock {
    pub alpha: Vec<Vec<String>>,
    pub beta: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadDocument {
    pub space: SpaceBlock,
    pub terms: TermsBlock,
    #[serde(default)]
    pub maps: MapsBlock,
    /// Named rational parameters; the value here is the default.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, String>,
}

fn is_reserved(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('x' | 'y' | 'z')) && {
        let rest: String = chars.collect();
        !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
    }
}

/// Replaces each identifier token equal to a parameter name by its value in
/// parentheses.
pub fn substitute(text: &str, values: &BTreeMap<String, String>) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = i + c.len_utf8();
            while let Some(&(j, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    end = j + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let token = &text[i..end];
            match values.get(token) {
                Some(v) => {
                    out.push('(');
                    out.push_str(v);
                    out.push(')');
                }
                None => out.push_str(token),
            }
        } else {
            out.push(c);
        }
    }
    out
}

impl MonadDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &str) -> Result<Self, DocumentError> {
        let text = std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
            path: path.to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn descriptor(&self) -> Result<SpaceDescriptor, DocumentError> {
        self.space.descriptor()
    }

    pub fn term_sums(&self) -> Result<[LineBundleSum; 3], DocumentError> {
        let conv = |s: &[Summand]| {
            LineBundleSum::new(s.iter().map(|x| (x.degree.clone(), x.multiplicity)).collect())
                .map_err(|e| DocumentError::Monad(e.into()))
        };
        Ok([conv(&self.terms.m0)?, conv(&self.terms.m1)?, conv(&self.terms.m2)?])
    }

    /// Parameter values after applying `overrides`, normalized to exact
    /// rationals in `p/q` form.
    pub fn resolve(&self, overrides: &BTreeMap<String, String>) -> Result<BTreeMap<String, String>, DocumentError> {
        let mut out = BTreeMap::new();
        let names = self.parameters.keys().chain(overrides.keys());
        for name in names {
            if is_reserved(name) {
                return Err(DocumentError::ReservedName(name.clone()));
            }
            let raw = overrides
                .get(name)
                .or_else(|| self.parameters.get(name))
                .filter(|v| !v.trim().is_empty())
                .ok_or_else(|| DocumentError::Unbound(name.clone()))?;
            let q = parse_rational(raw).ok_or_else(|| DocumentError::BadRational {
                name: name.clone(),
                value: raw.clone(),
            })?;
            out.insert(name.clone(), format_rational(&q));
        }
        Ok(out)
    }

    /// Builds the monad with parameters substituted.
    pub fn monad(&self, overrides: &BTreeMap<String, String>) -> Result<Monad, DocumentError> {
        let values = self.resolve(overrides)?;
        let sub = |rows: &[Vec<String>]| -> Vec<Vec<String>> {
            rows.iter()
                .map(|r| r.iter().map(|t| substitute(t, &values)).collect())
                .collect()
        };
        Ok(Monad::from_text(
            self.descriptor()?,
            self.term_sums()?,
            &sub(&self.maps.alpha),
            &sub(&self.maps.beta),
        )?)
    }
}

/// Degree vector parsed from `d1,d2,...`.
pub fn parse_degree(text: &str) -> Option<MultiDegree> {
    text.split(',')
        .map(|s| s.trim().parse::<i64>().ok())
        .collect::<Option<Vec<_>>>()
        .map(MultiDegree::new)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn substitution_is_by_token() {
        let v = values(&[("lambda", "1/2"), ("t", "-3")]);
        assert_eq!(substitute("lambda*z3 + lambdas*t", &v), "(1/2)*z3 + lambdas*(-3)");
        assert_eq!(substitute("x0*y1", &v), "x0*y1");
    }

    #[test]
    fn reserved_names() {
        assert!(is_reserved("z1"));
        assert!(is_reserved("x10"));
        assert!(!is_reserved("x"));
        assert!(!is_reserved("lambda"));
    }

    #[test]
    fn short_space_forms() {
        assert_eq!(
            SpaceBlock::parse_short("PxP:2,1").unwrap().descriptor().unwrap(),
            SpaceDescriptor::Product { n: 2, m: 1 }
        );
        assert!(SpaceBlock::parse_short("P3").is_err());
        assert!(SpaceBlock::parse_short("P:1,2").is_err());
        assert!(SpaceBlock::parse_short("Q:2").is_err());
    }

    #[test]
    fn decimal_parameters_are_exact() {
        let doc = MonadDocument {
            space: SpaceBlock {
                kind: "P".into(),
                params: vec![3],
            },
            terms: TermsBlock {
                m0: vec![],
                m1: vec![],
                m2: vec![],
            },
            maps: MapsBlock::default(),
            parameters: values(&[("lambda", "1")]),
        };
        let r = doc.resolve(&values(&[("lambda", "0.5")])).unwrap();
        assert_eq!(r["lambda"], "1/2");
        assert!(matches!(
            doc.resolve(&values(&[("lambda", "half")])),
            Err(DocumentError::BadRational { .. })
        ));
    }
}

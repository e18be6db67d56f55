//! The `.lhap.json` model format: bit-exact, canonical, diffable.
//!
//! Rationals are strings (`"10"`, `"1/10"`, `"2.5"` on input; canonical
//! `p/q`-or-integer on output), constraints are structured objects, and maps
//! serialize with sorted keys, so two structurally equal documents are
//! byte-identical. Unknown fields are rejected.

use crate::rational::{format_rat, parse_rat};
use hxplain_core::constraint::{LinearConstraint, RelOp};
use hxplain_core::model::{
    validate_problem, Affine, Automaton, Edge, Location, PlanningProblem, StateSet,
    ValidationReport,
};
use hxplain_core::{Problem, Rat};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const FORMAT_VERSION: u32 = 1;
pub const FILE_EXTENSION: &str = ".lhap.json";

/// A parsed model file: format version, free-form metadata, and the problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelDocument {
    pub format_version: u32,
    pub metadata: BTreeMap<String, String>,
    pub problem: Problem,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("invalid value in {context}: {message}")]
    Value { context: String, message: String },
    #[error("model fails validation:\n{0}")]
    Semantic(ValidationReport),
}

// ---- raw serde layer ------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    version: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
    variables: Vec<String>,
    locations: BTreeMap<String, RawLocation>,
    edges: Vec<RawEdge>,
    init: RawState,
    goal: RawState,
    depth: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    required_visits: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLocation {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    invariant: Vec<RawConstraint>,
    flow: BTreeMap<String, (String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    id: String,
    source: String,
    target: String,
    label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    guard: Vec<RawConstraint>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    reset: BTreeMap<String, RawAffine>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    lhs: BTreeMap<String, String>,
    op: String,
    rhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tag: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAffine {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    terms: BTreeMap<String, String>,
    #[serde(rename = "const")]
    constant: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    location: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    constraints: Vec<RawConstraint>,
}

// ---- conversions ----------------------------------------------------------

fn value_err(context: &str, message: impl Into<String>) -> ModelError {
    ModelError::Value { context: context.to_string(), message: message.into() }
}

fn rat_in(context: &str, s: &str) -> Result<Rat, ModelError> {
    parse_rat(s).map_err(|e| value_err(context, e.to_string()))
}

fn constraint_in(context: &str, raw: &RawConstraint) -> Result<LinearConstraint<Rat>, ModelError> {
    let op = RelOp::from_symbol(&raw.op)
        .ok_or_else(|| value_err(context, format!("unknown operator `{}`", raw.op)))?;
    let mut coeffs = Vec::with_capacity(raw.lhs.len());
    for (var, c) in &raw.lhs {
        coeffs.push((var.clone(), rat_in(context, c)?));
    }
    let mut out = LinearConstraint::new(coeffs, op, rat_in(context, &raw.rhs)?);
    out.tag = raw.tag.clone();
    Ok(out)
}

fn constraint_out(c: &LinearConstraint<Rat>) -> RawConstraint {
    RawConstraint {
        lhs: c.coeffs.iter().map(|(v, k)| (v.clone(), format_rat(k))).collect(),
        op: c.op.symbol().to_string(),
        rhs: format_rat(&c.rhs),
        tag: c.tag.clone(),
    }
}

fn state_in(context: &str, raw: &RawState) -> Result<StateSet<Rat>, ModelError> {
    Ok(StateSet {
        location: raw.location.clone(),
        constraints: raw
            .constraints
            .iter()
            .map(|c| constraint_in(context, c))
            .collect::<Result<_, _>>()?,
    })
}

fn state_out(s: &StateSet<Rat>) -> RawState {
    RawState {
        location: s.location.clone(),
        constraints: s.constraints.iter().map(constraint_out).collect(),
    }
}

fn doc_from_raw(raw: RawDoc) -> Result<ModelDocument, ModelError> {
    if raw.version != FORMAT_VERSION {
        return Err(ModelError::Version(raw.version));
    }
    let mut locations = Vec::with_capacity(raw.locations.len());
    for (id, l) in &raw.locations {
        let ctx = format!("location {id}");
        let mut flow = BTreeMap::new();
        for (var, (lo, hi)) in &l.flow {
            flow.insert(var.clone(), (rat_in(&ctx, lo)?, rat_in(&ctx, hi)?));
        }
        locations.push(Location {
            id: id.clone(),
            invariant: l
                .invariant
                .iter()
                .map(|c| constraint_in(&ctx, c))
                .collect::<Result<_, _>>()?,
            flow,
        });
    }
    let mut edges = Vec::with_capacity(raw.edges.len());
    for e in &raw.edges {
        let ctx = format!("edge {}", e.id);
        let mut reset = BTreeMap::new();
        for (var, a) in &e.reset {
            let mut terms = BTreeMap::new();
            for (v, c) in &a.terms {
                let c = rat_in(&ctx, c)?;
                if !num_traits::Zero::is_zero(&c) {
                    terms.insert(v.clone(), c);
                }
            }
            reset.insert(var.clone(), Affine { terms, constant: rat_in(&ctx, &a.constant)? });
        }
        edges.push(Edge {
            id: e.id.clone(),
            source: e.source.clone(),
            target: e.target.clone(),
            label: e.label.clone(),
            guard: e.guard.iter().map(|c| constraint_in(&ctx, c)).collect::<Result<_, _>>()?,
            reset,
        });
    }
    let init = state_in("init", &raw.init)?;
    let automaton = Automaton { variables: raw.variables, locations, edges, init: init.clone() };
    let problem = PlanningProblem {
        automaton,
        init,
        goal: state_in("goal", &raw.goal)?,
        depth: raw.depth,
        required_visits: raw.required_visits.into_iter().collect::<BTreeSet<_>>(),
    };
    Ok(ModelDocument { format_version: raw.version, metadata: raw.metadata, problem })
}

fn doc_to_raw(doc: &ModelDocument) -> RawDoc {
    let p = &doc.problem;
    RawDoc {
        version: doc.format_version,
        metadata: doc.metadata.clone(),
        variables: p.automaton.variables.clone(),
        locations: p
            .automaton
            .locations
            .iter()
            .map(|l| {
                (
                    l.id.clone(),
                    RawLocation {
                        invariant: l.invariant.iter().map(constraint_out).collect(),
                        flow: l
                            .flow
                            .iter()
                            .map(|(v, (lo, hi))| (v.clone(), (format_rat(lo), format_rat(hi))))
                            .collect(),
                    },
                )
            })
            .collect(),
        edges: p
            .automaton
            .edges
            .iter()
            .map(|e| RawEdge {
                id: e.id.clone(),
                source: e.source.clone(),
                target: e.target.clone(),
                label: e.label.clone(),
                guard: e.guard.iter().map(constraint_out).collect(),
                reset: e
                    .reset
                    .iter()
                    .map(|(v, a)| {
                        (
                            v.clone(),
                            RawAffine {
                                terms: a
                                    .terms
                                    .iter()
                                    .map(|(t, c)| (t.clone(), format_rat(c)))
                                    .collect(),
                                constant: format_rat(&a.constant),
                            },
                        )
                    })
                    .collect(),
            })
            .collect(),
        init: state_out(&p.init),
        goal: state_out(&p.goal),
        depth: p.depth,
        required_visits: p.required_visits.iter().cloned().collect(),
    }
}

// ---- public API -----------------------------------------------------------

/// Parse without the semantic gate; used by `validate` to report issues
/// instead of failing.
pub fn parse_model_unchecked(text: &str) -> Result<ModelDocument, ModelError> {
    let raw: RawDoc = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc_from_raw(raw)
}

/// Exact-rational parse plus validation. Spec op `parse_model`.
pub fn parse_model(text: &str) -> Result<ModelDocument, ModelError> {
    let doc = parse_model_unchecked(text)?;
    let report = validate_problem(&doc.problem);
    if !report.is_valid() {
        return Err(ModelError::Semantic(report));
    }
    Ok(doc)
}

/// Canonical, deterministic text form. Spec op `serialize_model`.
pub fn serialize_model(doc: &ModelDocument) -> String {
    let raw = doc_to_raw(doc);
    let mut out = serde_json::to_string_pretty(&raw).expect("model serialization cannot fail");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "version": 1,
  "variables": ["x"],
  "locations": { "l0": { "flow": { "x": ["0", "0"] } } },
  "edges": [],
  "init": { "location": "l0" },
  "goal": { "location": "l0" },
  "depth": 0
}"#;

    #[test]
    fn minimal_model_parses() {
        let doc = parse_model(MINIMAL).unwrap();
        assert_eq!(doc.problem.automaton.locations.len(), 1);
        assert_eq!(doc.problem.depth, 0);
    }

    #[test]
    fn decimal_rate_parses_exactly() {
        let text = MINIMAL.replace(r#""x": ["0", "0"]"#, r#""x": ["0.1", "0.1"]"#);
        let doc = parse_model(&text).unwrap();
        let (lo, hi) = &doc.problem.automaton.locations[0].flow["x"];
        assert_eq!(*lo, hxplain_core::rat(1, 10));
        assert_eq!(*hi, hxplain_core::rat(1, 10));
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = MINIMAL.replace(r#""depth": 0"#, r#""depth": 0, "extra": 1"#);
        match parse_model(&text) {
            Err(ModelError::Syntax { line, .. }) => assert!(line > 0),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn semantic_error_on_unknown_location() {
        let text = MINIMAL.replace(r#""goal": { "location": "l0" }"#, r#""goal": { "location": "l99" }"#);
        assert!(matches!(parse_model(&text), Err(ModelError::Semantic(_))));
    }

    #[test]
    fn serialize_is_canonical_round_trip() {
        let doc = parse_model(MINIMAL).unwrap();
        let text = serialize_model(&doc);
        let doc2 = parse_model(&text).unwrap();
        assert_eq!(doc, doc2);
        assert_eq!(text, serialize_model(&doc2));
    }
}

//! Domain types for rectangular linear hybrid automata and bounded planning
//! problems, with syntactic validation and a run checker.
//!
//! Flows are per-variable constant-rate intervals, guards and invariants are
//! conjunctions of linear constraints, and resets are affine maps over the
//! pre-transition valuation (identity where unassigned). All types are
//! immutable after construction.

use crate::constraint::{LinearConstraint, Valuation};
use crate::scalar::Scalar;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Affine expression over pre-transition variables: `terms . x + constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine<T> {
    pub terms: BTreeMap<String, T>,
    pub constant: T,
}

impl<T: Scalar> Affine<T> {
    pub fn constant(c: T) -> Self {
        Affine { terms: BTreeMap::new(), constant: c }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Affine { terms: [(name.into(), T::one())].into(), constant: T::zero() }
    }

    pub fn eval(&self, v: &Valuation<T>) -> Option<T> {
        let mut acc = self.constant.clone();
        for (name, c) in &self.terms {
            acc = acc + c.clone() * v.get(name)?.clone();
        }
        Some(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location<T> {
    pub id: String,
    pub invariant: Vec<LinearConstraint<T>>,
    /// Rate interval `[lo, hi]` per variable.
    pub flow: BTreeMap<String, (T, T)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge<T> {
    pub id: String,
    pub source: String,
    pub target: String,
    pub label: String,
    pub guard: Vec<LinearConstraint<T>>,
    pub reset: BTreeMap<String, Affine<T>>,
}

/// A location paired with a constraint set over the variables: the shape of
/// both initial and goal state sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSet<T> {
    pub location: String,
    pub constraints: Vec<LinearConstraint<T>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton<T> {
    pub variables: Vec<String>,
    /// Sorted by id; id order is the declaration order everywhere.
    pub locations: Vec<Location<T>>,
    pub edges: Vec<Edge<T>>,
    pub init: StateSet<T>,
}

impl<T: Scalar> Automaton<T> {
    pub fn location(&self, id: &str) -> Option<&Location<T>> {
        self.locations.iter().find(|l| l.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge<T>> {
        self.edges.iter().find(|e| e.id == id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanningProblem<T> {
    pub automaton: Automaton<T>,
    pub init: StateSet<T>,
    pub goal: StateSet<T>,
    /// Bound on the number of actions in a plan.
    pub depth: usize,
    /// Locations every counted path must visit (explicit sub-tasks).
    pub required_visits: BTreeSet<String>,
}

/// Timed action sequence. Step times are non-decreasing; `makespan` covers
/// the final dwell as well.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan<T> {
    pub steps: Vec<(T, String)>,
    pub makespan: T,
}

/// One dwell of a run: the location, the valuation on entry, the dwell time,
/// the valuation on exit, and the edge taken afterwards (None when terminal).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunStep<T> {
    pub location: String,
    pub entry: Valuation<T>,
    pub dwell: T,
    pub exit: Valuation<T>,
    pub edge: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run<T> {
    pub steps: Vec<RunStep<T>>,
}

/// One syntactic defect found by [`validate_problem`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub context: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.context, self.message)
    }
}

/// Empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            write!(f, "ok")
        } else {
            for issue in &self.issues {
                writeln!(f, "{issue}")?;
            }
            Ok(())
        }
    }
}

/// Collect every syntactic violation of the model invariants. Never mutates
/// the problem; issues are data, not failures.
pub fn validate_problem<T: Scalar>(p: &PlanningProblem<T>) -> ValidationReport {
    let mut issues: Vec<Issue> = Vec::new();
    fn note(issues: &mut Vec<Issue>, context: &str, message: String) {
        issues.push(Issue { context: context.to_string(), message });
    }
    let a = &p.automaton;
    let vars: BTreeSet<&str> = a.variables.iter().map(|s| s.as_str()).collect();

    let mut seen = BTreeSet::new();
    for l in &a.locations {
        if !seen.insert(&l.id) {
            note(&mut issues, "locations", format!("duplicate location id {}", l.id));
        }
    }
    let loc_ids: BTreeSet<&str> = a.locations.iter().map(|l| l.id.as_str()).collect();

    let mut seen_edges = BTreeSet::new();
    for e in &a.edges {
        if !seen_edges.insert(&e.id) {
            note(&mut issues, "edges", format!("duplicate edge id {}", e.id));
        }
    }

    let check_constraints = |what: &str, cs: &[LinearConstraint<T>], issues: &mut Vec<Issue>| {
        for c in cs {
            for v in c.variables() {
                if !vars.contains(v) {
                    issues.push(Issue {
                        context: what.to_string(),
                        message: format!("unknown variable {v}"),
                    });
                }
            }
        }
    };

    for l in &a.locations {
        check_constraints(&format!("location {}", l.id), &l.invariant, &mut issues);
        for v in a.variables.iter() {
            match l.flow.get(v) {
                None => note(&mut issues, &format!("location {}", l.id), format!("missing flow for {v}")),
                Some((lo, hi)) => {
                    if lo > hi {
                        note(
                            &mut issues,
                            &format!("location {}", l.id),
                            format!("flow interval for {v} has lo > hi"),
                        );
                    }
                }
            }
        }
        for v in l.flow.keys() {
            if !vars.contains(v.as_str()) {
                note(&mut issues, &format!("location {}", l.id), format!("flow for unknown variable {v}"));
            }
        }
    }

    for e in &a.edges {
        let ctx = format!("edge {}", e.id);
        for loc in [&e.source, &e.target] {
            if !loc_ids.contains(loc.as_str()) {
                note(&mut issues, &ctx, format!("unknown location {loc}"));
            }
        }
        check_constraints(&ctx, &e.guard, &mut issues);
        for (v, expr) in &e.reset {
            if !vars.contains(v.as_str()) {
                note(&mut issues, &ctx, format!("reset of unknown variable {v}"));
            }
            for t in expr.terms.keys() {
                if !vars.contains(t.as_str()) {
                    note(&mut issues, &ctx, format!("reset expression uses unknown variable {t}"));
                }
            }
        }
    }

    for (what, state) in [("automaton init", &a.init), ("init", &p.init), ("goal", &p.goal)] {
        if !loc_ids.contains(state.location.as_str()) {
            note(&mut issues, what, format!("unknown location {}", state.location));
        }
        check_constraints(what, &state.constraints, &mut issues);
    }

    for v in &p.required_visits {
        if !loc_ids.contains(v.as_str()) {
            note(&mut issues, "required_visits", format!("unknown location {v}"));
        }
    }

    ValidationReport { issues }
}

/// Why a run fails to replay. The display strings name the failing step and
/// condition of the run definition.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("step {step}: {reason}")]
pub struct RunViolation {
    pub step: usize,
    pub reason: String,
}

/// Replay a run against the problem: initial set, invariants at entry and
/// exit, flow intervals over the dwell, guards at exit, resets linking
/// consecutive steps, and (when given) the target set at the final exit.
pub fn check_run<T: Scalar>(
    p: &PlanningProblem<T>,
    run: &Run<T>,
    target: Option<&[LinearConstraint<T>]>,
) -> Result<(), RunViolation> {
    let a = &p.automaton;
    let fail = |step: usize, reason: String| Err(RunViolation { step, reason });
    if run.steps.is_empty() {
        return fail(0, "empty run".into());
    }
    if run.steps[0].location != p.init.location {
        return fail(0, format!("run starts at {}, not the initial location", run.steps[0].location));
    }
    for c in &p.init.constraints {
        if !c.eval(&run.steps[0].entry).map_err(|e| RunViolation { step: 0, reason: e.to_string() })? {
            return fail(0, format!("initial set violated: {c:?}"));
        }
    }

    for (i, s) in run.steps.iter().enumerate() {
        let loc = a
            .location(&s.location)
            .ok_or_else(|| RunViolation { step: i, reason: format!("unknown location {}", s.location) })?;
        if s.dwell < T::zero() {
            return fail(i, "negative dwell".into());
        }
        for (which, v) in [("entry", &s.entry), ("exit", &s.exit)] {
            for c in &loc.invariant {
                let ok = c.eval(v).map_err(|e| RunViolation { step: i, reason: e.to_string() })?;
                if !ok {
                    return fail(i, format!("invariant violated at {which}: {c:?}"));
                }
            }
        }
        for var in &a.variables {
            let (lo, hi) = loc.flow.get(var).ok_or_else(|| RunViolation {
                step: i,
                reason: format!("missing flow for {var}"),
            })?;
            let from = s.entry.get(var).cloned();
            let to = s.exit.get(var).cloned();
            let (Some(from), Some(to)) = (from, to) else {
                return fail(i, format!("valuation not total: missing {var}"));
            };
            let delta = to - from;
            if delta < lo.clone() * s.dwell.clone() || delta > hi.clone() * s.dwell.clone() {
                return fail(i, format!("flow violated for {var}"));
            }
        }
        match (&s.edge, i + 1 == run.steps.len()) {
            (None, true) => {}
            (None, false) => return fail(i, "missing edge on non-terminal step".into()),
            (Some(_), true) => return fail(i, "terminal step carries an edge".into()),
            (Some(edge_id), false) => {
                let e = a.edge(edge_id).ok_or_else(|| RunViolation {
                    step: i,
                    reason: format!("unknown edge {edge_id}"),
                })?;
                if e.source != s.location {
                    return fail(i, format!("edge {edge_id} does not leave {}", s.location));
                }
                let next = &run.steps[i + 1];
                if e.target != next.location {
                    return fail(i, format!("edge {edge_id} does not enter {}", next.location));
                }
                for c in &e.guard {
                    let ok = c.eval(&s.exit).map_err(|er| RunViolation { step: i, reason: er.to_string() })?;
                    if !ok {
                        return fail(i, format!("guard violated: {c:?}"));
                    }
                }
                for var in &a.variables {
                    let expected = match e.reset.get(var) {
                        Some(expr) => expr.eval(&s.exit).ok_or_else(|| RunViolation {
                            step: i,
                            reason: format!("reset of {var} uses unbound variable"),
                        })?,
                        None => s.exit.get(var).cloned().ok_or_else(|| RunViolation {
                            step: i,
                            reason: format!("valuation not total: missing {var}"),
                        })?,
                    };
                    if next.entry.get(var) != Some(&expected) {
                        return fail(i, format!("reset mismatch for {var}"));
                    }
                }
            }
        }
    }

    if let Some(target) = target {
        let last = run.steps.last().unwrap();
        for c in target {
            let ok = c
                .eval(&last.exit)
                .map_err(|e| RunViolation { step: run.steps.len() - 1, reason: e.to_string() })?;
            if !ok {
                return Err(RunViolation {
                    step: run.steps.len() - 1,
                    reason: format!("target violated: {c:?}"),
                });
            }
        }
    }
    Ok(())
}

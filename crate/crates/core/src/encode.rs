//! Path constraint encoding and feasibility checking.
//!
//! An abstract path through the automaton becomes one linear system: a dwell
//! variable per step, an in/out copy of every automaton variable per step,
//! flow constraints `lo*t <= out - in <= hi*t` (a single equality when
//! `lo == hi`), the location invariant at both valuations, the edge guard at
//! the exit valuation, and reset rows linking each step's exit to the next
//! step's entry (identity where the edge does not assign). The initial set
//! constrains the first entry; the target constrains the final exit.
//!
//! Every constraint carries a (step, kind) tag. When the system is
//! infeasible, the deletion filter produces an IIS whose tagged steps span a
//! contiguous slice of the path - the segment reported as the reason.

use crate::constraint::{ConstraintSystem, LinearConstraint, RelOp, Valuation};
use crate::feasibility::{fast_feasible, FeasibilityError};
use crate::graph::AbstractPath;
use crate::iis::{deletion_filter_iis, Iis, IisError};
use crate::model::{Plan, PlanningProblem, Run, RunStep};
use crate::presolve::FastOutcome;
use crate::scalar::{Rat, Scalar};
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TagKind {
    Init,
    Flow,
    InvariantIn,
    InvariantOut,
    Guard,
    Reset,
    DwellNonneg,
    Target,
}

/// Which step a constraint talks about. Reset rows tag the step they enter,
/// so an IIS that needs a step's entry point stays local to that step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tag {
    pub step: usize,
    pub kind: TagKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    In,
    Out,
}

#[derive(Clone, Debug)]
pub struct EncodedPath<T> {
    pub system: ConstraintSystem<T>,
    /// (step, variable, side) -> index into `system.variables`.
    pub var_index: BTreeMap<(usize, String, Side), usize>,
    /// step -> dwell variable index.
    pub dwell_index: BTreeMap<usize, usize>,
    /// Parallel to `system.constraints`.
    pub tags: Vec<Tag>,
    pub path: AbstractPath,
}

impl Side {
    fn suffix(self) -> &'static str {
        match self {
            Side::In => "in",
            Side::Out => "out",
        }
    }
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum EncodeError {
    #[error("path does not start at the problem's initial location")]
    WrongStart,
    #[error("path is malformed at step {0}: {1}")]
    Malformed(usize, String),
    #[error("target constraint mentions unknown variable {0}")]
    BadTarget(String),
}

fn state_var(step: usize, var: &str, side: Side) -> String {
    format!("{var}@{step}.{}", side.suffix())
}

fn dwell_var(step: usize) -> String {
    format!("t@{step}")
}

/// Rewrite a constraint over automaton variables onto the step-local LP
/// variables of one side.
fn instantiate<T: Scalar>(c: &LinearConstraint<T>, step: usize, side: Side) -> LinearConstraint<T> {
    let coeffs = c
        .coeffs
        .iter()
        .map(|(v, k)| (state_var(step, v, side), k.clone()))
        .collect::<Vec<_>>();
    let mut out = LinearConstraint::new(coeffs, c.op, c.rhs.clone());
    out.tag = c.tag.clone();
    out
}

/// Build the tagged linear system for a path and target condition.
/// Spec op `encode_path`.
pub fn encode_path<T: Scalar>(
    p: &PlanningProblem<T>,
    path: &AbstractPath,
    target: &[LinearConstraint<T>],
) -> Result<EncodedPath<T>, EncodeError> {
    let a = &p.automaton;
    if path.locations.is_empty() || path.locations[0] != p.init.location {
        return Err(EncodeError::WrongStart);
    }
    if path.locations.len() != path.edges.len() + 1 {
        return Err(EncodeError::Malformed(0, "location/edge count mismatch".into()));
    }
    let n_steps = path.locations.len();

    let mut variables = Vec::with_capacity(n_steps * (2 * a.variables.len() + 1));
    let mut var_index = BTreeMap::new();
    let mut dwell_index = BTreeMap::new();
    for step in 0..n_steps {
        dwell_index.insert(step, variables.len());
        variables.push(dwell_var(step));
        for side in [Side::In, Side::Out] {
            for v in &a.variables {
                var_index.insert((step, v.clone(), side), variables.len());
                variables.push(state_var(step, v, side));
            }
        }
    }

    let mut constraints: Vec<LinearConstraint<T>> = Vec::new();
    let mut tags: Vec<Tag> = Vec::new();
    let emit = |c: LinearConstraint<T>, tag: Tag, out: &mut Vec<LinearConstraint<T>>, tags: &mut Vec<Tag>| {
        out.push(c);
        tags.push(tag);
    };

    for c in &p.init.constraints {
        emit(instantiate(c, 0, Side::In), Tag { step: 0, kind: TagKind::Init }, &mut constraints, &mut tags);
    }

    for step in 0..n_steps {
        let loc_id = &path.locations[step];
        let loc = a
            .location(loc_id)
            .ok_or_else(|| EncodeError::Malformed(step, format!("unknown location {loc_id}")))?;

        // Reset rows of the edge that enters this step.
        if step > 0 {
            let edge_id = &path.edges[step - 1];
            let edge = a
                .edge(edge_id)
                .ok_or_else(|| EncodeError::Malformed(step - 1, format!("unknown edge {edge_id}")))?;
            if edge.source != path.locations[step - 1] || edge.target != *loc_id {
                return Err(EncodeError::Malformed(
                    step - 1,
                    format!("edge {edge_id} does not connect the adjacent locations"),
                ));
            }
            for v in &a.variables {
                // in_step - expr(out_{step-1}) == 0, identity when unassigned.
                let mut coeffs: Vec<(String, T)> = vec![(state_var(step, v, Side::In), T::one())];
                let mut rhs = T::zero();
                match edge.reset.get(v) {
                    None => coeffs.push((state_var(step - 1, v, Side::Out), -T::one())),
                    Some(expr) => {
                        for (src, k) in &expr.terms {
                            coeffs.push((state_var(step - 1, src, Side::Out), -k.clone()));
                        }
                        rhs = expr.constant.clone();
                    }
                }
                emit(
                    LinearConstraint::new(coeffs, RelOp::Eq, rhs),
                    Tag { step, kind: TagKind::Reset },
                    &mut constraints,
                    &mut tags,
                );
            }
        }

        // t_step >= 0
        emit(
            LinearConstraint::atom(dwell_var(step), RelOp::Ge, T::zero()),
            Tag { step, kind: TagKind::DwellNonneg },
            &mut constraints,
            &mut tags,
        );

        // Flow: lo*t <= out - in <= hi*t, one equality when lo == hi.
        for v in &a.variables {
            let (lo, hi) = loc
                .flow
                .get(v)
                .ok_or_else(|| EncodeError::Malformed(step, format!("missing flow for {v}")))?;
            let delta = |rate: &T| {
                vec![
                    (state_var(step, v, Side::Out), T::one()),
                    (state_var(step, v, Side::In), -T::one()),
                    (dwell_var(step), -rate.clone()),
                ]
            };
            if lo == hi {
                emit(
                    LinearConstraint::new(delta(lo), RelOp::Eq, T::zero()),
                    Tag { step, kind: TagKind::Flow },
                    &mut constraints,
                    &mut tags,
                );
            } else {
                emit(
                    LinearConstraint::new(delta(lo), RelOp::Ge, T::zero()),
                    Tag { step, kind: TagKind::Flow },
                    &mut constraints,
                    &mut tags,
                );
                emit(
                    LinearConstraint::new(delta(hi), RelOp::Le, T::zero()),
                    Tag { step, kind: TagKind::Flow },
                    &mut constraints,
                    &mut tags,
                );
            }
        }

        for c in &loc.invariant {
            emit(
                instantiate(c, step, Side::In),
                Tag { step, kind: TagKind::InvariantIn },
                &mut constraints,
                &mut tags,
            );
        }
        for c in &loc.invariant {
            emit(
                instantiate(c, step, Side::Out),
                Tag { step, kind: TagKind::InvariantOut },
                &mut constraints,
                &mut tags,
            );
        }

        if step + 1 < n_steps {
            let edge = a.edge(&path.edges[step]).unwrap();
            for c in &edge.guard {
                emit(
                    instantiate(c, step, Side::Out),
                    Tag { step, kind: TagKind::Guard },
                    &mut constraints,
                    &mut tags,
                );
            }
        }
    }

    for c in target {
        for v in c.variables() {
            if !a.variables.iter().any(|x| x == v) {
                return Err(EncodeError::BadTarget(v.to_string()));
            }
        }
        emit(
            instantiate(c, n_steps - 1, Side::Out),
            Tag { step: n_steps - 1, kind: TagKind::Target },
            &mut constraints,
            &mut tags,
        );
    }

    Ok(EncodedPath {
        system: ConstraintSystem::new(variables, constraints),
        var_index,
        dwell_index,
        tags,
        path: path.clone(),
    })
}

/// Contiguous sub-path of an encoded path, the localization of an IIS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSegment {
    pub start_step: usize,
    pub end_step: usize,
    pub locations: Vec<String>,
    pub edges: Vec<String>,
}

impl PathSegment {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, loc) in self.locations.iter().enumerate() {
            if i > 0 {
                out.push(' ');
                out.push_str(&self.edges[i - 1]);
                out.push(' ');
            }
            out.push_str(loc);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum PathFeasibility {
    FeasibleRun { run: Run<Rat>, plan: Plan<Rat> },
    InfeasiblePath { iis: Iis, segment: PathSegment },
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error("internal: {0}")]
    Internal(String),
}

/// Map an IIS back to the contiguous slice of the path spanned by its tags.
pub fn segment_of_iis(encoded: &EncodedPath<Rat>, iis: &Iis) -> PathSegment {
    let steps: Vec<usize> = iis.indices.iter().map(|i| encoded.tags[*i].step).collect();
    let start = steps.iter().copied().min().unwrap_or(0);
    let end = steps.iter().copied().max().unwrap_or(0);
    PathSegment {
        start_step: start,
        end_step: end,
        locations: encoded.path.locations[start..=end].to_vec(),
        edges: encoded.path.edges[start..end].to_vec(),
    }
}

/// Verdict-and-witness path check without IIS extraction; the workhorse of
/// reachability scans, where infeasible paths need no explanation artifact.
pub fn path_feasible(
    p: &PlanningProblem<Rat>,
    path: &AbstractPath,
    target: &[LinearConstraint<Rat>],
) -> Result<Option<(Run<Rat>, Plan<Rat>)>, CheckError> {
    let encoded = encode_path(p, path, target)?;
    match fast_feasible(&encoded.system)? {
        FastOutcome::Feasible { point } => {
            let run = run_from_witness(p, &encoded, &point)?;
            let plan = extract_plan(&run);
            Ok(Some((run, plan)))
        }
        FastOutcome::Infeasible => Ok(None),
    }
}

/// Decide a path: a witness run and plan on success, an IIS and its segment
/// on failure. Spec op `check_path`.
pub fn check_path(
    p: &PlanningProblem<Rat>,
    path: &AbstractPath,
    target: &[LinearConstraint<Rat>],
) -> Result<PathFeasibility, CheckError> {
    let encoded = encode_path(p, path, target)?;
    match fast_feasible(&encoded.system)? {
        FastOutcome::Feasible { point } => {
            let run = run_from_witness(p, &encoded, &point)?;
            let plan = extract_plan(&run);
            Ok(PathFeasibility::FeasibleRun { run, plan })
        }
        FastOutcome::Infeasible => {
            let iis = match deletion_filter_iis(&encoded.system) {
                Ok(iis) => iis,
                Err(IisError::NotInfeasible) => {
                    return Err(CheckError::Internal("verdict flipped during IIS".into()))
                }
                Err(IisError::Feasibility(e)) => return Err(e.into()),
            };
            let segment = segment_of_iis(&encoded, &iis);
            Ok(PathFeasibility::InfeasiblePath { iis, segment })
        }
    }
}

fn run_from_witness(
    p: &PlanningProblem<Rat>,
    encoded: &EncodedPath<Rat>,
    point: &[Rat],
) -> Result<Run<Rat>, CheckError> {
    let a = &p.automaton;
    let n_steps = encoded.path.locations.len();
    let mut steps = Vec::with_capacity(n_steps);
    for step in 0..n_steps {
        let mut entry = Valuation::new();
        let mut exit = Valuation::new();
        for v in &a.variables {
            let iin = encoded.var_index[&(step, v.clone(), Side::In)];
            let iout = encoded.var_index[&(step, v.clone(), Side::Out)];
            entry.insert(v.clone(), point[iin].clone());
            exit.insert(v.clone(), point[iout].clone());
        }
        let dwell = point[encoded.dwell_index[&step]].clone();
        let edge = if step + 1 < n_steps {
            Some(encoded.path.edges[step].clone())
        } else {
            None
        };
        steps.push(RunStep { location: encoded.path.locations[step].clone(), entry, dwell, exit, edge });
    }
    Ok(Run { steps })
}

/// Timed plan of a run: action `k` (the label of edge `k`) fires at the
/// cumulative dwell through step `k`; the makespan is the total dwell.
/// Spec op `extract_plan`.
pub fn extract_plan(r: &Run<Rat>) -> Plan<Rat> {
    let mut steps = Vec::new();
    let mut clock = Rat::zero();
    let mut makespan = Rat::zero();
    for s in &r.steps {
        makespan += &s.dwell;
    }
    for s in &r.steps {
        clock += &s.dwell;
        if s.edge.is_some() {
            steps.push((clock.clone(), s.edge.clone().unwrap()));
        }
    }
    Plan { steps, makespan }
}

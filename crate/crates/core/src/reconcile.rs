//! Model reconciliation between a human and an agent automaton.
//!
//! The human enumerates candidate paths from its own graph; each one is
//! first replayed in the agent's discrete graph (the first missing edge is
//! recorded and pruned from the working human graph), then checked against
//! the human's continuous dynamics (infeasible paths and their extensions
//! are discarded), and finally validated against the agent's dynamics, where
//! the deletion-filter IIS localizes the failure to a path segment. Recorded
//! invalid edges, infeasible-path prefixes and bad segments prune later
//! paths before any solving.

use crate::encode::{check_path, path_feasible, CheckError, PathFeasibility, PathSegment};
use crate::graph::{abstract_graph, AbstractPath, Arc, LocGraph};
use crate::iis::Iis;
use crate::model::{Plan, PlanningProblem};
use crate::scalar::Rat;
use std::collections::{BTreeSet, VecDeque};
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct ModelPair {
    pub human: PlanningProblem<Rat>,
    pub agent: PlanningProblem<Rat>,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum PairError {
    #[error("human location {0} does not resolve in the agent model")]
    UnsharedLocation(String),
    #[error("variable lists differ between the models")]
    VariableMismatch,
    #[error("problem descriptions (init/goal/depth/required visits) differ")]
    ProblemMismatch,
}

impl ModelPair {
    /// Check the pairing assumptions: shared location namespace, identical
    /// variables, identical problem description.
    pub fn validate(&self) -> Result<(), PairError> {
        for l in &self.human.automaton.locations {
            if self.agent.automaton.location(&l.id).is_none() {
                return Err(PairError::UnsharedLocation(l.id.clone()));
            }
        }
        if self.human.automaton.variables != self.agent.automaton.variables {
            return Err(PairError::VariableMismatch);
        }
        let same_state = |a: &crate::model::StateSet<Rat>, b: &crate::model::StateSet<Rat>| {
            a.location == b.location && a.constraints == b.constraints
        };
        if !same_state(&self.human.init, &self.agent.init)
            || !same_state(&self.human.goal, &self.agent.goal)
            || self.human.depth != self.agent.depth
            || self.human.required_visits != self.agent.required_visits
        {
            return Err(PairError::ProblemMismatch);
        }
        Ok(())
    }
}

/// First edge of the path missing from the agent graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvalidEdge {
    pub edge_id: String,
    pub source: String,
    pub target: String,
    /// Edge position on the witnessing path.
    pub position: usize,
}

/// Replay a path's (source, target) pairs in the agent graph; the first pair
/// with no agent arc is the invalid edge. Spec op `discrete_feasibility`.
pub fn discrete_feasibility(path: &AbstractPath, agent: &LocGraph) -> Result<(), InvalidEdge> {
    for (i, edge_id) in path.edges.iter().enumerate() {
        let (source, target) = (&path.locations[i], &path.locations[i + 1]);
        let exists = agent
            .arcs
            .iter()
            .any(|a| a.source == *source && a.target == *target);
        if !exists {
            return Err(InvalidEdge {
                edge_id: edge_id.clone(),
                source: source.clone(),
                target: target.clone(),
                position: i,
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub enum HumanFeasibility {
    Feasible { plan: Plan<Rat> },
    Infeasible,
}

/// Continuous feasibility of the path in the human model against the goal
/// set. Spec op `human_feasibility`.
pub fn human_feasibility(
    path: &AbstractPath,
    human: &PlanningProblem<Rat>,
) -> Result<HumanFeasibility, CheckError> {
    match path_feasible(human, path, &human.goal.constraints)? {
        Some((_, plan)) => Ok(HumanFeasibility::Feasible { plan }),
        None => Ok(HumanFeasibility::Infeasible),
    }
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum AgentIisError {
    #[error("the agent encoding of the path is feasible")]
    NotInfeasible,
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// IIS extraction on the agent encoding of an agent-replayable path. The
/// deletion filter yields one IIS, so the list carries one entry.
/// Spec op `agent_iis`.
pub fn agent_iis(
    path: &AbstractPath,
    agent: &PlanningProblem<Rat>,
) -> Result<Vec<(Iis, PathSegment)>, AgentIisError> {
    match check_path(agent, path, &agent.goal.constraints)? {
        PathFeasibility::FeasibleRun { .. } => Err(AgentIisError::NotInfeasible),
        PathFeasibility::InfeasiblePath { iis, segment } => Ok(vec![(iis, segment)]),
    }
}

/// How one enumerated human path was handled; the dispositions partition the
/// enumerated path set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Disposition {
    /// Skipped: uses an edge already recorded invalid.
    PrunedByEdge,
    /// Skipped: extends a recorded infeasible path.
    PrunedByPrefix,
    /// Skipped: contains a recorded IIS segment.
    PrunedBySegment,
    /// Replay in the agent graph failed; the first missing edge was recorded.
    InvalidEdge,
    /// Infeasible in the human model's own dynamics.
    HumanInfeasible,
    /// Agent-infeasible; an IIS segment was extracted.
    AgentIis,
    /// Feasible in the agent model: the reconciliation premise fails.
    AgentFeasible,
}

#[derive(Clone, Debug)]
pub struct SegmentRecord {
    pub segment: PathSegment,
    pub iis: Iis,
    pub witness_path: AbstractPath,
}

#[derive(Clone, Debug)]
pub struct InvalidEdgeRecord {
    pub edge: InvalidEdge,
    pub witness_path: AbstractPath,
}

#[derive(Clone, Debug)]
pub enum ReconcileOutcome {
    /// Every enumerated path was refuted; the models agree on unsolvability.
    Reconciled,
    /// A human path is feasible in the agent model: the problem is solvable
    /// and no reconciliation is needed.
    HumanHasValidAgentPlan { path: AbstractPath, plan: Plan<Rat> },
}

#[derive(Clone, Debug, Default)]
pub struct ReconcileStats {
    pub paths_enumerated: usize,
    pub lp_checks: usize,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug)]
pub struct ReconciliationReport {
    pub invalid_edges: Vec<InvalidEdgeRecord>,
    pub human_infeasible: Vec<AbstractPath>,
    pub agent_infeasible: Vec<AbstractPath>,
    pub iis_segments: Vec<SegmentRecord>,
    pub dispositions: Vec<(AbstractPath, Disposition)>,
    pub outcome: ReconcileOutcome,
    /// Human model with the invalid edges removed.
    pub updated_human: PlanningProblem<Rat>,
    pub stats: ReconcileStats,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum ReconcileError {
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error("path budget exceeded after {0} paths")]
    PathBudgetExceeded(usize),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

fn is_prefix(shorter: &AbstractPath, longer: &AbstractPath) -> bool {
    shorter.edges.len() <= longer.edges.len()
        && shorter.edges == longer.edges[..shorter.edges.len()]
        && shorter.locations == longer.locations[..shorter.locations.len()]
}

fn contains_segment(path: &AbstractPath, seg: &PathSegment) -> bool {
    let n = seg.locations.len();
    if n == 0 || path.locations.len() < n {
        return false;
    }
    (0..=path.locations.len() - n).any(|at| {
        path.locations[at..at + n] == seg.locations[..]
            && path.edges[at..at + n - 1] == seg.edges[..]
    })
}

/// Map a human path onto agent edge ids by (source, target) lookup; the
/// caller has already established that every pair resolves.
fn map_to_agent(path: &AbstractPath, agent: &LocGraph) -> Option<AbstractPath> {
    let mut edges = Vec::with_capacity(path.edges.len());
    for i in 0..path.edges.len() {
        let arc = agent.arcs.iter().find(|a| {
            a.source == path.locations[i] && a.target == path.locations[i + 1]
        })?;
        edges.push(arc.edge_id.clone());
    }
    Some(AbstractPath { locations: path.locations.clone(), edges })
}

/// The reconciliation loop. Spec op `reconcile`.
pub fn reconcile(pair: &ModelPair, budget: usize) -> Result<ReconciliationReport, ReconcileError> {
    pair.validate()?;
    let started = Instant::now();
    let agent_graph = abstract_graph(&pair.agent.automaton);
    let mut working = abstract_graph(&pair.human.automaton);

    let mut invalid_edges: Vec<InvalidEdgeRecord> = Vec::new();
    let mut invalid_ids: BTreeSet<String> = BTreeSet::new();
    let mut human_infeasible: Vec<AbstractPath> = Vec::new();
    let mut agent_infeasible: Vec<AbstractPath> = Vec::new();
    let mut segments: Vec<SegmentRecord> = Vec::new();
    let mut dispositions: Vec<(AbstractPath, Disposition)> = Vec::new();
    let mut stats = ReconcileStats::default();

    // Hop counts toward the goal on the working graph; recomputed whenever
    // an edge is deleted. Walks that cannot complete within the depth are
    // never enqueued (a sound prune: distances only grow under deletion).
    fn goal_distances(g: &LocGraph, goal: &str) -> std::collections::BTreeMap<String, usize> {
        let mut dist = std::collections::BTreeMap::from([(goal.to_string(), 0usize)]);
        let mut frontier = VecDeque::from([goal.to_string()]);
        while let Some(v) = frontier.pop_front() {
            let d = dist[&v];
            for a in g.arcs.iter().filter(|a| a.target == v) {
                if !dist.contains_key(&a.source) {
                    dist.insert(a.source.clone(), d + 1);
                    frontier.push_back(a.source.clone());
                }
            }
        }
        dist
    }
    let mut dist = goal_distances(&working, &pair.human.goal.location);
    fn out_index(g: &LocGraph) -> std::collections::BTreeMap<String, Vec<Arc>> {
        let mut out: std::collections::BTreeMap<String, Vec<Arc>> = Default::default();
        for a in &g.arcs {
            out.entry(a.source.clone()).or_default().push(a.clone());
        }
        out
    }
    let mut out_arcs = out_index(&working);

    // Live breadth-first walk over the working human graph: deleting an edge
    // stops all further expansion through it immediately.
    let mut queue: VecDeque<AbstractPath> = VecDeque::new();
    if working.vertices.iter().any(|v| *v == pair.human.init.location) {
        queue.push_back(AbstractPath {
            locations: vec![pair.human.init.location.clone()],
            edges: vec![],
        });
    }
    let mut outcome: Option<ReconcileOutcome> = None;

    'walk: while let Some(path) = queue.pop_front() {
        if path.len() < pair.human.depth {
            let remaining = pair.human.depth - path.len() - 1;
            let last = path.locations.last().unwrap();
            for arc in out_arcs.get(last).map(|v| v.as_slice()).unwrap_or(&[]) {
                match dist.get(&arc.target) {
                    Some(d) if *d <= remaining => {}
                    _ => continue,
                }
                let mut next = path.clone();
                next.locations.push(arc.target.clone());
                next.edges.push(arc.edge_id.clone());
                queue.push_back(next);
            }
        }
        if path.locations.last() != Some(&pair.human.goal.location) {
            continue;
        }
        if !pair.human.required_visits.iter().all(|v| path.locations.iter().any(|l| l == v)) {
            continue;
        }

        // An enumerated candidate path.
        if stats.paths_enumerated == budget {
            return Err(ReconcileError::PathBudgetExceeded(stats.paths_enumerated));
        }
        stats.paths_enumerated += 1;

        // Pruning gates, in recording-strength order.
        if path.edges.iter().any(|e| invalid_ids.contains(e)) {
            dispositions.push((path, Disposition::PrunedByEdge));
            continue;
        }
        if human_infeasible.iter().chain(&agent_infeasible).any(|p| is_prefix(p, &path)) {
            dispositions.push((path, Disposition::PrunedByPrefix));
            continue;
        }
        if segments.iter().any(|s| contains_segment(&path, &s.segment)) {
            dispositions.push((path, Disposition::PrunedBySegment));
            continue;
        }

        // Step 1: discrete replay in the agent graph.
        if let Err(invalid) = discrete_feasibility(&path, &agent_graph) {
            invalid_ids.insert(invalid.edge_id.clone());
            working.arcs.retain(|a| a.edge_id != invalid.edge_id);
            dist = goal_distances(&working, &pair.human.goal.location);
            out_arcs = out_index(&working);
            invalid_edges.push(InvalidEdgeRecord { edge: invalid, witness_path: path.clone() });
            dispositions.push((path, Disposition::InvalidEdge));
            continue;
        }

        // Step 2: continuous feasibility in the human model.
        stats.lp_checks += 1;
        match human_feasibility(&path, &pair.human)? {
            HumanFeasibility::Infeasible => {
                human_infeasible.push(path.clone());
                dispositions.push((path, Disposition::HumanInfeasible));
                continue;
            }
            HumanFeasibility::Feasible { .. } => {}
        }

        // Step 3: validation in the agent model.
        let agent_path = map_to_agent(&path, &agent_graph).ok_or_else(|| {
            ReconcileError::Internal("replayable path lost its agent counterpart".into())
        })?;
        stats.lp_checks += 1;
        match check_path(&pair.agent, &agent_path, &pair.agent.goal.constraints)? {
            PathFeasibility::FeasibleRun { plan, .. } => {
                dispositions.push((path.clone(), Disposition::AgentFeasible));
                outcome = Some(ReconcileOutcome::HumanHasValidAgentPlan { path, plan });
                break 'walk;
            }
            PathFeasibility::InfeasiblePath { iis, segment } => {
                agent_infeasible.push(path.clone());
                segments.push(SegmentRecord { segment, iis, witness_path: agent_path });
                dispositions.push((path, Disposition::AgentIis));
            }
        }
    }

    let mut updated_human = pair.human.clone();
    updated_human
        .automaton
        .edges
        .retain(|e| !invalid_ids.contains(&e.id));

    stats.elapsed_ms = started.elapsed().as_millis();
    Ok(ReconciliationReport {
        invalid_edges,
        human_infeasible,
        agent_infeasible,
        iis_segments: segments,
        dispositions,
        outcome: outcome.unwrap_or(ReconcileOutcome::Reconciled),
        updated_human,
        stats,
    })
}

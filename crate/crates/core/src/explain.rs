//! Waypoint-chain explanation pipeline.
//!
//! Enumerate the bounded initial-to-goal paths, fold their location strings
//! into a common subsequence, turn it into a chain of per-location
//! sub-problems, then walk the chain checking bounded reachability of each
//! waypoint. The first unreachable waypoint is the explanation. If every
//! waypoint is reachable the true goal set is checked as well: reaching it
//! means the problem is actually solvable and the report carries the witness
//! plan instead of an explanation.

use crate::constraint::LinearConstraint;
use crate::encode::{path_feasible, CheckError};
use crate::graph::{abstract_graph, AbstractPath, PathEnumerator, PathMode, DEFAULT_PATH_BUDGET};
use crate::model::{Plan, PlanningProblem, Run};
use crate::scalar::Rat;
use crate::subseq::{
    build_chain, common_subsequence, is_common_subsequence, is_locally_maximal, WaypointChain,
    DEFAULT_DP_BUDGET,
};
use std::collections::BTreeSet;
use std::time::Instant;

#[derive(Clone, Debug)]
pub enum ReachOutcome {
    Reachable { path: AbstractPath, run: Run<Rat>, plan: Plan<Rat> },
    Unreachable { paths_checked: usize },
    Budget { reason: String },
}

impl ReachOutcome {
    pub fn is_reachable(&self) -> bool {
        matches!(self, ReachOutcome::Reachable { .. })
    }
}

/// What a waypoint status was checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetKind {
    /// The location invariant (waypoint sub-problem).
    Invariant,
    /// The problem's goal set (final solvability check).
    GoalSet,
}

#[derive(Clone, Debug)]
pub struct WaypointStatus {
    pub location: String,
    pub target: TargetKind,
    pub outcome: ReachOutcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Explained,
    DiscreteUnsolvable,
    Solvable,
    Inconclusive,
}

#[derive(Clone, Debug, Default)]
pub struct ExplainStats {
    pub num_paths: usize,
    pub dedup_paths: usize,
    pub lcs_exact: bool,
    /// None when the maximality audit was skipped for size.
    pub lcs_locally_maximal: Option<bool>,
    pub elapsed_ms: u128,
    pub peak_paths_in_memory: usize,
}

#[derive(Clone, Debug)]
pub struct ExplanationReport {
    /// Chain locations (the common subsequence); empty when the problem is
    /// discretely unsolvable.
    pub chain: Vec<String>,
    /// Statuses in chain order, truncated at the first unreachable waypoint;
    /// a trailing goal-set entry appears when the chain was fully reachable.
    pub statuses: Vec<WaypointStatus>,
    /// Index into `statuses` of the explanation, when one exists.
    pub explanation: Option<usize>,
    pub outcome: Outcome,
    /// Witness plan when the problem turned out solvable.
    pub witness: Option<Plan<Rat>>,
    pub stats: ExplainStats,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum ExplainError {
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

#[derive(Clone, Debug)]
pub struct ExplainOptions {
    pub mode: PathMode,
    pub path_budget: usize,
    pub dp_budget: usize,
    pub jobs: usize,
}

impl Default for ExplainOptions {
    fn default() -> Self {
        ExplainOptions {
            mode: PathMode::Walks,
            path_budget: DEFAULT_PATH_BUDGET,
            dp_budget: DEFAULT_DP_BUDGET,
            jobs: 1,
        }
    }
}

/// Result of the chain-construction phase.
#[derive(Clone, Debug)]
pub enum WaypointsOutcome {
    Chain { chain: WaypointChain<Rat>, stats: ExplainStats },
    /// No bounded path connects the initial and goal locations.
    DiscreteUnsolvable,
    PathBudgetExceeded,
}

/// Enumerate the bounded path strings (honoring required visits), fold them,
/// and build the waypoint chain. Spec op `compute_waypoints`.
pub fn compute_waypoints(
    p: &PlanningProblem<Rat>,
    opts: &ExplainOptions,
) -> Result<WaypointsOutcome, ExplainError> {
    let g = abstract_graph(&p.automaton);
    let visits = if p.required_visits.is_empty() {
        None
    } else {
        Some(p.required_visits.clone())
    };
    let mut enumerator = PathEnumerator::new(
        &g,
        &p.init.location,
        &p.goal.location,
        p.depth,
        opts.mode,
        visits,
        opts.path_budget,
    );
    let mut strings: Vec<Vec<String>> = Vec::new();
    let mut num_paths = 0usize;
    for item in &mut enumerator {
        match item {
            Ok(path) => {
                num_paths += 1;
                strings.push(path.path_string());
            }
            Err(_) => return Ok(WaypointsOutcome::PathBudgetExceeded),
        }
    }
    let peak = enumerator.peak_queue();
    if strings.is_empty() {
        return Ok(WaypointsOutcome::DiscreteUnsolvable);
    }
    strings.sort();
    strings.dedup();
    let dedup_paths = strings.len();

    let (subseq, lcs_exact) = common_subsequence(&strings, opts.dp_budget);
    if !is_common_subsequence(&subseq, &strings) {
        return Err(ExplainError::Internal("fold output is not a common subsequence".into()));
    }
    let lcs_locally_maximal = if dedup_paths <= 10_000 {
        let alphabet: Vec<String> = {
            let mut set = BTreeSet::new();
            for s in &strings {
                set.extend(s.iter().cloned());
            }
            set.into_iter().collect()
        };
        Some(is_locally_maximal(&subseq, &strings, &alphabet))
    } else {
        None
    };

    let chain = build_chain(&subseq, p)
        .map_err(|e| ExplainError::Internal(format!("chain construction failed: {e}")))?;
    Ok(WaypointsOutcome::Chain {
        chain,
        stats: ExplainStats {
            num_paths,
            dedup_paths,
            lcs_exact,
            lcs_locally_maximal,
            elapsed_ms: 0,
            peak_paths_in_memory: peak.max(num_paths),
        },
    })
}

/// Bounded reachability of one target set at one location: walk the paths in
/// breadth-first order and return the first feasible one as a witness.
///
/// `visits` constrains the discrete paths (used for the true-goal check when
/// the problem carries explicit sub-tasks); waypoint checks pass `None`.
///
/// When the target is the location invariant, the constraints of a path are
/// a subset of the constraints of any walk extending it, so an infeasible
/// path condemns all its extensions. `prune_prefixes` enables that skip; the
/// verdict and the enumerated count are unchanged either way.
pub fn reach_target(
    p: &PlanningProblem<Rat>,
    location: &str,
    target: &[LinearConstraint<Rat>],
    visits: Option<&BTreeSet<String>>,
    prune_prefixes: bool,
    opts: &ExplainOptions,
) -> Result<ReachOutcome, ExplainError> {
    let g = abstract_graph(&p.automaton);
    let enumerator = PathEnumerator::new(
        &g,
        &p.init.location,
        location,
        p.depth,
        opts.mode,
        visits.cloned(),
        opts.path_budget,
    );
    let mut checked = 0usize;
    let batch_size = if opts.jobs > 1 { opts.jobs * 4 } else { 64 };
    let mut batch: Vec<AbstractPath> = Vec::with_capacity(batch_size);
    let mut budget_hit = false;
    let mut infeasible_keys: std::collections::HashSet<String> = Default::default();

    let key_of = |path: &AbstractPath, upto_locs: usize| -> String {
        let mut s = String::new();
        for i in 0..upto_locs {
            if i > 0 {
                s.push('\x1f');
                s.push_str(&path.edges[i - 1]);
                s.push('\x1f');
            }
            s.push_str(&path.locations[i]);
        }
        s
    };
    let known_infeasible = |path: &AbstractPath, keys: &std::collections::HashSet<String>| {
        if keys.is_empty() {
            return false;
        }
        (1..path.locations.len()).any(|n| {
            path.locations[n - 1] == location && keys.contains(&key_of(path, n))
        })
    };

    let process = |batch: &mut Vec<AbstractPath>,
                       checked: &mut usize,
                       infeasible_keys: &mut std::collections::HashSet<String>|
     -> Result<Option<ReachOutcome>, ExplainError> {
        let todo: Vec<(usize, AbstractPath)> = batch
            .iter()
            .enumerate()
            .filter(|(_, path)| !(prune_prefixes && known_infeasible(path, infeasible_keys)))
            .map(|(i, path)| (i, path.clone()))
            .collect();
        type Checked = Result<Option<(crate::model::Run<Rat>, crate::model::Plan<Rat>)>, CheckError>;
        let results: Vec<(usize, Checked)> = if opts.jobs > 1 {
            let chunk = todo.len().div_ceil(opts.jobs).max(1);
            std::thread::scope(|scope| {
                let handles: Vec<_> = todo
                    .chunks(chunk)
                    .map(|paths| {
                        scope.spawn(move || {
                            paths
                                .iter()
                                .map(|(i, path)| (*i, path_feasible(p, path, target)))
                                .collect::<Vec<_>>()
                        })
                    })
                    .collect();
                handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
            })
        } else {
            todo.iter().map(|(i, path)| (*i, path_feasible(p, path, target))).collect()
        };
        // First feasible in breadth-first order wins, regardless of how the
        // batch was scheduled.
        let mut results = results.into_iter().peekable();
        for (i, path) in batch.iter().enumerate() {
            *checked += 1;
            if results.peek().is_some_and(|(j, _)| *j == i) {
                let (_, result) = results.next().unwrap();
                match result? {
                    Some((run, plan)) => {
                        return Ok(Some(ReachOutcome::Reachable {
                            path: path.clone(),
                            run,
                            plan,
                        }));
                    }
                    None => {
                        if prune_prefixes {
                            infeasible_keys.insert(key_of(path, path.locations.len()));
                        }
                    }
                }
            }
        }
        batch.clear();
        Ok(None)
    };

    for item in enumerator {
        match item {
            Ok(path) => {
                batch.push(path);
                if batch.len() >= batch_size {
                    if let Some(outcome) = process(&mut batch, &mut checked, &mut infeasible_keys)? {
                        return Ok(outcome);
                    }
                }
            }
            Err(_) => {
                budget_hit = true;
                break;
            }
        }
    }
    if !batch.is_empty() {
        if let Some(outcome) = process(&mut batch, &mut checked, &mut infeasible_keys)? {
            return Ok(outcome);
        }
    }
    if budget_hit {
        return Ok(ReachOutcome::Budget { reason: "path budget exceeded".into() });
    }
    Ok(ReachOutcome::Unreachable { paths_checked: checked })
}

/// Reachability of the waypoint sub-problem at `location` (goal set = the
/// location invariant). Spec op `reach_subproblem`.
pub fn reach_subproblem(
    p: &PlanningProblem<Rat>,
    location: &str,
    opts: &ExplainOptions,
) -> Result<ReachOutcome, ExplainError> {
    let target = p
        .automaton
        .location(location)
        .map(|l| l.invariant.clone())
        .ok_or_else(|| ExplainError::Internal(format!("unknown location {location}")))?;
    reach_target(p, location, &target, None, true, opts)
}

/// The full pipeline. Spec op `explain_unsolvability`.
pub fn explain_unsolvability(
    p: &PlanningProblem<Rat>,
    opts: &ExplainOptions,
) -> Result<ExplanationReport, ExplainError> {
    let started = Instant::now();
    let done = |mut report: ExplanationReport| {
        report.stats.elapsed_ms = started.elapsed().as_millis();
        Ok(report)
    };
    let empty_report = |outcome: Outcome| ExplanationReport {
        chain: Vec::new(),
        statuses: Vec::new(),
        explanation: None,
        outcome,
        witness: None,
        stats: ExplainStats::default(),
    };

    let (chain, stats) = match compute_waypoints(p, opts)? {
        WaypointsOutcome::Chain { chain, stats } => (chain, stats),
        WaypointsOutcome::DiscreteUnsolvable => {
            return done(empty_report(Outcome::DiscreteUnsolvable));
        }
        WaypointsOutcome::PathBudgetExceeded => {
            return done(empty_report(Outcome::Inconclusive));
        }
    };

    let mut statuses: Vec<WaypointStatus> = Vec::with_capacity(chain.len() + 1);
    for wp in &chain.waypoints {
        let outcome = reach_target(p, &wp.location, &wp.goal, None, true, opts)?;
        let stop = !outcome.is_reachable();
        let budget = matches!(outcome, ReachOutcome::Budget { .. });
        statuses.push(WaypointStatus {
            location: wp.location.clone(),
            target: TargetKind::Invariant,
            outcome,
        });
        if stop {
            let outcome = if budget { Outcome::Inconclusive } else { Outcome::Explained };
            let explanation = (!budget).then_some(statuses.len() - 1);
            return done(ExplanationReport {
                chain: chain.locations(),
                statuses,
                explanation,
                outcome,
                witness: None,
                stats,
            });
        }
    }

    // Every waypoint is reachable; decide the problem itself against its
    // goal set, honoring the explicit sub-tasks.
    let visits = (!p.required_visits.is_empty()).then(|| p.required_visits.clone());
    let goal_outcome = reach_target(
        p,
        &p.goal.location,
        &p.goal.constraints,
        visits.as_ref(),
        false,
        opts,
    )?;
    let (outcome, explanation, witness) = match &goal_outcome {
        ReachOutcome::Reachable { plan, .. } => (Outcome::Solvable, None, Some(plan.clone())),
        ReachOutcome::Unreachable { .. } => (Outcome::Explained, Some(statuses.len()), None),
        ReachOutcome::Budget { .. } => (Outcome::Inconclusive, None, None),
    };
    statuses.push(WaypointStatus {
        location: p.goal.location.clone(),
        target: TargetKind::GoalSet,
        outcome: goal_outcome,
    });
    done(ExplanationReport { chain: chain.locations(), statuses, explanation, outcome, witness, stats })
}

//! Report documents: JSON builders and the text renderer.
//!
//! The JSON value is the report of record (schemas ship under `schemas/`);
//! the text form is a pure function of that JSON value, so the two can never
//! disagree. All rationals render in the canonical exact form.

use hxplain_core::explain::{
    ExplanationReport, Outcome, ReachOutcome, TargetKind, WaypointStatus,
};
use hxplain_core::model::Plan;
use hxplain_core::reconcile::{Disposition, ReconcileOutcome, ReconciliationReport};
use hxplain_core::Rat;
use hxplain_io::format_rat;
use serde_json::{json, Map, Value};

fn plan_json(plan: &Plan<Rat>) -> Value {
    json!({
        "steps": plan.steps.iter().map(|(t, a)| json!([format_rat(t), a])).collect::<Vec<_>>(),
        "makespan": format_rat(&plan.makespan),
    })
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Explained => "explained",
        Outcome::DiscreteUnsolvable => "discrete_unsolvable",
        Outcome::Solvable => "solvable",
        Outcome::Inconclusive => "inconclusive",
    }
}

fn status_json(s: &WaypointStatus) -> Value {
    let target = match s.target {
        TargetKind::Invariant => "invariant",
        TargetKind::GoalSet => "goal_set",
    };
    match &s.outcome {
        ReachOutcome::Reachable { path, run: _, plan } => json!({
            "loc": s.location,
            "target": target,
            "outcome": "reachable",
            "witness_path": path.render(),
            "witness": plan_json(plan),
        }),
        ReachOutcome::Unreachable { paths_checked } => json!({
            "loc": s.location,
            "target": target,
            "outcome": "unreachable",
            "paths_checked": paths_checked,
        }),
        ReachOutcome::Budget { reason } => json!({
            "loc": s.location,
            "target": target,
            "outcome": "budget",
            "reason": reason,
        }),
    }
}

/// Problem identification block shared by both report kinds.
pub fn problem_json(name: &str, p: &hxplain_core::Problem) -> Value {
    json!({
        "name": name,
        "init": p.init.location,
        "goal": p.goal.location,
        "depth": p.depth,
        "required_visits": p.required_visits.iter().cloned().collect::<Vec<_>>(),
    })
}

pub fn explain_json(problem: Value, report: &ExplanationReport) -> Value {
    let explanation = report
        .explanation
        .map(|i| Value::String(report.statuses[i].location.clone()))
        .unwrap_or(Value::Null);
    json!({
        "kind": "explain",
        "problem": problem,
        "chain": report.chain,
        "statuses": report.statuses.iter().map(status_json).collect::<Vec<_>>(),
        "explanation": explanation,
        "outcome": outcome_name(report.outcome),
        "witness": report.witness.as_ref().map(plan_json).unwrap_or(Value::Null),
        "stats": {
            "num_paths": report.stats.num_paths,
            "dedup_paths": report.stats.dedup_paths,
            "lcs_exact": report.stats.lcs_exact,
            "lcs_locally_maximal": report.stats.lcs_locally_maximal,
            "elapsed_ms": report.stats.elapsed_ms,
            "peak_paths_in_memory": report.stats.peak_paths_in_memory,
        },
    })
}

fn disposition_name(d: Disposition) -> &'static str {
    match d {
        Disposition::PrunedByEdge => "pruned_by_edge",
        Disposition::PrunedByPrefix => "pruned_by_prefix",
        Disposition::PrunedBySegment => "pruned_by_segment",
        Disposition::InvalidEdge => "invalid_edge",
        Disposition::HumanInfeasible => "human_infeasible",
        Disposition::AgentIis => "agent_iis",
        Disposition::AgentFeasible => "agent_feasible",
    }
}

pub fn reconcile_json(human: Value, agent: Value, report: &ReconciliationReport) -> Value {
    let outcome = match &report.outcome {
        ReconcileOutcome::Reconciled => json!("reconciled"),
        ReconcileOutcome::HumanHasValidAgentPlan { path, plan } => json!({
            "human_has_valid_agent_plan": {
                "path": path.render(),
                "plan": plan_json(plan),
            }
        }),
    };
    json!({
        "kind": "reconcile",
        "human": human,
        "agent": agent,
        "invalid_edges": report.invalid_edges.iter().map(|r| json!({
            "edge": r.edge.edge_id,
            "source": r.edge.source,
            "target": r.edge.target,
            "position": r.edge.position,
            "witness_path": r.witness_path.render(),
        })).collect::<Vec<_>>(),
        "iis_segments": report.iis_segments.iter().map(|s| json!({
            "segment": s.segment.render(),
            "start_step": s.segment.start_step,
            "end_step": s.segment.end_step,
            "iis_size": s.iis.indices.len(),
            "witness_path": s.witness_path.render(),
        })).collect::<Vec<_>>(),
        "human_infeasible": report.human_infeasible.iter().map(|p| p.render()).collect::<Vec<_>>(),
        "agent_infeasible": report.agent_infeasible.iter().map(|p| p.render()).collect::<Vec<_>>(),
        "dispositions": report.dispositions.iter().map(|(p, d)| json!({
            "path": p.render(),
            "disposition": disposition_name(*d),
        })).collect::<Vec<_>>(),
        "outcome": outcome,
        "stats": {
            "paths_enumerated": report.stats.paths_enumerated,
            "lp_checks": report.stats.lp_checks,
            "elapsed_ms": report.stats.elapsed_ms,
        },
    })
}

/// Render any report JSON as text. Reads only the JSON value.
pub fn render_text(v: &Value) -> String {
    match v.get("kind").and_then(Value::as_str) {
        Some("explain") => render_explain_text(v),
        Some("reconcile") => render_reconcile_text(v),
        _ => serde_json::to_string_pretty(v).unwrap_or_default(),
    }
}

fn get_str<'v>(v: &'v Value, key: &str) -> &'v str {
    v.get(key).and_then(Value::as_str).unwrap_or("")
}

fn render_explain_text(v: &Value) -> String {
    let mut out = String::new();
    let problem = v.get("problem").cloned().unwrap_or_default();
    out.push_str(&format!(
        "problem: {} ({} -> {}, depth {})\n",
        get_str(&problem, "name"),
        get_str(&problem, "init"),
        get_str(&problem, "goal"),
        problem.get("depth").and_then(Value::as_u64).unwrap_or(0)
    ));
    out.push_str(&format!("outcome: {}\n", get_str(v, "outcome")));
    let chain: Vec<&str> = v
        .get("chain")
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(Value::as_str).collect())
        .unwrap_or_default();
    out.push_str(&format!("chain: {}\n", chain.join(" ")));
    if let Some(statuses) = v.get("statuses").and_then(Value::as_array) {
        for s in statuses {
            let loc = get_str(s, "loc");
            match get_str(s, "outcome") {
                "reachable" => out.push_str(&format!("  {loc}: reachable\n")),
                "unreachable" => out.push_str(&format!(
                    "  {loc}: unreachable ({} paths checked)\n",
                    s.get("paths_checked").and_then(Value::as_u64).unwrap_or(0)
                )),
                other => out.push_str(&format!("  {loc}: {other}\n")),
            }
        }
    }
    if let Some(expl) = v.get("explanation").and_then(Value::as_str) {
        out.push_str(&format!("explanation: {expl}\n"));
    }
    if let Some(witness) = v.get("witness").filter(|w| !w.is_null()) {
        out.push_str(&format!(
            "witness plan (makespan {}):\n",
            get_str(witness, "makespan")
        ));
        if let Some(steps) = witness.get("steps").and_then(Value::as_array) {
            for s in steps {
                if let Some([t, a]) = s.as_array().map(|x| [&x[0], &x[1]]) {
                    out.push_str(&format!(
                        "  t={}: {}\n",
                        t.as_str().unwrap_or(""),
                        a.as_str().unwrap_or("")
                    ));
                }
            }
        }
    }
    if let Some(stats) = v.get("stats") {
        out.push_str(&format!(
            "stats: paths={} dedup={} lcs={} peak={}\n",
            stats.get("num_paths").and_then(Value::as_u64).unwrap_or(0),
            stats.get("dedup_paths").and_then(Value::as_u64).unwrap_or(0),
            if stats.get("lcs_exact").and_then(Value::as_bool).unwrap_or(false) {
                "exact"
            } else {
                "fold"
            },
            stats.get("peak_paths_in_memory").and_then(Value::as_u64).unwrap_or(0),
        ));
    }
    out
}

fn render_reconcile_text(v: &Value) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "human: {}\nagent: {}\n",
        get_str(v.get("human").unwrap_or(&Value::Null), "name"),
        get_str(v.get("agent").unwrap_or(&Value::Null), "name"),
    ));
    let outcome = v.get("outcome").cloned().unwrap_or_default();
    match outcome.as_str() {
        Some(s) => out.push_str(&format!("outcome: {s}\n")),
        None => out.push_str("outcome: human_has_valid_agent_plan\n"),
    }
    if let Some(edges) = v.get("invalid_edges").and_then(Value::as_array) {
        out.push_str(&format!("invalid edges: {}\n", edges.len()));
        for e in edges {
            out.push_str(&format!(
                "  {} ({} -> {}) at position {}\n",
                get_str(e, "edge"),
                get_str(e, "source"),
                get_str(e, "target"),
                e.get("position").and_then(Value::as_u64).unwrap_or(0)
            ));
        }
    }
    if let Some(segs) = v.get("iis_segments").and_then(Value::as_array) {
        out.push_str(&format!("infeasible segments: {}\n", segs.len()));
        for s in segs.iter().take(10) {
            out.push_str(&format!("  {}\n", get_str(s, "segment")));
        }
        if segs.len() > 10 {
            out.push_str(&format!("  ... and {} more\n", segs.len() - 10));
        }
    }
    let count = |key: &str| v.get(key).and_then(Value::as_array).map_or(0, Vec::len);
    out.push_str(&format!(
        "human-infeasible paths: {}\nagent-infeasible paths: {}\n",
        count("human_infeasible"),
        count("agent_infeasible"),
    ));
    if let Some(stats) = v.get("stats") {
        out.push_str(&format!(
            "stats: paths={} lp_checks={}\n",
            stats.get("paths_enumerated").and_then(Value::as_u64).unwrap_or(0),
            stats.get("lp_checks").and_then(Value::as_u64).unwrap_or(0),
        ));
    }
    out
}

/// Canonical JSON text of a report: sorted keys, trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    fn sort(v: &Value) -> Value {
        match v {
            Value::Object(map) => {
                let mut sorted = Map::new();
                let mut keys: Vec<&String> = map.keys().collect();
                keys.sort();
                for k in keys {
                    sorted.insert(k.clone(), sort(&map[k]));
                }
                Value::Object(sorted)
            }
            Value::Array(items) => Value::Array(items.iter().map(sort).collect()),
            other => other.clone(),
        }
    }
    let mut out = serde_json::to_string_pretty(&sort(v)).expect("report serialization");
    out.push('\n');
    out
}

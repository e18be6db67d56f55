//! End-to-end checks of the generated benchmark reconstructions against the
//! explanation and reconciliation pipelines.

use hxplain_core::encode::{check_path, encode_path, PathFeasibility};
use hxplain_core::explain::{explain_unsolvability, ExplainOptions, Outcome};
use hxplain_core::graph::AbstractPath;
use hxplain_core::constraint::{LinearConstraint, RelOp};
use hxplain_core::reconcile::{reconcile, Disposition, ModelPair, ReconcileOutcome};
use hxplain_core::{rat, rint};
use hxplain_io::{generate_benchmark, BenchmarkSpec, Family, View};

fn path_by_locations(p: &hxplain_core::Problem, locs: &[&str]) -> AbstractPath {
    let mut edges = Vec::new();
    for w in locs.windows(2) {
        let edge = p
            .automaton
            .edges
            .iter()
            .find(|e| e.source == w[0] && e.target == w[1])
            .unwrap_or_else(|| panic!("no edge {} -> {}", w[0], w[1]));
        edges.push(edge.id.clone());
    }
    AbstractPath { locations: locs.iter().map(|s| s.to_string()).collect(), edges }
}

#[test]
fn warehouse_golden_path_encoding_and_iis_segment() {
    let agent = generate_benchmark(&BenchmarkSpec::new(Family::Warehouse)).unwrap().0.problem;
    let path = path_by_locations(
        &agent,
        &["l7", "l8", "l9", "l10", "l16", "l22", "l23", "l17", "l18"],
    );
    let enc = encode_path(&agent, &path, &[]).unwrap();

    // 9 dwell variables plus an in/out copy of x, y, c per step.
    assert_eq!(enc.system.variables.len(), 9 + 2 * 9 * 3);

    // Entering the charge station pins the battery back to full regardless
    // of the exit value of the previous cell (step 6 is l23).
    let recharge = LinearConstraint::atom("c@6.in", RelOp::Eq, rint(10));
    assert!(enc.system.constraints.iter().any(|c| c.same_halfspace(&recharge)));

    // The encoded system contains the documented step-0 constraints exactly.
    let wants: Vec<LinearConstraint<hxplain_core::Rat>> = vec![
        LinearConstraint::atom("x@0.in", RelOp::Eq, rat(1, 2)),
        LinearConstraint::atom("y@0.in", RelOp::Eq, rat(3, 2)),
        LinearConstraint::atom("c@0.in", RelOp::Eq, rint(10)),
        // c_out = c_in - 2 t0
        LinearConstraint::new(
            [
                ("c@0.out".to_string(), rint(1)),
                ("c@0.in".to_string(), rint(-1)),
                ("t@0".to_string(), rint(2)),
            ],
            RelOp::Eq,
            rint(0),
        ),
        LinearConstraint::atom("c@0.in", RelOp::Ge, rat(1, 10)),
        LinearConstraint::atom("c@0.out", RelOp::Ge, rat(1, 10)),
    ];
    for want in &wants {
        assert!(
            enc.system.constraints.iter().any(|c| c.same_halfspace(want)),
            "missing step-0 constraint: {want}"
        );
    }

    match check_path(&agent, &path, &[]).unwrap() {
        PathFeasibility::InfeasiblePath { segment, iis } => {
            assert_eq!(segment.locations, vec!["l10", "l16", "l22"]);
            assert_eq!(segment.edges, vec!["e16^10", "e22^16"]);
            assert!(!iis.indices.is_empty());
        }
        PathFeasibility::FeasibleRun { .. } => panic!("golden path must be infeasible"),
    }
}

#[test]
fn golden_segment_re_encoded_alone_is_infeasible() {
    // The IIS spans l10 -> l16 -> l22 and touches the step entering l10 only
    // through the crossing pin of the incoming edge. Re-encoding the segment
    // with that entry interface (position pinned, battery free under the
    // capacity cap) must still be infeasible: no entry charge survives the
    // forced transits.
    let mut fragment = generate_benchmark(&BenchmarkSpec::new(Family::Warehouse)).unwrap().0.problem;
    fragment.init = hxplain_core::model::StateSet {
        location: "l10".into(),
        constraints: vec![
            LinearConstraint::atom("x", RelOp::Eq, rint(3)),
            LinearConstraint::atom("y", RelOp::Eq, rint(2)),
        ],
    };
    fragment.automaton.init = fragment.init.clone();
    let segment = path_by_locations(&fragment, &["l10", "l16", "l22"]);
    // Exit interface: the crossing pin of the edge that leaves l22.
    let exit = vec![
        LinearConstraint::atom("x", RelOp::Eq, rint(4)),
        LinearConstraint::atom("y", RelOp::Eq, rint(4)),
    ];
    match check_path(&fragment, &segment, &exit).unwrap() {
        PathFeasibility::InfeasiblePath { iis, .. } => {
            assert!(!iis.indices.is_empty());
        }
        PathFeasibility::FeasibleRun { .. } => panic!("segment must be self-infeasible"),
    }

    // Dropping the boundary interface makes it feasible: those rows are the
    // load-bearing members of the extracted core.
    let mut free = fragment.clone();
    free.init.constraints.clear();
    free.automaton.init = free.init.clone();
    match check_path(&free, &segment, &[]).unwrap() {
        PathFeasibility::FeasibleRun { .. } => {}
        PathFeasibility::InfeasiblePath { .. } => {
            panic!("interface-free segment should be feasible")
        }
    }
}

#[test]
fn warehouse_six_by_six_has_36_locations() {
    let spec = BenchmarkSpec { rows: Some(6), cols: Some(6), ..BenchmarkSpec::new(Family::Warehouse) };
    let doc = generate_benchmark(&spec).unwrap().0;
    let g = hxplain_core::graph::abstract_graph(&doc.problem.automaton);
    assert_eq!(g.vertices.len(), 36);
}

#[test]
fn rover_articulation_points_are_figure_waypoints() {
    let rover = generate_benchmark(&BenchmarkSpec::new(Family::Rover)).unwrap().0.problem;
    let g = hxplain_core::graph::abstract_graph(&rover.automaton);
    let aps = hxplain_core::graph::disconnecting_articulation_points(&g, "l11", "l25").unwrap();
    let allowed: std::collections::BTreeSet<String> =
        ["l6", "l1", "l2", "l3", "l8", "l13", "l14", "l24"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    assert!(aps.is_subset(&allowed), "{aps:?}");
    assert!(!aps.is_empty());
}

#[test]
fn water_level_path_count_matches_recursive_oracle() {
    let wlm = generate_benchmark(&BenchmarkSpec::new(Family::WaterLevel)).unwrap().0.problem;
    let g = hxplain_core::graph::abstract_graph(&wlm.automaton);

    fn count(g: &hxplain_core::graph::LocGraph, at: &str, to: &str, depth: usize) -> usize {
        let mut n = usize::from(at == to);
        if depth == 0 {
            return n;
        }
        for a in g.arcs.iter().filter(|a| a.source == at) {
            n += count(g, &a.target, to, depth - 1);
        }
        n
    }

    let ps = hxplain_core::graph::enumerate_paths(
        &g,
        "l1",
        "l6",
        wlm.depth,
        hxplain_core::graph::PathMode::Walks,
        None,
        100_000,
    )
    .unwrap();
    assert_eq!(ps.len(), count(&g, "l1", "l6", wlm.depth));
}

#[test]
fn human_direct_route_is_infeasible_before_recharge() {
    // A route to the goal that skips the charge station covers six cell
    // transits; even at the human's uniform drain the battery floor breaks.
    let human = generate_benchmark(&BenchmarkSpec {
        view: View::Human,
        ..BenchmarkSpec::new(Family::Warehouse)
    })
    .unwrap()
    .0
    .problem;
    let path = path_by_locations(&human, &["l7", "l13", "l14", "l15", "l16", "l17", "l18"]);
    match hxplain_core::reconcile::human_feasibility(&path, &human).unwrap() {
        hxplain_core::reconcile::HumanFeasibility::Infeasible => {}
        other => panic!("direct route must be human-infeasible, got {other:?}"),
    }
}

#[test]
fn rover_explanation_chain_and_first_unreachable() {
    let rover = generate_benchmark(&BenchmarkSpec::new(Family::Rover)).unwrap().0.problem;
    let report = explain_unsolvability(&rover, &ExplainOptions::default()).unwrap();
    assert_eq!(
        report.chain,
        ["l11", "l6", "l1", "l2", "l3", "l8", "l13", "l14", "l24", "l25"]
    );
    assert_eq!(report.outcome, Outcome::Explained);
    let idx = report.explanation.unwrap();
    assert_eq!(report.statuses[idx].location, "l13");
    assert_eq!(idx, 6); // l11, l6, l1, l2, l3, l8 reachable before it
    for s in &report.statuses[..idx] {
        assert!(s.outcome.is_reachable(), "{} must be reachable", s.location);
    }
    eprintln!(
        "rover: |PS| = {} (dedup {}), chain {:?}",
        report.stats.num_paths, report.stats.dedup_paths, report.chain
    );
}

#[test]
fn water_level_explanation_at_unsafe_location() {
    let wlm = generate_benchmark(&BenchmarkSpec::new(Family::WaterLevel)).unwrap().0.problem;
    assert_eq!(wlm.depth, 20);
    let report = explain_unsolvability(&wlm, &ExplainOptions::default()).unwrap();
    assert_eq!(report.chain.len(), 3);
    assert_eq!(report.outcome, Outcome::Explained);
    let idx = report.explanation.unwrap();
    assert_eq!(report.statuses[idx].location, "l6");
    eprintln!("wlm: |PS| = {}, chain {:?}", report.stats.num_paths, report.chain);
}

#[test]
fn nav_and_nrs_have_trivial_chains() {
    for family in [Family::Nav, Family::Nrs] {
        let p = generate_benchmark(&BenchmarkSpec::new(family)).unwrap().0.problem;
        let report = explain_unsolvability(&p, &ExplainOptions::default()).unwrap();
        assert_eq!(report.chain.len(), 2, "{family:?}");
        assert_eq!(report.outcome, Outcome::Explained, "{family:?}");
        assert_eq!(report.explanation, Some(1), "{family:?}");
    }
}

#[test]
fn city_chain_and_explanation() {
    let p = generate_benchmark(&BenchmarkSpec::new(Family::City)).unwrap().0.problem;
    let report = explain_unsolvability(&p, &ExplainOptions::default()).unwrap();
    assert_eq!(report.chain, ["l1", "l4", "l7", "l8"]);
    assert_eq!(report.outcome, Outcome::Explained);
    let idx = report.explanation.unwrap();
    assert_eq!(report.statuses[idx].location, "l7");
    assert_eq!(idx, 2);
}

#[test]
fn warehouse_pair_reconciliation() {
    let agent = generate_benchmark(&BenchmarkSpec::new(Family::Warehouse)).unwrap().0.problem;
    let human = generate_benchmark(&BenchmarkSpec {
        view: View::Human,
        ..BenchmarkSpec::new(Family::Warehouse)
    })
    .unwrap()
    .0
    .problem;
    let pair = ModelPair { human, agent };
    let report = reconcile(&pair, 1_000_000).unwrap();

    assert!(matches!(report.outcome, ReconcileOutcome::Reconciled));
    assert!(
        report
            .invalid_edges
            .iter()
            .any(|r| r.edge.source == "l19" && r.edge.target == "l20"),
        "the 19->20 edge must be flagged; got {:?}",
        report.invalid_edges.iter().map(|r| r.edge.edge_id.clone()).collect::<Vec<_>>()
    );
    let oil = ["l10", "l16", "l21"];
    assert!(
        report.iis_segments.iter().any(|s| {
            s.segment.locations.iter().any(|l| oil.contains(&l.as_str()))
        }),
        "an IIS segment must cover an oil cell"
    );
    // Dispositions partition the enumerated set.
    assert_eq!(report.dispositions.len(), report.stats.paths_enumerated);
    assert!(!report.dispositions.iter().any(|(_, d)| *d == Disposition::AgentFeasible));
    eprintln!(
        "reconcile: {} paths, {} invalid edges, {} segments, {} human-infeasible",
        report.stats.paths_enumerated,
        report.invalid_edges.len(),
        report.iis_segments.len(),
        report.human_infeasible.len()
    );
}

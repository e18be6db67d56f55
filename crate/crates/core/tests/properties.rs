//! Property tests for the numeric carrier, the encoding size formulas, and
//! the discrete replay check.

mod common;

use common::Rng;
use hxplain_core::constraint::{LinearConstraint, RelOp};
use hxplain_core::encode::encode_path;
use hxplain_core::graph::{abstract_graph, enumerate_paths, AbstractPath, PathMode};
use hxplain_core::model::{Affine, Automaton, Edge, Location, StateSet};
use hxplain_core::reconcile::discrete_feasibility;
use hxplain_core::subseq::{build_chain, ChainError};
use hxplain_core::{rint, Problem, Rat};
use num_traits::{One, Zero};
use proptest::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

fn arb_rat() -> impl Strategy<Value = Rat> {
    (any::<i32>(), 1i32..=10_000).prop_map(|(n, d)| hxplain_core::rat(n as i64, d as i64))
}

proptest! {
    #[test]
    fn rational_arithmetic_is_exact(a in arb_rat(), b in arb_rat()) {
        prop_assert_eq!(&(a.clone() + b.clone()) - &b, a.clone());
        prop_assume!(!a.is_zero());
        prop_assert!((&a * a.recip()).is_one());
    }

    #[test]
    fn small_rat_mirrors_rational_field_ops(a in arb_rat(), b in arb_rat()) {
        use hxplain_core::{Scalar, SmallRat};
        let (sa, sb) = (SmallRat::from_rat(&a), SmallRat::from_rat(&b));
        let sum = sa + sb;
        prop_assume!(!sum.is_poison());
        prop_assert_eq!(sum.to_rat(), &a + &b);
        let prod = sa * sb;
        prop_assume!(!prod.is_poison());
        prop_assert_eq!(prod.to_rat(), &a * &b);
    }
}

/// A small fixed automaton with enough structure for random-path sampling.
fn braided() -> Problem {
    let vars = ["x", "y", "c"];
    let flow_exact: BTreeMap<String, (Rat, Rat)> = vars
        .iter()
        .map(|v| (v.to_string(), (rint(1), rint(1))))
        .collect();
    let locations: Vec<Location<Rat>> = (0..4)
        .map(|i| Location {
            id: format!("l{i}"),
            invariant: vec![LinearConstraint::atom("c", RelOp::Ge, rint(-100))],
            flow: flow_exact.clone(),
        })
        .collect();
    let mut edges = Vec::new();
    let mut k = 0;
    for s in 0..4 {
        for t in 0..4 {
            if s != t {
                edges.push(Edge {
                    id: format!("e{k}"),
                    source: format!("l{s}"),
                    target: format!("l{t}"),
                    label: format!("a{k}"),
                    guard: vec![],
                    reset: if k % 3 == 0 {
                        BTreeMap::from([("x".to_string(), Affine::constant(rint(0)))])
                    } else {
                        BTreeMap::new()
                    },
                });
                k += 1;
            }
        }
    }
    let init = StateSet { location: "l0".into(), constraints: vec![] };
    Problem {
        automaton: Automaton { variables: vars.iter().map(|s| s.to_string()).collect(), locations, edges, init: init.clone() },
        init,
        goal: StateSet { location: "l3".into(), constraints: vec![] },
        depth: 4,
        required_visits: BTreeSet::new(),
    }
}

#[test]
fn encoding_size_formulas_hold_on_random_paths() {
    let p = braided();
    let g = abstract_graph(&p.automaton);
    let paths = enumerate_paths(&g, "l0", "l3", 4, PathMode::Walks, None, 10_000).unwrap();
    assert!(paths.len() > 20);
    let nv = p.automaton.variables.len();
    for path in paths {
        let enc = encode_path(&p, &path, &[]).unwrap();
        let steps = path.locations.len();
        // (n+1) dwell variables plus 2 (n+1) |Var| state variables.
        assert_eq!(enc.system.variables.len(), steps * (2 * nv + 1));
        assert_eq!(enc.tags.len(), enc.system.constraints.len());
        // Per step: |Var| reset rows per edge, one dwell row, one flow row
        // per variable (rates are exact here), invariant atoms at both
        // sides, guard atoms at non-terminal steps.
        let inv_atoms: usize = path
            .locations
            .iter()
            .map(|l| p.automaton.location(l).unwrap().invariant.len())
            .sum();
        let guard_atoms: usize = path
            .edges
            .iter()
            .map(|e| p.automaton.edge(e).unwrap().guard.len())
            .sum();
        let expected = p.init.constraints.len()
            + (steps - 1) * nv          // reset rows
            + steps                      // dwell nonnegativity
            + steps * nv                 // exact-rate flow rows
            + 2 * inv_atoms
            + guard_atoms;
        assert_eq!(enc.system.constraints.len(), expected);
    }
}

#[test]
fn chain_requires_matching_endpoints() {
    let p = braided();
    assert!(matches!(
        build_chain(&["l0".to_string()], &p),
        Err(ChainError::EndpointMissing)
    ));
    assert!(matches!(
        build_chain(&["l1".to_string(), "l3".to_string()], &p),
        Err(ChainError::EndpointMissing)
    ));
    let chain = build_chain(&["l0".to_string(), "l3".to_string()], &p).unwrap();
    assert_eq!(chain.len(), 2);
}

#[test]
fn discrete_replay_matches_membership_oracle() {
    let mut rng = Rng::new(0xd15c);
    for _ in 0..300 {
        // Random human path over random locations; random agent arc set.
        let n = 3 + rng.below(4) as usize;
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut arcs = Vec::new();
        for s in 0..n {
            for t in 0..n {
                if s != t && rng.chance(40) {
                    arcs.push(hxplain_core::graph::Arc {
                        source: names[s].clone(),
                        target: names[t].clone(),
                        edge_id: format!("g{s}_{t}"),
                    });
                }
            }
        }
        let agent = hxplain_core::graph::LocGraph { vertices: names.clone(), arcs };
        let len = 1 + rng.below(6) as usize;
        let mut locations = vec![names[rng.below(n as u64) as usize].clone()];
        let mut edges = Vec::new();
        for i in 0..len {
            locations.push(names[rng.below(n as u64) as usize].clone());
            edges.push(format!("h{i}"));
        }
        let path = AbstractPath { locations: locations.clone(), edges };

        let oracle_first_missing = (0..len).find(|i| {
            !agent
                .arcs
                .iter()
                .any(|a| a.source == locations[*i] && a.target == locations[*i + 1])
        });
        match discrete_feasibility(&path, &agent) {
            Ok(()) => assert_eq!(oracle_first_missing, None),
            Err(invalid) => assert_eq!(Some(invalid.position), oracle_first_missing),
        }
    }
}

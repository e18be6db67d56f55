//! Abstract location graph and bounded path machinery.
//!
//! The graph keeps one arc per automaton edge in declaration order, which
//! makes breadth-first enumeration deterministic across runs and platforms.
//! Enumeration yields walks (location repeats allowed) by default; simple
//! mode forbids repeats. A hard cap on the number of yielded paths turns
//! runaway searches into an explicit budget outcome instead of exhausting
//! memory.

use crate::model::Automaton;
use crate::scalar::Scalar;
use std::collections::{BTreeSet, VecDeque};

/// Default cap on enumerated paths; override per call or via the CLI.
pub const DEFAULT_PATH_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub source: String,
    pub target: String,
    pub edge_id: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocGraph {
    pub vertices: Vec<String>,
    pub arcs: Vec<Arc>,
}

/// Alternating location/edge sequence; `edges.len() + 1 == locations.len()`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AbstractPath {
    pub locations: Vec<String>,
    pub edges: Vec<String>,
}

impl AbstractPath {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The location sequence with edges erased.
    pub fn path_string(&self) -> Vec<String> {
        self.locations.clone()
    }

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

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathMode {
    /// Repeated locations allowed (default).
    Walks,
    /// Every location at most once.
    Simple,
}

/// The graph of an automaton: one vertex per location, one arc per edge,
/// both in declaration order. Spec op `abstract_graph`.
pub fn abstract_graph<T: Scalar>(a: &Automaton<T>) -> LocGraph {
    LocGraph {
        vertices: a.locations.iter().map(|l| l.id.clone()).collect(),
        arcs: a
            .edges
            .iter()
            .map(|e| Arc { source: e.source.clone(), target: e.target.clone(), edge_id: e.id.clone() })
            .collect(),
    }
}

impl LocGraph {
    fn arcs_from<'a>(&'a self, loc: &'a str) -> impl Iterator<Item = &'a Arc> {
        self.arcs.iter().filter(move |a| a.source == loc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("path budget exceeded")]
pub struct BudgetExceeded;

/// Streaming breadth-first enumerator of bounded from->to paths.
///
/// Paths come out in breadth-first order: by length, then by the order their
/// prefixes were expanded, which follows arc declaration order. After
/// `budget` yields the iterator produces a single `Err(BudgetExceeded)`.
pub struct PathEnumerator<'g> {
    _graph: std::marker::PhantomData<&'g LocGraph>,
    to: String,
    depth: usize,
    mode: PathMode,
    visits: Option<BTreeSet<String>>,
    queue: VecDeque<AbstractPath>,
    budget: usize,
    yielded: usize,
    exhausted: bool,
    peak_queue: usize,
    /// Hop count (in edges) from each vertex to `to`; walks whose remaining
    /// budget cannot cover it are never enqueued. Pruning only removes walks
    /// that cannot complete, so the yielded sequence is unchanged.
    dist_to_target: std::collections::BTreeMap<String, usize>,
    /// Outgoing arcs per vertex, in declaration order.
    out_arcs: std::collections::BTreeMap<String, Vec<Arc>>,
}

impl<'g> PathEnumerator<'g> {
    pub fn new(
        graph: &'g LocGraph,
        from: &str,
        to: &str,
        depth: usize,
        mode: PathMode,
        visits: Option<BTreeSet<String>>,
        budget: usize,
    ) -> Self {
        let mut queue = VecDeque::new();
        if graph.vertices.iter().any(|v| v == from) {
            queue.push_back(AbstractPath { locations: vec![from.to_string()], edges: vec![] });
        }
        // Reverse breadth-first hop counts toward the target.
        let mut dist_to_target = std::collections::BTreeMap::new();
        dist_to_target.insert(to.to_string(), 0usize);
        let mut frontier = VecDeque::from([to.to_string()]);
        while let Some(v) = frontier.pop_front() {
            let d = dist_to_target[&v];
            for a in graph.arcs.iter().filter(|a| a.target == v) {
                if !dist_to_target.contains_key(&a.source) {
                    dist_to_target.insert(a.source.clone(), d + 1);
                    frontier.push_back(a.source.clone());
                }
            }
        }
        let mut out_arcs: std::collections::BTreeMap<String, Vec<Arc>> = Default::default();
        for a in &graph.arcs {
            out_arcs.entry(a.source.clone()).or_default().push(a.clone());
        }
        PathEnumerator {
            _graph: std::marker::PhantomData,
            to: to.to_string(),
            depth,
            mode,
            visits,
            queue,
            budget,
            yielded: 0,
            exhausted: false,
            peak_queue: 1,
            dist_to_target,
            out_arcs,
        }
    }

    /// High-water mark of the frontier, for the report stats.
    pub fn peak_queue(&self) -> usize {
        self.peak_queue
    }

    fn accepts(&self, path: &AbstractPath) -> bool {
        if path.locations.last().map(String::as_str) != Some(self.to.as_str()) {
            return false;
        }
        match &self.visits {
            None => true,
            Some(req) => req.iter().all(|loc| path.locations.iter().any(|l| l == loc)),
        }
    }
}

impl Iterator for PathEnumerator<'_> {
    type Item = Result<AbstractPath, BudgetExceeded>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.exhausted {
            return None;
        }
        while let Some(path) = self.queue.pop_front() {
            if path.len() < self.depth {
                let remaining = self.depth - path.len() - 1;
                let last = path.locations.last().unwrap();
                for arc in self.out_arcs.get(last).map(|v| v.as_slice()).unwrap_or(&[]) {
                    if self.mode == PathMode::Simple
                        && path.locations.iter().any(|l| *l == arc.target)
                    {
                        continue;
                    }
                    match self.dist_to_target.get(&arc.target) {
                        Some(d) if *d <= remaining => {}
                        _ => continue,
                    }
                    let mut next = path.clone();
                    next.locations.push(arc.target.clone());
                    next.edges.push(arc.edge_id.clone());
                    self.queue.push_back(next);
                }
                self.peak_queue = self.peak_queue.max(self.queue.len());
            }
            if self.accepts(&path) {
                if self.yielded == self.budget {
                    self.exhausted = true;
                    return Some(Err(BudgetExceeded));
                }
                self.yielded += 1;
                return Some(Ok(path));
            }
        }
        self.exhausted = true;
        None
    }
}

/// Collect all from->to paths of length at most `depth`. Spec op
/// `enumerate_paths`; the iterator form above is the streaming variant.
pub fn enumerate_paths(
    g: &LocGraph,
    from: &str,
    to: &str,
    depth: usize,
    mode: PathMode,
    visits: Option<&BTreeSet<String>>,
    budget: usize,
) -> Result<Vec<AbstractPath>, BudgetExceeded> {
    PathEnumerator::new(g, from, to, depth, mode, visits.cloned(), budget).collect()
}

/// Hop count in locations of a shortest from->to path (`from == to` gives 1),
/// or `None` when unreachable. Spec op `shortest_path_length`.
pub fn shortest_path_length(g: &LocGraph, from: &str, to: &str) -> Option<usize> {
    if !g.vertices.iter().any(|v| v == from) {
        return None;
    }
    let mut dist: std::collections::BTreeMap<&str, usize> = [(from, 1usize)].into();
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v];
        if v == to {
            return Some(d);
        }
        for a in g.arcs_from(v) {
            if !dist.contains_key(a.target.as_str()) {
                dist.insert(a.target.as_str(), d + 1);
                queue.push_back(a.target.as_str());
            }
        }
    }
    None
}

fn reachable_without(g: &LocGraph, from: &str, to: &str, removed: Option<&str>) -> bool {
    if Some(from) == removed || Some(to) == removed {
        return false;
    }
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            return true;
        }
        for a in g.arcs_from(v) {
            let t = a.target.as_str();
            if Some(t) != removed && seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("target not reachable from source")]
pub struct Unreachable;

/// Vertices (other than the endpoints) whose removal disconnects `to` from
/// `from`, arcs treated as directed. Per-vertex removal plus search; the
/// classic linear-time articulation algorithm does not yield this subset
/// directly. Spec op `disconnecting_articulation_points`.
pub fn disconnecting_articulation_points(
    g: &LocGraph,
    from: &str,
    to: &str,
) -> Result<BTreeSet<String>, Unreachable> {
    if !reachable_without(g, from, to, None) {
        return Err(Unreachable);
    }
    let mut out = BTreeSet::new();
    for v in &g.vertices {
        if v == from || v == to {
            continue;
        }
        if !reachable_without(g, from, to, Some(v)) {
            out.insert(v.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(arcs: &[(&str, &str)]) -> LocGraph {
        let mut vertices: Vec<String> = Vec::new();
        for (s, t) in arcs {
            for v in [s, t] {
                if !vertices.iter().any(|x| x == v) {
                    vertices.push(v.to_string());
                }
            }
        }
        LocGraph {
            vertices,
            arcs: arcs
                .iter()
                .enumerate()
                .map(|(i, (s, t))| Arc {
                    source: s.to_string(),
                    target: t.to_string(),
                    edge_id: format!("e{i}"),
                })
                .collect(),
        }
    }

    #[test]
    fn single_arc_single_path() {
        let g = graph(&[("l0", "l1")]);
        let ps = enumerate_paths(&g, "l0", "l1", 1, PathMode::Walks, None, 1000).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].locations, vec!["l0", "l1"]);
    }

    #[test]
    fn cycle_walk_count_matches_recursive_oracle() {
        // 3-cycle plus exit arc; depth 7 admits lengths 1, 4, 7.
        let g = graph(&[("l0", "l1"), ("l1", "l2"), ("l2", "l0"), ("l0", "lg")]);

        fn oracle(g: &LocGraph, at: &str, to: &str, depth: usize) -> usize {
            let mut count = usize::from(at == to);
            if depth == 0 {
                return count;
            }
            for a in g.arcs.iter().filter(|a| a.source == at) {
                count += oracle(g, &a.target, to, depth - 1);
            }
            count
        }

        let ps = enumerate_paths(&g, "l0", "lg", 7, PathMode::Walks, None, 10_000).unwrap();
        assert_eq!(ps.len(), oracle(&g, "l0", "lg", 7));
        assert_eq!(ps.len(), 3);
        // Breadth-first: lengths non-decreasing.
        assert!(ps.windows(2).all(|w| w[0].len() <= w[1].len()));
    }

    #[test]
    fn walks_superset_of_simple() {
        let g = graph(&[("a", "b"), ("b", "a"), ("b", "c"), ("a", "c")]);
        let walks = enumerate_paths(&g, "a", "c", 4, PathMode::Walks, None, 10_000).unwrap();
        let simple = enumerate_paths(&g, "a", "c", 4, PathMode::Simple, None, 10_000).unwrap();
        let walk_strings: BTreeSet<Vec<String>> =
            walks.iter().map(|p| p.path_string()).collect();
        for p in &simple {
            assert!(walk_strings.contains(&p.path_string()));
            let unique: BTreeSet<&String> = p.locations.iter().collect();
            assert_eq!(unique.len(), p.locations.len());
        }
        assert!(walks.len() >= simple.len());
    }

    #[test]
    fn visits_filter() {
        let g = graph(&[("a", "b"), ("b", "c"), ("a", "c")]);
        let req = BTreeSet::from(["b".to_string()]);
        let ps = enumerate_paths(&g, "a", "c", 3, PathMode::Walks, Some(&req), 1000).unwrap();
        assert!(ps.iter().all(|p| p.locations.iter().any(|l| l == "b")));
        assert_eq!(ps.len(), 1);
    }

    #[test]
    fn zero_length_path_when_endpoints_match() {
        let g = graph(&[("a", "b")]);
        let ps = enumerate_paths(&g, "a", "a", 2, PathMode::Walks, None, 1000).unwrap();
        assert_eq!(ps.len(), 1);
        assert!(ps[0].is_empty());
    }

    #[test]
    fn budget_exceeded_is_explicit() {
        let g = graph(&[("a", "a"), ("a", "b")]);
        let r = enumerate_paths(&g, "a", "b", 10, PathMode::Walks, None, 3);
        assert_eq!(r, Err(BudgetExceeded));
    }

    #[test]
    fn shortest_path_counts_locations() {
        let g = graph(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")]);
        assert_eq!(shortest_path_length(&g, "a", "a"), Some(1));
        assert_eq!(shortest_path_length(&g, "a", "e"), Some(5));
        assert_eq!(shortest_path_length(&g, "e", "a"), None);
    }

    #[test]
    fn shortest_path_matches_floyd_warshall() {
        // Deterministic pseudo-random digraphs against an all-pairs oracle.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..50 {
            let n = 2 + (next() % 6) as usize;
            let mut arcs = Vec::new();
            for s in 0..n {
                for t in 0..n {
                    if s != t && next() % 3 == 0 {
                        arcs.push((s, t));
                    }
                }
            }
            let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let g = LocGraph {
                vertices: names.clone(),
                arcs: arcs
                    .iter()
                    .enumerate()
                    .map(|(i, (s, t))| Arc {
                        source: names[*s].clone(),
                        target: names[*t].clone(),
                        edge_id: format!("e{i}"),
                    })
                    .collect(),
            };
            const INF: usize = usize::MAX / 4;
            let mut d = vec![vec![INF; n]; n];
            for (i, row) in d.iter_mut().enumerate() {
                row[i] = 0;
            }
            for (s, t) in &arcs {
                d[*s][*t] = 1;
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let got = shortest_path_length(&g, &names[i], &names[j]);
                    let want = if d[i][j] >= INF { None } else { Some(d[i][j] + 1) };
                    assert_eq!(got, want, "pair v{i} v{j}");
                }
            }
        }
    }

    #[test]
    fn articulation_chain_and_disjoint_routes() {
        let chain = graph(&[("a", "b"), ("b", "c")]);
        assert_eq!(
            disconnecting_articulation_points(&chain, "a", "c").unwrap(),
            BTreeSet::from(["b".to_string()])
        );

        let disjoint = graph(&[("a", "x"), ("x", "z"), ("a", "y"), ("y", "z")]);
        assert!(disconnecting_articulation_points(&disjoint, "a", "z").unwrap().is_empty());

        let unreachable = graph(&[("a", "b"), ("c", "d")]);
        assert_eq!(disconnecting_articulation_points(&unreachable, "a", "d"), Err(Unreachable));
    }

    #[test]
    fn every_enumerated_path_contains_each_articulation_point() {
        let g = graph(&[("a", "b"), ("b", "c"), ("b", "d"), ("c", "e"), ("d", "e"), ("e", "f")]);
        let aps = disconnecting_articulation_points(&g, "a", "f").unwrap();
        assert_eq!(aps, BTreeSet::from(["b".to_string(), "e".to_string()]));
        let ps = enumerate_paths(&g, "a", "f", 8, PathMode::Walks, None, 10_000).unwrap();
        assert!(!ps.is_empty());
        for p in &ps {
            for ap in &aps {
                assert!(p.locations.iter().any(|l| l == ap));
            }
        }
    }
}

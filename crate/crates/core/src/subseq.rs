//! Common-subsequence machinery: pairwise LCS, exact multi-sequence LCS for
//! small instance counts, a sound pairwise fold for large ones, and chain
//! construction from the result.
//!
//! The fold is the scalable surrogate: its output is guaranteed to be a
//! common subsequence of every input (that soundness is re-asserted wherever
//! the result is used), but maximality is not guaranteed in general. The
//! exact multi-dimensional DP serves as the small-instance reference.

use crate::constraint::LinearConstraint;
use crate::model::PlanningProblem;
use crate::scalar::Scalar;

/// A sequence of location-id symbols.
pub type SymbolSeq = Vec<String>;

/// Longest common subsequence of two sequences. Deterministic tie-break:
/// prefer matching at the earliest position in `a`, then in `b`.
/// Spec op `lcs_pair`.
pub fn lcs_pair(a: &[String], b: &[String]) -> SymbolSeq {
    let (n, m) = (a.len(), b.len());
    // l[i][j] = LCS length of a[i..] and b[j..]
    let mut l = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            l[i][j] = if a[i] == b[j] {
                l[i + 1][j + 1] + 1
            } else {
                l[i + 1][j].max(l[i][j + 1])
            };
        }
    }
    let mut out = Vec::with_capacity(l[0][0] as usize);
    let (mut i, mut j) = (0, 0);
    while l[i][j] > 0 {
        // Earliest optimal match: smallest p, then smallest q.
        let mut matched = false;
        'scan: for p in i..n {
            for q in j..m {
                if a[p] == b[q] && l[i][j] == l[p + 1][q + 1] + 1 {
                    out.push(a[p].clone());
                    i = p + 1;
                    j = q + 1;
                    matched = true;
                    break 'scan;
                }
            }
        }
        debug_assert!(matched);
        if !matched {
            break;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("multi-sequence DP table would exceed the cell budget")]
pub struct DpBudgetExceeded;

/// Default cell budget for the exact multi-sequence DP.
pub const DEFAULT_DP_BUDGET: usize = 10_000_000;

/// True longest common subsequence of all sequences via the m-dimensional
/// DP; errors out when the table would exceed `budget` cells.
/// Spec op `lcs_multi_exact`.
pub fn lcs_multi_exact(seqs: &[SymbolSeq], budget: usize) -> Result<SymbolSeq, DpBudgetExceeded> {
    if seqs.is_empty() {
        return Ok(Vec::new());
    }
    let dims: Vec<usize> = seqs.iter().map(|s| s.len() + 1).collect();
    let mut cells: usize = 1;
    for d in &dims {
        cells = cells.checked_mul(*d).filter(|c| *c <= budget).ok_or(DpBudgetExceeded)?;
    }
    let m = seqs.len();
    // Row-major strides; advancing any coordinate increases the flat index,
    // so a descending sweep sees all successors first.
    let mut stride = vec![1usize; m];
    for k in (0..m.saturating_sub(1)).rev() {
        stride[k] = stride[k + 1] * dims[k + 1];
    }
    let at_end = |idx: &[usize]| idx.iter().zip(seqs).any(|(i, s)| *i == s.len());
    let mut table = vec![0u32; cells];
    let mut idx = vec![0usize; m];
    for flat in (0..cells).rev() {
        let mut rem = flat;
        for k in 0..m {
            idx[k] = rem / stride[k];
            rem %= stride[k];
        }
        if at_end(&idx) {
            continue;
        }
        let sym = &seqs[0][idx[0]];
        let all_match = seqs.iter().zip(&idx).all(|(s, i)| &s[*i] == sym);
        let mut best = 0;
        if all_match {
            best = table[flat + stride.iter().sum::<usize>()] + 1;
        }
        for k in 0..m {
            best = best.max(table[flat + stride[k]]);
        }
        table[flat] = best;
    }

    // Reconstruct with the generalized earliest-match tie-break: the
    // lexicographically least position vector over (seq0, seq1, ...) whose
    // symbols agree and whose match preserves optimality.
    let mut out = Vec::with_capacity(table[0] as usize);
    let mut pos = vec![0usize; m];
    loop {
        let flat = |p: &[usize]| -> usize { p.iter().zip(&stride).map(|(i, s)| i * s).sum() };
        let need = table[flat(&pos)];
        if need == 0 {
            break;
        }
        let found = find_match(seqs, &table, &stride, &pos, need, 0, &mut vec![0; m]);
        let Some(at) = found else { break };
        out.push(seqs[0][at[0]].clone());
        for k in 0..m {
            pos[k] = at[k] + 1;
        }
    }
    Ok(out)
}

/// Lexicographically-least match position vector `at >= pos` with all
/// symbols equal and `table[at + 1] + 1 == need`.
fn find_match(
    seqs: &[SymbolSeq],
    table: &[u32],
    stride: &[usize],
    pos: &[usize],
    need: u32,
    k: usize,
    at: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    let m = seqs.len();
    if k == m {
        let succ: usize = at.iter().zip(stride).map(|(i, s)| (i + 1) * s).sum();
        if table[succ] + 1 == need {
            return Some(at.clone());
        }
        return None;
    }
    let sym = if k == 0 { None } else { Some(seqs[0][at[0]].clone()) };
    for p in pos[k]..seqs[k].len() {
        if let Some(sym) = &sym {
            if &seqs[k][p] != sym {
                continue;
            }
        }
        at[k] = p;
        if let Some(found) = find_match(seqs, table, stride, pos, need, k + 1, at) {
            return Some(found);
        }
    }
    None
}

/// Sound fold: deduplicate, sort by ascending length (ties lexicographic),
/// and fold [`lcs_pair`] across. The result is a common subsequence of every
/// input; maximality is not guaranteed. Spec op `common_subsequence_fold`.
pub fn common_subsequence_fold(seqs: &[SymbolSeq]) -> SymbolSeq {
    let mut uniq: Vec<&SymbolSeq> = Vec::new();
    {
        let mut seen = std::collections::BTreeSet::new();
        for s in seqs {
            if seen.insert(s) {
                uniq.push(s);
            }
        }
    }
    uniq.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut iter = uniq.into_iter();
    let Some(first) = iter.next() else { return Vec::new() };
    let mut acc = first.clone();
    for s in iter {
        if acc.is_empty() {
            break;
        }
        acc = lcs_pair(&acc, s);
    }
    acc
}

/// Pipeline entry point: the exact DP when the instance fits the cell
/// budget, otherwise the sound fold. Returns the subsequence and whether the
/// exact route was taken.
pub fn common_subsequence(seqs: &[SymbolSeq], budget: usize) -> (SymbolSeq, bool) {
    match lcs_multi_exact(seqs, budget) {
        Ok(s) => (s, true),
        Err(DpBudgetExceeded) => (common_subsequence_fold(seqs), false),
    }
}

/// True iff `c` embeds order-preservingly into every member of `seqs`.
/// Spec op `is_common_subsequence`.
pub fn is_common_subsequence(c: &[String], seqs: &[SymbolSeq]) -> bool {
    seqs.iter().all(|s| embeds(c, s))
}

fn embeds(c: &[String], s: &[String]) -> bool {
    let mut it = s.iter();
    c.iter().all(|sym| it.any(|x| x == sym))
}

/// No single symbol from `alphabet` can be inserted at any position of `c`
/// while keeping it a common subsequence of all inputs.
pub fn is_locally_maximal(c: &[String], seqs: &[SymbolSeq], alphabet: &[String]) -> bool {
    for pos in 0..=c.len() {
        for sym in alphabet {
            let mut extended = Vec::with_capacity(c.len() + 1);
            extended.extend_from_slice(&c[..pos]);
            extended.push(sym.clone());
            extended.extend_from_slice(&c[pos..]);
            if is_common_subsequence(&extended, seqs) {
                return false;
            }
        }
    }
    true
}

/// One sub-problem of a waypoint chain: reach `location` at any valuation in
/// its goal set (the location invariant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Waypoint<T> {
    pub location: String,
    pub goal: Vec<LinearConstraint<T>>,
}

/// Ordered sub-problems derived from a common subsequence of all bounded
/// initial-to-goal path strings; first element is the initial location, last
/// is the goal location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaypointChain<T> {
    pub waypoints: Vec<Waypoint<T>>,
    /// The common subsequence the chain was built from.
    pub provenance: SymbolSeq,
}

impl<T> WaypointChain<T> {
    pub fn locations(&self) -> Vec<String> {
        self.waypoints.iter().map(|w| w.location.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("subsequence does not start at the initial location and end at the goal location")]
    EndpointMissing,
    #[error("subsequence names unknown location {0}")]
    UnknownLocation(String),
}

/// Convert a common subsequence into the chain of per-location sub-problems,
/// goal set = the location invariant. Spec op `build_chain`.
pub fn build_chain<T: Scalar>(
    c: &[String],
    p: &PlanningProblem<T>,
) -> Result<WaypointChain<T>, ChainError> {
    let l0 = &p.init.location;
    let lg = &p.goal.location;
    let endpoints_ok = match c {
        [] => false,
        [only] => only == l0 && only == lg,
        [first, .., last] => first == l0 && last == lg,
    };
    if !endpoints_ok {
        return Err(ChainError::EndpointMissing);
    }
    let mut waypoints = Vec::with_capacity(c.len());
    for loc in c {
        let location = p
            .automaton
            .location(loc)
            .ok_or_else(|| ChainError::UnknownLocation(loc.clone()))?;
        waypoints.push(Waypoint { location: loc.clone(), goal: location.invariant.clone() });
    }
    Ok(WaypointChain { waypoints, provenance: c.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> SymbolSeq {
        s.chars().map(|c| c.to_string()).collect()
    }

    #[test]
    fn lcs_pair_identity_and_empty() {
        let s = seq("ABCAB");
        assert_eq!(lcs_pair(&s, &s), s);
        assert_eq!(lcs_pair(&s, &[]), Vec::<String>::new());
    }

    #[test]
    fn lcs_pair_classic_length_four() {
        // Exhaustive oracle over all subsequences of the first string.
        let a = seq("ABCBDAB");
        let b = seq("BDCABA");
        let got = lcs_pair(&a, &b);
        assert_eq!(got.len(), 4);
        assert!(is_common_subsequence(&got, &[a.clone(), b.clone()]));
        let best = (0..1u32 << a.len())
            .map(|mask| {
                let sub: Vec<String> = a
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, s)| s.clone())
                    .collect();
                if embeds(&sub, &b) {
                    sub.len()
                } else {
                    0
                }
            })
            .max()
            .unwrap();
        assert_eq!(got.len(), best);
    }

    #[test]
    fn lcs_pair_tie_break_prefers_earliest_in_a() {
        // Both "X" and "A" are optimal; position 0 of `a` wins.
        let a = seq("XA");
        let b = seq("AX");
        assert_eq!(lcs_pair(&a, &b), seq("X"));
    }

    #[test]
    fn multi_exact_examples() {
        let three = vec![seq("ABC"), seq("AC"), seq("BAC")];
        assert_eq!(lcs_multi_exact(&three, 10_000).unwrap(), seq("AC"));

        let same = vec![seq("ABAB"); 3];
        assert_eq!(lcs_multi_exact(&same, 10_000).unwrap(), seq("ABAB"));

        let long = vec![vec!["x".to_string(); 100]; 3];
        assert_eq!(lcs_multi_exact(&long, 10), Err(DpBudgetExceeded));
    }

    #[test]
    fn fold_identical_inputs() {
        let same = vec![seq("QRS"); 5];
        assert_eq!(common_subsequence_fold(&same), seq("QRS"));
    }

    #[test]
    fn fold_is_sound_and_bounded() {
        let inputs = vec![seq("SABD"), seq("SBAD"), seq("SAD")];
        let fold = common_subsequence_fold(&inputs);
        assert!(is_common_subsequence(&fold, &inputs));
        let shortest = inputs.iter().map(|s| s.len()).min().unwrap();
        assert!(fold.len() <= shortest);
    }

    #[test]
    fn validator_examples() {
        assert!(is_common_subsequence(&seq("AC"), &[seq("ABC"), seq("AXC")]));
        assert!(!is_common_subsequence(&seq("CA"), &[seq("ABC")]));
    }

    #[test]
    fn local_maximality() {
        let inputs = vec![seq("SXG"), seq("SYG")];
        let c = seq("SG");
        let alphabet: Vec<String> = ["S", "X", "Y", "G"].iter().map(|s| s.to_string()).collect();
        assert!(is_locally_maximal(&c, &inputs, &alphabet));
        assert!(!is_locally_maximal(&seq("S"), &inputs, &alphabet));
    }
}

//! Fourier-Motzkin elimination, the independent feasibility oracle.
//!
//! Deliberately kept free of the simplex machinery: it decides feasibility by
//! eliminating every variable in turn and inspecting the constant residue.
//! Test-only scale; refuses inputs beyond a small size.

use crate::constraint::ConstraintSystem;
use crate::normal::{normal_rows, NormOp};
use crate::scalar::Rat;
use num_traits::Zero;

pub const MAX_VARS: usize = 8;
pub const MAX_CONSTRAINTS: usize = 24;
const MAX_ROWS: usize = 200_000;

#[derive(Clone, Debug, thiserror::Error)]
pub enum FmError {
    #[error("system exceeds oracle scale ({0})")]
    ScaleExceeded(String),
    #[error("constraint mentions undeclared variable(s): {0:?}")]
    UndeclaredVariables(Vec<String>),
}

#[derive(Clone)]
struct Row {
    coeffs: Vec<Rat>,
    rhs: Rat,
    strict: bool,
}

/// Scale each row so its first nonzero coefficient is +/-1, then keep only
/// the tightest row of every parallel family: smallest rhs wins, strict wins
/// ties (the conjunction of parallel half-spaces equals its tightest member).
fn dedupe(rows: Vec<Row>) -> Vec<Row> {
    use std::collections::BTreeMap;
    let mut tightest: BTreeMap<Vec<Rat>, (Rat, bool)> = BTreeMap::new();
    for mut r in rows {
        if let Some(lead) = r.coeffs.iter().find(|c| !c.is_zero()).cloned() {
            let scale = lead.recip();
            let scale = if scale < Rat::zero() { -scale } else { scale };
            for c in r.coeffs.iter_mut() {
                *c *= &scale;
            }
            r.rhs *= &scale;
        }
        match tightest.get_mut(&r.coeffs) {
            None => {
                tightest.insert(r.coeffs, (r.rhs, r.strict));
            }
            Some((rhs, strict)) => {
                if r.rhs < *rhs || (r.rhs == *rhs && r.strict) {
                    *rhs = r.rhs;
                    *strict = r.strict;
                }
            }
        }
    }
    tightest
        .into_iter()
        .map(|(coeffs, (rhs, strict))| Row { coeffs, rhs, strict })
        .collect()
}

/// Eliminate all variables; `Ok(true)` means feasible.
pub fn fm_eliminate_all(cs: &ConstraintSystem<Rat>) -> Result<bool, FmError> {
    if cs.variables.len() > MAX_VARS {
        return Err(FmError::ScaleExceeded(format!("{} variables", cs.variables.len())));
    }
    if cs.constraints.len() > MAX_CONSTRAINTS {
        return Err(FmError::ScaleExceeded(format!("{} constraints", cs.constraints.len())));
    }
    let n = cs.variables.len();
    let norm = normal_rows(cs).ok_or_else(|| FmError::UndeclaredVariables(cs.undeclared_variables()))?;
    let dense = |r: &crate::normal::NormRow<Rat>| {
        let mut coeffs = vec![Rat::zero(); n];
        for (v, c) in &r.coeffs {
            coeffs[*v] += c;
        }
        Row { coeffs, rhs: r.rhs.clone(), strict: r.is_strict() }
    };
    let mut eqs: Vec<Row> = norm.iter().filter(|r| r.op == NormOp::Eq).map(&dense).collect();
    let mut rows: Vec<Row> = norm.iter().filter(|r| r.op != NormOp::Eq).map(&dense).collect();

    // Substitute equalities away first; the doubling from splitting them into
    // inequality pairs is what makes raw elimination blow up.
    while let Some(eq) = eqs.pop() {
        let Some(var) = eq.coeffs.iter().position(|c| !c.is_zero()) else {
            if eq.rhs.is_zero() {
                continue;
            }
            return Ok(false);
        };
        let pivot = eq.coeffs[var].clone();
        let reduce = |r: &mut Row| {
            let f = r.coeffs[var].clone();
            if f.is_zero() {
                return;
            }
            let scale = &f / &pivot;
            for j in 0..n {
                let delta = &eq.coeffs[j] * &scale;
                r.coeffs[j] -= delta;
            }
            r.rhs -= &eq.rhs * &scale;
        };
        eqs.iter_mut().for_each(&reduce);
        rows.iter_mut().for_each(reduce);
    }

    let mut remaining: Vec<usize> = (0..n).collect();
    while !remaining.is_empty() {
        rows = dedupe(rows);
        // Greedy order: eliminate the variable with the smallest pos*neg
        // product to keep intermediate systems small.
        let (pick, _) = remaining
            .iter()
            .enumerate()
            .map(|(i, &var)| {
                let pos = rows.iter().filter(|r| r.coeffs[var] > Rat::zero()).count();
                let neg = rows.iter().filter(|r| r.coeffs[var] < Rat::zero()).count();
                (i, pos * neg)
            })
            .min_by_key(|(_, cost)| *cost)
            .unwrap();
        let var = remaining.remove(pick);

        let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows.drain(..) {
            let c = r.coeffs[var].clone();
            if c.is_zero() {
                zero.push(r);
            } else if c > Rat::zero() {
                pos.push(r);
            } else {
                neg.push(r);
            }
        }
        if pos.len() * neg.len() + zero.len() > MAX_ROWS {
            return Err(FmError::ScaleExceeded("elimination blow-up".into()));
        }
        let mut next = zero;
        for p in &pos {
            for q in &neg {
                // Scale p by -q[var] (> 0) and q by p[var] (> 0), then add:
                // the var column cancels exactly.
                let a = -q.coeffs[var].clone();
                let b = p.coeffs[var].clone();
                let mut coeffs = Vec::with_capacity(n);
                for j in 0..n {
                    coeffs.push(&p.coeffs[j] * &a + &q.coeffs[j] * &b);
                }
                debug_assert!(coeffs[var].is_zero());
                next.push(Row {
                    coeffs,
                    rhs: &p.rhs * &a + &q.rhs * &b,
                    strict: p.strict || q.strict,
                });
            }
        }
        rows = next;
    }

    // Only constant rows remain: 0 (<=|<) rhs.
    for r in &rows {
        let ok = if r.strict { r.rhs > Rat::zero() } else { r.rhs >= Rat::zero() };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

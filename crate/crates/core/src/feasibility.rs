//! Exact feasibility decisions over constraint systems.
//!
//! [`solve_feasibility`] is the certificate-bearing entry point: it decides a
//! system and returns either a witness valuation (with a strictness margin)
//! or a Farkas certificate over the normalized rows. [`fast_feasible`] is the
//! presolved verdict/witness path used by the path checker and the deletion
//! filter, where certificates are not needed.
//!
//! Both paths run on the word-sized carrier first and transparently repeat
//! the computation on arbitrary-precision rationals if anything overflows.
//! No decision is ever made on approximate arithmetic.

use crate::constraint::{ConstraintSystem, Valuation};
use crate::normal::{convert_rows, normal_rows, rows_poisoned, split_equalities, NormRow};
use crate::presolve::{self, FastOutcome};
use crate::scalar::{Rat, Scalar, SmallRat};
use crate::simplex::{solve_ineq, IneqRow, LpResult};
use num_traits::Zero;
use std::collections::BTreeMap;

/// Farkas-style infeasibility certificate.
///
/// Weights are indexed by position in [`normalized_inequalities`] (the
/// `<=`-normal form of the system); each row there records the source
/// constraint it came from. The nonnegative combination of the rows yields
/// `0 <= c` with `c < 0`, or `0 < 0` when only the strict part carries
/// weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub weights: Vec<(usize, Rat)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityResult {
    Feasible { witness: Valuation<Rat>, strictness_margin: Rat },
    Infeasible { certificate: Certificate },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum FeasibilityError {
    #[error("constraint mentions undeclared variable(s): {0:?}")]
    UndeclaredVariables(Vec<String>),
    #[error("internal solver invariant violated: {0}")]
    Internal(String),
}

/// The `<=`/`<` normal form the certificate weights refer to.
pub fn normalized_inequalities(
    cs: &ConstraintSystem<Rat>,
) -> Result<Vec<NormRow<Rat>>, FeasibilityError> {
    let rows = normal_rows(cs)
        .ok_or_else(|| FeasibilityError::UndeclaredVariables(cs.undeclared_variables()))?;
    Ok(split_equalities(&rows))
}

fn to_ineq<T: Scalar>(rows: &[NormRow<T>]) -> Vec<IneqRow<T>> {
    rows.iter()
        .map(|r| IneqRow { coeffs: r.coeffs.clone(), rhs: r.rhs.clone(), strict: r.is_strict() })
        .collect()
}

/// Exact decision with witness or certificate. Spec op `solve_feasibility`.
pub fn solve_feasibility(cs: &ConstraintSystem<Rat>) -> Result<FeasibilityResult, FeasibilityError> {
    let rows = normalized_inequalities(cs)?;
    let nvars = cs.variables.len();

    // Fast carrier first, wide carrier on poison.
    let small: Vec<NormRow<SmallRat>> = convert_rows(&rows);
    let attempt = if rows_poisoned(&small) {
        None
    } else {
        solve_ineq(nvars, &to_ineq(&small)).ok().map(|res| match res {
            LpResult::Feasible { point, margin } => LpResult::Feasible {
                point: point.iter().map(|p| p.to_rat()).collect(),
                margin: margin.to_rat(),
            },
            LpResult::Infeasible { farkas } => {
                LpResult::Infeasible { farkas: farkas.iter().map(|f| f.to_rat()).collect() }
            }
        })
    };
    let result = match attempt {
        Some(r) => r,
        None => solve_ineq(nvars, &to_ineq(&rows))
            .map_err(|_| FeasibilityError::Internal("rational solver poisoned".into()))?,
    };

    match result {
        LpResult::Feasible { point, margin } => {
            let witness: Valuation<Rat> = cs
                .variables
                .iter()
                .cloned()
                .zip(point.iter().cloned())
                .collect();
            for c in &cs.constraints {
                if !c.eval(&witness).unwrap_or(false) {
                    return Err(FeasibilityError::Internal(format!(
                        "witness fails constraint {c:?}"
                    )));
                }
            }
            Ok(FeasibilityResult::Feasible { witness, strictness_margin: margin })
        }
        LpResult::Infeasible { farkas } => {
            let certificate = Certificate {
                weights: farkas
                    .into_iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .collect(),
            };
            if !verify_certificate(&rows, &certificate) {
                return Err(FeasibilityError::Internal("unsound certificate".into()));
            }
            Ok(FeasibilityResult::Infeasible { certificate })
        }
    }
}

/// Check a certificate by pure rational arithmetic: the weighted combination
/// of the normalized rows must cancel every variable and derive `0 <= c` with
/// `c < 0`, or `0 < 0` with positive weight on a strict row.
pub fn verify_certificate(rows: &[NormRow<Rat>], cert: &Certificate) -> bool {
    let mut combo: BTreeMap<usize, Rat> = BTreeMap::new();
    let mut rhs = Rat::zero();
    let mut strict_weight = false;
    if cert.weights.is_empty() {
        return false;
    }
    for (idx, w) in &cert.weights {
        let Some(row) = rows.get(*idx) else { return false };
        if w < &Rat::zero() {
            return false;
        }
        if row.is_strict() && !w.is_zero() {
            strict_weight = true;
        }
        for (v, c) in &row.coeffs {
            let e = combo.entry(*v).or_insert_with(Rat::zero);
            *e += c * w;
        }
        rhs += &row.rhs * w;
    }
    if combo.values().any(|c| !c.is_zero()) {
        return false;
    }
    rhs < Rat::zero() || (rhs.is_zero() && strict_weight)
}

/// Presolved verdict/witness decision, no certificate. Used by the path
/// checker and the deletion filter where systems are large but structured.
pub fn fast_feasible(cs: &ConstraintSystem<Rat>) -> Result<FastOutcome<Rat>, FeasibilityError> {
    let rows = normal_rows(cs)
        .ok_or_else(|| FeasibilityError::UndeclaredVariables(cs.undeclared_variables()))?;
    fast_feasible_rows(cs.variables.len(), &rows)
}

/// Same as [`fast_feasible`], over prenormalized rows with a row mask.
pub fn fast_feasible_masked(
    nvars: usize,
    rows: &[NormRow<Rat>],
    active: impl Fn(usize) -> bool,
) -> Result<FastOutcome<Rat>, FeasibilityError> {
    let masked: Vec<NormRow<Rat>> =
        rows.iter().filter(|r| active(r.source)).cloned().collect();
    fast_feasible_rows(nvars, &masked)
}

fn fast_feasible_rows(
    nvars: usize,
    rows: &[NormRow<Rat>],
) -> Result<FastOutcome<Rat>, FeasibilityError> {
    let small: Vec<NormRow<SmallRat>> = convert_rows(rows);
    if !rows_poisoned(&small) {
        if let Ok(out) = presolve::fast_feasible(nvars, &small) {
            return Ok(match out {
                FastOutcome::Feasible { point } => FastOutcome::Feasible {
                    point: point.iter().map(|p| p.to_rat()).collect(),
                },
                FastOutcome::Infeasible => FastOutcome::Infeasible,
            });
        }
    }
    presolve::fast_feasible(nvars, rows)
        .map_err(|_| FeasibilityError::Internal("rational presolve poisoned".into()))
}

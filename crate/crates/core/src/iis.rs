//! Irreducible infeasible subsystem extraction by deletion filtering.
//!
//! The filter scans constraints in index order, tentatively dropping each
//! one: if the rest stays infeasible the drop becomes permanent. The
//! survivors form an IIS - infeasible as a whole, feasible after removing
//! any single member. The index-order scan makes the survivor the latest
//! self-contained core along a path encoding, which is what localizes an
//! infeasible path to its offending segment.

use crate::constraint::{ConstraintSystem, LinearConstraint};
use crate::feasibility::FeasibilityError;
use crate::normal::{convert_rows, normal_rows, rows_poisoned, NormRow};
use crate::presolve::{self, FastOutcome};
use crate::scalar::{Rat, SmallRat};

/// An irreducible infeasible subsystem: the member indices (ascending) into
/// the originating system plus the constraints themselves.
#[derive(Clone, Debug)]
pub struct Iis {
    pub indices: Vec<usize>,
    pub constraints: Vec<LinearConstraint<Rat>>,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum IisError {
    #[error("system is feasible; nothing to extract")]
    NotInfeasible,
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
}

/// Deletion-filter IIS extraction. Spec op `deletion_filter_iis`.
pub fn deletion_filter_iis(cs: &ConstraintSystem<Rat>) -> Result<Iis, IisError> {
    let rows = normal_rows(cs).ok_or_else(|| {
        IisError::Feasibility(FeasibilityError::UndeclaredVariables(cs.undeclared_variables()))
    })?;
    let nvars = cs.variables.len();
    let mut active = vec![true; cs.constraints.len()];

    // One up-front conversion to the word-sized carrier; each masked solve
    // then only copies machine words. Poison falls back to full precision
    // for that solve alone.
    let small: Vec<NormRow<SmallRat>> = convert_rows(&rows);
    let small_ok = !rows_poisoned(&small);
    let feasible = |active: &[bool]| -> Result<bool, FeasibilityError> {
        if small_ok {
            let masked: Vec<NormRow<SmallRat>> =
                small.iter().filter(|r| active[r.source]).cloned().collect();
            if let Ok(out) = presolve::fast_feasible(nvars, &masked) {
                return Ok(matches!(out, FastOutcome::Feasible { .. }));
            }
        }
        let masked: Vec<NormRow<Rat>> =
            rows.iter().filter(|r| active[r.source]).cloned().collect();
        let out = presolve::fast_feasible(nvars, &masked)
            .map_err(|_| FeasibilityError::Internal("rational presolve poisoned".into()))?;
        Ok(matches!(out, FastOutcome::Feasible { .. }))
    };

    if feasible(&active)? {
        return Err(IisError::NotInfeasible);
    }

    for i in 0..active.len() {
        active[i] = false;
        if feasible(&active)? {
            active[i] = true;
        }
    }

    let indices: Vec<usize> = (0..active.len()).filter(|i| active[*i]).collect();
    let constraints = indices.iter().map(|i| cs.constraints[*i].clone()).collect();
    Ok(Iis { indices, constraints })
}

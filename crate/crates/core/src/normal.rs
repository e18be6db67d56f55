//! Inequality normal form.
//!
//! Every constraint converts to rows of the shape `sum(g * x) (<= | < | ==) h`
//! over dense variable indices. `Ge`/`Gt` rows are negated into `Le`/`Lt`;
//! equalities stay intact here and split into two `Le` rows only where a
//! caller needs a pure inequality system (certificates, Fourier-Motzkin).

use crate::constraint::{ConstraintSystem, RelOp};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormOp {
    Le,
    Lt,
    Eq,
}

/// One normalized row. `source` is the index of the originating constraint
/// and `negated` records whether the original row was flipped to get here.
#[derive(Clone, Debug)]
pub struct NormRow<T> {
    pub coeffs: Vec<(usize, T)>,
    pub op: NormOp,
    pub rhs: T,
    pub source: usize,
    pub negated: bool,
}

impl<T: Scalar> NormRow<T> {
    pub fn is_strict(&self) -> bool {
        self.op == NormOp::Lt
    }

    fn negate(&self) -> NormRow<T> {
        NormRow {
            coeffs: self.coeffs.iter().map(|(v, c)| (*v, -c.clone())).collect(),
            op: self.op,
            rhs: -self.rhs.clone(),
            source: self.source,
            negated: !self.negated,
        }
    }
}

/// Normalize a constraint system, keeping equalities as `Eq` rows.
///
/// Returns `None` when a constraint mentions an undeclared variable.
pub fn normal_rows<T: Scalar>(cs: &ConstraintSystem<T>) -> Option<Vec<NormRow<T>>> {
    let mut rows = Vec::with_capacity(cs.constraints.len());
    for (idx, c) in cs.constraints.iter().enumerate() {
        let mut coeffs = Vec::with_capacity(c.coeffs.len());
        for (name, val) in &c.coeffs {
            coeffs.push((cs.var_index(name)?, val.clone()));
        }
        coeffs.sort_by_key(|(v, _)| *v);
        let row = |op: NormOp, negated: bool| NormRow {
            coeffs: coeffs.clone(),
            op,
            rhs: c.rhs.clone(),
            source: idx,
            negated,
        };
        match c.op {
            RelOp::Le => rows.push(row(NormOp::Le, false)),
            RelOp::Lt => rows.push(row(NormOp::Lt, false)),
            RelOp::Eq => rows.push(row(NormOp::Eq, false)),
            RelOp::Ge => rows.push(row(NormOp::Le, false).negate()),
            RelOp::Gt => rows.push(row(NormOp::Lt, false).negate()),
        }
    }
    Some(rows)
}

/// Split every `Eq` row into a `Le` pair, producing a pure-inequality system.
pub fn split_equalities<T: Scalar>(rows: &[NormRow<T>]) -> Vec<NormRow<T>> {
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        match r.op {
            NormOp::Eq => {
                let mut le = r.clone();
                le.op = NormOp::Le;
                out.push(le.clone());
                out.push(le.negate());
            }
            _ => out.push(r.clone()),
        }
    }
    out
}

/// Convert rows to a different scalar carrier.
pub fn convert_rows<A: Scalar, B: Scalar>(rows: &[NormRow<A>]) -> Vec<NormRow<B>> {
    rows.iter()
        .map(|r| NormRow {
            coeffs: r.coeffs.iter().map(|(v, c)| (*v, B::from_rat(&c.to_rat()))).collect(),
            op: r.op,
            rhs: B::from_rat(&r.rhs.to_rat()),
            source: r.source,
            negated: r.negated,
        })
        .collect()
}

/// True when any converted value poisoned (conversion overflow).
pub fn rows_poisoned<T: Scalar>(rows: &[NormRow<T>]) -> bool {
    rows.iter()
        .any(|r| r.rhs.is_poison() || r.coeffs.iter().any(|(_, c)| c.is_poison()))
}

//! Exact presolve for path-encoded systems.
//!
//! Path encodings are dominated by equality rows (resets, exact-rate flows,
//! guard pins) and single-variable bounds (invariant atoms). This module
//! Gauss-eliminates the equalities, folds singleton rows into variable
//! bounds, and hands only the residual inequality core to the simplex. The
//! reduction is verdict- and witness-exact; it does not produce duals, so the
//! public certificate-bearing entry point never uses it.

use crate::normal::{NormOp, NormRow};
use crate::scalar::Scalar;
use crate::simplex::{solve_ineq_signed, IneqRow, LpResult, Poisoned};


#[derive(Clone, Debug)]
pub enum FastOutcome<T> {
    Feasible { point: Vec<T> },
    Infeasible,
}

#[derive(Clone, Debug)]
struct Bound<T> {
    lo: Option<(T, bool)>,
    hi: Option<(T, bool)>,
}

impl<T: Scalar> Bound<T> {
    fn free() -> Self {
        Bound { lo: None, hi: None }
    }

    fn tighten_lo(&mut self, v: T, strict: bool) {
        match &self.lo {
            Some((cur, cs)) if *cur > v || (*cur == v && (*cs || !strict)) => {}
            _ => self.lo = Some((v, strict)),
        }
    }

    fn tighten_hi(&mut self, v: T, strict: bool) {
        match &self.hi {
            Some((cur, cs)) if *cur < v || (*cur == v && (*cs || !strict)) => {}
            _ => self.hi = Some((v, strict)),
        }
    }

    fn consistent(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Some((lo, ls)), Some((hi, hs))) => lo < hi || (lo == hi && !ls && !hs),
            _ => true,
        }
    }

    /// A value satisfying the bound, strictly inside where required.
    fn pick(&self) -> T {
        match (&self.lo, &self.hi) {
            (Some((lo, ls)), Some((hi, _))) => {
                if !*ls {
                    lo.clone()
                } else {
                    let two = T::one() + T::one();
                    (lo.clone() + hi.clone()) / two
                }
            }
            (Some((lo, ls)), None) => {
                if *ls {
                    lo.clone() + T::one()
                } else {
                    lo.clone()
                }
            }
            (None, Some((hi, hs))) => {
                if *hs {
                    hi.clone() - T::one()
                } else {
                    hi.clone()
                }
            }
            (None, None) => T::zero(),
        }
    }

    fn fixed(&self) -> Option<T> {
        match (&self.lo, &self.hi) {
            (Some((lo, false)), Some((hi, false))) if lo == hi => Some(lo.clone()),
            _ => None,
        }
    }
}

/// Sparse working row during presolve.
#[derive(Clone, Debug)]
struct Work<T> {
    coeffs: Vec<(usize, T)>,
    op: NormOp,
    rhs: T,
}

fn substitute<T: Scalar>(row: &mut Work<T>, var: usize, expr: &[(usize, T)], cst: &T) {
    let Some(pos) = row.coeffs.iter().position(|(v, _)| *v == var) else { return };
    let f = row.coeffs.remove(pos).1;
    row.rhs = row.rhs.clone() - f.clone() * cst.clone();
    for (v, c) in expr {
        let add = f.clone() * c.clone();
        match row.coeffs.iter_mut().find(|(rv, _)| rv == v) {
            Some((_, rc)) => *rc = rc.clone() + add,
            None => row.coeffs.push((*v, add)),
        }
    }
    row.coeffs.retain(|(_, c)| !c.is_zero());
}

/// Decide feasibility; on success return a full witness over all `nvars`.
pub fn fast_feasible<T: Scalar>(
    nvars: usize,
    rows: &[NormRow<T>],
) -> Result<FastOutcome<T>, Poisoned> {
    let mut work: Vec<Work<T>> = rows
        .iter()
        .map(|r| Work { coeffs: r.coeffs.clone(), op: r.op, rhs: r.rhs.clone() })
        .collect();
    let mut bounds: Vec<Bound<T>> = (0..nvars).map(|_| Bound::free()).collect();
    // var -> (expr, const): var = expr . x + const, in elimination order.
    let mut eliminated: Vec<(usize, Vec<(usize, T)>, T)> = Vec::new();

    let poisoned = |w: &Work<T>| w.rhs.is_poison() || w.coeffs.iter().any(|(_, c)| c.is_poison());

    loop {
        let mut changed = false;

        // Equality elimination: solve each equality for its lowest variable
        // and substitute it everywhere else.
        while let Some(pos) = work.iter().position(|w| w.op == NormOp::Eq) {
            let eq = work.remove(pos);
            if poisoned(&eq) {
                return Err(Poisoned);
            }
            if eq.coeffs.is_empty() {
                if eq.rhs.is_zero() {
                    continue;
                }
                return Ok(FastOutcome::Infeasible);
            }
            // Solve for the highest-index variable: encodings declare state
            // copies after dwells and later steps after earlier ones, so
            // this substitutes forward and leaves dwell variables free to
            // become plain bounds.
            let (var, coef) = eq
                .coeffs
                .iter()
                .max_by_key(|(v, _)| *v)
                .map(|(v, c)| (*v, c.clone()))
                .unwrap();
            let inv = T::one() / coef;
            if inv.is_poison() {
                return Err(Poisoned);
            }
            let cst = eq.rhs.clone() * inv.clone();
            let expr: Vec<(usize, T)> = eq
                .coeffs
                .iter()
                .filter(|(v, _)| *v != var)
                .map(|(v, c)| (*v, -(c.clone() * inv.clone())))
                .collect();
            for w in work.iter_mut() {
                substitute(w, var, &expr, &cst);
                if poisoned(w) {
                    return Err(Poisoned);
                }
            }
            // Fold any bound already collected for the eliminated variable
            // back into a row over the substituted expression.
            let b = std::mem::replace(&mut bounds[var], Bound::free());
            if let Some((lo, ls)) = b.lo {
                let mut w = Work {
                    coeffs: vec![(var, -T::one())],
                    op: if ls { NormOp::Lt } else { NormOp::Le },
                    rhs: -lo,
                };
                substitute(&mut w, var, &expr, &cst);
                work.push(w);
            }
            if let Some((hi, hs)) = b.hi {
                let mut w = Work {
                    coeffs: vec![(var, T::one())],
                    op: if hs { NormOp::Lt } else { NormOp::Le },
                    rhs: hi,
                };
                substitute(&mut w, var, &expr, &cst);
                work.push(w);
            }
            eliminated.push((var, expr, cst));
            changed = true;
        }

        // Singleton inequality rows become bounds; empty rows resolve now.
        let mut rest = Vec::with_capacity(work.len());
        for w in work.drain(..) {
            if poisoned(&w) {
                return Err(Poisoned);
            }
            match w.coeffs.len() {
                0 => {
                    let ok = match w.op {
                        NormOp::Le => w.rhs >= T::zero(),
                        NormOp::Lt => w.rhs > T::zero(),
                        NormOp::Eq => unreachable!(),
                    };
                    if !ok {
                        return Ok(FastOutcome::Infeasible);
                    }
                }
                1 => {
                    let (v, c) = w.coeffs[0].clone();
                    let strict = w.op == NormOp::Lt;
                    let val = w.rhs / c.clone();
                    if val.is_poison() {
                        return Err(Poisoned);
                    }
                    if c > T::zero() {
                        bounds[v].tighten_hi(val, strict);
                    } else {
                        bounds[v].tighten_lo(val, strict);
                    }
                    if !bounds[v].consistent() {
                        return Ok(FastOutcome::Infeasible);
                    }
                    changed = true;
                }
                _ => rest.push(w),
            }
        }
        work = rest;

        // Variables pinned by their bounds become constants.
        for v in 0..nvars {
            if let Some(val) = bounds[v].fixed() {
                let used = work.iter().any(|w| w.coeffs.iter().any(|(rv, _)| *rv == v));
                if used {
                    for w in work.iter_mut() {
                        substitute(w, v, &[], &val);
                    }
                    changed = true;
                }
            }
        }

        if !changed {
            break;
        }
    }

    // Interval filter: evaluate each remaining row over the bound box.
    // Rows that cannot be violated are dropped; rows that cannot be
    // satisfied decide infeasibility outright. Battery-chain encodings
    // resolve completely here; only genuinely ambiguous rows reach the
    // simplex.
    {
        let mut kept = Vec::with_capacity(work.len());
        for w in work.drain(..) {
            // Infimum and supremum of the lhs over the box; None = infinite.
            // `open` marks a bound approached but not attained.
            let mut inf: Option<T> = Some(T::zero());
            let mut inf_open = false;
            let mut sup: Option<T> = Some(T::zero());
            let mut sup_open = false;
            for (v, c) in &w.coeffs {
                let (toward_inf, toward_sup) = if *c > T::zero() {
                    (&bounds[*v].lo, &bounds[*v].hi)
                } else {
                    (&bounds[*v].hi, &bounds[*v].lo)
                };
                match (&mut inf, toward_inf) {
                    (Some(acc), Some((b, strict))) => {
                        *acc = acc.clone() + c.clone() * b.clone();
                        inf_open |= *strict;
                    }
                    _ => inf = None,
                }
                match (&mut sup, toward_sup) {
                    (Some(acc), Some((b, strict))) => {
                        *acc = acc.clone() + c.clone() * b.clone();
                        sup_open |= *strict;
                    }
                    _ => sup = None,
                }
            }
            if let Some(inf) = &inf {
                if inf.is_poison() {
                    return Err(Poisoned);
                }
                let certainly_violated = *inf > w.rhs
                    || (*inf == w.rhs && (w.op == NormOp::Lt || inf_open));
                if certainly_violated {
                    return Ok(FastOutcome::Infeasible);
                }
            }
            if let Some(sup) = &sup {
                if sup.is_poison() {
                    return Err(Poisoned);
                }
                let certainly_true = *sup < w.rhs
                    || (*sup == w.rhs && w.op == NormOp::Le && !sup_open);
                if certainly_true {
                    continue;
                }
            }
            kept.push(w);
        }
        work = kept;
    }

    // Residual core: remaining multi-variable rows plus the finite bounds of
    // the variables they mention.
    let mut point = vec![T::zero(); nvars];
    if work.is_empty() {
        for v in 0..nvars {
            if !bounds[v].consistent() {
                return Ok(FastOutcome::Infeasible);
            }
            point[v] = bounds[v].pick();
        }
    } else {
        let mut residual_vars: Vec<usize> = Vec::new();
        for w in &work {
            for (v, _) in &w.coeffs {
                if !residual_vars.contains(v) {
                    residual_vars.push(*v);
                }
            }
        }
        residual_vars.sort_unstable();
        let dense: Vec<Option<usize>> = {
            let mut d = vec![None; nvars];
            for (i, v) in residual_vars.iter().enumerate() {
                d[*v] = Some(i);
            }
            d
        };
        // Shift each bounded variable to a structurally nonnegative one:
        // x = x' + lo (or x = hi - x' when only bounded above). This keeps
        // the tableau narrow and turns lower-bound rows into column signs.
        enum Xform<T> {
            Free,
            Shift(T),
            Mirror(T),
        }
        let mut xform: Vec<Xform<T>> = Vec::with_capacity(residual_vars.len());
        let mut nonneg = vec![false; residual_vars.len()];
        let mut extra: Vec<IneqRow<T>> = Vec::new();
        for (i, v) in residual_vars.iter().enumerate() {
            match (&bounds[*v].lo, &bounds[*v].hi) {
                (Some((lo, ls)), hi) => {
                    nonneg[i] = true;
                    if *ls {
                        extra.push(IneqRow {
                            coeffs: vec![(i, -T::one())],
                            rhs: T::zero(),
                            strict: true,
                        });
                    }
                    if let Some((hi, hs)) = hi {
                        extra.push(IneqRow {
                            coeffs: vec![(i, T::one())],
                            rhs: hi.clone() - lo.clone(),
                            strict: *hs,
                        });
                    }
                    xform.push(Xform::Shift(lo.clone()));
                }
                (None, Some((hi, hs))) => {
                    nonneg[i] = true;
                    if *hs {
                        extra.push(IneqRow {
                            coeffs: vec![(i, -T::one())],
                            rhs: T::zero(),
                            strict: true,
                        });
                    }
                    xform.push(Xform::Mirror(hi.clone()));
                }
                (None, None) => xform.push(Xform::Free),
            }
        }
        let mut lp_rows: Vec<IneqRow<T>> = Vec::new();
        for w in &work {
            let mut rhs = w.rhs.clone();
            let mut coeffs = Vec::with_capacity(w.coeffs.len());
            for (v, c) in &w.coeffs {
                let i = dense[*v].unwrap();
                match &xform[i] {
                    Xform::Free => coeffs.push((i, c.clone())),
                    Xform::Shift(lo) => {
                        rhs = rhs - c.clone() * lo.clone();
                        coeffs.push((i, c.clone()));
                    }
                    Xform::Mirror(hi) => {
                        rhs = rhs - c.clone() * hi.clone();
                        coeffs.push((i, -c.clone()));
                    }
                }
            }
            if rhs.is_poison() {
                return Err(Poisoned);
            }
            lp_rows.push(IneqRow { coeffs, rhs, strict: w.op == NormOp::Lt });
        }
        lp_rows.extend(extra);
        match solve_ineq_signed(residual_vars.len(), Some(&nonneg), &lp_rows)? {
            LpResult::Infeasible { .. } => return Ok(FastOutcome::Infeasible),
            LpResult::Feasible { point: rp, .. } => {
                for v in 0..nvars {
                    point[v] = match dense[v] {
                        Some(i) => {
                            let raw = rp[i].clone();
                            match &xform[i] {
                                Xform::Free => raw,
                                Xform::Shift(lo) => raw + lo.clone(),
                                Xform::Mirror(hi) => hi.clone() - raw,
                            }
                        }
                        None => {
                            if !bounds[v].consistent() {
                                return Ok(FastOutcome::Infeasible);
                            }
                            bounds[v].pick()
                        }
                    };
                }
            }
        }
    }

    // Back-substitute eliminated variables in reverse order.
    for (var, expr, cst) in eliminated.iter().rev() {
        let mut val = cst.clone();
        for (v, c) in expr {
            val = val + c.clone() * point[*v].clone();
        }
        if val.is_poison() {
            return Err(Poisoned);
        }
        point[*var] = val;
    }

    Ok(FastOutcome::Feasible { point })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::NormOp;
    use crate::scalar::{rint, Rat};

    fn eq(coeffs: &[(usize, i64)], rhs: i64) -> NormRow<Rat> {
        NormRow {
            coeffs: coeffs.iter().map(|(v, c)| (*v, rint(*c))).collect(),
            op: NormOp::Eq,
            rhs: rint(rhs),
            source: 0,
            negated: false,
        }
    }

    fn le(coeffs: &[(usize, i64)], rhs: i64) -> NormRow<Rat> {
        NormRow {
            coeffs: coeffs.iter().map(|(v, c)| (*v, rint(*c))).collect(),
            op: NormOp::Le,
            rhs: rint(rhs),
            source: 0,
            negated: false,
        }
    }

    #[test]
    fn chain_of_equalities() {
        // x0 = 10, x1 = x0 - 2*x2, x2 = 3, x1 >= 0 -> x1 = 4
        let rows = vec![
            eq(&[(0, 1)], 10),
            eq(&[(1, 1), (0, -1), (2, 2)], 0),
            eq(&[(2, 1)], 3),
            le(&[(1, -1)], 0),
        ];
        match fast_feasible(3, &rows).unwrap() {
            FastOutcome::Feasible { point } => {
                assert_eq!(point[0], rint(10));
                assert_eq!(point[1], rint(4));
                assert_eq!(point[2], rint(3));
            }
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn bound_clash_detected() {
        let rows = vec![le(&[(0, 1)], 1), le(&[(0, -1)], -2)];
        assert!(matches!(fast_feasible(1, &rows).unwrap(), FastOutcome::Infeasible));
    }

    #[test]
    fn inconsistent_equality() {
        let rows = vec![eq(&[(0, 1)], 1), eq(&[(0, 1)], 2)];
        assert!(matches!(fast_feasible(1, &rows).unwrap(), FastOutcome::Infeasible));
    }

    #[test]
    fn residual_lp_needed() {
        // x + y <= 1, x >= 0, y >= 0, x + 2y >= 1/2: feasible
        let rows = vec![
            le(&[(0, 1), (1, 1)], 1),
            le(&[(0, -1)], 0),
            le(&[(1, -1)], 0),
            NormRow {
                coeffs: vec![(0, rint(-2)), (1, rint(-4))],
                op: NormOp::Le,
                rhs: rint(-1),
                source: 0,
                negated: false,
            },
        ];
        match fast_feasible(2, &rows).unwrap() {
            FastOutcome::Feasible { point } => {
                let s = point[0].clone() + point[1].clone();
                assert!(s <= rint(1));
            }
            _ => panic!("expected feasible"),
        }
    }
}

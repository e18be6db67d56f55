//! Exact two-phase simplex over free variables.
//!
//! Input is a pure inequality system `sum(g*x) <= h` (or `<` for strict rows)
//! over `nvars` free variables. Strict rows are handled by one slack
//! variable: each `expr < h` becomes `expr + eps <= h`, a cap row `eps <= 1`
//! is added, and phase II maximizes `eps`. The system is strictly feasible
//! iff the optimum is positive; the optimum doubles as the strictness margin.
//!
//! Pivoting uses Bland's rule throughout, so the solver terminates without
//! cycling and produces identical results on every platform. Infeasibility
//! comes with a Farkas certificate: nonnegative row multipliers whose
//! combination is `0 <= negative`, or `0 < 0` with weight on a strict row.

use crate::scalar::Scalar;

/// `sum(coeffs * x) <= rhs`, strict when `strict` is set.
#[derive(Clone, Debug)]
pub struct IneqRow<T> {
    pub coeffs: Vec<(usize, T)>,
    pub rhs: T,
    pub strict: bool,
}

#[derive(Clone, Debug)]
pub enum LpResult<T> {
    Feasible {
        /// One value per input variable.
        point: Vec<T>,
        /// Optimal strict-slack value in [0, 1]; 1 when no strict rows exist.
        margin: T,
    },
    Infeasible {
        /// One nonnegative multiplier per input row.
        farkas: Vec<T>,
    },
}

/// Arithmetic overflowed the scalar carrier; retry with a wider one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Poisoned;

struct Tableau<T> {
    ncols: usize,
    rows: Vec<Vec<T>>,
    b: Vec<T>,
    basis: Vec<usize>,
    obj: Vec<T>,
    obj_val: T,
    /// First artificial column; artificials never re-enter the basis.
    art0: usize,
    /// Row sign flips applied to make b nonnegative.
    sigma: Vec<bool>,
}

impl<T: Scalar> Tableau<T> {
    fn check(x: &T) -> Result<(), Poisoned> {
        if x.is_poison() {
            Err(Poisoned)
        } else {
            Ok(())
        }
    }

    fn pivot(&mut self, r: usize, j: usize) -> Result<(), Poisoned> {
        let p = self.rows[r][j].clone();
        Self::check(&p)?;
        let inv = T::one() / p;
        Self::check(&inv)?;
        for v in self.rows[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        self.b[r] = self.b[r].clone() * inv.clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][j].clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..self.ncols {
                let delta = f.clone() * self.rows[r][c].clone();
                self.rows[i][c] = self.rows[i][c].clone() - delta;
            }
            self.b[i] = self.b[i].clone() - f.clone() * self.b[r].clone();
        }
        let f = self.obj[j].clone();
        if !f.is_zero() {
            for c in 0..self.ncols {
                let delta = f.clone() * self.rows[r][c].clone();
                self.obj[c] = self.obj[c].clone() - delta;
            }
            self.obj_val = self.obj_val.clone() - f * self.b[r].clone();
        }
        self.basis[r] = j;
        Ok(())
    }

    /// Bland's rule iteration loop for the current objective row.
    /// Returns Ok(()) at optimality; unboundedness cannot occur for the
    /// objectives used here (phase I is bounded below by 0, phase II by the
    /// cap row), so it is reported as poison to force the fallback path.
    fn optimize(&mut self) -> Result<(), Poisoned> {
        loop {
            // Entering: smallest-index non-artificial column with a negative
            // reduced cost.
            let mut enter = None;
            for j in 0..self.art0 {
                Self::check(&self.obj[j])?;
                if self.obj[j] < T::zero() {
                    enter = Some(j);
                    break;
                }
            }
            let Some(j) = enter else { return Ok(()) };
            // Leaving: minimum ratio b_r / a_rj over a_rj > 0, ties broken by
            // the smallest basic-variable index (Bland).
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][j];
                Self::check(a)?;
                if *a <= T::zero() {
                    continue;
                }
                Self::check(&self.b[r])?;
                let ratio = self.b[r].clone() / a.clone();
                Self::check(&ratio)?;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, brat)) => {
                        if ratio < brat || (ratio == brat && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, brat))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else { return Err(Poisoned) };
            self.pivot(r, j)?;
        }
    }

    fn value_of(&self, col: usize) -> T {
        for (r, bvar) in self.basis.iter().enumerate() {
            if *bvar == col {
                return self.b[r].clone();
            }
        }
        T::zero()
    }
}

/// Decide feasibility of the inequality system exactly; all variables free.
pub fn solve_ineq<T: Scalar>(nvars: usize, input: &[IneqRow<T>]) -> Result<LpResult<T>, Poisoned> {
    solve_ineq_signed(nvars, None, input)
}

/// As [`solve_ineq`], but variables flagged in `nonneg` are constrained to
/// be nonnegative structurally (no column split), which roughly halves the
/// tableau for presolved residual systems.
pub fn solve_ineq_signed<T: Scalar>(
    nvars: usize,
    nonneg: Option<&[bool]>,
    input: &[IneqRow<T>],
) -> Result<LpResult<T>, Poisoned> {
    let any_strict = input.iter().any(|r| r.strict);
    let m = input.len() + usize::from(any_strict);
    // Columns: one per variable, a negative copy per free variable, [eps],
    // slack block, artificial block.
    let is_free = |j: usize| nonneg.map_or(true, |mask| !mask[j]);
    let mut neg_col = vec![usize::MAX; nvars];
    let mut next = nvars;
    for (j, slot) in neg_col.iter_mut().enumerate() {
        if is_free(j) {
            *slot = next;
            next += 1;
        }
    }
    let eps_col = next;
    let slack0 = eps_col + usize::from(any_strict);
    let art0 = slack0 + m;
    let ncols = art0 + m;

    let mut t = Tableau {
        ncols,
        rows: Vec::with_capacity(m),
        b: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        obj: vec![T::zero(); ncols],
        obj_val: T::zero(),
        art0,
        sigma: Vec::with_capacity(m),
    };

    let build_row = |coeffs: &[(usize, T)], strict: bool, rhs: &T, i: usize, t: &mut Tableau<T>| {
        let mut row = vec![T::zero(); ncols];
        for (v, c) in coeffs {
            row[*v] = row[*v].clone() + c.clone();
            if neg_col[*v] != usize::MAX {
                row[neg_col[*v]] = row[neg_col[*v]].clone() - c.clone();
            }
        }
        if strict {
            row[eps_col] = T::one();
        }
        row[slack0 + i] = T::one();
        let mut b = rhs.clone();
        let flip = b < T::zero();
        if flip {
            for v in row.iter_mut() {
                if !v.is_zero() {
                    *v = -v.clone();
                }
            }
            b = -b;
        }
        row[art0 + i] = T::one();
        t.rows.push(row);
        t.b.push(b);
        t.basis.push(art0 + i);
        t.sigma.push(flip);
    };

    for (i, r) in input.iter().enumerate() {
        if r.rhs.is_poison() || r.coeffs.iter().any(|(_, c)| c.is_poison()) {
            return Err(Poisoned);
        }
        build_row(&r.coeffs, r.strict && any_strict, &r.rhs, i, &mut t);
    }
    if any_strict {
        // eps <= 1 keeps phase II bounded and equals the margin clamp.
        build_row(&[], false, &T::one(), input.len(), &mut t);
        t.rows.last_mut().unwrap()[eps_col] = T::one();
    }

    // Phase I: minimize the sum of artificials. The initial objective row is
    // c - sum(rows) restricted to non-basic columns.
    for c in 0..ncols {
        let mut acc = if c >= art0 { T::one() } else { T::zero() };
        for r in 0..t.rows.len() {
            acc = acc - t.rows[r][c].clone();
        }
        t.obj[c] = acc;
    }
    let mut ov = T::zero();
    for r in 0..t.rows.len() {
        ov = ov - t.b[r].clone();
    }
    t.obj_val = ov;

    t.optimize()?;
    Tableau::<T>::check(&t.obj_val)?;
    if t.obj_val < T::zero() {
        // Residual artificial mass: min sum a = -obj_val > 0, infeasible.
        let farkas = extract_farkas(&t, input.len(), true, eps_col, any_strict)?;
        return Ok(LpResult::Infeasible { farkas });
    }

    // Drive basic artificials out of the basis; rows with no non-artificial
    // pivot are linearly dependent and stay parked at zero.
    for r in 0..t.rows.len() {
        if t.basis[r] >= art0 {
            let j = (0..art0).find(|&j| {
                let v = &t.rows[r][j];
                !v.is_poison() && !v.is_zero()
            });
            if let Some(j) = j {
                t.pivot(r, j)?;
            }
        }
    }

    if !any_strict {
        let point = read_point(&t, nvars, &neg_col)?;
        return Ok(LpResult::Feasible { point, margin: T::one() });
    }

    // Phase II: maximize eps == minimize -eps.
    for c in 0..ncols {
        t.obj[c] = T::zero();
    }
    t.obj[eps_col] = -T::one();
    t.obj_val = T::zero();
    // Price out basic variables with nonzero phase-II cost.
    for r in 0..t.rows.len() {
        if t.basis[r] == eps_col {
            for c in 0..ncols {
                let delta = t.rows[r][c].clone();
                t.obj[c] = t.obj[c].clone() + delta;
            }
            t.obj_val = t.obj_val.clone() + t.b[r].clone();
        }
    }
    t.optimize()?;
    Tableau::<T>::check(&t.obj_val)?;
    let eps_star = t.obj_val.clone();
    if eps_star > T::zero() {
        let point = read_point(&t, nvars, &neg_col)?;
        Ok(LpResult::Feasible { point, margin: eps_star })
    } else {
        let farkas = extract_farkas(&t, input.len(), false, eps_col, any_strict)?;
        Ok(LpResult::Infeasible { farkas })
    }
}

fn read_point<T: Scalar>(t: &Tableau<T>, nvars: usize, neg_col: &[usize]) -> Result<Vec<T>, Poisoned> {
    let mut point = Vec::with_capacity(nvars);
    for j in 0..nvars {
        let mut v = t.value_of(j);
        if neg_col[j] != usize::MAX {
            v = v - t.value_of(neg_col[j]);
        }
        Tableau::<T>::check(&v)?;
        point.push(v);
    }
    Ok(point)
}

/// Dual multipliers via the artificial block, which holds B^-1 throughout.
///
/// With phase costs `c`, `y = c_B * B^-1`, and the multiplier on original row
/// `i` is `u_i = -sigma_i * y_i` (nonnegative at optimality). The cap row's
/// multiplier, when present, folds away as described in the module docs.
fn extract_farkas<T: Scalar>(
    t: &Tableau<T>,
    n_input: usize,
    phase1: bool,
    eps_col: usize,
    any_strict: bool,
) -> Result<Vec<T>, Poisoned> {
    let m = t.rows.len();
    let mut u = Vec::with_capacity(n_input);
    for i in 0..n_input {
        let mut y = T::zero();
        for r in 0..m {
            let cb = if phase1 {
                if t.basis[r] >= t.art0 {
                    T::one()
                } else {
                    T::zero()
                }
            } else if any_strict && t.basis[r] == eps_col {
                -T::one()
            } else {
                T::zero()
            };
            if cb.is_zero() {
                continue;
            }
            y = y + cb * t.rows[r][t.art0 + i].clone();
        }
        Tableau::<T>::check(&y)?;
        let ui = if t.sigma[i] { y } else { -y };
        if ui < T::zero() {
            // Dual sign violation only happens via carrier overflow.
            return Err(Poisoned);
        }
        u.push(ui);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rint, Rat};

    fn row(coeffs: &[(usize, i64)], rhs: i64, strict: bool) -> IneqRow<Rat> {
        IneqRow {
            coeffs: coeffs.iter().map(|(v, c)| (*v, rint(*c))).collect(),
            rhs: rint(rhs),
            strict,
        }
    }

    #[test]
    fn feasible_interval() {
        // x >= 1 (as -x <= -1), x <= 2
        let rows = vec![row(&[(0, -1)], -1, false), row(&[(0, 1)], 2, false)];
        match solve_ineq(1, &rows).unwrap() {
            LpResult::Feasible { point, margin } => {
                assert!(point[0] >= rint(1) && point[0] <= rint(2));
                assert_eq!(margin, rint(1));
            }
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn infeasible_with_certificate() {
        // x >= 1, x <= 0
        let rows = vec![row(&[(0, -1)], -1, false), row(&[(0, 1)], 0, false)];
        match solve_ineq(1, &rows).unwrap() {
            LpResult::Infeasible { farkas } => {
                // sum u*g == 0 and sum u*h < 0
                let g = farkas[0].clone() * rint(-1) + farkas[1].clone() * rint(1);
                let h = farkas[0].clone() * rint(-1) + farkas[1].clone() * rint(0);
                assert!(g.is_zero());
                assert!(h < rint(0));
            }
            _ => panic!("expected infeasible"),
        }
    }

    #[test]
    fn strict_boundary_cases() {
        // x < 1 and x > 1: infeasible
        let rows = vec![row(&[(0, 1)], 1, true), row(&[(0, -1)], -1, true)];
        assert!(matches!(solve_ineq(1, &rows).unwrap(), LpResult::Infeasible { .. }));

        // x < 1 and x >= 1: infeasible with strict certificate (0 < 0)
        let rows = vec![row(&[(0, 1)], 1, true), row(&[(0, -1)], -1, false)];
        match solve_ineq(1, &rows).unwrap() {
            LpResult::Infeasible { farkas } => {
                let h = farkas[0].clone() * rint(1) + farkas[1].clone() * rint(-1);
                assert!(h <= rint(0));
                assert!(!farkas[0].is_zero() || h < rint(0));
            }
            _ => panic!("expected infeasible"),
        }

        // x < 1 alone: feasible with positive margin
        let rows = vec![row(&[(0, 1)], 1, true)];
        match solve_ineq(1, &rows).unwrap() {
            LpResult::Feasible { point, margin } => {
                assert!(point[0] < rint(1));
                assert!(margin > rint(0) && margin <= rint(1));
            }
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn empty_system_is_feasible() {
        match solve_ineq::<Rat>(3, &[]).unwrap() {
            LpResult::Feasible { point, .. } => assert_eq!(point, vec![rint(0); 3]),
            _ => panic!(),
        }
    }

    #[test]
    fn fractional_solution() {
        // 2x <= 1, -2x <= -1 forces x = 1/2
        let rows = vec![row(&[(0, 2)], 1, false), row(&[(0, -2)], -1, false)];
        match solve_ineq(1, &rows).unwrap() {
            LpResult::Feasible { point, .. } => assert_eq!(point[0], rat(1, 2)),
            _ => panic!(),
        }
    }
}

//! Linear constraints over named variables.
//!
//! A [`LinearConstraint`] is `sum(coeffs[v] * v) op rhs` with an optional
//! provenance tag. Constraint systems are the currency of all feasibility
//! reasoning: path encodings, invariants, guards and goal sets all end up
//! here.

use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelOp {
    Le,
    Lt,
    Eq,
    Ge,
    Gt,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Le => "<=",
            RelOp::Lt => "<",
            RelOp::Eq => "==",
            RelOp::Ge => ">=",
            RelOp::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<RelOp> {
        Some(match s {
            "<=" => RelOp::Le,
            "<" => RelOp::Lt,
            "==" | "=" => RelOp::Eq,
            ">=" => RelOp::Ge,
            ">" => RelOp::Gt,
            _ => return None,
        })
    }

    pub fn holds<T: Ord>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            RelOp::Le => lhs <= rhs,
            RelOp::Lt => lhs < rhs,
            RelOp::Eq => lhs == rhs,
            RelOp::Ge => lhs >= rhs,
            RelOp::Gt => lhs > rhs,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, RelOp::Lt | RelOp::Gt)
    }
}

/// Total assignment of values to variable names.
pub type Valuation<T> = BTreeMap<String, T>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint<T> {
    /// Variable coefficients; zero entries are dropped on construction.
    pub coeffs: BTreeMap<String, T>,
    pub op: RelOp,
    pub rhs: T,
    pub tag: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("variable `{0}` is not bound in the valuation")]
pub struct UnboundVariable(pub String);

impl<T: Scalar> LinearConstraint<T> {
    pub fn new(coeffs: impl IntoIterator<Item = (String, T)>, op: RelOp, rhs: T) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        LinearConstraint { coeffs, op, rhs, tag: None }
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    /// `var op rhs`
    pub fn atom(var: impl Into<String>, op: RelOp, rhs: T) -> Self {
        LinearConstraint::new([(var.into(), T::one())], op, rhs)
    }

    /// Exact evaluation of `sum(coeffs * v) op rhs`.
    pub fn eval(&self, v: &Valuation<T>) -> Result<bool, UnboundVariable> {
        let mut lhs = T::zero();
        for (name, c) in &self.coeffs {
            let val = v.get(name).ok_or_else(|| UnboundVariable(name.clone()))?;
            lhs = lhs + c.clone() * val.clone();
        }
        Ok(self.op.holds(&lhs, &self.rhs))
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(|s| s.as_str())
    }

    /// Structural equality up to scaling by a positive rational (and up to
    /// sign for equalities). Used by tests that assert the presence of a
    /// specific constraint in an encoded system.
    pub fn same_halfspace(&self, other: &LinearConstraint<T>) -> bool {
        if self.coeffs.len() != other.coeffs.len() {
            return false;
        }
        let flip_ok = self.op == RelOp::Eq && other.op == RelOp::Eq;
        if self.op != other.op && !flip_ok {
            return false;
        }
        // Find the scale from the first coefficient pair (or the rhs).
        let scale = match self.coeffs.iter().next() {
            Some((name, c)) => match other.coeffs.get(name) {
                Some(oc) => oc.clone() / c.clone(),
                None => return false,
            },
            None => {
                if self.rhs.is_zero() || other.rhs.is_zero() {
                    return self.rhs.is_zero() && other.rhs.is_zero();
                }
                other.rhs.clone() / self.rhs.clone()
            }
        };
        if scale.is_zero() || (scale < T::zero() && !flip_ok) {
            return false;
        }
        if other.rhs != self.rhs.clone() * scale.clone() {
            return false;
        }
        self.coeffs.iter().all(|(name, c)| {
            other.coeffs.get(name).is_some_and(|oc| *oc == c.clone() * scale.clone())
        })
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for LinearConstraint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            for (i, (name, c)) in self.coeffs.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "{}*{}", c, name)?;
            }
        }
        write!(f, " {} {}", self.op.symbol(), self.rhs)
    }
}

/// A named, ordered collection of constraints over a declared variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem<T> {
    pub variables: Vec<String>,
    pub constraints: Vec<LinearConstraint<T>>,
}

impl<T: Scalar> ConstraintSystem<T> {
    pub fn new(variables: Vec<String>, constraints: Vec<LinearConstraint<T>>) -> Self {
        ConstraintSystem { variables, constraints }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Names used by constraints but not declared, in first-use order.
    pub fn undeclared_variables(&self) -> Vec<String> {
        let declared: std::collections::BTreeSet<&str> =
            self.variables.iter().map(|s| s.as_str()).collect();
        let mut missing = Vec::new();
        for c in &self.constraints {
            for v in c.variables() {
                if !declared.contains(v) && !missing.iter().any(|m| m == v) {
                    missing.push(v.to_string());
                }
            }
        }
        missing
    }

    /// Evaluate every constraint at `v`; true when all hold.
    pub fn satisfied_by(&self, v: &Valuation<T>) -> Result<bool, UnboundVariable> {
        for c in &self.constraints {
            if !c.eval(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rint, Rat};

    fn val(pairs: &[(&str, Rat)]) -> Valuation<Rat> {
        pairs.iter().map(|(n, v)| (n.to_string(), v.clone())).collect()
    }

    #[test]
    fn eval_examples() {
        // 2x + 3y <= 10
        let c = LinearConstraint::new(
            [("x".to_string(), rint(2)), ("y".to_string(), rint(3))],
            RelOp::Le,
            rint(10),
        );
        assert!(c.eval(&val(&[("x", rint(2)), ("y", rint(2))])).unwrap());
        assert!(!c.eval(&val(&[("x", rint(2)), ("y", rint(3))])).unwrap());

        // strictness: x < 1 at x = 1 is false
        let s = LinearConstraint::atom("x", RelOp::Lt, rint(1));
        assert!(!s.eval(&val(&[("x", rint(1))])).unwrap());
        assert!(s.eval(&val(&[("x", rat(9, 10))])).unwrap());
    }

    #[test]
    fn eval_unbound_names_variable() {
        let c = LinearConstraint::atom("z", RelOp::Ge, rint(0));
        let err = c.eval(&val(&[("x", rint(1))])).unwrap_err();
        assert_eq!(err, UnboundVariable("z".to_string()));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let c = LinearConstraint::new(
            [("x".to_string(), rint(0)), ("y".to_string(), rint(1))],
            RelOp::Le,
            rint(1),
        );
        assert_eq!(c.coeffs.len(), 1);
    }

    #[test]
    fn same_halfspace_modulo_scale() {
        let a = LinearConstraint::new(
            [("x".to_string(), rint(2)), ("y".to_string(), rint(4))],
            RelOp::Le,
            rint(6),
        );
        let b = LinearConstraint::new(
            [("x".to_string(), rint(1)), ("y".to_string(), rint(2))],
            RelOp::Le,
            rint(3),
        );
        assert!(a.same_halfspace(&b));
        let c = LinearConstraint::new(
            [("x".to_string(), rint(-1)), ("y".to_string(), rint(-2))],
            RelOp::Le,
            rint(-3),
        );
        assert!(!a.same_halfspace(&c));
    }
}

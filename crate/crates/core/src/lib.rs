//! Exact analysis toolkit for bounded planning on linear hybrid automata.
//!
//! The crate explains why a bounded reach-goal planning problem on a
//! rectangular linear hybrid automaton has no plan. Two pipelines share one
//! numeric core:
//!
//! * waypoint explanation: enumerate the bounded initial-to-goal paths of the
//!   automaton graph, fold them into a common location subsequence, turn that
//!   into a chain of intermediate reach problems, and report the first one
//!   that is unreachable under the continuous dynamics;
//! * model reconciliation: replay the paths of a "human" model against an
//!   "agent" model, reporting edges the agent does not have and the
//!   irreducible infeasible constraint cores (mapped back to path segments)
//!   where the agent's dynamics reject an otherwise plausible plan.
//!
//! All arithmetic on the decision path is exact rational; the solver runs on
//! a word-sized carrier when it can and escalates to arbitrary precision on
//! overflow. Concrete aliases for the rational instantiation live at the
//! crate root.

pub mod constraint;
pub mod encode;
pub mod explain;
pub mod graph;
pub mod model;
pub mod subseq;
pub mod feasibility;
pub mod fm;
pub mod iis;
pub mod normal;
pub mod presolve;
pub mod reconcile;
pub mod scalar;
pub mod simplex;

pub use scalar::{rat, rint, Rat, Scalar, SmallRat};

/// Linear constraint over the exact rational carrier.
pub type Constraint = constraint::LinearConstraint<Rat>;
/// Constraint system over the exact rational carrier.
pub type System = constraint::ConstraintSystem<Rat>;
/// Valuation over the exact rational carrier.
pub type Valuation = constraint::Valuation<Rat>;
/// Hybrid automaton over the exact rational carrier.
pub type Automaton = model::Automaton<Rat>;
/// Planning problem over the exact rational carrier.
pub type Problem = model::PlanningProblem<Rat>;
/// Timed plan over the exact rational carrier.
pub type Plan = model::Plan<Rat>;
/// Run witness over the exact rational carrier.
pub type Run = model::Run<Rat>;

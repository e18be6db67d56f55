//! Shared helpers for integration tests: a tiny deterministic RNG and random
//! constraint-system generation matching the oracle-suite distributions.

use hxplain_core::constraint::{ConstraintSystem, LinearConstraint, RelOp};
use hxplain_core::{rat, Rat};

/// xorshift64*; deterministic across platforms, no dependencies.
pub struct Rng(pub u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed.max(1))
    }

    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.below((hi - lo + 1) as u64) as i64)
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }
}

/// Random system with up to `max_vars` variables and `max_cons` constraints,
/// integer-or-half coefficients in [-5, 5], roughly `strict_pct`% strict rows.
pub fn random_system(rng: &mut Rng, max_vars: usize, max_cons: usize, strict_pct: u64) -> ConstraintSystem<Rat> {
    let nvars = 1 + rng.below(max_vars as u64) as usize;
    let ncons = 1 + rng.below(max_cons as u64) as usize;
    let variables: Vec<String> = (0..nvars).map(|i| format!("v{i}")).collect();
    let mut constraints = Vec::with_capacity(ncons);
    for _ in 0..ncons {
        let mut coeffs = Vec::new();
        for v in 0..nvars {
            if rng.chance(60) {
                let num = rng.range_i64(-5, 5);
                let den = if rng.chance(25) { 2 } else { 1 };
                if num != 0 {
                    coeffs.push((format!("v{v}"), rat(num, den)));
                }
            }
        }
        let op = if rng.chance(strict_pct) {
            if rng.chance(50) {
                RelOp::Lt
            } else {
                RelOp::Gt
            }
        } else {
            match rng.below(3) {
                0 => RelOp::Le,
                1 => RelOp::Ge,
                _ => RelOp::Eq,
            }
        };
        let rhs = rat(rng.range_i64(-5, 5), if rng.chance(25) { 2 } else { 1 });
        constraints.push(LinearConstraint::new(coeffs, op, rhs));
    }
    ConstraintSystem::new(variables, constraints)
}

//! Scalar abstraction for the exact numeric core.
//!
//! All decision-making arithmetic in this crate is exact. The solver and
//! encoding machinery are generic over [`Scalar`] so they can run on
//! arbitrary-precision rationals ([`Rat`]) or on the word-sized fast carrier
//! [`SmallRat`], which flags overflow instead of wrapping. A computation on
//! `SmallRat` either finishes with exact values or reports poison, in which
//! case the caller re-runs on `Rat`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact arbitrary-precision rational, the concrete number type of the crate.
pub type Rat = BigRational;

/// `n/d` as a [`Rat`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// Integer `n` as a [`Rat`].
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Exact field arithmetic with a total order, as needed by the simplex core.
///
/// `is_poison` reports overflow for bounded carriers; `Rat` never poisons.
pub trait Scalar:
    Clone
    + Ord
    + Eq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    /// Exact conversion from `Rat`; bounded carriers poison when out of range.
    fn from_rat(r: &Rat) -> Self;

    /// Exact conversion back to `Rat`. Must not be called on poisoned values.
    fn to_rat(&self) -> Rat;

    fn is_poison(&self) -> bool {
        false
    }

    fn from_int(n: i64) -> Self {
        Self::from_rat(&rint(n))
    }
}

impl Scalar for Rat {
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn to_rat(&self) -> Rat {
        self.clone()
    }
}

/// Magnitude cap for [`SmallRat`] numerators and denominators.
///
/// Keeping both below 2^62 means cross-multiplied comparisons fit in i128
/// without further checks.
const CAP: i128 = 1 << 62;

/// Word-sized exact rational with overflow poisoning.
///
/// Invariants: `d >= 1` and `gcd(|n|, d) == 1`, or `d == 0` marking poison.
/// Every arithmetic result that would exceed [`CAP`] becomes poison, and
/// poison propagates through all operations.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct SmallRat {
    n: i128,
    d: i128,
}

const POISON: SmallRat = SmallRat { n: 0, d: 0 };

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

impl SmallRat {
    pub fn new(n: i128, d: i128) -> SmallRat {
        if d == 0 {
            return POISON;
        }
        let g = gcd(n, d);
        let (mut n, mut d) = if g == 0 { (0, 1) } else { (n / g, d / g) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        if n.abs() >= CAP || d >= CAP {
            return POISON;
        }
        SmallRat { n, d }
    }

    fn checked(n: Option<i128>, d: Option<i128>) -> SmallRat {
        match (n, d) {
            (Some(n), Some(d)) => SmallRat::new(n, d),
            _ => POISON,
        }
    }
}

impl fmt::Debug for SmallRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poison() {
            write!(f, "poison")
        } else if self.d == 1 {
            write!(f, "{}", self.n)
        } else {
            write!(f, "{}/{}", self.n, self.d)
        }
    }
}

impl Add for SmallRat {
    type Output = SmallRat;
    fn add(self, rhs: SmallRat) -> SmallRat {
        if self.is_poison() || rhs.is_poison() {
            return POISON;
        }
        let n = self
            .n
            .checked_mul(rhs.d)
            .and_then(|a| rhs.n.checked_mul(self.d).and_then(|b| a.checked_add(b)));
        SmallRat::checked(n, self.d.checked_mul(rhs.d))
    }
}

impl Sub for SmallRat {
    type Output = SmallRat;
    fn sub(self, rhs: SmallRat) -> SmallRat {
        self + (-rhs)
    }
}

impl Mul for SmallRat {
    type Output = SmallRat;
    fn mul(self, rhs: SmallRat) -> SmallRat {
        if self.is_poison() || rhs.is_poison() {
            return POISON;
        }
        // Cross-reduce first so intermediate products stay small.
        let g1 = gcd(self.n, rhs.d).max(1);
        let g2 = gcd(rhs.n, self.d).max(1);
        let (an, ad) = (self.n / g1, self.d / g2);
        let (bn, bd) = (rhs.n / g2, rhs.d / g1);
        SmallRat::checked(an.checked_mul(bn), ad.checked_mul(bd))
    }
}

impl Div for SmallRat {
    type Output = SmallRat;
    fn div(self, rhs: SmallRat) -> SmallRat {
        if rhs.is_zero() || rhs.is_poison() || self.is_poison() {
            return POISON;
        }
        let flipped = SmallRat { n: rhs.d, d: rhs.n }; // new() below re-canonicalizes sign
        self * SmallRat::new(flipped.n, flipped.d)
    }
}

impl Neg for SmallRat {
    type Output = SmallRat;
    fn neg(self) -> SmallRat {
        if self.is_poison() {
            return POISON;
        }
        SmallRat { n: -self.n, d: self.d }
    }
}

impl PartialOrd for SmallRat {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SmallRat {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Poison sorts last; callers must check is_poison before trusting
        // any comparison-driven decision.
        match (self.is_poison(), other.is_poison()) {
            (true, true) => std::cmp::Ordering::Equal,
            (true, false) => std::cmp::Ordering::Greater,
            (false, true) => std::cmp::Ordering::Less,
            // |n| < 2^62 and 0 < d < 2^62, so both products fit in i128.
            (false, false) => (self.n * other.d).cmp(&(other.n * self.d)),
        }
    }
}

impl Zero for SmallRat {
    fn zero() -> Self {
        SmallRat { n: 0, d: 1 }
    }
    fn is_zero(&self) -> bool {
        self.n == 0 && self.d != 0
    }
}

impl One for SmallRat {
    fn one() -> Self {
        SmallRat { n: 1, d: 1 }
    }
}

impl Scalar for SmallRat {
    fn from_rat(r: &Rat) -> Self {
        use num_traits::ToPrimitive;
        match (r.numer().to_i128(), r.denom().to_i128()) {
            (Some(n), Some(d)) => SmallRat::new(n, d),
            _ => POISON,
        }
    }

    fn to_rat(&self) -> Rat {
        assert!(!self.is_poison(), "poisoned SmallRat escaped the solver");
        Rat::new(self.n.into(), self.d.into())
    }

    fn is_poison(&self) -> bool {
        self.d == 0
    }
}

/// `|x|` for any scalar.
pub fn abs<T: Scalar>(x: &T) -> T {
    if *x < T::zero() {
        -x.clone()
    } else {
        x.clone()
    }
}

/// True when the rational is signed such that `Rat::is_negative` agrees; kept
/// here so call sites avoid importing num_traits everywhere.
pub fn is_negative(r: &Rat) -> bool {
    r.is_negative()
}

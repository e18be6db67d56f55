//! Exact text form of rationals.
//!
//! Accepted on parse: integers (`10`, `-3`), fractions (`1/10`, `-7/2`) and
//! plain decimals (`2.5`, `-0.25`), all converted exactly. Canonical output
//! is the integer form when the denominator is 1, else `p/q` reduced.

use hxplain_core::Rat;
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct RatParseError(pub String);

pub fn parse_rat(text: &str) -> Result<Rat, RatParseError> {
    let s = text.trim();
    let err = || RatParseError(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| err())?;
        let d: BigInt = den.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let (sign, int) = match int.strip_prefix('-') {
            Some(rest) => (-BigInt::one(), rest),
            None => (BigInt::one(), int.strip_prefix('+').unwrap_or(int)),
        };
        if !int.chars().all(|c| c.is_ascii_digit())
            || frac.is_empty()
            || !frac.chars().all(|c| c.is_ascii_digit())
        {
            return Err(err());
        }
        let int: BigInt = if int.is_empty() { BigInt::zero() } else { int.parse().map_err(|_| err())? };
        let frac_val: BigInt = frac.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(Rat::new(sign * (int * &scale + frac_val), scale));
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rat::from_integer(n))
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

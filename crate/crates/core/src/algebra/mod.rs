//! Exact big-rational polynomial and rational-function arithmetic.

pub mod families;
pub mod identity;
pub mod poly;
pub mod rational_fn;

pub use identity::{
    identity_defect, verify_functional_identity, verify_lemma_suite, LemmaFamily, LemmaReport,
    LemmaRow, LemmaStatus,
};
pub use poly::Poly;
pub use rational_fn::{rf_arith, ArithOp, RationalFn};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Parse `"3"`, `"-1/2"`, `"0.125"`, `"1e-3"` or `"2.5E+2"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Invalid(format!("cannot parse `{s}` as a rational number"));
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let n: BigInt = all.parse().map_err(|_| bad())?;
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = exponent - frac_part.len() as i32;
    let mut q = BigRational::from_integer(n);
    let factor = (0..scale.unsigned_abs()).fold(BigRational::one(), |acc, _| acc * &ten);
    if scale >= 0 {
        q *= factor;
    } else {
        q /= factor;
    }
    Ok(if neg { -q } else { q })
}

//! Exact rational forms of the chaotic families and their paired weight
//! functions `H` satisfying `H(F(x)) = G(F'(x)) H(x)`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{rat, Poly};
use super::rational_fn::RationalFn;
use crate::error::{Error, Result};

/// `T2(x) = 1 - 2x^2`.
pub fn chebyshev() -> RationalFn {
    Poly::from_i64s(&[1, 0, -2]).into()
}

/// `H2(x) = 1 - x^2`.
pub fn chebyshev_weight() -> RationalFn {
    Poly::from_i64s(&[1, 0, -1]).into()
}

/// `4x(1 - x)`.
pub fn logistic() -> RationalFn {
    Poly::from_i64s(&[0, 4, -4]).into()
}

/// `x(1 - x)`.
pub fn logistic_weight() -> RationalFn {
    Poly::from_i64s(&[0, 1, -1]).into()
}

/// `x^3 + a x + b`.
pub fn elliptic_cubic(a: &BigRational, b: &BigRational) -> Poly {
    Poly::new(vec![b.clone(), a.clone(), BigRational::zero(), BigRational::one()])
}

/// x-coordinate of the tangent-doubling map on `y^2 = x^3 + a x + b`:
/// `(x^4 - 2a x^2 - 8b x + a^2) / (4 (x^3 + a x + b))`.
pub fn elliptic(a: &BigRational, b: &BigRational) -> RationalFn {
    let num = Poly::new(vec![
        a * a,
        -(b * rat(8)),
        -(a * rat(2)),
        BigRational::zero(),
        BigRational::one(),
    ]);
    let den = elliptic_cubic(a, b).scale(&rat(4));
    RationalFn::new(num, den).expect("nonzero cubic")
}

pub fn elliptic_weight(a: &BigRational, b: &BigRational) -> RationalFn {
    elliptic_cubic(a, b).into()
}

fn check_katsura_fukuda(l: &BigRational) -> Result<()> {
    if *l < BigRational::zero() || *l >= BigRational::one() {
        return Err(Error::Parameter {
            name: "l".into(),
            reason: format!("{l} is outside [0, 1)"),
        });
    }
    Ok(())
}

/// `4x(1 - x)(1 - l x) / (1 - l x^2)^2`, `l` in `[0, 1)`.
pub fn katsura_fukuda(l: &BigRational) -> Result<RationalFn> {
    check_katsura_fukuda(l)?;
    let one = BigRational::one();
    let four_x_one_minus_x = Poly::from_i64s(&[0, 4, -4]);
    let one_minus_lx = Poly::new(vec![one.clone(), -l.clone()]);
    let one_minus_lx2 = Poly::new(vec![one, BigRational::zero(), -l.clone()]);
    RationalFn::new(&four_x_one_minus_x * &one_minus_lx, one_minus_lx2.pow(2))
}

/// `x(1 - x)(1 - l x)`.
pub fn katsura_fukuda_weight(l: &BigRational) -> Result<RationalFn> {
    check_katsura_fukuda(l)?;
    let one_minus_lx = Poly::new(vec![BigRational::one(), -l.clone()]);
    Ok((&Poly::from_i64s(&[0, 1, -1]) * &one_minus_lx).into())
}

/// `G(z) = z^2 / 4`, the multiplier law shared by every family here.
pub fn quarter_square() -> Poly {
    Poly::new(vec![
        BigRational::zero(),
        BigRational::zero(),
        BigRational::new(1.into(), 4.into()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::ratio;

    #[test]
    fn elliptic_at_zero_is_a_squared_over_4b() {
        let f = elliptic(&rat(1), &rat(1));
        assert_eq!(f.eval(&rat(0)), Some(ratio(1, 4)));
    }

    #[test]
    fn katsura_fukuda_zero_is_logistic() {
        assert_eq!(katsura_fukuda(&rat(0)).unwrap(), logistic());
        assert_eq!(katsura_fukuda_weight(&rat(0)).unwrap(), logistic_weight());
    }

    #[test]
    fn katsura_fukuda_slope_at_zero() {
        for l in [ratio(0, 1), ratio(1, 4), ratio(1, 2), ratio(9, 10)] {
            let d = katsura_fukuda(&l).unwrap().derivative();
            assert_eq!(d.eval(&rat(0)), Some(rat(4)));
        }
    }

    #[test]
    fn katsura_fukuda_rejects_out_of_range() {
        assert!(katsura_fukuda(&rat(1)).is_err());
        assert!(katsura_fukuda(&ratio(-1, 2)).is_err());
    }
}

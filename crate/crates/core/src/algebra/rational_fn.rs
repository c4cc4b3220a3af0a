//! Rational functions `num / den` over Q in canonical form.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::Zero;

use super::poly::Poly;
use crate::error::{Error, Result};

/// Quotient of two rational polynomials.
///
/// Canonical form: `gcd(num, den) = 1`, `den` monic, zero stored as `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lc = den.leading().expect("nonzero denominator").recip();
        Self {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn zero() -> Self {
        Self {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn x() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        Self {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Re-run canonicalization. Values built through the public API are
    /// already canonical, so this is the identity on them.
    pub fn recanonicalize(&self) -> Self {
        Self::canonical(self.num.clone(), self.den.clone())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::canonical(self.num.scale(c), self.den.clone())
    }

    pub fn checked_div(&self, rhs: &RationalFn) -> Result<RationalFn> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn recip(&self) -> Result<RationalFn> {
        Self::one().checked_div(self)
    }

    pub fn pow(&self, e: u32) -> RationalFn {
        // Powers of coprime polynomials stay coprime.
        Self {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// `self(inner(x))`, exact and canonical.
    pub fn compose(&self, inner: &RationalFn) -> RationalFn {
        let n = self.num.degree().unwrap_or(0);
        let d = self.den.degree().unwrap_or(0);
        let k = n.max(d);
        let mut p_pows = Vec::with_capacity(k + 1);
        let mut q_pows = Vec::with_capacity(k + 1);
        p_pows.push(Poly::one());
        q_pows.push(Poly::one());
        for i in 1..=k {
            p_pows.push(&p_pows[i - 1] * &inner.num);
            q_pows.push(&q_pows[i - 1] * &inner.den);
        }
        let homogenize = |poly: &Poly| {
            poly.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .fold(Poly::zero(), |acc, (i, c)| {
                    &acc + &(&p_pows[i] * &q_pows[k - i]).scale(c)
                })
        };
        Self::canonical(homogenize(&self.num), homogenize(&self.den))
    }

    /// Quotient rule.
    pub fn derivative(&self) -> RationalFn {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::canonical(num, &self.den * &self.den)
    }

    /// Exact value, `None` at a pole.
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// Floating-point value from rounded coefficients (infinite at a pole).
    pub fn eval_f64(&self, x: f64) -> f64 {
        crate::numeric::horner(&self.num.to_f64(), x) / crate::numeric::horner(&self.den.to_f64(), x)
    }
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        if self.den == rhs.den {
            return RationalFn::canonical(&self.num + &rhs.num, self.den.clone());
        }
        RationalFn::canonical(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self + &(-rhs)
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        RationalFn::canonical(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl From<Poly> for RationalFn {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFn({self})")
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}] / [{}]", self.num, self.den)
        }
    }
}

/// Arithmetic selector mirroring the four field operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn rf_arith(lhs: &RationalFn, rhs: &RationalFn, op: ArithOp) -> Result<RationalFn> {
    Ok(match op {
        ArithOp::Add => lhs + rhs,
        ArithOp::Sub => lhs - rhs,
        ArithOp::Mul => lhs * rhs,
        ArithOp::Div => lhs.checked_div(rhs)?,
    })
}

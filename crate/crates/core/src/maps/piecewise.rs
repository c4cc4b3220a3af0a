use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use super::interval::Interval;
use super::smooth::{Map1D, SmoothMap1D};
use crate::algebra::poly::{rat_from_f64, rat_to_f64};
use crate::algebra::{Poly, RationalFn};
use crate::error::{Error, Result};

/// Two smooth branches joined continuously at a kink at `x = 0`.
#[derive(Clone)]
pub struct PiecewiseMap1D {
    name: String,
    left: SmoothMap1D,
    right: SmoothMap1D,
    domain: Interval,
}

impl PiecewiseMap1D {
    /// Fails unless `left(0) = right(0)` exactly.
    pub fn new(name: impl Into<String>, left: SmoothMap1D, right: SmoothMap1D, domain: Interval) -> Result<Self> {
        if !domain.contains_interior(0.0) {
            return Err(Error::Invalid(format!("domain {domain} must contain the kink at 0")));
        }
        let zero = BigRational::zero();
        let (l0, r0) = (left.eval_exact(&zero), right.eval_exact(&zero));
        if l0.is_none() || l0 != r0 {
            return Err(Error::Discontinuous {
                left: l0.as_ref().map_or(f64::NAN, rat_to_f64),
                right: r0.as_ref().map_or(f64::NAN, rat_to_f64),
            });
        }
        Ok(Self {
            name: name.into(),
            left,
            right,
            domain,
        })
    }

    /// Ingest branches whose kink sits at `c` by translating to `x - c`.
    /// Both coordinates shift, so the result is conjugate to the input.
    pub fn with_kink_at(
        name: impl Into<String>,
        left: SmoothMap1D,
        right: SmoothMap1D,
        domain: Interval,
        c: f64,
    ) -> Result<Self> {
        let cq = rat_from_f64(c).ok_or_else(|| Error::Invalid("kink must be finite".into()))?;
        let shift_in: RationalFn = Poly::new(vec![cq.clone(), BigRational::from_integer(1.into())]).into();
        let shift_out: RationalFn = Poly::new(vec![-cq, BigRational::from_integer(1.into())]).into();
        let translate = |m: &SmoothMap1D| -> SmoothMap1D {
            let f = shift_out.compose(&m.exact().compose(&shift_in));
            SmoothMap1D::new(m.name(), f, Interval::real_line(), m.params().to_vec())
        };
        let moved = Interval::new(shift_end(domain.lo, c), shift_end(domain.hi, c))?;
        Self::new(name, translate(&left), translate(&right), moved)
    }

    pub fn left(&self) -> &SmoothMap1D {
        &self.left
    }

    pub fn right(&self) -> &SmoothMap1D {
        &self.right
    }

    /// One-sided slopes `(f_L'(0), f_R'(0))`.
    pub fn kink_slopes(&self) -> Result<(f64, f64)> {
        Ok((self.left.eval_unchecked(0.0, 1)?, self.right.eval_unchecked(0.0, 1)?))
    }

    fn branch(&self, x: f64) -> &SmoothMap1D {
        if x <= 0.0 {
            &self.left
        } else {
            &self.right
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                x,
                domain: self.domain.to_string(),
            })
        }
    }
}

fn shift_end(e: super::interval::Endpoint, c: f64) -> super::interval::Endpoint {
    use super::interval::Endpoint::*;
    match e {
        Closed(v) => Closed(v - c),
        Open(v) => Open(v - c),
        Infinite => Infinite,
    }
}

impl Map1D for PiecewiseMap1D {
    fn eval(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        self.branch(x).eval_unchecked(x, 0)
    }

    /// One-sided away from the kink; at `x = 0` ask a branch instead.
    fn deriv(&self, x: f64, order: usize) -> Result<f64> {
        if !(1..=3).contains(&order) {
            return Err(Error::DerivativeOrder(order));
        }
        self.check_domain(x)?;
        if x == 0.0 {
            return Err(Error::KinkDerivative);
        }
        self.branch(x).eval_unchecked(x, order)
    }

    fn domain(&self) -> &Interval {
        &self.domain
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn kinks(&self) -> &[f64] {
        &[0.0]
    }

    fn taylor(&self, x: f64, order: usize) -> Option<Vec<f64>> {
        if x == 0.0 {
            None
        } else {
            self.branch(x).taylor(x, order)
        }
    }
}

impl fmt::Debug for PiecewiseMap1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseMap1D")
            .field("name", &self.name)
            .field("left", self.left.exact())
            .field("right", self.right.exact())
            .field("domain", &self.domain)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_map(cs: &[f64]) -> SmoothMap1D {
        SmoothMap1D::polynomial("branch", cs).unwrap()
    }

    #[test]
    fn rejects_discontinuity() {
        let err = PiecewiseMap1D::new("bad", poly_map(&[1.0, 2.0]), poly_map(&[1.5, 0.5]), Interval::real_line());
        assert!(matches!(err, Err(Error::Discontinuous { .. })));
    }

    #[test]
    fn branch_selection_and_kink_derivative() {
        let f = PiecewiseMap1D::new("tent", poly_map(&[1.0, 2.0]), poly_map(&[1.0, 0.5]), Interval::real_line()).unwrap();
        assert_eq!(f.eval(-1.0).unwrap(), -1.0);
        assert_eq!(f.eval(2.0).unwrap(), 2.0);
        assert_eq!(f.eval(0.0).unwrap(), 1.0);
        assert_eq!(f.deriv(-0.1, 1).unwrap(), 2.0);
        assert_eq!(f.deriv(0.1, 1).unwrap(), 0.5);
        assert_eq!(f.deriv(0.0, 1), Err(Error::KinkDerivative));
        assert_eq!(f.kink_slopes().unwrap(), (2.0, 0.5));
    }

    #[test]
    fn translated_kink_lands_at_origin() {
        // Kink at c = 1: left 1 + 2(x - 1), right 1 + (x - 1)/2.
        let left = poly_map(&[-1.0, 2.0]);
        let right = poly_map(&[0.5, 0.5]);
        let f = PiecewiseMap1D::with_kink_at("shifted", left, right, Interval::real_line(), 1.0).unwrap();
        // In the new coordinate u = x - 1: u ↦ 2u on the left, u/2 on the right.
        assert_eq!(f.eval(-0.5).unwrap(), -1.0);
        assert_eq!(f.eval(0.5).unwrap(), 0.25);
    }
}

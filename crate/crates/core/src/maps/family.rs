use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use super::catalog::AnyMap;
use super::interval::Interval;
use super::piecewise::PiecewiseMap1D;
use super::smooth::SmoothMap1D;
use crate::algebra::poly::rat_from_f64;
use crate::algebra::Poly;
use crate::error::{Error, Result};

type Builder<M> = dyn Fn(&BigRational) -> Result<M> + Send + Sync;

/// A one-parameter family `μ ↦ f(·, μ)`.
pub struct Family<M> {
    name: String,
    build: Arc<Builder<M>>,
}

impl<M> Clone for Family<M> {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            build: Arc::clone(&self.build),
        }
    }
}

impl<M> fmt::Debug for Family<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Family").field("name", &self.name).finish()
    }
}

impl<M: 'static> Family<M> {
    pub fn new(name: impl Into<String>, build: impl Fn(&BigRational) -> Result<M> + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            build: Arc::new(build),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The member at `μ` (converted exactly).
    pub fn at(&self, mu: f64) -> Result<M> {
        let q = rat_from_f64(mu).ok_or_else(|| Error::Invalid(format!("mu = {mu} is not finite")))?;
        (self.build)(&q)
    }

    pub fn at_exact(&self, mu: &BigRational) -> Result<M> {
        (self.build)(mu)
    }

    pub fn map<N: 'static>(&self, f: impl Fn(M) -> Result<N> + Send + Sync + 'static) -> Family<N> {
        let inner = self.clone();
        Family::new(self.name.clone(), move |mu| f(inner.at_exact(mu)?))
    }
}

pub type SmoothFamily = Family<SmoothMap1D>;
pub type PiecewiseFamily = Family<PiecewiseMap1D>;

/// Polynomial in `x` whose coefficients are polynomials in `μ`:
/// `coeffs[k][j]` multiplies `μ^j x^k`.
pub fn polynomial_family(name: &str, coeffs: Vec<Vec<f64>>) -> Result<SmoothFamily> {
    let exact = to_exact(&coeffs)?;
    let label = name.to_string();
    Ok(Family::new(name, move |mu| {
        let poly = eval_mu_coeffs(&exact, mu);
        Ok(SmoothMap1D::new(label.clone(), poly.into(), Interval::real_line(), Vec::new()))
    }))
}

/// Continuous piecewise family from two polynomial families in `(x, μ)`.
pub fn piecewise_polynomial_family(name: &str, left: Vec<Vec<f64>>, right: Vec<Vec<f64>>) -> Result<PiecewiseFamily> {
    let l = to_exact(&left)?;
    let r = to_exact(&right)?;
    let label = name.to_string();
    Ok(Family::new(name, move |mu| {
        let lm = SmoothMap1D::new("left", eval_mu_coeffs(&l, mu).into(), Interval::real_line(), Vec::new());
        let rm = SmoothMap1D::new("right", eval_mu_coeffs(&r, mu).into(), Interval::real_line(), Vec::new());
        PiecewiseMap1D::new(label.clone(), lm, rm, Interval::real_line())
    }))
}

fn to_exact(coeffs: &[Vec<f64>]) -> Result<Vec<Poly>> {
    coeffs
        .iter()
        .map(|row| {
            row.iter()
                .map(|&c| rat_from_f64(c).ok_or_else(|| Error::Invalid(format!("coefficient {c} is not finite"))))
                .collect::<Result<Vec<_>>>()
                .map(Poly::new)
        })
        .collect()
}

fn eval_mu_coeffs(coeffs: &[Poly], mu: &BigRational) -> Poly {
    Poly::new(coeffs.iter().map(|c| c.eval(mu)).collect())
}

impl Family<AnyMap> {
    pub fn smooth(&self) -> SmoothFamily {
        self.map(AnyMap::into_smooth)
    }

    pub fn piecewise(&self) -> PiecewiseFamily {
        self.map(AnyMap::into_piecewise)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Map1D;

    #[test]
    fn polynomial_family_members() {
        // x + mu - x^2 + x^3
        let fam = polynomial_family("sn", vec![vec![0.0, 1.0], vec![1.0], vec![-1.0], vec![1.0]]).unwrap();
        let f = fam.at(0.25).unwrap();
        assert_eq!(f.eval(0.0).unwrap(), 0.25);
        assert_eq!(f.eval(1.0).unwrap(), 1.25);
        assert_eq!(f.deriv(0.0, 3).unwrap(), 6.0);
    }

    #[test]
    fn piecewise_family_continuity_follows_mu() {
        let fam = piecewise_polynomial_family(
            "bc",
            vec![vec![0.0, 1.0], vec![2.0], vec![1.0]],
            vec![vec![0.0, 1.0], vec![0.5]],
        )
        .unwrap();
        for mu in [-0.1, 0.0, 1e-3, 0.2] {
            let f = fam.at(mu).unwrap();
            assert_eq!(f.eval(0.0).unwrap(), mu);
        }
    }
}

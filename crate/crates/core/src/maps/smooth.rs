use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use super::interval::Interval;
use crate::algebra::poly::{rat_from_f64, rat_to_f64};
use crate::algebra::{Poly, RationalFn};
use crate::error::{Error, Result};
use crate::numeric::{horner, real_roots};

/// Common surface of smooth and piecewise interval maps.
pub trait Map1D: Send + Sync {
    fn eval(&self, x: f64) -> Result<f64>;

    /// Analytic derivative of order 1..=3.
    fn deriv(&self, x: f64, order: usize) -> Result<f64>;

    fn domain(&self) -> &Interval;

    /// Declared vertical asymptotes.
    fn poles(&self) -> &[f64] {
        &[]
    }

    fn name(&self) -> String;

    /// Points where the map is only one-sided differentiable.
    fn kinks(&self) -> &[f64] {
        &[]
    }

    /// Taylor coefficients `f(x + u) = sum_k c_k u^k` for `k <= order`, when
    /// the map can supply them beyond the third derivative.
    fn taylor(&self, _x: f64, _order: usize) -> Option<Vec<f64>> {
        None
    }

    /// `(f(x), f'(x))`.
    fn eval_with_slope(&self, x: f64) -> Result<(f64, f64)> {
        Ok((self.eval(x)?, self.deriv(x, 1)?))
    }
}

impl<M: Map1D + ?Sized> Map1D for Arc<M> {
    fn eval(&self, x: f64) -> Result<f64> {
        (**self).eval(x)
    }
    fn deriv(&self, x: f64, order: usize) -> Result<f64> {
        (**self).deriv(x, order)
    }
    fn domain(&self) -> &Interval {
        (**self).domain()
    }
    fn poles(&self) -> &[f64] {
        (**self).poles()
    }
    fn name(&self) -> String {
        (**self).name()
    }
    fn kinks(&self) -> &[f64] {
        (**self).kinks()
    }
    fn taylor(&self, x: f64, order: usize) -> Option<Vec<f64>> {
        (**self).taylor(x, order)
    }
}

/// A named parameter carried with a map for reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Param {
    pub name: String,
    #[serde(serialize_with = "serialize_rational")]
    pub value: BigRational,
}

fn serialize_rational<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl Param {
    pub fn new(name: impl Into<String>, value: BigRational) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

/// Exact rational function plus its first three derivatives, with `f64`
/// copies of every numerator and denominator for fast evaluation.
struct RationalExpr {
    exact: [RationalFn; 4],
    float: [(Vec<f64>, Vec<f64>); 4],
}

impl RationalExpr {
    fn new(f: RationalFn) -> Self {
        let d1 = f.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        let exact = [f, d1, d2, d3];
        let float = exact
            .each_ref()
            .map(|r| (r.num().to_f64(), r.den().to_f64()));
        Self { exact, float }
    }
}

/// A smooth interval map given by an exact rational function.
///
/// Every catalog map and every user map is stored this way, so derivatives
/// are symbolic and the exact form feeds the identity verifier directly.
#[derive(Clone)]
pub struct SmoothMap1D {
    name: String,
    expr: Arc<RationalExpr>,
    domain: Interval,
    params: Vec<Param>,
    poles: Vec<f64>,
}

impl SmoothMap1D {
    /// Poles are taken to be every real root of the denominator.
    pub fn new(name: impl Into<String>, f: RationalFn, domain: Interval, params: Vec<Param>) -> Self {
        let poles = if f.is_polynomial() {
            Vec::new()
        } else {
            real_roots(&f.den().to_f64())
        };
        Self {
            name: name.into(),
            expr: Arc::new(RationalExpr::new(f)),
            domain,
            params,
            poles,
        }
    }

    /// Polynomial on the whole real line from `f64` coefficients (ascending),
    /// each converted exactly.
    pub fn polynomial(name: impl Into<String>, coeffs: &[f64]) -> Result<Self> {
        let exact = coeffs
            .iter()
            .map(|&c| rat_from_f64(c).ok_or_else(|| Error::Invalid(format!("coefficient {c} is not finite"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(name, Poly::new(exact).into(), Interval::real_line(), Vec::new()))
    }

    /// `x ↦ λx` on the real line.
    pub fn linear(lambda: f64) -> Result<Self> {
        let l = rat_from_f64(lambda).ok_or_else(|| Error::Invalid("lambda must be finite".into()))?;
        Ok(Self::new(
            "linear",
            Poly::new(vec![BigRational::from_integer(0.into()), l.clone()]).into(),
            Interval::real_line(),
            vec![Param::new("lambda", l)],
        ))
    }

    pub fn exact(&self) -> &RationalFn {
        &self.expr.exact[0]
    }

    /// Exact derivative of the given order (0 is the map itself).
    pub fn exact_derivative(&self, order: usize) -> Result<&RationalFn> {
        self.expr.exact.get(order).ok_or(Error::DerivativeOrder(order))
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<&BigRational> {
        self.params.iter().find(|p| p.name == name).map(|p| &p.value)
    }

    pub fn with_domain(mut self, domain: Interval) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Evaluate without the domain check; poles still raise.
    pub fn eval_unchecked(&self, x: f64, order: usize) -> Result<f64> {
        let (num, den) = self.expr.float.get(order).ok_or(Error::DerivativeOrder(order))?;
        let d = horner(den, x);
        if d == 0.0 || self.poles.iter().any(|&p| (x - p).abs() <= 1e-14 * p.abs().max(1.0)) {
            return Err(Error::Pole { x });
        }
        Ok(horner(num, x) / d)
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

    /// Exact value at a rational point, `None` at a pole.
    pub fn eval_exact(&self, x: &BigRational) -> Option<BigRational> {
        self.exact().eval(x)
    }

    pub fn eval_exact_f64(&self, x: f64) -> Option<f64> {
        rat_from_f64(x).and_then(|q| self.eval_exact(&q)).map(|v| rat_to_f64(&v))
    }
}

impl Map1D for SmoothMap1D {
    fn eval(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        self.eval_unchecked(x, 0)
    }

    fn deriv(&self, x: f64, order: usize) -> Result<f64> {
        if !(1..=3).contains(&order) {
            return Err(Error::DerivativeOrder(order));
        }
        self.check_domain(x)?;
        self.eval_unchecked(x, order)
    }

    fn domain(&self) -> &Interval {
        &self.domain
    }

    fn poles(&self) -> &[f64] {
        &self.poles
    }

    fn taylor(&self, x: f64, order: usize) -> Option<Vec<f64>> {
        let (num, den) = &self.expr.float[0];
        let p = taylor_shift(num, x);
        let q = taylor_shift(den, x);
        if q[0] == 0.0 {
            return None;
        }
        let coef = |v: &Vec<f64>, k: usize| v.get(k).copied().unwrap_or(0.0);
        let mut out: Vec<f64> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let acc = (1..=k).fold(coef(&p, k), |acc, j| acc - coef(&q, j) * out[k - j]);
            out.push(acc / q[0]);
        }
        Some(out)
    }

    fn name(&self) -> String {
        if self.params.is_empty() {
            self.name.clone()
        } else {
            let ps: Vec<String> = self.params.iter().map(|p| format!("{}={}", p.name, p.value)).collect();
            format!("{}({})", self.name, ps.join(", "))
        }
    }
}

/// Coefficients of `p(x + u)` in powers of `u`.
fn taylor_shift(p: &[f64], x: f64) -> Vec<f64> {
    let mut c = p.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            c[j] += x * c[j + 1];
        }
    }
    c
}

impl fmt::Debug for SmoothMap1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothMap1D")
            .field("name", &self.name())
            .field("f", self.exact())
            .field("domain", &self.domain)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::families;

    #[test]
    fn linear_map_has_no_curvature() {
        let m = SmoothMap1D::linear(0.5).unwrap();
        assert_eq!(m.eval(3.0).unwrap(), 1.5);
        for k in 2..=3 {
            assert_eq!(m.deriv(0.7, k).unwrap(), 0.0);
        }
        assert_eq!(m.deriv(0.7, 4), Err(Error::DerivativeOrder(4)));
        assert_eq!(m.deriv(0.7, 0), Err(Error::DerivativeOrder(0)));
    }

    #[test]
    fn domain_and_pole_errors() {
        let t2 = SmoothMap1D::new("chebyshev", families::chebyshev(), Interval::closed(-1.0, 1.0).unwrap(), vec![]);
        assert!(matches!(t2.eval(1.5), Err(Error::Domain { .. })));
        let inv = SmoothMap1D::new(
            "inverse",
            RationalFn::x().recip().unwrap(),
            Interval::real_line(),
            vec![],
        );
        assert_eq!(inv.poles(), &[0.0]);
        assert_eq!(inv.eval(0.0), Err(Error::Pole { x: 0.0 }));
        assert_eq!(inv.eval(2.0).unwrap(), 0.5);
    }
}

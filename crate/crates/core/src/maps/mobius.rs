//! Real Möbius changes of variable and exact conjugation of rational maps.

use num_rational::BigRational;

use super::interval::{Endpoint, Interval};
use super::smooth::{Map1D, Param, SmoothMap1D};
use crate::algebra::poly::rat_from_f64;
use crate::algebra::{Poly, RationalFn};
use crate::error::{Error, Result};

/// `x ↦ (alpha x + beta) / (gamma x + delta)` with nonzero determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Mobius {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let m = Self {
            alpha,
            beta,
            gamma,
            delta,
        };
        if m.det() == 0.0 || ![alpha, beta, gamma, delta].iter().all(|c| c.is_finite()) {
            return Err(Error::SingularMobius);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0).unwrap()
    }

    pub fn scaling(k: f64) -> Result<Self> {
        Self::new(k, 0.0, 0.0, 1.0)
    }

    /// The compactification sending `-1 ↦ r` and `1 ↦ +inf`:
    /// `m(x) = r + (1 + x) / (1 - x)`.
    pub fn compactify_right_of(r: f64) -> Result<Self> {
        Self::new(1.0 - r, 1.0 + r, -1.0, 1.0)
    }

    pub fn det(&self) -> f64 {
        self.alpha * self.delta - self.beta * self.gamma
    }

    /// Value in the extended reals: the pole maps to `±inf`.
    pub fn apply(&self, x: f64) -> f64 {
        let den = self.gamma * x + self.delta;
        if den == 0.0 {
            return f64::INFINITY;
        }
        if x.is_infinite() {
            return if self.gamma == 0.0 {
                x * self.alpha.signum() * self.delta.signum()
            } else {
                self.alpha / self.gamma
            };
        }
        (self.alpha * x + self.beta) / den
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let den = self.gamma * x + self.delta;
        self.det() / (den * den)
    }

    pub fn inverse(&self) -> Self {
        Self {
            alpha: self.delta,
            beta: -self.beta,
            gamma: -self.gamma,
            delta: self.alpha,
        }
    }

    pub fn compose(&self, inner: &Mobius) -> Self {
        Self {
            alpha: self.alpha * inner.alpha + self.beta * inner.gamma,
            beta: self.alpha * inner.beta + self.beta * inner.delta,
            gamma: self.gamma * inner.alpha + self.delta * inner.gamma,
            delta: self.gamma * inner.beta + self.delta * inner.delta,
        }
    }

    /// The exact rational function with these (dyadic) coefficients.
    pub fn to_rational_fn(&self) -> RationalFn {
        let [a, b, c, d] = self.exact_coeffs();
        RationalFn::new(Poly::new(vec![b, a]), Poly::new(vec![d, c])).expect("nonzero denominator")
    }

    fn exact_coeffs(&self) -> [BigRational; 4] {
        [self.alpha, self.beta, self.gamma, self.delta].map(|c| rat_from_f64(c).expect("finite"))
    }

    /// Point sent to infinity, if any.
    pub fn pole(&self) -> Option<f64> {
        (self.gamma != 0.0).then(|| -self.delta / self.gamma)
    }
}

/// `m⁻¹ ∘ f ∘ m`, computed exactly on the dyadic coefficients of `m`.
///
/// The domain is transported by `m⁻¹`. Ends that were unbounded or sat on a
/// declared pole become closed: the conjugate extends continuously to them.
pub fn mobius_conjugate(map: &SmoothMap1D, m: &Mobius) -> Result<SmoothMap1D> {
    let dom = map.domain();
    let inv = m.inverse();
    // m maps the target onto dom iff m's value at infinity, alpha/gamma,
    // is not inside dom (otherwise the preimage wraps through infinity).
    if m.gamma != 0.0 {
        let at_inf = m.alpha / m.gamma;
        if dom.contains_interior(at_inf) {
            return Err(Error::MobiusDomain(dom.to_string()));
        }
        if dom.lo == Endpoint::Infinite && dom.hi == Endpoint::Infinite {
            return Err(Error::MobiusDomain(dom.to_string()));
        }
    }
    let near_pole = |v: f64| map.poles().iter().any(|&p| (p - v).abs() <= 1e-12 * p.abs().max(1.0));
    let transport = |e: Endpoint, at_inf: f64| -> Endpoint {
        let (v, closed) = match e {
            Endpoint::Closed(v) => (inv.apply(v), true),
            Endpoint::Open(v) => (inv.apply(v), near_pole(v)),
            Endpoint::Infinite => (inv.apply(at_inf), true),
        };
        match (v.is_finite(), closed) {
            (false, _) => Endpoint::Infinite,
            (true, true) => Endpoint::Closed(v),
            (true, false) => Endpoint::Open(v),
        }
    };
    let a = transport(dom.lo, f64::NEG_INFINITY);
    let b = transport(dom.hi, f64::INFINITY);
    let domain = if m.det() > 0.0 {
        Interval::new(a, b)?
    } else {
        Interval::new(b, a)?
    };

    let conj = inv.to_rational_fn().compose(&map.exact().compose(&m.to_rational_fn()));
    let mut params = map.params().to_vec();
    for (name, v) in [("m.alpha", m.alpha), ("m.beta", m.beta), ("m.gamma", m.gamma), ("m.delta", m.delta)] {
        params.push(Param::new(name, rat_from_f64(v).unwrap()));
    }
    Ok(SmoothMap1D::new(format!("{}~mobius", strip_params(&map.name())), conj, domain, params))
}

fn strip_params(name: &str) -> &str {
    name.split('(').next().unwrap_or(name)
}

/// Weight function transported alongside [`mobius_conjugate`]:
/// `H~(u) = H(m(u)) / m'(u)^2`.
///
/// If `H(F(x)) = c F'(x)^2 H(x)` then the same identity holds for the
/// conjugate map and `H~`, with the same constant `c`.
pub fn conjugate_weight(h: &RationalFn, m: &Mobius) -> RationalFn {
    let [_, _, c, d] = m.exact_coeffs();
    let det = rat_from_f64(m.alpha).unwrap() * &d - rat_from_f64(m.beta).unwrap() * &c;
    let linear: RationalFn = Poly::new(vec![d, c]).into();
    let factor = linear.pow(4).scale(&(det.clone() * det).recip());
    &h.compose(&m.to_rational_fn()) * &factor
}

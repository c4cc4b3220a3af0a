use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One end of an interval. `Infinite` is `-inf` on the left and `+inf` on the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Endpoint {
    Closed(f64),
    Open(f64),
    Infinite,
}

impl Endpoint {
    pub fn value(self) -> Option<f64> {
        match self {
            Endpoint::Closed(v) | Endpoint::Open(v) => Some(v),
            Endpoint::Infinite => None,
        }
    }

    pub fn is_closed(self) -> bool {
        matches!(self, Endpoint::Closed(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

/// Closed endpoints accept points this close (relative to `max(1, |end|)`)
/// so that rounding in an iterate does not count as leaving the domain.
const ENDPOINT_SLACK: f64 = 1e-12;

impl Interval {
    pub fn new(lo: Endpoint, hi: Endpoint) -> Result<Self> {
        if let (Some(a), Some(b)) = (lo.value(), hi.value()) {
            if !(a < b) {
                return Err(Error::Invalid(format!("empty interval: lo = {a}, hi = {b}")));
            }
        }
        for v in [lo.value(), hi.value()].into_iter().flatten() {
            if !v.is_finite() {
                return Err(Error::Invalid(
                    "interval ends must be finite numbers or Endpoint::Infinite".into(),
                ));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Endpoint::Closed(lo), Endpoint::Closed(hi))
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Endpoint::Open(lo), Endpoint::Open(hi))
    }

    pub fn real_line() -> Self {
        Self {
            lo: Endpoint::Infinite,
            hi: Endpoint::Infinite,
        }
    }

    /// Left end as a float, `-inf` when unbounded.
    pub fn lo_value(&self) -> f64 {
        self.lo.value().unwrap_or(f64::NEG_INFINITY)
    }

    /// Right end as a float, `+inf` when unbounded.
    pub fn hi_value(&self) -> f64 {
        self.hi.value().unwrap_or(f64::INFINITY)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.value().is_some() && self.hi.value().is_some()
    }

    pub fn width(&self) -> f64 {
        self.hi_value() - self.lo_value()
    }

    pub fn contains(&self, x: f64) -> bool {
        if x.is_nan() {
            return false;
        }
        let lo_ok = match self.lo {
            Endpoint::Closed(a) => x >= a - ENDPOINT_SLACK * a.abs().max(1.0),
            Endpoint::Open(a) => x > a,
            Endpoint::Infinite => x > f64::NEG_INFINITY,
        };
        let hi_ok = match self.hi {
            Endpoint::Closed(b) => x <= b + ENDPOINT_SLACK * b.abs().max(1.0),
            Endpoint::Open(b) => x < b,
            Endpoint::Infinite => x < f64::INFINITY,
        };
        lo_ok && hi_ok
    }

    pub fn contains_interior(&self, x: f64) -> bool {
        x > self.lo_value() && x < self.hi_value()
    }

    /// Clamp onto the closure of the interval.
    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo_value()).min(self.hi_value())
    }

    /// `n` evenly spaced interior points (endpoints excluded).
    pub fn interior_samples(&self, n: usize) -> Vec<f64> {
        let (a, b) = (self.lo_value(), self.hi_value());
        (1..=n)
            .map(|i| a + (b - a) * i as f64 / (n + 1) as f64)
            .collect()
    }

    pub fn intersect(&self, other: &Interval) -> Result<Interval> {
        let lo = match (self.lo, other.lo) {
            (Endpoint::Infinite, e) | (e, Endpoint::Infinite) => e,
            (a, b) => {
                let (va, vb) = (a.value().unwrap(), b.value().unwrap());
                if va > vb || (va == vb && !a.is_closed()) {
                    a
                } else {
                    b
                }
            }
        };
        let hi = match (self.hi, other.hi) {
            (Endpoint::Infinite, e) | (e, Endpoint::Infinite) => e,
            (a, b) => {
                let (va, vb) = (a.value().unwrap(), b.value().unwrap());
                if va < vb || (va == vb && !a.is_closed()) {
                    a
                } else {
                    b
                }
            }
        };
        Interval::new(lo, hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lo {
            Endpoint::Closed(a) => write!(f, "[{a}, ")?,
            Endpoint::Open(a) => write!(f, "({a}, ")?,
            Endpoint::Infinite => write!(f, "(-inf, ")?,
        }
        match self.hi {
            Endpoint::Closed(b) => write!(f, "{b}]"),
            Endpoint::Open(b) => write!(f, "{b})"),
            Endpoint::Infinite => write!(f, "+inf)"),
        }
    }
}

//! JSON map specifications.
//!
//! ```json
//! {"family": "katsura-fukuda", "params": {"l": "1/2"}}
//! {"rational": {"num": ["0", "4", "-4"], "den": ["1"]}, "domain": [0, 1]}
//! {"piecewise": {"left": {...}, "right": {...}}, "kink": "0"}
//! ```
//!
//! Coefficients and parameters are numbers or decimal/fraction strings, all
//! parsed exactly. The string `"mu"` and arrays `[c0, c1, ...]` (meaning
//! `c0 + c1 mu + ...`) make a spec depend on the bifurcation parameter.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::Value;

use super::catalog::{catalog_make, AnyMap};
use super::family::Family;
use super::interval::{Endpoint, Interval};
use super::piecewise::PiecewiseMap1D;
use super::smooth::SmoothMap1D;
use crate::algebra::poly::rat_to_f64;
use crate::algebra::{parse_rational, Poly, RationalFn};
use crate::error::{Error, Result};

/// A coefficient: polynomial in `μ` (a constant is the degree-0 case).
#[derive(Debug, Clone, PartialEq)]
pub struct Coef(Poly);

impl Coef {
    fn parse(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) if s.trim() == "mu" => Ok(Coef(Poly::x())),
            Value::String(s) => Ok(Coef(Poly::constant(parse_rational(s)?))),
            Value::Number(n) => Ok(Coef(Poly::constant(parse_rational(&n.to_string())?))),
            Value::Array(items) => {
                let cs = items
                    .iter()
                    .map(|c| match c {
                        Value::String(s) => parse_rational(s),
                        Value::Number(n) => parse_rational(&n.to_string()),
                        _ => Err(Error::Invalid(format!("bad mu-coefficient {c}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Coef(Poly::new(cs)))
            }
            _ => Err(Error::Invalid(format!("bad coefficient {v}"))),
        }
    }

    fn depends_on_mu(&self) -> bool {
        self.0.degree().is_some_and(|d| d > 0)
    }

    fn at(&self, mu: &BigRational) -> BigRational {
        self.0.eval(mu)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    Family {
        name: String,
        params: BTreeMap<String, Coef>,
        domain: Option<Interval>,
    },
    Rational {
        num: Vec<Coef>,
        den: Vec<Coef>,
        domain: Option<Interval>,
    },
    Piecewise {
        left: Box<MapSpec>,
        right: Box<MapSpec>,
        domain: Option<Interval>,
        kink: Option<BigRational>,
    },
}

fn parse_end(v: &Value, lower: bool) -> Result<Endpoint> {
    let bad = || Error::Invalid(format!("bad domain end {v}"));
    match v {
        Value::String(s) => match s.trim() {
            "-inf" if lower => Ok(Endpoint::Infinite),
            "inf" | "+inf" if !lower => Ok(Endpoint::Infinite),
            other => Ok(Endpoint::Closed(rat_to_f64(&parse_rational(other)?))),
        },
        Value::Number(n) => Ok(Endpoint::Closed(n.as_f64().ok_or_else(bad)?)),
        _ => Err(bad()),
    }
}

fn parse_domain(v: Option<&Value>) -> Result<Option<Interval>> {
    match v {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Array(ends)) if ends.len() == 2 => {
            Ok(Some(Interval::new(parse_end(&ends[0], true)?, parse_end(&ends[1], false)?)?))
        }
        Some(other) => Err(Error::Invalid(format!("domain must be [lo, hi], got {other}"))),
    }
}

fn coef_list(v: Option<&Value>, what: &str) -> Result<Vec<Coef>> {
    match v {
        Some(Value::Array(items)) => items.iter().map(Coef::parse).collect(),
        _ => Err(Error::Invalid(format!("`{what}` must be a list of coefficients"))),
    }
}

impl MapSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("map spec: {e}")))?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Invalid("map spec must be a JSON object".into()))?;
        let domain = parse_domain(obj.get("domain"))?;
        if let Some(name) = obj.get("family") {
            let name = name
                .as_str()
                .ok_or_else(|| Error::Invalid("`family` must be a string".into()))?
                .to_string();
            let mut params = BTreeMap::new();
            if let Some(ps) = obj.get("params") {
                let ps = ps
                    .as_object()
                    .ok_or_else(|| Error::Invalid("`params` must be an object".into()))?;
                for (k, val) in ps {
                    params.insert(k.clone(), Coef::parse(val)?);
                }
            }
            return Ok(MapSpec::Family { name, params, domain });
        }
        if let Some(r) = obj.get("rational") {
            let num = coef_list(r.get("num"), "num")?;
            let den = match r.get("den") {
                None => vec![Coef(Poly::one())],
                some => coef_list(some, "den")?,
            };
            return Ok(MapSpec::Rational { num, den, domain });
        }
        if let Some(p) = obj.get("piecewise") {
            let left = p
                .get("left")
                .ok_or_else(|| Error::Invalid("piecewise spec needs `left`".into()))?;
            let right = p
                .get("right")
                .ok_or_else(|| Error::Invalid("piecewise spec needs `right`".into()))?;
            let kink = match obj.get("kink").or_else(|| p.get("kink")) {
                None => None,
                Some(k) => {
                    let c = Coef::parse(k)?;
                    if c.depends_on_mu() {
                        return Err(Error::Invalid("kink location cannot depend on mu".into()));
                    }
                    Some(c.at(&BigRational::zero()))
                }
            };
            return Ok(MapSpec::Piecewise {
                left: Box::new(Self::from_value(left)?),
                right: Box::new(Self::from_value(right)?),
                domain,
                kink,
            });
        }
        Err(Error::Invalid(
            "map spec needs one of `family`, `rational`, `piecewise`".into(),
        ))
    }

    pub fn depends_on_mu(&self) -> bool {
        match self {
            MapSpec::Family { params, .. } => params.values().any(Coef::depends_on_mu),
            MapSpec::Rational { num, den, .. } => num.iter().chain(den).any(Coef::depends_on_mu),
            MapSpec::Piecewise { left, right, .. } => left.depends_on_mu() || right.depends_on_mu(),
        }
    }

    /// Build the map at a given `μ`.
    pub fn instantiate(&self, mu: &BigRational) -> Result<AnyMap> {
        match self {
            MapSpec::Family { name, params, domain } => {
                let given = params.iter().map(|(k, c)| (k.clone(), c.at(mu))).collect();
                let map = catalog_make(name, &given)?;
                Ok(match (map, domain) {
                    (AnyMap::Smooth(m), Some(d)) => AnyMap::Smooth(m.with_domain(*d)),
                    (m, _) => m,
                })
            }
            MapSpec::Rational { num, den, domain } => {
                let n = Poly::new(num.iter().map(|c| c.at(mu)).collect());
                let d = Poly::new(den.iter().map(|c| c.at(mu)).collect());
                let f = RationalFn::new(n, d)?;
                Ok(AnyMap::Smooth(SmoothMap1D::new(
                    "rational",
                    f,
                    domain.unwrap_or_else(Interval::real_line),
                    Vec::new(),
                )))
            }
            MapSpec::Piecewise {
                left,
                right,
                domain,
                kink,
            } => {
                let l = left.instantiate(mu)?.into_smooth()?;
                let r = right.instantiate(mu)?.into_smooth()?;
                let dom = domain.unwrap_or_else(Interval::real_line);
                let p = match kink {
                    Some(c) if !c.is_zero() => {
                        PiecewiseMap1D::with_kink_at("piecewise", l, r, dom, rat_to_f64(c))?
                    }
                    _ => PiecewiseMap1D::new("piecewise", l, r, dom)?,
                };
                Ok(AnyMap::Piecewise(p))
            }
        }
    }

    /// Build a spec that does not depend on `μ` (or take `μ = 0`).
    pub fn build(&self) -> Result<AnyMap> {
        self.instantiate(&BigRational::zero())
    }

    pub fn family(&self) -> Family<AnyMap> {
        let spec = self.clone();
        Family::new("spec", move |mu| spec.instantiate(mu))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Map1D;

    #[test]
    fn family_spec() {
        let spec = MapSpec::parse(r#"{"family": "katsura-fukuda", "params": {"l": "1/2"}}"#).unwrap();
        assert!(!spec.depends_on_mu());
        let f = spec.build().unwrap();
        assert!((f.deriv(0.0, 1).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn rational_spec_with_domain() {
        let spec = MapSpec::parse(r#"{"rational": {"num": ["0", 4, "-4"], "den": ["1"]}, "domain": [0, 1]}"#).unwrap();
        let f = spec.build().unwrap();
        assert_eq!(f.eval(0.5).unwrap(), 1.0);
        assert!(f.eval(1.5).is_err());
    }

    #[test]
    fn mu_dependent_piecewise_spec() {
        let spec = MapSpec::parse(
            r#"{"piecewise": {"left": {"rational": {"num": ["mu", "2", "1"]}},
                              "right": {"rational": {"num": [["0", "1"], "0.5"]}}}}"#,
        )
        .unwrap();
        assert!(spec.depends_on_mu());
        let fam = spec.family().piecewise();
        let f = fam.at(0.001).unwrap();
        assert_eq!(f.eval(0.0).unwrap(), 0.001);
        assert_eq!(f.kink_slopes().unwrap(), (2.0, 0.5));
    }

    #[test]
    fn unbounded_domain_markers() {
        let spec = MapSpec::parse(r#"{"rational": {"num": ["0", "1/2"]}, "domain": ["-inf", "inf"]}"#).unwrap();
        let f = spec.build().unwrap();
        assert_eq!(*f.domain(), Interval::real_line());
    }

    #[test]
    fn malformed_specs() {
        assert!(MapSpec::parse("[]").is_err());
        assert!(MapSpec::parse(r#"{"rational": {"num": "x"}}"#).is_err());
        assert!(MapSpec::parse(r#"{"family": "chebyshev", "domain": [1, 0]}"#).is_err());
        assert!(MapSpec::parse(r#"{"something": 1}"#).is_err());
    }
}

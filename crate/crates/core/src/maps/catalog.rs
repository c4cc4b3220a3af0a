//! Built-in families.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::interval::{Endpoint, Interval};
use super::mobius::{mobius_conjugate, Mobius};
use super::piecewise::PiecewiseMap1D;
use super::smooth::{Map1D, Param, SmoothMap1D};
use crate::algebra::poly::rat_to_f64;
use crate::algebra::{families, Poly};
use crate::error::{Error, Result};
use crate::numeric::real_roots;

/// Either kind of catalog map.
#[derive(Clone, Debug)]
pub enum AnyMap {
    Smooth(SmoothMap1D),
    Piecewise(PiecewiseMap1D),
}

impl AnyMap {
    pub fn into_smooth(self) -> Result<SmoothMap1D> {
        match self {
            AnyMap::Smooth(m) => Ok(m),
            AnyMap::Piecewise(p) => Err(Error::Invalid(format!("{} is piecewise, expected a smooth map", p.name()))),
        }
    }

    pub fn into_piecewise(self) -> Result<PiecewiseMap1D> {
        match self {
            AnyMap::Piecewise(p) => Ok(p),
            AnyMap::Smooth(m) => Err(Error::Invalid(format!("{} is smooth, expected a piecewise map", m.name()))),
        }
    }

    /// A smooth map viewed as a piecewise one with the same branch twice.
    pub fn as_piecewise(&self) -> Result<PiecewiseMap1D> {
        match self {
            AnyMap::Piecewise(p) => Ok(p.clone()),
            AnyMap::Smooth(m) => PiecewiseMap1D::new(m.name(), m.clone(), m.clone(), *m.domain()),
        }
    }
}

impl Map1D for AnyMap {
    fn eval(&self, x: f64) -> Result<f64> {
        match self {
            AnyMap::Smooth(m) => m.eval(x),
            AnyMap::Piecewise(m) => m.eval(x),
        }
    }
    fn deriv(&self, x: f64, order: usize) -> Result<f64> {
        match self {
            AnyMap::Smooth(m) => m.deriv(x, order),
            AnyMap::Piecewise(m) => m.deriv(x, order),
        }
    }
    fn domain(&self) -> &Interval {
        match self {
            AnyMap::Smooth(m) => m.domain(),
            AnyMap::Piecewise(m) => m.domain(),
        }
    }
    fn poles(&self) -> &[f64] {
        match self {
            AnyMap::Smooth(m) => m.poles(),
            AnyMap::Piecewise(m) => m.poles(),
        }
    }
    fn name(&self) -> String {
        match self {
            AnyMap::Smooth(m) => m.name(),
            AnyMap::Piecewise(m) => m.name(),
        }
    }
    fn kinks(&self) -> &[f64] {
        match self {
            AnyMap::Smooth(m) => m.kinks(),
            AnyMap::Piecewise(m) => m.kinks(),
        }
    }
    fn taylor(&self, x: f64, order: usize) -> Option<Vec<f64>> {
        match self {
            AnyMap::Smooth(m) => m.taylor(x, order),
            AnyMap::Piecewise(m) => m.taylor(x, order),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub kind: &'static str,
    pub formula: &'static str,
    pub domain: &'static str,
    /// `(name, default)`; a missing default means the parameter is required.
    pub params: Vec<(&'static str, Option<&'static str>)>,
}

pub fn catalog() -> Vec<FamilyInfo> {
    vec![
        FamilyInfo {
            name: "chebyshev",
            kind: "smooth",
            formula: "1 - 2x^2",
            domain: "[-1, 1]",
            params: vec![],
        },
        FamilyInfo {
            name: "logistic",
            kind: "smooth",
            formula: "4x(1 - x)",
            domain: "[0, 1]",
            params: vec![],
        },
        FamilyInfo {
            name: "elliptic",
            kind: "smooth",
            formula: "(x^4 - 2a x^2 - 8b x + a^2) / (4(x^3 + a x + b))",
            domain: "(r, +inf), r the largest real root of x^3 + a x + b",
            params: vec![("a", None), ("b", None)],
        },
        FamilyInfo {
            name: "elliptic-compact",
            kind: "smooth",
            formula: "m^-1 . elliptic . m, m(x) = r + (1 + x)/(1 - x)",
            domain: "[-1, 1]",
            params: vec![("a", None), ("b", None)],
        },
        FamilyInfo {
            name: "katsura-fukuda",
            kind: "smooth",
            formula: "4x(1 - x)(1 - l x) / (1 - l x^2)^2",
            domain: "[0, 1]",
            params: vec![("l", None)],
        },
        FamilyInfo {
            name: "linear",
            kind: "smooth",
            formula: "lambda x",
            domain: "(-inf, +inf)",
            params: vec![("lambda", None)],
        },
        FamilyInfo {
            name: "saddle-node",
            kind: "smooth",
            formula: "y + nu - y^2 + a y^3",
            domain: "(-inf, +inf)",
            params: vec![("nu", None), ("a", Some("0"))],
        },
        FamilyInfo {
            name: "pitchfork",
            kind: "smooth",
            formula: "y + nu y + b nu y^2 - y^3 + a y^5",
            domain: "(-inf, +inf)",
            params: vec![("nu", None), ("a", Some("0")), ("b", Some("0"))],
        },
        FamilyInfo {
            name: "skew-tent",
            kind: "piecewise",
            formula: "nu + s_L y (y <= 0), nu + s_R y (y >= 0)",
            domain: "(-inf, +inf)",
            params: vec![("nu", None), ("s_L", None), ("s_R", None)],
        },
        FamilyInfo {
            name: "skew-tent-quad",
            kind: "piecewise",
            formula: "nu + s_L y + t y^2 (y <= 0), nu + s_R y (y >= 0)",
            domain: "(-inf, +inf)",
            params: vec![("nu", None), ("s_L", None), ("s_R", None), ("t", Some("0"))],
        },
    ]
}

fn resolve(info: &FamilyInfo, given: &BTreeMap<String, BigRational>) -> Result<Vec<BigRational>> {
    for key in given.keys() {
        if !info.params.iter().any(|(n, _)| n == key) {
            return Err(Error::Parameter {
                name: key.clone(),
                reason: format!("not a parameter of {}", info.name),
            });
        }
    }
    info.params
        .iter()
        .map(|(n, default)| match (given.get(*n), default) {
            (Some(v), _) => Ok(v.clone()),
            (None, Some(d)) => crate::algebra::parse_rational(d),
            (None, None) => Err(Error::Parameter {
                name: (*n).to_string(),
                reason: format!("required by {}", info.name),
            }),
        })
        .collect()
}

fn closed(lo: f64, hi: f64) -> Interval {
    Interval::closed(lo, hi).expect("static interval")
}

/// Largest real root of `x^3 + a x + b`: the vertical asymptote bounding the
/// elliptic map's invariant half-line.
pub fn elliptic_asymptote(a: &BigRational, b: &BigRational) -> f64 {
    let roots = real_roots(&families::elliptic_cubic(a, b).to_f64());
    *roots.last().expect("a real cubic has a real root")
}

/// The default compactifying change of variable for the elliptic map.
pub fn elliptic_compactification(a: &BigRational, b: &BigRational) -> Mobius {
    Mobius::compactify_right_of(elliptic_asymptote(a, b)).expect("det = 2")
}

pub fn catalog_make(name: &str, given: &BTreeMap<String, BigRational>) -> Result<AnyMap> {
    let info = catalog()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFamily(name.to_string()))?;
    let p = resolve(&info, given)?;
    let named = |vals: &[BigRational]| -> Vec<Param> {
        info.params
            .iter()
            .zip(vals)
            .map(|((n, _), v)| Param::new(*n, v.clone()))
            .collect()
    };
    let zero = BigRational::zero();
    let one = BigRational::one();
    let map = match name {
        "chebyshev" => AnyMap::Smooth(SmoothMap1D::new(name, families::chebyshev(), closed(-1.0, 1.0), vec![])),
        "logistic" => AnyMap::Smooth(SmoothMap1D::new(name, families::logistic(), closed(0.0, 1.0), vec![])),
        "elliptic" => {
            let r = elliptic_asymptote(&p[0], &p[1]);
            let domain = Interval::new(Endpoint::Open(r), Endpoint::Infinite)?;
            AnyMap::Smooth(SmoothMap1D::new(name, families::elliptic(&p[0], &p[1]), domain, named(&p)))
        }
        "elliptic-compact" => {
            let r = elliptic_asymptote(&p[0], &p[1]);
            let domain = Interval::new(Endpoint::Open(r), Endpoint::Infinite)?;
            let f = SmoothMap1D::new("elliptic", families::elliptic(&p[0], &p[1]), domain, named(&p));
            let m = Mobius::compactify_right_of(r)?;
            let g = mobius_conjugate(&f, &m)?;
            AnyMap::Smooth(g.with_domain(closed(-1.0, 1.0)).with_name(name))
        }
        "katsura-fukuda" => AnyMap::Smooth(SmoothMap1D::new(
            name,
            families::katsura_fukuda(&p[0])?,
            closed(0.0, 1.0),
            named(&p),
        )),
        "linear" => AnyMap::Smooth(SmoothMap1D::new(
            name,
            Poly::new(vec![zero, p[0].clone()]).into(),
            Interval::real_line(),
            named(&p),
        )),
        "saddle-node" => {
            let (nu, a) = (&p[0], &p[1]);
            let f = Poly::new(vec![nu.clone(), one.clone(), -one, a.clone()]);
            AnyMap::Smooth(SmoothMap1D::new(name, f.into(), Interval::real_line(), named(&p)))
        }
        "pitchfork" => {
            let (nu, a, b) = (&p[0], &p[1], &p[2]);
            let f = Poly::new(vec![
                zero.clone(),
                &one + nu,
                b * nu,
                -one,
                zero,
                a.clone(),
            ]);
            AnyMap::Smooth(SmoothMap1D::new(name, f.into(), Interval::real_line(), named(&p)))
        }
        "skew-tent" | "skew-tent-quad" => {
            let (nu, sl, sr) = (&p[0], &p[1], &p[2]);
            let t = p.get(3).cloned().unwrap_or_else(BigRational::zero);
            let left = SmoothMap1D::new(
                "left",
                Poly::new(vec![nu.clone(), sl.clone(), t]).into(),
                Interval::real_line(),
                vec![],
            );
            let right = SmoothMap1D::new(
                "right",
                Poly::new(vec![nu.clone(), sr.clone()]).into(),
                Interval::real_line(),
                vec![],
            );
            let label = named(&p)
                .iter()
                .map(|q| format!("{}={}", q.name, q.value))
                .collect::<Vec<_>>()
                .join(", ");
            AnyMap::Piecewise(PiecewiseMap1D::new(
                format!("{name}({label})"),
                left,
                right,
                Interval::real_line(),
            )?)
        }
        _ => unreachable!("catalog entry without constructor"),
    };
    Ok(map)
}

/// Convenience wrapper taking `f64` parameter values (converted exactly).
pub fn catalog_make_f64(name: &str, params: &[(&str, f64)]) -> Result<AnyMap> {
    let given = params
        .iter()
        .map(|(n, v)| {
            crate::algebra::poly::rat_from_f64(*v)
                .map(|q| ((*n).to_string(), q))
                .ok_or_else(|| Error::Parameter {
                    name: (*n).to_string(),
                    reason: "not finite".into(),
                })
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    catalog_make(name, &given)
}

/// Value of a rational parameter as a float, for reporting.
pub fn param_f64(m: &SmoothMap1D, name: &str) -> Option<f64> {
    m.param(name).map(rat_to_f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::ratio;

    fn make(name: &str, params: &[(&str, BigRational)]) -> AnyMap {
        let given = params.iter().map(|(n, v)| (n.to_string(), v.clone())).collect();
        catalog_make(name, &given).unwrap()
    }

    #[test]
    fn chebyshev_values() {
        let t2 = make("chebyshev", &[]);
        assert_eq!(t2.eval(0.0).unwrap(), 1.0);
        assert_eq!(t2.deriv(-1.0, 1).unwrap(), 4.0);
    }

    #[test]
    fn elliptic_value_at_zero() {
        let f = make("elliptic", &[("a", ratio(1, 1)), ("b", ratio(1, 1))]);
        assert_eq!(f.eval(0.0).unwrap(), 0.25);
        assert_eq!(f.poles().len(), 1);
        assert!(matches!(f.eval(-0.9), Err(Error::Domain { .. })));
    }

    #[test]
    fn katsura_fukuda_zero_matches_logistic_samples() {
        let kf = make("katsura-fukuda", &[("l", ratio(0, 1))]);
        let lg = make("logistic", &[]);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert_eq!(kf.eval(x).unwrap(), lg.eval(x).unwrap());
            assert_eq!(kf.eval(x).unwrap(), 4.0 * x * (1.0 - x));
        }
    }

    #[test]
    fn katsura_fukuda_slope_at_origin() {
        for l in [0.0, 0.25, 0.5, 0.75, 0.9] {
            let kf = catalog_make_f64("katsura-fukuda", &[("l", l)]).unwrap();
            assert!((kf.deriv(0.0, 1).unwrap() - 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            catalog_make("nope", &BTreeMap::new()),
            Err(Error::UnknownFamily(_))
        ));
        assert!(matches!(
            catalog_make("katsura-fukuda", &BTreeMap::new()),
            Err(Error::Parameter { .. })
        ));
        assert!(matches!(
            catalog_make_f64("katsura-fukuda", &[("l", 1.0)]),
            Err(Error::Parameter { .. })
        ));
        assert!(matches!(
            catalog_make_f64("chebyshev", &[("q", 1.0)]),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn skew_tent_is_continuous_piecewise() {
        let g = catalog_make_f64("skew-tent", &[("nu", 1.0), ("s_L", 2.0), ("s_R", 0.5)]).unwrap();
        assert_eq!(g.eval(-1.0).unwrap(), -1.0);
        assert_eq!(g.eval(2.0).unwrap(), 2.0);
        let p = g.into_piecewise().unwrap();
        assert_eq!(p.kink_slopes().unwrap(), (2.0, 0.5));
    }

    #[test]
    fn compactified_elliptic_maps_interval_into_itself() {
        let g = catalog_make_f64("elliptic-compact", &[("a", 1.0), ("b", 1.0)]).unwrap();
        let mut lo = f64::INFINITY;
        for i in 0..=2000 {
            let x = -1.0 + 2.0 * i as f64 / 2000.0;
            let y = g.eval(x).unwrap();
            assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&y), "G({x}) = {y}");
            lo = lo.min(y);
        }
        assert!(lo < -0.999);
        assert!((g.eval(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((g.deriv(1.0, 1).unwrap() - 4.0).abs() < 1e-9);
    }
}

use serde::Serialize;

use super::periodic::{find_periodic_orbits_unimodal, PeriodicOrbit};
use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::algebra::{families, RationalFn};
use crate::error::{Error, Result};
use crate::maps::{catalog_make, conjugate_weight, elliptic_compactification, Map1D, SmoothMap1D};
use crate::numeric::fmt_f64;

/// Orbits touching a point with `|H| < EXEMPT_TOL` are outside the law.
pub const EXEMPT_TOL: f64 = 1e-10;
pub const LAW_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawRow {
    pub itinerary: String,
    pub period: usize,
    pub points: Vec<f64>,
    pub multiplier: f64,
    pub expected: f64,
    pub relative_error: f64,
    pub exempt: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawReport {
    pub rows: Vec<LawRow>,
    pub pass: bool,
}

impl LawRow {
    fn from_orbit(o: PeriodicOrbit, h: &RationalFn) -> Self {
        let expected = 2f64.powi(o.period as i32);
        let exempt = o.points.iter().any(|&x| h.eval_f64(x).abs() < EXEMPT_TOL);
        Self {
            relative_error: (o.multiplier.abs() - expected).abs() / expected,
            expected,
            exempt,
            itinerary: o.itinerary,
            period: o.period,
            points: o.points,
            multiplier: o.multiplier,
        }
    }
}

/// Check `|λ| = 2^p` on every periodic orbit up to `p_max`.
pub fn verify_multiplier_law<M: Map1D + ?Sized>(map: &M, h: &RationalFn, p_max: usize) -> Result<LawReport> {
    let rows: Vec<LawRow> = find_periodic_orbits_unimodal(map, p_max)?
        .into_iter()
        .map(|o| LawRow::from_orbit(o, h))
        .collect();
    let pass = rows.iter().all(|r| r.exempt || r.relative_error < LAW_TOL);
    Ok(LawReport { rows, pass })
}

/// A catalog map together with the weight `H` of its multiplier law.
///
/// Supported: `chebyshev`, `logistic`, `katsura-fukuda` and
/// `elliptic-compact` (the elliptic weight carried through the
/// compactifying Möbius map).
pub fn law_pair(name: &str, params: &BTreeMap<String, BigRational>) -> Result<(SmoothMap1D, RationalFn)> {
    let map = catalog_make(name, params)?.into_smooth()?;
    let get = |k: &str| {
        map.param(k)
            .cloned()
            .ok_or_else(|| Error::Invalid(format!("{name} has no parameter {k}")))
    };
    let h = match name {
        "chebyshev" => families::chebyshev_weight(),
        "logistic" => families::logistic_weight(),
        "katsura-fukuda" => families::katsura_fukuda_weight(&get("l")?)?,
        "elliptic-compact" => {
            let (a, b) = (get("a")?, get("b")?);
            conjugate_weight(&families::elliptic_weight(&a, &b), &elliptic_compactification(&a, &b))
        }
        _ => return Err(Error::Invalid(format!("no multiplier law is known for {name}"))),
    };
    Ok((map, h))
}

impl LawReport {
    /// `itinerary,period,points,multiplier,exempt,relative_error`, with the
    /// orbit points joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("itinerary,period,points,multiplier,exempt,relative_error\n");
        for r in &self.rows {
            let pts: Vec<String> = r.points.iter().map(|&p| fmt_f64(p)).collect();
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.itinerary,
                r.period,
                pts.join(";"),
                fmt_f64(r.multiplier),
                r.exempt,
                fmt_f64(r.relative_error)
            ));
        }
        s
    }
}

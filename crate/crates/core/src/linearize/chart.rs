use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{Endpoint, Interval, Map1D};
use crate::numeric::invert_monotone;
use crate::orbits::find_fixed_points;

/// Order of the local Schröder series.
const SERIES_ORDER: usize = 12;
/// Cap on iterations needed to enter the core.
pub const ENTRY_CAP: usize = 100_000;
/// Points this close to an open basin end are rejected.
pub const BOUNDARY_EXCLUSION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Attracting,
    Repelling,
}

/// Linearizing coordinate `φ` with `φ(f(x)) = λ φ(x)`, `φ(x*) = 0`,
/// `φ'(x*) = 1`.
///
/// Near `x*` it is a truncated power series; elsewhere orbits are carried
/// into that core by `f` (attracting) or by the local inverse branch
/// (repelling).
#[derive(Clone)]
pub struct LinearizationChart {
    map: Arc<dyn Map1D>,
    x_star: f64,
    lambda: f64,
    core_radius: f64,
    direction: Direction,
    series: Vec<f64>,
    domain: Interval,
    /// Monotone lap of `f` around `x*` used for the inverse branch.
    lap: (f64, f64),
}

impl std::fmt::Debug for LinearizationChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearizationChart")
            .field("map", &self.map.name())
            .field("x_star", &self.x_star)
            .field("lambda", &self.lambda)
            .field("core_radius", &self.core_radius)
            .field("direction", &self.direction)
            .field("domain", &self.domain)
            .finish()
    }
}

/// Value of `φ` with its derivative and the number of steps taken to reach
/// the core.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub phi: f64,
    pub dphi: f64,
    pub entry_time: usize,
}

fn series_eval(c: &[f64], u: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &ck in c.iter().rev() {
        d = d * u + v;
        v = v * u + ck;
    }
    (v, d)
}

/// Coefficients of the Schröder series from Taylor coefficients `a` of
/// `f(x* + u) - x*` (with `a[0] = 0`, `a[1] = λ`).
fn schroder_series(a: &[f64]) -> Vec<f64> {
    let n = a.len() - 1;
    let lambda = a[1];
    let mul = |p: &[f64], q: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n + 1];
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            for (j, &qj) in q.iter().enumerate().take(n + 1 - i) {
                out[i + j] += pi * qj;
            }
        }
        out
    };
    let mut powers: Vec<Vec<f64>> = vec![vec![0.0; n + 1], a.to_vec()];
    for j in 2..=n {
        let next = mul(&powers[j - 1], a);
        powers.push(next);
    }
    let mut c = vec![0.0; n + 1];
    c[1] = 1.0;
    for k in 2..=n {
        let s: f64 = (1..k).map(|j| c[j] * powers[j][k]).sum();
        c[k] = s / (lambda - lambda.powi(k as i32));
    }
    c
}

fn local_coefficients(map: &dyn Map1D, x_star: f64) -> Result<Vec<f64>> {
    if let Some(mut t) = map.taylor(x_star, SERIES_ORDER) {
        t[0] = 0.0;
        return Ok(t);
    }
    let d1 = map.deriv(x_star, 1)?;
    let d2 = map.deriv(x_star, 2)?;
    let d3 = map.deriv(x_star, 3)?;
    Ok(vec![0.0, d1, d2 / 2.0, d3 / 6.0])
}

/// Widest interval around `x*` (within `reach`) on which `f` is monotone and
/// finite, found by scanning the sign of `f'`.
fn monotone_lap(map: &dyn Map1D, x_star: f64, reach: f64) -> Result<(f64, f64)> {
    let dom = map.domain();
    let sign = map.deriv(x_star, 1)?.signum();
    let steps = 400;
    let scan = |dir: f64| -> f64 {
        let end = if dir < 0.0 { dom.lo_value().max(x_star - reach) } else { dom.hi_value().min(x_star + reach) };
        let mut last = x_star;
        for i in 1..=steps {
            let x = x_star + (end - x_star) * i as f64 / steps as f64;
            let ok = map.deriv(x, 1).is_ok_and(|d| d.signum() == sign && d != 0.0) && map.eval(x).is_ok();
            if !ok {
                return last;
            }
            last = x;
        }
        last
    };
    Ok((scan(-1.0), scan(1.0)))
}

/// Koenigs chart on a core neighbourhood of the hyperbolic fixed point `x_star`.
///
/// `tol` bounds the relative Schröder defect of the local series on the core.
pub fn koenigs<M: Map1D + Clone + 'static>(map: &M, x_star: f64, tol: f64) -> Result<LinearizationChart> {
    koenigs_arc(Arc::new(map.clone()), x_star, tol)
}

pub fn koenigs_arc(map: Arc<dyn Map1D>, x_star: f64, tol: f64) -> Result<LinearizationChart> {
    if !(tol > 0.0) {
        return Err(Error::Parameter {
            name: "tol".into(),
            reason: "must be positive".into(),
        });
    }
    let gap = (map.eval(x_star)? - x_star).abs();
    if gap > 1e-12 * x_star.abs().max(1.0) {
        return Err(Error::NotFixed { x: x_star, gap });
    }
    let a = local_coefficients(map.as_ref(), x_star)?;
    let lambda = a[1];
    if (lambda.abs() - 1.0).abs() < 1e-9 {
        return Err(Error::Nonhyperbolic { x: x_star, multiplier: lambda });
    }
    if lambda.abs() < 1e-9 {
        return Err(Error::Superattracting { x: x_star, multiplier: lambda });
    }
    let direction = if lambda.abs() < 1.0 { Direction::Attracting } else { Direction::Repelling };
    let series = schroder_series(&a);

    let dom = *map.domain();
    let scale = x_star.abs().max(1.0);
    let mut r0 = 0.5 * scale;
    for &p in map.poles().iter().chain(map.kinks()) {
        if p != x_star {
            r0 = r0.min(0.5 * (p - x_star).abs());
        }
    }
    r0 = r0.min(0.5 * (x_star - dom.lo_value())).min(0.5 * (dom.hi_value() - x_star));
    if !(r0 > 0.0) {
        return Err(Error::Invalid(format!("fixed point {x_star} sits on the domain boundary or a kink")));
    }
    let lap = monotone_lap(map.as_ref(), x_star, 4.0 * r0.max(scale))?;
    let mut chart = LinearizationChart {
        map,
        x_star,
        lambda,
        core_radius: r0,
        direction,
        series,
        domain: dom,
        lap,
    };
    let mut r = r0.min(x_star - lap.0).min(lap.1 - x_star);
    let min_radius = 1e-6 * scale;
    loop {
        if r < min_radius {
            return Err(Error::NoConvergence {
                what: format!("core radius search at {x_star}"),
                iterations: 64,
            });
        }
        if chart.core_defect(r) <= tol {
            break;
        }
        r *= 0.5;
    }
    chart.core_radius = r;
    chart.domain = Interval::closed(x_star - r, x_star + r)?;
    Ok(chart)
}

impl LinearizationChart {
    pub fn x_star(&self) -> f64 {
        self.x_star
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Where `φ` is available.
    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn map(&self) -> &Arc<dyn Map1D> {
        &self.map
    }

    /// Largest relative defect of the series on `|u| <= r`.
    fn core_defect(&self, r: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..=16 {
            for sgn in [-1.0, 1.0] {
                let u = sgn * r * k as f64 / 16.0;
                let (phi, _) = series_eval(&self.series, u);
                let d = match self.step_toward_core(self.x_star + u) {
                    Ok((y, _)) => {
                        let (py, _) = series_eval(&self.series, y - self.x_star);
                        match self.direction {
                            Direction::Attracting => (py - self.lambda * phi).abs(),
                            Direction::Repelling => (self.lambda * py - phi).abs(),
                        }
                    }
                    Err(_) => f64::INFINITY,
                };
                let noise = 4.0 * f64::EPSILON * (self.x_star.abs() + r);
                worst = worst.max((d - noise).max(0.0) / phi.abs().max(f64::MIN_POSITIVE));
            }
        }
        worst
    }

    /// One step of `f` (attracting) or the inverse lap (repelling), with the
    /// slope of that step.
    fn step_toward_core(&self, x: f64) -> Result<(f64, f64)> {
        match self.direction {
            Direction::Attracting => {
                let y = self.map.eval(x)?;
                let d = self.map.deriv(x, 1).unwrap_or(f64::NAN);
                Ok((y, d))
            }
            Direction::Repelling => {
                let (a, b) = self.lap;
                let f = |t: f64| (self.map.eval(t).unwrap_or(f64::NAN), self.map.deriv(t, 1).unwrap_or(f64::NAN));
                let y = invert_monotone(f, a, b, x)?;
                let d = 1.0 / self.map.deriv(y, 1).unwrap_or(f64::NAN);
                Ok((y, d))
            }
        }
    }

    fn check_point(&self, x: f64) -> Result<()> {
        let dom = &self.domain;
        let near_open = |e: Endpoint| matches!(e, Endpoint::Open(v) if (x - v).abs() <= BOUNDARY_EXCLUSION * v.abs().max(1.0));
        if !dom.contains(x) || near_open(dom.lo) || near_open(dom.hi) {
            return Err(Error::OutsideBasin {
                x,
                basin: dom.to_string(),
            });
        }
        Ok(())
    }

    /// `φ(x)`, `φ'(x)` and the entry time.
    pub fn eval_point(&self, x: f64) -> Result<ChartPoint> {
        self.check_point(x)?;
        let mut y = x;
        let mut slope = 1.0;
        let mut n = 0usize;
        while (y - self.x_star).abs() > self.core_radius {
            if n >= ENTRY_CAP {
                return Err(Error::NoConvergence {
                    what: format!("entry into the core from {x}"),
                    iterations: ENTRY_CAP,
                });
            }
            let (next, d) = self.step_toward_core(y)?;
            if !self.domain.contains(next) {
                return Err(Error::OutsideBasin {
                    x: next,
                    basin: self.domain.to_string(),
                });
            }
            slope *= d;
            y = next;
            n += 1;
        }
        let (p, dp) = series_eval(&self.series, y - self.x_star);
        let scale = match self.direction {
            Direction::Attracting => self.lambda.powi(-(n as i32)),
            Direction::Repelling => self.lambda.powi(n as i32),
        };
        Ok(ChartPoint {
            phi: p * scale,
            dphi: dp * slope * scale,
            entry_time: n,
        })
    }

    pub fn phi(&self, x: f64) -> Result<f64> {
        self.eval_point(x).map(|p| p.phi)
    }

    /// Inverse of `φ` on the chart domain (bisection plus Newton).
    pub fn phi_inverse(&self, target: f64) -> Result<f64> {
        let (lo, hi) = self.inner_bracket();
        let f = |x: f64| match self.eval_point(x) {
            Ok(p) => (p.phi, p.dphi),
            Err(_) => (f64::NAN, f64::NAN),
        };
        invert_monotone(f, lo, hi, target).map_err(|_| Error::OutsideBasin {
            x: target,
            basin: format!("phi-range of {}", self.domain),
        })
    }

    /// Finite bracket inside the domain, backed off from open ends.
    fn inner_bracket(&self) -> (f64, f64) {
        let back = |v: f64| 1e-11 * v.abs().max(1.0);
        let lo = match self.domain.lo {
            Endpoint::Closed(v) => v,
            Endpoint::Open(v) => v + back(v),
            Endpoint::Infinite => self.x_star - 1e6 * self.x_star.abs().max(1.0),
        };
        let hi = match self.domain.hi {
            Endpoint::Closed(v) => v,
            Endpoint::Open(v) => v - back(v),
            Endpoint::Infinite => self.x_star + 1e6 * self.x_star.abs().max(1.0),
        };
        (lo, hi)
    }

    /// `max |φ(f(x)) - λ φ(x)| / (1 + |φ(x)|)` over the given points, skipping
    /// those whose image leaves the chart domain.
    pub fn schroder_residual(&self, xs: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &x in xs {
            let Ok(fx) = self.map.eval(x) else { continue };
            if self.check_point(fx).is_err() {
                continue;
            }
            let p = self.phi(x)?;
            let pf = self.phi(fx)?;
            worst = worst.max((pf - self.lambda * p).abs() / (1.0 + p.abs()));
        }
        Ok(worst)
    }

    /// `n` evenly spaced interior points of the finite part of the domain,
    /// keeping those that `f` maps back into the domain.
    pub fn sample_points(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.inner_bracket();
        let lo = match self.domain.lo {
            Endpoint::Infinite => self.x_star - 10.0 * self.core_radius.max(1.0),
            _ => lo,
        };
        let hi = match self.domain.hi {
            Endpoint::Infinite => self.x_star + 10.0 * self.core_radius.max(1.0),
            _ => hi,
        };
        (1..=n)
            .map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64)
            .filter(|&x| self.map.eval(x).is_ok_and(|y| self.check_point(y).is_ok()))
            .collect()
    }
}

/// Extend a chart from its core to a whole basin.
///
/// The basin may contain no fixed point other than `x*`. For a repelling
/// point the inverse lap is restricted to the basin, which must then be a
/// monotone lap of `f`.
pub fn extend_basin(chart: &LinearizationChart, basin: &Interval) -> Result<LinearizationChart> {
    let map = chart.map.as_ref();
    if !basin.contains_interior(chart.x_star) {
        return Err(Error::OutsideBasin {
            x: chart.x_star,
            basin: basin.to_string(),
        });
    }
    let reach = 100.0 * chart.x_star.abs().max(1.0);
    let window = Interval::closed(
        basin.lo_value().max(chart.x_star - reach),
        basin.hi_value().min(chart.x_star + reach),
    )?;
    let (s_lo, s_hi) = (window.lo_value(), window.hi_value());
    let mut sign = 0.0;
    for i in 1..2000 {
        let x = s_lo + (s_hi - s_lo) * i as f64 / 2000.0;
        let Ok(d) = map.deriv(x, 1) else { continue };
        if d != 0.0 && sign != 0.0 && d.signum() != sign {
            return Err(Error::Invalid(format!("f is not monotone on the basin {basin} (f' changes sign near {x})")));
        }
        if d != 0.0 {
            sign = d.signum();
        }
    }
    let margin = 1e-9 * window.width().max(1.0);
    for fp in find_fixed_points(map, &window, 4096)? {
        let inside = fp.x_star > basin.lo_value() + margin && fp.x_star < basin.hi_value() - margin;
        if inside && (fp.x_star - chart.x_star).abs() > 1e-9 * chart.x_star.abs().max(1.0) {
            return Err(Error::ExtraFixedPoint {
                basin: basin.to_string(),
                x: fp.x_star,
            });
        }
    }
    let mut out = chart.clone();
    out.domain = *basin;
    if chart.direction == Direction::Repelling {
        let (lo, hi) = out.inner_bracket();
        out.lap = (lo.max(map.domain().lo_value()), hi.min(map.domain().hi_value()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::SmoothMap1D;

    #[test]
    fn series_for_linear_map_is_identity() {
        let c = schroder_series(&[0.0, 0.5, 0.0, 0.0]);
        assert_eq!(c, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn linear_chart_is_identity() {
        let f = SmoothMap1D::linear(0.5).unwrap();
        let chart = koenigs(&f, 0.0, 1e-13).unwrap();
        let chart = extend_basin(&chart, &Interval::open(-1.0, 1.0).unwrap()).unwrap();
        for x in [-0.99, -0.3, 0.0, 0.2, 0.7] {
            assert!((chart.phi(x).unwrap() - x).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_attracting_chart() {
        let f = SmoothMap1D::polynomial("f", &[0.0, 0.5, 1.0]).unwrap();
        let chart = koenigs(&f, 0.0, 1e-13).unwrap();
        let chart = extend_basin(&chart, &Interval::open(-0.25, 0.5).unwrap()).unwrap();
        let xs = chart.sample_points(200);
        assert!(xs.len() > 150);
        assert!(chart.schroder_residual(&xs).unwrap() < 1e-10);
        let p = chart.eval_point(0.0).unwrap();
        assert_eq!((p.phi, p.dphi), (0.0, 1.0));
    }

    #[test]
    fn quadratic_repelling_chart() {
        let f = SmoothMap1D::polynomial("f", &[0.0, 2.0, 1.0]).unwrap();
        let chart = koenigs(&f, 0.0, 1e-13).unwrap();
        assert_eq!(chart.direction(), Direction::Repelling);
        let chart = extend_basin(&chart, &Interval::open(-0.5, 0.5).unwrap()).unwrap();
        let xs = chart.sample_points(200);
        assert!(chart.schroder_residual(&xs).unwrap() < 1e-10);
    }

    #[test]
    fn rejects_degenerate_points() {
        let id = SmoothMap1D::polynomial("f", &[0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(koenigs(&id, 0.0, 1e-12), Err(Error::Nonhyperbolic { .. })));
        let sq = SmoothMap1D::polynomial("f", &[0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(koenigs(&sq, 0.0, 1e-12), Err(Error::Superattracting { .. })));
        let f = SmoothMap1D::polynomial("f", &[0.0, 0.5, 1.0]).unwrap();
        assert!(matches!(koenigs(&f, 0.1, 1e-12), Err(Error::NotFixed { .. })));
    }

    #[test]
    fn extra_fixed_point_rejected() {
        let f = SmoothMap1D::polynomial("f", &[0.0, 0.5, 1.0]).unwrap();
        let chart = koenigs(&f, 0.0, 1e-13).unwrap();
        let err = extend_basin(&chart, &Interval::open(-0.2, 0.9).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ExtraFixedPoint { .. }));
        let err = extend_basin(&chart, &Interval::open(-0.5, 0.4).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }
}

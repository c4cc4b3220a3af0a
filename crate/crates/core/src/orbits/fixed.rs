use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{Interval, Map1D};
use crate::numeric::safeguarded_newton;

/// `||λ| - 1|` below this counts as nonhyperbolic.
pub const NONHYPERBOLIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Attracting,
    Repelling,
    Nonhyperbolic,
}

impl Stability {
    pub fn of(multiplier: f64) -> Self {
        let m = multiplier.abs();
        if (m - 1.0).abs() < NONHYPERBOLIC_TOL {
            Stability::Nonhyperbolic
        } else if m < 1.0 {
            Stability::Attracting
        } else {
            Stability::Repelling
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Attracting => "attracting",
            Stability::Repelling => "repelling",
            Stability::Nonhyperbolic => "nonhyperbolic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointInfo {
    pub x_star: f64,
    pub multiplier: f64,
    pub stability: Stability,
}

/// Slope at a fixed point; at a kink the branch the point sits on is used
/// (the left one at exactly 0).
pub(crate) fn slope<M: Map1D + ?Sized>(map: &M, x: f64) -> Result<f64> {
    match map.deriv(x, 1) {
        Err(Error::KinkDerivative) => {
            let h = 1e-7;
            Ok((map.eval(x)? - map.eval(x - h)?) / h)
        }
        other => other,
    }
}

/// Fixed points of `map` on a bounded `interval`.
///
/// Sign changes of `f(x) - x` on a uniform grid of `grid_n` points are refined
/// by bisection and Newton. Tangential fixed points where `f(x) - x` does not
/// change sign are only found if they land on a grid point.
pub fn find_fixed_points<M: Map1D + ?Sized>(map: &M, interval: &Interval, grid_n: usize) -> Result<Vec<FixedPointInfo>> {
    if grid_n < 2 {
        return Err(Error::Parameter {
            name: "grid_n".into(),
            reason: "need at least 2 grid points".into(),
        });
    }
    if !interval.is_bounded() {
        return Err(Error::Invalid(format!("fixed-point search needs a bounded interval, got {interval}")));
    }
    let (lo, hi) = (interval.lo_value(), interval.hi_value());
    let g = |x: f64| map.eval(x).map(|v| v - x);
    let grid: Vec<f64> = (0..grid_n)
        .map(|i| if i + 1 == grid_n { hi } else { lo + (hi - lo) * i as f64 / (grid_n - 1) as f64 })
        .collect();
    let vals: Vec<Option<f64>> = grid.iter().map(|&x| g(x).ok().filter(|v| v.is_finite())).collect();
    let poles = map.poles();

    let mut roots = Vec::new();
    for i in 0..grid_n {
        if vals[i] == Some(0.0) {
            roots.push(grid[i]);
        }
        if i + 1 == grid_n {
            break;
        }
        let (a, b) = (grid[i], grid[i + 1]);
        let (Some(fa), Some(fb)) = (vals[i], vals[i + 1]) else {
            continue;
        };
        if fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        if poles.iter().any(|&p| p >= a && p <= b) {
            continue;
        }
        let newton = |x: f64| {
            let v = g(x).unwrap_or(f64::NAN);
            let d = map.deriv(x, 1).map(|d| d - 1.0).unwrap_or(f64::NAN);
            (v, d)
        };
        let x = safeguarded_newton(newton, a, b, 1e-16)
            .ok_or_else(|| Error::NoConvergence {
                what: format!("fixed-point refinement on [{a}, {b}]"),
                iterations: 400,
            })?;
        let x = polish(map, x, a, b);
        if g(x).is_ok_and(|v| v.abs() <= 1e-10 * x.abs().max(1.0)) {
            roots.push(x);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    roots
        .into_iter()
        .map(|x| {
            let m = slope(map, x)?;
            Ok(FixedPointInfo {
                x_star: x,
                multiplier: m,
                stability: Stability::of(m),
            })
        })
        .collect()
}

/// A few plain Newton steps kept only while they shrink the residual.
fn polish<M: Map1D + ?Sized>(map: &M, mut x: f64, a: f64, b: f64) -> f64 {
    let resid = |x: f64| map.eval(x).map(|v| (v - x).abs()).unwrap_or(f64::INFINITY);
    let mut r = resid(x);
    for _ in 0..4 {
        if r == 0.0 {
            break;
        }
        let Ok(d) = map.deriv(x, 1) else { break };
        let Ok(v) = map.eval(x) else { break };
        let next = x - (v - x) / (d - 1.0);
        if !(next >= a && next <= b) {
            break;
        }
        let rn = resid(next);
        if rn >= r {
            break;
        }
        x = next;
        r = rn;
    }
    x
}

/// Product of `f'` along `points`, which must form an orbit to `1e-8`.
pub fn multiplier<M: Map1D + ?Sized>(map: &M, points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Invalid("empty orbit".into()));
    }
    let p = points.len();
    for (i, &x) in points.iter().enumerate() {
        let next = (i + 1) % p;
        let gap = (map.eval(x)? - points[next]).abs();
        if !(gap <= 1e-8 * points[next].abs().max(1.0)) {
            return Err(Error::NotAnOrbit { index: i, next, gap });
        }
    }
    points.iter().try_fold(1.0, |acc, &x| Ok(acc * slope(map, x)?))
}

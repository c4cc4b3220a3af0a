use serde::Serialize;

use super::fixed::slope;
use crate::error::{Error, Result};
use crate::maps::Map1D;
use crate::numeric::{invert_monotone, safeguarded_newton};

pub const DEFAULT_P_MAX: usize = 10;

const FULL_SHIFT_TOL: f64 = 1e-8;
const PULLBACK_TOL: f64 = 1e-13;
const PULLBACK_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    pub points: Vec<f64>,
    pub period: usize,
    pub multiplier: f64,
    pub itinerary: String,
}

/// Lyndon words of length `n` over `{L, R}` in lexicographic order: one
/// representative for each primitive necklace.
pub fn lyndon_words(n: usize) -> Vec<String> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    // Duval's generation algorithm.
    let mut w: Vec<u8> = vec![0];
    loop {
        if w.len() == n {
            out.push(w.iter().map(|&s| if s == 0 { 'L' } else { 'R' }).collect());
        }
        let m = w.len();
        while w.len() < n {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&1) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out
}

/// Geometry of a full unimodal map: critical point and the two laps.
#[derive(Debug, Clone, Copy)]
pub struct UnimodalShape {
    pub lo: f64,
    pub hi: f64,
    pub critical: f64,
}

impl UnimodalShape {
    /// Locates the unique critical point and checks that each lap covers the
    /// whole interval to `1e-8`.
    pub fn detect<M: Map1D + ?Sized>(map: &M) -> Result<Self> {
        let dom = map.domain();
        if !dom.is_bounded() {
            return Err(Error::NotUnimodal(format!("domain {dom} is unbounded")));
        }
        let (lo, hi) = (dom.lo_value(), dom.hi_value());
        let n = 2001;
        let xs: Vec<f64> = (1..n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let ds: Vec<f64> = xs.iter().map(|&x| map.deriv(x, 1)).collect::<Result<_>>()?;
        let changes: Vec<usize> = (0..ds.len() - 1)
            .filter(|&i| ds[i] != 0.0 && ds[i + 1] != 0.0 && ds[i].signum() != ds[i + 1].signum() || ds[i] == 0.0)
            .collect();
        if changes.len() != 1 {
            return Err(Error::NotUnimodal(format!("{} sign changes of f'", changes.len())));
        }
        let i = changes[0];
        let critical = if ds[i] == 0.0 {
            xs[i]
        } else {
            safeguarded_newton(
                |x| (map.deriv(x, 1).unwrap_or(f64::NAN), map.deriv(x, 2).unwrap_or(f64::NAN)),
                xs[i],
                xs[i + 1],
                1e-16,
            )
            .ok_or_else(|| Error::NotUnimodal("critical point refinement failed".into()))?
        };
        let shape = Self { lo, hi, critical };
        let tol = FULL_SHIFT_TOL * (hi - lo).max(1.0);
        let (flo, fc, fhi) = (map.eval(lo)?, map.eval(critical)?, map.eval(hi)?);
        let covers = |a: f64, b: f64| {
            let (m, mm) = if a <= b { (a, b) } else { (b, a) };
            (m - lo).abs() <= tol && (mm - hi).abs() <= tol
        };
        if !covers(flo, fc) || !covers(fc, fhi) {
            return Err(Error::NotUnimodal(format!(
                "laps do not cover [{lo}, {hi}]: f(lo) = {flo}, f(c) = {fc}, f(hi) = {fhi}"
            )));
        }
        Ok(shape)
    }

    fn lap(&self, symbol: u8) -> (f64, f64) {
        if symbol == b'L' {
            (self.lo, self.critical)
        } else {
            (self.critical, self.hi)
        }
    }

    /// Preimage of `y` on the lap named by `symbol`.
    pub fn inverse<M: Map1D + ?Sized>(&self, map: &M, symbol: u8, y: f64) -> Result<f64> {
        let (a, b) = self.lap(symbol);
        let y = y.clamp(self.lo, self.hi);
        let f = |x: f64| (map.eval(x).unwrap_or(f64::NAN), map.deriv(x, 1).unwrap_or(f64::NAN));
        // The lap image may miss an endpoint by up to the coverage tolerance.
        let (fa, fb) = (f(a).0, f(b).0);
        let y = y.clamp(fa.min(fb), fa.max(fb));
        invert_monotone(f, a, b, y)
    }

    pub fn symbol(&self, x: f64) -> char {
        if x <= self.critical {
            'L'
        } else {
            'R'
        }
    }
}

fn iterate<M: Map1D + ?Sized>(map: &M, x: f64, n: usize) -> Result<f64> {
    (0..n).try_fold(x, |y, _| map.eval(y))
}

/// Locate the orbit with a given itinerary by pulling back through inverse
/// laps, then polish with Newton on `f^p(x) = x`.
pub fn orbit_for_itinerary<M: Map1D + ?Sized>(map: &M, shape: &UnimodalShape, itinerary: &str) -> Result<PeriodicOrbit> {
    let syms = itinerary.as_bytes();
    let p = syms.len();
    if p == 0 || syms.iter().any(|&s| s != b'L' && s != b'R') {
        return Err(Error::Invalid(format!("bad itinerary `{itinerary}`")));
    }
    let mut x = 0.5 * (shape.lo + shape.hi);
    let mut converged = false;
    for _ in 0..PULLBACK_CAP {
        let mut y = x;
        for &s in syms.iter().rev() {
            y = shape.inverse(map, s, y)?;
        }
        let step = (y - x).abs();
        x = y;
        if step < PULLBACK_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: format!("pull-back for itinerary {itinerary}"),
            iterations: PULLBACK_CAP,
        });
    }
    let x = newton_polish(map, x, p);
    let mut points = Vec::with_capacity(p);
    let mut y = x;
    for _ in 0..p {
        points.push(y);
        y = map.eval(y)?;
    }
    for d in (1..p).filter(|d| p % d == 0) {
        let back = iterate(map, x, d)?;
        if (back - x).abs() < 1e-9 * x.abs().max(1.0) {
            return Err(Error::Invalid(format!("itinerary {itinerary} collapsed to period {d}")));
        }
    }
    let multiplier = points.iter().try_fold(1.0, |acc, &x| Ok::<_, Error>(acc * slope(map, x)?))?;
    Ok(PeriodicOrbit {
        points,
        period: p,
        multiplier,
        itinerary: itinerary.to_string(),
    })
}

fn newton_polish<M: Map1D + ?Sized>(map: &M, mut x: f64, p: usize) -> f64 {
    let eval = |x: f64| -> Option<(f64, f64)> {
        let mut y = x;
        let mut d = 1.0;
        for _ in 0..p {
            d *= map.deriv(y, 1).ok()?;
            y = map.eval(y).ok()?;
        }
        Some((y - x, d - 1.0))
    };
    let Some((mut r, _)) = eval(x) else { return x };
    for _ in 0..3 {
        let Some((v, d)) = eval(x) else { break };
        let next = x - v / d;
        match eval(next) {
            Some((rn, _)) if next.is_finite() && rn.abs() < r.abs() => {
                x = next;
                r = rn;
            }
            _ => break,
        }
    }
    x
}

/// All periodic orbits of prime period `1..=p_max`, one per cyclic class,
/// ordered by period and then itinerary.
pub fn find_periodic_orbits_unimodal<M: Map1D + ?Sized>(map: &M, p_max: usize) -> Result<Vec<PeriodicOrbit>> {
    let shape = UnimodalShape::detect(map)?;
    let mut out = Vec::new();
    for p in 1..=p_max {
        for word in lyndon_words(p) {
            out.push(orbit_for_itinerary(map, &shape, &word)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::catalog_make_f64;

    #[test]
    fn lyndon_counts() {
        let counts: Vec<usize> = (1..=8).map(|p| lyndon_words(p).len()).collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6, 9, 18, 30]);
        assert_eq!(lyndon_words(3), vec!["LLR", "LRR"]);
    }

    #[test]
    fn chebyshev_period_two() {
        let t2 = catalog_make_f64("chebyshev", &[]).unwrap();
        let orbits = find_periodic_orbits_unimodal(&t2, 2).unwrap();
        assert_eq!(orbits.len(), 3);
        assert_eq!(orbits[0].points, vec![-1.0]);
        assert!((orbits[1].points[0] - 0.5).abs() < 1e-14);
        assert!((orbits[2].multiplier.abs() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn itinerary_is_reproduced() {
        let t2 = catalog_make_f64("chebyshev", &[]).unwrap();
        let shape = UnimodalShape::detect(&t2).unwrap();
        for o in find_periodic_orbits_unimodal(&t2, 6).unwrap() {
            let it: String = o.points.iter().map(|&x| shape.symbol(x)).collect();
            assert_eq!(it, o.itinerary);
        }
    }

    #[test]
    fn non_unimodal_rejected() {
        let f = catalog_make_f64("linear", &[("lambda", 0.5)]).unwrap();
        assert!(matches!(find_periodic_orbits_unimodal(&f, 2), Err(Error::NotUnimodal(_))));
    }
}

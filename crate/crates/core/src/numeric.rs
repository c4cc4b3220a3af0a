//! Scalar root finding shared by the orbit, chart and fitting code.

use crate::error::{Error, Result};

/// Shortest round-trip decimal, switching to exponent form for magnitudes
/// below `1e-4` or from `1e16` up.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Root of `f` in `[lo, hi]` given a sign change, by Newton steps that fall
/// back to bisection whenever they would leave the bracket.
///
/// Returns the root once the bracket or the step is below
/// `tol * max(1, |x|)`.
pub fn safeguarded_newton(
    f: impl Fn(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Option<f64> {
    let (mut flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..400 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let scale = tol * x.abs().max(1.0);
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= scale || (hi - lo) <= scale {
            return Some(next);
        }
        x = next;
    }
    Some(x)
}

/// Solve `f(x) = target` for `f` monotone on `[lo, hi]`.
///
/// Targets that overshoot the branch range by less than `1e-12` relative are
/// clamped to the nearest endpoint.
pub fn invert_monotone(
    f: impl Fn(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    target: f64,
) -> Result<f64> {
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    let (min, max) = if flo <= fhi { (flo, fhi) } else { (fhi, flo) };
    let slack = 1e-12 * max.abs().max(min.abs()).max(1.0);
    if !(target >= min - slack && target <= max + slack) {
        return Err(Error::Inversion { target, lo, hi });
    }
    let at_min = if flo <= fhi { lo } else { hi };
    let at_max = if flo <= fhi { hi } else { lo };
    if target <= min {
        return Ok(at_min);
    }
    if target >= max {
        return Ok(at_max);
    }
    safeguarded_newton(
        |x| {
            let (v, d) = f(x);
            (v - target, d)
        },
        lo,
        hi,
        1e-16,
    )
    .ok_or(Error::Inversion { target, lo, hi })
}

/// Real roots of a polynomial with `f64` coefficients (ascending), sorted.
///
/// Roots of `p` are separated by the roots of `p'`, so the critical points
/// found recursively give brackets for bisection. Double roots are caught
/// when `p` nearly vanishes at a critical point.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let n = match c.len() {
        0 | 1 => return Vec::new(),
        n => n - 1,
    };
    if n == 1 {
        return vec![-c[0] / c[1]];
    }
    let lead = c[n];
    let bound = 1.0 + c[..n].iter().map(|a| (a / lead).abs()).fold(0.0, f64::max);
    let deriv: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
    let mut knots = vec![-bound];
    knots.extend(real_roots(&deriv).into_iter().filter(|r| r.abs() < bound));
    knots.push(bound);
    let mag = |x: f64| c.iter().rev().fold(0.0, |acc: f64, a| acc * x.abs() + a.abs());
    let mut roots: Vec<f64> = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (horner(&c, a), horner(&c, b));
        if fa.signum() != fb.signum() && fa != 0.0 && fb != 0.0 {
            let df = |x: f64| horner(&deriv, x);
            if let Some(r) = safeguarded_newton(|x| (horner(&c, x), df(x)), a, b, 1e-16) {
                roots.push(r);
            }
        }
    }
    for &k in &knots[1..knots.len() - 1] {
        if horner(&c, k).abs() <= 1e-13 * mag(k) {
            roots.push(k);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    roots
}

/// Central finite difference of `f` at `x` with step `h`.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

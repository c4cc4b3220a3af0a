use serde::Serialize;

use super::{exact, Deviation};
use crate::error::{Error, Result};
use crate::maps::{Interval, Map1D, PiecewiseFamily, PiecewiseMap1D, SmoothMap1D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BCMultipliers {
    pub mu: f64,
    pub x_left: f64,
    pub x_right: f64,
    pub lambda_left: f64,
    pub lambda_right: f64,
    /// Kink slope ratio `f_L'(0) / f_R'(0)`.
    pub slope_ratio: f64,
}

/// Checks `f_L(0,0) = f_R(0,0) = 0`, `a_L > 1`, `0 < a_R < 1`, `β > 0`.
fn check(fam: &PiecewiseFamily) -> Result<()> {
    let f0 = fam.at(0.0)?;
    let (l, r) = (f0.left(), f0.right());
    let (vl, vr) = (l.eval(0.0)?, r.eval(0.0)?);
    if vl.abs() > 1e-12 || vr.abs() > 1e-12 {
        return Err(Error::Assumption(format!("f_L(0,0) = f_R(0,0) = 0 fails: ({vl}, {vr})")));
    }
    let (al, ar) = (l.deriv(0.0, 1)?, r.deriv(0.0, 1)?);
    if !(al > 1.0) {
        return Err(Error::Assumption(format!("a_L > 1 fails: a_L = {al}")));
    }
    if !(ar > 0.0 && ar < 1.0) {
        return Err(Error::Assumption(format!("0 < a_R < 1 fails: a_R = {ar}")));
    }
    let h = 1e-6;
    let beta = (fam.at(h)?.left().eval(0.0)? - fam.at(-h)?.left().eval(0.0)?) / (2.0 * h);
    if !(beta > 0.0) {
        return Err(Error::Assumption(format!("beta > 0 fails: beta = {beta}")));
    }
    Ok(())
}

/// Left and right fixed points at `μ > 0`, their multipliers and the kink
/// slope ratio.
pub fn bc_multipliers(fam: &PiecewiseFamily, mu: f64) -> Result<BCMultipliers> {
    check(fam)?;
    if !(mu > 0.0) {
        return Err(Error::MissingFixedPoint(format!("no fixed points at mu = {mu} (need mu > 0)")));
    }
    let m = fam.at_exact(&exact(mu)?)?;
    let w = (100.0 * mu).min(0.5);
    let nearest = |dev: &Deviation, lo: f64, hi: f64, side: &str| {
        dev.fixed_points(lo, hi, 2000)
            .into_iter()
            .filter(|x| (*x < 0.0) == (side == "left") && *x != 0.0)
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
            .ok_or_else(|| Error::MissingFixedPoint(format!("no {side} fixed point in [{lo}, {hi}] at mu = {mu}")))
    };
    let dl = Deviation::new(m.left());
    let dr = Deviation::new(m.right());
    let xl = nearest(&dl, -w, 0.0, "left")?;
    let xr = nearest(&dr, 0.0, w, "right")?;
    let (sl, sr) = m.kink_slopes()?;
    Ok(BCMultipliers {
        mu,
        x_left: xl,
        x_right: xr,
        lambda_left: 1.0 + dl.kappa(xl),
        lambda_right: 1.0 + dr.kappa(xr),
        slope_ratio: sl / sr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BCFit {
    pub mu: f64,
    pub nu: f64,
    pub s_l: f64,
    pub s_r: f64,
    pub t: f64,
    /// Mismatches in `λ_L`, `λ_R` and the slope ratio.
    pub residuals: [f64; 3],
    pub iterations: usize,
}

impl BCFit {
    /// `ν + s_L y + t y²` for `y ≤ 0`, `ν + s_R y` for `y ≥ 0`.
    pub fn normal_form(&self) -> Result<PiecewiseMap1D> {
        let left = SmoothMap1D::polynomial("left", &[self.nu, self.s_l, self.t])?;
        let right = SmoothMap1D::polynomial("right", &[self.nu, self.s_r])?;
        PiecewiseMap1D::new("bc-normal-form", left, right, Interval::real_line())
    }
}

/// Left fixed point of `ν + s_L y + t y²` and its multiplier.
fn left_point(nu: f64, s_l: f64, t: f64) -> Option<(f64, f64)> {
    let c = s_l - 1.0;
    let disc = c * c - 4.0 * t * nu;
    if disc < 0.0 {
        return None;
    }
    let y = -2.0 * nu / (c + disc.sqrt());
    (y < 0.0 && y.is_finite()).then(|| (y, s_l + 2.0 * t * y))
}

/// Multipliers `(σ_L, σ_R)` of the skew tent with a quadratic left branch.
pub fn bc_normal_form_multipliers(nu: f64, s_l: f64, s_r: f64, t: f64) -> Option<(f64, f64)> {
    Some((left_point(nu, s_l, t)?.1, s_r))
}

/// Fit `(s_L, s_R, t)` at `ν = μ`.
pub fn bc_fit(fam: &PiecewiseFamily, mu: f64) -> Result<BCFit> {
    let m = bc_multipliers(fam, mu)?;
    let nu = mu;
    let s_r = m.lambda_right;
    let s_l = m.slope_ratio * s_r;
    if !(s_l > 1.0) || !(s_r > 0.0 && s_r < 1.0) {
        return Err(Error::Assumption(format!("s_L > 1 and 0 < s_R < 1 fail at mu = {mu}: s_L = {s_l}, s_R = {s_r}")));
    }
    let target = m.lambda_left;
    let mut t = (target - s_l) * (1.0 - s_l) / (2.0 * nu);
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    for it in 0..100 {
        let (y, sigma) = left_point(nu, s_l, t).ok_or_else(|| Error::NoConvergence {
            what: "border-collision fit".into(),
            iterations: it,
        })?;
        let r = sigma - target;
        residual = r.abs();
        iterations = it;
        if residual <= 1e-15 * target.abs() {
            break;
        }
        let dy = -y * y / (2.0 * t * y + s_l - 1.0);
        let step = r / (2.0 * y + 2.0 * t * dy);
        t -= step;
        if step.abs() <= 1e-16 * t.abs().max(1e-300) {
            let (_, sigma) = left_point(nu, s_l, t).unwrap_or((0.0, f64::INFINITY));
            residual = (sigma - target).abs();
            iterations = it + 1;
            break;
        }
        if it == 99 {
            return Err(Error::NoConvergence {
                what: "border-collision fit".into(),
                iterations: 100,
            });
        }
    }
    Ok(BCFit {
        mu,
        nu,
        s_l,
        s_r,
        t,
        residuals: [residual, (s_r - m.lambda_right).abs(), (s_l / s_r - m.slope_ratio).abs()],
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::piecewise_polynomial_family;

    fn quad() -> PiecewiseFamily {
        piecewise_polynomial_family("bc", vec![vec![0.0, 1.0], vec![2.0], vec![1.0]], vec![vec![0.0, 1.0], vec![0.5]]).unwrap()
    }

    #[test]
    fn quadratic_left_multipliers() {
        let mu = 1e-3;
        let m = bc_multipliers(&quad(), mu).unwrap();
        let x = (-1.0 + (1.0f64 - 4.0 * mu).sqrt()) / 2.0;
        assert_eq!(m.lambda_right, 0.5);
        assert_eq!(m.slope_ratio, 4.0);
        assert!((m.lambda_left - (2.0 + 2.0 * x)).abs() < 1e-14);
        assert!(matches!(bc_multipliers(&quad(), 0.0), Err(Error::MissingFixedPoint(_))));
    }

    #[test]
    fn skew_tent_fits_itself() {
        let fam = piecewise_polynomial_family("tent", vec![vec![0.0, 1.0], vec![2.0]], vec![vec![0.0, 1.0], vec![0.5]]).unwrap();
        let f = bc_fit(&fam, 1e-2).unwrap();
        assert_eq!((f.s_l, f.s_r), (2.0, 0.5));
        assert!(f.t.abs() < 1e-12, "{f:?}");
    }

    #[test]
    fn quadratic_fit_matches() {
        let f = bc_fit(&quad(), 1e-3).unwrap();
        assert!(f.residuals.iter().all(|r| *r < 1e-10), "{f:?}");
        let (sl, _) = bc_normal_form_multipliers(f.nu, f.s_l, f.s_r, f.t).unwrap();
        assert!((sl - bc_multipliers(&quad(), 1e-3).unwrap().lambda_left).abs() < 1e-10);
        assert!((f.t - 1.0).abs() < 0.05);
    }
}

use serde::Serialize;

use super::{d_mu, damped_newton, exact, Deviation, Substitution};
use crate::error::{Error, Result};
use crate::maps::{Map1D, SmoothFamily, SmoothMap1D};

/// Multipliers of the two fixed points born in a saddle-node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SNMultipliers {
    pub mu: f64,
    /// Repelling point (`λ⁺ > 1`) and attracting point (`λ⁻ < 1`), in the
    /// substituted coordinates.
    pub x_plus: f64,
    pub x_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// `λ± - 1` without cancellation.
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    /// `1 ± √(-2 f_μ f_xx μ) - (2 f_μ f_xxx / (3 f_xx)) μ`.
    pub series_plus: f64,
    pub series_minus: f64,
    /// `2 f_xxx / (3 f_xx²)`, the limit of the fitted `a`.
    pub a_limit: f64,
    pub substitution: Substitution,
}

/// Checks `f(0,0) = 0`, `f_x(0,0) = 1`, `f_μ ≠ 0`, `f_xx ≠ 0` and picks the
/// substitution that makes `f_μ > 0`, `f_xx < 0`.
fn check(fam: &SmoothFamily) -> Result<(Substitution, [f64; 3])> {
    let f0 = fam.at(0.0)?;
    let v = f0.eval(0.0)?;
    if v.abs() > 1e-12 {
        return Err(Error::Assumption(format!("f(0,0) = 0 fails: f(0,0) = {v}")));
    }
    let d1 = f0.deriv(0.0, 1)?;
    if (d1 - 1.0).abs() > 1e-9 {
        return Err(Error::Assumption(format!("f_x(0,0) = 1 fails: f_x(0,0) = {d1}")));
    }
    let fmu = d_mu(fam, 0.0, 1e-6)?;
    let fxx = f0.deriv(0.0, 2)?;
    let fxxx = f0.deriv(0.0, 3)?;
    if fmu.abs() < 1e-9 {
        return Err(Error::Assumption(format!("f_mu(0,0) > 0 fails: f_mu(0,0) = {fmu}")));
    }
    if fxx.abs() < 1e-9 {
        return Err(Error::Assumption(format!("f_xx(0,0) < 0 fails: f_xx(0,0) = {fxx}")));
    }
    // x -> -x flips the signs of f_mu and f_xx; mu -> -mu flips f_mu.
    let flip_x = fxx > 0.0;
    let fmu_x = if flip_x { -fmu } else { fmu };
    let sub = Substitution {
        flip_x,
        flip_mu: fmu_x < 0.0,
    };
    // f''' keeps its sign under x -> -x.
    Ok((sub, [fmu.abs(), -fxx.abs(), fxxx]))
}

/// Exact numeric multipliers of both fixed points near 0 at `μ > 0`, plus
/// the asymptotic series for comparison.
pub fn sn_multipliers(fam: &SmoothFamily, mu: f64) -> Result<SNMultipliers> {
    let (sub, [fmu, fxx, fxxx]) = check(fam)?;
    if !(mu > 0.0) {
        return Err(Error::MissingFixedPoint(format!("no fixed points near 0 at mu = {mu} (need mu > 0)")));
    }
    let fam_s = sub.apply(fam);
    let m = fam_s.at_exact(&exact(mu)?)?;
    let dev = Deviation::new(&m);
    let est = (2.0 * fmu * mu / -fxx).sqrt();
    let w = (20.0 * est).min(0.5);
    let mut fps = dev.fixed_points(-w, w, 4000);
    fps.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    fps.truncate(2);
    fps.sort_by(f64::total_cmp);
    if fps.len() < 2 || fps[0] >= 0.0 || fps[1] <= 0.0 {
        return Err(Error::MissingFixedPoint(format!(
            "expected a fixed point on each side of 0 at mu = {mu}, found {fps:?}"
        )));
    }
    let (xp, xm) = (fps[0], fps[1]);
    let (kp, km) = (dev.kappa(xp), dev.kappa(xm));
    let root = (-2.0 * fmu * fxx * mu).sqrt();
    let drift = 2.0 * fmu * fxxx / (3.0 * fxx) * mu;
    Ok(SNMultipliers {
        mu,
        x_plus: xp,
        x_minus: xm,
        lambda_plus: 1.0 + kp,
        lambda_minus: 1.0 + km,
        kappa_plus: kp,
        kappa_minus: km,
        series_plus: 1.0 + root - drift,
        series_minus: 1.0 - root - drift,
        a_limit: 2.0 * fxxx / (3.0 * fxx * fxx),
        substitution: sub,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SNFit {
    pub mu: f64,
    pub nu: f64,
    pub a: f64,
    pub multiplier_residual: f64,
    pub iterations: usize,
    pub substitution: Substitution,
}

impl SNFit {
    /// `y + ν - y² + a y³` on the real line.
    pub fn normal_form(&self) -> Result<SmoothMap1D> {
        SmoothMap1D::polynomial("sn-normal-form", &[self.nu, 1.0, -1.0, self.a])
    }
}

/// Fixed point of `y + ν - y² + a y³` near `±√ν` with its slope deviation
/// and the partials of that deviation in `(ν, a)`.
fn sn_point(nu: f64, a: f64, sign: f64) -> Option<(f64, f64, [f64; 2])> {
    if !(nu > 0.0) {
        return None;
    }
    let mut y = sign * nu.sqrt();
    for _ in 0..60 {
        let p = nu - y * y + a * y * y * y;
        let dp = -2.0 * y + 3.0 * a * y * y;
        let step = p / dp;
        y -= step;
        if step.abs() <= 1e-17 * y.abs() {
            break;
        }
    }
    if !(y.is_finite() && y * sign > 0.0) {
        return None;
    }
    let fy = -2.0 * y + 3.0 * a * y * y;
    let kappa = fy;
    let dkdy = -2.0 + 6.0 * a * y;
    let dy_dnu = -1.0 / fy;
    let dy_da = -y * y * y / fy;
    Some((y, kappa, [dkdy * dy_dnu, 3.0 * y * y + dkdy * dy_da]))
}

/// Multipliers `σ±(ν, a)` of `g(y) = y + ν - y² + a y³`.
pub fn sn_normal_form_multipliers(nu: f64, a: f64) -> Option<(f64, f64)> {
    let (_, kp, _) = sn_point(nu, a, -1.0)?;
    let (_, km, _) = sn_point(nu, a, 1.0)?;
    Some((1.0 + kp, 1.0 + km))
}

/// Solve `λ±(μ) = σ±(ν, a)` for the extended saddle-node form.
pub fn sn_fit(fam: &SmoothFamily, mu: f64) -> Result<SNFit> {
    let m = sn_multipliers(fam, mu)?;
    let nu0 = ((m.kappa_plus - m.kappa_minus) / 4.0).powi(2);
    let system = |p: &[f64; 2]| {
        let (_, kp, jp) = sn_point(p[0], p[1], -1.0)?;
        let (_, km, jm) = sn_point(p[0], p[1], 1.0)?;
        Some(([kp - m.kappa_plus, km - m.kappa_minus], [jp, jm]))
    };
    let (p, residual, iterations) = damped_newton([nu0, m.a_limit], system, "saddle-node fit")?;
    Ok(SNFit {
        mu,
        nu: p[0],
        a: p[1],
        multiplier_residual: residual,
        iterations,
        substitution: m.substitution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::polynomial_family;

    fn truncated() -> SmoothFamily {
        polynomial_family("sn", vec![vec![0.0, 1.0], vec![1.0], vec![-1.0]]).unwrap()
    }

    #[test]
    fn truncated_multipliers() {
        let m = sn_multipliers(&truncated(), 0.01).unwrap();
        assert!((m.lambda_plus - 1.2).abs() < 1e-15 && (m.lambda_minus - 0.8).abs() < 1e-15);
        assert_eq!(m.substitution, Substitution::default());
        assert!(matches!(sn_multipliers(&truncated(), 0.0), Err(Error::MissingFixedPoint(_))));
    }

    #[test]
    fn truncated_fit_is_exact() {
        let f = sn_fit(&truncated(), 0.01).unwrap();
        assert!((f.nu - 0.01).abs() < 1e-15 && f.a.abs() < 1e-12);
    }

    #[test]
    fn flipped_family_is_normalized() {
        // x - mu + x^2: both f_mu and f_xx have the wrong sign.
        let fam = polynomial_family("sn", vec![vec![0.0, -1.0], vec![1.0], vec![1.0]]).unwrap();
        let f = sn_fit(&fam, 0.01).unwrap();
        assert!(f.substitution.flip_x && !f.substitution.flip_mu);
        assert!((f.nu - 0.01).abs() < 1e-14 && f.a.abs() < 1e-10);
    }

    #[test]
    fn assumption_failure_named() {
        let fam = polynomial_family("bad", vec![vec![0.0, 1.0], vec![2.0], vec![-1.0]]).unwrap();
        let err = sn_fit(&fam, 0.01).unwrap_err();
        assert!(err.to_string().contains("f_x(0,0) = 1"));
    }
}

use serde::Serialize;

use super::{damped_newton, exact, Deviation, Substitution};
use crate::error::{Error, Result};
use crate::maps::{Map1D, SmoothFamily, SmoothMap1D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PFFit {
    pub mu: f64,
    pub nu: f64,
    pub a: f64,
    pub b: f64,
    /// Largest multiplier mismatch over the three fixed points.
    pub residual: f64,
    /// Fixed points of `f` (left, center, right) and their multipliers.
    pub points: [f64; 3],
    pub multipliers: [f64; 3],
    pub iterations: usize,
    pub substitution: Substitution,
}

impl PFFit {
    /// `y + νy + bνy² - y³ + ay⁵` on the real line.
    pub fn normal_form(&self) -> Result<SmoothMap1D> {
        SmoothMap1D::polynomial("pf-normal-form", &[0.0, 1.0 + self.nu, self.b * self.nu, -1.0, 0.0, self.a])
    }
}

/// Outer fixed point of `y + νy + bνy² - y³ + ay⁵` on the side `sign`, its
/// slope deviation and the partials of that deviation in `(ν, a, b)`.
fn outer_point(nu: f64, a: f64, b: f64, sign: f64) -> Option<(f64, [f64; 3])> {
    if !(nu > 0.0) {
        return None;
    }
    // Nonzero roots solve P(y) = ν + bνy - y² + ay⁴ = 0.
    let p = |y: f64| nu + b * nu * y - y * y + a * y.powi(4);
    let py = |y: f64| b * nu - 2.0 * y + 4.0 * a * y.powi(3);
    let mut y = sign * nu.sqrt();
    for _ in 0..60 {
        let step = p(y) / py(y);
        y -= step;
        if step.abs() <= 1e-17 * y.abs() {
            break;
        }
    }
    if !(y.is_finite() && y * sign > 0.0) {
        return None;
    }
    let d = py(y);
    let s = nu + 2.0 * b * nu * y - 3.0 * y * y + 5.0 * a * y.powi(4);
    let sy = 2.0 * b * nu - 6.0 * y + 20.0 * a * y.powi(3);
    let dy = [-(1.0 + b * y) / d, -y.powi(4) / d, -nu * y / d];
    let part = [1.0 + 2.0 * b * y, 5.0 * y.powi(4), 2.0 * nu * y];
    Some((s, [part[0] + sy * dy[0], part[1] + sy * dy[1], part[2] + sy * dy[2]]))
}

/// Multipliers of the three fixed points of the extended pitchfork form,
/// ordered left, center, right.
pub fn pf_normal_form_multipliers(nu: f64, a: f64, b: f64) -> Option<[f64; 3]> {
    let (l, _) = outer_point(nu, a, b, -1.0)?;
    let (r, _) = outer_point(nu, a, b, 1.0)?;
    Some([1.0 + l, 1.0 + nu, 1.0 + r])
}

/// Checks `f(0,0) = 0`, `f_x(0,0) = 1`, `f_xxx(0,0) < 0` and picks the
/// `μ` orientation with `f_xμ(0,0) > 0`.
fn check(fam: &SmoothFamily) -> Result<Substitution> {
    let f0 = fam.at(0.0)?;
    let v = f0.eval(0.0)?;
    if v.abs() > 1e-12 {
        return Err(Error::Assumption(format!("f(0,0) = 0 fails: f(0,0) = {v}")));
    }
    let d1 = f0.deriv(0.0, 1)?;
    if (d1 - 1.0).abs() > 1e-9 {
        return Err(Error::Assumption(format!("f_x(0,0) = 1 fails: f_x(0,0) = {d1}")));
    }
    let d3 = f0.deriv(0.0, 3)?;
    if !(d3 < -1e-9) {
        return Err(Error::Assumption(format!("f_xxx(0,0) < 0 fails: f_xxx(0,0) = {d3}")));
    }
    let h = 1e-6;
    let fxmu = (fam.at(h)?.deriv(0.0, 1)? - fam.at(-h)?.deriv(0.0, 1)?) / (2.0 * h);
    if fxmu.abs() < 1e-9 {
        return Err(Error::Assumption(format!("f_x_mu(0,0) != 0 fails: f_x_mu(0,0) = {fxmu}")));
    }
    Ok(Substitution {
        flip_x: false,
        flip_mu: fxmu < 0.0,
    })
}

/// Solve for `(ν, a, b)` so that the three fixed-point multipliers of the
/// extended form equal those of `f` at `μ > 0`.
pub fn pf_fit(fam: &SmoothFamily, mu: f64) -> Result<PFFit> {
    let sub = check(fam)?;
    if !(mu > 0.0) {
        return Err(Error::MissingFixedPoint(format!("no outer fixed points at mu = {mu} (need mu > 0)")));
    }
    let m = sub.apply(fam).at_exact(&exact(mu)?)?;
    let dev = Deviation::new(&m);
    let w = (20.0 * mu.sqrt()).min(0.5);
    let mut fps = dev.fixed_points(-w, w, 4000);
    fps.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    fps.truncate(3);
    if fps.len() != 3 {
        return Err(Error::FixedPointCount {
            expected: 3,
            found: fps.len(),
        });
    }
    fps.sort_by(f64::total_cmp);
    let k = [dev.kappa(fps[0]), dev.kappa(fps[1]), dev.kappa(fps[2])];
    if k[1] <= 0.0 || k[0] >= 0.0 || k[2] >= 0.0 {
        return Err(Error::Assumption(format!(
            "expected repelling center and attracting outer fixed points, found multipliers {:?}",
            k.map(|v| 1.0 + v)
        )));
    }
    let system = |p: &[f64; 3]| {
        let (l, jl) = outer_point(p[0], p[1], p[2], -1.0)?;
        let (r, jr) = outer_point(p[0], p[1], p[2], 1.0)?;
        Some(([l - k[0], p[0] - k[1], r - k[2]], [jl, [1.0, 0.0, 0.0], jr]))
    };
    let (p, residual, iterations) = damped_newton([k[1], 0.0, 0.0], system, "pitchfork fit")?;
    Ok(PFFit {
        mu,
        nu: p[0],
        a: p[1],
        b: p[2],
        residual,
        points: [fps[0], fps[1], fps[2]],
        multipliers: k.map(|v| 1.0 + v),
        iterations,
        substitution: sub,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::polynomial_family;

    #[test]
    fn truncated_form_fits_itself() {
        let fam = polynomial_family("pf", vec![vec![0.0], vec![1.0, 1.0], vec![0.0], vec![-1.0]]).unwrap();
        let f = pf_fit(&fam, 1e-3).unwrap();
        assert!((f.nu - 1e-3).abs() < 1e-15, "{f:?}");
        assert!(f.a.abs() < 1e-9 && f.b.abs() < 1e-9, "{f:?}");
    }

    #[test]
    fn quadratic_term_is_recovered() {
        // y + mu y + 0.5 mu y^2 - y^3 is itself an extended form with b = 0.5.
        let fam = polynomial_family("pf", vec![vec![0.0], vec![1.0, 1.0], vec![0.0, 0.5], vec![-1.0]]).unwrap();
        let f = pf_fit(&fam, 1e-3).unwrap();
        assert!((f.b - 0.5).abs() < 1e-8 && f.a.abs() < 1e-6, "{f:?}");
        let back = pf_normal_form_multipliers(f.nu, f.a, f.b).unwrap();
        for i in 0..3 {
            assert!((back[i] - f.multipliers[i]).abs() <= f.residual.max(1e-15) * 2.0);
        }
    }

    #[test]
    fn subcritical_rejected() {
        let fam = polynomial_family("pf", vec![vec![0.0], vec![1.0, 1.0], vec![0.0], vec![1.0]]).unwrap();
        assert!(pf_fit(&fam, 1e-3).unwrap_err().to_string().contains("f_xxx"));
    }
}

use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use super::chart::LinearizationChart;
use crate::error::{Error, Result};
use crate::maps::{Endpoint, Interval, Map1D, PiecewiseMap1D};
use crate::numeric::{fmt_f64, invert_monotone};

/// Multipliers must agree to this for a differentiable conjugacy.
pub const MULTIPLIER_MATCH_TOL: f64 = 1e-8;
/// Fraction of the basin width dropped at each end by [`build_conjugacy`].
pub const DEFAULT_COLLAR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Pairing {
    /// `h(x*) = y*` with the Koenigs normalizations (`c = 1`).
    FixedPoints,
    /// `h(x0) = y0`, fixing the scale `c = φ_g(y0) / φ_f(x0)`.
    Marked { x0: f64, y0: f64 },
}

/// What was matched and the resulting scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingInfo {
    pub pairing: Pairing,
    pub x_star: f64,
    pub y_star: f64,
    pub scale: f64,
}

type Evaluator = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Sampled conjugacy `h` with `h ∘ f = g ∘ h`.
#[derive(Clone)]
pub struct ConjugacyTable {
    pub xs: Vec<f64>,
    pub hs: Vec<f64>,
    pub junctions: Vec<usize>,
    pub residual_sup: f64,
    pub pairing: PairingInfo,
    f: Arc<dyn Map1D>,
    g: Arc<dyn Map1D>,
    exact: Option<Evaluator>,
}

impl std::fmt::Debug for ConjugacyTable {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fmt.debug_struct("ConjugacyTable")
            .field("points", &self.xs.len())
            .field("range", &(self.xs.first(), self.xs.last()))
            .field("junctions", &self.junctions)
            .field("residual_sup", &self.residual_sup)
            .field("pairing", &self.pairing)
            .finish()
    }
}

impl ConjugacyTable {
    fn assemble(
        xs: Vec<f64>,
        junctions: Vec<usize>,
        pairing: PairingInfo,
        f: Arc<dyn Map1D>,
        g: Arc<dyn Map1D>,
        exact: Evaluator,
    ) -> Result<Self> {
        let hs = xs.iter().map(|&x| exact(x)).collect::<Result<Vec<_>>>()?;
        let inc = hs.windows(2).all(|w| w[1] > w[0]);
        let dec = hs.windows(2).all(|w| w[1] < w[0]);
        if !(inc || dec) {
            return Err(Error::Invalid("sampled conjugacy is not strictly monotone".into()));
        }
        let mut table = Self {
            xs,
            hs,
            junctions,
            residual_sup: 0.0,
            pairing,
            f,
            g,
            exact: Some(exact),
        };
        table.residual_sup = table.recompute_residual()?;
        Ok(table)
    }

    /// Rebuild a table from stored samples (interpolated evaluation only).
    pub fn from_samples(
        xs: Vec<f64>,
        hs: Vec<f64>,
        pairing: PairingInfo,
        f: Arc<dyn Map1D>,
        g: Arc<dyn Map1D>,
    ) -> Result<Self> {
        if xs.len() != hs.len() || xs.len() < 2 || !xs.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Invalid("samples must be a strictly increasing grid with matching values".into()));
        }
        let mut table = Self {
            xs,
            hs,
            junctions: Vec::new(),
            residual_sup: 0.0,
            pairing,
            f,
            g,
            exact: None,
        };
        table.residual_sup = table.recompute_residual()?;
        Ok(table)
    }

    pub fn lo(&self) -> f64 {
        self.xs[0]
    }

    pub fn hi(&self) -> f64 {
        *self.xs.last().expect("non-empty grid")
    }

    pub fn spacing(&self) -> f64 {
        (self.hi() - self.lo()) / (self.xs.len() - 1) as f64
    }

    pub fn f(&self) -> &Arc<dyn Map1D> {
        &self.f
    }

    pub fn g(&self) -> &Arc<dyn Map1D> {
        &self.g
    }

    /// `h(x)`: the construction itself when available, otherwise monotone
    /// cubic interpolation of the samples.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let slack = 1e-12 * (self.hi() - self.lo());
        if !(x >= self.lo() - slack && x <= self.hi() + slack) {
            return Err(Error::Domain {
                x,
                domain: format!("[{}, {}]", self.lo(), self.hi()),
            });
        }
        match &self.exact {
            Some(h) => h(x),
            None => Ok(pchip(&self.xs, &self.hs, x)),
        }
    }

    /// `max |h(f(x_i)) - g(h(x_i))|` over grid points whose image stays in
    /// the table.
    pub fn recompute_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let n = self.xs.len();
        for i in 1..n - 1 {
            let Ok(fx) = self.f.eval(self.xs[i]) else { continue };
            if !(fx >= self.lo() && fx <= self.hi()) {
                continue;
            }
            let lhs = self.eval(fx)?;
            let rhs = self.g.eval(self.hs[i])?;
            worst = worst.max((lhs - rhs).abs());
        }
        Ok(worst)
    }

    /// Residual restricted to `x` in `window`.
    pub fn residual_on(&self, window: &Interval) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (i, &x) in self.xs.iter().enumerate() {
            if !window.contains(x) {
                continue;
            }
            let Ok(fx) = self.f.eval(x) else { continue };
            if !(fx >= self.lo() && fx <= self.hi()) {
                continue;
            }
            worst = worst.max((self.eval(fx)? - self.g.eval(self.hs[i])?).abs());
        }
        Ok(worst)
    }

    /// `x,h,junction` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,h,junction\n");
        for (i, (x, h)) in self.xs.iter().zip(&self.hs).enumerate() {
            let j = u8::from(self.junctions.contains(&i));
            s.push_str(&format!("{},{},{j}\n", fmt_f64(*x), fmt_f64(*h)));
        }
        s
    }

    pub fn to_json(&self, reports: &[SmoothnessReport]) -> serde_json::Value {
        json!({
            "f": self.f.name(),
            "g": self.g.name(),
            "pairing": self.pairing,
            "residual_sup": self.residual_sup,
            "junctions": self.junctions,
            "smoothness": reports,
            "xs": self.xs,
            "hs": self.hs,
        })
    }
}

/// Fritsch-Carlson monotone cubic interpolation.
fn pchip(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let i = match xs.partition_point(|&t| t <= x) {
        0 => 0,
        k if k >= n => n - 2,
        k => k - 1,
    };
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta = |k: usize| (ys[k + 1] - ys[k]) / h[k];
    let slope = |k: usize| -> f64 {
        if k == 0 {
            return delta(0);
        }
        if k == n - 1 {
            return delta(n - 2);
        }
        let (d0, d1) = (delta(k - 1), delta(k));
        if d0 * d1 <= 0.0 {
            0.0
        } else {
            let (w1, w2) = (2.0 * h[k] + h[k - 1], h[k] + 2.0 * h[k - 1]);
            (w1 + w2) / (w1 / d0 + w2 / d1)
        }
    };
    let t = (x - xs[i]) / h[i];
    let (m0, m1) = (slope(i) * h[i], slope(i + 1) * h[i]);
    let (t2, t3) = (t * t, t * t * t);
    (2.0 * t3 - 3.0 * t2 + 1.0) * ys[i] + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * ys[i + 1] + (t3 - t2) * m1
}

/// Finite part of an interval with a relative collar removed at each end.
fn collared(domain: &Interval, collar: f64, fallback: (f64, f64)) -> Result<Interval> {
    let lo = match domain.lo {
        Endpoint::Infinite => fallback.0,
        e => e.value().expect("finite end"),
    };
    let hi = match domain.hi {
        Endpoint::Infinite => fallback.1,
        e => e.value().expect("finite end"),
    };
    let w = hi - lo;
    Interval::closed(lo + collar * w, hi - collar * w)
}

fn junction_indices(chart: &LinearizationChart, xs: &[f64]) -> Vec<usize> {
    let times: Vec<Option<usize>> = xs.iter().map(|&x| chart.eval_point(x).ok().map(|p| p.entry_time)).collect();
    (1..xs.len()).filter(|&i| times[i] != times[i - 1]).collect()
}

/// `h = φ_g⁻¹ ∘ (c φ_f)` on `grid_n` points of `f`'s chart domain with
/// boundary collars of [`DEFAULT_COLLAR`] of the width.
pub fn build_conjugacy(
    f: &LinearizationChart,
    g: &LinearizationChart,
    pairing: Pairing,
    grid_n: usize,
) -> Result<ConjugacyTable> {
    let x = f.x_star();
    let window = collared(f.domain(), DEFAULT_COLLAR, (x - 1.0, x + 1.0))?;
    build_conjugacy_on(f, g, pairing, &window, grid_n)
}

/// As [`build_conjugacy`] on an explicit finite window inside `f`'s chart.
pub fn build_conjugacy_on(
    f: &LinearizationChart,
    g: &LinearizationChart,
    pairing: Pairing,
    window: &Interval,
    grid_n: usize,
) -> Result<ConjugacyTable> {
    if (f.lambda() - g.lambda()).abs() > MULTIPLIER_MATCH_TOL {
        return Err(Error::MultiplierMismatch {
            left: f.lambda(),
            right: g.lambda(),
        });
    }
    if grid_n < 2 || !window.is_bounded() {
        return Err(Error::Invalid("need a bounded window and at least 2 grid points".into()));
    }
    let scale = match pairing {
        Pairing::FixedPoints => 1.0,
        Pairing::Marked { x0, y0 } => {
            let pf = f.phi(x0)?;
            let pg = g.phi(y0)?;
            if pf == 0.0 || pg == 0.0 {
                if pf == pg {
                    1.0
                } else {
                    return Err(Error::Invalid("a marked point at a fixed point must pair with the other fixed point".into()));
                }
            } else {
                pg / pf
            }
        }
    };
    let info = PairingInfo {
        pairing,
        x_star: f.x_star(),
        y_star: g.x_star(),
        scale,
    };
    let (lo, hi) = (window.lo_value(), window.hi_value());
    let xs: Vec<f64> = (0..grid_n)
        .map(|i| if i + 1 == grid_n { hi } else { lo + (hi - lo) * i as f64 / (grid_n - 1) as f64 })
        .collect();
    let junctions = junction_indices(f, &xs);
    let (fc, gc) = (f.clone(), g.clone());
    let exact: Evaluator = Arc::new(move |x| {
        let p = fc.phi(x)?;
        if p == 0.0 {
            return Ok(gc.x_star());
        }
        gc.phi_inverse(scale * p)
    });
    ConjugacyTable::assemble(xs, junctions, info, f.map().clone(), g.map().clone(), exact)
}

fn branch_inverse(branch: &dyn Map1D, target: f64, span: f64) -> Result<f64> {
    // Grow a bracket [-w, 0] on which the branch is monotone and covers `target`.
    let f = |y: f64| (branch.eval(y).unwrap_or(f64::NAN), branch.deriv(y, 1).unwrap_or(f64::NAN));
    let s0 = f(0.0).1.signum();
    let mut w = span.max(1e-12);
    for _ in 0..80 {
        let (v, d) = f(-w);
        if !(d.signum() == s0 && v.is_finite()) {
            break;
        }
        let (a, b) = if v <= f(0.0).0 { (v, f(0.0).0) } else { (f(0.0).0, v) };
        if target >= a && target <= b {
            return invert_monotone(f, -w, 0.0, target);
        }
        w *= 2.0;
    }
    Err(Error::Inversion { target, lo: -w, hi: 0.0 })
}

/// Extend `h_right` (built with `h(0) = 0` on a window starting at the kink)
/// to negative `x` by `h(x) = g_L⁻¹(h(f_L(x)))`.
///
/// The new grid keeps the spacing of `h_right`, is anchored at 0 and
/// reaches left until `f_L(x)` would leave the right table.
pub fn extend_across_kink(h_right: &ConjugacyTable, f: &PiecewiseMap1D, g: &PiecewiseMap1D) -> Result<ConjugacyTable> {
    let delta = h_right.spacing();
    if h_right.lo().abs() > 1e-12 * delta.max(1.0) {
        return Err(Error::Invalid(format!("right table must start at the kink, starts at {}", h_right.lo())));
    }
    let h0 = h_right.eval(0.0)?;
    if h0.abs() > 1e-12 {
        return Err(Error::Invalid(format!("right table must have h(0) = 0, has {h0}")));
    }
    let (fl, gl) = (f.left().clone(), g.left().clone());
    let (lo_r, hi_r) = (h_right.lo(), h_right.hi());
    let inside = |x: f64| fl.eval_unchecked(x, 0).is_ok_and(|y| y >= lo_r && y <= hi_r);
    let mut k = 0usize;
    while inside(-((k + 1) as f64) * delta) && k < 1_000_000 {
        k += 1;
    }
    if k < 1 {
        return Err(Error::Inversion { target: lo_r, lo: -delta, hi: 0.0 });
    }
    let m = h_right.xs.len() - 1;
    let xs: Vec<f64> = (0..=k + m)
        .map(|i| {
            let j = i as f64 - k as f64;
            if i == k + m {
                hi_r
            } else {
                j * delta
            }
        })
        .collect();
    let right = h_right.clone();
    let span = delta * k as f64;
    let exact: Evaluator = Arc::new(move |x| {
        if x >= 0.0 {
            return right.eval(x);
        }
        let y = right.eval(fl.eval_unchecked(x, 0)?)?;
        branch_inverse(&gl, y, span)
    });
    let mut junctions = vec![k];
    junctions.extend(h_right.junctions.iter().map(|j| j + k));
    let f_arc: Arc<dyn Map1D> = Arc::new(f.clone());
    let g_arc: Arc<dyn Map1D> = Arc::new(g.clone());
    ConjugacyTable::assemble(xs, junctions, h_right.pairing, f_arc, g_arc, exact)
}

/// `f_L'(0) / f_R'(0)`.
pub fn slope_ratio(map: &PiecewiseMap1D) -> Result<f64> {
    let (l, r) = map.kink_slopes()?;
    if l == 0.0 || r == 0.0 {
        return Err(Error::ZeroSlope);
    }
    Ok(l / r)
}

/// One-sided derivative estimates of `h` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub location: f64,
    pub left_deriv: f64,
    pub right_deriv: f64,
    pub match_error: f64,
    pub second_deriv_jump: f64,
    pub residual: f64,
    pub differentiable: bool,
}

/// `match_error` below this counts as a matching first derivative.
pub const SMOOTH_TOL: f64 = 1e-6;

/// One-sided four-point differences of `h` at `location` with the table's
/// grid spacing; at least 8 grid points are needed on each side.
pub fn smoothness_report(table: &ConjugacyTable, location: f64) -> Result<SmoothnessReport> {
    let left = table.xs.iter().filter(|&&x| x < location).count();
    let right = table.xs.iter().filter(|&&x| x > location).count();
    if left < 8 || right < 8 {
        return Err(Error::CoarseGrid {
            location,
            available: left.min(right),
        });
    }
    let d = table.spacing();
    let h = |k: f64| table.eval(location + k * d);
    let (h0, l1, l2, l3) = (h(0.0)?, h(-1.0)?, h(-2.0)?, h(-3.0)?);
    let (r1, r2, r3) = (h(1.0)?, h(2.0)?, h(3.0)?);
    let left_deriv = (11.0 * h0 - 18.0 * l1 + 9.0 * l2 - 2.0 * l3) / (6.0 * d);
    let right_deriv = (-11.0 * h0 + 18.0 * r1 - 9.0 * r2 + 2.0 * r3) / (6.0 * d);
    let left_second = (2.0 * h0 - 5.0 * l1 + 4.0 * l2 - l3) / (d * d);
    let right_second = (2.0 * h0 - 5.0 * r1 + 4.0 * r2 - r3) / (d * d);
    let match_error = (left_deriv - right_deriv).abs() / right_deriv.abs().max(1.0);
    Ok(SmoothnessReport {
        location,
        left_deriv,
        right_deriv,
        match_error,
        second_deriv_jump: (left_second - right_second).abs(),
        residual: table.recompute_residual()?,
        differentiable: match_error < SMOOTH_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearize::{extend_basin, koenigs};
    use crate::maps::{catalog_make_f64, SmoothMap1D};

    fn chart(f: &SmoothMap1D, x: f64, basin: Interval) -> LinearizationChart {
        extend_basin(&koenigs(f, x, 1e-13).unwrap(), &basin).unwrap()
    }

    #[test]
    fn self_conjugacy_is_identity() {
        let f = SmoothMap1D::polynomial("f", &[0.0, 0.5, 1.0]).unwrap();
        let c = chart(&f, 0.0, Interval::open(-0.25, 0.5).unwrap());
        let t = build_conjugacy(&c, &c, Pairing::FixedPoints, 401).unwrap();
        assert!(t.residual_sup < 1e-11);
        for (x, h) in t.xs.iter().zip(&t.hs) {
            assert!((x - h).abs() < 1e-12);
        }
        assert_eq!(t.recompute_residual().unwrap(), t.residual_sup);
    }

    #[test]
    fn conjugacy_to_linearization_is_phi() {
        let f = SmoothMap1D::polynomial("f", &[0.0, 0.5, 1.0]).unwrap();
        let g = SmoothMap1D::linear(0.5).unwrap();
        let cf = chart(&f, 0.0, Interval::open(-0.25, 0.5).unwrap());
        let cg = chart(&g, 0.0, Interval::real_line());
        let t = build_conjugacy(&cf, &cg, Pairing::FixedPoints, 401).unwrap();
        assert!(t.residual_sup < 1e-10);
        for (x, h) in t.xs.iter().zip(&t.hs) {
            assert!((cf.phi(*x).unwrap() - h).abs() < 1e-12 * h.abs().max(1.0));
        }
    }

    #[test]
    fn mismatched_multipliers_refused() {
        let f = SmoothMap1D::linear(0.5).unwrap();
        let g = SmoothMap1D::linear(0.25).unwrap();
        let cf = chart(&f, 0.0, Interval::open(-1.0, 1.0).unwrap());
        let cg = chart(&g, 0.0, Interval::open(-1.0, 1.0).unwrap());
        assert!(matches!(
            build_conjugacy(&cf, &cg, Pairing::FixedPoints, 11),
            Err(Error::MultiplierMismatch { .. })
        ));
    }

    #[test]
    fn slope_ratios() {
        let tent = catalog_make_f64("skew-tent", &[("nu", 1.0), ("s_L", 2.0), ("s_R", 0.5)])
            .unwrap()
            .into_piecewise()
            .unwrap();
        assert_eq!(slope_ratio(&tent).unwrap(), 4.0);
        let smooth = catalog_make_f64("saddle-node", &[("nu", 0.1)]).unwrap().as_piecewise().unwrap();
        assert_eq!(slope_ratio(&smooth).unwrap(), 1.0);
        let flat = catalog_make_f64("skew-tent", &[("nu", 1.0), ("s_L", 0.0), ("s_R", 0.5)])
            .unwrap()
            .into_piecewise()
            .unwrap();
        assert!(matches!(slope_ratio(&flat), Err(Error::ZeroSlope)));
        let quad = catalog_make_f64("skew-tent-quad", &[("nu", 1.0), ("s_L", 3.0), ("s_R", 0.5), ("t", 7.0)])
            .unwrap()
            .into_piecewise()
            .unwrap();
        assert_eq!(slope_ratio(&quad).unwrap(), 6.0);
    }

    #[test]
    fn pchip_is_monotone_and_interpolates() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [0.0, 0.1, 2.0, 2.1];
        assert_eq!(pchip(&xs, &ys, 2.0), 2.0);
        let mut prev = -1.0;
        for i in 0..=300 {
            let v = pchip(&xs, &ys, i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn identity_smoothness() {
        let f = SmoothMap1D::polynomial("f", &[0.0, 0.5, 1.0]).unwrap();
        let c = chart(&f, 0.0, Interval::open(-0.25, 0.5).unwrap());
        let t = build_conjugacy(&c, &c, Pairing::FixedPoints, 401).unwrap();
        let r = smoothness_report(&t, 0.1).unwrap();
        assert!((r.left_deriv - 1.0).abs() < 1e-9 && r.match_error < 1e-9);
        assert!(matches!(smoothness_report(&t, t.lo() + 2.0 * t.spacing()), Err(Error::CoarseGrid { .. })));
    }
}

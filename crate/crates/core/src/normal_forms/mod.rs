//! Extended normal forms fitted by multiplier matching.
//!
//! Fixed points and multipliers are computed from the exact displacement
//! `f(x) - x` and slope deviation `f'(x) - 1`, evaluated without the
//! cancellation that `f(x) - x` and `f'(x) - 1` suffer in floating point.
//! This keeps the fitted higher-order coefficients accurate at small `μ`.

pub mod border;
pub mod pitchfork;
pub mod saddle_node;

use serde::Serialize;

pub use border::{bc_fit, bc_multipliers, bc_normal_form_multipliers, BCFit, BCMultipliers};
pub use pitchfork::{pf_fit, pf_normal_form_multipliers, PFFit};
pub use saddle_node::{sn_fit, sn_multipliers, sn_normal_form_multipliers, SNFit, SNMultipliers};

use crate::algebra::poly::rat_from_f64;
use crate::algebra::{Poly, RationalFn};
use crate::error::{Error, Result};
use crate::maps::{Endpoint, Interval, Map1D, SmoothFamily, SmoothMap1D};
use crate::numeric::{fmt_f64, horner, safeguarded_newton};

/// Sign changes applied so that `∂f/∂μ > 0` and `∂²f/∂x² < 0` at the origin.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Substitution {
    pub flip_x: bool,
    pub flip_mu: bool,
}

/// `-f(-x)` on the mirrored domain.
pub fn flip_x(m: &SmoothMap1D) -> SmoothMap1D {
    let neg: RationalFn = Poly::from_i64s(&[0, -1]).into();
    let f = neg.compose(&m.exact().compose(&neg));
    let mirror = |e: Endpoint| match e {
        Endpoint::Closed(v) => Endpoint::Closed(-v),
        Endpoint::Open(v) => Endpoint::Open(-v),
        Endpoint::Infinite => Endpoint::Infinite,
    };
    let dom = m.domain();
    let domain = Interval::new(mirror(dom.hi), mirror(dom.lo)).expect("mirrored interval");
    SmoothMap1D::new(format!("{}~flip", m.name()), f, domain, m.params().to_vec())
}

impl Substitution {
    /// The family after the substitution.
    pub fn apply(self, fam: &SmoothFamily) -> SmoothFamily {
        let inner = fam.clone();
        crate::maps::Family::new(fam.name().to_string(), move |mu| {
            let mu = if self.flip_mu { -mu.clone() } else { mu.clone() };
            let m = inner.at_exact(&mu)?;
            Ok(if self.flip_x { flip_x(&m) } else { m })
        })
    }
}

/// Float forms of `f(x) - x` and `f'(x) - 1` built from the exact map.
#[derive(Debug, Clone)]
pub(crate) struct Deviation {
    disp: (Vec<f64>, Vec<f64>),
    slope: (Vec<f64>, Vec<f64>),
}

impl Deviation {
    pub(crate) fn new(m: &SmoothMap1D) -> Self {
        let x = RationalFn::x();
        let one = RationalFn::one();
        let d = m.exact() - &x;
        let k = &m.exact().derivative() - &one;
        Self {
            disp: (d.num().to_f64(), d.den().to_f64()),
            slope: (k.num().to_f64(), k.den().to_f64()),
        }
    }

    pub(crate) fn disp(&self, x: f64) -> f64 {
        horner(&self.disp.0, x) / horner(&self.disp.1, x)
    }

    /// `f'(x) - 1`.
    pub(crate) fn kappa(&self, x: f64) -> f64 {
        horner(&self.slope.0, x) / horner(&self.slope.1, x)
    }

    /// Roots of the displacement on `[lo, hi]` from sign changes on a grid.
    pub(crate) fn fixed_points(&self, lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let vs: Vec<f64> = xs.iter().map(|&x| self.disp(x)).collect();
        let mut out = Vec::new();
        for i in 0..n {
            if vs[i] == 0.0 {
                out.push(xs[i]);
                continue;
            }
            if vs[i + 1] != 0.0 && vs[i].signum() != vs[i + 1].signum() && vs[i].is_finite() && vs[i + 1].is_finite() {
                if let Some(r) = safeguarded_newton(|x| (self.disp(x), self.kappa(x)), xs[i], xs[i + 1], 1e-17) {
                    out.push(r);
                }
            }
        }
        if vs[n] == 0.0 {
            out.push(xs[n]);
        }
        out
    }
}

/// Central difference in `μ` of `f(x, μ)` at `μ = 0`.
pub(crate) fn d_mu(fam: &SmoothFamily, x: f64, h: f64) -> Result<f64> {
    let plus = fam.at(h)?.eval(x)?;
    let minus = fam.at(-h)?.eval(x)?;
    Ok((plus - minus) / (2.0 * h))
}

/// Damped Newton on a square system with an analytic Jacobian.
///
/// `system(p)` returns residuals and the Jacobian (row-major). Steps are
/// halved until the residual norm decreases.
pub(crate) fn damped_newton<const N: usize>(
    mut p: [f64; N],
    system: impl Fn(&[f64; N]) -> Option<([f64; N], [[f64; N]; N])>,
    what: &str,
) -> Result<([f64; N], f64, usize)> {
    let norm = |r: &[f64; N]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let fail = |iterations| Error::NoConvergence {
        what: what.to_string(),
        iterations,
    };
    let (mut r, mut jac) = system(&p).ok_or_else(|| fail(0))?;
    for it in 0..100 {
        let rn = norm(&r);
        if rn < 1e-15 {
            return Ok((p, rn, it));
        }
        let step = solve(jac, r).ok_or_else(|| fail(it))?;
        let mut damp = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let mut q = p;
            for k in 0..N {
                q[k] -= damp * step[k];
            }
            if let Some((rq, jq)) = system(&q) {
                if norm(&rq) < rn {
                    accepted = Some((q, rq, jq));
                    break;
                }
            }
            damp *= 0.5;
        }
        match accepted {
            Some((q, rq, jq)) => {
                let moved = (0..N).map(|k| (q[k] - p[k]).abs() / p[k].abs().max(1e-300)).fold(0.0, f64::max);
                p = q;
                r = rq;
                jac = jq;
                if moved < 1e-15 {
                    return Ok((p, norm(&r), it + 1));
                }
            }
            // No decrease: the residual sits at the rounding floor.
            None if rn < 1e-12 => return Ok((p, rn, it)),
            None => return Err(fail(it)),
        }
    }
    Err(fail(100))
}

/// Gaussian elimination with partial pivoting.
fn solve<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for c in 0..N {
        let piv = (c..N).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c] == 0.0 || !a[piv][c].is_finite() {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..N {
            let f = a[r][c] / a[c][c];
            for k in c..N {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; N];
    for r in (0..N).rev() {
        let s: f64 = (r + 1..N).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Value at `μ = 0` of the polynomial in `√μ` through the given samples
/// (Neville's scheme).
pub fn extrapolate_to_zero(mus: &[f64], values: &[f64]) -> Result<f64> {
    if mus.len() != values.len() || mus.is_empty() || mus.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::Invalid("extrapolation needs matching positive samples".into()));
    }
    let s: Vec<f64> = mus.iter().map(|m| m.sqrt()).collect();
    let mut p = values.to_vec();
    let n = p.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (s[i + k] * p[i] - s[i] * p[i + 1]) / (s[i + k] - s[i]);
        }
    }
    Ok(p[0])
}

/// One row of a fit sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub mu: f64,
    /// Fitted parameters by name, in the normal form's order.
    pub params: Vec<(String, f64)>,
    pub residual: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub kind: String,
    pub rows: Vec<SweepRow>,
    /// Largest sampled `μ` up to which every fit succeeded.
    pub valid_up_to: Option<f64>,
}

impl Sweep {
    pub fn new(kind: &str, mut rows: Vec<SweepRow>) -> Self {
        rows.sort_by(|a, b| a.mu.total_cmp(&b.mu));
        let mut valid_up_to = None;
        for r in &rows {
            if r.error.is_some() {
                break;
            }
            valid_up_to = Some(r.mu);
        }
        Self {
            kind: kind.to_string(),
            rows,
            valid_up_to,
        }
    }

    /// Run `fit` at every `μ`; failures are recorded, not propagated.
    pub fn run(kind: &str, mus: &[f64], fit: impl Fn(f64) -> Result<(Vec<(String, f64)>, f64)>) -> Self {
        let rows = mus
            .iter()
            .map(|&mu| match fit(mu) {
                Ok((params, residual)) => SweepRow {
                    mu,
                    params,
                    residual,
                    error: None,
                },
                Err(e) => SweepRow {
                    mu,
                    params: Vec::new(),
                    residual: f64::NAN,
                    error: Some(e.to_string()),
                },
            })
            .collect();
        Self::new(kind, rows)
    }

    pub fn to_csv(&self) -> String {
        let names: Vec<&str> = self
            .rows
            .iter()
            .find(|r| r.error.is_none())
            .map(|r| r.params.iter().map(|(n, _)| n.as_str()).collect())
            .unwrap_or_default();
        let mut s = format!("mu,{},residual,error\n", names.join(","));
        for r in &self.rows {
            let vals: Vec<String> = if r.error.is_some() {
                names.iter().map(|_| String::new()).collect()
            } else {
                r.params.iter().map(|(_, v)| fmt_f64(*v)).collect()
            };
            let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
            let res = if r.error.is_some() { String::new() } else { fmt_f64(r.residual) };
            s.push_str(&format!("{},{},{},{}\n", fmt_f64(r.mu), vals.join(","), res, err));
        }
        s
    }
}

/// Convert an `f64` to the exact rational used to instantiate a family.
pub(crate) fn exact(x: f64) -> Result<num_rational::BigRational> {
    rat_from_f64(x).ok_or_else(|| Error::Invalid(format!("{x} is not finite")))
}

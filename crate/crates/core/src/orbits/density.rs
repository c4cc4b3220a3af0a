use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::Map1D;
use crate::numeric::fmt_f64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityHistogram {
    pub bin_edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub sample_count: usize,
    pub seed: u64,
}

impl DensityHistogram {
    /// Histogram of `samples` on `[lo, hi]` with equal-width bins. Samples
    /// outside the range are an error.
    pub fn from_samples(samples: impl IntoIterator<Item = f64>, lo: f64, hi: f64, bins: usize, seed: u64) -> Result<Self> {
        if bins == 0 || !(lo < hi) {
            return Err(Error::Invalid(format!("bad histogram range [{lo}, {hi}] with {bins} bins")));
        }
        let mut counts = vec![0usize; bins];
        let mut n = 0usize;
        for (index, x) in samples.into_iter().enumerate() {
            if !(x >= lo && x <= hi) {
                return Err(Error::Escape { index, x });
            }
            let k = (((x - lo) / (hi - lo)) * bins as f64) as usize;
            counts[k.min(bins - 1)] += 1;
            n += 1;
        }
        if n == 0 {
            return Err(Error::Invalid("no samples".into()));
        }
        let bin_edges = (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect();
        let masses = counts.iter().map(|&c| c as f64 / n as f64).collect();
        Ok(Self {
            bin_edges,
            masses,
            sample_count: n,
            seed,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("bin_lo,bin_hi,mass\n");
        for (i, m) in self.masses.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", fmt_f64(self.bin_edges[i]), fmt_f64(self.bin_edges[i + 1]), fmt_f64(*m)));
        }
        s
    }
}

/// Histogram of `n` iterates after `burn_in`, starting from `x0` nudged by a
/// seeded offset of order `1e-9` of the domain width.
pub fn empirical_density<M: Map1D + ?Sized>(
    map: &M,
    x0: f64,
    n: usize,
    bins: usize,
    burn_in: usize,
    seed: u64,
) -> Result<DensityHistogram> {
    let dom = *map.domain();
    if !dom.is_bounded() {
        return Err(Error::Invalid(format!("density needs a bounded domain, got {dom}")));
    }
    if bins == 0 || n < bins * 100 {
        return Err(Error::Parameter {
            name: "n".into(),
            reason: format!("need at least 100 samples per bin ({} for {bins} bins)", bins * 100),
        });
    }
    if !dom.contains_interior(x0) {
        return Err(Error::Domain {
            x: x0,
            domain: dom.to_string(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: f64 = rng.gen_range(-1.0..1.0) * 1e-9 * dom.width();
    let mut x = dom.clamp(x0 + offset);
    let mut index = 0usize;
    let mut step = |x: f64| -> Result<f64> {
        index += 1;
        match map.eval(x) {
            Ok(y) if dom.contains(y) => Ok(y),
            Ok(y) => Err(Error::Escape { index, x: y }),
            Err(_) => Err(Error::Escape { index, x }),
        }
    };
    for _ in 0..burn_in {
        x = step(x)?;
    }
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        x = step(x)?;
        samples.push(dom.clamp(x));
    }
    DensityHistogram::from_samples(samples, dom.lo_value(), dom.hi_value(), bins, seed)
}

/// Complete elliptic integral of the first kind `K(m)` (parameter
/// convention) by the arithmetic-geometric mean.
pub fn elliptic_k(m: f64) -> f64 {
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    std::f64::consts::PI / (2.0 * a)
}

/// Carlson's symmetric integral `R_F(x, y, z)`.
fn carlson_rf(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    for _ in 0..100 {
        let mu = (x + y + z) / 3.0;
        let dev = [(mu - x).abs(), (mu - y).abs(), (mu - z).abs()]
            .into_iter()
            .fold(0.0, f64::max)
            / mu;
        if dev < 1e-4 {
            let (ex, ey, ez) = (1.0 - x / mu, 1.0 - y / mu, 1.0 - z / mu);
            let e2 = ex * ey - ez * ez;
            let e3 = ex * ey * ez;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / mu.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sy * sz + sz * sx;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
    }
    1.0 / ((x + y + z) / 3.0).sqrt()
}

/// Incomplete elliptic integral `F(φ | m)`, for `0 <= φ <= π/2`.
pub fn elliptic_f(phi: f64, m: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    s * carlson_rf(c * c, 1.0 - m * s * s, 1.0)
}

/// Invariant density `1 / (2 K(l) sqrt(x (1 - x) (1 - l x)))` of the
/// Katsura-Fukuda map.
pub fn kf_density(l: f64, x: f64) -> f64 {
    1.0 / (2.0 * elliptic_k(l) * (x * (1.0 - x) * (1.0 - l * x)).sqrt())
}

/// Invariant mass of `[a, b] ⊂ [0, 1]`; with `x = sin^2 θ` it is
/// `(F(θ_b | l) - F(θ_a | l)) / K(l)`.
pub fn kf_mass(l: f64, a: f64, b: f64) -> f64 {
    let theta = |x: f64| x.clamp(0.0, 1.0).sqrt().asin();
    (elliptic_f(theta(b), l) - elliptic_f(theta(a), l)) / elliptic_k(l)
}

//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use conjugacy::algebra::poly::ratio;
use conjugacy::algebra::{verify_lemma_suite, LemmaFamily};
use conjugacy::linearize::*;
use conjugacy::maps::*;
use conjugacy::normal_forms::*;
use conjugacy::orbits::*;
use num_rational::BigRational;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e < limit, format!("took {e:?}, limit {limit:?}"))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Every chart built below, for the Schröder check.
#[derive(Default)]
struct Charts(Vec<(String, LinearizationChart)>);

impl Charts {
    fn build(&mut self, label: &str, m: &SmoothMap1D, x: f64, lo: f64, hi: f64) -> Result<LinearizationChart, String> {
        let c = koenigs(m, x, 1e-13).map_err(err)?;
        let c = extend_basin(&c, &Interval::open(lo, hi).map_err(err)?).map_err(err)?;
        self.0.push((label.to_string(), c.clone()));
        Ok(c)
    }
}

fn fixed(m: &SmoothMap1D, lo: f64, hi: f64) -> Result<Vec<f64>, String> {
    let pts = find_fixed_points(m, &Interval::closed(lo, hi).map_err(err)?, 20000).map_err(err)?;
    Ok(pts.into_iter().map(|p| p.x_star).collect())
}

fn c1_identities() -> Check {
    let t = Instant::now();
    let mut rows = 0;
    for fam in LemmaFamily::ALL {
        let rep = verify_lemma_suite(fam, &fam.default_samples());
        ensure(rep.pass, format!("{fam} failed"))?;
        rows += rep.rows.len();
    }
    let elliptic = LemmaFamily::Elliptic.default_samples();
    ensure(elliptic.len() == 25, "elliptic grid is not 5x5")?;
    let kf: Vec<String> = LemmaFamily::KatsuraFukuda.default_samples().iter().map(|p| p[0].to_string()).collect();
    ensure(kf == ["0", "1/4", "1/2", "3/4", "9/10"], format!("unexpected l samples {kf:?}"))?;
    within(t, Duration::from_secs(10))?;
    Ok(format!("{rows} identities exact in {:?}", t.elapsed()))
}

fn c2_multiplier_law() -> Check {
    let t = Instant::now();
    let cases: Vec<(&str, Vec<(&str, BigRational)>)> = vec![
        ("chebyshev", vec![]),
        ("logistic", vec![]),
        ("katsura-fukuda", vec![("l", ratio(1, 4))]),
        ("katsura-fukuda", vec![("l", ratio(1, 2))]),
        ("elliptic-compact", vec![("a", ratio(1, 1)), ("b", ratio(1, 1))]),
    ];
    let mut checked = 0;
    let mut exempt = 0;
    for (name, ps) in cases {
        let params: BTreeMap<String, BigRational> = ps.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        let (map, h) = law_pair(name, &params).map_err(err)?;
        let rep = verify_multiplier_law(&map, &h, 8).map_err(err)?;
        for r in &rep.rows {
            let on_zero = r.points.iter().any(|&x| h.eval_f64(x).abs() < 1e-10);
            ensure(on_zero == r.exempt, format!("{name} {}: exemption does not match H-zeros", r.itinerary))?;
            if r.exempt {
                ensure(r.period == 1 && (r.multiplier.abs() - 4.0).abs() < 1e-8, format!("{name} exempt {} has λ = {}", r.itinerary, r.multiplier))?;
                exempt += 1;
            } else {
                let rel = (r.multiplier.abs() - 2f64.powi(r.period as i32)).abs() / 2f64.powi(r.period as i32);
                ensure(rel < 1e-8, format!("{name} {}: relative error {rel:e}", r.itinerary))?;
                checked += 1;
            }
        }
        // Full shift: 2^p points of period dividing p, so 71 orbits of
        // minimal period up to 8 are expected.
        ensure(rep.rows.len() == 71, format!("{name}: {} orbits", rep.rows.len()))?;
    }
    within(t, Duration::from_secs(60))?;
    Ok(format!("{checked} orbits within 1e-8, {exempt} exempt fixed points with |λ| = 4, {:?}", t.elapsed()))
}

/// Roots of `f^p(x) - x` on `[-1, 1]` by a sign-change scan and bisection.
fn brute_force_roots(f: &dyn Fn(f64) -> f64, p: usize, n: usize) -> Vec<f64> {
    let g = |x: f64| {
        let mut y = x;
        for _ in 0..p {
            y = f(y);
        }
        y - x
    };
    let xs: Vec<f64> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut roots = Vec::new();
    for i in 0..=n {
        if vals[i] == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if i < n && vals[i + 1] != 0.0 && vals[i].signum() != vals[i + 1].signum() {
            let (mut a, mut b, fa) = (xs[i], xs[i + 1], vals[i]);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if g(m).signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    roots
}

fn c3_orbit_count() -> Check {
    let t2 = catalog_make_f64("chebyshev", &[]).map_err(err)?.into_smooth().map_err(err)?;
    let orbits = find_periodic_orbits_unimodal(&t2, 6).map_err(err)?;
    let f = |x: f64| 1.0 - 2.0 * x * x;
    for p in 1..=6 {
        let mut sym: Vec<f64> = orbits.iter().filter(|o| p % o.period == 0).flat_map(|o| o.points.clone()).collect();
        sym.sort_by(f64::total_cmp);
        let brute = brute_force_roots(&f, p, 200_000);
        ensure(brute.len() == 1 << p, format!("p = {p}: brute force found {} roots", brute.len()))?;
        ensure(sym.len() == 1 << p, format!("p = {p}: pull-back found {} points", sym.len()))?;
        let worst = sym.iter().zip(&brute).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(worst < 1e-8, format!("p = {p}: point sets differ by {worst:e}"))?;
    }
    Ok("2^p points for p = 1..6, point sets agree to 1e-8".into())
}

fn c4_saddle_node() -> Check {
    let t = Instant::now();
    let mus = [1e-2, 1e-3, 1e-4];
    let fam = polynomial_family("sn", vec![vec![0.0, 1.0], vec![1.0], vec![-1.0], vec![1.0]]).map_err(err)?;
    let a: Vec<f64> = mus.iter().map(|&mu| sn_fit(&fam, mu).map(|f| f.a)).collect::<Result<_, _>>().map_err(err)?;
    let a0 = extrapolate_to_zero(&mus, &a).map_err(err)?;
    ensure((a0 - 1.0).abs() < 0.05, format!("a(0) = {a0}"))?;
    let trunc = polynomial_family("sn-truncated", vec![vec![0.0, 1.0], vec![1.0], vec![-1.0]]).map_err(err)?;
    for &mu in &mus {
        let f = sn_fit(&trunc, mu).map_err(err)?;
        ensure((f.nu - mu).abs() < 1e-12 && f.a.abs() < 1e-12, format!("truncated at {mu}: ({}, {})", f.nu, f.a))?;
    }
    within(t, Duration::from_secs(5))?;
    Ok(format!("a(0) = {a0:.6}, truncated form returns (mu, 0), {:?}", t.elapsed()))
}

fn bc_family() -> Result<PiecewiseFamily, String> {
    piecewise_polynomial_family("bc", vec![vec![0.0, 1.0], vec![2.0], vec![1.0]], vec![vec![0.0, 1.0], vec![0.5]]).map_err(err)
}

fn c5_border_collision() -> Check {
    let t = Instant::now();
    let fam = bc_family()?;
    let mus = [1e-2, 1e-3, 1e-4];
    let mut ts = Vec::new();
    for &mu in &mus {
        let f = bc_fit(&fam, mu).map_err(err)?;
        ensure(f.s_r == 0.5, format!("s_R = {} at {mu}", f.s_r))?;
        ensure((f.s_l - 2.0).abs() < 1e-10, format!("s_L = {} at {mu}", f.s_l))?;
        ts.push(f.t);
    }
    let t0 = extrapolate_to_zero(&mus, &ts).map_err(err)?;
    ensure((t0 - 1.0).abs() < 0.05, format!("t(0) = {t0}"))?;
    within(t, Duration::from_secs(5))?;
    Ok(format!("t(0) = {t0:.6}, s_R = 1/2, s_L = 2, {:?}", t.elapsed()))
}

fn c6_conjugacy(charts: &mut Charts) -> Check {
    let mu = 1e-3;
    let fam = polynomial_family("sn", vec![vec![0.0, 1.0], vec![1.0], vec![-1.0], vec![1.0]]).map_err(err)?;
    let fit = sn_fit(&fam, mu).map_err(err)?;
    let f = fam.at(mu).map_err(err)?;
    let g = fit.normal_form().map_err(err)?;
    let (fp, gp) = (fixed(&f, -0.5, 2.0)?, fixed(&g, -0.5, 2.0)?);
    ensure(fp.len() == 3 && gp.len() == 3, format!("fixed points {fp:?} {gp:?}"))?;
    let cf = charts.build("sn f", &f, fp[1], fp[0], fp[2])?;
    let cg = charts.build("sn g", &g, gp[1], gp[0], gp[2])?;
    let collar = 1e-3;
    let window = Interval::closed(fp[0] + collar, fp[2] - collar).map_err(err)?;
    let table = build_conjugacy_on(&cf, &cg, Pairing::FixedPoints, &window, 2001).map_err(err)?;
    ensure(table.residual_sup < 1e-8, format!("residual {:e}", table.residual_sup))?;
    let hx = table.eval(fp[1]).map_err(err)?;
    let lf = f.deriv(fp[1], 1).map_err(err)?;
    let lg = g.deriv(hx, 1).map_err(err)?;
    ensure((lf - lg).abs() < 1e-6, format!("multipliers {lf} vs {lg}"))?;
    Ok(format!("residual {:.2e}, multiplier transport {:.2e}", table.residual_sup, (lf - lg).abs()))
}

fn kink_table(charts: &mut Charts, f: &PiecewiseMap1D, g: &PiecewiseMap1D, mu: f64) -> Result<SmoothnessReport, String> {
    let (fr, gr) = (f.right().clone(), g.right().clone());
    let cf = charts.build("kink f", &fr, fixed(&fr, 1e-12, 0.5)?[0], -0.5, 1.5)?;
    let cg = charts.build("kink g", &gr, fixed(&gr, 1e-12, 0.5)?[0], -0.5, 1.5)?;
    let window = Interval::closed(0.0, 10.0 * mu).map_err(err)?;
    let right = build_conjugacy_on(&cf, &cg, Pairing::Marked { x0: 0.0, y0: 0.0 }, &window, 2001).map_err(err)?;
    let table = extend_across_kink(&right, f, g).map_err(err)?;
    smoothness_report(&table, 0.0).map_err(err)
}

fn c7_kink(charts: &mut Charts) -> Check {
    let mu = 1e-3;
    let mut out = Vec::new();
    // A family with a nonlinear right branch and its fitted normal form.
    let fam = piecewise_polynomial_family(
        "bc",
        vec![vec![0.0, 1.0], vec![2.0], vec![1.0]],
        vec![vec![0.0, 1.0], vec![0.5], vec![0.25]],
    )
    .map_err(err)?;
    for fam in [fam, bc_family()?] {
        let fit = bc_fit(&fam, mu).map_err(err)?;
        let f = fam.at(mu).map_err(err)?;
        let rep = kink_table(charts, &f, &fit.normal_form().map_err(err)?, mu)?;
        ensure(rep.match_error < 1e-6, format!("matched pair: match_error {:e}", rep.match_error))?;
        out.push(format!("{:.1e}", rep.match_error));
        for factor in [1.1, 0.9] {
            let mut off = fit;
            off.s_l *= factor;
            let rep = kink_table(charts, &f, &off.normal_form().map_err(err)?, mu)?;
            ensure(rep.match_error > 0.01, format!("ratio x{factor}: match_error {:e}", rep.match_error))?;
            out.push(format!("{:.3}", rep.match_error));
        }
    }
    Ok(format!("match_error matched / x1.1 / x0.9: {}", out.join(" ")))
}

fn c8_schroder(charts: &mut Charts) -> Check {
    // A few more charts: repelling, negative multiplier, rational map.
    let t2 = catalog_make_f64("chebyshev", &[]).map_err(err)?.into_smooth().map_err(err)?;
    charts.build("chebyshev at 1/2", &t2, 0.5, 0.0, 1.0)?;
    let quad = SmoothMap1D::polynomial("quad", &[0.0, 0.5, 1.0]).map_err(err)?;
    charts.build("x/2 + x^2", &quad, 0.0, -0.25, 0.5)?;
    let flip = SmoothMap1D::polynomial("flip", &[0.0, -0.5, 0.3]).map_err(err)?;
    charts.build("-x/2 + 0.3x^2", &flip, 0.0, -0.8, 0.8)?;
    let sqrt2 = SmoothMap1D::polynomial("expanding", &[0.0, 1.5, 0.2]).map_err(err)?;
    charts.build("1.5x + 0.2x^2", &sqrt2, 0.0, -1.0, 1.0)?;
    ensure(charts.0.len() >= 10, format!("only {} charts", charts.0.len()))?;
    let mut worst: f64 = 0.0;
    for (label, c) in &charts.0 {
        let pts = c.sample_points(400);
        ensure(pts.len() > 100, format!("{label}: only {} sample points", pts.len()))?;
        let r = c.schroder_residual(&pts).map_err(err)?;
        ensure(r < 1e-10, format!("{label}: residual {r:e}"))?;
        worst = worst.max(r);
    }
    Ok(format!("{} charts, worst scaled residual {worst:.2e}", charts.0.len()))
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn c9_density() -> Check {
    let t = Instant::now();
    ensure((elliptic_k(0.0) - PI / 2.0).abs() < 1e-12, format!("K(0) = {}", elliptic_k(0.0)))?;
    let mut worst: f64 = 0.0;
    for l in [0.0, 0.5] {
        let w = |th: f64| 1.0 / (1.0 - l * th.sin().powi(2)).sqrt();
        let k = simpson(w, 0.0, PI / 2.0, 2000);
        ensure((k - elliptic_k(l)).abs() < 1e-12, format!("K({l}) by quadrature {k} vs {}", elliptic_k(l)))?;
        let map = catalog_make_f64("katsura-fukuda", &[("l", l)]).map_err(err)?;
        let hist = empirical_density(&map, 0.123456789, 1_000_000, 50, 1000, 0).map_err(err)?;
        for (i, m) in hist.masses.iter().enumerate() {
            let th = |x: f64| x.sqrt().asin();
            let exact = simpson(w, th(hist.bin_edges[i]), th(hist.bin_edges[i + 1]), 200) / k;
            ensure((exact - kf_mass(l, hist.bin_edges[i], hist.bin_edges[i + 1])).abs() < 1e-10, "kf_mass disagrees with quadrature")?;
            worst = worst.max((m - exact).abs());
        }
    }
    ensure(worst < 5e-3, format!("max bin deviation {worst:e}"))?;
    within(t, Duration::from_secs(30))?;
    Ok(format!("max bin deviation {worst:.2e}, {:?}", t.elapsed()))
}

fn c10_determinism() -> Check {
    let cases = common::cases();
    for case in &cases {
        let (c1, a) = common::run(&case.args);
        let (c2, b) = common::run(&case.args);
        ensure(c1 == c2 && a == b, format!("{} differs between runs", case.name))?;
        let golden = std::fs::read_to_string(common::golden_dir().join(case.name)).map_err(err)?;
        ensure(a == golden, format!("{} differs from its golden file", case.name))?;
    }
    Ok(format!("{} golden cases byte-identical across two runs", cases.len()))
}

fn main() {
    let mut charts = Charts::default();
    let results: Vec<(usize, &str, Check)> = vec![
        (1, "identity suite", c1_identities()),
        (2, "multiplier law", c2_multiplier_law()),
        (3, "orbit-count oracle", c3_orbit_count()),
        (4, "saddle-node fit", c4_saddle_node()),
        (5, "border-collision fit", c5_border_collision()),
        (6, "conjugacy residual", c6_conjugacy(&mut charts)),
        (7, "slope-ratio kink test", c7_kink(&mut charts)),
        (8, "Schroder residual", c8_schroder(&mut charts)),
        (9, "invariant density", c9_density()),
        (10, "determinism", c10_determinism()),
    ];
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(msg) => println!("PASS {n:>2} {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {n:>2} {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

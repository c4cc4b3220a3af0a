//! Argument parsing and dispatch for the `conjugacy` binary.
//!
//! `run` never prints; it returns the text for stdout and the exit code so
//! the same path serves the binary and the tests.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Zero;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use conjugacy::algebra::poly::rat_from_f64;
use conjugacy::algebra::{parse_rational, verify_lemma_suite, LemmaFamily};
use conjugacy::linearize::{
    build_conjugacy_on, extend_across_kink, extend_basin, koenigs_arc, smoothness_report, ConjugacyTable, Pairing,
};
use conjugacy::maps::{catalog, AnyMap, Interval, Map1D, MapSpec};
use conjugacy::normal_forms::{bc_fit, pf_fit, sn_fit, Sweep};
use conjugacy::orbits::{
    empirical_density, find_fixed_points, find_periodic_orbits_unimodal, law_pair, verify_multiplier_law,
};
use conjugacy::Error;

#[derive(Parser, Debug)]
#[command(name = "conjugacy", version, about = "Differentiable conjugacies between one-dimensional maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitKind {
    Sn,
    Pf,
    Bc,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the built-in map families.
    Catalog,
    /// Fixed points with multipliers and stability.
    FixedPoints {
        #[arg(long)]
        map: String,
        #[arg(long)]
        mu: Option<f64>,
        /// Search interval `lo,hi` (defaults to the map's domain).
        #[arg(long)]
        interval: Option<String>,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
    },
    /// Periodic orbits of a unimodal map by inverse-branch pull-back.
    Orbits {
        #[arg(long)]
        map: String,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, default_value_t = 6)]
        pmax: usize,
    },
    /// Check `|λ| = 2^p` on every periodic orbit.
    MultiplierLaw {
        #[arg(long)]
        family: String,
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long, default_value_t = 8)]
        pmax: usize,
    },
    /// Exact check of the functional identity for a family.
    VerifyIdentity {
        #[arg(long)]
        family: String,
        /// `name=value`; omit all to use the default sample grid.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Histogram of a long orbit.
    Density {
        #[arg(long)]
        map: String,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long, default_value_t = 0.123456789)]
        x0: f64,
        #[arg(long, default_value_t = 1000)]
        burn_in: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fit the extended saddle-node form.
    FitSn {
        #[arg(long)]
        map: String,
        #[arg(long)]
        mu: f64,
    },
    /// Fit the extended pitchfork form.
    FitPf {
        #[arg(long)]
        map: String,
        #[arg(long)]
        mu: f64,
    },
    /// Fit the skew tent with a quadratic left branch.
    FitBc {
        #[arg(long)]
        map: String,
        #[arg(long)]
        mu: f64,
    },
    /// Build a conjugacy table from `f` to `g`.
    Conjugacy {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        mu_f: Option<f64>,
        #[arg(long)]
        mu_g: Option<f64>,
        /// Approximate fixed point of `f` (of its right branch with `--kink`);
        /// snapped to the nearest fixed point in the basin.
        #[arg(long)]
        x_star: f64,
        #[arg(long)]
        y_star: f64,
        /// Basin `lo,hi` of `x_star` for `f`.
        #[arg(long)]
        basin_f: String,
        #[arg(long)]
        basin_g: String,
        /// Table window `lo,hi` inside the basin of `f`.
        #[arg(long)]
        window: String,
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        /// Pair `x0` with `y0` instead of the fixed points: `x0,y0`.
        #[arg(long)]
        marked: Option<String>,
        /// Piecewise maps: build on the right branches with `h(0) = 0` and
        /// extend across the kink.
        #[arg(long)]
        kink: bool,
    },
    /// Fit over a grid of `μ` values.
    Sweep {
        #[arg(long, value_enum)]
        kind: FitKind,
        #[arg(long)]
        map: String,
        /// Comma-separated `μ` values.
        #[arg(long)]
        mus: String,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    /// Exit 2: bad arguments or input, or an assumption the input violates.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = std::result::Result<(String, bool), Failure>;

/// Parse `args` (including the program name) and run.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            Outcome { code, stdout, stderr }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok((text, ok)) => Outcome {
            code: if ok { 0 } else { 1 },
            stdout: text,
            stderr: if ok { String::new() } else { "verification failed\n".into() },
        },
        Err(Failure::Input(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    let fmt = |default: Format| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Catalog => catalog_cmd(fmt(Format::Json)),
        Command::FixedPoints { map, mu, interval, grid } => fixed_points_cmd(map, *mu, interval.as_deref(), *grid, fmt(Format::Csv)),
        Command::Orbits { map, mu, pmax } => orbits_cmd(map, *mu, *pmax, fmt(Format::Csv)),
        Command::MultiplierLaw { family, params, pmax } => law_cmd(family, params, *pmax, fmt(Format::Csv)),
        Command::VerifyIdentity { family, params } => identity_cmd(family, params),
        Command::Density {
            map,
            mu,
            n,
            bins,
            x0,
            burn_in,
            seed,
        } => density_cmd(map, *mu, *n, *bins, *x0, *burn_in, *seed, fmt(Format::Csv)),
        Command::FitSn { map, mu } => fit_cmd(FitKind::Sn, map, &[*mu], fmt(Format::Json), true),
        Command::FitPf { map, mu } => fit_cmd(FitKind::Pf, map, &[*mu], fmt(Format::Json), true),
        Command::FitBc { map, mu } => fit_cmd(FitKind::Bc, map, &[*mu], fmt(Format::Json), true),
        Command::Sweep { kind, map, mus } => fit_cmd(*kind, map, &parse_list(mus)?, fmt(Format::Csv), false),
        Command::Conjugacy { .. } => conjugacy_cmd(&cli.command, fmt(Format::Json)),
    }
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn load_spec(arg: &str) -> std::result::Result<MapSpec, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::Input(format!("cannot read map spec {arg}: {e}")))?
    };
    Ok(MapSpec::parse(&text)?)
}

fn load_map(arg: &str, mu: Option<f64>) -> std::result::Result<AnyMap, Failure> {
    let spec = load_spec(arg)?;
    let mu = match mu {
        Some(m) => rat_from_f64(m).ok_or_else(|| Failure::Input(format!("mu = {m} is not finite")))?,
        None if spec.depends_on_mu() => return Err(Failure::Input("map spec depends on mu; pass --mu".into())),
        None => BigRational::zero(),
    };
    Ok(spec.instantiate(&mu)?)
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Failure::Input(format!("bad number `{t}`"))))
        .collect()
}

fn parse_pair(s: &str, what: &str) -> std::result::Result<(f64, f64), Failure> {
    match parse_list(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Failure::Input(format!("{what} must be `lo,hi`"))),
    }
}

fn parse_params(params: &[String]) -> std::result::Result<BTreeMap<String, BigRational>, Failure> {
    params
        .iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Failure::Input(format!("parameter `{p}` must be name=value")))?;
            Ok((k.trim().to_string(), parse_rational(v.trim())?))
        })
        .collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn catalog_cmd(format: Format) -> CmdResult {
    let fams = catalog();
    let text = match format {
        Format::Json => {
            let v: Vec<Value> = fams
                .iter()
                .map(|f| {
                    let params: Vec<Value> = f.params.iter().map(|(n, d)| json!({"name": n, "default": d})).collect();
                    json!({"name": f.name, "kind": f.kind, "formula": f.formula, "domain": f.domain, "params": params})
                })
                .collect();
            to_json(&v)
        }
        Format::Csv => {
            let mut s = String::from("name,kind,domain,params\n");
            for f in &fams {
                let ps: Vec<String> = f
                    .params
                    .iter()
                    .map(|(n, d)| match d {
                        Some(d) => format!("{n}={d}"),
                        None => n.to_string(),
                    })
                    .collect();
                let _ = writeln!(s, "{},{},\"{}\",{}", f.name, f.kind, f.domain, ps.join(";"));
            }
            s
        }
    };
    Ok((text, true))
}

fn fixed_points_cmd(map: &str, mu: Option<f64>, interval: Option<&str>, grid: usize, format: Format) -> CmdResult {
    let m = load_map(map, mu)?;
    let iv = match interval {
        Some(s) => {
            let (lo, hi) = parse_pair(s, "--interval")?;
            Interval::closed(lo, hi)?
        }
        None => *m.domain(),
    };
    let fps = find_fixed_points(&m, &iv, grid)?;
    let text = match format {
        Format::Json => to_json(&fps),
        Format::Csv => {
            let mut s = String::from("x_star,multiplier,stability\n");
            for p in &fps {
                let _ = writeln!(s, "{},{},{}", p.x_star, p.multiplier, p.stability.as_str());
            }
            s
        }
    };
    Ok((text, true))
}

fn orbits_cmd(map: &str, mu: Option<f64>, pmax: usize, format: Format) -> CmdResult {
    let m = load_map(map, mu)?;
    let orbits = find_periodic_orbits_unimodal(&m, pmax)?;
    let text = match format {
        Format::Json => to_json(&orbits),
        Format::Csv => {
            let mut s = String::from("itinerary,period,points,multiplier\n");
            for o in &orbits {
                let pts: Vec<String> = o.points.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(s, "{},{},{},{}", o.itinerary, o.period, pts.join(";"), o.multiplier);
            }
            s
        }
    };
    Ok((text, true))
}

fn law_cmd(family: &str, params: &[String], pmax: usize, format: Format) -> CmdResult {
    let (map, h) = law_pair(family, &parse_params(params)?)?;
    let rep = verify_multiplier_law(&map, &h, pmax)?;
    let text = match format {
        Format::Csv => rep.to_csv(),
        Format::Json => to_json(&rep),
    };
    Ok((text, rep.pass))
}

fn identity_cmd(family: &str, params: &[String]) -> CmdResult {
    let fam: LemmaFamily = family.parse()?;
    let samples = if params.is_empty() {
        fam.default_samples()
    } else {
        let given = parse_params(params)?;
        let row = fam
            .param_names()
            .iter()
            .map(|n| {
                given
                    .get(*n)
                    .cloned()
                    .ok_or_else(|| Failure::Input(format!("{family} needs parameter {n}")))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if let Some(extra) = given.keys().find(|k| !fam.param_names().contains(&k.as_str())) {
            return Err(Failure::Input(format!("{family} has no parameter {extra}")));
        }
        vec![row]
    };
    let rep = verify_lemma_suite(fam, &samples);
    Ok((to_json(&rep), rep.pass))
}

#[allow(clippy::too_many_arguments)]
fn density_cmd(map: &str, mu: Option<f64>, n: usize, bins: usize, x0: f64, burn_in: usize, seed: u64, format: Format) -> CmdResult {
    let m = load_map(map, mu)?;
    let hist = empirical_density(&m, x0, n, bins, burn_in, seed)?;
    let text = match format {
        Format::Csv => hist.to_csv(),
        Format::Json => to_json(&hist),
    };
    Ok((text, true))
}

fn fit_cmd(kind: FitKind, map: &str, mus: &[f64], format: Format, single: bool) -> CmdResult {
    let spec = load_spec(map)?;
    if !spec.depends_on_mu() {
        return Err(Failure::Input("map spec must depend on mu".into()));
    }
    let fam = spec.family();
    if single && format == Format::Json {
        let mu = mus[0];
        let v = match kind {
            FitKind::Sn => serde_json::to_value(sn_fit(&fam.smooth(), mu)?),
            FitKind::Pf => serde_json::to_value(pf_fit(&fam.smooth(), mu)?),
            FitKind::Bc => serde_json::to_value(bc_fit(&fam.piecewise(), mu)?),
        }
        .expect("serializable");
        return Ok((to_json(&v), true));
    }
    let sweep = match kind {
        FitKind::Sn => {
            let f = fam.smooth();
            Sweep::run("sn", mus, |mu| {
                let r = sn_fit(&f, mu)?;
                Ok((vec![("nu".into(), r.nu), ("a".into(), r.a)], r.multiplier_residual))
            })
        }
        FitKind::Pf => {
            let f = fam.smooth();
            Sweep::run("pf", mus, |mu| {
                let r = pf_fit(&f, mu)?;
                Ok((vec![("nu".into(), r.nu), ("a".into(), r.a), ("b".into(), r.b)], r.residual))
            })
        }
        FitKind::Bc => {
            let f = fam.piecewise();
            Sweep::run("bc", mus, |mu| {
                let r = bc_fit(&f, mu)?;
                let res = r.residuals.iter().fold(0.0f64, |m, v| m.max(*v));
                Ok((vec![("s_L".into(), r.s_l), ("s_R".into(), r.s_r), ("t".into(), r.t)], res))
            })
        }
    };
    if single {
        if let Some(e) = &sweep.rows[0].error {
            return Err(Failure::Input(e.clone()));
        }
    }
    let text = match format {
        Format::Csv => sweep.to_csv(),
        Format::Json => to_json(&sweep),
    };
    Ok((text, true))
}

/// The fixed point nearest to `guess` inside the basin.
fn snap(map: &dyn Map1D, guess: f64, basin: (f64, f64)) -> std::result::Result<f64, Failure> {
    let lo = basin.0.max(guess - 1e3);
    let hi = basin.1.min(guess + 1e3);
    find_fixed_points(map, &Interval::closed(lo, hi)?, 4096)?
        .into_iter()
        .map(|p| p.x_star)
        .min_by(|a, b| (a - guess).abs().total_cmp(&(b - guess).abs()))
        .ok_or_else(|| Failure::Input(format!("no fixed point in the basin ({}, {})", basin.0, basin.1)))
}

fn conjugacy_cmd(cmd: &Command, format: Format) -> CmdResult {
    let Command::Conjugacy {
        f,
        g,
        mu_f,
        mu_g,
        x_star,
        y_star,
        basin_f,
        basin_g,
        window,
        grid,
        marked,
        kink,
    } = cmd
    else {
        unreachable!()
    };
    let fm = load_map(f, *mu_f)?;
    let gm = load_map(g, *mu_g)?;
    let (bf, bg, w) = (parse_pair(basin_f, "--basin-f")?, parse_pair(basin_g, "--basin-g")?, parse_pair(window, "--window")?);
    let pairing = match (marked, kink) {
        (_, true) => Pairing::Marked { x0: 0.0, y0: 0.0 },
        (Some(s), false) => {
            let (x0, y0) = parse_pair(s, "--marked")?;
            Pairing::Marked { x0, y0 }
        }
        (None, false) => Pairing::FixedPoints,
    };
    let chart = |m: std::sync::Arc<dyn Map1D>, x: f64, b: (f64, f64)| -> std::result::Result<_, Failure> {
        let c = koenigs_arc(m, x, 1e-13)?;
        Ok(extend_basin(&c, &Interval::open(b.0, b.1)?)?)
    };
    let (ft, gt): (std::sync::Arc<dyn Map1D>, std::sync::Arc<dyn Map1D>) = if *kink {
        let (fp, gp) = (fm.as_piecewise()?, gm.as_piecewise()?);
        (std::sync::Arc::new(fp.right().clone()), std::sync::Arc::new(gp.right().clone()))
    } else {
        (std::sync::Arc::new(fm.clone()), std::sync::Arc::new(gm.clone()))
    };
    let xs = snap(ft.as_ref(), *x_star, bf)?;
    let ys = snap(gt.as_ref(), *y_star, bg)?;
    let cf = chart(ft, xs, bf)?;
    let cg = chart(gt, ys, bg)?;
    let table: ConjugacyTable = build_conjugacy_on(&cf, &cg, pairing, &Interval::closed(w.0, w.1)?, *grid)?;
    let (table, at) = if *kink {
        (extend_across_kink(&table, &fm.as_piecewise()?, &gm.as_piecewise()?)?, 0.0)
    } else {
        (table, xs)
    };
    let reports: Vec<_> = smoothness_report(&table, at).into_iter().collect();
    let ok = !*kink || reports.iter().all(|r| r.differentiable);
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&table.to_json(&reports)).expect("serializable");
            s.push('\n');
            s
        }
    };
    Ok((text, ok))
}

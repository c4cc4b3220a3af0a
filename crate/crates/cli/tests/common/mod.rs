//! Golden-file cases shared by the golden and acceptance tests.

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

pub const SN: &str = r#"{"rational": {"num": ["mu", 1, -1, 1]}}"#;
pub const PF: &str = r#"{"rational": {"num": [0, [1, 1], 0, -1, 0, 1]}}"#;
pub const BC: &str = r#"{"piecewise": {"left": {"rational": {"num": ["mu", 2, 1]}}, "right": {"rational": {"num": ["mu", "1/2", "1/4"]}}}}"#;
pub const BC_BAD: &str = r#"{"piecewise": {"left": {"rational": {"num": ["mu", "1/2"]}}, "right": {"rational": {"num": ["mu", "1/2"]}}}}"#;
pub const BC_FITTED: &str = r#"{"family": "skew-tent-quad", "params": {"nu": "0.001", "s_L": "2.004004008020056", "s_R": "0.501001002005014", "t": "3.0060120300839985"}}"#;

pub struct Case {
    pub name: &'static str,
    pub args: Vec<&'static str>,
    pub code: i32,
}

pub fn cases() -> Vec<Case> {
    let c = |name, args: &[&'static str], code| Case {
        name,
        args: args.to_vec(),
        code,
    };
    vec![
        c("catalog.json", &["catalog"], 0),
        c("catalog.csv", &["catalog", "--format", "csv"], 0),
        c("identity_chebyshev.json", &["verify-identity", "--family", "chebyshev"], 0),
        c("identity_kf.json", &["verify-identity", "--family", "katsura-fukuda"], 0),
        c("identity_elliptic_one.json", &["verify-identity", "--family", "elliptic", "--param", "a=1", "--param", "b=2"], 0),
        c("law_kf.csv", &["multiplier-law", "--family", "katsura-fukuda", "--param", "l=1/2", "--pmax", "8"], 0),
        c("law_chebyshev.json", &["multiplier-law", "--family", "chebyshev", "--pmax", "4", "--format", "json"], 0),
        c("fixed_logistic.csv", &["fixed-points", "--map", r#"{"family": "logistic"}"#], 0),
        c("orbits_chebyshev.csv", &["orbits", "--map", r#"{"family": "chebyshev"}"#, "--pmax", "4"], 0),
        c(
            "density_kf.csv",
            &["density", "--map", r#"{"family": "katsura-fukuda", "params": {"l": "1/2"}}"#, "--n", "100000", "--bins", "20", "--seed", "7"],
            0,
        ),
        c("fit_sn.json", &["fit-sn", "--map", SN, "--mu", "0.001"], 0),
        c("fit_pf.json", &["fit-pf", "--map", PF, "--mu", "0.001"], 0),
        c("fit_bc.json", &["fit-bc", "--map", BC, "--mu", "0.001"], 0),
        c("fit_bc.csv", &["fit-bc", "--map", BC, "--mu", "0.001", "--format", "csv"], 0),
        c("fit_bc_bad.txt", &["fit-bc", "--map", BC_BAD, "--mu", "0.001"], 2),
        c("sweep_sn.csv", &["sweep", "--kind", "sn", "--map", SN, "--mus", "0.0001,0.001,0.01,0.3"], 0),
        c(
            "conjugacy_smooth.json",
            &[
                "conjugacy", "--f", r#"{"rational": {"num": [0, "1/2", 1]}}"#, "--g", r#"{"family": "linear", "params": {"lambda": "1/2"}}"#,
                "--x-star", "0", "--y-star", "0", "--basin-f=-0.25,0.5", "--basin-g=-100,100", "--window=-0.2,0.45", "--grid", "41",
            ],
            0,
        ),
        c(
            "conjugacy_kink.csv",
            &[
                "conjugacy", "--f", BC, "--mu-f", "0.001", "--g", BC_FITTED, "--x-star", "0.002", "--y-star", "0.002",
                "--basin-f=-0.5,1.5", "--basin-g=-0.5,1.5", "--window=0,0.01", "--grid", "201", "--kink", "--format", "csv",
            ],
            0,
        ),
        c("bad_family.txt", &["verify-identity", "--family", "nope"], 2),
    ]
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Run the binary; returns exit code and stdout followed by stderr.
pub fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_conjugacy")).args(args).output().expect("binary runs");
    let mut text = String::from_utf8(out.stdout).expect("utf-8");
    text.push_str(&String::from_utf8(out.stderr).expect("utf-8"));
    (out.status.code().unwrap_or(-1), text)
}

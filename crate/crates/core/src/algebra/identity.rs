//! Exact verification of `H(F(x)) = G(F'(x)) H(x)`.
//!
//! Everything here is decided in exact rational arithmetic; there is no
//! tolerance anywhere in this module.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::Serialize;

use super::families;
use super::poly::{rat, ratio, Poly};
use super::rational_fn::RationalFn;
use crate::error::{Error, Result};

/// `H∘F − G(F′)·H`, canonical.
pub fn identity_defect(f: &RationalFn, h: &RationalFn, g: &Poly) -> RationalFn {
    let lhs = h.compose(f);
    let g_of_slope = RationalFn::from_poly(g.clone()).compose(&f.derivative());
    &lhs - &(&g_of_slope * h)
}

/// True iff the defect is the zero rational function.
pub fn verify_functional_identity(f: &RationalFn, h: &RationalFn, g: &Poly) -> bool {
    identity_defect(f, h, g).is_zero()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaFamily {
    Elliptic,
    Chebyshev,
    KatsuraFukuda,
    Logistic,
}

impl LemmaFamily {
    pub const ALL: [LemmaFamily; 4] = [
        LemmaFamily::Elliptic,
        LemmaFamily::Chebyshev,
        LemmaFamily::KatsuraFukuda,
        LemmaFamily::Logistic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaFamily::Elliptic => "elliptic",
            LemmaFamily::Chebyshev => "chebyshev",
            LemmaFamily::KatsuraFukuda => "katsura-fukuda",
            LemmaFamily::Logistic => "logistic",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            LemmaFamily::Elliptic => &["a", "b"],
            LemmaFamily::KatsuraFukuda => &["l"],
            LemmaFamily::Chebyshev | LemmaFamily::Logistic => &[],
        }
    }

    /// The map and its weight function for one parameter tuple.
    pub fn pair(self, params: &[BigRational]) -> Result<(RationalFn, RationalFn)> {
        let want = self.param_names().len();
        if params.len() != want {
            return Err(Error::Invalid(format!(
                "{} takes {want} parameter(s), got {}",
                self.name(),
                params.len()
            )));
        }
        Ok(match self {
            LemmaFamily::Elliptic => (
                families::elliptic(&params[0], &params[1]),
                families::elliptic_weight(&params[0], &params[1]),
            ),
            LemmaFamily::Chebyshev => (families::chebyshev(), families::chebyshev_weight()),
            LemmaFamily::KatsuraFukuda => (
                families::katsura_fukuda(&params[0])?,
                families::katsura_fukuda_weight(&params[0])?,
            ),
            LemmaFamily::Logistic => (families::logistic(), families::logistic_weight()),
        })
    }

    /// Parameter samples used when the caller supplies none.
    pub fn default_samples(self) -> Vec<Vec<BigRational>> {
        match self {
            LemmaFamily::Elliptic => {
                let grid = [-2, -1, 1, 2, 3];
                grid.iter()
                    .flat_map(|&a| grid.iter().map(move |&b| vec![rat(a), rat(b)]))
                    .collect()
            }
            LemmaFamily::KatsuraFukuda => [(0, 1), (1, 4), (1, 2), (3, 4), (9, 10)]
                .iter()
                .map(|&(n, d)| vec![ratio(n, d)])
                .collect(),
            LemmaFamily::Chebyshev | LemmaFamily::Logistic => vec![vec![]],
        }
    }
}

impl fmt::Display for LemmaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LemmaFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaStatus {
    Pass,
    Fail,
    Inadmissible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaRow {
    /// `name=value` pairs, values printed exactly.
    pub params: Vec<String>,
    pub status: LemmaStatus,
    /// Printed defect when the identity fails, or the rejection reason.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Only reported for the elliptic family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub squarefree: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub family: LemmaFamily,
    pub rows: Vec<LemmaRow>,
    pub pass: bool,
}

pub fn verify_lemma_suite(family: LemmaFamily, samples: &[Vec<BigRational>]) -> LemmaReport {
    let g = families::quarter_square();
    let rows: Vec<LemmaRow> = samples
        .iter()
        .map(|params| {
            let labels = family
                .param_names()
                .iter()
                .zip(params)
                .map(|(n, v)| format!("{n}={v}"))
                .collect();
            let squarefree = (family == LemmaFamily::Elliptic && params.len() == 2)
                .then(|| families::elliptic_cubic(&params[0], &params[1]).is_squarefree());
            match family.pair(params) {
                Err(e) => LemmaRow {
                    params: labels,
                    status: LemmaStatus::Inadmissible,
                    note: Some(e.to_string()),
                    squarefree,
                },
                Ok((f, h)) => {
                    let defect = identity_defect(&f, &h, &g);
                    let holds = defect.is_zero();
                    LemmaRow {
                        params: labels,
                        status: if holds { LemmaStatus::Pass } else { LemmaStatus::Fail },
                        note: (!holds).then(|| defect.to_string()),
                        squarefree,
                    }
                }
            }
        })
        .collect();
    let pass = !rows.is_empty() && rows.iter().all(|r| r.status == LemmaStatus::Pass);
    LemmaReport { family, rows, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_unit_parameters() {
        let (f, h) = LemmaFamily::Elliptic.pair(&[rat(1), rat(1)]).unwrap();
        assert!(verify_functional_identity(&f, &h, &families::quarter_square()));
    }

    #[test]
    fn chebyshev_pair_holds_and_doubled_law_fails() {
        let f = families::chebyshev();
        let h = families::chebyshev_weight();
        assert!(verify_functional_identity(&f, &h, &families::quarter_square()));
        let half_square = Poly::new(vec![rat(0), rat(0), ratio(1, 2)]);
        assert!(!verify_functional_identity(&f, &h, &half_square));
    }

    #[test]
    fn default_suites_pass() {
        for family in LemmaFamily::ALL {
            let report = verify_lemma_suite(family, &family.default_samples());
            assert!(report.pass, "{family}: {report:?}");
        }
    }

    #[test]
    fn inadmissible_sample_is_reported_not_fatal() {
        let samples = vec![vec![ratio(1, 2)], vec![rat(2)]];
        let report = verify_lemma_suite(LemmaFamily::KatsuraFukuda, &samples);
        assert_eq!(report.rows[0].status, LemmaStatus::Pass);
        assert_eq!(report.rows[1].status, LemmaStatus::Inadmissible);
        assert!(!report.pass);
    }

    #[test]
    fn singular_cubic_still_satisfies_identity() {
        // a = -3, b = 2: x^3 - 3x + 2 = (x - 1)^2 (x + 2)
        let report = verify_lemma_suite(LemmaFamily::Elliptic, &[vec![rat(-3), rat(2)]]);
        assert_eq!(report.rows[0].squarefree, Some(false));
        assert!(report.pass);
    }
}

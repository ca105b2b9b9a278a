//! Small worked examples whose individual `(s, ell)` terms reduce to
//! hand-derived linear inequalities `a R + b M >= c`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{lb, lb_cutset, lb_term_centralized, lb_term_d2d};
use crate::model::{make_config, min_cache_size};
use crate::{DeliveryMode, Error, ExactConfig, Rational, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "CEN_N3K3")]
    CenN3K3,
    #[serde(rename = "CEN_N2K2")]
    CenN2K2,
    #[serde(rename = "D2D_N3K3")]
    D2dN3K3,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::CenN3K3, Preset::CenN2K2, Preset::D2dN3K3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::CenN3K3 => "CEN_N3K3",
            Preset::CenN2K2 => "CEN_N2K2",
            Preset::D2dN3K3 => "D2D_N3K3",
        }
    }

    fn system(self) -> (usize, usize, DeliveryMode) {
        match self {
            Preset::CenN3K3 => (3, 3, DeliveryMode::Centralized),
            Preset::CenN2K2 => (2, 2, DeliveryMode::Centralized),
            Preset::D2dN3K3 => (3, 3, DeliveryMode::D2D),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown preset {s:?}; expected CEN_N3K3, CEN_N2K2 or D2D_N3K3")))
    }
}

/// Where the checked expression comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    /// A single `(s, ell)` term of the new bound.
    Term { s: usize, ell: usize },
    /// The cut-set term with this `s`.
    Cutset { s: usize },
}

/// `a R + b M >= c`, i.e. `R >= (c - b M) / a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Linear {
    a: i64,
    b: i64,
    c: i64,
}

impl Linear {
    fn rate_at(&self, m: &Rational) -> Rational {
        (Rational::of_i64(self.c) - Rational::of_i64(self.b) * m.clone()) / Rational::of_i64(self.a)
    }
}

impl fmt::Display for Linear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coef = |v: i64| if v == 1 { String::new() } else { v.to_string() };
        write!(f, "{}R+{}M>={}", coef(self.a), coef(self.b), self.c)
    }
}

enum Check {
    Inequality(Linear, &'static [Source]),
    /// The maximized bound takes this value at this `M`.
    Value { m: (i64, i64), value: (i64, i64) },
}

fn checks(preset: Preset) -> Vec<Check> {
    use Source::*;
    let ineq = |a, b, c, sources| Check::Inequality(Linear { a, b, c }, sources);
    match preset {
        Preset::CenN3K3 => vec![
            ineq(3, 6, 8, &[Term { s: 2, ell: 1 }]),
            ineq(4, 2, 5, &[Term { s: 1, ell: 2 }]),
            ineq(1, 3, 3, &[Term { s: 3, ell: 1 }, Cutset { s: 3 }]),
            ineq(3, 1, 3, &[Term { s: 1, ell: 3 }, Cutset { s: 1 }]),
            ineq(1, 2, 2, &[Cutset { s: 2 }]),
        ],
        Preset::CenN2K2 => vec![
            ineq(2, 2, 3, &[Term { s: 1, ell: 1 }]),
            ineq(1, 2, 2, &[Term { s: 2, ell: 1 }, Cutset { s: 2 }]),
            ineq(2, 1, 2, &[Term { s: 1, ell: 2 }, Cutset { s: 1 }]),
        ],
        Preset::D2dN3K3 => vec![
            ineq(1, 6, 8, &[Term { s: 2, ell: 1 }]),
            ineq(8, 6, 15, &[Term { s: 1, ell: 2 }]),
            ineq(2, 1, 3, &[Term { s: 1, ell: 3 }]),
            Check::Value { m: (1, 1), value: (2, 1) },
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub preset: Preset,
    pub identity: String,
    pub passed: bool,
    /// First sampled cache size where the identity failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl IdentityCheck {
    /// `case_study:<preset>:<identity> PASS|FAIL`.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("case_study:{}:{} {status}", self.preset, self.identity)
    }
}

/// Ten evenly spaced cache sizes covering the admissible range.
fn samples(n: usize, k: usize, mode: DeliveryMode) -> Vec<Rational> {
    let lo: Rational = min_cache_size(n, k, mode);
    let hi = Rational::of(n);
    (0..10)
        .map(|i| lo.clone() + (hi.clone() - lo.clone()) * Rational::ratio(i, 9))
        .collect()
}

fn source_value(config: &ExactConfig, source: Source) -> Result<Rational> {
    match (source, config.mode) {
        (Source::Term { s, ell }, DeliveryMode::Centralized) => lb_term_centralized(config, s, ell),
        (Source::Term { s, ell }, DeliveryMode::D2D) => lb_term_d2d(config, s, ell),
        (Source::Cutset { s }, _) => lb_cutset(config)?
            .terms
            .into_iter()
            .find(|t| t.s == s)
            .map(|t| t.raw_value)
            .ok_or_else(|| Error::Domain(format!("no cut-set term with s = {s}"))),
    }
}

fn describe(source: Source) -> String {
    match source {
        Source::Term { s, ell } => format!("term (s={s}, ell={ell})"),
        Source::Cutset { s } => format!("cut-set term s={s}"),
    }
}

pub fn case_study(preset: Preset) -> Vec<IdentityCheck> {
    let (n, k, mode) = preset.system();
    checks(preset)
        .into_iter()
        .map(|check| {
            let (identity, failure) = match check {
                Check::Inequality(linear, sources) => {
                    let failure = samples(n, k, mode).into_iter().find_map(|m| {
                        let config = match make_config(n, k, 1, m.clone(), mode) {
                            Ok(c) => c,
                            Err(e) => return Some(format!("M = {m}: {e}")),
                        };
                        let want = linear.rate_at(&m);
                        sources.iter().find_map(|&src| match source_value(&config, src) {
                            Ok(got) if got == want => None,
                            Ok(got) => Some(format!("M = {m}: {} = {got}, expected {want}", describe(src))),
                            Err(e) => Some(format!("M = {m}: {}: {e}", describe(src))),
                        })
                    });
                    (linear.to_string(), failure)
                }
                Check::Value { m, value } => {
                    let m = Rational::ratio(m.0, m.1);
                    let want = Rational::ratio(value.0, value.1);
                    let failure = match make_config(n, k, 1, m.clone(), mode).and_then(|c| lb(&c)) {
                        Ok(b) if b.value == want => None,
                        Ok(b) => Some(format!("bound at M = {m} is {}, expected {want}", b.value)),
                        Err(e) => Some(e.to_string()),
                    };
                    (format!("R*({m})={want}"), failure)
                }
            };
            IdentityCheck {
                preset,
                identity,
                passed: failure.is_none(),
                detail: failure,
            }
        })
        .collect()
}

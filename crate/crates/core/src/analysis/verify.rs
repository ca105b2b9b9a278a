//! Built-in self-check: worked examples, tight points, simulator agreement,
//! bound ordering, gap guarantees and curve reproducibility.

use serde::{Deserialize, Serialize};

use super::case_study::{case_study, Preset};
use super::curve::curve;
use super::sweep::{sweep, SweepGrid};
use crate::bounds::{lb, rate_ach, EvalMode};
use crate::model::{make_config, random_demands};
use crate::schemes::{corner_config, simulate, PlacementParam};
use crate::{DeliveryMode, Rational, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyLevel {
    /// Case studies and small grids; a few seconds.
    Quick,
    /// The complete grids.
    Full,
}

impl VerifyLevel {
    fn sweep_max(self) -> usize {
        match self {
            VerifyLevel::Quick => 8,
            VerifyLevel::Full => 20,
        }
    }

    fn dominance_max(self) -> usize {
        match self {
            VerifyLevel::Quick => 8,
            VerifyLevel::Full => 12,
        }
    }

    fn sim_max(self) -> usize {
        match self {
            VerifyLevel::Quick => 4,
            VerifyLevel::Full => 6,
        }
    }

    fn sim_demands(self) -> u64 {
        match self {
            VerifyLevel::Quick => 10,
            VerifyLevel::Full => 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, passed: bool, detail: Option<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed,
            detail,
        }
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        match &self.detail {
            Some(d) => format!("{} {status} ({d})", self.name),
            None => format!("{} {status}", self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}

pub fn verify(level: VerifyLevel) -> VerifyReport {
    let mut checks = Vec::new();
    for preset in Preset::ALL {
        for c in case_study(preset) {
            checks.push(CheckOutcome::new(
                format!("case_study:{}:{}", c.preset, c.identity),
                c.passed,
                c.detail,
            ));
        }
    }
    checks.push(outcome("tight_points", check_tight_points(level.sweep_max())));
    checks.push(outcome("simulator", check_simulator(level.sim_max(), 3, level.sim_demands())));
    checks.push(outcome("dominance_sandwich", check_dominance(level.dominance_max())));
    checks.push(outcome("cutset_separation", check_separation()));
    for mode in [DeliveryMode::Centralized, DeliveryMode::D2D] {
        match sweep(&SweepGrid::square(level.sweep_max()), mode) {
            Ok(res) => {
                for (name, status) in &res.summary.theorem_checks {
                    let detail = format!("max gap {} over {} records", res.summary.max_gap, res.summary.records);
                    checks.push(CheckOutcome::new(
                        format!("gap:{mode}:{name}"),
                        status.passed(),
                        Some(detail),
                    ));
                }
            }
            Err(e) => checks.push(CheckOutcome::new(format!("gap:{mode}"), false, Some(e.to_string()))),
        }
    }
    checks.push(outcome("curves", check_curves()));
    VerifyReport { level, checks }
}

fn outcome(name: &str, result: Result<std::result::Result<String, String>>) -> CheckOutcome {
    match result {
        Ok(Ok(summary)) => CheckOutcome::new(name, true, Some(summary)),
        Ok(Err(failure)) => CheckOutcome::new(name, false, Some(failure)),
        Err(e) => CheckOutcome::new(name, false, Some(e.to_string())),
    }
}

/// D2D with one demand is solved exactly at `M = N/K`: both sides equal
/// `min(K - 1, N)`.
pub fn check_tight_points(max: usize) -> Result<std::result::Result<String, String>> {
    let example = make_config(3, 3, 1, Rational::of(1), DeliveryMode::D2D)?;
    if lb(&example)?.value != Rational::of(2) {
        return Ok(Err("lower bound at N=K=3, M=1 differs from 2".into()));
    }
    let mut count = 0;
    for n in 1..=max {
        for k in 1..=max {
            let config = make_config(n, k, 1, Rational::of(n) / Rational::of(k), DeliveryMode::D2D)?;
            let want = Rational::of((k - 1).min(n));
            let bound = lb(&config)?.value;
            let rate = rate_ach(&config, EvalMode::CornerEnvelope)?;
            if bound != want || rate != want {
                return Ok(Err(format!("N={n} K={k}: bound {bound}, rate {rate}, expected {want}")));
            }
            count += 1;
        }
    }
    Ok(Ok(format!("{count} systems")))
}

/// Every corner of every small system: exact rate agreement and bit-exact
/// decoding under `demands` random demand matrices.
pub fn check_simulator(max: usize, max_l: usize, demands: u64) -> Result<std::result::Result<String, String>> {
    let mut runs = 0u64;
    for mode in [DeliveryMode::Centralized, DeliveryMode::D2D] {
        for n in 1..=max {
            for k in 1..=max {
                for l in 1..=max_l.min(n) {
                    for t in 0..=k {
                        let Ok(config) = corner_config(n, k, l, t, mode) else { continue };
                        PlacementParam::new(&config, t)?;
                        let want = rate_ach(&config, EvalMode::FormulaAtM)?;
                        for seed in 0..demands {
                            let d = random_demands(&config, seed);
                            let report = simulate(&config, t, &d, seed)?;
                            if !report.passed() || report.measured_rate != want {
                                return Ok(Err(format!(
                                    "{mode} N={n} K={k} L={l} t={t} seed={seed}: measured {}, formula {want}, decoded {:?}",
                                    report.measured_rate, report.decode_ok
                                )));
                            }
                            runs += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(Ok(format!("{runs} simulations")))
}

/// `cutset <= lower bound <= achievable` on the sweep grid, both modes.
pub fn check_dominance(max: usize) -> Result<std::result::Result<String, String>> {
    let mut total = 0;
    for mode in [DeliveryMode::Centralized, DeliveryMode::D2D] {
        let res = sweep(&SweepGrid::square(max), mode)?;
        if let Some(r) = res
            .records
            .iter()
            .find(|r| !(r.cutset <= r.lower_bound && r.lower_bound <= r.achievable))
        {
            return Ok(Err(format!(
                "{mode} N={} K={} L={} M={}: cutset {}, bound {}, rate {}",
                r.n, r.k, r.l, r.m, r.cutset, r.lower_bound, r.achievable
            )));
        }
        total += res.records.len();
    }
    Ok(Ok(format!("{total} records")))
}

/// The new bound beats the cut-set baseline somewhere for `N = K = 5`,
/// `L in {1, 2}`, in both modes.
pub fn check_separation() -> Result<std::result::Result<String, String>> {
    let mut found = Vec::new();
    for mode in [DeliveryMode::Centralized, DeliveryMode::D2D] {
        for l in [1, 2] {
            let data = curve(5, 5, l, mode, 41)?;
            match data.rows.iter().find(|r| r.lb_new > r.lb_cutset) {
                Some(r) => found.push(format!("{mode} L={l} at M={}", r.m)),
                None => return Ok(Err(format!("{mode} L={l}: never strictly above the cut-set bound"))),
            }
        }
    }
    Ok(Ok(found.join("; ")))
}

/// Curve shape for `N = K = 5`: separation from the cut-set bound, D2D
/// tightness at `M = N/K`, and byte-identical CSV on a second run.
pub fn check_curves() -> Result<std::result::Result<String, String>> {
    for mode in [DeliveryMode::Centralized, DeliveryMode::D2D] {
        for l in [1, 2] {
            let data = curve(5, 5, l, mode, 21)?;
            let csv = data.to_csv();
            if csv != curve(5, 5, l, mode, 21)?.to_csv() {
                return Ok(Err(format!("{mode} L={l}: CSV differs between runs")));
            }
            if !data.rows.iter().any(|r| r.lb_new > r.lb_cutset) {
                return Ok(Err(format!("{mode} L={l}: no strict separation")));
            }
            if mode == DeliveryMode::D2D {
                let row = &data.rows[0];
                if row.lb_new != row.rate_envelope {
                    return Ok(Err(format!(
                        "D2D L={l}: at M={} bound {} but rate {}",
                        row.m, row.lb_new, row.rate_envelope
                    )));
                }
            }
        }
    }
    Ok(Ok("N=K=5, L in {1,2}, both modes".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_verify_passes() {
        let report = verify(VerifyLevel::Quick);
        assert!(report.passed(), "{:?}", report.first_failure());
        assert!(report
            .checks
            .iter()
            .any(|c| c.line() == "case_study:D2D_N3K3:2R+M>=3 PASS"));
    }
}

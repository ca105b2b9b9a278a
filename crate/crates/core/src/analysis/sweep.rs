use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gap::{gap_record, GapRecord};
use super::regime::regime_boundaries;
use crate::model::{make_config, min_cache_size};
use crate::rational::exact_str;
use crate::{DeliveryMode, Rational, Result, Scalar};

/// Demands per user for a sweep axis: a fixed count, or `L = N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DemandCount {
    Fixed(usize),
    AllFiles,
}

impl DemandCount {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            DemandCount::Fixed(l) => l,
            DemandCount::AllFiles => n,
        }
    }
}

impl std::str::FromStr for DemandCount {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("n") {
            return Ok(DemandCount::AllFiles);
        }
        s.parse::<usize>()
            .ok()
            .filter(|&l| l >= 1)
            .map(DemandCount::Fixed)
            .ok_or_else(|| crate::Error::Parse(format!("demand count {s:?} is neither a positive integer nor N")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepGrid {
    pub n: RangeInclusive<usize>,
    pub k: RangeInclusive<usize>,
    pub l: Vec<DemandCount>,
    /// Uniform refinement: `M = N i / density` for `i in [0:density]`.
    pub density: usize,
}

impl SweepGrid {
    /// `N, K` in `[1:max]`, `L in {1, 2, 3, N}`, 20 uniform points.
    pub fn square(max: usize) -> Self {
        SweepGrid {
            n: 1..=max,
            k: 1..=max,
            l: vec![
                DemandCount::Fixed(1),
                DemandCount::Fixed(2),
                DemandCount::Fixed(3),
                DemandCount::AllFiles,
            ],
            density: 20,
        }
    }

    /// Distinct admissible `(N, K, L)` triples, in order.
    pub fn systems(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for n in self.n.clone() {
            for k in self.k.clone() {
                let mut ls: Vec<usize> = self.l.iter().map(|l| l.resolve(n)).filter(|&l| l >= 1 && l <= n).collect();
                ls.sort_unstable();
                ls.dedup();
                out.extend(ls.into_iter().map(|l| (n, k, l)));
            }
        }
        out
    }
}

/// Cache sizes for one system: all corners `Nt/K`, the regime boundaries and
/// the uniform refinement, restricted to the admissible range.
pub fn m_grid(mode: DeliveryMode, n: usize, k: usize, l: usize, density: usize) -> Vec<Rational> {
    let lo: Rational = min_cache_size(n, k, mode);
    let hi = Rational::of(n);
    let corners = (0..=k).map(|t| Rational::of(n * t) / Rational::of(k));
    let uniform = (0..=density.max(1)).map(|i| Rational::of(n * i) / Rational::of(density.max(1)));
    let mut out: Vec<Rational> = corners
        .chain(uniform)
        .chain(regime_boundaries(mode, n, k, l))
        .chain([lo.clone(), hi.clone()])
        .filter(|m| *m >= lo && *m <= hi)
        .collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl CheckStatus {
    fn from_bool(ok: bool) -> Self {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }

    pub fn passed(self) -> bool {
        self != CheckStatus::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgMax {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "M", with = "exact_str")]
    pub m: Rational,
    pub mode: DeliveryMode,
}

impl ArgMax {
    fn of(r: &GapRecord) -> Self {
        ArgMax {
            n: r.n,
            k: r.k,
            l: r.l,
            m: r.m.clone(),
            mode: r.mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    #[serde(with = "exact_str")]
    pub max_gap: Rational,
    pub argmax: Option<ArgMax>,
    /// Largest gap when the closed-form rate is used instead of the envelope.
    #[serde(with = "exact_str")]
    pub max_gap_formula: Rational,
    pub records: usize,
    pub degenerate: usize,
    pub theorem_checks: BTreeMap<String, CheckStatus>,
    /// Records breaking `cutset <= lower_bound <= achievable`.
    pub sandwich_violations: usize,
}

impl SweepSummary {
    pub fn all_passed(&self) -> bool {
        self.theorem_checks.values().all(|s| s.passed())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<GapRecord>,
    pub summary: SweepSummary,
}

/// Records for every system in the grid and every point of its `M` grid, in
/// a fixed order regardless of how many threads ran.
pub fn sweep_records(grid: &SweepGrid, mode: DeliveryMode) -> Result<Vec<GapRecord>> {
    let systems = grid.systems();
    let chunks: Vec<Vec<GapRecord>> = systems
        .par_iter()
        .map(|&(n, k, l)| {
            m_grid(mode, n, k, l, grid.density)
                .into_iter()
                .map(|m| gap_record(&make_config(n, k, l, m, mode)?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut records: Vec<GapRecord> = chunks.into_iter().flatten().collect();
    records.sort_by_key(GapRecord::key);
    Ok(records)
}

pub fn sweep(grid: &SweepGrid, mode: DeliveryMode) -> Result<SweepResult> {
    let records = sweep_records(grid, mode)?;
    let summary = summarize(&records);
    Ok(SweepResult { records, summary })
}

fn max_gap<'a>(records: impl Iterator<Item = &'a GapRecord>) -> Option<(&'a GapRecord, Rational)> {
    records.fold(None, |best, r| match (&r.gap, best) {
        (Some(g), Some((b, bg))) => Some(if *g > bg { (r, g.clone()) } else { (b, bg) }),
        (Some(g), None) => Some((r, g.clone())),
        (None, best) => best,
    })
}

fn threshold_check<'a>(records: impl Iterator<Item = &'a GapRecord>, limit: usize) -> CheckStatus {
    match max_gap(records) {
        None => CheckStatus::NotApplicable,
        Some((_, g)) => CheckStatus::from_bool(g <= Rational::of(limit)),
    }
}

/// Maximum gap, its location, and pass/fail for every gap guarantee that
/// applies to the records.
pub fn summarize(records: &[GapRecord]) -> SweepSummary {
    let best = max_gap(records.iter());
    let max_gap_formula = records
        .iter()
        .filter_map(|r| r.gap_formula.clone())
        .max()
        .unwrap_or_else(|| Rational::of(0));
    let cen = |r: &&GapRecord| r.mode == DeliveryMode::Centralized;
    let d2d = |r: &&GapRecord| r.mode == DeliveryMode::D2D;

    let mut checks = BTreeMap::new();
    checks.insert("cen_L1".to_string(), threshold_check(records.iter().filter(cen).filter(|r| r.l == 1), 8));
    checks.insert("cen_L".to_string(), threshold_check(records.iter().filter(cen), 11));
    checks.insert("d2d_L".to_string(), threshold_check(records.iter().filter(d2d), 10));
    let single: Vec<&GapRecord> = records.iter().filter(d2d).filter(|r| r.l == 1).collect();
    checks.insert(
        "d2d_L1_intervals".to_string(),
        if single.is_empty() {
            CheckStatus::NotApplicable
        } else {
            CheckStatus::from_bool(single.iter().all(|r| match (&r.gap, r.regime.gap_threshold) {
                (Some(g), Some(limit)) => *g <= Rational::of(limit as usize),
                _ => false,
            }))
        },
    );
    let sandwich_violations = records
        .iter()
        .filter(|r| !(r.cutset <= r.lower_bound && r.lower_bound <= r.achievable))
        .count();
    checks.insert(
        "sandwich".to_string(),
        if records.is_empty() {
            CheckStatus::NotApplicable
        } else {
            CheckStatus::from_bool(sandwich_violations == 0)
        },
    );
    let degenerate = records.iter().filter(|r| r.degenerate).count();
    checks.insert(
        "no_degenerate".to_string(),
        if records.is_empty() {
            CheckStatus::NotApplicable
        } else {
            CheckStatus::from_bool(degenerate == 0)
        },
    );

    SweepSummary {
        max_gap: best.as_ref().map(|(_, g)| g.clone()).unwrap_or_else(|| Rational::of(0)),
        argmax: best.map(|(r, _)| ArgMax::of(r)),
        max_gap_formula,
        records: records.len(),
        degenerate,
        theorem_checks: checks,
        sandwich_violations,
    }
}

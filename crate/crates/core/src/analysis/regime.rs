//! Cache-size regimes used by the order-optimality arguments.
//!
//! Each family partitions the admissible range of `M` into consecutive
//! intervals; a boundary value belongs to the lower-indexed interval.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::exact_str;
use crate::{DeliveryMode, ExactConfig, Rational, Scalar};

/// Every numeric constant the classifier uses, named by the role it plays.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeConstants {
    /// Centralized, `L >= 1`: first boundary is this times `max{L, N/K}`.
    pub cen_low_factor: Rational,
    /// Centralized, `L >= 1`: second boundary is this times `N`.
    pub cen_high_fraction: Rational,
    /// Centralized, `L >= 1`: systems with `min{N/L, K}` at most this are
    /// handled without regimes (the gap is bounded by `min{N/L, K} + 1`).
    pub cen_small_system: usize,
    /// Centralized, `L = 1`: first boundary is this times `max{1, N/K}`.
    pub single_low_factor: Rational,
    /// Centralized, `L = 1`: second boundary is this times `N`.
    pub single_high_fraction: Rational,
    /// Centralized, `L = 1`: small-system cutoff on `min{N, K}`.
    pub single_small_system: usize,
    /// D2D, `L >= 1`: low per-device demand when `L` is at most this times `N`.
    pub d2d_demand_split: Rational,
    /// D2D low demand: last boundary is this times `N`.
    pub d2d_high_fraction: Rational,
    /// D2D high demand: single boundary is this times `N`.
    pub d2d_heavy_fraction: Rational,
    /// D2D, `L = 1`: absolute cache-size thresholds, in files.
    pub d2d_single_thresholds: [Rational; 2],
    /// D2D, `L = 1`: gap allowed at `M = N/K` and on each following interval.
    pub d2d_single_gaps: [u32; 4],
}

impl Default for RegimeConstants {
    fn default() -> Self {
        RegimeConstants {
            cen_low_factor: Rational::ratio(51, 40),
            cen_high_fraction: Rational::ratio(1, 5),
            cen_small_system: 10,
            single_low_factor: Rational::ratio(101, 100),
            single_high_fraction: Rational::ratio(1, 8),
            single_small_system: 8,
            d2d_demand_split: Rational::ratio(1, 2),
            d2d_high_fraction: Rational::ratio(1, 5),
            d2d_heavy_fraction: Rational::ratio(1, 3),
            d2d_single_thresholds: [Rational::ratio(2, 3), Rational::of(1)],
            d2d_single_gaps: [1, 3, 6, 8],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeFamily {
    /// Centralized delivery with `L >= 2` demands per user.
    CentralizedMulti,
    /// Centralized delivery with a single demand per user.
    CentralizedSingle,
    /// D2D, `L` at most half the library.
    D2dLowDemand,
    /// D2D, `L` above half the library.
    D2dHighDemand,
    /// D2D with a single demand per device, using absolute thresholds.
    D2dSingle,
}

/// Where a cache size falls, with the interval's endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeLabel {
    pub family: RegimeFamily,
    /// 1-based position of the interval within its family.
    pub index: usize,
    #[serde(with = "exact_str")]
    pub lower: Rational,
    #[serde(with = "exact_str")]
    pub upper: Rational,
    /// Whether `lower` itself belongs to the interval.
    pub lower_closed: bool,
    /// Gap allowed on this interval, where the family assigns one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_threshold: Option<u32>,
    /// The system is small enough that the gap is bounded directly rather
    /// than regime by regime; the label is still reported.
    pub small_system: bool,
    /// How the interval was derived, when it depends on an interpretation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl RegimeLabel {
    pub fn name(&self) -> String {
        match self.family {
            RegimeFamily::D2dSingle => format!("interval {}", self.index),
            _ => format!("regime {}", self.index),
        }
    }

    pub fn contains(&self, m: &Rational) -> bool {
        let above = if self.lower_closed { *m >= self.lower } else { *m > self.lower };
        above && *m <= self.upper
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lower_closed { '[' } else { '(' };
        write!(f, "{} {open}{}, {}]", self.name(), self.lower, self.upper)
    }
}

/// Consecutive intervals `[start, b1], (b1, b2], ...` for the given
/// boundaries, which are clamped to `[start, end]` and made monotone.
fn partition(start: &Rational, end: &Rational, cuts: &[Rational]) -> Vec<(Rational, Rational, bool)> {
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut lo = start.clone();
    for (i, cut) in cuts.iter().chain(std::iter::once(end)).enumerate() {
        let hi = cut.clone().max_with(lo.clone()).min_with(end.clone());
        out.push((lo.clone(), hi.clone(), i == 0));
        lo = hi;
    }
    out
}

fn pick(
    family: RegimeFamily,
    intervals: Vec<(Rational, Rational, bool)>,
    m: &Rational,
    small_system: bool,
) -> RegimeLabel {
    let last = intervals.len();
    let (index, (lower, upper, lower_closed)) = intervals
        .into_iter()
        .enumerate()
        .find(|(i, (lo, hi, closed))| {
            let above = if *closed { m >= lo } else { m > lo };
            (above && m <= hi) || *i + 1 == last
        })
        .expect("partition is nonempty");
    RegimeLabel {
        family,
        index: index + 1,
        lower,
        upper,
        lower_closed,
        gap_threshold: None,
        small_system,
        note: None,
    }
}

/// Classifies `(mode, N, K, L, M)` without validating the configuration, so
/// cache sizes outside the admissible range still get the nearest interval.
pub fn classify_regime(mode: DeliveryMode, n: usize, k: usize, l: usize, m: &Rational) -> RegimeLabel {
    classify_with(&RegimeConstants::default(), mode, n, k, l, m)
}

pub fn classify_with(c: &RegimeConstants, mode: DeliveryMode, n: usize, k: usize, l: usize, m: &Rational) -> RegimeLabel {
    let n_r = Rational::of(n);
    let per_user = Rational::of(n) / Rational::of(k);
    match mode {
        DeliveryMode::Centralized if l == 1 => {
            let low = c.single_low_factor.clone() * per_user.max_with(Rational::of(1));
            let high = c.single_high_fraction.clone() * n_r.clone();
            let small = n.min(k) <= c.single_small_system;
            pick(RegimeFamily::CentralizedSingle, partition(&Rational::of(0), &n_r, &[low, high]), m, small)
        }
        DeliveryMode::Centralized => {
            let low = c.cen_low_factor.clone() * per_user.max_with(Rational::of(l));
            let high = c.cen_high_fraction.clone() * n_r.clone();
            let files_per_demand = Rational::of(n) / Rational::of(l);
            let small = files_per_demand.min_with(Rational::of(k)) <= Rational::of(c.cen_small_system);
            pick(RegimeFamily::CentralizedMulti, partition(&Rational::of(0), &n_r, &[low, high]), m, small)
        }
        DeliveryMode::D2D if l == 1 => classify_d2d_single(c, n, &per_user, m),
        DeliveryMode::D2D => {
            if Rational::of(l) <= c.d2d_demand_split.clone() * n_r.clone() {
                let high = c.d2d_high_fraction.clone() * n_r.clone();
                let cuts = [Rational::of(l), high];
                pick(RegimeFamily::D2dLowDemand, partition(&per_user, &n_r, &cuts), m, false)
            } else {
                let cuts = [c.d2d_heavy_fraction.clone() * n_r.clone()];
                pick(RegimeFamily::D2dHighDemand, partition(&per_user, &n_r, &cuts), m, false)
            }
        }
    }
}

/// Intervals `{N/K}`, `(N/K, 2/3]`, `(2/3, 1]`, `(max{N/K, 1}, N]` with the
/// thresholds read as absolute cache sizes. The middle two are empty unless
/// `N < K`. A cache size below `N/K` (not admissible) is placed by the
/// absolute thresholds alone.
fn classify_d2d_single(c: &RegimeConstants, n: usize, per_user: &Rational, m: &Rational) -> RegimeLabel {
    let [first, second] = &c.d2d_single_thresholds;
    let (index, lower, upper, lower_closed) = if m == per_user {
        (0, per_user.clone(), per_user.clone(), true)
    } else if m <= first {
        (1, per_user.clone(), first.clone(), false)
    } else if m <= second {
        (2, first.clone(), second.clone(), false)
    } else {
        (3, second.clone().max_with(per_user.clone()), Rational::of(n), false)
    };
    RegimeLabel {
        family: RegimeFamily::D2dSingle,
        index: index + 1,
        lower,
        upper,
        lower_closed,
        gap_threshold: Some(c.d2d_single_gaps[index]),
        small_system: false,
        note: Some("thresholds 2/3 and 1 are absolute cache sizes in files".into()),
    }
}

/// Label for a validated configuration.
pub fn regime_classify(config: &ExactConfig) -> RegimeLabel {
    classify_regime(config.mode, config.n(), config.k(), config.l(), config.m())
}

/// Interior boundaries of the family that applies to `(mode, N, K, L)`,
/// restricted to `[lo, N]`.
pub fn regime_boundaries(mode: DeliveryMode, n: usize, k: usize, l: usize) -> Vec<Rational> {
    let c = RegimeConstants::default();
    let n_r = Rational::of(n);
    let per_user = Rational::of(n) / Rational::of(k);
    let (lo, raw): (Rational, Vec<Rational>) = match mode {
        DeliveryMode::Centralized if l == 1 => (
            Rational::of(0),
            vec![
                c.single_low_factor.clone() * per_user.max_with(Rational::of(1)),
                c.single_high_fraction.clone() * n_r.clone(),
            ],
        ),
        DeliveryMode::Centralized => (
            Rational::of(0),
            vec![
                c.cen_low_factor.clone() * per_user.max_with(Rational::of(l)),
                c.cen_high_fraction.clone() * n_r.clone(),
            ],
        ),
        DeliveryMode::D2D if l == 1 => (per_user.clone(), c.d2d_single_thresholds.to_vec()),
        DeliveryMode::D2D => {
            let cuts = if Rational::of(l) <= c.d2d_demand_split.clone() * n_r.clone() {
                vec![Rational::of(l), c.d2d_high_fraction.clone() * n_r.clone()]
            } else {
                vec![c.d2d_heavy_fraction.clone() * n_r.clone()]
            };
            (per_user, cuts)
        }
    };
    let mut out: Vec<Rational> = raw.into_iter().filter(|b| *b >= lo && *b <= n_r).collect();
    out.sort();
    out.dedup();
    out
}

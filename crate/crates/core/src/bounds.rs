//! Achievable rates and lower bounds on the optimal delivery rate.
//!
//! Every function is generic over [`Scalar`]; with [`crate::Rational`] all
//! values are exact. Integer parameters (`N`, `K`, `L`, `s`, `ell`, `mu`)
//! stay integers, so the ceilings inside the bounds never touch the scalar.

use std::fmt::Display;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::rational::{ceil_div, exact_str};
use crate::{DeliveryMode, Error, Result, Scalar, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Memory sharing between the corner points `M = Nt/K`.
    #[default]
    CornerEnvelope,
    /// The closed-form rate evaluated directly at `M`.
    FormulaAtM,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Display",
    deserialize = "T: FromStr, T::Err: Display"
))]
pub struct BoundTerm<T> {
    pub s: usize,
    pub ell: usize,
    pub mu: i64,
    #[serde(rename = "value", with = "exact_str")]
    pub raw_value: T,
}

/// A maximized lower bound together with its maximizer and every term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Display",
    deserialize = "T: FromStr, T::Err: Display"
))]
pub struct BoundResult<T> {
    #[serde(with = "exact_str")]
    pub value: T,
    #[serde(rename = "s")]
    pub best_s: usize,
    #[serde(rename = "ell")]
    pub best_ell: usize,
    #[serde(rename = "mu")]
    pub mu_at_best: i64,
    pub terms: Vec<BoundTerm<T>>,
}

impl<T: Scalar> BoundResult<T> {
    /// Largest term, clamped at zero. Ties keep the earliest term, and terms
    /// are generated in `(s, ell)` order, so the smallest `s` then `ell` wins.
    fn from_terms(terms: Vec<BoundTerm<T>>) -> Self {
        let best = terms.iter().fold(None::<&BoundTerm<T>>, |best, term| match best {
            Some(b) if term.raw_value <= b.raw_value => Some(b),
            _ => Some(term),
        });
        match best {
            Some(b) => BoundResult {
                value: b.raw_value.clone().positive_part(),
                best_s: b.s,
                best_ell: b.ell,
                mu_at_best: b.mu,
                terms: terms.clone(),
            },
            None => BoundResult {
                value: T::zero(),
                best_s: 0,
                best_ell: 0,
                mu_at_best: 0,
                terms,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Display",
    deserialize = "T: FromStr, T::Err: Display"
))]
pub struct EnvelopePoint<T> {
    #[serde(with = "exact_str")]
    pub memory: T,
    #[serde(with = "exact_str")]
    pub rate: T,
}

impl<T> EnvelopePoint<T> {
    pub fn new(memory: T, rate: T) -> Self {
        EnvelopePoint { memory, rate }
    }
}

fn require_mode<T>(config: &SystemConfig<T>, mode: DeliveryMode) -> Result<()> {
    if config.mode == mode {
        Ok(())
    } else {
        Err(Error::ModeMismatch {
            expected: mode.name(),
            actual: config.mode.name(),
        })
    }
}

/// `KL(1 - M/N) min(1/(1 + KM/N), N/(KL))`.
pub fn centralized_rate_formula<T: Scalar>(n: usize, k: usize, l: usize, m: &T) -> T {
    let (n_, k_, l_) = (T::of(n), T::of(k), T::of(l));
    let coded = T::one() / (T::one() + k_.clone() * m.clone() / n_.clone());
    let uncoded = n_.clone() / (k_.clone() * l_.clone());
    k_ * l_ * (T::one() - m.clone() / n_) * coded.min_with(uncoded)
}

/// `min{(LN/M)(1 - M/N), N}`; requires `M > 0`.
pub fn d2d_rate_formula<T: Scalar>(n: usize, l: usize, m: &T) -> T {
    let (n_, l_) = (T::of(n), T::of(l));
    let coded = l_ * n_.clone() / m.clone() * (T::one() - m.clone() / n_.clone());
    coded.min_with(n_)
}

/// Corner points `(Nt/K, R(Nt/K))` for `t in [0:K]`.
pub fn centralized_corners<T: Scalar>(n: usize, k: usize, l: usize) -> Vec<EnvelopePoint<T>> {
    (0..=k)
        .map(|t| {
            let m = T::of(n * t) / T::of(k);
            let r = centralized_rate_formula(n, k, l, &m);
            EnvelopePoint::new(m, r)
        })
        .collect()
}

/// Corner points for `t in [1:K]`; `t = 0` violates `KM >= N`.
pub fn d2d_corners<T: Scalar>(n: usize, k: usize, l: usize) -> Vec<EnvelopePoint<T>> {
    (1..=k)
        .map(|t| {
            let m = T::of(n * t) / T::of(k);
            let r = d2d_rate_formula(n, l, &m);
            EnvelopePoint::new(m, r)
        })
        .collect()
}

pub fn rate_ach_centralized<T: Scalar>(config: &SystemConfig<T>, eval: EvalMode) -> Result<T> {
    require_mode(config, DeliveryMode::Centralized)?;
    let (n, k, l) = (config.n(), config.k(), config.l());
    match eval {
        EvalMode::FormulaAtM => Ok(centralized_rate_formula(n, k, l, config.m())),
        EvalMode::CornerEnvelope => convex_envelope(&centralized_corners(n, k, l), config.m()),
    }
}

pub fn rate_ach_d2d<T: Scalar>(config: &SystemConfig<T>, eval: EvalMode) -> Result<T> {
    require_mode(config, DeliveryMode::D2D)?;
    let (n, k, l) = (config.n(), config.k(), config.l());
    match eval {
        EvalMode::FormulaAtM => Ok(d2d_rate_formula(n, l, config.m())),
        EvalMode::CornerEnvelope => convex_envelope(&d2d_corners(n, k, l), config.m()),
    }
}

/// Achievable rate for whichever mode the config uses.
pub fn rate_ach<T: Scalar>(config: &SystemConfig<T>, eval: EvalMode) -> Result<T> {
    match config.mode {
        DeliveryMode::Centralized => rate_ach_centralized(config, eval),
        DeliveryMode::D2D => rate_ach_d2d(config, eval),
    }
}

/// `mu = min(ceil(N/(L ell)), K) - s`. Negative only when `N < L ell s`, in
/// which case the term it multiplies vanishes.
pub fn mu(n: usize, k: usize, l: usize, s: usize, ell: usize) -> i64 {
    ceil_div(n, l * ell).min(k) as i64 - s as i64
}

fn max_s_centralized(n: usize, k: usize, l: usize) -> usize {
    ceil_div(n, l).min(k)
}

fn max_s_d2d(n: usize, k: usize, l: usize) -> usize {
    ceil_div(n, l).min(k.saturating_sub(1))
}

fn max_ell(n: usize, l: usize, s: usize) -> usize {
    ceil_div(n, l * s)
}

/// `mu (N - L ell s)^+ / (s + mu)`, the correlation penalty shared by both
/// bounds.
fn overlap_penalty<T: Scalar>(n: usize, k: usize, l: usize, s: usize, ell: usize) -> (i64, T) {
    let mu = mu(n, k, l, s, ell);
    let uncovered = n.saturating_sub(l * ell * s);
    // s + mu = min(ceil(N/(L ell)), K) >= 1
    let denom = s as i64 + mu;
    (mu, T::of_i64(mu) * T::of(uncovered) / T::of_i64(denom))
}

fn check_domain(s: usize, ell: usize, s_max: usize, ell_max: usize) -> Result<()> {
    if s == 0 || s > s_max {
        return Err(Error::Domain(format!("s = {s} outside [1:{s_max}]")));
    }
    if ell == 0 || ell > ell_max {
        return Err(Error::Domain(format!("ell = {ell} outside [1:{ell_max}]")));
    }
    Ok(())
}

/// Unchecked centralized term: `(1/ell){N - sM - mu(N - L ell s)^+/(s + mu) - (N - KL ell)^+}`.
fn centralized_term<T: Scalar>(n: usize, k: usize, l: usize, m: &T, s: usize, ell: usize) -> BoundTerm<T> {
    let (mu, penalty) = overlap_penalty::<T>(n, k, l, s, ell);
    let shortfall = n.saturating_sub(k * l * ell);
    let raw = (T::of(n) - T::of(s) * m.clone() - penalty - T::of(shortfall)) / T::of(ell);
    BoundTerm {
        s,
        ell,
        mu,
        raw_value: raw,
    }
}

/// Unchecked D2D term: `{N - sM - mu(N - L ell s)^+/(s + mu)} / (ell (K - s)/K)`.
fn d2d_term<T: Scalar>(n: usize, k: usize, l: usize, m: &T, s: usize, ell: usize) -> BoundTerm<T> {
    let (mu, penalty) = overlap_penalty::<T>(n, k, l, s, ell);
    let numer = T::of(n) - T::of(s) * m.clone() - penalty;
    let denom = T::of(ell) * T::of(k - s) / T::of(k);
    BoundTerm {
        s,
        ell,
        mu,
        raw_value: numer / denom,
    }
}

pub fn lb_term_centralized<T: Scalar>(config: &SystemConfig<T>, s: usize, ell: usize) -> Result<T> {
    require_mode(config, DeliveryMode::Centralized)?;
    let (n, k, l) = (config.n(), config.k(), config.l());
    let s_max = max_s_centralized(n, k, l);
    check_domain(s, ell, s_max, if s >= 1 { max_ell(n, l, s) } else { 0 })?;
    Ok(centralized_term(n, k, l, config.m(), s, ell).raw_value)
}

/// The `(s, ell)`-maximized centralized lower bound.
pub fn lb_centralized<T: Scalar>(config: &SystemConfig<T>) -> Result<BoundResult<T>> {
    require_mode(config, DeliveryMode::Centralized)?;
    let (n, k, l) = (config.n(), config.k(), config.l());
    let m = config.m();
    let terms = (1..=max_s_centralized(n, k, l))
        .flat_map(|s| (1..=max_ell(n, l, s)).map(move |ell| (s, ell)))
        .map(|(s, ell)| centralized_term(n, k, l, m, s, ell))
        .collect();
    Ok(BoundResult::from_terms(terms))
}

/// `s = K` is excluded: the denominator `ell (K - s)/K` vanishes there.
pub fn lb_term_d2d<T: Scalar>(config: &SystemConfig<T>, s: usize, ell: usize) -> Result<T> {
    require_mode(config, DeliveryMode::D2D)?;
    let (n, k, l) = (config.n(), config.k(), config.l());
    let s_max = max_s_d2d(n, k, l);
    check_domain(s, ell, s_max, if s >= 1 { max_ell(n, l, s) } else { 0 })?;
    Ok(d2d_term(n, k, l, config.m(), s, ell).raw_value)
}

pub fn lb_d2d<T: Scalar>(config: &SystemConfig<T>) -> Result<BoundResult<T>> {
    require_mode(config, DeliveryMode::D2D)?;
    let (n, k, l) = (config.n(), config.k(), config.l());
    let m = config.m();
    let terms = (1..=max_s_d2d(n, k, l))
        .flat_map(|s| (1..=max_ell(n, l, s)).map(move |ell| (s, ell)))
        .map(|(s, ell)| d2d_term(n, k, l, m, s, ell))
        .collect();
    Ok(BoundResult::from_terms(terms))
}

/// Lower bound for whichever mode the config uses.
pub fn lb<T: Scalar>(config: &SystemConfig<T>) -> Result<BoundResult<T>> {
    match config.mode {
        DeliveryMode::Centralized => lb_centralized(config),
        DeliveryMode::D2D => lb_d2d(config),
    }
}

/// Cut-set baseline for centralized delivery.
///
/// With `L = 1` this is `max_s s - sM/floor(N/s)` over `s in [1:min(N,K)]`,
/// reported with `ell = floor(N/s)`. With `L > 1` it is the restriction of the
/// new bound to `ell = ceil(N/(Ls))`.
pub fn lb_cutset_centralized<T: Scalar>(config: &SystemConfig<T>) -> Result<BoundResult<T>> {
    require_mode(config, DeliveryMode::Centralized)?;
    let (n, k, l) = (config.n(), config.k(), config.l());
    let m = config.m();
    let terms = if l == 1 {
        (1..=n.min(k))
            .map(|s| {
                let blocks = n / s;
                BoundTerm {
                    s,
                    ell: blocks,
                    mu: 0,
                    raw_value: T::of(s) - T::of(s) * m.clone() / T::of(blocks),
                }
            })
            .collect()
    } else {
        (1..=max_s_centralized(n, k, l))
            .map(|s| centralized_term(n, k, l, m, s, max_ell(n, l, s)))
            .collect()
    };
    Ok(BoundResult::from_terms(terms))
}

/// Cut-set baseline for D2D delivery: the new bound restricted to
/// `ell = ceil(N/(Ls))`.
pub fn lb_cutset_d2d<T: Scalar>(config: &SystemConfig<T>) -> Result<BoundResult<T>> {
    require_mode(config, DeliveryMode::D2D)?;
    let (n, k, l) = (config.n(), config.k(), config.l());
    let m = config.m();
    let terms = (1..=max_s_d2d(n, k, l))
        .map(|s| d2d_term(n, k, l, m, s, max_ell(n, l, s)))
        .collect();
    Ok(BoundResult::from_terms(terms))
}

pub fn lb_cutset<T: Scalar>(config: &SystemConfig<T>) -> Result<BoundResult<T>> {
    match config.mode {
        DeliveryMode::Centralized => lb_cutset_centralized(config),
        DeliveryMode::D2D => lb_cutset_d2d(config),
    }
}

fn cross<T: Scalar>(o: &EnvelopePoint<T>, a: &EnvelopePoint<T>, b: &EnvelopePoint<T>) -> T {
    (a.memory.clone() - o.memory.clone()) * (b.rate.clone() - o.rate.clone())
        - (a.rate.clone() - o.rate.clone()) * (b.memory.clone() - o.memory.clone())
}

/// Vertices of the lower convex hull of points sorted by memory.
pub fn lower_hull<T: Scalar>(points: &[EnvelopePoint<T>]) -> Vec<EnvelopePoint<T>> {
    let mut hull: Vec<EnvelopePoint<T>> = Vec::with_capacity(points.len());
    for p in points {
        if let Some(last) = hull.last() {
            if last.memory == p.memory {
                if p.rate < last.rate {
                    hull.pop();
                } else {
                    continue;
                }
            }
        }
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= T::zero() {
            hull.pop();
        }
        hull.push(p.clone());
    }
    hull
}

/// Piecewise-linear interpolation of the lower convex hull of `points` at `at`.
pub fn convex_envelope<T: Scalar>(points: &[EnvelopePoint<T>], at: &T) -> Result<T> {
    let (first, last) = match (points.first(), points.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::Domain("empty point list".into())),
    };
    if points.windows(2).any(|w| w[1].memory < w[0].memory) {
        return Err(Error::Domain("points must be sorted by memory".into()));
    }
    if *at < first.memory || *at > last.memory {
        return Err(Error::Domain(format!(
            "M = {at} outside [{}, {}]",
            first.memory, last.memory
        )));
    }
    let hull = lower_hull(points);
    for w in hull.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if *at >= a.memory && *at <= b.memory {
            if *at == a.memory {
                return Ok(a.rate.clone());
            }
            if *at == b.memory {
                return Ok(b.rate.clone());
            }
            let frac = (at.clone() - a.memory.clone()) / (b.memory.clone() - a.memory.clone());
            return Ok(a.rate.clone() + frac * (b.rate.clone() - a.rate.clone()));
        }
    }
    // single-point hull
    Ok(hull[0].rate.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_config;
    use crate::Rational;

    fn q(p: i64, d: i64) -> Rational {
        Rational::ratio(p, d)
    }

    fn cen(n: usize, k: usize, l: usize, m: Rational) -> SystemConfig {
        make_config(n, k, l, m, DeliveryMode::Centralized).unwrap()
    }

    fn d2d(n: usize, k: usize, l: usize, m: Rational) -> SystemConfig {
        make_config(n, k, l, m, DeliveryMode::D2D).unwrap()
    }

    #[test]
    fn centralized_rate_examples() {
        let c = cen(5, 5, 1, q(1, 1));
        assert_eq!(rate_ach_centralized(&c, EvalMode::FormulaAtM).unwrap(), q(2, 1));
        let c = cen(3, 3, 2, q(0, 1));
        assert_eq!(rate_ach_centralized(&c, EvalMode::FormulaAtM).unwrap(), q(3, 1));
        assert_eq!(rate_ach_centralized(&c, EvalMode::CornerEnvelope).unwrap(), q(3, 1));
        let c = cen(4, 3, 2, q(4, 1));
        assert_eq!(rate_ach_centralized(&c, EvalMode::FormulaAtM).unwrap(), q(0, 1));
        assert_eq!(rate_ach_centralized(&c, EvalMode::CornerEnvelope).unwrap(), q(0, 1));
    }

    #[test]
    fn d2d_rate_examples() {
        assert_eq!(rate_ach_d2d(&d2d(5, 5, 1, q(1, 1)), EvalMode::FormulaAtM).unwrap(), q(4, 1));
        assert_eq!(rate_ach_d2d(&d2d(3, 3, 2, q(1, 1)), EvalMode::FormulaAtM).unwrap(), q(3, 1));
        assert_eq!(rate_ach_d2d(&d2d(3, 3, 2, q(3, 1)), EvalMode::FormulaAtM).unwrap(), q(0, 1));
        assert_eq!(rate_ach_d2d(&d2d(3, 3, 2, q(3, 1)), EvalMode::CornerEnvelope).unwrap(), q(0, 1));
    }

    #[test]
    fn mode_mismatch() {
        let c = cen(3, 3, 1, q(1, 1));
        assert!(matches!(rate_ach_d2d(&c, EvalMode::FormulaAtM), Err(Error::ModeMismatch { .. })));
        assert!(matches!(rate_ach_centralized(&d2d(3, 3, 1, q(1, 1)), EvalMode::FormulaAtM), Err(Error::ModeMismatch { .. })));
        assert!(lb_d2d(&c).is_err());
    }

    // Terms are affine in M; compare against the closed forms at several M.
    fn assert_affine<F: Fn(&Rational) -> Rational>(term: F, expect: impl Fn(&Rational) -> Rational, ms: &[Rational]) {
        for m in ms {
            assert_eq!(term(m), expect(m), "at M = {m}");
        }
    }

    #[test]
    fn centralized_terms_n3k3() {
        let ms: Vec<_> = (0..10).map(|i| q(3 * i, 10)).collect();
        assert_affine(|m| lb_term_centralized(&cen(3, 3, 1, m.clone()), 2, 1).unwrap(), |m| q(8, 3) - q(2, 1) * m, &ms);
        assert_affine(|m| lb_term_centralized(&cen(3, 3, 1, m.clone()), 1, 2).unwrap(), |m| (q(5, 1) - q(2, 1) * m) / q(4, 1), &ms);
        let ms2: Vec<_> = (0..10).map(|i| q(2 * i, 10)).collect();
        assert_affine(|m| lb_term_centralized(&cen(2, 2, 1, m.clone()), 1, 1).unwrap(), |m| (q(3, 1) - q(2, 1) * m) / q(2, 1), &ms2);
    }

    #[test]
    fn d2d_terms_n3k3() {
        let ms: Vec<_> = (0..10).map(|i| q(10 + 2 * i, 10)).collect();
        assert_affine(|m| lb_term_d2d(&d2d(3, 3, 1, m.clone()), 2, 1).unwrap(), |m| q(8, 1) - q(6, 1) * m, &ms);
        assert_affine(|m| lb_term_d2d(&d2d(3, 3, 1, m.clone()), 1, 2).unwrap(), |m| (q(15, 1) - q(6, 1) * m) / q(8, 1), &ms);
        assert_affine(|m| lb_term_d2d(&d2d(3, 3, 1, m.clone()), 1, 3).unwrap(), |m| (q(3, 1) - m) / q(2, 1), &ms);
    }

    #[test]
    fn term_domains() {
        let c = cen(3, 3, 1, q(1, 1));
        assert!(matches!(lb_term_centralized(&c, 0, 1), Err(Error::Domain(_))));
        assert!(matches!(lb_term_centralized(&c, 4, 1), Err(Error::Domain(_))));
        assert!(matches!(lb_term_centralized(&c, 2, 3), Err(Error::Domain(_))));
        let d = d2d(3, 3, 1, q(1, 1));
        assert!(matches!(lb_term_d2d(&d, 3, 1), Err(Error::Domain(_))));
        assert!(lb_term_d2d(&d, 2, 2).is_ok());
    }

    #[test]
    fn centralized_bound_n3k3_m1() {
        let r = lb_centralized(&cen(3, 3, 1, q(1, 1))).unwrap();
        assert_eq!(r.value, q(3, 4));
        assert_eq!((r.best_s, r.best_ell, r.mu_at_best), (1, 2, 1));
        let find = |s, ell| r.terms.iter().find(|t| t.s == s && t.ell == ell).unwrap().raw_value.clone();
        assert_eq!(find(1, 1), q(2, 3));
        assert_eq!(find(2, 1), q(2, 3));
        assert_eq!(find(1, 3), q(2, 3));
        assert_eq!(find(3, 1), q(0, 1));
    }

    #[test]
    fn centralized_bound_n2k2() {
        let r = lb_centralized(&cen(2, 2, 1, q(1, 2))).unwrap();
        assert_eq!(r.value, q(1, 1));
        assert_eq!((r.best_s, r.best_ell), (1, 1));
    }

    #[test]
    fn bounds_vanish_at_full_storage() {
        for (n, k, l) in [(3, 3, 1), (5, 2, 3), (4, 6, 2), (1, 1, 1)] {
            let m = Rational::of(n);
            assert_eq!(lb_centralized(&cen(n, k, l, m.clone())).unwrap().value, q(0, 1));
            assert_eq!(lb_cutset_centralized(&cen(n, k, l, m.clone())).unwrap().value, q(0, 1));
            assert_eq!(lb_d2d(&d2d(n, k, l, m.clone())).unwrap().value, q(0, 1));
            assert_eq!(lb_cutset_d2d(&d2d(n, k, l, m)).unwrap().value, q(0, 1));
        }
    }

    #[test]
    fn d2d_bound_examples() {
        assert_eq!(lb_d2d(&d2d(3, 3, 1, q(1, 1))).unwrap().value, q(2, 1));
        let r = lb_d2d(&d2d(5, 5, 1, q(1, 1))).unwrap();
        assert_eq!(r.value, q(4, 1));
        assert_eq!(d2d_term::<Rational>(5, 5, 1, &q(1, 1), 4, 1).raw_value, q(4, 1));
    }

    #[test]
    fn single_device_has_empty_domain() {
        let r = lb_d2d(&d2d(2, 1, 1, q(2, 1))).unwrap();
        assert!(r.terms.is_empty());
        assert_eq!(r.value, q(0, 1));
    }

    #[test]
    fn cutset_examples() {
        let r = lb_cutset_centralized(&cen(3, 3, 1, q(1, 1))).unwrap();
        assert_eq!(r.value, q(2, 3));
        assert_eq!(r.best_s, 1);
        for i in 0..10 {
            let m = q(3 * i, 10);
            let r = lb_cutset_centralized(&cen(3, 3, 1, m.clone())).unwrap();
            let expect = [q(1, 1) - m.clone() / q(3, 1), q(2, 1) - q(2, 1) * &m, q(3, 1) - q(3, 1) * &m];
            for (t, e) in r.terms.iter().zip(expect) {
                assert_eq!(t.raw_value, e);
            }
        }
        // s = 1 uses ell = 3: (3 - M)/2; s = 2 uses ell = 2: (3 - 2M)/(2/3)
        let r = lb_cutset_d2d(&d2d(3, 3, 1, q(1, 1))).unwrap();
        assert_eq!(r.terms[0].raw_value, q(1, 1));
        assert_eq!(r.terms[1].raw_value, q(3, 2));
        assert_eq!(r.value, q(3, 2));
        assert_eq!((r.best_s, r.best_ell), (2, 2));
    }

    #[test]
    fn envelope_examples() {
        let pts = vec![EnvelopePoint::new(q(0, 1), q(3, 1)), EnvelopePoint::new(q(3, 1), q(0, 1))];
        assert_eq!(convex_envelope(&pts, &q(1, 1)).unwrap(), q(2, 1));
        assert!(matches!(convex_envelope(&pts, &q(4, 1)), Err(Error::Domain(_))));
        assert!(matches!(convex_envelope(&pts, &q(-1, 1)), Err(Error::Domain(_))));
    }

    #[test]
    fn envelope_hits_vertices() {
        let pts: Vec<_> = [(0, 6), (1, 3), (2, 1), (3, 0)]
            .iter()
            .map(|&(m, r)| EnvelopePoint::new(q(m, 1), q(r, 1)))
            .collect();
        for p in &pts {
            assert_eq!(convex_envelope(&pts, &p.memory).unwrap(), p.rate);
        }
    }

    // Brute-force hull value: minimum over all chords through pairs of points
    // spanning `at` (and the points themselves).
    fn chord_min(points: &[(i64, i64)], at: Rational) -> Rational {
        let mut best: Option<Rational> = None;
        for &(x1, y1) in points {
            for &(x2, y2) in points {
                let (x1q, x2q) = (q(x1, 1), q(x2, 1));
                if x1q <= at && at <= x2q {
                    let v = if x1 == x2 {
                        q(y1.min(y2), 1)
                    } else {
                        q(y1, 1) + (at.clone() - &x1q) / (x2q - &x1q) * q(y2 - y1, 1)
                    };
                    best = Some(match best {
                        Some(b) if b <= v => b,
                        _ => v,
                    });
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn envelope_matches_chord_oracle() {
        let raw = [(0, 4), (1, 3), (2, 1), (4, 0)];
        let pts: Vec<_> = raw.iter().map(|&(m, r)| EnvelopePoint::new(q(m, 1), q(r, 1))).collect();
        // (1,3) lies above the chord from (0,4) to (2,1), which is 5/2 at M = 1
        assert_eq!(chord_min(&raw, q(1, 1)), q(5, 2));
        for i in 0..=16 {
            let at = q(i, 4);
            assert_eq!(convex_envelope(&pts, &at).unwrap(), chord_min(&raw, at.clone()), "at {at}");
        }
    }

    #[test]
    fn float_and_exact_agree() {
        let exact = lb_centralized(&cen(7, 5, 2, q(3, 2))).unwrap();
        let float = lb_centralized(&make_config(7, 5, 2, 1.5f64, DeliveryMode::Centralized).unwrap()).unwrap();
        assert!((exact.value.as_f64() - float.value).abs() < 1e-12);
        assert_eq!((exact.best_s, exact.best_ell), (float.best_s, float.best_ell));
    }

    #[test]
    fn bound_json_round_trip() {
        let r = lb_centralized(&cen(3, 3, 1, q(1, 1))).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with("{\"value\":\"3/4\",\"s\":1,\"ell\":2,\"mu\":1,"), "{json}");
        let back: BoundResult<Rational> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}

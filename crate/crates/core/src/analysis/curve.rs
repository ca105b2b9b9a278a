use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bounds::{lb, lb_cutset, rate_ach, EvalMode};
use crate::model::{make_config, min_cache_size};
use crate::rational::{exact_str, to_csv_string};
use crate::{DeliveryMode, Error, Rational, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    #[serde(rename = "M", with = "exact_str")]
    pub m: Rational,
    #[serde(with = "exact_str")]
    pub lb_new: Rational,
    #[serde(with = "exact_str")]
    pub lb_cutset: Rational,
    #[serde(with = "exact_str")]
    pub rate_envelope: Rational,
    #[serde(with = "exact_str")]
    pub rate_formula: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveData {
    pub mode: DeliveryMode,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub rows: Vec<CurveRow>,
}

pub const CSV_HEADER: &str =
    "M,lb_new,lb_cutset,rate_envelope,rate_formula,M_f64,lb_new_f64,lb_cutset_f64,rate_envelope_f64,rate_formula_f64";

impl CurveData {
    pub fn row_at(&self, m: &Rational) -> Option<&CurveRow> {
        self.rows.iter().find(|r| r.m == *m)
    }

    /// Exact columns followed by their `f64` counterparts (six decimals).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cols = [&r.m, &r.lb_new, &r.lb_cutset, &r.rate_envelope, &r.rate_formula];
            let exact: Vec<String> = cols.iter().map(|v| to_csv_string(v)).collect();
            let float: Vec<String> = cols.iter().map(|v| format!("{:.6}", v.as_f64())).collect();
            let _ = writeln!(out, "{},{}", exact.join(","), float.join(","));
        }
        out
    }
}

/// Bounds on `points` evenly spaced cache sizes from the smallest admissible
/// `M` to `N`, plus every corner point.
pub fn curve(n: usize, k: usize, l: usize, mode: DeliveryMode, points: usize) -> Result<CurveData> {
    if points < 2 {
        return Err(Error::OutOfRange(format!("need at least 2 points, got {points}")));
    }
    let lo: Rational = min_cache_size(n, k, mode);
    let hi = Rational::of(n);
    let first_t = usize::from(mode == DeliveryMode::D2D);
    let mut ms: Vec<Rational> = (0..points)
        .map(|i| lo.clone() + (hi.clone() - lo.clone()) * Rational::ratio(i as i64, points as i64 - 1))
        .chain((first_t..=k).map(|t| Rational::of(n * t) / Rational::of(k)))
        .collect();
    ms.sort();
    ms.dedup();

    let rows = ms
        .into_iter()
        .map(|m| {
            let config = make_config(n, k, l, m.clone(), mode)?;
            Ok(CurveRow {
                lb_new: lb(&config)?.value,
                lb_cutset: lb_cutset(&config)?.value,
                rate_envelope: rate_ach(&config, EvalMode::CornerEnvelope)?,
                rate_formula: rate_ach(&config, EvalMode::FormulaAtM)?,
                m,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CurveData { mode, n, k, l, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centralized_n5k5_separates_from_cutset() {
        let c = curve(5, 5, 1, DeliveryMode::Centralized, 11).unwrap();
        let row = c.row_at(&Rational::of(1)).unwrap();
        assert!(row.lb_new >= row.lb_cutset);
        assert!(c.rows.iter().any(|r| r.lb_new > r.lb_cutset));
    }

    #[test]
    fn d2d_tight_at_n_over_k() {
        let c = curve(5, 5, 1, DeliveryMode::D2D, 11).unwrap();
        let row = c.row_at(&Rational::of(1)).unwrap();
        assert_eq!(row.lb_new, Rational::of(4));
        assert_eq!(row.rate_envelope, Rational::of(4));
        assert_eq!(c.rows[0].m, Rational::of(1));
    }

    #[test]
    fn last_row_is_zero() {
        for mode in [DeliveryMode::Centralized, DeliveryMode::D2D] {
            let c = curve(5, 5, 2, mode, 7).unwrap();
            let last = c.rows.last().unwrap();
            assert_eq!(last.m, Rational::of(5));
            let zero = Rational::of(0);
            assert!([&last.lb_new, &last.lb_cutset, &last.rate_envelope, &last.rate_formula]
                .iter()
                .all(|v| **v == zero));
            assert!(c.rows.windows(2).all(|w| w[0].m < w[1].m));
        }
    }

    #[test]
    fn csv_is_stable() {
        let a = curve(4, 3, 2, DeliveryMode::D2D, 9).unwrap().to_csv();
        let b = curve(4, 3, 2, DeliveryMode::D2D, 9).unwrap().to_csv();
        assert_eq!(a, b);
        let mut lines = a.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert!(lines.all(|l| l.split(',').count() == 10));
    }

    #[test]
    fn too_few_points() {
        assert!(curve(3, 3, 1, DeliveryMode::Centralized, 1).is_err());
    }
}

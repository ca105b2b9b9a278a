use serde::{Deserialize, Serialize};

use super::regime::{regime_classify, RegimeLabel};
use crate::bounds::{lb, lb_cutset, rate_ach, EvalMode};
use crate::rational::exact_str;
use crate::{DeliveryMode, Error, ExactConfig, Rational, Result, Scalar};

mod opt_exact {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        value.as_ref().map(|v| v.to_string()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|text| text.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Both bounds at one configuration and their exact ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub mode: DeliveryMode,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "M", with = "exact_str")]
    pub m: Rational,
    /// Memory-sharing rate over the corner points.
    #[serde(with = "exact_str")]
    pub achievable: Rational,
    /// Closed-form rate evaluated directly at `M`.
    #[serde(with = "exact_str")]
    pub achievable_formula: Rational,
    #[serde(with = "exact_str")]
    pub lower_bound: Rational,
    #[serde(with = "exact_str")]
    pub cutset: Rational,
    /// `achievable / lower_bound`; `None` for degenerate records.
    #[serde(with = "opt_exact")]
    pub gap: Option<Rational>,
    #[serde(with = "opt_exact")]
    pub gap_formula: Option<Rational>,
    /// Positive achievable rate against a zero lower bound.
    pub degenerate: bool,
    pub regime: RegimeLabel,
}

impl GapRecord {
    /// Ordering key used to merge parallel results deterministically.
    pub fn key(&self) -> (u8, usize, usize, usize, Rational) {
        let mode = match self.mode {
            DeliveryMode::Centralized => 0,
            DeliveryMode::D2D => 1,
        };
        (mode, self.n, self.k, self.l, self.m.clone())
    }
}

/// `rate / bound`, with `0/0 = 1` and `None` for a positive rate over zero.
pub fn ratio(rate: &Rational, bound: &Rational) -> Option<Rational> {
    if *bound > Rational::of(0) {
        Some(rate / bound)
    } else if *rate == Rational::of(0) {
        Some(Rational::of(1))
    } else {
        None
    }
}

/// Computes the record, flagging (not rejecting) degenerate points.
pub fn gap_record(config: &ExactConfig) -> Result<GapRecord> {
    let achievable = rate_ach(config, EvalMode::CornerEnvelope)?;
    let achievable_formula = rate_ach(config, EvalMode::FormulaAtM)?;
    let lower_bound = lb(config)?.value;
    let cutset = lb_cutset(config)?.value;
    let gap = ratio(&achievable, &lower_bound);
    let gap_formula = ratio(&achievable_formula, &lower_bound);
    Ok(GapRecord {
        mode: config.mode,
        n: config.n(),
        k: config.k(),
        l: config.l(),
        m: config.m().clone(),
        degenerate: gap.is_none(),
        achievable,
        achievable_formula,
        lower_bound,
        cutset,
        gap,
        gap_formula,
        regime: regime_classify(config),
    })
}

/// Like [`gap_record`] but a zero lower bound under a positive rate is an
/// error.
pub fn gap_at(config: &ExactConfig) -> Result<GapRecord> {
    let record = gap_record(config)?;
    if record.degenerate {
        return Err(Error::Degenerate {
            achievable: record.achievable.to_string(),
        });
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::lb_centralized;
    use crate::model::make_config;

    fn cfg(n: usize, k: usize, l: usize, m: Rational, mode: DeliveryMode) -> ExactConfig {
        make_config(n, k, l, m, mode).unwrap()
    }

    #[test]
    fn d2d_optimal_at_one() {
        let rec = gap_at(&cfg(3, 3, 1, Rational::of(1), DeliveryMode::D2D)).unwrap();
        assert_eq!(rec.gap, Some(Rational::of(1)));
        assert_eq!(rec.lower_bound, Rational::of(2));
    }

    #[test]
    fn full_cache_gap_is_one() {
        for n in 1..=4 {
            for mode in [DeliveryMode::Centralized, DeliveryMode::D2D] {
                let rec = gap_at(&cfg(n, n, 1, Rational::of(n), mode)).unwrap();
                assert_eq!(rec.gap, Some(Rational::of(1)));
                assert_eq!(rec.achievable, Rational::of(0));
            }
        }
    }

    #[test]
    fn centralized_n5k5() {
        let c = cfg(5, 5, 1, Rational::of(1), DeliveryMode::Centralized);
        let rec = gap_at(&c).unwrap();
        let bound = lb_centralized(&c).unwrap().value;
        assert_eq!(rec.gap, Some(Rational::of(2) / bound));
        assert!(rec.gap.unwrap() >= Rational::of(1));
    }

    #[test]
    fn ratio_conventions() {
        let zero = Rational::of(0);
        assert_eq!(ratio(&zero, &zero), Some(Rational::of(1)));
        assert_eq!(ratio(&Rational::of(1), &zero), None);
        assert_eq!(ratio(&Rational::of(3), &Rational::of(2)), Some(Rational::ratio(3, 2)));
    }

    #[test]
    fn record_json_round_trip() {
        let rec = gap_record(&cfg(4, 3, 2, Rational::ratio(4, 3), DeliveryMode::D2D)).unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"M\":\"4/3\""), "{json}");
        let back: GapRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
    }
}

//! Bit-exact placement, delivery and decoding for the repeated
//! coded-multicast schemes.
//!
//! Files are split into `C(K, t)` subfiles indexed by `t`-subsets of users;
//! user `k` caches every subfile whose subset contains `k`. Delivery runs `L`
//! independent rounds, round `j` serving column `j` of the demand matrix. D2D
//! placement further splits each subfile into `t` pieces, one per member of
//! its subset, so that every member of a multicast group can transmit.
//!
//! Both delivery functions emit the cheaper of two strategies, which realizes
//! the `min` in the achievable-rate formulas:
//!
//! * centralized: coded multicast, or a library-wide MDS parity broadcast of
//!   `N (1 - t/K)` files that lets every user rebuild the whole library;
//! * D2D: coded multicast, or a plain broadcast of all `N` files from the
//!   devices' collective caches.

mod centralized;
mod d2d;
mod decode;

use serde::{Deserialize, Serialize};

pub use centralized::{deliver_centralized, place_centralized};
pub use d2d::{check_locality, deliver_d2d, place_d2d};
pub use decode::decode;

use crate::bounds::{centralized_rate_formula, d2d_rate_formula};
use crate::combin::binomial;
use crate::model::{random_demands, Library, Transmission};
use crate::rational::exact_str;
use crate::{DeliveryMode, DemandMatrix, Error, ExactConfig, Rational, Result, Scalar};

/// Placement parameter `t = KM/N`; only integer values are simulable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementParam {
    pub t: usize,
}

impl PlacementParam {
    pub fn from_config(config: &ExactConfig) -> Result<Self> {
        let t = Rational::of(config.k()) * config.m() / Rational::of(config.n());
        if !t.is_integer() {
            return Err(Error::NotCorner {
                m: config.m().to_string(),
            });
        }
        let t = usize::try_from(t.to_integer()).expect("t lies in [0:K]");
        Self::new(config, t)
    }

    /// Checks `t` against the config: `M = Nt/K`, and `t >= 1` for D2D.
    pub fn new(config: &ExactConfig, t: usize) -> Result<Self> {
        if t > config.k() {
            return Err(Error::OutOfRange(format!("t = {t} exceeds K = {}", config.k())));
        }
        if corner_memory(config.n(), config.k(), t) != *config.m() {
            return Err(Error::NotCorner {
                m: config.m().to_string(),
            });
        }
        if config.mode == DeliveryMode::D2D && t == 0 {
            return Err(Error::InsufficientCollectiveStorage {
                km: "0".into(),
                n: config.n(),
            });
        }
        Ok(PlacementParam { t })
    }
}

pub fn corner_memory(n: usize, k: usize, t: usize) -> Rational {
    Rational::of(n * t) / Rational::of(k)
}

/// Config at corner `t`, i.e. with `M = Nt/K`.
pub fn corner_config(n: usize, k: usize, l: usize, t: usize, mode: DeliveryMode) -> Result<ExactConfig> {
    if k == 0 || t > k {
        return Err(Error::OutOfRange(format!("t = {t} outside [0:K] for K = {k}")));
    }
    crate::model::make_config(n, k, l, corner_memory(n, k, t), mode)
}

/// Number of equal parts a file is cut into: `C(K,t)` subfiles, times `t`
/// pieces each for D2D.
pub fn parts_per_file(mode: DeliveryMode, k: usize, t: usize) -> u64 {
    match mode {
        DeliveryMode::Centralized => binomial(k, t),
        DeliveryMode::D2D => binomial(k, t) * t as u64,
    }
}

/// `lcm(C(K,t), t C(K,t)) * 8`: splits evenly into byte-aligned parts for
/// both schemes.
pub fn default_file_bits(k: usize, t: usize) -> u64 {
    let c = binomial(k, t);
    let both = if t == 0 { c } else { c * t as u64 };
    both * 8
}

/// Bytes per part, or a divisibility error.
pub(crate) fn part_bytes(bits: u64, parts: u64) -> Result<usize> {
    if parts == 0 || !bits.is_multiple_of(parts) || !(bits / parts).is_multiple_of(8) {
        return Err(Error::Divisibility { bits, parts });
    }
    Ok((bits / parts / 8) as usize)
}

pub(crate) fn xor_into(dst: &mut [u8], src: &[u8]) {
    debug_assert_eq!(dst.len(), src.len());
    dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s);
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TransmissionLog {
    pub transmissions: Vec<Transmission>,
    pub total_bits: u64,
}

impl TransmissionLog {
    pub fn push(&mut self, tx: Transmission) {
        self.total_bits += tx.bit_count;
        self.transmissions.push(tx);
    }

    pub fn len(&self) -> usize {
        self.transmissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmissions.is_empty()
    }

    /// Bits sent by each device `1..=K` (index 0 is device 1).
    pub fn bits_per_device(&self, k: usize) -> Vec<u64> {
        let mut out = vec![0; k];
        for tx in &self.transmissions {
            if let crate::model::Sender::Device(u) = tx.sender {
                out[u - 1] += tx.bit_count;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    CodedMulticast,
    LibraryParity,
    LibraryBroadcast,
}

/// Outcome of one end-to-end simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub mode: DeliveryMode,
    pub t: usize,
    pub file_bits: u64,
    #[serde(with = "exact_str")]
    pub measured_rate: Rational,
    #[serde(with = "exact_str")]
    pub formula_rate: Rational,
    pub decode_ok: Vec<bool>,
    /// `measured_rate <= formula_rate`.
    pub rate_match: bool,
    pub strategy: Strategy,
    pub transmissions: usize,
    /// Every user stores exactly `M B` bits.
    pub storage_ok: bool,
    /// D2D only: every payload recomputes from its sender's cache.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locality_ok: Option<bool>,
    /// D2D only: all devices send the same number of bits. Reported, not
    /// required.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform_device_load: Option<bool>,
}

impl SimReport {
    pub fn all_decoded(&self) -> bool {
        self.decode_ok.iter().all(|&ok| ok)
    }

    pub fn passed(&self) -> bool {
        self.all_decoded() && self.rate_match && self.storage_ok && self.locality_ok != Some(false)
    }
}

/// Achievable-rate formula at corner `t`.
pub fn formula_rate(config: &ExactConfig) -> Rational {
    match config.mode {
        DeliveryMode::Centralized => centralized_rate_formula(config.n(), config.k(), config.l(), config.m()),
        DeliveryMode::D2D => d2d_rate_formula(config.n(), config.l(), config.m()),
    }
}

/// Demand source for [`simulate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Demands {
    WorstCase,
    Random(u64),
}

/// Places, delivers and decodes for all users, with a library generated from
/// `seed`.
pub fn simulate(config: &ExactConfig, t: usize, demands: &DemandMatrix, seed: u64) -> Result<SimReport> {
    Ok(run(config, t, demands, seed)?.0)
}

/// Like [`simulate`] but also returns the transmission log.
pub fn simulate_traced(
    config: &ExactConfig,
    t: usize,
    demands: &DemandMatrix,
    seed: u64,
) -> Result<(SimReport, TransmissionLog)> {
    run(config, t, demands, seed)
}

pub fn simulate_with(config: &ExactConfig, t: usize, demands: Demands, seed: u64) -> Result<SimReport> {
    let matrix = match demands {
        Demands::WorstCase => crate::model::worst_case_demands(config),
        Demands::Random(s) => random_demands(config, s),
    };
    simulate(config, t, &matrix, seed)
}

fn run(config: &ExactConfig, t: usize, demands: &DemandMatrix, seed: u64) -> Result<(SimReport, TransmissionLog)> {
    let param = PlacementParam::new(config, t)?;
    if demands.n_users() != config.k() {
        return Err(Error::OutOfRange(format!(
            "demand matrix has {} rows for K = {}",
            demands.n_users(),
            config.k()
        )));
    }
    let bits = config.file_bits.unwrap_or_else(|| default_file_bits(config.k(), t));
    part_bytes(bits, parts_per_file(config.mode, config.k(), t))?;
    let library = Library::generate(config.n(), bits, seed)?;

    let (caches, log) = match config.mode {
        DeliveryMode::Centralized => {
            let caches = place_centralized(config, param.t, &library)?;
            let log = deliver_centralized(config, param.t, &caches, demands, &library)?;
            (caches, log)
        }
        DeliveryMode::D2D => {
            let caches = place_d2d(config, param.t, &library)?;
            let log = deliver_d2d(config, param.t, &caches, demands)?;
            (caches, log)
        }
    };

    let decode_ok = (1..=config.k())
        .map(|k| match decode(config, param.t, k, caches.user(k), &log, demands) {
            Ok(files) => files
                .iter()
                .enumerate()
                .all(|(j, f)| f.as_slice() == library.file(demands.demand(k, j + 1))),
            Err(_) => false,
        })
        .collect();

    let stored_target = config.m().clone() * Rational::of(bits as usize);
    let storage_ok = (1..=config.k()).all(|k| Rational::of(caches.bits_stored(k) as usize) == stored_target);

    let measured_rate = Rational::of(log.total_bits as usize) / Rational::of(bits as usize);
    let formula_rate = formula_rate(config);
    let strategy = strategy_of(&log);

    let (locality_ok, uniform_device_load) = match config.mode {
        DeliveryMode::Centralized => (None, None),
        DeliveryMode::D2D => {
            let per_device = log.bits_per_device(config.k());
            let uniform = per_device.windows(2).all(|w| w[0] == w[1]);
            (Some(check_locality(config, param.t, &caches, &log, demands)), Some(uniform))
        }
    };

    let report = SimReport {
        mode: config.mode,
        t: param.t,
        file_bits: bits,
        rate_match: measured_rate <= formula_rate,
        measured_rate,
        formula_rate,
        decode_ok,
        strategy,
        transmissions: log.len(),
        storage_ok,
        locality_ok,
        uniform_device_load,
    };
    Ok((report, log))
}

fn strategy_of(log: &TransmissionLog) -> Strategy {
    use crate::model::TransmissionKind;
    match log.transmissions.first().map(|tx| &tx.kind) {
        Some(TransmissionKind::Parity { .. }) => Strategy::LibraryParity,
        Some(TransmissionKind::Plain { .. }) => Strategy::LibraryBroadcast,
        _ => Strategy::CodedMulticast,
    }
}

//! Problem instances, demands, and the bit-level data model shared by the
//! bounds, simulators and analysis code.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combin::Subset;
use crate::{Error, Rational, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeliveryMode {
    #[serde(rename = "cen")]
    Centralized,
    D2D,
}

impl DeliveryMode {
    pub fn name(self) -> &'static str {
        match self {
            DeliveryMode::Centralized => "cen",
            DeliveryMode::D2D => "d2d",
        }
    }
}

impl fmt::Display for DeliveryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DeliveryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cen" | "centralized" => Ok(DeliveryMode::Centralized),
            "d2d" => Ok(DeliveryMode::D2D),
            other => Err(Error::Parse(format!("unknown delivery mode {other:?}"))),
        }
    }
}

/// One problem instance: `N` files, `K` users each requesting `L` distinct
/// files, cache size `M` in file units.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: fmt::Display"))]
pub struct SystemConfig<T = Rational> {
    pub n_files: usize,
    pub n_users: usize,
    pub demands_per_user: usize,
    #[serde(serialize_with = "crate::rational::exact_str::serialize")]
    pub cache_size: T,
    pub mode: DeliveryMode,
    /// File size in bits; `None` lets the simulator pick the smallest size
    /// that splits evenly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file_bits: Option<u64>,
}

impl<T: Scalar> SystemConfig<T> {
    pub fn new(n: usize, k: usize, l: usize, m: T, mode: DeliveryMode) -> Result<Self> {
        make_config(n, k, l, m, mode)
    }

    pub fn with_file_bits(mut self, bits: u64) -> Result<Self> {
        if bits == 0 {
            return Err(Error::OutOfRange("file size B must be positive".into()));
        }
        self.file_bits = Some(bits);
        Ok(self)
    }

    /// Same instance with a different cache size, re-validated.
    pub fn at_cache_size(&self, m: T) -> Result<Self> {
        let mut next = make_config(self.n_files, self.n_users, self.demands_per_user, m, self.mode)?;
        next.file_bits = self.file_bits;
        Ok(next)
    }

    /// Smallest admissible cache size: `0` centralized, `N/K` for D2D.
    pub fn min_cache_size(&self) -> T {
        min_cache_size(self.n_files, self.n_users, self.mode)
    }

    pub fn n(&self) -> usize {
        self.n_files
    }

    pub fn k(&self) -> usize {
        self.n_users
    }

    pub fn l(&self) -> usize {
        self.demands_per_user
    }

    pub fn m(&self) -> &T {
        &self.cache_size
    }
}

pub fn min_cache_size<T: Scalar>(n: usize, k: usize, mode: DeliveryMode) -> T {
    match mode {
        DeliveryMode::Centralized => T::zero(),
        DeliveryMode::D2D => T::of(n) / T::of(k),
    }
}

/// Validates and builds a [`SystemConfig`].
pub fn make_config<T: Scalar>(
    n: usize,
    k: usize,
    l: usize,
    m: T,
    mode: DeliveryMode,
) -> Result<SystemConfig<T>> {
    if n == 0 {
        return Err(Error::OutOfRange("N must be at least 1".into()));
    }
    if k == 0 {
        return Err(Error::OutOfRange("K must be at least 1".into()));
    }
    if l == 0 || l > n {
        return Err(Error::OutOfRange(format!(
            "L = {l} must lie in [1:N] = [1:{n}]"
        )));
    }
    if m < T::zero() || m > T::of(n) {
        return Err(Error::OutOfRange(format!("M = {m} must lie in [0, N] = [0, {n}]")));
    }
    if mode == DeliveryMode::D2D && T::of(k) * m.clone() < T::of(n) {
        return Err(Error::InsufficientCollectiveStorage {
            km: (T::of(k) * m).to_string(),
            n,
        });
    }
    Ok(SystemConfig {
        n_files: n,
        n_users: k,
        demands_per_user: l,
        cache_size: m,
        mode,
        file_bits: None,
    })
}

/// `K x L` matrix of 1-based file indices; row `k` lists user `k`'s demands.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DemandMatrix {
    rows: Vec<Vec<usize>>,
}

impl DemandMatrix {
    pub fn new(rows: Vec<Vec<usize>>, n_files: usize, demands_per_user: usize) -> Result<Self> {
        for (k, row) in rows.iter().enumerate() {
            if row.len() != demands_per_user {
                return Err(Error::OutOfRange(format!(
                    "user {} requests {} files, expected {demands_per_user}",
                    k + 1,
                    row.len()
                )));
            }
            for (j, &f) in row.iter().enumerate() {
                if f == 0 || f > n_files {
                    return Err(Error::OutOfRange(format!(
                        "file index {f} outside [1:{n_files}]"
                    )));
                }
                if row[..j].contains(&f) {
                    return Err(Error::OutOfRange(format!(
                        "user {} requests file {f} twice",
                        k + 1
                    )));
                }
            }
        }
        Ok(DemandMatrix { rows })
    }

    pub fn for_config<T: Scalar>(rows: Vec<Vec<usize>>, config: &SystemConfig<T>) -> Result<Self> {
        if rows.len() != config.n_users {
            return Err(Error::OutOfRange(format!(
                "demand matrix has {} rows for K = {}",
                rows.len(),
                config.n_users
            )));
        }
        Self::new(rows, config.n_files, config.demands_per_user)
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn n_users(&self) -> usize {
        self.rows.len()
    }

    /// File requested by user `k` (1-based) in round `j` (1-based).
    pub fn demand(&self, k: usize, j: usize) -> usize {
        self.rows[k - 1][j - 1]
    }

    pub fn distinct_files(&self) -> usize {
        let mut all: Vec<usize> = self.rows.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    }
}

/// Deterministic demands with as many distinct files as possible: indices
/// are dealt row-major and wrap modulo `N`; a wrapped index already present
/// in the row is skipped.
pub fn worst_case_demands<T: Scalar>(config: &SystemConfig<T>) -> DemandMatrix {
    let n = config.n_files;
    let mut next = 0usize;
    let rows = (0..config.n_users)
        .map(|_| {
            let mut row = Vec::with_capacity(config.demands_per_user);
            for _ in 0..config.demands_per_user {
                while row.contains(&(next % n + 1)) {
                    next += 1;
                }
                row.push(next % n + 1);
                next += 1;
            }
            row
        })
        .collect();
    DemandMatrix { rows }
}

/// Each row an independent uniformly random ordered `L`-subset of `[1:N]`.
pub fn random_demands<T: Scalar>(config: &SystemConfig<T>, seed: u64) -> DemandMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..config.n_users)
        .map(|_| {
            rand::seq::index::sample(&mut rng, config.n_files, config.demands_per_user)
                .into_iter()
                .map(|i| i + 1)
                .collect()
        })
        .collect();
    DemandMatrix { rows }
}

/// The file library: `N` pseudo-random files of `B` bits each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Library {
    files: Vec<Vec<u8>>,
    file_bits: u64,
    seed: u64,
}

impl Library {
    /// Files are byte strings, so `bits` must be a multiple of 8.
    pub fn generate(n_files: usize, bits: u64, seed: u64) -> Result<Self> {
        if bits == 0 || !bits.is_multiple_of(8) {
            return Err(Error::Divisibility { bits, parts: 1 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let files = (0..n_files)
            .map(|_| {
                let mut f = vec![0u8; (bits / 8) as usize];
                rng.fill_bytes(&mut f);
                f
            })
            .collect();
        Ok(Library {
            files,
            file_bits: bits,
            seed,
        })
    }

    /// File `n` (1-based).
    pub fn file(&self, n: usize) -> &[u8] {
        &self.files[n - 1]
    }

    pub fn n_files(&self) -> usize {
        self.files.len()
    }

    pub fn file_bits(&self) -> u64 {
        self.file_bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Address of a stored piece: file `n`, the `t`-subset indexing the subfile,
/// and for D2D placement the member of that subset owning this piece.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubfilePieceId {
    pub file: usize,
    pub subset: Subset,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub piece_owner: Option<usize>,
}

impl SubfilePieceId {
    pub fn subfile(file: usize, subset: Subset) -> Self {
        SubfilePieceId {
            file,
            subset,
            piece_owner: None,
        }
    }

    pub fn piece(file: usize, subset: Subset, owner: usize) -> Self {
        debug_assert!(subset.contains(&owner));
        SubfilePieceId {
            file,
            subset,
            piece_owner: Some(owner),
        }
    }
}

impl fmt::Display for SubfilePieceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "file {} subset {:?}", self.file, self.subset)?;
        if let Some(o) = self.piece_owner {
            write!(f, " owner {o}")?;
        }
        Ok(())
    }
}

pub type UserCache = BTreeMap<SubfilePieceId, Vec<u8>>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CacheContents {
    pub per_user: Vec<UserCache>,
}

impl CacheContents {
    /// Cache of user `k` (1-based).
    pub fn user(&self, k: usize) -> &UserCache {
        &self.per_user[k - 1]
    }

    pub fn bits_stored(&self, k: usize) -> u64 {
        self.user(k).values().map(|p| p.len() as u64 * 8).sum()
    }

    pub fn n_users(&self) -> usize {
        self.per_user.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sender {
    Server,
    Device(usize),
}

/// What a transmission carries, so a receiver knows how to use it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransmissionKind {
    /// XOR of one piece per member of the multicast group.
    Multicast,
    /// Row `row` of the library-wide MDS parity for file `file`.
    Parity { file: usize, row: usize },
    /// A subfile sent uncoded.
    Plain { file: usize, subfile: Subset },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transmission {
    pub sender: Sender,
    pub round: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset: Option<Subset>,
    #[serde(flatten)]
    pub kind: TransmissionKind,
    #[serde(with = "hex_payload")]
    pub payload: Vec<u8>,
    pub bit_count: u64,
}

mod hex_payload {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        hex::decode(text).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    fn cfg(n: usize, k: usize, l: usize, m: Rational, mode: DeliveryMode) -> Result<SystemConfig> {
        make_config(n, k, l, m, mode)
    }

    #[test]
    fn valid_centralized_config() {
        let c = cfg(5, 5, 2, Rational::of(2), DeliveryMode::Centralized).unwrap();
        assert_eq!((c.n(), c.k(), c.l()), (5, 5, 2));
    }

    #[test]
    fn d2d_needs_collective_storage() {
        let err = cfg(3, 3, 1, Rational::ratio(1, 2), DeliveryMode::D2D).unwrap_err();
        assert!(matches!(err, Error::InsufficientCollectiveStorage { .. }));
        assert!(cfg(3, 3, 1, Rational::of(1), DeliveryMode::D2D).is_ok());
    }

    #[test]
    fn too_many_demands() {
        let err = cfg(3, 3, 4, Rational::of(1), DeliveryMode::Centralized).unwrap_err();
        assert!(matches!(err, Error::OutOfRange(_)));
        let err = cfg(3, 3, 4, Rational::of(1), DeliveryMode::D2D).unwrap_err();
        assert!(matches!(err, Error::OutOfRange(_)));
    }

    #[test]
    fn cache_out_of_range() {
        assert!(cfg(3, 3, 1, Rational::of(4), DeliveryMode::Centralized).is_err());
        assert!(cfg(3, 3, 1, Rational::of_i64(-1), DeliveryMode::Centralized).is_err());
        assert!(cfg(0, 3, 1, Rational::of(0), DeliveryMode::Centralized).is_err());
        assert!(cfg(3, 0, 1, Rational::of(0), DeliveryMode::Centralized).is_err());
        assert!(cfg(3, 3, 0, Rational::of(0), DeliveryMode::Centralized).is_err());
    }

    #[test]
    fn float_config_validates_too() {
        assert!(make_config(3, 3, 1, 0.5f64, DeliveryMode::D2D).is_err());
        assert!(make_config(3, 3, 1, 1.5f64, DeliveryMode::D2D).is_ok());
    }

    #[test]
    fn worst_case_examples() {
        let c = cfg(4, 2, 2, Rational::of(0), DeliveryMode::Centralized).unwrap();
        assert_eq!(worst_case_demands(&c).rows(), &[vec![1, 2], vec![3, 4]]);
        let c = cfg(3, 3, 1, Rational::of(0), DeliveryMode::Centralized).unwrap();
        assert_eq!(worst_case_demands(&c).rows(), &[vec![1], vec![2], vec![3]]);
        let c = cfg(3, 2, 2, Rational::of(0), DeliveryMode::Centralized).unwrap();
        assert_eq!(worst_case_demands(&c).rows(), &[vec![1, 2], vec![3, 1]]);
    }

    #[test]
    fn worst_case_rows_are_distinct_on_grid() {
        for n in 1..=12 {
            for k in 1..=12 {
                for l in 1..=n {
                    let c = cfg(n, k, l, Rational::of(0), DeliveryMode::Centralized).unwrap();
                    let d = worst_case_demands(&c);
                    assert!(DemandMatrix::for_config(d.rows().to_vec(), &c).is_ok(), "N={n} K={k} L={l}");
                    assert_eq!(d.distinct_files(), n.min(k * l));
                }
            }
        }
    }

    #[test]
    fn single_file_random_demands() {
        let c = cfg(1, 3, 1, Rational::of(0), DeliveryMode::Centralized).unwrap();
        for seed in 0..5 {
            assert_eq!(random_demands(&c, seed).rows(), &[vec![1], vec![1], vec![1]]);
        }
    }

    #[test]
    fn random_demands_are_reproducible() {
        let c = cfg(10, 4, 3, Rational::of(0), DeliveryMode::Centralized).unwrap();
        assert_eq!(random_demands(&c, 7), random_demands(&c, 7));
        let d = random_demands(&c, 7);
        assert!(DemandMatrix::for_config(d.rows().to_vec(), &c).is_ok());
    }

    #[test]
    fn demand_matrix_rejects_duplicates() {
        assert!(DemandMatrix::new(vec![vec![1, 1]], 3, 2).is_err());
        assert!(DemandMatrix::new(vec![vec![1, 4]], 3, 2).is_err());
        assert!(DemandMatrix::new(vec![vec![1]], 3, 2).is_err());
    }

    #[test]
    fn library_is_reproducible() {
        let a = Library::generate(3, 64, 11).unwrap();
        let b = Library::generate(3, 64, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.file(1).len(), 8);
        assert_ne!(a, Library::generate(3, 64, 12).unwrap());
        assert!(Library::generate(3, 12, 0).is_err());
    }

    #[test]
    fn transmission_json_uses_hex() {
        let t = Transmission {
            sender: Sender::Device(2),
            round: 1,
            subset: Some(vec![1, 2]),
            kind: TransmissionKind::Multicast,
            payload: vec![0xab, 0x01],
            bit_count: 16,
        };
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"ab01\""), "{json}");
        let back: Transmission = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }

    proptest! {
        #[test]
        fn random_rows_are_distinct(n in 1usize..12, k in 1usize..8, seed in any::<u64>(), l_frac in 0.0f64..1.0) {
            let l = 1 + ((n - 1) as f64 * l_frac) as usize;
            let c = cfg(n, k, l, Rational::of(0), DeliveryMode::Centralized).unwrap();
            let d = random_demands(&c, seed);
            prop_assert!(DemandMatrix::for_config(d.rows().to_vec(), &c).is_ok());
        }
    }
}

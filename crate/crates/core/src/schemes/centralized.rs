use crate::combin::{binomial, subset_rank, subsets, without};
use crate::gf256;
use crate::model::{CacheContents, Library, Sender, SubfilePieceId, Transmission, TransmissionKind, UserCache};
use crate::{DeliveryMode, DemandMatrix, Error, ExactConfig, Result};

use super::{part_bytes, xor_into, TransmissionLog};

/// Byte range of subfile `subset` inside a file.
pub(super) fn subfile_of<'a>(file: &'a [u8], k: usize, subset: &[usize], sub_bytes: usize) -> &'a [u8] {
    let idx = subset_rank(k, subset);
    &file[idx * sub_bytes..(idx + 1) * sub_bytes]
}

fn check_mode(config: &ExactConfig) -> Result<()> {
    if config.mode != DeliveryMode::Centralized {
        return Err(Error::ModeMismatch {
            expected: "cen",
            actual: config.mode.name(),
        });
    }
    Ok(())
}

/// User `k` stores subfile `(n, T)` for every file `n` and every `t`-subset
/// `T` containing `k`.
pub fn place_centralized(config: &ExactConfig, t: usize, library: &Library) -> Result<CacheContents> {
    check_mode(config)?;
    super::PlacementParam::new(config, t)?;
    let k = config.k();
    let sub_bytes = part_bytes(library.file_bits(), binomial(k, t))?;
    let mut per_user = vec![UserCache::new(); k];
    for subset in subsets(k, t) {
        for n in 1..=config.n() {
            let bytes = subfile_of(library.file(n), k, &subset, sub_bytes);
            for &user in &subset {
                per_user[user - 1].insert(SubfilePieceId::subfile(n, subset.clone()), bytes.to_vec());
            }
        }
    }
    Ok(CacheContents { per_user })
}

pub(super) fn check_placement(caches: &CacheContents, n: usize, k: usize, t: usize, d2d: bool) -> Result<()> {
    if caches.n_users() != k {
        return Err(Error::PlacementMismatch(format!("{} caches for K = {k}", caches.n_users())));
    }
    let per_subfile = if d2d { t as u64 } else { 1 };
    let expected = if t == 0 {
        0
    } else {
        n as u64 * binomial(k - 1, t - 1) * per_subfile
    };
    for user in 1..=k {
        let cache = caches.user(user);
        let bad = cache
            .keys()
            .find(|id| id.subset.len() != t || !id.subset.contains(&user) || id.piece_owner.is_some() != d2d);
        if let Some(id) = bad {
            return Err(Error::PlacementMismatch(format!("user {user} holds {id}, not a t = {t} piece")));
        }
        if cache.len() as u64 != expected {
            return Err(Error::PlacementMismatch(format!(
                "user {user} holds {} pieces, expected {expected}",
                cache.len()
            )));
        }
    }
    Ok(())
}

/// Emits the cheaper of `L` rounds of coded multicast (one XOR per
/// `(t+1)`-subset) and the library parity broadcast.
pub fn deliver_centralized(
    config: &ExactConfig,
    t: usize,
    caches: &CacheContents,
    demands: &DemandMatrix,
    library: &Library,
) -> Result<TransmissionLog> {
    check_mode(config)?;
    let (n, k, l) = (config.n(), config.k(), config.l());
    check_placement(caches, n, k, t, false)?;
    let sub_bytes = part_bytes(library.file_bits(), binomial(k, t))?;

    let coded_parts = l as u64 * binomial(k, t + 1);
    let parity_parts = n as u64 * binomial(k - 1, t);
    if coded_parts <= parity_parts {
        Ok(coded_multicast(k, l, t, demands, library, sub_bytes))
    } else {
        library_parity(n, k, t, library, sub_bytes)
    }
}

fn coded_multicast(k: usize, l: usize, t: usize, demands: &DemandMatrix, library: &Library, sub_bytes: usize) -> TransmissionLog {
    let mut log = TransmissionLog::default();
    for round in 1..=l {
        for group in subsets(k, t + 1) {
            let mut payload = vec![0u8; sub_bytes];
            for &user in &group {
                let wanted = demands.demand(user, round);
                xor_into(&mut payload, subfile_of(library.file(wanted), k, &without(&group, user), sub_bytes));
            }
            log.push(Transmission {
                sender: Sender::Server,
                round,
                subset: Some(group),
                kind: TransmissionKind::Multicast,
                bit_count: sub_bytes as u64 * 8,
                payload,
            });
        }
    }
    log
}

/// For each file, `C(K-1, t)` Cauchy combinations of its `C(K, t)` subfiles.
/// A user knows `C(K-1, t-1)` subfiles of each file and misses exactly
/// `C(K-1, t)`, so the missing ones always form an invertible square system.
fn library_parity(n: usize, k: usize, t: usize, library: &Library, sub_bytes: usize) -> Result<TransmissionLog> {
    let rows = binomial(k - 1, t) as usize;
    let cols = binomial(k, t) as usize;
    if rows + cols > 256 {
        return Err(Error::FieldTooSmall(format!(
            "parity needs C(K-1,t) + C(K,t) = {} <= 256 coefficients",
            rows + cols
        )));
    }
    let all = subsets(k, t);
    let mut log = TransmissionLog::default();
    for file in 1..=n {
        for row in 0..rows {
            let mut payload = vec![0u8; sub_bytes];
            for (col, subset) in all.iter().enumerate() {
                let coef = gf256::cauchy(rows, row, col);
                gf256::axpy(&mut payload, coef, subfile_of(library.file(file), k, subset, sub_bytes));
            }
            log.push(Transmission {
                sender: Sender::Server,
                round: 1,
                subset: None,
                kind: TransmissionKind::Parity { file, row },
                bit_count: sub_bytes as u64 * 8,
                payload,
            });
        }
    }
    Ok(log)
}

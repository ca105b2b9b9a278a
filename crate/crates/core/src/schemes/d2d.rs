use crate::combin::{binomial, subset_rank, subsets, without};
use crate::model::{CacheContents, Library, Sender, SubfilePieceId, Transmission, TransmissionKind, UserCache};
use crate::{DeliveryMode, DemandMatrix, Error, ExactConfig, Result};

use super::centralized::check_placement;
use super::{part_bytes, xor_into, TransmissionLog};

fn check_mode(config: &ExactConfig) -> Result<()> {
    if config.mode != DeliveryMode::D2D {
        return Err(Error::ModeMismatch {
            expected: "d2d",
            actual: config.mode.name(),
        });
    }
    Ok(())
}

/// Bytes of the piece of subfile `(file, subset)` owned by `subset[i]`.
fn piece_of<'a>(file: &'a [u8], k: usize, t: usize, subset: &[usize], i: usize, piece_bytes: usize) -> &'a [u8] {
    let start = (subset_rank(k, subset) * t + i) * piece_bytes;
    &file[start..start + piece_bytes]
}

/// Like centralized placement, but each subfile is stored as `t` pieces, one
/// per member of its subset.
pub fn place_d2d(config: &ExactConfig, t: usize, library: &Library) -> Result<CacheContents> {
    check_mode(config)?;
    super::PlacementParam::new(config, t)?;
    let k = config.k();
    let piece_bytes = part_bytes(library.file_bits(), binomial(k, t) * t as u64)?;
    let mut per_user = vec![UserCache::new(); k];
    for subset in subsets(k, t) {
        for n in 1..=config.n() {
            for (i, &owner) in subset.iter().enumerate() {
                let bytes = piece_of(library.file(n), k, t, &subset, i, piece_bytes);
                for &user in &subset {
                    per_user[user - 1].insert(SubfilePieceId::piece(n, subset.clone(), owner), bytes.to_vec());
                }
            }
        }
    }
    Ok(CacheContents { per_user })
}

fn piece_len(caches: &CacheContents) -> usize {
    caches
        .per_user
        .iter()
        .flat_map(|c| c.values())
        .map(Vec::len)
        .next()
        .unwrap_or(0)
}

/// Emits the cheaper of `L` rounds of device-side coded multicast and a
/// broadcast of the whole library in which every device sends the pieces it
/// owns. Payloads are built from the sender's cache only.
pub fn deliver_d2d(config: &ExactConfig, t: usize, caches: &CacheContents, demands: &DemandMatrix) -> Result<TransmissionLog> {
    check_mode(config)?;
    let (n, k, l) = (config.n(), config.k(), config.l());
    if t == 0 {
        return Err(Error::InsufficientCollectiveStorage { km: "0".into(), n });
    }
    check_placement(caches, n, k, t, true)?;
    let piece_bytes = piece_len(caches);

    // L (K-t)/t versus N, both in units of B
    let coded_wins = (l * (k - t)) as u64 <= (n * t) as u64;
    let mut log = TransmissionLog::default();
    if coded_wins {
        for round in 1..=l {
            for group in subsets(k, t + 1) {
                for &sender in &group {
                    log.push(coded_payload(caches, &group, sender, round, demands, piece_bytes)?);
                }
            }
        }
    } else {
        for subset in subsets(k, t) {
            for file in 1..=n {
                for &owner in &subset {
                    let id = SubfilePieceId::piece(file, subset.clone(), owner);
                    let payload = lookup(caches.user(owner), &id, owner)?.to_vec();
                    log.push(Transmission {
                        sender: Sender::Device(owner),
                        round: 1,
                        subset: Some(subset.clone()),
                        kind: TransmissionKind::Plain {
                            file,
                            subfile: subset.clone(),
                        },
                        bit_count: piece_bytes as u64 * 8,
                        payload,
                    });
                }
            }
        }
    }
    Ok(log)
}

fn lookup<'a>(cache: &'a UserCache, id: &SubfilePieceId, user: usize) -> Result<&'a [u8]> {
    cache
        .get(id)
        .map(Vec::as_slice)
        .ok_or_else(|| Error::PlacementMismatch(format!("device {user} lacks {id}")))
}

fn coded_payload(
    caches: &CacheContents,
    group: &[usize],
    sender: usize,
    round: usize,
    demands: &DemandMatrix,
    piece_bytes: usize,
) -> Result<Transmission> {
    let cache = caches.user(sender);
    let mut payload = vec![0u8; piece_bytes];
    for &user in group.iter().filter(|&&u| u != sender) {
        let id = SubfilePieceId::piece(demands.demand(user, round), without(group, user), sender);
        xor_into(&mut payload, lookup(cache, &id, sender)?);
    }
    Ok(Transmission {
        sender: Sender::Device(sender),
        round,
        subset: Some(group.to_vec()),
        kind: TransmissionKind::Multicast,
        bit_count: piece_bytes as u64 * 8,
        payload,
    })
}

/// Recomputes every payload from its sender's cache alone and compares.
pub fn check_locality(
    config: &ExactConfig,
    t: usize,
    caches: &CacheContents,
    log: &TransmissionLog,
    demands: &DemandMatrix,
) -> bool {
    if config.mode != DeliveryMode::D2D || t == 0 {
        return false;
    }
    let piece_bytes = piece_len(caches);
    log.transmissions.iter().all(|tx| {
        let Sender::Device(sender) = tx.sender else {
            return false;
        };
        let Some(subset) = &tx.subset else {
            return false;
        };
        if !subset.contains(&sender) {
            return false;
        }
        let expected = match &tx.kind {
            TransmissionKind::Multicast => coded_payload(caches, subset, sender, tx.round, demands, piece_bytes).map(|t| t.payload),
            TransmissionKind::Plain { file, subfile } => {
                lookup(caches.user(sender), &SubfilePieceId::piece(*file, subfile.clone(), sender), sender).map(<[u8]>::to_vec)
            }
            TransmissionKind::Parity { .. } => return false,
        };
        expected.is_ok_and(|p| p == tx.payload)
    })
}

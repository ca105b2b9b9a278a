use std::collections::BTreeMap;

use crate::combin::{binomial, subsets, without};
use crate::gf256;
use crate::model::{Sender, SubfilePieceId, TransmissionKind, UserCache};
use crate::{DeliveryMode, DemandMatrix, Error, ExactConfig, Result};

use super::{xor_into, TransmissionLog};

/// Rebuilds the `L` files demanded by user `k` from its cache and the log.
///
/// Works for both modes: centralized subfiles are keyed without an owner,
/// D2D pieces by the member of the subset that owns (and transmits) them.
pub fn decode(
    config: &ExactConfig,
    t: usize,
    k: usize,
    cache: &UserCache,
    log: &TransmissionLog,
    demands: &DemandMatrix,
) -> Result<Vec<Vec<u8>>> {
    if k == 0 || k > config.k() {
        return Err(Error::OutOfRange(format!("user {k} outside [1:{}]", config.k())));
    }
    let d2d = config.mode == DeliveryMode::D2D;
    let mut known: BTreeMap<SubfilePieceId, Vec<u8>> = cache.clone();
    let mut parity: BTreeMap<usize, Vec<(usize, &[u8])>> = BTreeMap::new();

    for tx in &log.transmissions {
        match &tx.kind {
            TransmissionKind::Plain { file, subfile } => {
                let owner = match tx.sender {
                    Sender::Device(u) if d2d => Some(u),
                    _ => None,
                };
                let id = SubfilePieceId {
                    file: *file,
                    subset: subfile.clone(),
                    piece_owner: owner,
                };
                known.entry(id).or_insert_with(|| tx.payload.clone());
            }
            TransmissionKind::Parity { file, row } => {
                parity.entry(*file).or_default().push((*row, &tx.payload));
            }
            TransmissionKind::Multicast => {
                let Some(group) = &tx.subset else { continue };
                let sender = match tx.sender {
                    Sender::Device(u) => Some(u),
                    Sender::Server => None,
                };
                if !group.contains(&k) || sender == Some(k) {
                    continue;
                }
                let owner = if d2d { sender } else { None };
                let piece_id = |user: usize| SubfilePieceId {
                    file: demands.demand(user, tx.round),
                    subset: without(group, user),
                    piece_owner: owner,
                };
                let mut acc = tx.payload.clone();
                for &other in group.iter().filter(|&&u| u != k && Some(u) != sender) {
                    let id = piece_id(other);
                    let bytes = known.get(&id).ok_or_else(|| failure(k, &id))?;
                    xor_into(&mut acc, bytes);
                }
                known.entry(piece_id(k)).or_insert(acc);
            }
        }
    }

    if !parity.is_empty() {
        solve_parity(config.k(), t, k, &parity, &mut known)?;
    }

    (1..=config.l())
        .map(|j| assemble(config.k(), t, k, demands.demand(k, j), d2d, &known))
        .collect()
}

fn failure(user: usize, id: &SubfilePieceId) -> Error {
    Error::DecodeFailure {
        user,
        piece: id.to_string(),
    }
}

/// Subtracts the cached subfiles from each parity row and solves for the
/// `C(K-1, t)` subfiles user `k` is missing.
fn solve_parity(
    k_users: usize,
    t: usize,
    k: usize,
    parity: &BTreeMap<usize, Vec<(usize, &[u8])>>,
    known: &mut BTreeMap<SubfilePieceId, Vec<u8>>,
) -> Result<()> {
    let rows = binomial(k_users - 1, t) as usize;
    let all = subsets(k_users, t);
    for (&file, received) in parity {
        let missing: Vec<(usize, &Vec<usize>)> = all
            .iter()
            .enumerate()
            .filter(|(_, s)| !known.contains_key(&SubfilePieceId::subfile(file, s.to_vec())))
            .collect();
        if missing.is_empty() {
            continue;
        }
        if received.len() < missing.len() {
            let id = SubfilePieceId::subfile(file, missing[0].1.clone());
            return Err(failure(k, &id));
        }
        let used = &received[..missing.len()];
        let mut a = Vec::with_capacity(used.len());
        let mut b = Vec::with_capacity(used.len());
        for &(row, payload) in used {
            let mut rhs = payload.to_vec();
            for (col, subset) in all.iter().enumerate() {
                if let Some(bytes) = known.get(&SubfilePieceId::subfile(file, subset.clone())) {
                    gf256::axpy(&mut rhs, gf256::cauchy(rows, row, col), bytes);
                }
            }
            a.push(missing.iter().map(|&(col, _)| gf256::cauchy(rows, row, col)).collect());
            b.push(rhs);
        }
        let solved = gf256::solve(a, b).ok_or_else(|| failure(k, &SubfilePieceId::subfile(file, missing[0].1.clone())))?;
        for ((_, subset), bytes) in missing.into_iter().zip(solved) {
            known.insert(SubfilePieceId::subfile(file, subset.clone()), bytes);
        }
    }
    Ok(())
}

fn assemble(
    k_users: usize,
    t: usize,
    k: usize,
    file: usize,
    d2d: bool,
    known: &BTreeMap<SubfilePieceId, Vec<u8>>,
) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for subset in subsets(k_users, t) {
        let ids: Vec<SubfilePieceId> = if d2d {
            subset.iter().map(|&u| SubfilePieceId::piece(file, subset.clone(), u)).collect()
        } else {
            vec![SubfilePieceId::subfile(file, subset.clone())]
        };
        for id in ids {
            out.extend_from_slice(known.get(&id).ok_or_else(|| failure(k, &id))?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{worst_case_demands, Library};
    use crate::schemes::{corner_config, deliver_centralized, deliver_d2d, place_centralized, place_d2d};

    #[test]
    fn centralized_user_one_recovers_file_one() {
        let c = corner_config(5, 5, 1, 1, DeliveryMode::Centralized).unwrap();
        let lib = Library::generate(5, 40, 9).unwrap();
        let caches = place_centralized(&c, 1, &lib).unwrap();
        let d = worst_case_demands(&c);
        let log = deliver_centralized(&c, 1, &caches, &d, &lib).unwrap();
        let files = decode(&c, 1, 1, caches.user(1), &log, &d).unwrap();
        assert_eq!(files, vec![lib.file(d.demand(1, 1)).to_vec()]);
    }

    #[test]
    fn d2d_abc_all_users_recover() {
        let c = corner_config(3, 3, 1, 1, DeliveryMode::D2D).unwrap();
        let lib = Library::generate(3, 24, 2).unwrap();
        let caches = place_d2d(&c, 1, &lib).unwrap();
        let d = DemandMatrix::for_config(vec![vec![1], vec![2], vec![3]], &c).unwrap();
        let log = deliver_d2d(&c, 1, &caches, &d).unwrap();
        for k in 1..=3 {
            let files = decode(&c, 1, k, caches.user(k), &log, &d).unwrap();
            assert_eq!(files[0], lib.file(k));
        }
    }

    #[test]
    fn full_cache_decodes_without_log() {
        let c = corner_config(3, 3, 2, 3, DeliveryMode::Centralized).unwrap();
        let lib = Library::generate(3, 8, 2).unwrap();
        let caches = place_centralized(&c, 3, &lib).unwrap();
        let d = worst_case_demands(&c);
        let files = decode(&c, 3, 2, caches.user(2), &TransmissionLog::default(), &d).unwrap();
        assert_eq!(files.len(), 2);
        assert_eq!(files[1], lib.file(d.demand(2, 2)));
    }

    #[test]
    fn dropped_transmission_is_reported() {
        let c = corner_config(4, 4, 1, 1, DeliveryMode::Centralized).unwrap();
        let lib = Library::generate(4, 32, 2).unwrap();
        let caches = place_centralized(&c, 1, &lib).unwrap();
        let d = worst_case_demands(&c);
        let mut log = deliver_centralized(&c, 1, &caches, &d, &lib).unwrap();
        log.transmissions.remove(0);
        let err = decode(&c, 1, 1, caches.user(1), &log, &d).unwrap_err();
        assert!(matches!(err, Error::DecodeFailure { user: 1, .. }), "{err}");
    }

    #[test]
    fn parity_decoding() {
        // L K = 8 > N (t + 1) = 6: parity wins
        let c = corner_config(3, 4, 2, 1, DeliveryMode::Centralized).unwrap();
        let lib = Library::generate(3, 32, 5).unwrap();
        let caches = place_centralized(&c, 1, &lib).unwrap();
        let d = worst_case_demands(&c);
        let log = deliver_centralized(&c, 1, &caches, &d, &lib).unwrap();
        assert!(log.transmissions.iter().all(|tx| matches!(tx.kind, TransmissionKind::Parity { .. })));
        for k in 1..=4 {
            let files = decode(&c, 1, k, caches.user(k), &log, &d).unwrap();
            for (j, f) in files.iter().enumerate() {
                assert_eq!(f.as_slice(), lib.file(d.demand(k, j + 1)));
            }
        }
    }
}

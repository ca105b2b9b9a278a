//! Subset enumeration and binomial coefficients.

/// A set of 1-based user indices, kept sorted.
pub type Subset = Vec<usize>;

/// All `size`-element subsets of `[1:ground]` in lexicographic order.
pub fn subsets(ground: usize, size: usize) -> Vec<Subset> {
    if size > ground {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(ground, size) as usize);
    let mut current: Vec<usize> = (1..=size).collect();
    loop {
        out.push(current.clone());
        // rightmost position that can still advance
        let mut i = size;
        while i > 0 && current[i - 1] == ground - size + i {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        current[i - 1] += 1;
        for j in i..size {
            current[j] = current[j - 1] + 1;
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// Position of `subset` in the lexicographic order produced by [`subsets`].
pub fn subset_rank(ground: usize, subset: &[usize]) -> usize {
    let size = subset.len();
    let mut rank = 0u64;
    let mut prev = 0;
    for (i, &x) in subset.iter().enumerate() {
        for skipped in prev + 1..x {
            rank += binomial(ground - skipped, size - i - 1);
        }
        prev = x;
    }
    rank as usize
}

pub fn without(subset: &[usize], member: usize) -> Subset {
    subset.iter().copied().filter(|&x| x != member).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lexicographic_pairs_of_three() {
        assert_eq!(subsets(3, 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn empty_subset() {
        assert_eq!(subsets(5, 0), vec![Vec::<usize>::new()]);
        assert_eq!(subsets(0, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
    }

    #[test]
    fn pairs_of_five() {
        assert_eq!(subsets(5, 2).len(), 10);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }

    // Bitmask oracle: every mask of popcount t, mapped to its sorted member list.
    fn by_bitmask(k: usize, t: usize) -> Vec<Subset> {
        let mut all: Vec<Subset> = (0u32..1 << k)
            .filter(|m| m.count_ones() as usize == t)
            .map(|m| (0..k).filter(|b| m >> b & 1 == 1).map(|b| b + 1).collect())
            .collect();
        all.sort();
        all
    }

    #[test]
    fn matches_bitmask_enumeration() {
        for k in 0..=12 {
            for t in 0..=k {
                let got = subsets(k, t);
                assert_eq!(got.len() as u64, binomial(k, t), "count K={k} t={t}");
                assert_eq!(got, by_bitmask(k, t), "K={k} t={t}");
            }
        }
    }

    proptest! {
        #[test]
        fn rank_inverts_enumeration(k in 0usize..10, t in 0usize..10) {
            prop_assume!(t <= k);
            for (i, s) in subsets(k, t).iter().enumerate() {
                prop_assert_eq!(subset_rank(k, s), i);
            }
        }
    }
}

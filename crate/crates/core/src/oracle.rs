//! Brute-force reference solvers. These share nothing with the banded
//! solvers except the cost functions of the instance types.

use crate::betweenness::BetweennessInstance;
use crate::error::{Error, Result};
use crate::ranking::Ranking;
use crate::tournament::{Cost, WeightedTournament};

pub const FAST_PERM_LIMIT: usize = 10;
pub const FAST_SUBSET_LIMIT: usize = 24;
pub const BT_PERM_LIMIT: usize = 8;

/// Rearranges `p` into the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn min_over_permutations(n: usize, mut cost: impl FnMut(&[usize]) -> u64) -> (Cost, Ranking) {
    let mut p: Vec<usize> = (0..n).collect();
    let mut best = (cost(&p), p.clone());
    while next_permutation(&mut p) {
        let c = cost(&p);
        if c < best.0 {
            best = (c, p.clone());
        }
    }
    (Cost(best.0), Ranking::from_order(best.1).expect("permutation"))
}

/// Exhaustive search over all `n!` rankings; ties go to the
/// lexicographically smallest vertex sequence.
pub fn oracle_fast_perm(t: &WeightedTournament) -> Result<(Cost, Ranking)> {
    let n = t.n();
    if n > FAST_PERM_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: FAST_PERM_LIMIT,
        });
    }
    Ok(min_over_permutations(n, |p| {
        let mut c = 0;
        for j in 0..p.len() {
            for i in 0..j {
                c += t.w(p[j], p[i]);
            }
        }
        c
    }))
}

/// Subset DP over all `2^n` vertex sets. Returns the same cost and the same
/// (lexicographically smallest optimal) ranking as [`oracle_fast_perm`].
pub fn oracle_fast_subset(t: &WeightedTournament) -> Result<(Cost, Ranking)> {
    let n = t.n();
    if n > FAST_SUBSET_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: FAST_SUBSET_LIMIT,
        });
    }
    if n == 0 {
        return Ok((Cost(0), Ranking::identity(0)));
    }
    // into[v][mask] = sum_{u in mask} w_vu, split into two half tables
    let half = n / 2;
    let lo_bits = half;
    let hi_bits = n - half;
    let mut lo_tab = vec![0u64; n << lo_bits];
    let mut hi_tab = vec![0u64; n << hi_bits];
    for v in 0..n {
        for m in 1usize..1 << lo_bits {
            let u = m.trailing_zeros() as usize;
            lo_tab[(v << lo_bits) | m] = lo_tab[(v << lo_bits) | (m & (m - 1))] + if u == v { 0 } else { t.w(v, u) };
        }
        for m in 1usize..1 << hi_bits {
            let u = half + m.trailing_zeros() as usize;
            hi_tab[(v << hi_bits) | m] = hi_tab[(v << hi_bits) | (m & (m - 1))] + if u == v { 0 } else { t.w(v, u) };
        }
    }
    let into = |v: usize, mask: usize| -> u64 {
        lo_tab[(v << lo_bits) | (mask & ((1 << lo_bits) - 1))] + hi_tab[(v << hi_bits) | (mask >> lo_bits)]
    };
    // rest[mask]: cheapest way to rank the complement after `mask`
    let full = (1usize << n) - 1;
    let mut rest = vec![0u64; 1 << n];
    for mask in (0..full).rev() {
        let mut best = u64::MAX;
        let mut free = full & !mask;
        while free != 0 {
            let v = free.trailing_zeros() as usize;
            free &= free - 1;
            best = best.min(into(v, mask) + rest[mask | 1 << v]);
        }
        rest[mask] = best;
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = 0usize;
    while mask != full {
        let v = (0..n)
            .find(|&v| mask >> v & 1 == 0 && into(v, mask) + rest[mask | 1 << v] == rest[mask])
            .expect("some vertex attains the minimum");
        order.push(v);
        mask |= 1 << v;
    }
    Ok((Cost(rest[0]), Ranking::from_order(order).expect("permutation")))
}

/// Exhaustive betweenness search over all `n!` rankings.
pub fn oracle_bt_perm(b: &BetweennessInstance) -> Result<(Cost, Ranking)> {
    let n = b.n();
    if n > BT_PERM_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BT_PERM_LIMIT,
        });
    }
    Ok(min_over_permutations(n, |p| {
        let mut c = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                for k in j + 1..p.len() {
                    if b.middle(p[i], p[j], p[k]) != p[j] {
                        c += 1;
                    }
                }
            }
        }
        c
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_cycle() -> WeightedTournament {
        WeightedTournament::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn permutation_count() {
        let mut p: Vec<usize> = (0..5).collect();
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 120);
    }

    #[test]
    fn perm_examples() {
        assert_eq!(oracle_fast_perm(&three_cycle()).unwrap().0, Cost(1));
        let (c, r) = oracle_fast_perm(&WeightedTournament::chain(6)).unwrap();
        assert_eq!(c, Cost(0));
        assert_eq!(r, Ranking::identity(6));
        let half = WeightedTournament::from_pairs(4, 2, |_, _| 1).unwrap();
        assert_eq!(oracle_fast_perm(&half).unwrap().0, Cost(6));
    }

    #[test]
    fn subset_examples() {
        assert_eq!(oracle_fast_subset(&three_cycle()).unwrap(), oracle_fast_perm(&three_cycle()).unwrap());
        assert_eq!(oracle_fast_subset(&WeightedTournament::chain(12)).unwrap().0, Cost(0));
    }

    #[test]
    fn size_guards() {
        assert!(matches!(
            oracle_fast_perm(&WeightedTournament::chain(11)),
            Err(Error::TooLarge { n: 11, limit: 10 })
        ));
        assert!(oracle_fast_subset(&WeightedTournament::chain(25)).is_err());
        assert!(oracle_bt_perm(&BetweennessInstance::from_chain(9)).is_err());
    }

    #[test]
    fn bt_examples() {
        assert_eq!(oracle_bt_perm(&BetweennessInstance::from_chain(4)).unwrap().0, Cost(0));
        let mut b1 = BetweennessInstance::from_chain(4);
        b1.set_middle(0, 1, 2, 0).unwrap();
        assert_eq!(oracle_bt_perm(&b1).unwrap().0, Cost(1));
        let single = BetweennessInstance::from_fn(3, |_, _, _| 2).unwrap();
        let (c, r) = oracle_bt_perm(&single).unwrap();
        assert_eq!(c, Cost(0));
        assert_eq!(r.position(2), 2);
    }
}

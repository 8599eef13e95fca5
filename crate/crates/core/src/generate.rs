//! Planted instance generators: a consistent chain with `k` random
//! disagreements. Identical seeds give identical instances.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::betweenness::{triple_count, BetweennessInstance};
use crate::error::{Error, Result};
use crate::tournament::WeightedTournament;

fn pair_at(n: usize, mut i: usize) -> (usize, usize) {
    for u in 0..n {
        let row = n - 1 - u;
        if i < row {
            return (u, u + 1 + i);
        }
        i -= row;
    }
    unreachable!("pair index out of range")
}

fn triple_at(mut i: usize) -> (usize, usize, usize) {
    // inverse of the colexicographic triple index
    let mut c = 2;
    while (c + 1) * c * (c - 1) / 6 <= i {
        c += 1;
    }
    i -= c * (c - 1) * (c - 2) / 6;
    let mut b = 1;
    while (b + 1) * b / 2 <= i {
        b += 1;
    }
    i -= b * (b - 1) / 2;
    (i, b, c)
}

/// Chain `0 -> 1 -> ... -> n-1` with `k` distinct pairs reversed (`D = 1`).
pub fn fast_flips(n: usize, k: usize, seed: u64) -> Result<WeightedTournament> {
    let pairs = n * n.saturating_sub(1) / 2;
    if k > pairs {
        return Err(Error::Invalid(format!("{k} flips requested, only {pairs} pairs")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flipped = vec![false; n * n];
    for i in sample(&mut rng, pairs, k) {
        let (u, v) = pair_at(n, i);
        flipped[u * n + v] = true;
    }
    WeightedTournament::from_pairs(n, 1, |u, v| u64::from(!flipped[u * n + v]))
}

/// Chain-induced middles with `k` distinct triples redesignated to one of
/// their two outer vertices.
pub fn bt_flips(n: usize, k: usize, seed: u64) -> Result<BetweennessInstance> {
    let triples = triple_count(n);
    if k > triples {
        return Err(Error::Invalid(format!("{k} redesignations requested, only {triples} triples")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = BetweennessInstance::from_chain(n);
    let mut picked: Vec<usize> = sample(&mut rng, triples, k).into_vec();
    picked.sort_unstable();
    for i in picked {
        let (x, y, z) = triple_at(i);
        let m = if rng.gen_bool(0.5) { x } else { z };
        b.set_middle(x, y, z, m)?;
    }
    Ok(b)
}

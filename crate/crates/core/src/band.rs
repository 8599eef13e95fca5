//! Position bands around a seed ranking and the prefix-set dynamic program
//! shared by the FAST and betweenness solvers.
//!
//! Given a seed ranking and a radius `r(v)` per vertex, a set `S` is valid
//! when it contains every `v` with `pos(v) + r(v) <= |S|` (forced) and no `v`
//! with `pos(v) - r(v) > |S|` (excluded). The remaining vertices of size `s`
//! form `window(s)`; a valid set of size `s` is `forced(s)` plus a subset of
//! `window(s)`, so a layer of the DP is keyed by a bit mask over the window.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::ranking::Ranking;
use crate::VertexId;

/// Widest window a layer mask can address.
pub const MAX_ZONE: usize = 128;

pub(crate) type Mask = u128;

/// Allowed displacement `r(v)` of each vertex from its seed position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadiusMap(pub Vec<usize>);

impl RadiusMap {
    pub fn uniform(n: usize, r: usize) -> Self {
        RadiusMap(vec![r; n])
    }

    pub fn get(&self, v: VertexId) -> usize {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> usize {
        self.0.iter().copied().min().unwrap_or(0)
    }

    /// True when every vertex may take any position.
    pub fn is_full(&self, seed: &Ranking) -> bool {
        let n = seed.len();
        (0..n).all(|v| {
            let p = seed.position(v);
            self.0[v] >= (p - 1).max(n - p)
        })
    }
}

/// Forced/window decomposition of valid sets for every size `0..=n`.
#[derive(Clone, Debug)]
pub struct Band {
    seed: Ranking,
    radii: RadiusMap,
    // window(s) = { v : lo[v] <= s < hi[v] }, forced(s) = { v : hi[v] <= s }
    lo: Vec<i64>,
    hi: Vec<i64>,
    windows: Vec<Vec<VertexId>>,
    psi: usize,
}

impl Band {
    pub fn new(seed: &Ranking, radii: &RadiusMap) -> Self {
        let n = seed.len();
        assert_eq!(radii.len(), n, "one radius per vertex");
        let lo: Vec<i64> = (0..n)
            .map(|v| seed.position(v) as i64 - radii.get(v) as i64)
            .collect();
        let hi: Vec<i64> = (0..n)
            .map(|v| seed.position(v) as i64 + radii.get(v) as i64)
            .collect();
        let mut windows = Vec::with_capacity(n + 1);
        for s in 0..=n as i64 {
            let w: Vec<VertexId> = seed
                .order()
                .iter()
                .copied()
                .filter(|&v| lo[v] <= s && s < hi[v])
                .collect();
            windows.push(w);
        }
        let psi = windows.iter().map(Vec::len).max().unwrap_or(0);
        Band {
            seed: seed.clone(),
            radii: radii.clone(),
            lo,
            hi,
            windows,
            psi,
        }
    }

    pub fn n(&self) -> usize {
        self.seed.len()
    }

    pub fn seed(&self) -> &Ranking {
        &self.seed
    }

    pub fn radii(&self) -> &RadiusMap {
        &self.radii
    }

    /// Largest window over all sizes.
    pub fn psi(&self) -> usize {
        self.psi
    }

    /// Undetermined vertices for sets of size `s`, in seed order.
    pub fn window(&self, s: usize) -> &[VertexId] {
        &self.windows[s]
    }

    pub fn is_forced(&self, v: VertexId, s: usize) -> bool {
        self.hi[v] <= s as i64
    }

    pub fn is_excluded(&self, v: VertexId, s: usize) -> bool {
        self.lo[v] > s as i64
    }

    pub fn forced(&self, s: usize) -> Vec<VertexId> {
        (0..self.n()).filter(|&v| self.is_forced(v, s)).collect()
    }

    /// `|pi(v) - seed(v)| <= r(v)` for all `v`.
    pub fn contains(&self, pi: &Ranking) -> bool {
        (0..self.n()).all(|v| pi.position(v).abs_diff(self.seed.position(v)) <= self.radii.get(v))
    }

    /// Whether `set` (given as a membership vector) is a valid set.
    pub fn is_valid_set(&self, member: &[bool]) -> bool {
        let s = member.iter().filter(|&&m| m).count();
        (0..self.n()).all(|v| {
            if self.is_forced(v, s) {
                member[v]
            } else if self.is_excluded(v, s) {
                !member[v]
            } else {
                true
            }
        })
    }

    /// Number of valid sets summed over all sizes.
    pub fn valid_set_count(&self) -> u128 {
        (0..=self.n())
            .map(|s| {
                let forced = self.forced(s).len();
                let w = self.windows[s].len();
                if s < forced || s - forced > w {
                    0
                } else {
                    binomial(w, s - forced)
                }
            })
            .sum()
    }

    pub(crate) fn lo(&self, v: VertexId) -> i64 {
        self.lo[v]
    }

    pub(crate) fn hi(&self, v: VertexId) -> i64 {
        self.hi[v]
    }

    /// Candidates for the vertex placed at position `s`: `window(s-1)` plus
    /// the vertices that stop being excluded at `s`, in seed order.
    pub(crate) fn zone(&self, s: usize) -> Vec<VertexId> {
        let s = s as i64;
        self.seed
            .order()
            .iter()
            .copied()
            .filter(|&v| self.lo[v] <= s && s - 1 < self.hi[v])
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Resource guards and pruning for the banded DP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpOptions {
    /// Maximum window width when pruning is off.
    pub psi_cap: usize,
    /// Maximum number of stored states over all layers.
    pub state_cap: usize,
    /// Drop states whose cost plus a lower bound on the remainder exceeds
    /// an upper bound. Exact: the optimum and its tie-break are unchanged.
    pub prune: bool,
    pub execution: Execution,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions {
            psi_cap: 40,
            state_cap: 1 << 23,
            prune: true,
            execution: Execution::default(),
        }
    }
}

/// Cost increment of appending `v` to a prefix set, plus the change of the
/// prefix-only part of the lower bound.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Step {
    pub cost: u64,
    pub bound: i64,
}

/// Problem-specific transition costs for [`run`].
pub(crate) trait Transitions {
    type Layer: Sync;

    /// Lower bound on the total cost when nothing is placed yet, minus any
    /// layer bonus. Added to every state as its prefix-dependent part.
    fn initial_bound(&self) -> i64;

    /// Prepares the transitions into size `s` (called for `s = 1..=n` in
    /// order). `zone` is [`Band::zone`].
    fn layer(&mut self, band: &Band, s: usize, zone: &[VertexId]) -> Self::Layer;

    /// Increment for placing `zone[v]` at position `s` after the zone
    /// members in `present`.
    fn step(&self, layer: &Self::Layer, present: Mask, v: usize) -> Step;

    /// Extra lower bound valid for every set of size `s` (depends on `s` only).
    fn bonus(&self, _layer: &Self::Layer) -> i64 {
        0
    }
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    g: u64,
    bound: i64,
    last: u32,
    tie: u32,
}

impl Entry {
    #[inline]
    fn better_than(&self, other: &Entry) -> bool {
        (self.g, self.tie) < (other.g, other.tie)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct DpOutcome {
    pub ranking: Ranking,
    pub cost: u64,
    pub states: usize,
}

type LayerMap = FxHashMap<Mask, Entry>;

fn insert_best(map: &mut LayerMap, key: Mask, e: Entry) {
    map.entry(key)
        .and_modify(|cur| {
            if e.better_than(cur) {
                *cur = e;
            }
        })
        .or_insert(e);
}

/// Runs the layered DP over valid sets. `upper` is an inclusive upper bound
/// on the optimum used for pruning; `None` is returned only if pruning
/// removed every complete ranking (the band optimum exceeds `upper`).
pub(crate) fn run<T: Transitions + Sync>(
    band: &Band,
    trans: &mut T,
    opts: &DpOptions,
    upper: Option<u64>,
) -> Result<Option<DpOutcome>> {
    let n = band.n();
    let too_wide = |states: usize| Error::BandTooWide {
        psi: band.psi(),
        states,
        psi_cap: opts.psi_cap,
        state_cap: opts.state_cap,
    };
    if !opts.prune && band.psi() > opts.psi_cap {
        return Err(too_wide(0));
    }
    let upper = if opts.prune { upper } else { None };

    let mut layers: Vec<LayerMap> = Vec::with_capacity(n + 1);
    let mut first = LayerMap::default();
    first.insert(
        0,
        Entry {
            g: 0,
            bound: trans.initial_bound(),
            last: u32::MAX,
            tie: 0,
        },
    );
    layers.push(first);
    let mut total = 1usize;
    // scratch: slot of each vertex in the new window, u8::MAX if absent
    let mut slot_in = vec![usize::MAX; n];

    for s in 1..=n {
        let zone = band.zone(s);
        if zone.len() > MAX_ZONE {
            return Err(too_wide(total));
        }
        for (j, &v) in band.window(s).iter().enumerate() {
            slot_in[v] = j;
        }
        let mut zone_pos = vec![usize::MAX; n];
        for (j, &v) in zone.iter().enumerate() {
            zone_pos[v] = j;
        }
        let prev_to_zone: Vec<usize> = band.window(s - 1).iter().map(|&v| zone_pos[v]).collect();
        let zone_to_new: Vec<Option<usize>> = zone
            .iter()
            .map(|&v| (slot_in[v] != usize::MAX).then_some(slot_in[v]))
            .collect();
        let full: Mask = if zone.len() == MAX_ZONE {
            Mask::MAX
        } else {
            (1 << zone.len()) - 1
        };
        let must: Mask = zone
            .iter()
            .enumerate()
            .filter(|&(_, &v)| band.hi(v) == s as i64)
            .fold(0, |m, (j, _)| m | 1 << j);
        let ties: Vec<u32> = zone.iter().map(|&v| band.seed().slot(v) as u32).collect();
        let layer = trans.layer(band, s, &zone);
        let bonus = trans.bonus(&layer);
        let trans_ref: &T = trans;

        let prev: Vec<(Mask, Entry)> = layers[s - 1].iter().map(|(&k, &e)| (k, e)).collect();
        let next = exec::fold_reduce(
            opts.execution,
            &prev,
            LayerMap::default,
            |mut acc, &(mask, entry)| {
                let mut zmask: Mask = 0;
                let mut bits = mask;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    zmask |= 1 << prev_to_zone[i];
                }
                let absent = full & !zmask;
                let needed = must & absent;
                let cands = match needed.count_ones() {
                    0 => absent,
                    1 => needed,
                    _ => return acc,
                };
                let mut c = cands;
                while c != 0 {
                    let v = c.trailing_zeros() as usize;
                    c &= c - 1;
                    let st = trans_ref.step(&layer, zmask, v);
                    let g = entry.g + st.cost;
                    let bound = entry.bound + st.bound;
                    if let Some(ub) = upper {
                        if g as i64 + bound + bonus > ub as i64 {
                            continue;
                        }
                    }
                    let mut newz = zmask | 1 << v;
                    let mut key: Mask = 0;
                    while newz != 0 {
                        let j = newz.trailing_zeros() as usize;
                        newz &= newz - 1;
                        if let Some(k) = zone_to_new[j] {
                            key |= 1 << k;
                        }
                    }
                    insert_best(
                        &mut acc,
                        key,
                        Entry {
                            g,
                            bound,
                            last: zone[v] as u32,
                            tie: ties[v],
                        },
                    );
                }
                acc
            },
            |mut a, b| {
                if a.len() < b.len() {
                    return merge(b, a);
                }
                for (k, e) in b {
                    insert_best(&mut a, k, e);
                }
                a
            },
        );
        for &v in band.window(s) {
            slot_in[v] = usize::MAX;
        }
        total += next.len();
        if total > opts.state_cap {
            return Err(too_wide(total));
        }
        let empty = next.is_empty();
        layers.push(next);
        if empty {
            return Ok(None);
        }
    }

    // Backtrack from the unique full set.
    let mut order = Vec::with_capacity(n);
    let full_key: Mask = if band.window(n).len() == MAX_ZONE {
        Mask::MAX
    } else {
        (1 << band.window(n).len()) - 1
    };
    let top = layers[n][&full_key];
    let cost = top.g;
    let mut key = full_key;
    let mut in_new = vec![usize::MAX; n];
    for s in (1..=n).rev() {
        let e = layers[s][&key];
        let v = e.last as usize;
        order.push(v);
        for (j, &u) in band.window(s).iter().enumerate() {
            in_new[u] = j;
        }
        let mut prev: Mask = 0;
        for (i, &u) in band.window(s - 1).iter().enumerate() {
            let present = u != v
                && match in_new[u] {
                    usize::MAX => true,
                    j => key >> j & 1 == 1,
                };
            if present {
                prev |= 1 << i;
            }
        }
        for &u in band.window(s) {
            in_new[u] = usize::MAX;
        }
        key = prev;
    }
    order.reverse();
    Ok(Some(DpOutcome {
        ranking: Ranking::from_order(order).expect("DP reconstructs a permutation"),
        cost,
        states: total,
    }))
}

fn merge(mut a: LayerMap, b: LayerMap) -> LayerMap {
    for (k, e) in b {
        insert_best(&mut a, k, e);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_radius_band_is_a_path() {
        let seed = Ranking::identity(4);
        let band = Band::new(&seed, &RadiusMap::uniform(4, 0));
        assert_eq!(band.psi(), 0);
        assert_eq!(band.valid_set_count(), 5);
        for s in 0..=4 {
            assert_eq!(band.forced(s), (0..s).collect::<Vec<_>>());
        }
    }

    #[test]
    fn full_band_counts_all_subsets() {
        let seed = Ranking::identity(5);
        let r = RadiusMap::uniform(5, 5);
        assert!(r.is_full(&seed));
        let band = Band::new(&seed, &r);
        assert_eq!(band.valid_set_count(), 32);
        assert_eq!(band.psi(), 5);
    }

    #[test]
    fn valid_sets_are_forced_plus_window_subsets() {
        let seed = Ranking::from_order(vec![2, 0, 4, 1, 3, 5]).unwrap();
        let band = Band::new(&seed, &RadiusMap(vec![1, 0, 2, 1, 0, 1]));
        let n = 6;
        let mut brute = 0u128;
        for bits in 0u32..1 << n {
            let member: Vec<bool> = (0..n).map(|v| bits >> v & 1 == 1).collect();
            if band.is_valid_set(&member) {
                brute += 1;
                let s = bits.count_ones() as usize;
                for v in band.forced(s) {
                    assert!(member[v]);
                }
            }
        }
        assert_eq!(band.valid_set_count(), brute);
    }

    #[test]
    fn window_nesting() {
        let seed = Ranking::identity(8);
        let band = Band::new(&seed, &RadiusMap(vec![0, 2, 1, 3, 0, 2, 1, 1]));
        for s in 0..8 {
            for v in band.forced(s) {
                assert!(band.is_forced(v, s + 1));
            }
        }
    }
}

//! Exact weighted FAST: indegree seed, per-vertex radii, banded DP.
//!
//! An optimal ranking moves no vertex further than
//! `r(v) = 4 sqrt(2 C(seed)) + 2 b(seed, v, seed(v))` from its seed
//! position, so the optimum is found by a DP over prefix sets restricted to
//! that band. Costs here are numerators over the instance denominator `D`;
//! every radius is evaluated exactly in integers.

use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::band::{self, Band, DpOptions, Mask, RadiusMap, Step, Transitions};
use crate::error::{Error, Result};
use crate::kernel::{self, KernelResult};
use crate::ranking::{GapPosition, Ranking};
use crate::tournament::{Cost, WeightedTournament};
use crate::VertexId;

/// Sort by ascending weighted indegree `sum_u w_uv`, ties by vertex id.
pub fn approx_ranking(t: &WeightedTournament) -> Ranking {
    let indeg: Vec<u64> = (0..t.n()).map(|v| t.indegree(v)).collect();
    let mut order: Vec<VertexId> = (0..t.n()).collect();
    order.sort_by_key(|&v| (indeg[v], v));
    Ranking::from_order(order).expect("sorted vertex list")
}

/// Smallest integer `x` with `x * x >= a`.
pub(crate) fn ceil_sqrt(a: u128) -> u128 {
    let r = a.isqrt();
    if r * r == a {
        r
    } else {
        r + 1
    }
}

/// `r(v) = ceil(4 sqrt(2 C/D) + 2 b_v / D)` with `C = C(seed)` and
/// `b_v = b(seed, v, seed(v) + 1/2)`.
pub fn compute_radii(t: &WeightedTournament, seed: &Ranking) -> RadiusMap {
    let d = t.denom() as u128;
    let c = t.cost(seed).get() as u128;
    // r D >= 2 b + sqrt(32 C D)  <=>  r D >= 2 b + ceil_sqrt(32 C D)
    let root = ceil_sqrt(32 * c * d);
    RadiusMap(
        (0..t.n())
            .map(|v| {
                let b = t.own_local_cost(seed, v).get() as u128;
                (2 * b + root).div_ceil(d) as usize
            })
            .collect(),
    )
}

/// Greedy single-vertex reinsertion until no move lowers the cost.
pub fn improve_by_moves(t: &WeightedTournament, start: &Ranking) -> Ranking {
    let n = t.n();
    let mut order = start.order().to_vec();
    loop {
        let mut improved = false;
        for v in 0..n {
            let cur = order.iter().position(|&u| u == v).expect("vertex present");
            let rest: Vec<VertexId> = order.iter().copied().filter(|&u| u != v).collect();
            // b(g) for g = 0: every other vertex to the right
            let row = t.row(v);
            let mut b: u64 = rest.iter().map(|&u| t.w(u, v)).sum();
            let mut best = (b, 0usize);
            let mut at_cur = if cur == 0 { b } else { u64::MAX };
            for (g, &u) in rest.iter().enumerate() {
                b = b - t.w(u, v) + row[u];
                if b < best.0 {
                    best = (b, g + 1);
                }
                if g + 1 == cur {
                    at_cur = b;
                }
            }
            if best.0 < at_cur {
                let mut next = rest;
                next.insert(best.1, v);
                order = next;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ranking::from_order(order).expect("moves preserve the permutation")
}

/// Transition costs for the FAST prefix DP together with the lower bound
/// used for pruning: `cross(S) + sum of min weights over pairs outside S`,
/// strengthened per layer by a pair-disjoint triangle packing among the
/// vertices that are still excluded.
struct FastSteps<'a> {
    t: &'a WeightedTournament,
    in_w: Vec<u64>,
    min_w: Vec<u64>,
    acc_t: Vec<u64>,
    acc_min: Vec<u64>,
    by_hi: Vec<VertexId>,
    next_forced: usize,
    bonus: Vec<i64>,
    total_min: u64,
}

struct FastLayer {
    z: usize,
    base_t: Vec<u64>,
    base_min: Vec<u64>,
    wz: Vec<u64>,
    minz: Vec<u64>,
    k: Vec<i64>,
    bonus: i64,
}

impl<'a> FastSteps<'a> {
    fn new(t: &'a WeightedTournament, band: &Band, packing: bool) -> Self {
        let n = t.n();
        let in_w: Vec<u64> = (0..n).map(|v| t.indegree(v)).collect();
        let min_w: Vec<u64> = (0..n)
            .map(|v| {
                (0..n)
                    .filter(|&u| u != v)
                    .map(|u| t.w(u, v).min(t.w(v, u)))
                    .sum()
            })
            .collect();
        let total_min = min_w.iter().sum::<u64>() / 2;
        let mut by_hi: Vec<VertexId> = (0..n).collect();
        by_hi.sort_by_key(|&v| band.hi(v));
        let bonus = if packing {
            packing_bonus(t, band)
        } else {
            vec![0; n + 1]
        };
        FastSteps {
            t,
            in_w,
            min_w,
            acc_t: vec![0; n],
            acc_min: vec![0; n],
            by_hi,
            next_forced: 0,
            bonus,
            total_min,
        }
    }
}

impl Transitions for FastSteps<'_> {
    type Layer = FastLayer;

    fn initial_bound(&self) -> i64 {
        self.total_min as i64
    }

    fn layer(&mut self, band: &Band, s: usize, zone: &[VertexId]) -> FastLayer {
        let t = self.t;
        let n = t.n();
        // forced(s - 1) into the accumulators
        while self.next_forced < n && band.hi(self.by_hi[self.next_forced]) < s as i64 {
            let u = self.by_hi[self.next_forced];
            for v in 0..n {
                if v != u {
                    self.acc_t[v] += t.w(v, u);
                    self.acc_min[v] += t.w(v, u).min(t.w(u, v));
                }
            }
            self.next_forced += 1;
        }
        let z = zone.len();
        let mut wz = vec![0; z * z];
        let mut minz = vec![0; z * z];
        for (i, &v) in zone.iter().enumerate() {
            for (j, &u) in zone.iter().enumerate() {
                if i != j {
                    wz[i * z + j] = t.w(v, u);
                    minz[i * z + j] = t.w(v, u).min(t.w(u, v));
                }
            }
        }
        let placed = (s - 1) as i64 * t.denom() as i64;
        FastLayer {
            z,
            base_t: zone.iter().map(|&v| self.acc_t[v]).collect(),
            base_min: zone.iter().map(|&v| self.acc_min[v]).collect(),
            wz,
            minz,
            k: zone
                .iter()
                .map(|&v| self.in_w[v] as i64 - placed - self.min_w[v] as i64)
                .collect(),
            bonus: self.bonus[s],
        }
    }

    #[inline]
    fn step(&self, l: &FastLayer, present: Mask, v: usize) -> Step {
        let row = &l.wz[v * l.z..(v + 1) * l.z];
        let mrow = &l.minz[v * l.z..(v + 1) * l.z];
        let mut t = l.base_t[v];
        let mut m = l.base_min[v];
        let mut bits = present;
        while bits != 0 {
            let u = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            t += row[u];
            m += mrow[u];
        }
        Step {
            cost: t,
            bound: l.k[v] + m as i64,
        }
    }

    fn bonus(&self, l: &FastLayer) -> i64 {
        l.bonus
    }
}

/// `bonus[s]`: what a greedy pair-disjoint packing of majority triangles
/// inside `X_s = { v : lo(v) > s }` adds over the sum of minority weights of
/// those pairs. `X_s` lies after every valid set of size `s`.
fn packing_bonus(t: &WeightedTournament, band: &Band) -> Vec<i64> {
    let n = t.n();
    let mut bonus = vec![0i64; n + 1];
    let mut by_lo: Vec<VertexId> = (0..n).collect();
    by_lo.sort_by_key(|&v| std::cmp::Reverse(band.lo(v)));
    let mut used = vec![false; n * n];
    let mut members: Vec<VertexId> = Vec::new();
    let mut acc = 0i64;
    let mut next = 0;
    let maj = |u: VertexId, v: VertexId| {
        let (a, b) = (t.w(u, v), t.w(v, u));
        a > b || (a == b && u < v)
    };
    for s in (0..=n).rev() {
        while next < n && band.lo(by_lo[next]) > s as i64 {
            let x = by_lo[next];
            next += 1;
            for ai in 0..members.len() {
                let a = members[ai];
                if used[x * n + a] || !maj(x, a) {
                    continue;
                }
                for &b in &members {
                    if b == a || used[x * n + b] || used[a * n + b] {
                        continue;
                    }
                    if maj(a, b) && maj(b, x) {
                        let gain = triangle_gain(t, x, a, b);
                        if gain > 0 {
                            for (p, q) in [(x, a), (a, b), (b, x)] {
                                used[p * n + q] = true;
                                used[q * n + p] = true;
                            }
                            acc += gain;
                            break;
                        }
                    }
                }
            }
            members.push(x);
        }
        bonus[s] = acc;
    }
    bonus
}

fn triangle_gain(t: &WeightedTournament, a: VertexId, b: VertexId, c: VertexId) -> i64 {
    let perms = [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]];
    let best = perms
        .iter()
        .map(|p| t.w(p[1], p[0]) + t.w(p[2], p[0]) + t.w(p[2], p[1]))
        .min()
        .unwrap();
    let mins = t.w(a, b).min(t.w(b, a)) + t.w(b, c).min(t.w(c, b)) + t.w(a, c).min(t.w(c, a));
    best as i64 - mins as i64
}

/// Result of a banded solve on a single (kernel) instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandedSolution {
    pub ranking: Ranking,
    pub cost: Cost,
    pub dp_states: usize,
    pub psi: usize,
}

/// Minimum-cost ranking `pi` with `|pi(v) - seed(v)| <= r(v)` for all `v`.
/// Among equal-cost optima the DP prefers, at each step, the vertex with the
/// smaller seed position.
pub fn banded_dp(
    t: &WeightedTournament,
    seed: &Ranking,
    radii: &RadiusMap,
    opts: &DpOptions,
) -> Result<BandedSolution> {
    banded_dp_with_bound(t, seed, radii, opts, t.cost(seed))
}

/// As [`banded_dp`], pruning against `upper`, which must be at least the
/// band optimum (the cost of any ranking inside the band works; so does
/// any upper bound on OPT when the band is known to contain an optimum).
pub fn banded_dp_with_bound(
    t: &WeightedTournament,
    seed: &Ranking,
    radii: &RadiusMap,
    opts: &DpOptions,
    upper: Cost,
) -> Result<BandedSolution> {
    let band = Band::new(seed, radii);
    let mut steps = FastSteps::new(t, &band, opts.prune);
    let out = band::run(&band, &mut steps, opts, Some(upper.get()))?.ok_or_else(|| {
        Error::Invalid(format!(
            "upper bound {} is below the band optimum",
            upper.get()
        ))
    })?;
    Ok(BandedSolution {
        ranking: out.ranking,
        cost: Cost(out.cost),
        dp_states: out.states,
        psi: band.psi(),
    })
}

/// Polynomial-space variant: split every segment of prefix sizes at its
/// midpoint, enumerate the valid middle sets and solve both halves
/// recursively. `work_cap` bounds the number of middle sets examined.
pub fn banded_divide_conquer(
    t: &WeightedTournament,
    seed: &Ranking,
    radii: &RadiusMap,
    work_cap: u64,
) -> Result<(Ranking, Cost)> {
    let band = Band::new(seed, radii);
    let n = t.n();
    let mut dc = DivideConquer {
        t,
        band: &band,
        work: 0,
        work_cap,
    };
    let empty = FixedBitSet::with_capacity(n);
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    match dc.segment(&empty, &all)? {
        Some((cost, order)) => Ok((
            Ranking::from_order(order).expect("segments cover every vertex"),
            Cost(cost),
        )),
        None => Err(Error::Invalid("band admits no valid ranking".into())),
    }
}

struct DivideConquer<'a> {
    t: &'a WeightedTournament,
    band: &'a Band,
    work: u64,
    work_cap: u64,
}

impl DivideConquer<'_> {
    /// Cheapest way to append `hi \ lo` after `lo` through valid prefixes.
    fn segment(
        &mut self,
        lo: &FixedBitSet,
        hi: &FixedBitSet,
    ) -> Result<Option<(u64, Vec<VertexId>)>> {
        let (a, b) = (lo.count_ones(..), hi.count_ones(..));
        if a == b {
            return Ok(Some((0, Vec::new())));
        }
        if b - a == 1 {
            let v = hi.difference(lo).next().expect("one new vertex");
            let c = lo.ones().map(|u| self.t.w(v, u)).sum();
            return Ok(Some((c, vec![v])));
        }
        let mid = a + (b - a).div_ceil(2);
        let mut base = lo.clone();
        let mut free = Vec::new();
        for v in hi.difference(lo) {
            if self.band.is_forced(v, mid) {
                base.insert(v);
            } else if !self.band.is_excluded(v, mid) {
                free.push(v);
            }
        }
        // forced vertices outside `hi` or excluded ones inside `lo` make
        // every middle set invalid
        let n = self.t.n();
        for v in 0..n {
            if self.band.is_forced(v, mid) && !hi.contains(v) {
                return Ok(None);
            }
            if self.band.is_excluded(v, mid) && lo.contains(v) {
                return Ok(None);
            }
        }
        let have = base.count_ones(..);
        if have > mid || mid - have > free.len() {
            return Ok(None);
        }
        let k = mid - have;
        let mut best: Option<(u64, Vec<VertexId>)> = None;
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            self.work += 1;
            if self.work > self.work_cap {
                return Err(Error::BandTooWide {
                    psi: self.band.psi(),
                    states: self.work as usize,
                    psi_cap: 0,
                    state_cap: self.work_cap as usize,
                });
            }
            let mut m = base.clone();
            for &i in &pick {
                m.insert(free[i]);
            }
            if let Some((c1, o1)) = self.segment(lo, &m)? {
                if best.as_ref().is_none_or(|(bc, _)| c1 < *bc) {
                    if let Some((c2, o2)) = self.segment(&m, hi)? {
                        let c = c1 + c2;
                        if best.as_ref().is_none_or(|(bc, _)| c < *bc) {
                            let mut o = o1;
                            o.extend(o2);
                            best = Some((c, o));
                        }
                    }
                }
            }
            if !next_combination(&mut pick, free.len()) {
                break;
            }
        }
        Ok(best)
    }
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KernelMode {
    /// Kernelize only when `n` exceeds the `60 (U/D)^2` size bound.
    #[default]
    Auto,
    Always,
    Never,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    #[default]
    DynamicProgram,
    DivideAndConquer,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub kernel: KernelMode,
    pub method: Method,
    pub dp: DpOptions,
    /// Middle-set budget for [`Method::DivideAndConquer`].
    pub dc_work_cap: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            kernel: KernelMode::Auto,
            method: Method::DynamicProgram,
            dp: DpOptions::default(),
            dc_work_cap: 50_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub ranking: Ranking,
    pub cost: Cost,
    pub denom: u64,
    pub kernel_shift: Cost,
    pub kernel_size: usize,
    pub psi: usize,
    pub dp_states: usize,
    #[serde(rename = "millis", serialize_with = "as_millis")]
    pub elapsed: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

/// Kernel, indegree seed, radii and banded DP; returns an optimal ranking of
/// the full instance.
pub fn solve_fast(t: &WeightedTournament, opts: &SolveOptions) -> Result<SolveReport> {
    t.check()?;
    let start = Instant::now();
    let seed0 = approx_ranking(t);
    let upper0 = t.cost(&seed0);
    let kr = match opts.kernel {
        KernelMode::Never => KernelResult::identity(t),
        KernelMode::Always => kernel::kernelize(t, upper0),
        KernelMode::Auto => {
            if kernel::within_kernel_bound(t.n(), upper0, t.denom()) {
                KernelResult::identity(t)
            } else {
                kernel::kernelize(t, upper0)
            }
        }
    };
    let k = &kr.kernel;
    let (kernel_ranking, psi, states) = if k.n() == 0 {
        (Ranking::identity(0), 0, 1)
    } else {
        let seed = approx_ranking(k);
        let radii = compute_radii(k, &seed);
        match opts.method {
            Method::DynamicProgram => {
                let local = improve_by_moves(k, &seed);
                let upper = k.cost(&seed).min(k.cost(&local));
                let sol = banded_dp_with_bound(k, &seed, &radii, &opts.dp, upper)?;
                (sol.ranking, sol.psi, sol.dp_states)
            }
            Method::DivideAndConquer => {
                let band = Band::new(&seed, &radii);
                if band.psi() > opts.dp.psi_cap {
                    return Err(Error::BandTooWide {
                        psi: band.psi(),
                        states: 0,
                        psi_cap: opts.dp.psi_cap,
                        state_cap: opts.dc_work_cap as usize,
                    });
                }
                let (r, _) = banded_divide_conquer(k, &seed, &radii, opts.dc_work_cap)?;
                (r, band.psi(), 0)
            }
        }
    };
    let ranking = kr.lift(&kernel_ranking);
    let cost = t.cost(&ranking);
    debug_assert_eq!(cost, k.cost(&kernel_ranking) + kr.shift);
    Ok(SolveReport {
        ranking,
        cost,
        denom: t.denom(),
        kernel_shift: kr.shift,
        kernel_size: k.n(),
        psi,
        dp_states: states,
        elapsed: start.elapsed(),
    })
}

/// Local cost of `v` at its seed slot, as used by the radius formula.
pub fn seed_local_cost(t: &WeightedTournament, seed: &Ranking, v: VertexId) -> Cost {
    t.local_cost(seed, v, GapPosition::after(seed.position(v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_cycle() -> WeightedTournament {
        WeightedTournament::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn flipped(n: usize, pairs: &[(usize, usize)]) -> WeightedTournament {
        WeightedTournament::from_pairs(n, 1, |u, v| u64::from(!pairs.contains(&(u, v)))).unwrap()
    }

    fn no_prune() -> DpOptions {
        DpOptions {
            prune: false,
            ..DpOptions::default()
        }
    }

    #[test]
    fn approx_examples() {
        assert_eq!(approx_ranking(&WeightedTournament::chain(4)).order(), &[0, 1, 2, 3]);
        assert_eq!(approx_ranking(&three_cycle()).order(), &[0, 1, 2]);
        assert_eq!(approx_ranking(&flipped(3, &[(0, 1)])).order(), &[1, 0, 2]);
    }

    #[test]
    fn radii_examples() {
        let chain = WeightedTournament::chain(6);
        assert_eq!(compute_radii(&chain, &Ranking::identity(6)), RadiusMap::uniform(6, 0));
        let r = compute_radii(&three_cycle(), &Ranking::identity(3));
        assert_eq!(r.get(0), 8);
    }

    #[test]
    fn ceil_sqrt_exact() {
        for a in 0u128..2000 {
            let r = ceil_sqrt(a);
            assert!(r * r >= a);
            assert!(r == 0 || (r - 1) * (r - 1) < a);
        }
    }

    #[test]
    fn dp_chain_zero_radius() {
        let t = WeightedTournament::chain(4);
        for opts in [DpOptions::default(), no_prune()] {
            let sol = banded_dp(&t, &Ranking::identity(4), &RadiusMap::uniform(4, 0), &opts).unwrap();
            assert_eq!(sol.ranking.order(), &[0, 1, 2, 3]);
            assert_eq!(sol.cost, Cost(0));
            assert_eq!(sol.dp_states, 5);
        }
    }

    #[test]
    fn dp_three_cycle() {
        let t = three_cycle();
        let sol = banded_dp(&t, &Ranking::identity(3), &RadiusMap::uniform(3, 8), &no_prune()).unwrap();
        assert_eq!(sol.cost, Cost(1));
        assert_eq!(t.cost(&sol.ranking), Cost(1));
    }

    #[test]
    fn dp_flipped_chain() {
        let t = flipped(5, &[(0, 3)]);
        let sol = banded_dp(&t, &Ranking::identity(5), &RadiusMap::uniform(5, 5), &no_prune()).unwrap();
        assert_eq!(sol.cost, Cost(1));
    }

    #[test]
    fn divide_conquer_examples() {
        let t = WeightedTournament::chain(4);
        let (r, c) = banded_divide_conquer(&t, &Ranking::identity(4), &RadiusMap::uniform(4, 0), 1000).unwrap();
        assert_eq!(c, Cost(0));
        assert_eq!(r.order(), &[0, 1, 2, 3]);
        let (r, c) = banded_divide_conquer(&three_cycle(), &Ranking::identity(3), &RadiusMap::uniform(3, 8), 1000)
            .unwrap();
        assert_eq!(c, Cost(1));
        assert_eq!(three_cycle().cost(&r), Cost(1));
    }

    #[test]
    fn divide_conquer_work_cap() {
        let t = flipped(8, &[(0, 7), (1, 5)]);
        let err = banded_divide_conquer(&t, &Ranking::identity(8), &RadiusMap::uniform(8, 8), 3).unwrap_err();
        assert!(err.is_resource_guard());
    }

    #[test]
    fn psi_cap_without_pruning() {
        let t = flipped(8, &[(0, 7)]);
        let opts = DpOptions {
            psi_cap: 3,
            prune: false,
            ..DpOptions::default()
        };
        let err = banded_dp(&t, &Ranking::identity(8), &RadiusMap::uniform(8, 8), &opts).unwrap_err();
        assert!(matches!(err, Error::BandTooWide { psi: 8, .. }));
    }

    #[test]
    fn solve_examples() {
        let r = solve_fast(&WeightedTournament::chain(50), &SolveOptions::default()).unwrap();
        assert_eq!(r.cost, Cost(0));
        assert_eq!(r.psi, 0);
        let r = solve_fast(&three_cycle(), &SolveOptions::default()).unwrap();
        assert_eq!(r.cost, Cost(1));
    }

    #[test]
    fn local_search_never_worse() {
        let t = flipped(7, &[(0, 4), (2, 6), (1, 3)]);
        let seed = approx_ranking(&t);
        let better = improve_by_moves(&t, &seed);
        assert!(t.cost(&better) <= t.cost(&seed));
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut pick = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut pick, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
        let mut empty: Vec<usize> = vec![];
        assert!(!next_combination(&mut empty, 3));
    }
}

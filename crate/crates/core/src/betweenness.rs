//! Exact betweenness tournament.
//!
//! Every triple of vertices carries one designated middle vertex; a ranking
//! pays one unit for each triple whose designated vertex does not sit between
//! the other two. The solver seeds from a handful of locally optimal
//! rankings, bands each of them with radii
//! `r(v) = a1 sqrt(C/n) + a2 b(v)/n`, and runs the prefix DP whose state
//! cost counts the constraints with at most one vertex outside the prefix.
//! Since the constants `a1, a2` are not pinned down, radii are doubled until
//! two consecutive bands agree or the band covers every position.

use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::band::{self, Band, DpOptions, Mask, RadiusMap, Step, Transitions};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::fast::ceil_sqrt;
use crate::ranking::{GapPosition, Ordering, Ranking};
use crate::tournament::Cost;
use crate::VertexId;

/// Unit-cost constraint system over ordered vertex triples.
pub trait TripleCost: Sync {
    fn n(&self) -> usize;

    /// Whether placing `first < second < third` violates the constraint on
    /// these three vertices.
    fn violated(&self, first: VertexId, second: VertexId, third: VertexId) -> bool;
}

/// Dense betweenness instance: a designated middle for every triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetweennessInstance {
    n: usize,
    // index of the designated vertex (0, 1, 2) within the sorted triple
    mid: Vec<u8>,
}

#[inline]
fn sort3(a: usize, b: usize, c: usize) -> (usize, usize, usize) {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let (b, c) = if b < c { (b, c) } else { (c, b) };
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    (a, b, c)
}

#[inline]
pub(crate) fn triple_index(a: usize, b: usize, c: usize) -> usize {
    // a < b < c
    c * (c - 1) * (c - 2) / 6 + b * (b - 1) / 2 + a
}

pub fn triple_count(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

impl BetweennessInstance {
    /// `f(a, b, c)` is asked for every `a < b < c` and must return one of them.
    pub fn from_fn(n: usize, mut f: impl FnMut(VertexId, VertexId, VertexId) -> VertexId) -> Result<Self> {
        let mut mid = vec![0u8; triple_count(n)];
        for c in 0..n {
            for b in 0..c {
                for a in 0..b {
                    let m = f(a, b, c);
                    mid[triple_index(a, b, c)] = position_in(a, b, c, m)?;
                }
            }
        }
        Ok(BetweennessInstance { n, mid })
    }

    /// Instance satisfied exactly by the identity order and its reverse.
    pub fn from_chain(n: usize) -> Self {
        BetweennessInstance {
            n,
            mid: vec![1; triple_count(n)],
        }
    }

    /// Instance whose designated middles are the positional medians in `pi`.
    pub fn from_ranking(pi: &Ranking) -> Self {
        BetweennessInstance::from_fn(pi.len(), |a, b, c| {
            let mut t = [a, b, c];
            t.sort_by_key(|&v| pi.slot(v));
            t[1]
        })
        .expect("median is a member")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Designated middle of `{a, b, c}` (any order).
    #[inline]
    pub fn middle(&self, a: VertexId, b: VertexId, c: VertexId) -> VertexId {
        let (a, b, c) = sort3(a, b, c);
        match self.mid[triple_index(a, b, c)] {
            0 => a,
            1 => b,
            _ => c,
        }
    }

    pub fn set_middle(&mut self, a: VertexId, b: VertexId, c: VertexId, m: VertexId) -> Result<()> {
        if a == b || b == c || a == c || a.max(b).max(c) >= self.n {
            return Err(Error::Invalid(format!("bad triple ({a}, {b}, {c})")));
        }
        let (a, b, c) = sort3(a, b, c);
        self.mid[triple_index(a, b, c)] = position_in(a, b, c, m)?;
        Ok(())
    }

    /// All triples `a < b < c` with their designated middle.
    pub fn triples(&self) -> impl Iterator<Item = (VertexId, VertexId, VertexId, VertexId)> + '_ {
        (0..self.n).flat_map(move |c| {
            (0..c).flat_map(move |b| (0..b).map(move |a| (a, b, c, self.middle(a, b, c))))
        })
    }
}

fn position_in(a: usize, b: usize, c: usize, m: usize) -> Result<u8> {
    if m == a {
        Ok(0)
    } else if m == b {
        Ok(1)
    } else if m == c {
        Ok(2)
    } else {
        Err(Error::Invalid(format!(
            "middle {m} is not in triple ({a}, {b}, {c})"
        )))
    }
}

impl TripleCost for BetweennessInstance {
    fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn violated(&self, _first: VertexId, second: VertexId, third: VertexId) -> bool {
        self.middle(_first, second, third) != second
    }
}

/// Number of violated triples under `pi`.
pub fn bt_cost<C: TripleCost + ?Sized>(b: &C, pi: &Ranking) -> Cost {
    let o = pi.order();
    let n = o.len();
    let mut c = 0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                c += b.violated(o[i], o[j], o[k]) as u64;
            }
        }
    }
    Cost(c)
}

/// Cost of the constraints through `v` once `v` is placed at `p` next to
/// the other vertices of `sigma` (v's own entry, if any, is ignored).
pub fn bt_b<C: TripleCost + ?Sized>(
    b: &C,
    sigma: &Ordering,
    v: VertexId,
    p: Rational64,
) -> Result<Cost> {
    if sigma.iter().any(|(u, q)| u != v && q == p) {
        return Err(Error::PositionCollision(p.to_string()));
    }
    let others: Vec<(Rational64, VertexId)> = {
        let mut o: Vec<_> = sigma.iter().filter(|&(u, _)| u != v).map(|(u, q)| (q, u)).collect();
        o.sort();
        o
    };
    let mut c = 0;
    for i in 0..others.len() {
        for j in i + 1..others.len() {
            let (px, x) = others[i];
            let (py, y) = others[j];
            let viol = if p < px {
                b.violated(v, x, y)
            } else if p < py {
                b.violated(x, v, y)
            } else {
                b.violated(x, y, v)
            };
            c += viol as u64;
        }
    }
    Ok(Cost(c))
}

/// [`bt_b`] for a ranking and a half-integer gap.
pub fn bt_b_gap<C: TripleCost + ?Sized>(b: &C, pi: &Ranking, v: VertexId, g: GapPosition) -> Cost {
    let o: Vec<VertexId> = pi.order().to_vec();
    let mut c = 0;
    for i in 0..o.len() {
        if o[i] == v {
            continue;
        }
        for j in i + 1..o.len() {
            if o[j] == v {
                continue;
            }
            let viol = if g.is_right_of(j) {
                b.violated(o[i], o[j], v)
            } else if g.is_right_of(i) {
                b.violated(o[i], v, o[j])
            } else {
                b.violated(v, o[i], o[j])
            };
            c += viol as u64;
        }
    }
    Cost(c)
}

/// Local cost of `v` at its own position.
pub fn bt_own_local_cost<C: TripleCost + ?Sized>(b: &C, pi: &Ranking, v: VertexId) -> Cost {
    bt_b_gap(b, pi, v, GapPosition::after(pi.position(v)))
}

/// Seed rankings with their costs, best first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    pub rankings: Vec<(Ranking, Cost)>,
}

impl CandidateSet {
    pub fn best(&self) -> &(Ranking, Cost) {
        &self.rankings[0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CandidateOptions {
    pub starts: usize,
    pub max_candidates: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for CandidateOptions {
    fn default() -> Self {
        CandidateOptions {
            starts: 20,
            max_candidates: 8,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

/// Supplies seed rankings to [`solve_betweenness`].
pub trait CandidateProvider: Sync {
    fn candidates(&self, b: &BetweennessInstance) -> CandidateSet;
}

/// Single-vertex-move local search from random starts. Carries no
/// distance-to-optimum guarantee; radius escalation makes up for it.
#[derive(Clone, Copy, Debug, Default)]
pub struct LocalSearchProvider(pub CandidateOptions);

impl CandidateProvider for LocalSearchProvider {
    fn candidates(&self, b: &BetweennessInstance) -> CandidateSet {
        candidate_rankings(b, &self.0)
    }
}

/// Distinct local optima (up to reversal) of single-vertex moves from
/// `opts.starts` random permutations, cheapest `opts.max_candidates` kept.
pub fn candidate_rankings<C: TripleCost + ?Sized>(b: &C, opts: &CandidateOptions) -> CandidateSet {
    let n = b.n();
    let starts = opts.starts.max(1);
    let mut found: Vec<(Ranking, Cost)> = exec::map_range(opts.execution, starts, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(i as u64);
        let mut order: Vec<VertexId> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut r = local_search(b, order);
        if n > 1 && r.order()[0] > r.order()[n - 1] {
            r = r.reversed();
        }
        let c = bt_cost(b, &r);
        (r, c)
    });
    found.sort_by(|x, y| (x.1, x.0.order()).cmp(&(y.1, y.0.order())));
    found.dedup_by(|x, y| x.0 == y.0);
    found.truncate(opts.max_candidates.max(1));
    CandidateSet { rankings: found }
}

/// Moves single vertices to their best gap until no move helps.
pub fn local_search<C: TripleCost + ?Sized>(b: &C, mut order: Vec<VertexId>) -> Ranking {
    let n = order.len();
    loop {
        let mut improved = false;
        for v in 0..n {
            let cur = order.iter().position(|&u| u == v).expect("vertex present");
            let rest: Vec<VertexId> = order.iter().copied().filter(|&u| u != v).collect();
            let m = rest.len();
            // cost with v in front
            let mut c: i64 = 0;
            for i in 0..m {
                for j in i + 1..m {
                    c += b.violated(v, rest[i], rest[j]) as i64;
                }
            }
            let mut best = (c, 0usize);
            let mut at_cur = if cur == 0 { c } else { i64::MAX };
            for g in 0..m {
                // v crosses x = rest[g]
                let x = rest[g];
                let mut delta = 0i64;
                for (k, &y) in rest.iter().enumerate() {
                    if k < g {
                        delta += b.violated(y, x, v) as i64 - b.violated(y, v, x) as i64;
                    } else if k > g {
                        delta += b.violated(x, v, y) as i64 - b.violated(v, x, y) as i64;
                    }
                }
                c += delta;
                if c < best.0 {
                    best = (c, g + 1);
                }
                if g + 1 == cur {
                    at_cur = c;
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

/// `(a1, a2)` as exact fractions plus the escalation policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BtRadiusParams {
    pub alpha1: (u64, u64),
    pub alpha2: (u64, u64),
    pub factor: u64,
    pub max_escalations: usize,
}

impl Default for BtRadiusParams {
    fn default() -> Self {
        BtRadiusParams {
            alpha1: (4, 1),
            alpha2: (4, 1),
            factor: 2,
            max_escalations: 8,
        }
    }
}

impl BtRadiusParams {
    pub fn scaled(&self, times: u64) -> Self {
        BtRadiusParams {
            alpha1: (self.alpha1.0 * times, self.alpha1.1),
            alpha2: (self.alpha2.0 * times, self.alpha2.1),
            ..*self
        }
    }
}

/// `r(v) = ceil(a1 sqrt(C/n) + a2 b(v)/n)`, capped at `n`.
pub fn compute_radii_bt<C: TripleCost + ?Sized>(
    b: &C,
    seed: &Ranking,
    params: &BtRadiusParams,
) -> RadiusMap {
    let n = b.n();
    if n == 0 {
        return RadiusMap(Vec::new());
    }
    let c = bt_cost(b, seed).get() as u128;
    let (p1, q1) = (params.alpha1.0 as u128, params.alpha1.1 as u128);
    let (p2, q2) = (params.alpha2.0 as u128, params.alpha2.1 as u128);
    // r n q1 q2 >= p1 q2 sqrt(C n) + p2 q1 b
    let root = ceil_sqrt(p1 * p1 * q2 * q2 * c * n as u128);
    let scale = n as u128 * q1 * q2;
    RadiusMap(
        (0..n)
            .map(|v| {
                let bv = bt_own_local_cost(b, seed, v).get() as u128;
                let r = (p2 * q1 * bv + root).div_ceil(scale);
                r.min(n as u128) as usize
            })
            .collect(),
    )
}

/// Transition costs: placing `v` after prefix `S` settles every triple
/// `{u, v, q}` with `u` in `S` and `q` outside `S + v` as `u < v < q`.
struct BtSteps<'a, C: ?Sized> {
    b: &'a C,
}

struct BtLayer {
    z: usize,
    base: Vec<u64>,
    // [v * z + q]: violations with u in forced(s-1), q = zone[q]
    col_forced: Vec<u64>,
    // [v * z + u]: violations with u = zone[u], q excluded at s
    row_excluded: Vec<u64>,
    // [v * z + u]: mask of zone q violating (zone[u], zone[v], zone[q])
    inner: Vec<Mask>,
}

impl<C: TripleCost + ?Sized> Transitions for BtSteps<'_, C> {
    type Layer = BtLayer;

    fn initial_bound(&self) -> i64 {
        0
    }

    fn layer(&mut self, band: &Band, s: usize, zone: &[VertexId]) -> BtLayer {
        let n = band.n();
        let forced: Vec<VertexId> = (0..n).filter(|&u| band.is_forced(u, s - 1)).collect();
        let excluded: Vec<VertexId> = (0..n).filter(|&q| band.is_excluded(q, s)).collect();
        let z = zone.len();
        let b = self.b;
        let mut base = vec![0; z];
        let mut col_forced = vec![0; z * z];
        let mut row_excluded = vec![0; z * z];
        let mut inner = vec![0 as Mask; z * z];
        for (i, &v) in zone.iter().enumerate() {
            base[i] = forced
                .iter()
                .map(|&u| excluded.iter().filter(|&&q| b.violated(u, v, q)).count() as u64)
                .sum();
            for (j, &x) in zone.iter().enumerate() {
                if j == i {
                    continue;
                }
                col_forced[i * z + j] = forced.iter().filter(|&&u| b.violated(u, v, x)).count() as u64;
                row_excluded[i * z + j] = excluded.iter().filter(|&&q| b.violated(x, v, q)).count() as u64;
                let mut m: Mask = 0;
                for (k, &q) in zone.iter().enumerate() {
                    if k != i && k != j && b.violated(x, v, q) {
                        m |= 1 << k;
                    }
                }
                inner[i * z + j] = m;
            }
        }
        BtLayer {
            z,
            base,
            col_forced,
            row_excluded,
            inner,
        }
    }

    #[inline]
    fn step(&self, l: &BtLayer, present: Mask, v: usize) -> Step {
        let full: Mask = if l.z == band::MAX_ZONE {
            Mask::MAX
        } else {
            (1 << l.z) - 1
        };
        let absent = full & !present & !(1 << v);
        let z = l.z;
        let mut c = l.base[v];
        let mut bits = absent;
        while bits != 0 {
            let q = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            c += l.col_forced[v * z + q];
        }
        let mut bits = present;
        while bits != 0 {
            let u = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            c += l.row_excluded[v * z + u] + (l.inner[v * z + u] & absent).count_ones() as u64;
        }
        Step { cost: c, bound: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BtBandedSolution {
    pub ranking: Ranking,
    pub cost: Cost,
    pub dp_states: usize,
    pub psi: usize,
}

/// Minimum-cost ranking inside the band around `seed`.
pub fn banded_dp_bt<C: TripleCost + ?Sized>(
    b: &C,
    seed: &Ranking,
    radii: &RadiusMap,
    opts: &DpOptions,
) -> Result<BtBandedSolution> {
    let band = Band::new(seed, radii);
    let upper = bt_cost(b, seed).get();
    let mut steps = BtSteps { b };
    let out = band::run(&band, &mut steps, opts, Some(upper))?
        .expect("the seed itself lies in its band");
    Ok(BtBandedSolution {
        ranking: out.ranking,
        cost: Cost(out.cost),
        dp_states: out.states,
        psi: band.psi(),
    })
}

#[derive(Clone, Debug)]
pub struct BtOptions {
    pub candidates: CandidateOptions,
    pub radius: BtRadiusParams,
    pub escalate: bool,
    pub dp: DpOptions,
}

impl Default for BtOptions {
    fn default() -> Self {
        BtOptions {
            candidates: CandidateOptions::default(),
            radius: BtRadiusParams::default(),
            escalate: true,
            dp: DpOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BtReport {
    pub ranking: Ranking,
    pub cost: Cost,
    /// Window width of the band that produced `ranking`.
    pub psi: usize,
    /// States over every DP run of the solve.
    pub dp_states: usize,
    pub candidates: usize,
    /// Radius doublings over all candidates.
    pub escalations: usize,
    /// True when the winning band covered every position, so the result is
    /// optimal regardless of the seed quality.
    pub exhaustive: bool,
    #[serde(rename = "millis", serialize_with = "as_millis")]
    pub elapsed: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

struct CandidateRun {
    sol: BtBandedSolution,
    states: usize,
    escalations: usize,
    exhaustive: bool,
}

fn run_candidate(b: &BetweennessInstance, seed: &Ranking, opts: &BtOptions) -> Result<CandidateRun> {
    let mut mult = 1u64;
    let radii = compute_radii_bt(b, seed, &opts.radius);
    let mut prev = banded_dp_bt(b, seed, &radii, &opts.dp)?;
    let mut states = prev.dp_states;
    if radii.is_full(seed) || !opts.escalate {
        return Ok(CandidateRun {
            exhaustive: radii.is_full(seed),
            sol: prev,
            states,
            escalations: 0,
        });
    }
    for round in 1..=opts.radius.max_escalations {
        mult *= opts.radius.factor;
        let radii = compute_radii_bt(b, seed, &opts.radius.scaled(mult));
        let cur = banded_dp_bt(b, seed, &radii, &opts.dp)?;
        states += cur.dp_states;
        if radii.is_full(seed) {
            return Ok(CandidateRun {
                sol: cur,
                states,
                escalations: round,
                exhaustive: true,
            });
        }
        if cur.cost == prev.cost {
            return Ok(CandidateRun {
                sol: prev,
                states,
                escalations: round,
                exhaustive: false,
            });
        }
        prev = cur;
    }
    Err(Error::BandTooWide {
        psi: prev.psi,
        states,
        psi_cap: opts.dp.psi_cap,
        state_cap: opts.dp.state_cap,
    })
}

/// Best banded optimum over the candidates whose cost is at most twice the
/// cheapest one.
pub fn solve_betweenness(b: &BetweennessInstance, opts: &BtOptions) -> Result<BtReport> {
    solve_betweenness_with(b, &LocalSearchProvider(opts.candidates), opts)
}

pub fn solve_betweenness_with<P: CandidateProvider + ?Sized>(
    b: &BetweennessInstance,
    provider: &P,
    opts: &BtOptions,
) -> Result<BtReport> {
    let start = Instant::now();
    let n = b.n();
    if n < 3 {
        return Ok(BtReport {
            ranking: Ranking::identity(n),
            cost: Cost(0),
            psi: 0,
            dp_states: 0,
            candidates: 0,
            escalations: 0,
            exhaustive: true,
            elapsed: start.elapsed(),
        });
    }
    let cands = provider.candidates(b);
    let good = cands.best().1;
    let eligible: Vec<&Ranking> = cands
        .rankings
        .iter()
        .filter(|(_, c)| c.get() <= 2 * good.get())
        .map(|(r, _)| r)
        .collect();
    let runs = exec::map(opts.candidates.execution, &eligible, |seed| run_candidate(b, seed, opts));
    let mut best: Option<CandidateRun> = None;
    let mut states = 0;
    let mut escalations = 0;
    for run in runs {
        let run = run?;
        states += run.states;
        escalations += run.escalations;
        if best.as_ref().is_none_or(|bst| run.sol.cost < bst.sol.cost) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one candidate passes the guard");
    Ok(BtReport {
        cost: best.sol.cost,
        psi: best.sol.psi,
        ranking: best.sol.ranking,
        dp_states: states,
        candidates: eligible.len(),
        escalations,
        exhaustive: best.exhaustive,
        elapsed: start.elapsed(),
    })
}

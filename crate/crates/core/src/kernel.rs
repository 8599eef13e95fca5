//! Kernelization of weighted FAST down to `O(OPT^2)` vertices.
//!
//! Two rules are applied to a fixpoint on the majority tournament:
//!
//! 1. a vertex that lies on no directed triangle is removed. Its majority
//!    predecessors can all be ranked before it and its successors after it,
//!    so it contributes exactly the minority weight of its arcs;
//! 2. a majority arc `(u, v)` on more than `2U` directed triangles must be
//!    paid in every optimal ranking when `U >= OPT`. Its weight `w_uv` is
//!    added to the shift and the pair is fixed to `w_uv = 0, w_vu = D`.
//!
//! Rule 2 is tried on every arc first, then rule 1, and the two alternate
//! until neither applies.

use crate::ranking::Ranking;
use crate::tournament::{Cost, WeightedTournament};
use crate::VertexId;

/// Fixed-size bit rows, one per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
struct BitRows {
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitRows {
            words,
            bits: vec![0; n * words],
        }
    }

    #[inline]
    fn row(&self, u: usize) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    fn get(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, u: usize, v: usize, on: bool) {
        let w = &mut self.bits[u * self.words + v / 64];
        if on {
            *w |= 1 << (v % 64);
        } else {
            *w &= !(1 << (v % 64));
        }
    }
}

/// Unweighted tournament of majority arcs: `(u, v)` is present iff
/// `w_uv > w_vu`, with exact ties going to the lower vertex id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajorityTournament {
    n: usize,
    out: BitRows,
    inn: BitRows,
}

impl MajorityTournament {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_arc(&self, u: VertexId, v: VertexId) -> bool {
        self.out.get(u, v)
    }

    pub fn arcs(&self) -> Vec<(VertexId, VertexId)> {
        let mut arcs = Vec::new();
        for u in 0..self.n {
            for v in 0..self.n {
                if self.has_arc(u, v) {
                    arcs.push((u, v));
                }
            }
        }
        arcs
    }

    fn flip(&mut self, u: VertexId, v: VertexId) {
        // (u, v) becomes (v, u)
        self.out.set(u, v, false);
        self.inn.set(v, u, false);
        self.out.set(v, u, true);
        self.inn.set(u, v, true);
    }

    /// Triangles `u -> v -> x -> u` with `x` in `alive`.
    fn triangles_masked(&self, u: VertexId, v: VertexId, alive: &[u64]) -> u64 {
        self.out
            .row(v)
            .iter()
            .zip(self.inn.row(u))
            .zip(alive)
            .map(|((a, b), m)| (a & b & m).count_ones() as u64)
            .sum()
    }

    fn on_triangle(&self, v: VertexId, alive: &[u64]) -> bool {
        let outs = self.out.row(v);
        let ins = self.inn.row(v);
        for (wi, (&o, &m)) in outs.iter().zip(alive).enumerate() {
            let mut bits = o & m;
            while bits != 0 {
                let x = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if self
                    .out
                    .row(x)
                    .iter()
                    .zip(ins)
                    .zip(alive)
                    .any(|((a, b), m)| a & b & m != 0)
                {
                    return true;
                }
            }
        }
        false
    }
}

#[inline]
fn majority_arc(t: &WeightedTournament, u: VertexId, v: VertexId) -> bool {
    let (a, b) = (t.w(u, v), t.w(v, u));
    a > b || (a == b && u < v)
}

pub fn majority(t: &WeightedTournament) -> MajorityTournament {
    let n = t.n();
    let mut out = BitRows::new(n);
    let mut inn = BitRows::new(n);
    for u in 0..n {
        for v in 0..n {
            if u != v && majority_arc(t, u, v) {
                out.set(u, v, true);
                inn.set(v, u, true);
            }
        }
    }
    MajorityTournament { n, out, inn }
}

/// Number of directed triangles of `m` through the arc `(u, v)`.
pub fn triangles_through(m: &MajorityTournament, arc: (VertexId, VertexId)) -> u64 {
    let all = all_mask(m.n);
    m.triangles_masked(arc.0, arc.1, &all)
}

fn all_mask(n: usize) -> Vec<u64> {
    let mut mask = vec![0u64; n.div_ceil(64).max(1)];
    for v in 0..n {
        mask[v / 64] |= 1 << (v % 64);
    }
    mask
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Removal {
    vertex: VertexId,
    preds: Vec<VertexId>,
}

#[derive(Clone, Debug)]
pub struct KernelResult {
    pub kernel: WeightedTournament,
    /// Weight already committed by both rules: `OPT(original) = OPT(kernel) + shift`.
    pub shift: Cost,
    /// `vertex_map[i]` is the original vertex behind kernel vertex `i`.
    pub vertex_map: Vec<VertexId>,
    original_n: usize,
    removals: Vec<Removal>,
}

impl KernelResult {
    /// No reduction at all.
    pub fn identity(t: &WeightedTournament) -> Self {
        KernelResult {
            kernel: t.clone(),
            shift: Cost::ZERO,
            vertex_map: (0..t.n()).collect(),
            original_n: t.n(),
            removals: Vec::new(),
        }
    }

    pub fn removed(&self) -> usize {
        self.removals.len()
    }

    /// Extends a ranking of the kernel to a ranking of the original instance.
    /// If `kernel_ranking` is optimal for the kernel the result is optimal for
    /// the original and costs exactly `OPT(kernel) + shift`.
    pub fn lift(&self, kernel_ranking: &Ranking) -> Ranking {
        assert_eq!(kernel_ranking.len(), self.kernel.n());
        let mut order: Vec<VertexId> = kernel_ranking
            .order()
            .iter()
            .map(|&i| self.vertex_map[i])
            .collect();
        let mut is_pred = vec![false; self.original_n];
        for rem in self.removals.iter().rev() {
            for &p in &rem.preds {
                is_pred[p] = true;
            }
            // stable partition: predecessors, the vertex, successors
            let (mut before, after): (Vec<_>, Vec<_>) =
                order.iter().copied().partition(|&u| is_pred[u]);
            before.push(rem.vertex);
            before.extend(after);
            order = before;
            for &p in &rem.preds {
                is_pred[p] = false;
            }
        }
        Ranking::from_order(order).expect("lift yields a permutation")
    }
}

/// Applies both reduction rules exhaustively with budget `upper` (which must
/// be at least OPT, e.g. the cost of the indegree ranking).
pub fn kernelize(t: &WeightedTournament, upper: Cost) -> KernelResult {
    let n = t.n();
    let d = t.denom() as u128;
    let threshold = 2 * upper.get() as u128;
    let mut work = t.clone();
    let mut m = majority(&work);
    let mut alive = all_mask(n);
    let mut is_alive = vec![true; n];
    let mut shift = 0u64;
    let mut removals = Vec::new();

    loop {
        let mut changed = false;

        for u in 0..n {
            if !is_alive[u] {
                continue;
            }
            for v in 0..n {
                if !is_alive[v] || !m.has_arc(u, v) {
                    continue;
                }
                let tri = m.triangles_masked(u, v, &alive) as u128;
                if tri * d > threshold {
                    shift += work.w(u, v);
                    work.set_pair(u, v, 0);
                    m.flip(u, v);
                    changed = true;
                }
            }
        }

        for v in 0..n {
            if !is_alive[v] || m.on_triangle(v, &alive) {
                continue;
            }
            let mut preds = Vec::new();
            for u in 0..n {
                if u == v || !is_alive[u] {
                    continue;
                }
                if m.has_arc(u, v) {
                    preds.push(u);
                    shift += work.w(v, u);
                } else {
                    shift += work.w(u, v);
                }
            }
            removals.push(Removal { vertex: v, preds });
            is_alive[v] = false;
            alive[v / 64] &= !(1 << (v % 64));
            changed = true;
        }

        if !changed {
            break;
        }
    }

    let vertex_map: Vec<VertexId> = (0..n).filter(|&v| is_alive[v]).collect();
    KernelResult {
        kernel: work.induced(&vertex_map),
        shift: Cost(shift),
        vertex_map,
        original_n: n,
        removals,
    }
}

/// `60 * (U/D)^2`, the kernel size bound, compared exactly: true when
/// `n <= 60 U^2 / D^2`.
pub fn within_kernel_bound(n: usize, upper: Cost, denom: u64) -> bool {
    let lhs = n as u128 * (denom as u128).pow(2);
    let rhs = 60 * (upper.get() as u128).pow(2);
    lhs <= rhs
}

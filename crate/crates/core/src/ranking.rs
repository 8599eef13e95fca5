//! Rankings, partial orderings and Kendall-Tau distance.

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::VertexId;

/// A bijection between the vertices `0..n` and the positions `1..=n`.
///
/// `order()[i]` is the vertex at position `i + 1`; `position(v)` is the
/// inverse. Both directions are stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<VertexId>", into = "Vec<VertexId>")]
pub struct Ranking {
    order: Vec<VertexId>,
    index: Vec<usize>,
}

impl TryFrom<Vec<VertexId>> for Ranking {
    type Error = Error;

    fn try_from(order: Vec<VertexId>) -> Result<Self> {
        Ranking::from_order(order)
    }
}

impl From<Ranking> for Vec<VertexId> {
    fn from(r: Ranking) -> Self {
        r.order
    }
}

impl Ranking {
    /// Builds a ranking from the vertex sequence, first = position 1.
    pub fn from_order(order: Vec<VertexId>) -> Result<Self> {
        let n = order.len();
        let mut index = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n {
                return Err(Error::Invalid(format!(
                    "vertex {v} out of range for a ranking of {n} vertices"
                )));
            }
            if index[v] != usize::MAX {
                return Err(Error::Invalid(format!("vertex {v} ranked twice")));
            }
            index[v] = i;
        }
        Ok(Ranking { order, index })
    }

    pub fn identity(n: usize) -> Self {
        Ranking {
            order: (0..n).collect(),
            index: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// 1-based position of `v`.
    pub fn position(&self, v: VertexId) -> usize {
        self.index[v] + 1
    }

    /// 0-based slot of `v`, i.e. `position(v) - 1`.
    #[inline]
    pub fn slot(&self, v: VertexId) -> usize {
        self.index[v]
    }

    #[inline]
    pub fn at(&self, slot: usize) -> VertexId {
        self.order[slot]
    }

    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    pub fn into_order(self) -> Vec<VertexId> {
        self.order
    }

    pub fn reversed(&self) -> Self {
        let order: Vec<_> = self.order.iter().rev().copied().collect();
        Ranking::from_order(order).expect("reversal of a ranking is a ranking")
    }

    /// True when `u` comes before `v`.
    #[inline]
    pub fn before(&self, u: VertexId, v: VertexId) -> bool {
        self.index[u] < self.index[v]
    }

    /// Ordering view with integral positions `1..=n`.
    pub fn to_ordering(&self) -> Ordering {
        let mut o = Ordering::new();
        for (i, &v) in self.order.iter().enumerate() {
            o.pos.insert(v, Rational64::from_integer(i as i64 + 1));
        }
        o
    }
}

/// Insertion point between two consecutive positions of a ranking.
///
/// `GapPosition(g)` denotes the real position `g + 1/2`: `g = 0` is before
/// the first element, `g = n` after the last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GapPosition(pub usize);

impl GapPosition {
    /// Gap immediately after the 1-based position `p`.
    pub fn after(p: usize) -> Self {
        GapPosition(p)
    }

    /// True when a vertex at `slot` (0-based) lies left of this gap.
    #[inline]
    pub fn is_right_of(self, slot: usize) -> bool {
        slot < self.0
    }
}

/// Partial injection from vertices to rational positions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ordering {
    pos: BTreeMap<VertexId, Rational64>,
}

impl Ordering {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `v` at `p`. Fails if another vertex already sits at `p`.
    pub fn insert(&mut self, v: VertexId, p: Rational64) -> Result<()> {
        if self.pos.iter().any(|(&u, &q)| u != v && q == p) {
            return Err(Error::PositionCollision(p.to_string()));
        }
        self.pos.insert(v, p);
        Ok(())
    }

    pub fn with(mut self, v: VertexId, p: Rational64) -> Result<Self> {
        self.insert(v, p)?;
        Ok(self)
    }

    pub fn get(&self, v: VertexId) -> Option<Rational64> {
        self.pos.get(&v).copied()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.pos.contains_key(&v)
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Rational64)> + '_ {
        self.pos.iter().map(|(&v, &p)| (v, p))
    }

    /// Restriction to the vertices accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(VertexId) -> bool) -> Self {
        Ordering {
            pos: self
                .pos
                .iter()
                .filter(|(&v, _)| keep(v))
                .map(|(&v, &p)| (v, p))
                .collect(),
        }
    }

    /// Domain sorted by position.
    pub fn sorted_domain(&self) -> Vec<VertexId> {
        let mut d: Vec<_> = self.pos.iter().map(|(&v, &p)| (p, v)).collect();
        d.sort();
        d.into_iter().map(|(_, v)| v).collect()
    }
}

/// Number of vertex pairs ordered differently by `a` and `b`.
pub fn kendall_tau(a: &Ranking, b: &Ranking) -> Result<u64> {
    if a.len() != b.len() {
        return Err(Error::VertexSetMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    // Positions in `b` listed in `a` order; discordant pairs are inversions.
    let mut seq: Vec<usize> = a.order().iter().map(|&v| b.slot(v)).collect();
    let mut buf = vec![0usize; seq.len()];
    Ok(count_inversions(&mut seq, &mut buf))
}

fn count_inversions(seq: &mut [usize], buf: &mut [usize]) -> u64 {
    let n = seq.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = {
        let (l, r) = seq.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        count_inversions(l, bl) + count_inversions(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if seq[i] <= seq[j] {
            buf[k] = seq[i];
            i += 1;
        } else {
            buf[k] = seq[j];
            inv += (mid - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&seq[i..mid]);
    k += mid - i;
    buf[k..n].copy_from_slice(&seq[j..n]);
    seq.copy_from_slice(&buf[..n]);
    inv
}

//! Weighted tournaments with exact fixed-denominator arc weights.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::{GapPosition, Ranking};
use crate::VertexId;

/// Exact non-negative cost, in units of `1/D` of the owning instance.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Cost(pub u64);

impl Cost {
    pub const ZERO: Cost = Cost(0);

    pub fn get(self) -> u64 {
        self.0
    }

    /// `num/den` form used in every report.
    pub fn fraction(self, denom: u64) -> String {
        format!("{}/{}", self.0, denom)
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        self.0 += rhs.0;
    }
}

impl Sub for Cost {
    type Output = Cost;
    fn sub(self, rhs: Cost) -> Cost {
        Cost(self.0 - rhs.0)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        Cost(iter.map(|c| c.0).sum())
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Complete directed graph with weights `w[u][v]` in `0..=D` satisfying
/// `w[u][v] + w[v][u] = D` for every pair.
///
/// `w[u][v]` is the price of ranking `v` before `u`, i.e. of leaving the arc
/// `u -> v` pointing backwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedTournament {
    n: usize,
    denom: u64,
    w: Vec<u64>,
    labels: Vec<String>,
}

impl WeightedTournament {
    /// Builds an instance from one numerator per unordered pair: `f(u, v)`
    /// is queried for `u < v` and gives `w[u][v]`; `w[v][u]` is its
    /// complement.
    pub fn from_pairs(
        n: usize,
        denom: u64,
        mut f: impl FnMut(VertexId, VertexId) -> u64,
    ) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Invalid("denominator must be positive".into()));
        }
        let mut w = vec![0; n * n];
        for u in 0..n {
            for v in u + 1..n {
                let x = f(u, v);
                if x > denom {
                    return Err(Error::Invalid(format!(
                        "weight {x} of ({u}, {v}) exceeds denominator {denom}"
                    )));
                }
                w[u * n + v] = x;
                w[v * n + u] = denom - x;
            }
        }
        Ok(WeightedTournament {
            n,
            denom,
            w,
            labels: default_labels(n),
        })
    }

    /// Raw constructor; `w` is row-major `n x n`, diagonal ignored. Does not
    /// check the complement identity, see [`validate`](Self::validate).
    pub fn from_raw(n: usize, denom: u64, w: Vec<u64>) -> Result<Self> {
        if w.len() != n * n {
            return Err(Error::Invalid(format!(
                "expected {} weights, got {}",
                n * n,
                w.len()
            )));
        }
        if denom == 0 {
            return Err(Error::Invalid("denominator must be positive".into()));
        }
        Ok(WeightedTournament {
            n,
            denom,
            w,
            labels: default_labels(n),
        })
    }

    /// Unweighted tournament (`D = 1`) from its arc list; every pair must be
    /// covered exactly once.
    pub fn from_arcs(n: usize, arcs: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut seen = vec![false; n * n];
        let mut w = vec![0; n * n];
        for &(u, v) in arcs {
            if u >= n || v >= n || u == v {
                return Err(Error::Invalid(format!("bad arc ({u}, {v})")));
            }
            let key = u.min(v) * n + u.max(v);
            if seen[key] {
                return Err(Error::Invalid(format!("pair ({u}, {v}) given twice")));
            }
            seen[key] = true;
            w[u * n + v] = 1;
        }
        for u in 0..n {
            for v in u + 1..n {
                if !seen[u * n + v] {
                    return Err(Error::Invalid(format!("pair ({u}, {v}) missing")));
                }
            }
        }
        WeightedTournament::from_raw(n, 1, w)
    }

    /// Transitive tournament `v0 -> v1 -> ... -> v(n-1)`, `D = 1`.
    pub fn chain(n: usize) -> Self {
        WeightedTournament::from_pairs(n, 1, |_, _| 1).expect("valid chain")
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Invalid(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn denom(&self) -> u64 {
        self.denom
    }

    /// Numerator of `w_uv`.
    #[inline]
    pub fn w(&self, u: VertexId, v: VertexId) -> u64 {
        self.w[u * self.n + v]
    }

    pub(crate) fn set_pair(&mut self, u: VertexId, v: VertexId, w_uv: u64) {
        let n = self.n;
        self.w[u * n + v] = w_uv;
        self.w[v * n + u] = self.denom - w_uv;
    }

    /// Row `u` of the weight matrix: `row(u)[v] = w_uv`.
    #[inline]
    pub fn row(&self, u: VertexId) -> &[u64] {
        &self.w[u * self.n..(u + 1) * self.n]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    /// Weighted indegree `sum_u w_uv`.
    pub fn indegree(&self, v: VertexId) -> u64 {
        (0..self.n).filter(|&u| u != v).map(|u| self.w(u, v)).sum()
    }

    /// Sub-instance induced by `keep`, in the given order.
    pub fn induced(&self, keep: &[VertexId]) -> WeightedTournament {
        let k = keep.len();
        let mut w = vec![0; k * k];
        for (i, &u) in keep.iter().enumerate() {
            for (j, &v) in keep.iter().enumerate() {
                if i != j {
                    w[i * k + j] = self.w(u, v);
                }
            }
        }
        WeightedTournament {
            n: k,
            denom: self.denom,
            w,
            labels: keep.iter().map(|&v| self.labels[v].clone()).collect(),
        }
    }

    /// Checks `w_uv + w_vu = D` for every pair; returns the violating pairs.
    pub fn validate(&self) -> Result<(), Vec<(VertexId, VertexId)>> {
        let mut bad = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.w(u, v) + self.w(v, u) != self.denom {
                    bad.push((u, v));
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad)
        }
    }

    pub fn check(&self) -> Result<()> {
        self.validate().map_err(Error::Complement)
    }

    /// Total weight of backward arcs under `pi`.
    pub fn cost(&self, pi: &Ranking) -> Cost {
        debug_assert_eq!(pi.len(), self.n);
        let order = pi.order();
        let mut c = 0;
        for (j, &v) in order.iter().enumerate() {
            let row = self.row(v);
            c += order[..j].iter().map(|&u| row[u]).sum::<u64>();
        }
        Cost(c)
    }

    /// Cost of the arcs incident to `v` once `v` is moved to gap `p` of `pi`.
    /// `v`'s own slot in `pi` (if any) is ignored.
    pub fn local_cost(&self, pi: &Ranking, v: VertexId, p: GapPosition) -> Cost {
        let row = self.row(v);
        let mut c = 0;
        for (slot, &u) in pi.order().iter().enumerate() {
            if u == v {
                continue;
            }
            c += if p.is_right_of(slot) { row[u] } else { self.w(u, v) };
        }
        Cost(c)
    }

    /// Local cost of `v` at its current position in `pi`.
    pub fn own_local_cost(&self, pi: &Ranking, v: VertexId) -> Cost {
        self.local_cost(pi, v, GapPosition::after(pi.position(v)))
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|v| v.to_string()).collect()
}

/// `C(pi)`: weight of the backward arcs.
pub fn fast_cost(t: &WeightedTournament, pi: &Ranking) -> Cost {
    t.cost(pi)
}

/// `b(pi, v, p)` with `p` a half-integer gap.
pub fn fast_b(t: &WeightedTournament, pi: &Ranking, v: VertexId, p: GapPosition) -> Cost {
    t.local_cost(pi, v, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_cycle() -> WeightedTournament {
        WeightedTournament::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn r(order: &[usize]) -> Ranking {
        Ranking::from_order(order.to_vec()).unwrap()
    }

    #[test]
    fn chain_costs() {
        let t = WeightedTournament::chain(3);
        assert_eq!(t.cost(&r(&[0, 1, 2])), Cost(0));
        assert_eq!(t.cost(&r(&[2, 1, 0])), Cost(3));
    }

    #[test]
    fn three_cycle_rotations_cost_one() {
        let t = three_cycle();
        for p in [[0, 1, 2], [1, 2, 0], [2, 0, 1]] {
            assert_eq!(t.cost(&r(&p)), Cost(1), "{p:?}");
        }
        // against the cycle: two arcs point backwards
        for p in [[0, 2, 1], [1, 0, 2], [2, 1, 0]] {
            assert_eq!(t.cost(&r(&p)), Cost(2), "{p:?}");
        }
    }

    #[test]
    fn local_cost_examples() {
        let chain = WeightedTournament::chain(3);
        let pi = r(&[0, 1, 2]);
        assert_eq!(fast_b(&chain, &pi, 0, GapPosition(3)), Cost(2));
        assert_eq!(fast_b(&chain, &pi, 0, GapPosition(0)), Cost(0));
        let cyc = three_cycle();
        assert_eq!(fast_b(&cyc, &pi, 2, GapPosition(0)), Cost(1));
    }

    #[test]
    fn own_slot_gaps_agree() {
        let cyc = three_cycle();
        let pi = r(&[0, 1, 2]);
        for v in 0..3 {
            let p = pi.position(v);
            assert_eq!(
                cyc.local_cost(&pi, v, GapPosition(p - 1)),
                cyc.local_cost(&pi, v, GapPosition(p))
            );
        }
    }

    #[test]
    fn validate_reports_pairs() {
        assert!(WeightedTournament::chain(5).validate().is_ok());
        let mut w = vec![0; 4];
        w[1] = 2;
        w[2] = 2;
        let t = WeightedTournament::from_raw(2, 2, w).unwrap();
        assert_eq!(t.validate(), Err(vec![(0, 1)]));
    }

    #[test]
    fn rejects_overweight() {
        assert!(WeightedTournament::from_pairs(2, 1, |_, _| 2).is_err());
    }
}

//! Kemeny rank aggregation through weighted FAST: with `m` votes, set
//! `D = m` and `w_uv` to the number of votes ranking `u` before `v`. The
//! FAST cost of a ranking is then the summed Kendall-Tau distance to the
//! votes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fast::{solve_fast, SolveOptions, SolveReport};
use crate::ranking::{kendall_tau, Ranking};
use crate::tournament::{Cost, WeightedTournament};

/// Candidate names plus at least one complete strict vote.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoteProfile {
    candidates: Vec<String>,
    votes: Vec<Ranking>,
}

impl VoteProfile {
    pub fn new(candidates: Vec<String>, votes: Vec<Ranking>) -> Result<Self> {
        if votes.is_empty() {
            return Err(Error::Invalid("a profile needs at least one vote".into()));
        }
        let mut seen = HashMap::new();
        for (i, c) in candidates.iter().enumerate() {
            if seen.insert(c.as_str(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate candidate {c}")));
            }
        }
        if let Some(v) = votes.iter().find(|v| v.len() != candidates.len()) {
            return Err(Error::Invalid(format!(
                "vote ranks {} candidates, expected {}",
                v.len(),
                candidates.len()
            )));
        }
        Ok(VoteProfile { candidates, votes })
    }

    /// Builds a profile from name sequences; the first vote fixes the
    /// candidate ids.
    pub fn from_names<S: AsRef<str>>(votes: &[Vec<S>]) -> Result<Self> {
        let first = votes
            .first()
            .ok_or_else(|| Error::Invalid("a profile needs at least one vote".into()))?;
        let candidates: Vec<String> = first.iter().map(|s| s.as_ref().to_string()).collect();
        let index: HashMap<&str, usize> = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let mut rankings = Vec::with_capacity(votes.len());
        for vote in votes {
            let order = vote
                .iter()
                .map(|s| {
                    index
                        .get(s.as_ref())
                        .copied()
                        .ok_or_else(|| Error::Invalid(format!("unknown candidate {}", s.as_ref())))
                })
                .collect::<Result<Vec<_>>>()?;
            if order.len() != candidates.len() {
                return Err(Error::Invalid(format!(
                    "vote ranks {} candidates, expected {}",
                    order.len(),
                    candidates.len()
                )));
            }
            rankings.push(Ranking::from_order(order)?);
        }
        VoteProfile::new(candidates, rankings)
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn votes(&self) -> &[Ranking] {
        &self.votes
    }

    pub fn voters(&self) -> usize {
        self.votes.len()
    }

    /// Names of a ranking over this profile's candidates.
    pub fn names(&self, pi: &Ranking) -> Vec<&str> {
        pi.order().iter().map(|&v| self.candidates[v].as_str()).collect()
    }
}

pub fn reduce_to_fast(p: &VoteProfile) -> WeightedTournament {
    let n = p.candidates.len();
    let m = p.votes.len() as u64;
    WeightedTournament::from_pairs(n, m, |u, v| {
        p.votes.iter().filter(|vote| vote.before(u, v)).count() as u64
    })
    .expect("vote counts never exceed the voter count")
    .with_labels(p.candidates.clone())
    .expect("one label per candidate")
}

/// Summed Kendall-Tau distance from `pi` to every vote; the average is this
/// over `p.voters()`.
pub fn avg_kt(p: &VoteProfile, pi: &Ranking) -> Result<Cost> {
    p.votes
        .iter()
        .map(|vote| kendall_tau(pi, vote).map(Cost))
        .sum()
}

/// Kemeny-optimal ranking. The report's `cost / denom` is the minimum
/// average distance.
pub fn aggregate(p: &VoteProfile, opts: &SolveOptions) -> Result<SolveReport> {
    solve_fast(&reduce_to_fast(p), opts)
}

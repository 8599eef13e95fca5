//! Exact fixed-parameter solvers for ranking problems.
//!
//! * weighted feedback arc set on tournaments ([`solve_fast`]),
//! * Kemeny rank aggregation ([`aggregate`]), reduced to the former,
//! * betweenness tournaments ([`solve_betweenness`]).
//!
//! All three seed from a cheap ranking, bound how far every vertex may move
//! from its seed position, and run a dynamic program over the prefix sets
//! that respect those bounds. Costs are exact integers; weighted instances
//! scale every weight by a common denominator `D`.
//!
//! ```
//! use rankfpt::{solve_fast, SolveOptions, WeightedTournament};
//!
//! let t = WeightedTournament::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
//! let report = solve_fast(&t, &SolveOptions::default()).unwrap();
//! assert_eq!(report.cost.fraction(report.denom), "1/1");
//! ```

pub mod band;
pub mod bench;
pub mod betweenness;
pub mod error;
pub mod exec;
pub mod fast;
pub mod generate;
pub mod io;
pub mod kernel;
pub mod kra;
pub mod oracle;
pub mod ranking;
pub mod tournament;

/// Dense vertex index `0..n`.
pub type VertexId = usize;

pub use band::{Band, DpOptions, RadiusMap};
pub use betweenness::{
    bt_b, bt_b_gap, bt_cost, candidate_rankings, compute_radii_bt, banded_dp_bt, solve_betweenness,
    BetweennessInstance, BtOptions, BtRadiusParams, BtReport, CandidateOptions, CandidateSet, TripleCost,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use fast::{
    approx_ranking, banded_divide_conquer, banded_dp, compute_radii, solve_fast, KernelMode, Method,
    SolveOptions, SolveReport,
};
pub use kernel::{kernelize, KernelResult};
pub use kra::{aggregate, avg_kt, reduce_to_fast, VoteProfile};
pub use oracle::{oracle_bt_perm, oracle_fast_perm, oracle_fast_subset};
pub use ranking::{kendall_tau, GapPosition, Ordering, Ranking};
pub use tournament::{fast_b, fast_cost, Cost, WeightedTournament};

//! Scaling sweeps over planted instances, one CSV row per instance.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::betweenness::{solve_betweenness, BtOptions};
use crate::error::Result;
use crate::exec::{self, Execution};
use crate::fast::{solve_fast, SolveOptions};
use crate::generate::{bt_flips, fast_flips};

pub const CSV_HEADER: &str = "problem,n,k,opt_num,opt_den,psi,dp_states,millis";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    Fast,
    Betweenness,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Fast => "fast",
            Problem::Betweenness => "bt",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchSpec {
    pub problem: Problem,
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub fast: SolveOptions,
    pub bt: BtOptions,
    /// How instances are spread over workers; rows keep sweep order.
    pub execution: Execution,
}

impl BenchSpec {
    pub fn new(problem: Problem, ns: Vec<usize>, ks: Vec<usize>) -> Self {
        BenchSpec {
            problem,
            ns,
            ks,
            reps: 1,
            seed: 0,
            fast: SolveOptions::default(),
            bt: BtOptions::default(),
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub problem: Problem,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub opt_num: u64,
    pub opt_den: u64,
    pub psi: usize,
    pub dp_states: usize,
    pub millis: u128,
}

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.problem.name(),
            self.n,
            self.k,
            self.opt_num,
            self.opt_den,
            self.psi,
            self.dp_states,
            self.millis
        )
    }
}

/// Instance seed for a sweep cell.
pub fn instance_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.next_u64()
}

/// Every `(n, k, rep)` cell in sweep order, `k` values larger than the
/// instance allows skipped.
pub fn cells(spec: &BenchSpec) -> Vec<(usize, usize, u64)> {
    let mut out = Vec::new();
    for &n in &spec.ns {
        for &k in &spec.ks {
            let limit = match spec.problem {
                Problem::Fast => n * n.saturating_sub(1) / 2,
                Problem::Betweenness => crate::betweenness::triple_count(n),
            };
            if k > limit {
                continue;
            }
            for _ in 0..spec.reps.max(1) {
                let idx = out.len();
                out.push((n, k, instance_seed(spec.seed, idx)));
            }
        }
    }
    out
}

pub fn run_cell(spec: &BenchSpec, n: usize, k: usize, seed: u64) -> Result<BenchRow> {
    let row = |num, den, psi, states, millis| BenchRow {
        problem: spec.problem,
        n,
        k,
        seed,
        opt_num: num,
        opt_den: den,
        psi,
        dp_states: states,
        millis,
    };
    match spec.problem {
        Problem::Fast => {
            let t = fast_flips(n, k, seed)?;
            let r = solve_fast(&t, &spec.fast)?;
            Ok(row(r.cost.get(), r.denom, r.psi, r.dp_states, r.elapsed.as_millis()))
        }
        Problem::Betweenness => {
            let b = bt_flips(n, k, seed)?;
            let r = solve_betweenness(&b, &spec.bt)?;
            Ok(row(r.cost.get(), 1, r.psi, r.dp_states, r.elapsed.as_millis()))
        }
    }
}

/// Runs the sweep. Rows come back in sweep order whatever the execution.
pub fn run_bench(spec: &BenchSpec) -> Vec<Result<BenchRow>> {
    let cells = cells(spec);
    exec::map(spec.execution, &cells, |&(n, k, seed)| run_cell(spec, n, k, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_row() {
        let spec = BenchSpec::new(Problem::Fast, vec![200], vec![0]);
        let rows = run_bench(&spec);
        let r = rows[0].as_ref().unwrap();
        assert_eq!((r.opt_num, r.psi), (0, 0));
        assert!(r.csv().starts_with("fast,200,0,0,1,0,"));
    }

    #[test]
    fn rows_are_deterministic() {
        let mut spec = BenchSpec::new(Problem::Fast, vec![12, 16], vec![0, 3, 6]);
        spec.reps = 2;
        spec.seed = 9;
        let strip = |rows: Vec<Result<BenchRow>>| -> Vec<BenchRow> {
            rows.into_iter().map(|r| BenchRow { millis: 0, ..r.unwrap() }).collect()
        };
        let a = strip(run_bench(&spec));
        spec.execution = Execution::Sequential;
        let b = strip(run_bench(&spec));
        assert_eq!(a, b);
        assert_eq!(a.len(), 12);
    }
}

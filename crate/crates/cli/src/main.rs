use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rankfpt::bench::{self, BenchSpec, Problem};
use rankfpt::{
    aggregate, approx_ranking, io, kernelize, oracle_bt_perm, oracle_fast_perm, oracle_fast_subset,
    solve_betweenness, solve_fast, BtOptions, BtRadiusParams, Cost, DpOptions, Error, Execution,
    KernelMode, Method, Ranking, SolveOptions, WeightedTournament,
};

#[derive(Parser)]
#[command(name = "rankfpt", version, about = "Exact solvers for tournament ranking problems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimum weighted feedback arc set of a tournament (`fast` or `tour` file)
    SolveFast {
        path: PathBuf,
        #[command(flatten)]
        dp: DpArgs,
        #[arg(long, value_enum, default_value_t = KernelArg::Auto)]
        kernel: KernelArg,
        /// Use the divide-and-conquer variant instead of the layered DP
        #[arg(long)]
        divide_conquer: bool,
        #[arg(long)]
        json: bool,
    },
    /// Kemeny-optimal ranking of a vote file
    Aggregate {
        path: PathBuf,
        #[command(flatten)]
        dp: DpArgs,
        #[arg(long)]
        json: bool,
    },
    /// Minimum betweenness tournament (`bt` file)
    SolveBt {
        path: PathBuf,
        #[command(flatten)]
        dp: DpArgs,
        #[command(flatten)]
        bt: BtArgs,
        #[arg(long)]
        json: bool,
    },
    /// Planted instance on stdout
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        n: usize,
        k: usize,
        seed: u64,
    },
    /// CSV scaling sweep over planted instances
    Bench {
        #[arg(long, value_enum, default_value_t = GenKind::FastFlips)]
        kind: GenKind,
        /// Comma-separated vertex counts
        #[arg(long, value_delimiter = ',', default_value = "200")]
        n: Vec<usize>,
        /// Comma-separated flip counts
        #[arg(long, value_delimiter = ',', default_value = "0,10,20,30,40,50")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        dp: DpArgs,
    },
    /// Reduce a tournament and report the kernel size and cost shift
    Kernelize {
        path: PathBuf,
        /// Upper bound numerator (default: cost of the indegree ranking)
        #[arg(long)]
        upper: Option<u64>,
        /// Print the kernel instance after the summary
        #[arg(long)]
        emit: bool,
    },
    /// Brute-force optimum of a small `fast`, `tour` or `bt` file
    Oracle { path: PathBuf },
}

#[derive(Args)]
struct DpArgs {
    /// Turn off bound pruning (psi cap then applies)
    #[arg(long)]
    no_prune: bool,
    #[arg(long, default_value_t = 40)]
    psi_cap: usize,
    #[arg(long, default_value_t = 1 << 23)]
    state_cap: usize,
    /// Run everything on the calling thread
    #[arg(long)]
    sequential: bool,
}

impl DpArgs {
    fn options(&self) -> DpOptions {
        DpOptions {
            psi_cap: self.psi_cap,
            state_cap: self.state_cap,
            prune: !self.no_prune,
            execution: self.execution(),
        }
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

#[derive(Args)]
struct BtArgs {
    /// Radius constant on the sqrt(C/n) term, e.g. `4` or `7/2`
    #[arg(long, default_value = "4", value_parser = parse_ratio)]
    alpha1: (u64, u64),
    /// Radius constant on the local-cost term
    #[arg(long, default_value = "4", value_parser = parse_ratio)]
    alpha2: (u64, u64),
    /// Solve once at the initial radii, without doubling
    #[arg(long)]
    no_escalate: bool,
    #[arg(long, default_value_t = 8)]
    max_escalations: usize,
    /// Random starts of the candidate local search
    #[arg(long, default_value_t = 20)]
    starts: usize,
    #[arg(long, default_value_t = 8)]
    candidates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Auto,
    Always,
    Never,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    FastFlips,
    BtFlips,
}

fn parse_ratio(s: &str) -> Result<(u64, u64), String> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p: u64 = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let q: u64 = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if p == 0 || q == 0 {
        return Err(format!("{s:?} must be positive"));
    }
    Ok((p, q))
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn label_line(t: &WeightedTournament, pi: &Ranking) -> String {
    pi.order().iter().map(|&v| t.label(v)).collect::<Vec<_>>().join(" ")
}

fn ids_line(pi: &Ranking) -> String {
    pi.order().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn json(v: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.cmd {
        Cmd::SolveFast {
            path,
            dp,
            kernel,
            divide_conquer,
            json: as_json,
        } => {
            let t = io::parse_tournament(&read(&path)?)?;
            let opts = SolveOptions {
                kernel: match kernel {
                    KernelArg::Auto => KernelMode::Auto,
                    KernelArg::Always => KernelMode::Always,
                    KernelArg::Never => KernelMode::Never,
                },
                method: if divide_conquer {
                    Method::DivideAndConquer
                } else {
                    Method::DynamicProgram
                },
                dp: dp.options(),
                ..SolveOptions::default()
            };
            let r = solve_fast(&t, &opts)?;
            if as_json {
                let mut v = serde_json::to_value(&r)?;
                v["cost"] = r.cost.fraction(r.denom).into();
                v["kernel_shift"] = r.kernel_shift.fraction(r.denom).into();
                json(v);
            } else {
                println!("{}", label_line(&t, &r.ranking));
                println!("cost {}", r.cost.fraction(r.denom));
                println!(
                    "kernel {} vertices, shift {}",
                    r.kernel_size,
                    r.kernel_shift.fraction(r.denom)
                );
                println!("psi {}", r.psi);
                println!("dp_states {}", r.dp_states);
                println!("millis {}", r.elapsed.as_millis());
            }
        }
        Cmd::Aggregate { path, dp, json: as_json } => {
            let p = io::parse_votes(&read(&path)?)?;
            let opts = SolveOptions {
                dp: dp.options(),
                ..SolveOptions::default()
            };
            let r = aggregate(&p, &opts)?;
            let names = p.names(&r.ranking).join(" ");
            if as_json {
                json(serde_json::json!({
                    "ranking": p.names(&r.ranking),
                    "cost": r.cost.fraction(r.denom),
                    "voters": p.voters(),
                    "psi": r.psi,
                    "dp_states": r.dp_states,
                    "millis": r.elapsed.as_millis() as u64,
                }));
            } else {
                println!("{names}");
                println!("cost {}", r.cost.fraction(r.denom));
                println!("psi {}", r.psi);
                println!("dp_states {}", r.dp_states);
                println!("millis {}", r.elapsed.as_millis());
            }
        }
        Cmd::SolveBt {
            path,
            dp,
            bt,
            json: as_json,
        } => {
            let b = io::parse_betweenness(&read(&path)?)?;
            let mut opts = BtOptions {
                radius: BtRadiusParams {
                    alpha1: bt.alpha1,
                    alpha2: bt.alpha2,
                    max_escalations: bt.max_escalations,
                    ..BtRadiusParams::default()
                },
                escalate: !bt.no_escalate,
                dp: dp.options(),
                ..BtOptions::default()
            };
            opts.candidates.starts = bt.starts;
            opts.candidates.max_candidates = bt.candidates;
            opts.candidates.seed = bt.seed;
            opts.candidates.execution = dp.execution();
            let r = solve_betweenness(&b, &opts)?;
            if as_json {
                json(serde_json::to_value(&r)?);
            } else {
                println!("{}", ids_line(&r.ranking));
                println!("cost {}", r.cost);
                println!("psi {}", r.psi);
                println!("dp_states {}", r.dp_states);
                println!("escalations {}", r.escalations);
                println!("exhaustive {}", r.exhaustive);
                println!("millis {}", r.elapsed.as_millis());
            }
        }
        Cmd::Gen { kind, n, k, seed } => match kind {
            GenKind::FastFlips => print!("{}", io::print_tournament(&rankfpt::generate::fast_flips(n, k, seed)?)),
            GenKind::BtFlips => print!("{}", io::print_betweenness(&rankfpt::generate::bt_flips(n, k, seed)?)),
        },
        Cmd::Bench {
            kind,
            n,
            k,
            reps,
            seed,
            dp,
        } => {
            let problem = match kind {
                GenKind::FastFlips => Problem::Fast,
                GenKind::BtFlips => Problem::Betweenness,
            };
            let mut spec = BenchSpec::new(problem, n, k);
            spec.reps = reps;
            spec.seed = seed;
            spec.fast.dp = dp.options();
            spec.bt.dp = dp.options();
            spec.execution = dp.execution();
            println!("{}", bench::CSV_HEADER);
            let cells = bench::cells(&spec);
            let mut failed = None;
            for ((n, k, s), row) in cells.iter().zip(bench::run_bench(&spec)) {
                match row {
                    Ok(r) => println!("{}", r.csv()),
                    Err(e) => {
                        eprintln!("n={n} k={k} seed={s}: {e}");
                        failed = Some(e);
                    }
                }
            }
            if let Some(e) = failed {
                return Err(e.into());
            }
        }
        Cmd::Kernelize { path, upper, emit } => {
            let t = io::parse_tournament(&read(&path)?)?;
            t.check()?;
            let upper = upper.map(Cost).unwrap_or_else(|| t.cost(&approx_ranking(&t)));
            let kr = kernelize(&t, upper);
            println!(
                "kernel {} vertices, shift {}",
                kr.kernel.n(),
                kr.shift.fraction(t.denom())
            );
            let kept: Vec<&str> = kr.vertex_map.iter().map(|&v| t.label(v)).collect();
            println!("kept {}", kept.join(" "));
            if emit {
                print!("{}", io::print_tournament(&kr.kernel));
            }
        }
        Cmd::Oracle { path } => {
            let text = read(&path)?;
            let head = text
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .find(|l| !l.is_empty())
                .ok_or_else(|| anyhow!(Error::parse(1, "empty file")))?;
            if head.starts_with("bt") {
                let b = io::parse_betweenness(&text)?;
                let (c, r) = oracle_bt_perm(&b)?;
                println!("{}", ids_line(&r));
                println!("cost {c}");
            } else {
                let t = io::parse_tournament(&text)?;
                t.check()?;
                let (c, r) = if t.n() <= rankfpt::oracle::FAST_PERM_LIMIT {
                    oracle_fast_perm(&t)?
                } else {
                    oracle_fast_subset(&t)?
                };
                println!("{}", label_line(&t, &r));
                println!("cost {}", c.fraction(t.denom()));
            }
        }
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_resource_guard() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

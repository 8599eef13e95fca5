//! Acceptance suite. Each criterion is its own test and writes one
//! `PASS`/`FAIL` line straight to stdout, so the verdicts show up even when
//! the harness captures output.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankfpt::bench::{run_bench, BenchSpec, Problem};
use rankfpt::betweenness::bt_b_gap;
use rankfpt::generate::{bt_flips, fast_flips};
use rankfpt::*;

fn report(id: u32, ok: bool, detail: String) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{verdict} criterion {id:>2}: {detail}").unwrap();
    out.flush().unwrap();
}

fn random_tournament(rng: &mut ChaCha8Rng, n: usize, d: u64) -> WeightedTournament {
    WeightedTournament::from_pairs(n, d, |_, _| rng.gen_range(0..=d)).unwrap()
}

fn random_ranking(rng: &mut ChaCha8Rng, n: usize) -> Ranking {
    let mut o: Vec<usize> = (0..n).collect();
    o.shuffle(rng);
    Ranking::from_order(o).unwrap()
}

fn random_bt(rng: &mut ChaCha8Rng, n: usize) -> BetweennessInstance {
    BetweennessInstance::from_fn(n, |a, b, c| [a, b, c][rng.gen_range(0..3)]).unwrap()
}

/// Criterion 1 instances: n in 3..=9, D in {1, 2, 10}, uniform weights.
fn criterion_one_instances() -> Vec<WeightedTournament> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..500)
        .map(|_| {
            let n = rng.gen_range(3..=9);
            let d = [1, 2, 10][rng.gen_range(0..3)];
            random_tournament(&mut rng, n, d)
        })
        .collect()
}

/// `psi <= 12 sqrt(2 C / D) + 1`, squared: `(psi - 1)^2 D <= 288 C`.
fn psi_within_bound(t: &WeightedTournament) -> (bool, usize) {
    let seed = approx_ranking(t);
    let psi = Band::new(&seed, &compute_radii(t, &seed)).psi();
    let c = fast_cost(t, &seed).get() as u128;
    let ok = psi <= 1 || ((psi - 1) as u128).pow(2) * t.denom() as u128 <= 288 * c;
    (ok, psi)
}

fn planted_200() -> WeightedTournament {
    fast_flips(200, 50, 0).unwrap()
}

#[test]
fn criterion_01_fast_exactness() {
    let start = Instant::now();
    let mut bad = 0;
    for t in criterion_one_instances() {
        let r = solve_fast(&t, &SolveOptions::default()).unwrap();
        let (opt, _) = oracle_fast_perm(&t).unwrap();
        if r.cost != opt || fast_cost(&t, &r.ranking) != r.cost {
            bad += 1;
        }
    }
    let el = start.elapsed();
    let ok = bad == 0 && el < Duration::from_secs(60);
    report(1, ok, format!("500 weighted instances, {bad} mismatches vs permutation oracle, {el:.2?}"));
    assert!(ok);
}

#[test]
fn criterion_02_kernel_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = 0;
    let mut reduced = 0;
    for i in 0..200 {
        let n = rng.gen_range(1..=9);
        // half uniform, half near-acyclic so both rules actually fire
        let t = if i % 2 == 0 {
            let d = [1, 2, 10][rng.gen_range(0..3)];
            random_tournament(&mut rng, n, d)
        } else {
            let pairs = n * (n - 1) / 2;
            let k = rng.gen_range(0..=pairs.min(3));
            fast_flips(n, k, rng.gen()).unwrap()
        };
        let upper = fast_cost(&t, &approx_ranking(&t));
        let kr = kernelize(&t, upper);
        let opt = oracle_fast_perm(&t).unwrap().0;
        let kopt = oracle_fast_perm(&kr.kernel).unwrap().0;
        let again = kernelize(&kr.kernel, upper);
        if kopt + kr.shift != opt || again.kernel != kr.kernel || again.shift != Cost(0) {
            bad += 1;
        }
        if kr.kernel.n() < t.n() {
            reduced += 1;
        }
    }
    report(
        2,
        bad == 0,
        format!("200 instances ({reduced} shrunk), {bad} shift or idempotence failures"),
    );
    assert_eq!(bad, 0);
}

fn brute_min_distance(p: &VoteProfile) -> u64 {
    let n = p.candidates().len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    // Heap's algorithm over the candidates
    fn heap(k: usize, a: &mut Vec<usize>, p: &VoteProfile, best: &mut u64) {
        if k <= 1 {
            let r = Ranking::from_order(a.clone()).unwrap();
            let d: u64 = p.votes().iter().map(|v| kendall_tau(&r, v).unwrap()).sum();
            *best = (*best).min(d);
            return;
        }
        for i in 0..k {
            heap(k - 1, a, p, best);
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut order, p, &mut best);
    best
}

#[test]
fn criterion_03_kemeny_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let profile = |rng: &mut ChaCha8Rng| {
        let c = rng.gen_range(1..=7);
        let m = rng.gen_range(1..=9);
        let votes = (0..m).map(|_| random_ranking(rng, c)).collect();
        VoteProfile::new((0..c).map(|i| format!("c{i}")).collect(), votes).unwrap()
    };
    let mut bad_opt = 0;
    for _ in 0..100 {
        let p = profile(&mut rng);
        let r = aggregate(&p, &SolveOptions::default()).unwrap();
        if r.cost.get() != brute_min_distance(&p) || r.denom != p.voters() as u64 {
            bad_opt += 1;
        }
    }
    let mut bad_red = 0;
    for _ in 0..1000 {
        let p = profile(&mut rng);
        let pi = random_ranking(&mut rng, p.candidates().len());
        if fast_cost(&reduce_to_fast(&p), &pi) != avg_kt(&p, &pi).unwrap() {
            bad_red += 1;
        }
    }
    let ok = bad_opt == 0 && bad_red == 0;
    report(
        3,
        ok,
        format!("100 profiles {bad_opt} mismatches vs brute force; 1000 reduction checks {bad_red} mismatches"),
    );
    assert!(ok);
}

#[test]
fn criterion_04_betweenness_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    let mut exhaustive = 0;
    for _ in 0..200 {
        let n = rng.gen_range(4..=8);
        let b = random_bt(&mut rng, n);
        let r = solve_betweenness(&b, &BtOptions::default()).unwrap();
        if r.cost != oracle_bt_perm(&b).unwrap().0 || bt_cost(&b, &r.ranking) != r.cost {
            bad += 1;
        }
        exhaustive += r.exhaustive as usize;
    }
    let el = start.elapsed();
    let ok = bad == 0 && el < Duration::from_secs(300);
    report(
        4,
        ok,
        format!("200 instances, {bad} mismatches vs oracle, {exhaustive} reached the full band, {el:.2?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_05_fast_local_cost_stability() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=40);
        let d = [1, 2, 10][rng.gen_range(0..3)];
        let t = random_tournament(&mut rng, n, d);
        let (p1, p2) = (random_ranking(&mut rng, n), random_ranking(&mut rng, n));
        let v = rng.gen_range(0..n);
        let g = GapPosition(rng.gen_range(0..=n));
        let diff = fast_b(&t, &p1, v, g).get() as i128 - fast_b(&t, &p2, v, g).get() as i128;
        let dist = kendall_tau(&p1, &p2).unwrap() as i128;
        if diff * diff > 4 * (d as i128).pow(2) * dist {
            bad += 1;
        }
    }
    report(5, bad == 0, format!("1000 samples, {bad} violations of |db|^2 <= 4 D^2 d"));
    assert_eq!(bad, 0);
}

#[test]
fn criterion_06_betweenness_local_cost_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad_lip = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(3..=20);
        let b = random_bt(&mut rng, n);
        let (p1, p2) = (random_ranking(&mut rng, n), random_ranking(&mut rng, n));
        let v = rng.gen_range(0..n);
        let g = GapPosition(rng.gen_range(0..=n));
        let diff = bt_b_gap(&b, &p1, v, g).get() as i128 - bt_b_gap(&b, &p2, v, g).get() as i128;
        let dist = kendall_tau(&p1, &p2).unwrap() as i128;
        if diff * diff > 9 * (n as i128 - 1).pow(2) * dist {
            bad_lip += 1;
        }
    }
    let mut bad_frag = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(3..=20);
        let b = random_bt(&mut rng, n);
        let pi = random_ranking(&mut rng, n);
        let v = rng.gen_range(0..n);
        let (g1, g2) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
        let between = (g1.min(g2)..g1.max(g2)).filter(|&s| pi.at(s) != v).count() as u64;
        let sum = bt_b_gap(&b, &pi, v, GapPosition(g1)).get() + bt_b_gap(&b, &pi, v, GapPosition(g2)).get();
        if 2 * sum < (n as u64 - 2) * between {
            bad_frag += 1;
        }
    }
    let ok = bad_lip == 0 && bad_frag == 0;
    report(
        6,
        ok,
        format!("1000 + 1000 samples, {bad_lip} violations of |db|^2 <= 9 (n-1)^2 d, {bad_frag} of b(p) + b(p') >= (n-2)|B|/2"),
    );
    assert!(ok);
}

#[test]
fn criterion_07_band_width_bound() {
    let mut bad = 0;
    let mut widest = 0;
    for t in criterion_one_instances() {
        let (ok, psi) = psi_within_bound(&t);
        bad += !ok as usize;
        widest = widest.max(psi);
    }
    let (ok200, psi200) = psi_within_bound(&planted_200());
    bad += !ok200 as usize;
    report(
        7,
        bad == 0,
        format!("501 instances, {bad} over 12 sqrt(2C) + 1 (widest small band {widest}, planted n=200 band {psi200})"),
    );
    assert_eq!(bad, 0);
}

#[test]
fn criterion_08_indegree_five_approximation() {
    let mut bad = 0;
    let mut worst = (0u64, 1u64);
    for t in criterion_one_instances() {
        let c = fast_cost(&t, &approx_ranking(&t)).get();
        let opt = oracle_fast_perm(&t).unwrap().0.get();
        if c > 5 * opt {
            bad += 1;
        }
        if opt > 0 && c * worst.1 > worst.0 * opt {
            worst = (c, opt);
        }
    }
    report(
        8,
        bad == 0,
        format!("500 instances, {bad} above 5 OPT (worst ratio {}/{})", worst.0, worst.1),
    );
    assert_eq!(bad, 0);
}

#[test]
fn criterion_09_planted_fast_scaling() {
    let t = planted_200();
    let start = Instant::now();
    let r = solve_fast(&t, &SolveOptions::default()).unwrap();
    let el = start.elapsed();
    let solved = r.cost.get() <= 50 && fast_cost(&t, &r.ranking) == r.cost && el < Duration::from_secs(60);

    let mut spec = BenchSpec::new(Problem::Fast, vec![200], vec![0, 10, 20, 30, 40, 50]);
    spec.seed = 9;
    let rows: Vec<_> = run_bench(&spec).into_iter().map(Result::unwrap).collect();
    let states_ok = rows.iter().all(|row| {
        let cap = 1u128.checked_shl(row.psi as u32).map_or(u128::MAX, |p| p.saturating_mul(row.n as u128));
        (row.dp_states as u128) <= cap
    });
    let zero = &rows[0];
    let zero_ok = zero.opt_num == 0 && zero.psi == 0 && zero.millis < 1000;
    let ok = solved && states_ok && zero_ok;
    let psis: Vec<String> = rows.iter().map(|r| format!("k={} psi={} opt={}", r.k, r.psi, r.opt_num)).collect();
    report(
        9,
        ok,
        format!(
            "n=200 k=50: cost {} psi {} states {} in {el:.2?}; sweep [{}], states <= n 2^psi on all rows: {states_ok}",
            r.cost,
            r.psi,
            r.dp_states,
            psis.join(", ")
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_10_planted_betweenness_regime() {
    let n = 40usize;
    let log2 = (n as f64).log2();
    let k = (n as f64 * log2 * log2 / 8.0).floor() as usize;
    let b = bt_flips(n, k, 0).unwrap();
    let start = Instant::now();
    let r = solve_betweenness(&b, &BtOptions::default()).unwrap();
    let el = start.elapsed();
    let ok = r.cost.get() <= k as u64 && r.psi <= 25 && el < Duration::from_secs(120);
    let fit = r.psi as f64 / (r.cost.get() as f64 / n as f64).sqrt().max(1.0);
    report(
        10,
        ok,
        format!(
            "n=40 k={k}: cost {} psi {} ({} escalations, psi / sqrt(C/n) = {fit:.2}) in {el:.2?}",
            r.cost, r.psi, r.escalations
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_11_lower_bound_not_reproducible() {
    let mut out = std::io::stdout().lock();
    writeln!(out, "N/A  criterion 11: conditional lower bound, not reproducible, nothing checked").unwrap();
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rankfpt"))
}

fn write(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rankfpt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn gen(kind: &str, n: usize, k: usize, seed: u64) -> String {
    let o = run(&["gen", kind, &n.to_string(), &k.to_string(), &seed.to_string()]);
    assert!(o.status.success());
    stdout(&o)
}

const CYCLE: &str = "tour 3\n0 1\n1 2\n2 0\n";

#[test]
fn solve_fast_chain_and_cycle() {
    let chain = write("chain5.txt", &gen("fast-flips", 5, 0, 1));
    let o = run(&["solve-fast", chain.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("0 1 2 3 4\ncost 0/1\n"), "{out}");

    let cyc = write("cycle.txt", CYCLE);
    let out = stdout(&run(&["solve-fast", cyc.to_str().unwrap()]));
    assert!(out.contains("cost 1/1"), "{out}");
    let out = stdout(&run(&["solve-fast", cyc.to_str().unwrap(), "--divide-conquer"]));
    assert!(out.contains("cost 1/1"), "{out}");
}

#[test]
fn solve_fast_json() {
    let cyc = write("cycle-json.txt", CYCLE);
    let o = run(&["solve-fast", cyc.to_str().unwrap(), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cost"], "1/1");
    assert_eq!(v["ranking"].as_array().unwrap().len(), 3);
}

#[test]
fn malformed_weight_exits_two_with_line() {
    let bad = write("bad.txt", "fast 3 1\nw 0 1 1\nw 0 2 one\nw 1 2 1\n");
    let o = run(&["solve-fast", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let o = run(&["solve-fast", "/nonexistent/file"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn resource_guard_exits_three() {
    let cyc = write("cycle-guard.txt", CYCLE);
    let o = run(&["solve-fast", cyc.to_str().unwrap(), "--no-prune", "--psi-cap", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let b = write("b-guard.txt", &gen("bt-flips", 7, 10, 2));
    let o = run(&["solve-bt", b.to_str().unwrap(), "--state-cap", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn aggregate_examples() {
    let p1 = write("p1.txt", "a b c\na b c\nb a c\n");
    let out = stdout(&run(&["aggregate", p1.to_str().unwrap()]));
    assert!(out.starts_with("a b c\ncost 1/3\n"), "{out}");
    let single = write("single.txt", "x z y\n");
    let out = stdout(&run(&["aggregate", single.to_str().unwrap()]));
    assert!(out.starts_with("x z y\ncost 0/1\n"), "{out}");
    let unknown = write("unknown.txt", "a b c\na b q\n");
    assert_eq!(run(&["aggregate", unknown.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn solve_bt_examples() {
    let b0 = write("b0.txt", &gen("bt-flips", 6, 0, 0));
    let out = stdout(&run(&["solve-bt", b0.to_str().unwrap()]));
    assert!(out.contains("\ncost 0\n"), "{out}");

    let mut text = gen("bt-flips", 4, 0, 0).replace("0 1 2 1", "0 1 2 0");
    let b1 = write("b1.txt", &text);
    let out = stdout(&run(&["solve-bt", b1.to_str().unwrap()]));
    assert!(out.contains("\ncost 1\n"), "{out}");
    let out = stdout(&run(&["oracle", b1.to_str().unwrap()]));
    assert!(out.contains("cost 1"), "{out}");

    text = text.replace("1 2 3 2\n", "");
    let missing = write("missing.txt", &text);
    let o = run(&["solve-bt", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing triple (1, 2, 3)"));
}

#[test]
fn gen_is_deterministic() {
    assert_eq!(gen("fast-flips", 30, 12, 5), gen("fast-flips", 30, 12, 5));
    assert_ne!(gen("fast-flips", 30, 12, 5), gen("fast-flips", 30, 12, 6));
    assert_eq!(gen("bt-flips", 12, 30, 5), gen("bt-flips", 12, 30, 5));
}

#[test]
fn kernelize_and_oracle() {
    let chain = write("chain-k.txt", &gen("fast-flips", 5, 0, 0));
    let out = stdout(&run(&["kernelize", chain.to_str().unwrap()]));
    assert!(out.starts_with("kernel 0 vertices, shift 0/1"), "{out}");
    let cyc = write("cycle-k.txt", CYCLE);
    let out = stdout(&run(&["kernelize", cyc.to_str().unwrap()]));
    assert!(out.starts_with("kernel 3 vertices"), "{out}");
    let out = stdout(&run(&["oracle", cyc.to_str().unwrap()]));
    assert!(out.contains("cost 1/1"), "{out}");
}

#[test]
fn bench_rows_are_reproducible() {
    let args = ["bench", "--n", "30", "--k", "0,5,10", "--reps", "2", "--seed", "3"];
    let strip = |o: Output| -> Vec<String> {
        stdout(&o)
            .lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
            .collect()
    };
    let a = strip(run(&args));
    let b = strip(run(&args));
    assert_eq!(a, b);
    assert_eq!(a[0], "problem,n,k,opt_num,opt_den,psi,dp_states");
    assert_eq!(a.len(), 7);
    assert!(a[1].starts_with("fast,30,0,0,1,0,"));
    let o = run(&["bench", "--kind", "bt-flips", "--n", "12", "--k", "0,6"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);
}

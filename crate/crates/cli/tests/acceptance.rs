//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! lines show up in plain `cargo test` output; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use flipflop_cli::suites::{run_suite, Outcome, Suite, SuiteOptions};

struct Criterion {
    id: u32,
    title: &'static str,
    suites: &'static [Suite],
    limit: Duration,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "complete-graph exactness", suites: &[Suite::CompleteGraph], limit: Duration::from_secs(6 * 60) },
    Criterion { id: 2, title: "walk spectrum and +-1 multiplicities", suites: &[Suite::Theorem1, Suite::AppendixA], limit: Duration::MAX },
    Criterion { id: 3, title: "search spectrum, lifts, imaginary x", suites: &[Suite::Theorem2], limit: Duration::MAX },
    Criterion { id: 4, title: "master-equation residuals", suites: &[Suite::MasterEquation], limit: Duration::MAX },
    Criterion { id: 5, title: "alpha_delta scaling with N", suites: &[Suite::AlphaScaling], limit: Duration::MAX },
    Criterion { id: 6, title: "start and target overlap inequalities", suites: &[Suite::OverlapBounds], limit: Duration::MAX },
    Criterion { id: 7, title: "success on the D=3 L=8 lattice", suites: &[Suite::LatticeSuccess], limit: Duration::from_secs(120) },
    Criterion { id: 8, title: "iteration-count scalings on lattices", suites: &[Suite::LatticeScaling], limit: Duration::MAX },
    Criterion { id: 9, title: "delta=0 eigenphase bounds", suites: &[Suite::AppendixD], limit: Duration::MAX },
    Criterion { id: 10, title: "lattice sum slopes", suites: &[Suite::AppendixE], limit: Duration::MAX },
    Criterion { id: 11, title: "quadratic norm and l1 identities", suites: &[Suite::AppendixF], limit: Duration::MAX },
    Criterion { id: 12, title: "classical hitting times", suites: &[Suite::Hitting], limit: Duration::from_secs(300) },
];

fn run_criterion(c: &Criterion) -> (bool, String) {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;
    for &s in c.suites {
        match run_suite(s, &SuiteOptions::default()) {
            Ok(o) => {
                pass &= o.pass();
                notes.push(summary(&o));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{}: error {e:#}", s.name()));
            }
        }
    }
    let took = start.elapsed();
    if took > c.limit {
        pass = false;
        notes.push(format!("over time limit {:?}", c.limit));
    }
    (pass, format!("{} [{:.1}s]", notes.join("; "), took.as_secs_f64()))
}

fn summary(o: &Outcome) -> String {
    let bad: Vec<String> = o.failures().take(3).map(|r| format!("{} {}={:e}", r.instance, r.check.check_name, r.check.measured)).collect();
    if bad.is_empty() {
        format!("{} {} checks", o.suite, o.rows.len())
    } else {
        format!("{} failing: {}", o.suite, bad.join(", "))
    }
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

/// Every command twice with identical settings; outputs compared byte for byte.
/// The second run uses a different worker count.
fn determinism() -> (bool, String) {
    let start = Instant::now();
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"graph":"random","n":40,"d":3,"m":2,"seed":5,"delta":"auto","steps":"auto"}"#).unwrap();
    let cfg = cfg.display().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["spectrum", "--graph", "lattice", "--L", "4", "--D", "2"],
        vec!["search", "--config", &cfg, "--dump-state"],
        vec!["search", "--graph", "lattice", "--L", "5", "--D", "3", "--m", "2", "--seed", "3"],
        vec!["graph", "--graph", "random", "--n", "30", "--d", "4", "--seed", "9"],
        vec!["sweep", "--graph", "random", "--d", "3", "--m", "1", "--axis", "N", "--values", "16,24,32,48", "--measure", "search", "--fit", "N:Q"],
        vec!["sweep", "--graph", "complete", "--m", "1", "--axis", "N", "--values", "8,16,32", "--measure", "hitting", "--trials", "30000", "--seed", "4"],
        vec!["sweep", "--graph", "lattice", "--D", "2", "--L", "5", "--axis", "delta", "--values", "0,0.3,0.6", "--measure", "eigen"],
        vec!["verify", "appendixD"],
    ];
    let exe = env!("CARGO_BIN_EXE_qgs");
    let mut runs = Vec::new();
    for (k, jobs) in ["1", "4"].iter().enumerate() {
        let dir = root.path().join(format!("run{k}"));
        for (i, args) in commands.iter().enumerate() {
            let out = dir.join(format!("cmd{i}"));
            let out = out.display().to_string();
            let mut cmd = Command::new(exe);
            cmd.args(args).args(["--jobs", jobs, "--out", &out]);
            let status = cmd.output().unwrap();
            if !status.status.success() {
                return (false, format!("`{}` failed: {}", args.join(" "), String::from_utf8_lossy(&status.stderr)));
            }
        }
        runs.push(files(&dir));
    }
    let same = runs[0] == runs[1] && !runs[0].is_empty();
    let diff: Vec<&String> = runs[0].keys().filter(|k| runs[0].get(*k) != runs[1].get(*k)).collect();
    (same, format!("{} files identical across reruns{} [{:.1}s]", runs[0].len(), if diff.is_empty() { String::new() } else { format!(", differing: {diff:?}") }, start.elapsed().as_secs_f64()))
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let mut failed = 0;
    for c in CRITERIA {
        let (pass, note) = run_criterion(c);
        failed += usize::from(!pass);
        println!("criterion {:>2} {}: {} ({note})", c.id, if pass { "PASS" } else { "FAIL" }, c.title);
    }
    let (pass, note) = determinism();
    failed += usize::from(!pass);
    println!("criterion 13 {}: CLI determinism ({note})", if pass { "PASS" } else { "FAIL" });
    println!("acceptance: {} of 13 criteria pass", 13 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

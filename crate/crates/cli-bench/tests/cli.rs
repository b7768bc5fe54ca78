use std::process::Command as Proc;

use clap::Parser;
use cli_bench::bench::{fitted_exponent, sweep, to_csv, CSV_HEADER};
use cli_bench::{execute, Cli, CliError, Command, Outcome};
use serde_json::Value;

fn cli(args: &[&str]) -> Cli {
    Cli::parse_from(std::iter::once("netdecomp").chain(args.iter().copied()))
}

fn exec(args: &[&str]) -> Result<Outcome, CliError> {
    execute(&cli(args))
}

fn record(out: &Outcome) -> Value {
    let mut v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
    v.as_object_mut().unwrap().remove("wall_ms");
    v
}

fn binary(args: &[&str]) -> (i32, String, String) {
    let out = Proc::new(env!("CARGO_BIN_EXE_netdecomp")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn path_run_checks_out() {
    let out = exec(&["run", "--graph", "gen:path:n=4", "--algo", "fast", "--check"]).unwrap();
    assert!(out.passed);
    let r = record(&out);
    assert!(r["stats"]["colors"].as_u64().unwrap() <= 3);
    assert_eq!(r["checks"]["status"], "pass");
    assert_eq!(r["n"], 4);
}

#[test]
fn runs_are_deterministic() {
    let args = [
        "run", "--graph", "gen:gnp:n=256,p=0.03", "--seed", "7", "--algo", "fast", "--mode", "faithful", "--bandwidth", "32",
    ];
    let (a, b) = (exec(&args).unwrap(), exec(&args).unwrap());
    assert_eq!(record(&a), record(&b));
    // Keys come out in declaration order.
    let at = |k: &str| a.stdout.find(&format!("\"{k}\":")).unwrap();
    assert!(at("algo") < at("graph") && at("graph") < at("seed") && at("rounds") < at("wall_ms"));
}

#[test]
fn every_algorithm_runs_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    for algo in ["fast", "rg", "slow-id", "fast-id", "mis", "coloring", "balanced-color"] {
        let graph = if algo == "balanced-color" { "gen:grid:rows=9,cols=11" } else { "gen:gnp:n=150,p=0.04" };
        let out = dir.path().join(format!("{algo}.txt"));
        let res = exec(&["run", "--graph", graph, "--seed", "5", "--algo", algo, "--check", "--out", out.to_str().unwrap()]).unwrap();
        assert!(res.passed, "{algo}: {}", res.stdout);
        let v = exec(&["verify", "--graph", graph, "--seed", "5", "--input", out.to_str().unwrap()]).unwrap();
        assert!(v.passed && v.stdout.ends_with("status=pass\n"), "{algo}: {}", v.stdout);
    }
}

#[test]
fn traces_are_written_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.txt");
    exec(&["run", "--graph", "gen:grid:rows=6,cols=6", "--algo", "fast-id", "--trace", trace.to_str().unwrap()]).unwrap();
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("carve v1\n"));
    let first = format!("carve v1\n{}", text.split("carve v1\n").nth(1).unwrap());
    let single = dir.path().join("one.txt");
    std::fs::write(&single, first).unwrap();
    let v = exec(&["verify", "--graph", "gen:grid:rows=6,cols=6", "--input", single.to_str().unwrap()]).unwrap();
    assert!(v.passed, "{}", v.stdout);
}

#[test]
fn errors_and_exit_codes() {
    let (code, _, err) = binary(&["run", "--algo", "fast", "--graph", "missing.txt"]);
    assert_eq!(code, 2);
    assert!(err.contains("missing.txt"));
    assert!(matches!(exec(&["run", "--algo", "fast", "--graph", "gen:gnp:n=10,p=0.2"]), Err(CliError::Usage(_))));
    assert!(matches!(exec(&["run", "--algo", "fast", "--graph", "gen:path:n=4", "--bandwidth", "0"]), Err(CliError::Usage(_))));
    assert!(matches!(exec(&["run", "--algo", "fast", "--graph", "gen:path:n=300", "--id-bits", "4"]), Err(CliError::Usage(_))));
    let (code, _, _) = binary(&["run", "--algo", "nope", "--graph", "gen:path:n=4"]);
    assert_eq!(code, 2);
    let (code, out, _) = binary(&["run", "--algo", "mis", "--graph", "gen:cycle:n=9"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("{\"algo\":\"mis\""));
}

#[test]
fn tampered_and_mismatched_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.txt");
    let graph = "gen:grid:rows=5,cols=5";
    exec(&["run", "--graph", graph, "--algo", "rg", "--out", path.to_str().unwrap()]).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(exec(&["verify", "--graph", graph, "--input", path.to_str().unwrap()]).unwrap().passed);

    // Give node 0 a color its cluster does not have.
    let tampered: String = text
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split(' ').collect();
            if f.len() == 4 && f[0] == "c" && f[1] == "0" { format!("c 0 99 {}\n", f[3]) } else { format!("{l}\n") }
        })
        .collect();
    assert_ne!(tampered, text);
    std::fs::write(&path, &tampered).unwrap();
    let (code, out, _) = binary(&["verify", "--graph", graph, "--input", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("witness.") && out.ends_with("status=fail\n"), "{out}");

    std::fs::write(&path, &text).unwrap();
    let other = exec(&["verify", "--graph", "gen:path:n=7", "--input", path.to_str().unwrap()]);
    assert!(matches!(other, Err(CliError::Format(_))));
    let mis = dir.path().join("m.txt");
    std::fs::write(&mis, "m 0\nm 30\n").unwrap();
    assert!(matches!(exec(&["verify", "--graph", graph, "--input", mis.to_str().unwrap()]), Err(CliError::Format(_))));
    std::fs::write(&mis, "m 0\nm 1\n").unwrap();
    let v = exec(&["verify", "--graph", graph, "--input", mis.to_str().unwrap()]).unwrap();
    assert!(!v.passed && v.stdout.contains("check.independent=fail"));
}

#[test]
fn bench_shapes() {
    let Command::Bench(empty) = cli(&["bench", "--sizes", ""]).command else { unreachable!() };
    let rows = sweep(&empty).unwrap();
    assert!(rows.is_empty());
    assert_eq!(to_csv(&rows), CSV_HEADER.join(",") + "\n");
    assert_eq!(fitted_exponent(&rows), None);

    let Command::Bench(grid) = cli(&["bench", "--sizes", "64,128", "--seeds", "1,2"]).command else { unreachable!() };
    let rows = sweep(&grid).unwrap();
    assert_eq!(rows.iter().map(|r| (r.n, r.seed)).collect::<Vec<_>>(), [(64, 1), (64, 2), (128, 1), (128, 2)]);
    assert_eq!(to_csv(&rows).lines().count(), 5);
    assert!(fitted_exponent(&rows).is_some());
    assert!(matches!(sweep(&Cli::parse_from(["x", "bench", "--algo", "mis"]).command.bench()), Err(CliError::Usage(_))));
}

#[test]
fn id_width_sweep_keeps_quality() {
    let Command::Bench(a) = cli(&["bench", "--algo", "fast-id", "--sizes", "256", "--id-bits", "16,32,64"]).command else {
        unreachable!()
    };
    let rows = sweep(&a).unwrap();
    assert_eq!(rows.len(), 3);
    let q = |r: &cli_bench::bench::BenchRow| (r.colors, r.clusters, r.kills, r.max_weak_diameter, r.max_overlap);
    assert!(rows.iter().all(|r| q(r) == q(&rows[0])), "{rows:?}");
}

trait BenchOf {
    fn bench(self) -> cli_bench::BenchArgs;
}

impl BenchOf for Command {
    fn bench(self) -> cli_bench::BenchArgs {
        match self {
            Command::Bench(a) => a,
            _ => unreachable!(),
        }
    }
}

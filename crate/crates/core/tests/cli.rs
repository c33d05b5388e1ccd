use std::path::Path;
use std::process::{Command, Output};

use magpool::io::{read_graph, read_reports_file, read_result};
use magpool::Error;

fn magpool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magpool")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gen_pool_eval_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("barbell.graph");
    let result = dir.path().join("barbell.result");
    let g = graph.to_str().unwrap();
    let r = result.to_str().unwrap();
    let o = magpool(&["gen", "--kind", "barbell", "--m1", "20", "--m2", "20", "--bridge", "24", "--out", g]);
    assert!(o.status.success());
    assert_eq!(read_graph(&graph).unwrap().node_count(), 64);

    let o = magpool(&["pool", "--input", g, "--ratio", "0.5", "--measure", "spread", "--metric", "minupdate", "--out", r]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let pooled = read_result(&result).unwrap();
    assert_eq!(pooled.pooled.node_count(), 32);
    assert!(!pooled.exhausted);

    let o = magpool(&["eval", "--original", g, "--pooled", r]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("spectral_distance "));
    assert!(lines[1].starts_with("relative_mag_diff "));
}

#[test]
fn generator_inputs_and_seeds_are_reproducible() {
    let args = ["pool", "--input", "gen:erdos_renyi:n=20,p=0.3,seed=4", "--ratio", "0.4", "--tiebreak", "seed:9"];
    let a = magpool(&args);
    let b = magpool(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn diversity_reports_both_measures() {
    let o = magpool(&["diversity", "--input", "gen:path:n=2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("mag "));
    assert!(text.contains("\nspread "));
}

#[test]
fn input_errors_exit_with_one() {
    for args in [
        &["pool", "--input", "/definitely/missing.graph"][..],
        &["pool", "--input", "gen:ring:n=8", "--ratio", "0"],
        &["pool", "--input", "gen:ring:n=8", "--measure", "entropy"],
        &["diversity", "--input", "gen:ring:n=8", "--scale", "-1"],
        &["gen", "--kind", "ring"],
        &["sweep", "--dataset", "/definitely/missing", "--out", "/tmp/x.csv"],
        &["frobnicate"],
    ] {
        let o = magpool(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(magpool(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failures_map_to_two() {
    assert_eq!(Error::ConvergenceFailure(10).exit_code(), 2);
    let ill = Error::IllConditioned {
        component: 0,
        residual: 1.0,
        condition: 1e20,
    };
    assert_eq!(ill.exit_code(), 2);
    assert_eq!(Error::InvalidParams(String::new()).exit_code(), 1);
}

fn write_toy(dir: &Path) {
    std::fs::write(dir.join("TOY_A.txt"), "1,2\n2,1\n2,3\n3,4\n4,1\n5,6\n6,7\n7,5\n7,8\n").unwrap();
    std::fs::write(dir.join("TOY_graph_indicator.txt"), "1\n1\n1\n1\n2\n2\n2\n2\n").unwrap();
}

#[test]
fn sweep_writes_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    write_toy(dir.path());
    let out = dir.path().join("sweep.csv");
    let o = magpool(&[
        "sweep",
        "--dataset",
        dir.path().to_str().unwrap(),
        "--ratios",
        "0.5,1",
        "--methods",
        "mag,spread,random",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_reports_file(&out).unwrap();
    assert_eq!(rows.len(), 2 * 3 * 2);
    for r in rows.iter().filter(|r| r.ratio == 1.0) {
        assert_eq!(r.spectral_distance, 0.0);
    }
    let summary = stdout(&o);
    assert!(summary.starts_with("ratio,method,count,failures,"));
    assert_eq!(summary.lines().count(), 1 + 2 * 3);
}

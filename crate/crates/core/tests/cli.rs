use std::fs;
use std::path::Path;

use lrs_pfsrc::cli::{run, EXIT_ALL_FAILED, EXIT_IO, EXIT_OK, EXIT_USAGE};
use lrs_pfsrc::io::{load_matrix, parse_predictions, Manifest, TRACE_HEADER};

fn cli(args: &[&str]) -> i32 {
    run(std::iter::once("lrs-pfsrc").chain(args.iter().copied()))
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn generate(dir: &Path) {
    assert_eq!(cli(&["generate", "--out", &p(dir, "data")]), EXIT_OK);
}

fn solve(dir: &Path, out: &str, extra: &[&str]) -> i32 {
    let mut args = vec![
        "solve".to_string(),
        "--x".into(), p(dir, "data/X.csv"),
        "--y".into(), p(dir, "data/Y.csv"),
        "--labels".into(), p(dir, "data/labels.txt"),
        "--out".into(), p(dir, out),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    cli(&refs)
}

#[test]
fn solve_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate(dir);
    let extra_trace = p(dir, "copy.csv");
    assert_eq!(solve(dir, "sol", &["--trace", &extra_trace]), EXIT_OK);
    for f in ["Z.csv", "A.csv", "E.csv", "trace.csv", "manifest.txt"] {
        assert!(dir.join("sol").join(f).is_file(), "{f}");
    }
    let z = load_matrix(dir.join("sol/Z.csv")).unwrap();
    assert_eq!(z.shape(), (30, 18));
    let manifest = Manifest::load(dir.join("sol/manifest.txt")).unwrap();
    assert_eq!(manifest.get("converged"), Some("true"));
    assert_eq!(manifest.get("lambda1"), Some("10"));
    assert!(manifest.get("final_r1").unwrap().parse::<f64>().unwrap() < 1e-4);
    assert!(manifest.get("wall_time_s").is_some());
    let trace = fs::read_to_string(dir.join("sol/trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some(TRACE_HEADER));
    assert_eq!(trace, fs::read_to_string(&extra_trace).unwrap());
}

#[test]
fn one_iteration_gives_one_trace_row_and_still_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    generate(tmp.path());
    assert_eq!(solve(tmp.path(), "sol", &["--max-iter", "1"]), EXIT_OK);
    let trace = fs::read_to_string(tmp.path().join("sol/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2);
    let manifest = Manifest::load(tmp.path().join("sol/manifest.txt")).unwrap();
    assert_eq!(manifest.get("converged"), Some("false"));
}

#[test]
fn pca_run_writes_the_basis() {
    let tmp = tempfile::tempdir().unwrap();
    generate(tmp.path());
    assert_eq!(solve(tmp.path(), "sol", &["--dim", "6", "--model", "lr"]), EXIT_OK);
    assert_eq!(load_matrix(tmp.path().join("sol/basis.csv")).unwrap().shape(), (30, 6));
    assert_eq!(load_matrix(tmp.path().join("sol/mean.csv")).unwrap().shape(), (30, 1));
    assert_eq!(load_matrix(tmp.path().join("sol/Z.csv")).unwrap().shape(), (30, 18));
}

#[test]
fn usage_validation_and_io_errors_have_distinct_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate(dir);
    assert_eq!(cli(&["solve", "--x", &p(dir, "data/X.csv"), "--out", &p(dir, "o")]), EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(solve(dir, "o", &["--mu1", "-1"]), EXIT_USAGE);
    assert_eq!(solve(dir, "o", &["--model", "xyz"]), EXIT_USAGE);
    assert_eq!(
        cli(&["solve", "--x", &p(dir, "missing.csv"), "--labels", &p(dir, "data/labels.txt"), "--out", &p(dir, "o")]),
        EXIT_IO
    );
    fs::write(dir.join("bad.txt"), "1\n0\n").unwrap();
    assert_eq!(
        cli(&["solve", "--x", &p(dir, "data/X.csv"), "--labels", &p(dir, "bad.txt"), "--out", &p(dir, "o")]),
        EXIT_USAGE
    );
    assert_eq!(cli(&["--help"]), EXIT_OK);
}

#[test]
fn classify_writes_ccr_and_predictions() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate(dir);
    assert_eq!(solve(dir, "sol", &["--lambda1", "0.09"]), EXIT_OK);
    let code = cli(&[
        "classify",
        "--solution", &p(dir, "sol"),
        "--labels", &p(dir, "data/labels.txt"),
        "--truth", &p(dir, "data/Y_labels.txt"),
        "--out", &p(dir, "cls"),
    ]);
    assert_eq!(code, EXIT_OK);
    let ccr = load_matrix(dir.join("cls/ccr.csv")).unwrap();
    assert_eq!(ccr.shape(), (3, 12));
    for col in ccr.column_iter() {
        let weighted: f64 = col.iter().map(|c| 6.0 * c).sum();
        assert!((weighted - 1.0).abs() < 1e-10);
    }
    let pred = parse_predictions(&fs::read_to_string(dir.join("cls/pred.txt")).unwrap()).unwrap();
    assert_eq!(pred.len(), 12);
}

#[test]
fn collapsed_solution_prints_unclassified_marks() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate(dir);
    assert_eq!(solve(dir, "sol", &[]), EXIT_OK);
    let code = cli(&["classify", "--solution", &p(dir, "sol"), "--labels", &p(dir, "data/labels.txt"), "--out", &p(dir, "cls")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(fs::read_to_string(dir.join("cls/pred.txt")).unwrap(), "?\n".repeat(12));
    assert!(fs::read_to_string(dir.join("cls/ccr.csv")).unwrap().contains("NaN"));
}

#[test]
fn classify_rejects_missing_or_empty_solutions() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate(dir);
    let args = |sol: &str| {
        cli(&["classify", "--solution", &p(dir, sol), "--labels", &p(dir, "data/labels.txt"), "--out", &p(dir, "cls")])
    };
    assert_eq!(args("nowhere"), EXIT_USAGE);
    let code = cli(&[
        "solve", "--x", &p(dir, "data/X.csv"), "--labels", &p(dir, "data/labels.txt"), "--out", &p(dir, "m0"),
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(args("m0"), EXIT_USAGE);
}

#[test]
fn experiment_writes_grids_and_continues_past_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("plan.txt"), "models = SRC, SRC\nvalues = 6\nseeds = 3\n").unwrap();
    assert_eq!(cli(&["experiment", &p(dir, "plan.txt"), "--out", &p(dir, "one")]), EXIT_OK);
    let results = fs::read_to_string(dir.join("one/results.csv")).unwrap();
    let rows: Vec<&str> = results.lines().collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0], "model,labeled_count=6");
    assert_eq!(rows[1], rows[2]);
    for f in ["runs.csv", "results_std.csv", "rsi.csv", "cci.csv"] {
        assert!(dir.join("one").join(f).is_file());
    }

    fs::write(dir.join("single.txt"), "models = LR-S-PFSR\nvalues = 4\nlambda1 = 0.09\n").unwrap();
    assert_eq!(cli(&["experiment", &p(dir, "single.txt"), "--out", &p(dir, "single")]), EXIT_OK);
    assert_eq!(fs::read_to_string(dir.join("single/results.csv")).unwrap().lines().count(), 2);

    fs::write(dir.join("bad.txt"), "models = SRC\nvalues = 50\n").unwrap();
    assert_eq!(cli(&["experiment", &p(dir, "bad.txt"), "--out", &p(dir, "bad")]), EXIT_ALL_FAILED);
    assert!(fs::read_to_string(dir.join("bad/results.csv")).unwrap().contains("ERR"));

    fs::write(dir.join("invalid.txt"), "models = SRC\n").unwrap();
    assert_eq!(cli(&["experiment", &p(dir, "invalid.txt"), "--out", &p(dir, "x")]), EXIT_USAGE);
}

#[test]
fn experiment_reads_file_sources() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(cli(&["generate", "--out", &p(dir, "data"), "--noise", "0.05", "--seed", "9"]), EXIT_OK);
    fs::write(
        dir.join("plan.txt"),
        "source = files\nx = data/X.csv\nlabels = data/labels.txt\ny = data/Y.csv\ny_labels = data/Y_labels.txt\n\
         models = SRC, LR-PFSR\nsweep = unlabeled_count\nvalues = 2, 4\nfixed_count = 3\nseeds = 1, 2\n",
    )
    .unwrap();
    assert_eq!(cli(&["experiment", &p(dir, "plan.txt"), "--out", &p(dir, "exp")]), EXIT_OK);
    let runs = fs::read_to_string(dir.join("exp/runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 2 * 2 * 2);
    assert!(!runs.contains("ERR"));
}

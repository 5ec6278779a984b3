use stargraph::spectra::{Provenance, SpectralReport};
use stargraph_cli::{run, Example, ProblemFile, RunOptions, Status, Task, VerifyReport};
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stargraph"))
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn eigs_on_equilateral_star() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(Task::Eigs, &ProblemFile::example(Example::Equilateral3), &RunOptions::default(), dir.path()).unwrap();
    assert_eq!(out.status, Status::Ok);
    let report: SpectralReport = serde_json::from_str(&read(&dir.path().join("report.json"))).unwrap();
    let got: Vec<(f64, usize, Provenance)> = report.eigenvalues.iter().map(|e| (e.x, e.multiplicity, e.provenance)).collect();
    let expect = [
        (0.25, 1, Provenance::KirchhoffZero),
        (1.0, 2, Provenance::Overlap),
        (2.25, 1, Provenance::KirchhoffZero),
        (4.0, 2, Provenance::Overlap),
        (6.25, 1, Provenance::KirchhoffZero),
        (9.0, 2, Provenance::Overlap),
    ];
    assert_eq!(got.len(), expect.len());
    for (g, e) in got.iter().zip(expect) {
        assert!((g.0 - e.0).abs() < 1e-9 * e.0);
        assert_eq!((g.1, g.2), (e.1, e.2));
    }
    let csv = read(&dir.path().join("eigenvalues.csv"));
    assert!(csv.starts_with("x,N,provenance\n"));
    assert_eq!(csv.lines().count(), 7);
    let plot = read(&dir.path().join("plot.csv"));
    assert_eq!(plot.lines().filter(|l| !l.ends_with(',')).count(), 1 + 6);
}

#[test]
fn classify_k74_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(Task::Classify, &ProblemFile::example(Example::K74), &RunOptions::default(), dir.path()).unwrap();
    assert_eq!(out.status, Status::Ok);
    let report: SpectralReport = serde_json::from_str(&read(&dir.path().join("report.json"))).unwrap();
    for (lo, hi, level) in [(2.0, 3.0, 1), (3.0, 4.0, 2), (4.0, 5.0, 1), (5.0, 6.0, 1), (6.0, 7.0, 3)] {
        let items: Vec<_> = report.sac_items.iter().filter(|s| lo < s.x && s.x < hi).collect();
        assert!(!items.is_empty());
        assert!(items.iter().all(|s| s.multiplicity == level), "({lo},{hi})");
    }
    assert!(report.sac_items.iter().all(|s| 2.0 < s.x && s.x < 7.0));
    assert_eq!(report.ac_regions.len(), 1);
    assert_eq!(report.ac_regions[0].r, 4);
    // Plot markers carry the multiplicities of the overlap eigenvalues.
    let plot = read(&dir.path().join("plot.csv"));
    let mut levels: Vec<usize> = plot.lines().skip(1).filter_map(|l| l.rsplit(',').next()?.parse().ok()).collect();
    levels.sort();
    levels.dedup();
    assert_eq!(levels, vec![1, 2, 3]);
}

#[test]
fn verify_builtin_suite_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin().args(["verify", "--out"]).arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let report: VerifyReport = serde_json::from_str(&read(&dir.path().join("verify.json"))).unwrap();
    assert!(report.passed);
    let names: Vec<&str> = report.suites.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, ["kac", "aronszajn-donoghue", "rank-lemma", "herglotz-psd"]);
}

#[test]
fn schema_violations_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"system":{"edges":[{"atoms":[[0,1]]}]},"window":[0,1]}"#).unwrap();
    let status = bin().arg("eigs").arg(&bad).arg("--out").arg(dir.path().join("o")).status().unwrap();
    assert_eq!(status.code(), Some(2));
    std::fs::write(&bad, r#"{"unknown":true}"#).unwrap();
    let status = bin().arg("eigs").arg(&bad).arg("--out").arg(dir.path().join("o")).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bin().args(["eigs", "--out"]).arg(dir.path().join("o")).status().unwrap();
    assert_eq!(status.code(), Some(2));
    // Numerically integrated edges have no exact path.
    let status = bin().args(["eigs", "--example", "equilateral3", "--exact", "--out"]).arg(dir.path().join("o")).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn coarse_oracle_grid_exits_three_with_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.json");
    std::fs::write(
        &problem,
        r#"{"system":{"edges":[{"length":1.0,"outer_angle":0},{"length":1.0001,"outer_angle":0},{"length":1.0002,"outer_angle":0}]},
            "window":[9.0,10.5],"grid":100}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let status = bin().arg("oracle").arg(&problem).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(3));
    assert!(out.join("oracle.json").exists());
}

#[test]
fn artifacts_are_deterministic_and_round_trip() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let problem = ProblemFile::example(Example::Kac2);
    let opts = RunOptions { grid: Some(64), ..RunOptions::default() };
    let par = RunOptions { jobs: Some(3), ..opts.clone() };
    for task in [Task::Eigs, Task::Classify, Task::Weyl] {
        let ra = run(task, &problem, &opts, a.path()).unwrap();
        let rb = run(task, &problem, &par, b.path()).unwrap();
        for (pa, pb) in ra.artifacts.iter().zip(&rb.artifacts) {
            assert_eq!(read(pa), read(pb), "{}", pa.display());
        }
    }
    let text = read(&a.path().join("report.json"));
    let report: SpectralReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);
    let again: SpectralReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(again, report);
}

#[test]
fn problem_file_with_window_flag_and_angles() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.json");
    std::fs::write(
        &problem,
        r#"{"system":{"edges":[{"atoms":[[-1,1]]},{"atoms":[[1,1]]}],"interface":{"type":"angles","a":[0,0],"b":1.5707963267948966}}}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let status = bin().arg("eigs").arg(&problem).args(["--window", "-0.9", "0.9", "--out"]).arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(read(&out.join("eigenvalues.csv")), "x,N,provenance\n0,1,kirchhoff-zero\n");
    let parsed = ProblemFile::parse(&read(&problem)).unwrap();
    let back = ProblemFile::parse(&serde_json::to_string(&parsed).unwrap()).unwrap();
    assert_eq!(back, parsed);
}

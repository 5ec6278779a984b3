//! Batch front end: reads a problem file, runs one task and writes JSON and
//! CSV artifacts into an output directory.

mod problem;
pub mod verify;

pub use problem::{EpsOverrides, Example, ProblemFile, RunOptions, Task};

use num_complex::Complex64;
use problem::{resolve, Resolved};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stargraph::pasting::{matrix_weyl, trace_weyl, PastedSystem, WeylEntry};
use stargraph::schrodinger::Edge;
use stargraph::spectra::{
    classify_spectrum_with, fd_oracle, find_point_spectrum_with, FdSpectrum, SpectralReport,
};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid problem: {0}")]
    Schema(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) | CliError::Io { .. } => 2,
            CliError::Compute(_) => 3,
        }
    }
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// Some quantity did not converge; artifacts are partial.
    NonConvergence,
    /// A verified invariant failed.
    InvariantBreach,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NonConvergence => 3,
            Status::InvariantBreach => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub status: Status,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<verify::SuiteResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub window: (f64, f64),
    pub grid: usize,
    pub spectrum: FdSpectrum,
}

struct Writer {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
        Ok(Self { dir: dir.into(), written: Vec::new() })
    }

    fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value).map_err(compute)?;
        body.push('\n');
        self.text(name, &body)
    }
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(compute)?;
    for r in rows {
        w.write_record(&r).map_err(compute)?;
    }
    String::from_utf8(w.into_inner().map_err(compute)?).map_err(compute)
}

/// Runs `f` over `items` keeping their order, on `jobs` threads when asked.
fn map_ordered<T: Sync, R: Send>(items: &[T], jobs: Option<usize>, f: impl Fn(&T) -> R + Sync) -> Result<Vec<R>, CliError> {
    match jobs {
        Some(j) if j > 1 => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(j).build().map_err(compute)?;
            Ok(pool.install(|| items.par_iter().map(&f).collect()))
        }
        _ => Ok(items.iter().map(f).collect()),
    }
}

fn grid_points(window: (f64, f64), n: usize) -> Vec<f64> {
    let (lo, hi) = window;
    if n == 0 || lo >= hi {
        return Vec::new();
    }
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Plot table `x,im_trace,N`: `Im tr M(x + iε)` on `grid` points of the
/// window and one marker row per spectral point carrying its multiplicity,
/// sorted by `x`.
pub fn emit_plot_data(
    sys: &PastedSystem,
    markers: &[(f64, usize)],
    window: (f64, f64),
    grid: usize,
    eps: f64,
    jobs: Option<usize>,
) -> Result<String, CliError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(CliError::Schema(format!("plot height must be positive, got {eps}")));
    }
    let xs = grid_points(window, grid);
    let values = map_ordered(&xs, jobs, |&x| trace_weyl(sys, Complex64::new(x, eps)).map(|t| t.im))?;
    let mut rows: Vec<(f64, u8, Vec<String>)> = Vec::new();
    for (x, v) in xs.iter().zip(values) {
        let v = v.map_err(compute)?;
        rows.push((*x, 0, vec![x.to_string(), v.to_string(), String::new()]));
    }
    for &(x, n) in markers.iter().filter(|(x, _)| window.0 < window.1 && window.0 <= *x && *x <= window.1) {
        let v = trace_weyl(sys, Complex64::new(x, eps)).map_err(compute)?.im;
        rows.push((x, 1, vec![x.to_string(), v.to_string(), n.to_string()]));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    csv_string(&["x", "im_trace", "N"], rows.into_iter().map(|r| r.2))
}

fn eigenvalue_csv(report: &SpectralReport) -> Result<String, CliError> {
    csv_string(
        &["x", "N", "provenance"],
        report.eigenvalues.iter().map(|e| vec![e.x.to_string(), e.multiplicity.to_string(), e.provenance.as_str().into()]),
    )
}

fn regions_csv(report: &SpectralReport) -> Result<String, CliError> {
    let mut rows = Vec::new();
    for r in &report.ac_regions {
        let n = r.multiplicity.map(|n| n.to_string()).unwrap_or_default();
        rows.push(vec!["ac".into(), r.lo.to_string(), r.hi.to_string(), r.r.to_string(), n]);
    }
    for s in &report.sac_items {
        rows.push(vec!["sac".into(), s.x.to_string(), s.x.to_string(), (s.multiplicity + 1).to_string(), s.multiplicity.to_string()]);
    }
    for s in &report.ss_items {
        rows.push(vec!["ss".into(), s.x.to_string(), s.x.to_string(), "0".into(), s.multiplicity.to_string()]);
    }
    for x in &report.vanished {
        rows.push(vec!["vanished".into(), x.to_string(), x.to_string(), "1".into(), "0".into()]);
    }
    csv_string(&["kind", "lo", "hi", "r", "N"], rows)
}

fn markers(report: &SpectralReport) -> Vec<(f64, usize)> {
    let mut m: Vec<(f64, usize)> = report.eigenvalues.iter().map(|e| (e.x, e.multiplicity)).collect();
    m.sort_by(|a, b| a.0.total_cmp(&b.0));
    m
}

fn system(r: &Resolved) -> Result<&PastedSystem, CliError> {
    r.system.as_ref().ok_or_else(|| CliError::Schema("task needs a system".into()))
}

fn write_spectral(w: &mut Writer, r: &Resolved, report: &SpectralReport, jobs: Option<usize>) -> Result<Status, CliError> {
    w.json("report.json", report)?;
    w.text("eigenvalues.csv", &eigenvalue_csv(report)?)?;
    w.text("plot.csv", &emit_plot_data(system(r)?, &markers(report), r.window, r.grid.unwrap_or(200), r.plot_eps, jobs)?)?;
    Ok(if report.unresolved.is_empty() { Status::Ok } else { Status::NonConvergence })
}

fn run_eigs(w: &mut Writer, r: &Resolved, jobs: Option<usize>) -> Result<Status, CliError> {
    let sys = system(r)?;
    let ps = find_point_spectrum_with(sys, r.window, r.schedule.as_ref()).map_err(compute)?;
    let report = SpectralReport {
        window: r.window,
        eigenvalues: ps.eigenvalues,
        ac_regions: Vec::new(),
        sac_items: Vec::new(),
        vanished: Vec::new(),
        ss_items: Vec::new(),
        unresolved: ps.unresolved,
    };
    write_spectral(w, r, &report, jobs)
}

fn run_classify(w: &mut Writer, r: &Resolved, jobs: Option<usize>) -> Result<Status, CliError> {
    let sys = system(r)?;
    let ms = r
        .measures
        .as_ref()
        .ok_or_else(|| CliError::Schema("classification needs exact spectral measures for every edge".into()))?;
    let report = classify_spectrum_with(ms, sys, r.window, r.schedule.as_ref()).map_err(compute)?;
    w.text("regions.csv", &regions_csv(&report)?)?;
    write_spectral(w, r, &report, jobs)
}

fn run_weyl(w: &mut Writer, r: &Resolved, jobs: Option<usize>) -> Result<Status, CliError> {
    let sys = system(r)?;
    let xs = grid_points(r.window, r.grid.unwrap_or(200));
    let eps = r.plot_eps;
    let mats = map_ordered(&xs, jobs, |&x| matrix_weyl(sys, Complex64::new(x, eps)))?;
    let mut rows = Vec::new();
    for (x, m) in xs.iter().zip(mats) {
        let m = m.map_err(compute)?;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                rows.push(vec![x.to_string(), eps.to_string(), i.to_string(), j.to_string(), v.re.to_string(), v.im.to_string()]);
            }
        }
    }
    w.text("weyl.csv", &csv_string(&["x", "eps", "i", "j", "re", "im"], rows)?)?;
    Ok(Status::Ok)
}

fn run_verify(w: &mut Writer, r: &Resolved) -> Result<Status, CliError> {
    let seed = r.seed;
    let mut suites = vec![
        verify::kac(seed, 100),
        verify::aronszajn_donoghue(seed, 100),
        verify::rank_lemma(seed, 1000),
        verify::herglotz_psd(seed, 1000),
    ];
    if let Some(sys) = &r.system {
        if sys.n() == 2 && r.standard {
            suites.push(verify::system_kac(sys, r.window));
        }
    }
    let report = VerifyReport { passed: suites.iter().all(|s| s.passed), suites };
    w.json("verify.json", &report)?;
    Ok(if report.passed { Status::Ok } else { Status::InvariantBreach })
}

fn run_oracle(w: &mut Writer, r: &Resolved) -> Result<Status, CliError> {
    if !r.standard {
        return Err(CliError::Schema("the finite-difference oracle supports the standard interface only".into()));
    }
    let edges: Vec<Edge> = r
        .edges
        .iter()
        .map(|e| match e {
            WeylEntry::Edge(e) if e.alpha() == 0.0 && e.edge().is_finite() => Ok(e.edge().clone()),
            _ => Err(CliError::Schema("the oracle needs finite Schrödinger edges".into())),
        })
        .collect::<Result<_, _>>()?;
    let grid = r.grid.unwrap_or(4000);
    let spectrum = fd_oracle(&edges, grid, r.window).map_err(|e| CliError::Schema(e.to_string()))?;
    let rows = spectrum
        .clusters
        .iter()
        .map(|c| vec![c.value.to_string(), c.multiplicity.to_string(), c.error_estimate.to_string()])
        .collect::<Vec<_>>();
    w.text("oracle.csv", &csv_string(&["value", "multiplicity", "error_estimate"], rows)?)?;
    let coarse = spectrum.coarse_grid;
    w.json("oracle.json", &OracleReport { window: r.window, grid, spectrum })?;
    Ok(if coarse { Status::NonConvergence } else { Status::Ok })
}

/// Runs `task` on `problem` and writes its artifacts into `out_dir`.
pub fn run(task: Task, problem: &ProblemFile, opts: &RunOptions, out_dir: &Path) -> Result<RunOutcome, CliError> {
    let resolved = resolve(problem, opts, task != Task::Verify)?;
    let mut w = Writer::new(out_dir)?;
    let status = match task {
        Task::Eigs => run_eigs(&mut w, &resolved, opts.jobs)?,
        Task::Weyl => run_weyl(&mut w, &resolved, opts.jobs)?,
        Task::Classify => run_classify(&mut w, &resolved, opts.jobs)?,
        Task::Verify => run_verify(&mut w, &resolved)?,
        Task::Oracle => run_oracle(&mut w, &resolved)?,
    };
    Ok(RunOutcome { status, artifacts: w.written })
}

#[cfg(test)]
mod tests {
    use super::*;
    use stargraph::herglotz::HerglotzRep;
    use stargraph::measure::ScalarMeasure;

    fn pair() -> PastedSystem {
        let r = |x: f64| HerglotzRep::from_measure(ScalarMeasure::atom(x, 1.0).unwrap());
        PastedSystem::from_reps(vec![r(-1.0), r(1.0)]).unwrap()
    }

    #[test]
    fn plot_data_edge_cases() {
        let sys = pair();
        assert_eq!(emit_plot_data(&sys, &[(0.0, 1)], (0.5, 0.5), 10, 0.01, None).unwrap(), "x,im_trace,N\n");
        let out = emit_plot_data(&sys, &[(0.0, 1)], (-0.5, 0.5), 0, 0.01, None).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("0,") && lines[1].ends_with(",1"));
        assert!(emit_plot_data(&sys, &[], (-0.5, 0.5), 3, 0.0, None).is_err());
    }

    #[test]
    fn parallel_plot_matches_serial() {
        let sys = pair();
        let a = emit_plot_data(&sys, &[(0.0, 1)], (-0.9, 0.9), 50, 0.01, None).unwrap();
        let b = emit_plot_data(&sys, &[(0.0, 1)], (-0.9, 0.9), 50, 0.01, Some(4)).unwrap();
        assert_eq!(a, b);
    }
}

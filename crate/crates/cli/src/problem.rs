//! Problem files and their resolution into library inputs.

use crate::CliError;
use serde::{Deserialize, Serialize};
use stargraph::herglotz::{EpsSchedule, HerglotzRep};
use stargraph::measure::ScalarMeasure;
use stargraph::pasting::{Interface, PastedSystem, SystemDescription, WeylEntry};
use stargraph::schrodinger::{edge_to_herglotz, Edge};
use stargraph::spectra::build_example_k74;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Eigs,
    Weyl,
    Classify,
    Verify,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    K74,
    Equilateral3,
    Kac2,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsOverrides {
    pub eps0: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemDescription>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<Example>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<EpsOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
    }

    pub fn example(example: Example) -> Self {
        Self { example: Some(example), ..Self::default() }
    }
}

/// Command-line overrides; `None` keeps the value from the problem file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub window: Option<(f64, f64)>,
    pub eps0: Option<f64>,
    pub eps_steps: Option<usize>,
    pub grid: Option<usize>,
    pub exact: bool,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
}

/// Everything a task needs, validated.
pub(crate) struct Resolved {
    pub system: Option<PastedSystem>,
    /// Raw edges of a standard-interface system.
    pub edges: Vec<WeylEntry>,
    pub standard: bool,
    /// Spectral measures behind the entries, when known exactly.
    pub measures: Option<Vec<ScalarMeasure>>,
    pub window: (f64, f64),
    pub schedule: Option<EpsSchedule>,
    /// Height of the sampling line `x + iε` for tables.
    pub plot_eps: f64,
    pub grid: Option<usize>,
    pub seed: u64,
}

fn example_problem(example: Example) -> Result<(SystemDescription, Option<Vec<ScalarMeasure>>, (f64, f64)), CliError> {
    Ok(match example {
        Example::K74 => {
            let window = (0.0, 9.0);
            let ms = build_example_k74(window, 4).map_err(|e| CliError::Schema(e.to_string()))?;
            let edges = ms.iter().cloned().map(WeylEntry::from).collect();
            (SystemDescription { edges, interface: Interface::Standard }, Some(ms.to_vec()), window)
        }
        Example::Equilateral3 => {
            let edge = Edge::free(PI, 0.0).map_err(|e| CliError::Schema(e.to_string()))?;
            let edges = vec![WeylEntry::from(edge); 3];
            (SystemDescription { edges, interface: Interface::Standard }, None, (0.1, 10.0))
        }
        Example::Kac2 => {
            let ms = vec![
                ScalarMeasure::new(vec![(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)], vec![]),
                ScalarMeasure::new(vec![(-1.0, 1.0), (0.0, 1.0), (2.0, 2.0)], vec![]),
            ]
            .into_iter()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Schema(e.to_string()))?;
            let edges = ms.iter().cloned().map(WeylEntry::from).collect();
            (SystemDescription { edges, interface: Interface::Standard }, Some(ms), (-2.0, 3.0))
        }
    })
}

fn measure_of(entry: &WeylEntry, window: (f64, f64)) -> Option<ScalarMeasure> {
    match entry {
        WeylEntry::Rep(r) => Some(r.omega().clone()),
        WeylEntry::Edge(e) if e.alpha() == 0.0 && e.edge().is_finite() => {
            edge_to_herglotz(e.edge(), window).ok().map(|h: HerglotzRep| h.omega().clone())
        }
        _ => None,
    }
}

pub(crate) fn resolve(problem: &ProblemFile, opts: &RunOptions, needs_system: bool) -> Result<Resolved, CliError> {
    let (desc, known_measures, default_window) = match (&problem.system, problem.example) {
        (Some(_), Some(_)) => return Err(CliError::Schema("give either a system or an example, not both".into())),
        (Some(d), None) => (Some(d.clone()), None, None),
        (None, Some(ex)) => {
            let (d, ms, w) = example_problem(ex)?;
            (Some(d), ms, Some(w))
        }
        (None, None) if needs_system => return Err(CliError::Schema("problem has no system or example".into())),
        (None, None) => (None, None, None),
    };
    let window = opts.window.or(problem.window).or(default_window);
    let window = match window {
        Some(w) => w,
        None if needs_system => return Err(CliError::Schema("a window is required".into())),
        None => (0.0, 1.0),
    };
    if !(window.0.is_finite() && window.1.is_finite() && window.0 <= window.1) {
        return Err(CliError::Schema(format!("window ({}, {}) must be bounded and ordered", window.0, window.1)));
    }
    let eps0 = opts.eps0.or(problem.eps.as_ref().and_then(|e| e.eps0));
    let steps = opts.eps_steps.or(problem.eps.as_ref().and_then(|e| e.steps));
    if let Some(e) = eps0 {
        if !(e > 0.0 && e.is_finite()) {
            return Err(CliError::Schema(format!("eps0 must be positive, got {e}")));
        }
    }
    if steps.is_some_and(|s| s < 2) {
        return Err(CliError::Schema("eps-steps must be at least 2".into()));
    }
    let grid = opts.grid.or(problem.grid);
    let seed = opts.seed.or(problem.seed).unwrap_or(0);

    let (system, edges, standard) = match &desc {
        Some(d) => {
            if d.edges.len() < 2 {
                return Err(CliError::Schema(format!("a star needs n ≥ 2 edges, got {}", d.edges.len())));
            }
            let sys = d.to_system().map_err(|e| CliError::Schema(e.to_string()))?;
            (Some(sys), d.edges.clone(), d.interface == Interface::Standard)
        }
        None => (None, Vec::new(), true),
    };
    if opts.exact {
        if let Some(sys) = &system {
            if sys.entries().iter().any(|e| !matches!(e, WeylEntry::Rep(_))) {
                return Err(CliError::Schema("--exact needs every edge given by an exact representation".into()));
            }
        }
    }
    let base = match &system {
        Some(s) if !opts.exact && s.has_numeric_entries() => EpsSchedule::coarse(),
        _ => EpsSchedule::default(),
    };
    let schedule = (eps0.is_some() || steps.is_some()).then(|| {
        let mut s = base;
        if let Some(e) = eps0 {
            s = s.with_eps0(e);
        }
        if let Some(k) = steps {
            s = s.with_steps(k);
            s.tail = s.tail.min(k);
        }
        s
    });
    let measures = match (known_measures, &system) {
        (Some(ms), _) if standard => Some(ms),
        (_, Some(sys)) => sys.entries().iter().map(|e| measure_of(e, window)).collect(),
        _ => None,
    };
    Ok(Resolved { system, edges, standard, measures, window, schedule, plot_eps: eps0.unwrap_or(1e-2), grid, seed })
}

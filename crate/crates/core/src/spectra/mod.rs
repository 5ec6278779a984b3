//! Spectral reports for star-graph pastings: eigenvalues with multiplicities,
//! classification of the spectrum into its absolutely continuous part, the
//! singular part inherited from the edges and new singular spectrum, plus an
//! independent finite-difference oracle and theorem checks.

mod checks;
mod example;
mod fd;

pub use checks::{aronszajn_donoghue_check, verify_kac, KacReport};
pub use example::{build_example_k74, equilateral_star};
pub use fd::{fd_lowest, fd_oracle, FdCluster, FdSpectrum};

use crate::herglotz::{atom_weight_eps, root_in_gap, EndValue, EpsSchedule, FnHerglotz, HerglotzError, HerglotzRep};
use crate::measure::{overlap_count, MeasureError, ScalarMeasure};
use crate::pasting::{default_schedule, omega_at, trace_weyl, PastedSystem, PastingError, WeylEntry};
use crate::schrodinger::SchrodingerError;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("window ({0}, {1}) must be finite and ordered")]
    BadWindow(f64, f64),
    #[error("verification needs {expected} edges, got {got}")]
    EdgeCount { expected: usize, got: usize },
    #[error("angles must differ modulo π, got {0} and {1}")]
    EqualAngles(f64, f64),
    #[error("operation needs a purely atomic representation")]
    NotAtomic,
    #[error("finite-difference oracle needs finite edges and a grid of at least 100 points, {0}")]
    Oracle(String),
    #[error("{0} measures for a system with {1} edges")]
    MeasureCount(usize, usize),
    #[error(transparent)]
    Pasting(#[from] PastingError),
    #[error(transparent)]
    Herglotz(#[from] HerglotzError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Schrodinger(#[from] SchrodingerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// At least two edges have an eigenvalue at `x`.
    #[serde(rename = "overlap")]
    Overlap,
    /// `m = Σ m_l` vanishes at `x` while every `m_l` is finite.
    #[serde(rename = "kirchhoff-zero")]
    KirchhoffZero,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Overlap => "overlap",
            Provenance::KirchhoffZero => "kirchhoff-zero",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub x: f64,
    pub multiplicity: usize,
    pub provenance: Provenance,
    /// `lim ε Im tr M(x + iε)/(1 + x²)`.
    pub trace_weight: f64,
    /// Both independent checks agree: positive trace weight and
    /// `multiplicity_at` equal to the predicted count.
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Unresolved {
    pub x: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointSpectrum {
    pub eigenvalues: Vec<Eigenvalue>,
    pub unresolved: Vec<Unresolved>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcRegion {
    pub lo: f64,
    pub hi: f64,
    /// Number of edges with positive density on the region.
    pub r: usize,
    /// `N_A` at a probe point of the region, where it could be sampled.
    pub multiplicity: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularItem {
    pub x: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub window: (f64, f64),
    pub eigenvalues: Vec<Eigenvalue>,
    pub ac_regions: Vec<AcRegion>,
    /// Atoms shared by `r ≥ 2` measures, with `N_A = r − 1`.
    pub sac_items: Vec<SingularItem>,
    /// Atoms carried by exactly one measure; absent from the spectrum.
    pub vanished: Vec<f64>,
    /// Spectrum off the supports: zeros of `Σ m_l`, each simple.
    pub ss_items: Vec<SingularItem>,
    pub unresolved: Vec<Unresolved>,
}

pub(crate) fn check_window(window: (f64, f64)) -> Result<(), SpectraError> {
    let (lo, hi) = window;
    if lo.is_finite() && hi.is_finite() && lo <= hi {
        Ok(())
    } else {
        Err(SpectraError::BadWindow(lo, hi))
    }
}

/// Poles of the entries in `window`, clustered: `(x, edges with a pole there)`.
fn pole_clusters(sys: &PastedSystem, window: (f64, f64)) -> Result<Vec<(f64, Vec<usize>)>, SpectraError> {
    let mut all: Vec<(f64, usize, bool)> = Vec::new();
    for (l, e) in sys.entries().iter().enumerate() {
        let exact = matches!(e, WeylEntry::Rep(_));
        for p in e.poles(window)? {
            all.push((p, l, exact));
        }
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, Vec<usize>, bool)> = Vec::new();
    for (p, l, exact) in all {
        match out.last_mut() {
            Some((x, ls, ex)) if (p - *x).abs() <= crate::pasting::pole_tol(*x) && !ls.contains(&l) => {
                ls.push(l);
                if exact && !*ex {
                    *x = p;
                    *ex = true;
                }
            }
            Some((x, _, _)) if p == *x => {}
            _ => out.push((p, vec![l], exact)),
        }
    }
    Ok(out.into_iter().map(|(x, ls, _)| (x, ls)).collect())
}

/// Trace weight; `0` when the limit does not exist.
fn trace_weight(sys: &PastedSystem, x: f64, sched: &EpsSchedule) -> f64 {
    let f = FnHerglotz(|z: Complex64| trace_weyl(sys, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)));
    match atom_weight_eps(&f, x, sched) {
        Ok(lim) => lim.value.finite().map(|v| v.re).filter(|v| v.is_finite()).unwrap_or(0.0),
        Err(_) => 0.0,
    }
}

fn confirm(
    sys: &PastedSystem,
    x: f64,
    multiplicity: usize,
    provenance: Provenance,
    sched: &EpsSchedule,
    unresolved: &mut Vec<Unresolved>,
) -> Result<Eigenvalue, SpectraError> {
    let weight = trace_weight(sys, x, sched);
    let n = omega_at(sys, x, Some(sched))?.rank();
    let confirmed = weight > 0.0 && n == multiplicity;
    if !confirmed {
        unresolved.push(Unresolved {
            x,
            reason: format!("predicted N = {multiplicity}, multiplicity_at = {n}, trace weight = {weight:e}"),
        });
    }
    Ok(Eigenvalue { x, multiplicity, provenance, trace_weight: weight, confirmed })
}

/// Eigenvalues of the pasting in `window`: shared eigenvalues of at least two
/// edges (multiplicity `count − 1`) and zeros of `m = Σ m_l` on gaps where
/// every `m_l` is finite (simple).
pub fn find_point_spectrum(sys: &PastedSystem, window: (f64, f64)) -> Result<PointSpectrum, SpectraError> {
    find_point_spectrum_with(sys, window, None)
}

/// [`find_point_spectrum`] with an explicit ε schedule for the cross-checks.
pub fn find_point_spectrum_with(
    sys: &PastedSystem,
    window: (f64, f64),
    sched: Option<&EpsSchedule>,
) -> Result<PointSpectrum, SpectraError> {
    check_window(window)?;
    let default = default_schedule(sys);
    let sched = sched.unwrap_or(&default);
    let (wl, wr) = window;
    let clusters = pole_clusters(sys, window)?;
    let mut out = PointSpectrum::default();
    let mut candidates: Vec<(f64, usize, Provenance)> = clusters
        .iter()
        .filter(|(_, ls)| ls.len() >= 2)
        .map(|(x, ls)| (*x, ls.len() - 1, Provenance::Overlap))
        .collect();

    // Barriers: poles and edges of absolutely continuous support.
    #[derive(Clone, Copy, PartialEq)]
    enum Kind {
        Pole,
        AcEdge,
        Window,
    }
    let mut barriers: Vec<(f64, Kind)> = vec![(wl, Kind::Window), (wr, Kind::Window)];
    barriers.extend(clusters.iter().map(|(x, _)| (*x, Kind::Pole)));
    for e in sys.entries() {
        for (a, b) in e.ac_support() {
            for c in [a, b] {
                if c.is_finite() && wl < c && c < wr {
                    barriers.push((c, Kind::AcEdge));
                }
            }
        }
    }
    barriers.sort_by(|a, b| a.0.total_cmp(&b.0));
    barriers.dedup_by(|b, a| {
        if a.0 == b.0 {
            if b.1 == Kind::Pole {
                a.1 = Kind::Pole;
            }
            true
        } else {
            false
        }
    });

    let in_ac = |x: f64| sys.entries().iter().any(|e| e.in_ac_support(x));
    let sum = |x: f64| sys.sum_real(x).ok().flatten().unwrap_or(f64::NAN);
    let end_value = |x: f64, kind: Kind, left: bool, other: f64| -> EndValue {
        match kind {
            Kind::Pole => {
                if left {
                    EndValue::MinusInf
                } else {
                    EndValue::PlusInf
                }
            }
            _ => {
                let v = sum(x);
                if v.is_finite() {
                    return EndValue::Value(v);
                }
                let step = (1e-12 * (1.0 + x.abs())).min(0.25 * (other - x).abs());
                let v = sum(if left { x + step } else { x - step });
                if v.is_finite() {
                    EndValue::Value(v)
                } else if left {
                    EndValue::MinusInf
                } else {
                    EndValue::PlusInf
                }
            }
        }
    };
    for w in barriers.windows(2) {
        let ((a, ka), (b, kb)) = (w[0], w[1]);
        if !(a < b) || in_ac(0.5 * (a + b)) {
            continue;
        }
        let lv = end_value(a, ka, true, b);
        let rv = end_value(b, kb, false, a);
        if let Some(root) = root_in_gap(&sum, a, b, lv, rv) {
            if (root == a && ka == Kind::Pole) || (root == b && kb == Kind::Pole) {
                continue;
            }
            let derivs_ok = sys
                .entries()
                .iter()
                .map(|e| e.derivative_real(root))
                .all(|d| matches!(d, Ok(Some(v)) if v.is_finite() && v >= 0.0));
            if derivs_ok {
                candidates.push((root, 1, Provenance::KirchhoffZero));
            } else {
                out.unresolved.push(Unresolved { x: root, reason: "derivative of an edge is not finite".into() });
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    candidates.dedup_by(|b, a| a.0 == b.0);
    for (x, n, p) in candidates {
        let ev = confirm(sys, x, n, p, sched, &mut out.unresolved)?;
        out.eigenvalues.push(ev);
    }
    Ok(out)
}

/// First-order part of each measure, used for density overlap counts.
fn densities_only(m: &ScalarMeasure) -> ScalarMeasure {
    ScalarMeasure::from_parts(vec![], m.pieces().to_vec()).expect("pieces of a valid measure")
}

/// Classification of the spectrum of the pasting of the edges with spectral
/// measures `measures` (Weyl functions `sys`) inside `window`.
pub fn classify_spectrum(measures: &[ScalarMeasure], sys: &PastedSystem, window: (f64, f64)) -> Result<SpectralReport, SpectraError> {
    classify_spectrum_with(measures, sys, window, None)
}

/// [`classify_spectrum`] with an explicit ε schedule for sampled quantities.
pub fn classify_spectrum_with(
    measures: &[ScalarMeasure],
    sys: &PastedSystem,
    window: (f64, f64),
    sched: Option<&EpsSchedule>,
) -> Result<SpectralReport, SpectraError> {
    check_window(window)?;
    if measures.len() != sys.n() {
        return Err(SpectraError::MeasureCount(measures.len(), sys.n()));
    }
    let (wl, wr) = window;
    let point = find_point_spectrum_with(sys, window, sched)?;
    let mut unresolved = point.unresolved.clone();

    let dens: Vec<ScalarMeasure> = measures.iter().map(densities_only).collect();
    let mut cuts = vec![wl, wr];
    for m in &dens {
        for (a, b) in m.density_support() {
            cuts.extend([a, b].into_iter().filter(|&c| wl < c && c < wr));
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut ac_regions: Vec<AcRegion> = Vec::new();
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let r = match overlap_count(&dens, mid) {
            Ok(r) => r,
            Err(MeasureError::NotInSupport(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        match ac_regions.last_mut() {
            Some(last) if last.hi == w[0] && last.r == r => last.hi = w[1],
            _ => ac_regions.push(AcRegion { lo: w[0], hi: w[1], r, multiplicity: None }),
        }
    }
    let atom_positions: Vec<f64> = {
        let mut v: Vec<f64> = measures.iter().flat_map(|m| m.atoms().iter().map(|a| a.position)).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    for region in &mut ac_regions {
        let probe = probe_point(region.lo, region.hi, &atom_positions);
        let n = omega_at(sys, probe, sched)?.rank();
        region.multiplicity = Some(n);
        if n != region.r {
            unresolved.push(Unresolved { x: probe, reason: format!("ac region r = {} but N_A = {n}", region.r) });
        }
    }

    let mut sac_items = Vec::new();
    let mut vanished = Vec::new();
    for &x in atom_positions.iter().filter(|&&x| wl <= x && x <= wr) {
        let r = measures.iter().filter(|m| m.atom_mass_at(x).is_some()).count();
        if r >= 2 {
            sac_items.push(SingularItem { x, multiplicity: r - 1 });
        } else {
            vanished.push(x);
        }
    }
    let ss_items = point
        .eigenvalues
        .iter()
        .filter(|e| e.provenance == Provenance::KirchhoffZero)
        .map(|e| SingularItem { x: e.x, multiplicity: 1 })
        .collect();
    Ok(SpectralReport {
        window,
        eigenvalues: point.eigenvalues,
        ac_regions,
        sac_items,
        vanished,
        ss_items,
        unresolved,
    })
}

/// A point of `(lo, hi)` well separated from the atoms.
fn probe_point(lo: f64, hi: f64, atoms: &[f64]) -> f64 {
    let mut best = (f64::NEG_INFINITY, 0.5 * (lo + hi));
    for k in 1..64 {
        let x = lo + (hi - lo) * (k as f64 * 0.618_033_988_749_895).fract();
        let d = atoms.iter().map(|a| (a - x).abs()).fold(f64::INFINITY, f64::min);
        let d = d.min(x - lo).min(hi - x);
        if d > best.0 {
            best = (d, x);
        }
    }
    best.1
}

/// System of the exact Weyl functions of `measures`.
pub fn system_from_measures(measures: &[ScalarMeasure]) -> Result<PastedSystem, SpectraError> {
    Ok(PastedSystem::from_reps(measures.iter().cloned().map(HerglotzRep::from_measure).collect())?)
}

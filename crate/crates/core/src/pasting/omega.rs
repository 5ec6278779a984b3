//! Pointwise samples of `ω = dΩ/dρ` and the multiplicity `N_A(x) = rank ω(x)`.

use super::rank::exact_rank;
use super::{matrix_weyl, PastedSystem, PastingError};
use crate::herglotz::{extrapolate_to_zero, EpsSchedule};
use crate::measure::poly::rational;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaMethod {
    /// Point mass shared by at least two edges, from the residue matrix.
    ResiduePath,
    /// Point mass at a zero of `m = Σ m_l` with all `m_l` finite.
    KirchhoffZero,
    /// Entrywise extrapolation of `Im M / Im tr M` along `x + iε`.
    EpsLimit,
    /// `x` carries no spectral mass; `ω` is undefined there.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    /// Smallest eigenvalue of the symmetrised sample before clipping.
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    /// True when slightly negative eigenvalues were set to zero.
    pub clipped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OmegaMatrix {
    entries: DMatrix<C>,
    pub method: OmegaMethod,
    pub psd: PsdReport,
    pub converged: bool,
    /// `Im tr M(x + iε)` decays with ε: `x` is outside the spectrum.
    pub trace_vanishing: bool,
    /// Rank from exact rational data when the method provides it.
    pub exact_rank: Option<usize>,
    pub achieved_tol: f64,
}

impl OmegaMatrix {
    pub(crate) fn exact(entries: DMatrix<C>, method: OmegaMethod) -> Self {
        let psd = psd_report(&entries);
        Self { entries, method, psd, converged: true, trace_vanishing: false, exact_rank: None, achieved_tol: 0.0 }
    }

    fn vanishing(n: usize) -> Self {
        Self {
            entries: DMatrix::zeros(n, n),
            method: OmegaMethod::None,
            psd: PsdReport { min_eigenvalue: 0.0, tolerance: 0.0, clipped: false },
            converged: true,
            trace_vanishing: true,
            exact_rank: Some(0),
            achieved_tol: 0.0,
        }
    }

    pub fn entries(&self) -> &DMatrix<C> {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// Singular values below `n · σ_max · 1e−8` count as zero.
    pub fn numerical_rank(&self) -> usize {
        let sv = self.entries.clone().singular_values();
        let smax = sv.iter().fold(0.0f64, |m, &s| m.max(s));
        if smax == 0.0 {
            return 0;
        }
        let thr = self.n() as f64 * smax * 1e-8;
        sv.iter().filter(|&&s| s > thr).count()
    }

    /// Exact rank where available, numerical rank otherwise.
    pub fn rank(&self) -> usize {
        self.exact_rank.unwrap_or_else(|| self.numerical_rank())
    }
}

fn psd_report(a: &DMatrix<C>) -> PsdReport {
    let eig = SymmetricEigen::new(a.clone());
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    PsdReport { min_eigenvalue: min, tolerance: 1e-8 * a.nrows() as f64 * scale, clipped: false }
}

/// Hermitian part with eigenvalues below zero (within tolerance) clipped.
fn psd_project(a: DMatrix<C>) -> (DMatrix<C>, PsdReport) {
    let n = a.nrows();
    let h = (&a + a.adjoint()) * C::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h.clone());
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let tolerance = 1e-8 * n as f64 * scale.max(1e-300);
    if min >= 0.0 {
        return (h, PsdReport { min_eigenvalue: min, tolerance, clipped: false });
    }
    let clipped = eig.eigenvalues.map(|v| C::new(v.max(0.0), 0.0));
    let q = &eig.eigenvectors;
    let out = q * DMatrix::from_diagonal(&clipped) * q.adjoint();
    (out, PsdReport { min_eigenvalue: min, tolerance, clipped: true })
}

/// Edges with a pole at `x`: `(index, pole, residue)`.
pub fn pole_set(sys: &PastedSystem, x: f64) -> Result<Vec<(usize, f64, f64)>, PastingError> {
    let mut out = Vec::new();
    for (l, e) in sys.entries().iter().enumerate() {
        if let Some(p) = e.pole_at(x)? {
            let r = e.residue_at(p)?;
            if r > 0.0 {
                out.push((l, p, r));
            }
        }
    }
    Ok(out)
}

/// Residue matrix of `M` at a pole shared by the edges in `poles`.
fn residue_matrix(n: usize, poles: &[(usize, f64, f64)]) -> Vec<Vec<BigRational>> {
    let mut r = vec![BigRational::zero(); n];
    for &(l, _, res) in poles {
        r[l] = rational(res);
    }
    let total: BigRational = r.iter().sum();
    let mut out = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            out[i][j] = if i == j { &r[i] * (&total - &r[i]) / &total } else { -(&r[i] * &r[j]) / &total };
        }
    }
    out
}

fn kirchhoff_zero(sys: &PastedSystem, x: f64) -> Result<Option<Vec<f64>>, PastingError> {
    let mut vals = Vec::with_capacity(sys.n());
    for e in sys.entries() {
        match e.eval_real(x)? {
            Some(v) => vals.push(v),
            None => return Ok(None),
        }
    }
    let sum: f64 = vals.iter().sum();
    let scale: f64 = vals.iter().map(|v| v.abs()).sum::<f64>() + 1.0;
    Ok((sum.abs() <= 1e-9 * scale).then_some(vals))
}

/// Default schedule: the short one when any entry is integrated numerically.
pub fn default_schedule(sys: &PastedSystem) -> EpsSchedule {
    if sys.has_numeric_entries() {
        EpsSchedule::coarse()
    } else {
        EpsSchedule::default()
    }
}

/// `ω(x)`. Shared poles and Kirchhoff zeros are handled exactly; points in
/// the support of an absolutely continuous part use the ε-limit of
/// `Im M / Im tr M`.
pub fn omega_at(sys: &PastedSystem, x: f64, sched: Option<&EpsSchedule>) -> Result<OmegaMatrix, PastingError> {
    let n = sys.n();
    let poles = pole_set(sys, x)?;
    if poles.len() >= 2 {
        let rq = residue_matrix(n, &poles);
        let trace: BigRational = (0..n).map(|i| rq[i][i].clone()).sum();
        let entries = DMatrix::from_fn(n, n, |i, j| C::new(crate::measure::poly::to_f64(&(&rq[i][j] / &trace)), 0.0));
        let mut om = OmegaMatrix::exact(entries, OmegaMethod::ResiduePath);
        om.exact_rank = Some(exact_rank(rq));
        return Ok(om);
    }
    let ac = sys.entries().iter().any(|e| e.in_ac_support(x));
    if !ac {
        if poles.is_empty() {
            if let Some(vals) = kirchhoff_zero(sys, x)? {
                return Ok(super::rank::rank_one_limit_matrix(&vals[..n - 1]));
            }
        }
        return Ok(OmegaMatrix::vanishing(n));
    }
    let default = default_schedule(sys);
    omega_eps(sys, x, sched.unwrap_or(&default))
}

/// Numerical `ω(x)` from the ε-limit alone.
pub fn omega_eps(sys: &PastedSystem, x: f64, sched: &EpsSchedule) -> Result<OmegaMatrix, PastingError> {
    let n = sys.n();
    let mut samples: Vec<DMatrix<C>> = Vec::with_capacity(sched.steps);
    let mut traces: Vec<f64> = Vec::with_capacity(sched.steps);
    for eps in sched.eps() {
        let m = matrix_weyl(sys, C::new(x, eps))?;
        let im = (&m - m.adjoint()) * C::new(0.0, -0.5);
        let t: f64 = (0..n).map(|i| im[(i, i)].re).sum();
        traces.push(t);
        samples.push(if t > 0.0 { im / C::new(t, 0.0) } else { DMatrix::zeros(n, n) });
    }
    let k = traces.len();
    let vanishing = k >= 4 && (k - 3..k).all(|i| traces[i] < 0.75 * traces[i - 1]) || traces[k - 1] <= 0.0;
    if vanishing {
        return Ok(OmegaMatrix::vanishing(n));
    }
    let mut entries = DMatrix::zeros(n, n);
    let mut converged = true;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut idx = 0;
            let lim = extrapolate_to_zero(sched, |_| {
                let v = samples[idx][(i, j)];
                idx += 1;
                Ok(v)
            })?;
            converged &= lim.converged;
            worst = worst.max(lim.achieved_tol);
            entries[(i, j)] = lim.value.finite().unwrap_or(C::new(f64::NAN, 0.0));
        }
    }
    let (entries, psd) = psd_project(entries);
    Ok(OmegaMatrix {
        entries,
        method: OmegaMethod::EpsLimit,
        psd,
        converged,
        trace_vanishing: false,
        exact_rank: None,
        achieved_tol: worst,
    })
}

/// `N_A(x)`: `#{poles at x} − 1` for shared poles, `1` at Kirchhoff zeros,
/// the numerical rank of `ω(x)` inside absolutely continuous spectrum, and
/// `0` elsewhere.
pub fn multiplicity_at(sys: &PastedSystem, x: f64) -> Result<usize, PastingError> {
    Ok(omega_at(sys, x, None)?.rank())
}

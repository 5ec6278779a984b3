//! Boundary values `lim_{ε↓0} f(x + iε)` by sampling on a geometric ε
//! schedule and extrapolating the samples polynomially to ε = 0.

use super::{Herglotz, HerglotzError, HerglotzRep};
use crate::measure::poly::to_f64;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `ε_k = eps0 · 2^{−k}` for `k < steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsSchedule {
    pub eps0: f64,
    pub steps: usize,
    /// Number of consecutive samples fed to one extrapolation.
    pub tail: usize,
    /// Sample magnitude beyond which the limit is declared infinite.
    pub divergence: f64,
    /// Relative error estimate below which the limit counts as converged.
    pub tol: f64,
}

impl Default for EpsSchedule {
    fn default() -> Self {
        Self { eps0: 0.1, steps: 40, tail: 8, divergence: 1e12, tol: 1e-8 }
    }
}

impl EpsSchedule {
    /// Short schedule for functions whose evaluation carries integration
    /// noise that grows like `1/ε`.
    pub fn coarse() -> Self {
        Self { eps0: 0.05, steps: 12, tail: 6, divergence: 1e12, tol: 1e-6 }
    }

    pub fn with_eps0(self, eps0: f64) -> Self {
        Self { eps0, ..self }
    }

    pub fn with_steps(self, steps: usize) -> Self {
        Self { steps, ..self }
    }

    pub fn eps(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(move |k| self.eps0 * 0.5f64.powi(k as i32))
    }

    pub fn smallest(&self) -> f64 {
        self.eps0 * 0.5f64.powi(self.steps.saturating_sub(1) as i32)
    }

    fn validate(&self) -> Result<(), HerglotzError> {
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) || self.steps < 2 || self.tail < 2 {
            return Err(HerglotzError::NonFinite(self.eps0));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LimitValue {
    Finite(Complex64),
    Infinite,
}

impl LimitValue {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            LimitValue::Finite(v) => Some(*v),
            LimitValue::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, LimitValue::Infinite)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLimit {
    pub value: LimitValue,
    /// Samples actually taken, ε strictly decreasing.
    pub eps_trace: Vec<(f64, Complex64)>,
    pub converged: bool,
    /// Estimated absolute error of the extrapolated value.
    pub achieved_tol: f64,
}

impl BoundaryLimit {
    /// Real part of a finite limit.
    pub fn real(&self) -> Option<f64> {
        self.value.finite().map(|v| v.re)
    }
}

/// Sample `f(ε)` along the schedule and extrapolate.
pub fn extrapolate_to_zero(
    sched: &EpsSchedule,
    mut f: impl FnMut(f64) -> Result<Complex64, HerglotzError>,
) -> Result<BoundaryLimit, HerglotzError> {
    sched.validate()?;
    let mut trace: Vec<(f64, Complex64)> = Vec::with_capacity(sched.steps);
    for eps in sched.eps() {
        let v = f(eps)?;
        let blown = !(v.re.is_finite() && v.im.is_finite()) || v.norm() > sched.divergence;
        trace.push((eps, v));
        if blown {
            return Ok(BoundaryLimit { value: LimitValue::Infinite, eps_trace: trace, converged: true, achieved_tol: 0.0 });
        }
    }

    let tail = sched.tail.min(trace.len());
    let mut best: Option<(Complex64, f64)> = None;
    for start in 0..=trace.len() - tail {
        let (v, err) = neville_at_zero(&trace[start..start + tail]);
        // Later windows sit at smaller ε; keep them on ties.
        if best.is_none_or(|(_, e)| err <= e) {
            best = Some((v, err));
        }
    }
    let (value, err) = best.expect("at least one window");
    let scale = 1.0 + value.norm();
    let converged = err <= sched.tol * scale;

    if !converged && growing(&trace[trace.len() - tail..]) {
        return Ok(BoundaryLimit { value: LimitValue::Infinite, eps_trace: trace, converged: true, achieved_tol: 0.0 });
    }
    Ok(BoundaryLimit { value: LimitValue::Finite(value), eps_trace: trace, converged, achieved_tol: err })
}

/// Consistent growth like `ε^{−p}`, `p > 1/2`.
fn growing(samples: &[(f64, Complex64)]) -> bool {
    samples.windows(2).all(|w| w[1].1.norm() >= 1.5 * w[0].1.norm()) && samples.last().is_some_and(|s| s.1.norm() > 1.0)
}

/// Value at 0 of the interpolating polynomial through the points and an error
/// estimate from the two interpolants of one degree less.
fn neville_at_zero(pts: &[(f64, Complex64)]) -> (Complex64, f64) {
    let n = pts.len();
    let mut t: Vec<Complex64> = pts.iter().map(|p| p.1).collect();
    let mut prev_row: Vec<Complex64> = t.clone();
    for level in 1..n {
        prev_row.clone_from(&t);
        for i in 0..n - level {
            let (xi, xj) = (pts[i].0, pts[i + level].0);
            t[i] = (xi * t[i + 1] - xj * t[i]) / (xi - xj);
        }
    }
    let value = t[0];
    if n < 2 {
        return (value, f64::INFINITY);
    }
    let err = (value - prev_row[0]).norm().max((value - prev_row[1]).norm());
    (value, err)
}

fn at(x: f64, eps: f64) -> Complex64 {
    Complex64::new(x, eps)
}

/// `lim_{ε↓0} h(x + iε)`.
pub fn boundary_limit<H: Herglotz + ?Sized>(h: &H, x: f64, sched: &EpsSchedule) -> Result<BoundaryLimit, HerglotzError> {
    extrapolate_to_zero(sched, |eps| h.eval(at(x, eps)))
}

/// `lim_{ε↓0} Im h(x + iε)`; equals `π(1 + x²)` times the density of `Ω` at
/// Lebesgue points and diverges at atoms.
pub fn boundary_imag_limit<H: Herglotz + ?Sized>(h: &H, x: f64, sched: &EpsSchedule) -> Result<BoundaryLimit, HerglotzError> {
    extrapolate_to_zero(sched, |eps| Ok(Complex64::new(h.eval(at(x, eps))?.im, 0.0)))
}

/// `Ω({x0})` read off the representation.
pub fn atom_weight(h: &HerglotzRep, x0: f64) -> f64 {
    h.omega().atom_mass_at(x0).map(to_f64).unwrap_or(0.0)
}

/// `lim_{ε↓0} ε · Im h(x0 + iε) / (1 + x0²)` for any Herglotz function.
pub fn atom_weight_eps<H: Herglotz + ?Sized>(h: &H, x0: f64, sched: &EpsSchedule) -> Result<BoundaryLimit, HerglotzError> {
    let norm = 1.0 + x0 * x0;
    extrapolate_to_zero(sched, |eps| Ok(Complex64::new(eps * h.eval(at(x0, eps))?.im / norm, 0.0)))
}

/// `lim_{ε↓0} Im h1(x + iε) / Im h2(x + iε)`.
pub fn ratio_limit<H1: Herglotz + ?Sized, H2: Herglotz + ?Sized>(
    h1: &H1,
    h2: &H2,
    x: f64,
    sched: &EpsSchedule,
) -> Result<BoundaryLimit, HerglotzError> {
    extrapolate_to_zero(sched, |eps| {
        let z = at(x, eps);
        let den = h2.eval(z)?.im;
        if den == 0.0 {
            return Err(HerglotzError::VanishingReference(eps));
        }
        Ok(Complex64::new(h1.eval(z)?.im / den, 0.0))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::ScalarMeasure;
    use std::f64::consts::PI;

    fn rep(m: ScalarMeasure) -> HerglotzRep {
        HerglotzRep::from_measure(m)
    }

    #[test]
    fn imag_limit_of_cauchy_density() {
        // Piecewise-linear interpolant of 1/(π(1+t²)) with a node at 0.
        let f = |t: f64| 1.0 / (PI * (1.0 + t * t));
        let pieces: Vec<(f64, f64, Vec<f64>)> = (-32..32)
            .map(|k| {
                let (lo, hi) = (k as f64 / 8.0, (k + 1) as f64 / 8.0);
                let slope = (f(hi) - f(lo)) / (hi - lo);
                (lo, hi, vec![f(lo) - slope * lo, slope])
            })
            .collect();
        let nu = ScalarMeasure::new(vec![], pieces.clone()).unwrap();
        let h = rep(nu);
        // Oracle: Poisson integral by quadrature at a moderate ε.
        let eps = 1e-2;
        let quad: f64 = pieces
            .iter()
            .map(|(lo, hi, c)| {
                let n = 400;
                let dt = (hi - lo) / n as f64;
                (0..n)
                    .map(|i| {
                        let t = lo + (i as f64 + 0.5) * dt;
                        (c[0] + c[1] * t) * eps * (1.0 + t * t) / (t * t + eps * eps) * dt
                    })
                    .sum::<f64>()
            })
            .sum();
        let closed = h.eval(Complex64::new(0.0, eps)).unwrap().im;
        assert!((closed - quad).abs() < 1e-4, "{closed} vs {quad}");
        let lim = boundary_imag_limit(&h, 0.0, &EpsSchedule::default()).unwrap();
        let v = lim.value.finite().unwrap().re;
        assert!((v - 1.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn imag_limit_examples() {
        let d0 = rep(ScalarMeasure::atom(0.0, 1.0).unwrap());
        assert!(boundary_imag_limit(&d0, 0.0, &EpsSchedule::default()).unwrap().value.is_infinite());

        let d1 = rep(ScalarMeasure::atom(1.0, 1.0).unwrap());
        let im = boundary_imag_limit(&d1, 0.0, &EpsSchedule::default()).unwrap();
        assert!(im.value.finite().unwrap().norm() < 1e-10);
        // (1 + t·0)/(t − 0) at t = 1.
        let full = boundary_limit(&d1, 0.0, &EpsSchedule::default()).unwrap();
        assert!((full.value.finite().unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn trace_is_strictly_decreasing() {
        let d1 = rep(ScalarMeasure::atom(1.0, 1.0).unwrap());
        let lim = boundary_limit(&d1, 0.3, &EpsSchedule::default()).unwrap();
        assert!(lim.eps_trace.windows(2).all(|w| w[1].0 < w[0].0));
    }

    #[test]
    fn atom_weight_examples() {
        let d0 = rep(ScalarMeasure::atom(0.0, 1.0).unwrap());
        assert_eq!(atom_weight(&d0, 0.0), 1.0);
        let d1 = rep(ScalarMeasure::atom(1.0, 2.0).unwrap());
        assert_eq!(atom_weight(&d1, 1.0), 2.0);
        assert_eq!(atom_weight(&d1, 0.0), 0.0);
        let eps = atom_weight_eps(&d1, 1.0, &EpsSchedule::default()).unwrap();
        assert!((eps.value.finite().unwrap().re - 2.0).abs() < 1e-9);
        let none = atom_weight_eps(&d1, 0.0, &EpsSchedule::default()).unwrap();
        assert!(none.value.finite().unwrap().norm() < 1e-12);
    }

    #[test]
    fn ratio_examples() {
        let s = EpsSchedule::default();
        let d0 = rep(ScalarMeasure::atom(0.0, 1.0).unwrap());
        let d0x2 = rep(ScalarMeasure::atom(0.0, 2.0).unwrap());
        let d1 = rep(ScalarMeasure::atom(1.0, 1.0).unwrap());
        let one = ratio_limit(&d1, &d1, 0.0, &s).unwrap().real().unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        assert!((ratio_limit(&d0x2, &d0, 0.0, &s).unwrap().real().unwrap() - 2.0).abs() < 1e-10);
        assert!(ratio_limit(&d1, &d0, 0.0, &s).unwrap().real().unwrap().abs() < 1e-10);
        let flat = HerglotzRep::constant(1.0).unwrap();
        assert!(matches!(ratio_limit(&d0, &flat, 0.0, &s), Err(HerglotzError::VanishingReference(_))));
    }
}

//! Recovery of the representing measure from boundary values of `Im h`.

use super::{Herglotz, HerglotzError, HerglotzRep};
use crate::measure::ScalarMeasure;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct StieltjesRecovery {
    /// Piecewise-constant density on the grid cells plus detected atoms.
    pub measure: ScalarMeasure,
    /// Detected atoms `(position, mass)`.
    pub atoms: Vec<(f64, f64)>,
    /// Set when detected atoms share a cell or sit in neighbouring cells, so
    /// the grid cannot separate them reliably.
    pub coarse_grid: bool,
}

/// Approximate `Ω` restricted to `window` from `h(x + iε)` on a grid of
/// `cells` equal cells.
pub fn stieltjes_invert(h: &HerglotzRep, window: (f64, f64), cells: usize, eps: f64) -> Result<StieltjesRecovery, HerglotzError> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite()) || !(eps > 0.0) {
        return Err(HerglotzError::NonFinite(if eps > 0.0 { lo } else { eps }));
    }
    if hi <= lo || cells == 0 {
        return Ok(StieltjesRecovery { measure: ScalarMeasure::zero(), atoms: Vec::new(), coarse_grid: false });
    }
    let dx = (hi - lo) / cells as f64;
    let mid = |k: usize| lo + (k as f64 + 0.5) * dx;

    // Atom candidates: local maxima of the Poisson smoothing at the cell scale.
    let probe = 0.25 * dx;
    let scan: Vec<f64> = (0..cells).map(|k| h.eval(Complex64::new(mid(k), probe)).map(|v| v.im)).collect::<Result<_, _>>()?;
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for k in 0..cells {
        let left = if k > 0 { scan[k - 1] } else { f64::NEG_INFINITY };
        let right = if k + 1 < cells { scan[k + 1] } else { f64::NEG_INFINITY };
        if scan[k] > left && scan[k] >= right {
            for start in [mid(k) - 0.5 * dx, mid(k), mid(k) + 0.5 * dx] {
                if let Some((x0, w)) = refine_atom(h, start, dx)? {
                    if (lo..=hi).contains(&x0) && !atoms.iter().any(|&(y, _)| (y - x0).abs() <= 1e-9 * (1.0 + x0.abs())) {
                        atoms.push((x0, w));
                    }
                }
            }
        }
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let cell_of = |x: f64| (((x - lo) / dx).floor() as i64).clamp(0, cells as i64 - 1);
    let mut coarse_grid = atoms.windows(2).any(|w| cell_of(w[1].0) - cell_of(w[0].0) <= 1);
    // A peak left over after removing the resolved atoms means unresolved
    // point masses inside one cell.
    let residual: Vec<f64> = (0..cells)
        .map(|k| {
            let x = mid(k);
            scan[k] - h.b() * probe
                - atoms.iter().map(|&(x0, w)| w * probe * (1.0 + x0 * x0) / ((x0 - x) * (x0 - x) + probe * probe)).sum::<f64>()
        })
        .collect();
    let peak = scan.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let around = |k: usize| {
        let l = residual[k.saturating_sub(2)];
        let r = residual[(k + 2).min(cells - 1)];
        l.max(r)
    };
    coarse_grid |= (0..cells).any(|k| residual[k] > 1e-8 * peak && residual[k] > 2.0 * around(k));

    let mut pieces = Vec::with_capacity(cells);
    for k in 0..cells {
        let x = mid(k);
        let z = Complex64::new(x, eps);
        let mut im = h.eval(z)?.im - h.b() * eps;
        for &(x0, w) in &atoms {
            im -= w * eps * (1.0 + x0 * x0) / ((x0 - x) * (x0 - x) + eps * eps);
        }
        let density = (im / (PI * (1.0 + x * x))).max(0.0);
        if density > 0.0 {
            pieces.push((lo + k as f64 * dx, lo + (k + 1) as f64 * dx, vec![density]));
        }
    }
    let measure = ScalarMeasure::new(atoms.clone(), pieces)?;
    Ok(StieltjesRecovery { measure, atoms, coarse_grid })
}

/// Newton-type localisation of a pole near `start`: close to an atom
/// `h(z) ≈ W/(x0 − z)` with `W = w(1 + x0²)`, so `1/h` is affine in `z`.
/// Returns `None` when the estimated mass does not stabilise as the probe
/// height shrinks, i.e. there is no atom.
fn refine_atom(h: &HerglotzRep, start: f64, dx: f64) -> Result<Option<(f64, f64)>, HerglotzError> {
    let floor = 1e-11 * (1.0 + start.abs());
    let mut deltas = vec![0.25 * dx];
    while deltas.last().is_some_and(|&d| d * 1e-2 >= floor) {
        deltas.push(deltas.last().unwrap() * 1e-2);
    }
    if deltas.len() < 2 {
        deltas.push(floor);
    }
    // One more step at the final height to settle the position.
    deltas.push(*deltas.last().unwrap());
    let mut x0 = start;
    for &delta in &deltas {
        let inv = 1.0 / h.eval(Complex64::new(x0, delta))?;
        if !(inv.im < 0.0) {
            return Ok(None);
        }
        let next = x0 - delta * inv.re / inv.im;
        if !next.is_finite() || (next - start).abs() > 2.0 * dx {
            return Ok(None);
        }
        x0 = next;
    }
    // Mass estimates at the settled position. A genuine atom gives nearly the
    // same mass at two heights; a smooth density gives a mass proportional to
    // the height. An atom sitting on a density picks up a term linear in the
    // height, removed by extrapolating to zero height.
    let d = *deltas.last().unwrap();
    let d_earlier = 100.0 * d;
    let mass = |delta: f64| -> Result<f64, HerglotzError> {
        let inv = 1.0 / h.eval(Complex64::new(x0, delta))?;
        Ok(-delta / inv.im / (1.0 + x0 * x0))
    };
    let (w, earlier) = (mass(d)?, mass(d_earlier)?);
    if !(w > 0.0 && (w - earlier).abs() <= 0.1 * w) {
        return Ok(None);
    }
    let w0 = w - (earlier - w) * d / (d_earlier - d);
    Ok(Some((x0, if w0 > 0.0 { w0 } else { w })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Interval, IntervalSet};

    #[test]
    fn uniform_density() {
        let h = HerglotzRep::from_measure(ScalarMeasure::density(0.0, 1.0, &[1.0]).unwrap());
        let r = stieltjes_invert(&h, (0.0, 1.0), 200, 1e-7).unwrap();
        assert!(r.atoms.is_empty());
        let total = r.measure.mass_f64(&IntervalSet::from(Interval::closed(0.0, 1.0)));
        assert!((total - 1.0).abs() < 1e-4, "{total}");
        let p = r.measure.pieces()[100].density.eval_f64(0.5);
        assert!((p - 1.0).abs() < 1e-6);
    }

    #[test]
    fn single_atom() {
        let h = HerglotzRep::from_measure(ScalarMeasure::atom(0.0, 1.0).unwrap());
        let r = stieltjes_invert(&h, (-1.0, 1.0), 64, 1e-6).unwrap();
        assert_eq!(r.atoms.len(), 1);
        assert!(r.atoms[0].0.abs() < 1e-12);
        assert!((r.atoms[0].1 - 1.0).abs() < 1e-12);
        assert!(!r.coarse_grid);
    }

    #[test]
    fn linear_term_only() {
        let h = HerglotzRep::new(0.0, 1.0, ScalarMeasure::zero()).unwrap();
        let r = stieltjes_invert(&h, (-3.0, 2.0), 50, 1e-6).unwrap();
        assert!(r.measure.is_zero());
    }

    #[test]
    fn atoms_on_a_density_and_close_pair_warning() {
        let nu = ScalarMeasure::new(vec![(0.3, 0.5), (0.8, 0.25)], vec![(0.0, 1.0, vec![2.0])]).unwrap();
        let h = HerglotzRep::from_measure(nu);
        let r = stieltjes_invert(&h, (0.0, 1.0), 100, 1e-7).unwrap();
        assert_eq!(r.atoms.len(), 2);
        assert!((r.atoms[0].1 - 0.5).abs() < 1e-9 && (r.atoms[1].1 - 0.25).abs() < 1e-9);
        let total = r.measure.mass_f64(&IntervalSet::from(Interval::closed(0.0, 1.0)));
        assert!((total - 2.75).abs() < 1e-4, "{total}");

        let pair = HerglotzRep::from_measure(ScalarMeasure::new(vec![(0.501, 1.0), (0.503, 1.0)], vec![]).unwrap());
        assert!(stieltjes_invert(&pair, (0.0, 1.0), 20, 1e-7).unwrap().coarse_grid);
    }
}

//! Ready-made systems.

use super::{check_window, SpectraError};
use crate::measure::poly::rational;
use crate::measure::{Atom, DensityPiece, Poly, ScalarMeasure};
use crate::pasting::{PastedSystem, WeylEntry};
use crate::schrodinger::Edge;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::f64::consts::PI;

/// `n` free edges of length `length` with outer angle `beta`.
pub fn equilateral_star(n: usize, length: f64, beta: f64) -> Result<PastedSystem, SpectraError> {
    let edge = Edge::free(length, beta)?;
    Ok(PastedSystem::new((0..n).map(|_| WeylEntry::from(edge.clone())).collect())?)
}

/// Two mutually singular atomic measures on `(0, 1)`: `grid` atoms each, at
/// `(k + 1/4)/grid` and `(k + 3/4)/grid`, every atom of mass `1/grid`.
fn unit_grids(grid: usize) -> [Vec<(f64, BigRational)>; 2] {
    let g = grid as f64;
    let w = BigRational::new(BigInt::from(1), BigInt::from(grid));
    let make = |off: f64| (0..grid).map(|k| ((k as f64 + off) / g, w.clone())).collect();
    [make(0.25), make(0.75)]
}

/// Sum of the integer shifts `base(· − l)`, `l = from, …, to − 1`.
fn shifts(base: &[(f64, BigRational)], from: i32, to: i32) -> Vec<(f64, BigRational)> {
    (from..to).flat_map(|l| base.iter().map(move |(x, w)| (x + l as f64, w.clone()))).collect()
}

/// `(2/(3π)) x^{3/2}` on `[9/2, hi]`, interpolated linearly between nodes a
/// quarter apart.
fn density_f(hi: f64) -> Vec<DensityPiece> {
    let f = |x: f64| 2.0 / (3.0 * PI) * x.powf(1.5);
    let mut out = Vec::new();
    let mut a = 4.5;
    while a < hi {
        let b = (a + 0.25).min(hi);
        let slope = (f(b) - f(a)) / (b - a);
        out.push(DensityPiece { lo: a, hi: b, density: Poly::new(vec![rational(f(a) - slope * a), rational(slope)]) });
        a = b;
    }
    out
}

/// Four spectral measures whose pasting has singular spectrum of
/// multiplicity 1, 2, 1, 1, 3 on the unit intervals from 2 to 7 and
/// absolutely continuous spectrum of multiplicity 4 beyond 4.5.
///
/// `μ_1 = λ_1 on (2,3)∪(4,5) + λ_2 on (3,4)∪(6,7)`, `μ_2 = λ_1 on (2,6) + λ_2
/// on (6,7)`, `μ_3 = λ_2 on (0,7)`, `μ_4 = λ_1 on (0,1)∪(7,8) + λ_2 on (3,8)`,
/// each plus the density `f`.
pub fn build_example_k74(window: (f64, f64), atom_grid_density: usize) -> Result<[ScalarMeasure; 4], SpectraError> {
    check_window(window)?;
    if window.0 > 0.0 || window.1 < 8.0 {
        return Err(SpectraError::BadWindow(window.0, window.1));
    }
    if atom_grid_density == 0 {
        return Err(SpectraError::Oracle("atom grid density must be positive".into()));
    }
    let [l1, l2] = unit_grids(atom_grid_density);
    let rows: [Vec<Vec<(f64, BigRational)>>; 4] = [
        vec![shifts(&l1, 2, 3), shifts(&l1, 4, 5), shifts(&l2, 3, 4), shifts(&l2, 6, 7)],
        vec![shifts(&l1, 2, 6), shifts(&l2, 6, 7)],
        vec![shifts(&l2, 0, 7)],
        vec![shifts(&l1, 0, 1), shifts(&l1, 7, 8), shifts(&l2, 3, 8)],
    ];
    let pieces = density_f(window.1);
    let build = |parts: &Vec<Vec<(f64, BigRational)>>| -> Result<ScalarMeasure, SpectraError> {
        let atoms = parts.iter().flatten().map(|(x, w)| Atom { position: *x, mass: w.clone() }).collect();
        Ok(ScalarMeasure::from_parts(atoms, pieces.clone())?)
    };
    Ok([build(&rows[0])?, build(&rows[1])?, build(&rows[2])?, build(&rows[3])?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_structure() {
        let ms = build_example_k74((0.0, 10.0), 4).unwrap();
        let singular = |m: &ScalarMeasure| m.atoms().iter().map(|a| a.position).collect::<Vec<_>>();
        assert!(singular(&ms[2]).iter().all(|&x| 0.0 < x && x < 7.0));
        // μ_1 and μ_2 share λ_1 atoms exactly on (2,3) ∪ (4,5).
        let s1 = singular(&ms[0]);
        let shared: Vec<f64> = singular(&ms[1]).into_iter().filter(|x| s1.contains(x)).collect();
        assert_eq!(shared.len(), 2 * 4 + 4);
        assert!(shared.iter().all(|&x| (2.0 < x && x < 3.0) || (4.0 < x && x < 5.0) || (6.0 < x && x < 7.0)));
        for m in &ms {
            assert_eq!(m.density_support(), vec![(4.5, 10.0)]);
            assert_eq!(m.pieces(), ms[0].pieces());
        }
        assert!(build_example_k74((1.0, 10.0), 4).is_err());
    }
}

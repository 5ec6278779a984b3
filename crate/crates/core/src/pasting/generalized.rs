//! Interface conditions rotated edgewise by angles `a_l` with a coupling
//! angle `b`.

use super::entry::pole_tol;
use super::{multiplicity_at, PastedSystem, PastingError, WeylEntry};
use crate::herglotz::{sin_cos, HerglotzRep};
use std::f64::consts::PI;

/// The constant Weyl function `−cot β` of a pure boundary relation.
pub fn pure_relation_weyl(beta: f64) -> Result<HerglotzRep, PastingError> {
    let (s, c) = sin_cos(beta);
    if s == 0.0 || !beta.is_finite() {
        return Err(PastingError::BadAngle(beta));
    }
    Ok(HerglotzRep::constant(-c / s)?)
}

fn check(n: usize, a: &[f64], b: f64) -> Result<(), PastingError> {
    if a.len() != n {
        return Err(PastingError::Invalid(format!("{} angles for {} edges", a.len(), n)));
    }
    if !(b > 0.0 && b < PI) {
        return Err(PastingError::BadAngle(b));
    }
    if let Some(bad) = a.iter().find(|v| !v.is_finite()) {
        return Err(PastingError::Invalid(format!("angle {bad}")));
    }
    Ok(())
}

/// Standard pasting of the rotated entries and the constant `−cot b`.
pub(crate) fn angle_system(edges: &[WeylEntry], a: &[f64], b: f64) -> Result<PastedSystem, PastingError> {
    check(edges.len(), a, b)?;
    let mut out = edges.iter().zip(a).map(|(e, &al)| e.rotated(al)).collect::<Result<Vec<_>, _>>()?;
    out.push(WeylEntry::Rep(pure_relation_weyl(b)?));
    PastedSystem::new(out)
}

/// Whether `x` belongs to the exceptional set of an edge for angle `a`:
/// a pole of `m_l` when `sin a = 0`, otherwise `m_l(x) = −cot a`.
fn in_exceptional_set(e: &WeylEntry, a: f64, x: f64) -> Result<bool, PastingError> {
    let (s, c) = sin_cos(a);
    if s == 0.0 {
        return Ok(e.pole_at(x)?.is_some());
    }
    let target = -c / s;
    Ok(match e.eval_real(x)? {
        Some(v) => (v - target).abs() <= pole_tol(x) * (1.0 + target.abs()),
        None => false,
    })
}

/// `N_A(x)` for rotated interface conditions: `#{l : x ∈ S_l} − 1` when at
/// least two exceptional sets meet, `1` at a zero of
/// `Σ m̃_l − cot b` with all rotated values finite, `0` otherwise. Points in
/// absolutely continuous spectrum use the ε-limit of the equivalent standard
/// pasting.
pub fn generalized_multiplicity(sys: &PastedSystem, a: &[f64], b: f64, x: f64) -> Result<usize, PastingError> {
    check(sys.n(), a, b)?;
    if sys.entries().iter().any(|e| e.in_ac_support(x)) {
        return multiplicity_at(&angle_system(sys.entries(), a, b)?, x);
    }
    let mut count = 0;
    for (e, &al) in sys.entries().iter().zip(a) {
        if in_exceptional_set(e, al, x)? {
            count += 1;
        }
    }
    if count >= 2 {
        return Ok(count - 1);
    }
    if count == 1 {
        return Ok(0);
    }
    let rotated = angle_system(sys.entries(), a, b)?;
    let mut sum = 0.0;
    let mut scale = 1.0;
    for e in rotated.entries() {
        match e.eval_real(x)? {
            Some(v) => {
                sum += v;
                scale += v.abs();
            }
            None => return Ok(0),
        }
    }
    Ok(usize::from(sum.abs() <= 1e-9 * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::ScalarMeasure;
    use crate::schrodinger::Edge;

    fn atoms(a: &[(f64, f64)]) -> WeylEntry {
        WeylEntry::Rep(HerglotzRep::from_measure(ScalarMeasure::new(a.to_vec(), vec![]).unwrap()))
    }

    #[test]
    fn pure_relation_examples() {
        assert_eq!(pure_relation_weyl(PI / 2.0).unwrap().a(), 0.0);
        assert!((pure_relation_weyl(PI / 4.0).unwrap().a() + 1.0).abs() < 1e-15);
        assert!((pure_relation_weyl(3.0 * PI / 4.0).unwrap().a() - 1.0).abs() < 1e-15);
        assert!(pure_relation_weyl(0.0).is_err());
        assert!(pure_relation_weyl(PI).is_err());
    }

    #[test]
    fn zero_angles_reduce_to_standard() {
        let sys = PastedSystem::new(vec![atoms(&[(0.0, 1.0), (2.0, 1.0)]), atoms(&[(0.0, 2.0)]), atoms(&[(-1.0, 1.0)])])
            .unwrap();
        for x in [0.0, 2.0, -1.0, 0.7, 5.0] {
            let std = multiplicity_at(&sys, x).unwrap();
            assert_eq!(generalized_multiplicity(&sys, &[0.0; 3], PI / 2.0, x).unwrap(), std, "x={x}");
        }
        // Kirchhoff zero between the poles at −1 and 0.
        let m = |x: f64| sys.sum_real(x).unwrap().unwrap();
        let mut lo = -0.99;
        let mut hi = -0.01;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if m(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let x0 = 0.5 * (lo + hi);
        assert_eq!(multiplicity_at(&sys, x0).unwrap(), 1);
        assert_eq!(generalized_multiplicity(&sys, &[0.0; 3], PI / 2.0, x0).unwrap(), 1);
    }

    #[test]
    fn shared_dirichlet_eigenvalue() {
        let e = |l: f64| WeylEntry::from(Edge::free(l, 0.0).unwrap());
        let sys = PastedSystem::new(vec![e(PI), e(PI)]).unwrap();
        assert_eq!(generalized_multiplicity(&sys, &[0.0, 0.0], PI / 2.0, 1.0).unwrap(), 1);
    }

    #[test]
    fn rotated_zero_meets_pole() {
        // m_1 = 1/(1−x)·… vanishes at x = 0 only through the atom placement.
        let sys = PastedSystem::new(vec![atoms(&[(-1.0, 1.0), (1.0, 1.0)]), atoms(&[(0.0, 1.0)])]).unwrap();
        assert_eq!(generalized_multiplicity(&sys, &[PI / 2.0, 0.0], PI / 2.0, 0.0).unwrap(), 1);
        assert_eq!(generalized_multiplicity(&sys, &[0.0, 0.0], PI / 2.0, 0.0).unwrap(), 0);
        assert!(generalized_multiplicity(&sys, &[0.0, 0.0], 0.0, 0.0).is_err());
        assert!(generalized_multiplicity(&sys, &[0.0], 1.0, 0.0).is_err());
    }
}

//! Boundary rotation `h ↦ (cos α · h − sin α)/(sin α · h + cos α)`.

use super::zeros::{bisect_increasing, root_in_gap, EndValue};
use super::{Herglotz, HerglotzError, HerglotzRep};
use crate::measure::ScalarMeasure;
use num_complex::Complex64;

/// `(sin α, cos α)` with the values at multiples of `π/2` snapped exactly.
pub fn sin_cos(alpha: f64) -> (f64, f64) {
    let (mut s, mut c) = alpha.sin_cos();
    if s.abs() < 1e-15 {
        s = 0.0;
        c = c.signum();
    } else if c.abs() < 1e-15 {
        c = 0.0;
        s = s.signum();
    }
    (s, c)
}

/// `sin α · k + cos α = 0` up to the rounding of `sin α`, `cos α`.
fn clashes(s: f64, c: f64, k: f64) -> bool {
    (s * k + c).abs() <= 4.0 * f64::EPSILON * ((s * k).abs() + c.abs())
}

/// The rotated function as a callable.
#[derive(Clone, Debug)]
pub struct Mobius<H> {
    inner: H,
    sin: f64,
    cos: f64,
}

impl<H: Herglotz> Mobius<H> {
    pub fn new(inner: H, alpha: f64) -> Result<Self, HerglotzError> {
        let (sin, cos) = sin_cos(alpha);
        if let Some(k) = inner.constant_value() {
            if clashes(sin, cos, k) {
                return Err(HerglotzError::PureRelation { value: k });
            }
        }
        Ok(Self { inner, sin, cos })
    }

    pub fn inner(&self) -> &H {
        &self.inner
    }
}

impl<H: Herglotz> Herglotz for Mobius<H> {
    fn eval(&self, z: Complex64) -> Result<Complex64, HerglotzError> {
        let h = self.inner.eval(z)?;
        Ok((self.cos * h - self.sin) / (self.sin * h + self.cos))
    }

    fn constant_value(&self) -> Option<f64> {
        self.inner.constant_value().map(|k| (self.cos * k - self.sin) / (self.sin * k + self.cos))
    }
}

/// Callable rotation of any Herglotz function.
pub fn mobius<H: Herglotz>(h: H, alpha: f64) -> Result<Mobius<H>, HerglotzError> {
    Mobius::new(h, alpha)
}

/// Rotation of a purely atomic representation, repackaged as a
/// representation. New atoms sit where `h = −cot α`, one per gap between
/// consecutive poles; their masses are `1/(sin²α · h'(y) · (1 + y²))`.
pub fn mobius_exact(h: &HerglotzRep, alpha: f64) -> Result<HerglotzRep, HerglotzError> {
    if !h.is_atomic() {
        return Err(HerglotzError::NotAtomic);
    }
    let (s, c) = sin_cos(alpha);
    if s == 0.0 {
        return Ok(h.clone());
    }
    if h.is_constant() {
        let k = h.a();
        if clashes(s, c, k) {
            return Err(HerglotzError::PureRelation { value: k });
        }
        return HerglotzRep::constant((c * k - s) / (s * k + c));
    }
    let kappa = -c / s;
    let poles: Vec<f64> = h.atoms_f64().iter().map(|&(x, _)| x).collect();
    let f = |x: f64| h.eval_real(x).map(|v| v - kappa).unwrap_or(f64::NAN);

    // Value at ±∞ when b = 0: a − Σ w x.
    let h_inf = h.a() - h.atoms_f64().iter().map(|&(x, w)| w * x).sum::<f64>();
    let mut roots = Vec::new();
    let first = poles.first().copied().unwrap_or(f64::INFINITY);
    let last = poles.last().copied().unwrap_or(f64::NEG_INFINITY);
    // Left unbounded gap.
    let left_inf = if h.b() > 0.0 { EndValue::MinusInf } else { EndValue::Value(h_inf - kappa) };
    // With no poles at all the function is a + bz with b > 0.
    let right_of_first = EndValue::PlusInf;
    if let Some(r) = root_in_gap(&f, f64::NEG_INFINITY, first, left_inf, right_of_first) {
        roots.push(r);
    }
    for w in poles.windows(2) {
        roots.push(bisect_increasing(f, w[0], w[1]));
    }
    if last.is_finite() {
        let right_inf = if h.b() > 0.0 { EndValue::PlusInf } else { EndValue::Value(h_inf - kappa) };
        if let Some(r) = root_in_gap(&f, last, f64::INFINITY, EndValue::MinusInf, right_inf) {
            roots.push(r);
        }
    }

    let mut atoms = Vec::with_capacity(roots.len());
    for y in roots {
        let d = h.derivative_real(y).ok_or(HerglotzError::AtPole(y))?;
        atoms.push((y, 1.0 / (s * s * d * (1.0 + y * y))));
    }
    let b_new = if h.b() == 0.0 && h_inf == kappa {
        let total: f64 = h.atoms_f64().iter().map(|&(x, w)| w * (1.0 + x * x)).sum();
        1.0 / (s * s * total)
    } else {
        0.0
    };
    let g = Mobius { inner: h, sin: s, cos: c };
    let a_new = g.eval(Complex64::new(0.0, 1.0))?.re;
    HerglotzRep::new(a_new, b_new, ScalarMeasure::new(atoms, vec![])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::FnHerglotz;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    fn i_sqrt(z: Complex64) -> Complex64 {
        let r = z.sqrt();
        Complex64::new(0.0, 1.0) * if r.im < 0.0 { -r } else { r }
    }

    #[test]
    fn identity_and_quarter_turn() {
        let h = FnHerglotz(i_sqrt);
        let z = Complex64::new(0.0, 1.0);
        let id = mobius(&h, 0.0).unwrap();
        assert_eq!(id.eval(z).unwrap(), h.eval(z).unwrap());
        let q = mobius(&h, FRAC_PI_2).unwrap();
        let expect = Complex64::new(0.0, 1.0) / z.sqrt();
        assert!(close(q.eval(z).unwrap(), expect, 1e-15));
        assert!(q.eval(z).unwrap().im > 0.0);
    }

    #[test]
    fn constants() {
        let k = HerglotzRep::constant(2.0).unwrap();
        let alpha = 0.7f64;
        let g = mobius(&k, alpha).unwrap();
        let expect = (2.0 * alpha.cos() - alpha.sin()) / (2.0 * alpha.sin() + alpha.cos());
        assert!((g.constant_value().unwrap() - expect).abs() < 1e-15);
        let exact = mobius_exact(&k, alpha).unwrap();
        assert!((exact.a() - expect).abs() < 1e-15);
        // sin α · c + cos α = 0 for c = −cot α.
        let clash = HerglotzRep::constant(-1.0).unwrap();
        assert!(matches!(mobius(&clash, PI / 4.0), Err(HerglotzError::PureRelation { .. })));
        assert!(matches!(mobius_exact(&clash, PI / 4.0), Err(HerglotzError::PureRelation { .. })));
    }

    #[test]
    fn exact_path_matches_callable() {
        let h = HerglotzRep::new(0.3, 0.0, ScalarMeasure::new(vec![(-2.0, 0.5), (0.0, 1.0), (1.5, 0.25)], vec![]).unwrap())
            .unwrap();
        for alpha in [0.4, 1.0, FRAC_PI_2, 2.5, 4.0] {
            let exact = mobius_exact(&h, alpha).unwrap();
            let call = mobius(&h, alpha).unwrap();
            for z in [Complex64::new(0.1, 0.5), Complex64::new(-3.0, 2.0), Complex64::new(1.4, 0.01)] {
                assert!(close(exact.eval(z).unwrap(), call.eval(z).unwrap(), 1e-9), "alpha {alpha} z {z}");
            }
        }
    }

    #[test]
    fn exact_path_with_linear_term_and_pole_at_infinity() {
        let lin = HerglotzRep::new(1.0, 2.0, ScalarMeasure::atom(0.0, 1.0).unwrap()).unwrap();
        let g = mobius_exact(&lin, 1.1).unwrap();
        assert_eq!(g.atoms_f64().len(), 2);
        // h = −1/z: h(±∞) = 0, so α = π/2 sends the value 0 to a pole at infinity.
        let inv = HerglotzRep::from_measure(ScalarMeasure::atom(0.0, 1.0).unwrap());
        let g = mobius_exact(&inv, FRAC_PI_2).unwrap();
        assert!(g.omega().is_zero());
        assert!((g.b() - 1.0).abs() < 1e-15);
        assert!(g.a().abs() < 1e-15);
    }

    #[test]
    fn inverse_rotation() {
        let h = HerglotzRep::new(-0.2, 0.1, ScalarMeasure::new(vec![(-1.0, 0.3), (2.0, 1.2)], vec![(3.0, 4.0, vec![0.5])]).unwrap())
            .unwrap();
        let alpha = 1.3;
        let back = mobius(mobius(&h, alpha).unwrap(), -alpha).unwrap();
        for z in [Complex64::new(0.5, 0.2), Complex64::new(-4.0, 3.0)] {
            assert!(close(back.eval(z).unwrap(), h.eval(z).unwrap(), 1e-12));
        }
    }
}

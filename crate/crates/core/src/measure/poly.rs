//! Dense univariate polynomials with exact rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact conversion of a finite `f64` into a rational number.
///
/// Panics on NaN or infinities; callers validate inputs before converting.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `c[0] + c[1] x + c[2] x^2 + ...`, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_f64(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rational(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        Poly::new(
            (0..len)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + other.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Antiderivative vanishing at the origin.
    pub fn antiderivative(&self) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(BigRational::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push(c / BigRational::from_integer(BigInt::from(k + 1)));
        }
        Poly::new(out)
    }

    /// Exact integral over `[lo, hi]`.
    pub fn integrate(&self, lo: &BigRational, hi: &BigRational) -> BigRational {
        let p = self.antiderivative();
        p.eval(hi) - p.eval(lo)
    }

    /// The polynomial `t ↦ p(shift + sign·t)`, used for local expansions.
    pub fn compose_affine(&self, shift: &BigRational, sign: &BigRational) -> Poly {
        // Horner with polynomial arithmetic: acc = acc * (shift + sign t) + c.
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            let mut next = vec![BigRational::zero(); acc.coeffs.len() + 1];
            for (k, a) in acc.coeffs.iter().enumerate() {
                next[k] += a * shift;
                next[k + 1] += a * sign;
            }
            next[0] += c;
            acc = Poly::new(next);
        }
        acc
    }

    /// Lowest-order nonzero coefficient and its index.
    pub fn leading_low(&self) -> Option<(usize, &BigRational)> {
        self.coeffs.iter().enumerate().find(|(_, c)| !c.is_zero())
    }

    /// Conservative numerical check that `p ≥ 0` on `[lo, hi]`.
    ///
    /// Affine densities are decided exactly from the endpoint values; higher
    /// degrees are sampled densely with a small relative allowance.
    pub fn is_nonnegative_on(&self, lo: f64, hi: f64) -> bool {
        match self.degree() {
            None => true,
            Some(0) | Some(1) => {
                !self.eval(&rational(lo)).is_negative() && !self.eval(&rational(hi)).is_negative()
            }
            Some(_) => {
                let scale = self.coeffs_f64().iter().map(|c| c.abs()).sum::<f64>()
                    * (1.0 + lo.abs().max(hi.abs())).powi(self.coeffs.len() as i32);
                let n = 1024;
                (0..=n).all(|i| {
                    let x = lo + (hi - lo) * i as f64 / n as f64;
                    self.eval_f64(x) >= -1e-13 * scale
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn integrate_linear() {
        let p = Poly::from_f64(&[0.0, 1.0]);
        assert_eq!(p.integrate(&q(0, 1), &q(2, 1)), q(2, 1));
    }

    #[test]
    fn compose_affine_matches_eval() {
        let p = Poly::from_f64(&[1.0, -2.0, 3.0]);
        let shifted = p.compose_affine(&q(1, 2), &q(-1, 1));
        for t in [q(0, 1), q(1, 3), q(-5, 7)] {
            assert_eq!(shifted.eval(&t), p.eval(&(q(1, 2) - &t)));
        }
    }

    #[test]
    fn nonnegativity() {
        assert!(Poly::from_f64(&[0.0, 1.0]).is_nonnegative_on(0.0, 1.0));
        assert!(!Poly::from_f64(&[0.0, 1.0]).is_nonnegative_on(-1.0, 1.0));
        assert!(!Poly::from_f64(&[-0.25, 0.0, 1.0]).is_nonnegative_on(-1.0, 1.0));
        assert!(Poly::from_f64(&[0.0, 0.0, 1.0]).is_nonnegative_on(-1.0, 1.0));
    }

    #[test]
    fn huge_ratio_converts() {
        let big = BigRational::new(BigInt::one() << 2000u32, (BigInt::one() << 1990u32) * 3);
        assert!((to_f64(&big) - 1024.0 / 3.0).abs() < 1e-9);
    }
}

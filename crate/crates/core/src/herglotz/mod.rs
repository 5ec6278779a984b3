//! Herglotz (Nevanlinna) functions in the normalisation
//! `h(z) = a + b z + ∫ (1 + x z)/(x − z) dΩ(x)` with a finite positive `Ω`.

mod limits;
mod mobius;
mod stieltjes;
mod zeros;

pub use limits::{
    atom_weight, atom_weight_eps, boundary_imag_limit, boundary_limit, extrapolate_to_zero, ratio_limit,
    BoundaryLimit, EpsSchedule, LimitValue,
};
pub use mobius::{mobius, mobius_exact, sin_cos, Mobius};
pub use stieltjes::{stieltjes_invert, StieltjesRecovery};
pub use zeros::{bisect_increasing, real_zeros};
pub(crate) use zeros::{root_in_gap, EndValue};

use crate::measure::poly::{rational, to_f64};
use crate::measure::{Atom, DensityPiece, MeasureError, Poly, ScalarMeasure};
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HerglotzError {
    #[error("Herglotz functions are evaluated off the real axis, got z = {0}")]
    RealArgument(Complex64),
    #[error("linear coefficient b must be finite and nonnegative, got {0}")]
    NegativeSlope(f64),
    #[error("constant {0} is not finite")]
    NonFinite(f64),
    #[error("boundary rotation turns the constant {value} into a pure relation")]
    PureRelation { value: f64 },
    #[error("operation needs a purely atomic representing measure")]
    NotAtomic,
    #[error("imaginary part of the reference function vanishes at eps = {0}")]
    VanishingReference(f64),
    #[error("function vanishes identically")]
    IdenticallyZero,
    #[error("{0} is a pole of the function")]
    AtPole(f64),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Anything that can be evaluated as a Herglotz function off the real axis.
pub trait Herglotz {
    fn eval(&self, z: Complex64) -> Result<Complex64, HerglotzError>;

    /// `Some(c)` when the function is the real constant `c`.
    fn constant_value(&self) -> Option<f64> {
        None
    }
}

impl<T: Herglotz + ?Sized> Herglotz for &T {
    fn eval(&self, z: Complex64) -> Result<Complex64, HerglotzError> {
        (**self).eval(z)
    }
    fn constant_value(&self) -> Option<f64> {
        (**self).constant_value()
    }
}

impl<T: Herglotz + ?Sized> Herglotz for Box<T> {
    fn eval(&self, z: Complex64) -> Result<Complex64, HerglotzError> {
        (**self).eval(z)
    }
    fn constant_value(&self) -> Option<f64> {
        (**self).constant_value()
    }
}

/// Wraps a closure. The closure is trusted to be Herglotz.
pub struct FnHerglotz<F>(pub F);

impl<F: Fn(Complex64) -> Complex64> Herglotz for FnHerglotz<F> {
    fn eval(&self, z: Complex64) -> Result<Complex64, HerglotzError> {
        reject_real(z)?;
        Ok((self.0)(z))
    }
}

pub(crate) fn reject_real(z: Complex64) -> Result<(), HerglotzError> {
    if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
        Err(HerglotzError::RealArgument(z))
    } else {
        Ok(())
    }
}

/// `f64` copy of the measure used on the evaluation hot path.
#[derive(Clone, Debug, Default)]
struct NumericView {
    atoms: Vec<(f64, f64)>,
    pieces: Vec<(f64, f64, Vec<f64>)>,
}

impl NumericView {
    fn of(omega: &ScalarMeasure) -> Self {
        Self {
            atoms: omega.atoms().iter().map(|a| (a.position, to_f64(&a.mass))).collect(),
            pieces: omega.pieces().iter().map(|p| (p.lo, p.hi, p.density.coeffs_f64())).collect(),
        }
    }
}

/// Integral representation `(a, b, Ω)`.
#[derive(Clone, Debug)]
pub struct HerglotzRep {
    a: f64,
    b: f64,
    omega: ScalarMeasure,
    view: NumericView,
}

impl PartialEq for HerglotzRep {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.omega == other.omega
    }
}

impl HerglotzRep {
    pub fn new(a: f64, b: f64, omega: ScalarMeasure) -> Result<Self, HerglotzError> {
        if !a.is_finite() {
            return Err(HerglotzError::NonFinite(a));
        }
        if !(b.is_finite() && b >= 0.0) {
            return Err(HerglotzError::NegativeSlope(b));
        }
        let view = NumericView::of(&omega);
        Ok(Self { a, b, omega, view })
    }

    /// `m_ν`: the function with `a = b = 0` and representing measure `ν`.
    pub fn from_measure(omega: ScalarMeasure) -> Self {
        Self::new(0.0, 0.0, omega).expect("zero constants are valid")
    }

    pub fn constant(a: f64) -> Result<Self, HerglotzError> {
        Self::new(a, 0.0, ScalarMeasure::zero())
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn omega(&self) -> &ScalarMeasure {
        &self.omega
    }

    pub fn is_atomic(&self) -> bool {
        self.omega.is_atomic()
    }

    pub fn is_constant(&self) -> bool {
        self.b == 0.0 && self.omega.is_zero()
    }

    /// Atom positions and masses as floats, sorted by position.
    pub fn atoms_f64(&self) -> &[(f64, f64)] {
        &self.view.atoms
    }

    /// Pointwise sum `Σ h_l`, again Herglotz with summed data.
    pub fn sum<'a>(reps: impl IntoIterator<Item = &'a HerglotzRep>) -> HerglotzRep {
        let (mut a, mut b, mut omega) = (0.0, 0.0, ScalarMeasure::zero());
        for r in reps {
            a += r.a;
            b += r.b;
            omega = omega.add(&r.omega);
        }
        HerglotzRep::new(a, b, omega).expect("sum of valid data is valid")
    }

    /// The measure `Ω̃ = (1 + x²)·Ω` of the alternative
    /// `∫ (1/(x−z) − x/(1+x²)) dΩ̃` normalisation.
    pub fn omega_tilde(&self) -> ScalarMeasure {
        self.omega_tilde_impl().expect("scaling preserves validity")
    }

    fn omega_tilde_impl(&self) -> Result<ScalarMeasure, MeasureError> {
        let one = BigRational::from_integer(1.into());
        let weight = Poly::new(vec![one.clone(), BigRational::from_integer(0.into()), one.clone()]);
        let atoms = self
            .omega
            .atoms()
            .iter()
            .map(|a| {
                let x = rational(a.position);
                Atom { position: a.position, mass: &a.mass * (&one + &x * &x) }
            })
            .collect();
        let pieces = self
            .omega
            .pieces()
            .iter()
            .map(|p| DensityPiece { lo: p.lo, hi: p.hi, density: p.density.mul(&weight) })
            .collect();
        ScalarMeasure::from_parts(atoms, pieces)
    }

    /// Continuation to the real axis on the complement of `supp Ω`.
    /// Returns `None` on the support, where `h` has no finite real value.
    pub fn eval_real(&self, x: f64) -> Option<f64> {
        let mut acc = self.a + self.b * x;
        for &(t, w) in &self.view.atoms {
            if t == x {
                return None;
            }
            acc += w * (1.0 + t * x) / (t - x);
        }
        for (lo, hi, c) in &self.view.pieces {
            if *lo <= x && x <= *hi {
                return None;
            }
            acc += piece_real(*lo, *hi, c, x);
        }
        Some(acc)
    }

    /// Derivative along the real axis off `supp Ω`; strictly positive unless
    /// the function is constant.
    pub fn derivative_real(&self, x: f64) -> Option<f64> {
        let mut acc = self.b;
        for &(t, w) in &self.view.atoms {
            if t == x {
                return None;
            }
            acc += w * (1.0 + t * t) / ((t - x) * (t - x));
        }
        for (lo, hi, c) in &self.view.pieces {
            if *lo <= x && x <= *hi {
                return None;
            }
            acc += piece_derivative_real(*lo, *hi, c, x);
        }
        Some(acc)
    }

    /// Sorted endpoints of `supp Ω`: atoms as degenerate intervals, density
    /// pieces as closed intervals.
    pub(crate) fn support_features(&self) -> Vec<(f64, f64)> {
        let mut f: Vec<(f64, f64)> = self.view.atoms.iter().map(|&(x, _)| (x, x)).collect();
        f.extend(self.omega.density_support());
        f.sort_by(|a, b| a.0.total_cmp(&b.0));
        f
    }
}

impl Herglotz for HerglotzRep {
    fn eval(&self, z: Complex64) -> Result<Complex64, HerglotzError> {
        reject_real(z)?;
        Ok(Complex64::new(self.a, 0.0) + self.b * z + cauchy_view(&self.view, z))
    }

    fn constant_value(&self) -> Option<f64> {
        self.is_constant().then_some(self.a)
    }
}

/// `∫ (1 + x z)/(x − z) dν(x)` for `Im z ≠ 0`.
pub fn cauchy_transform(nu: &ScalarMeasure, z: Complex64) -> Result<Complex64, HerglotzError> {
    reject_real(z)?;
    Ok(cauchy_view(&NumericView::of(nu), z))
}

fn cauchy_view(view: &NumericView, z: Complex64) -> Complex64 {
    let (u, y) = (z.re, z.im);
    let (mut re, mut im) = (0.0, 0.0);
    for &(x, w) in &view.atoms {
        // Real and imaginary parts separated so that Im ≥ 0 term by term.
        let dx = x - u;
        let d2 = dx * dx + y * y;
        re += w * ((1.0 + x * u) * dx - x * y * y) / d2;
        im += w * y * (1.0 + x * x) / d2;
    }
    let mut acc = Complex64::new(re, im);
    for (lo, hi, c) in &view.pieces {
        acc += piece_cauchy(*lo, *hi, c, z);
    }
    acc
}

/// `∫_lo^hi p(t) (1 + t z)/(t − z) dt = z ∫p + (1 + z²) ∫ p(t)/(t − z) dt`.
fn piece_cauchy(lo: f64, hi: f64, c: &[f64], z: Complex64) -> Complex64 {
    let total: f64 = integrate_f64(c, lo, hi);
    let (q, pz) = synthetic_division(c, z);
    let q_int = integrate_complex(&q, lo, hi);
    let log_ratio = (Complex64::new(hi, 0.0) - z).ln() - (Complex64::new(lo, 0.0) - z).ln();
    let inner = q_int + pz * log_ratio;
    let mut v = z * total + (1.0 + z * z) * inner;
    // Positivity of the Poisson integral: the closed form can undershoot zero
    // by rounding when the true imaginary part is tiny.
    if z.im > 0.0 && v.im < 0.0 {
        v.im = 0.0;
    } else if z.im < 0.0 && v.im > 0.0 {
        v.im = 0.0;
    }
    v
}

fn piece_real(lo: f64, hi: f64, c: &[f64], x: f64) -> f64 {
    let total = integrate_f64(c, lo, hi);
    let (q, px) = synthetic_division(c, Complex64::new(x, 0.0));
    let q_int = integrate_complex(&q, lo, hi).re;
    let log_ratio = ((hi - x) / (lo - x)).abs().ln();
    x * total + (1.0 + x * x) * (q_int + px.re * log_ratio)
}

/// `∫ p(t)(1 + t²)/(t − x)² dt` for `x` outside `[lo, hi]`.
fn piece_derivative_real(lo: f64, hi: f64, c: &[f64], x: f64) -> f64 {
    // r(t) = p(t)(1+t²) expanded around x: r = r0 + r1 (t−x) + (t−x)² s(t−x).
    let mut r = vec![0.0; c.len() + 2];
    for (k, &ck) in c.iter().enumerate() {
        r[k] += ck;
        r[k + 2] += ck;
    }
    let taylor = taylor_shift(&r, x);
    let (r0, r1) = (taylor[0], taylor.get(1).copied().unwrap_or(0.0));
    let s: Vec<f64> = taylor.iter().skip(2).copied().collect();
    let (a, b) = (lo - x, hi - x);
    integrate_f64(&s, a, b) + r1 * (b / a).abs().ln() + r0 * (1.0 / a - 1.0 / b)
}

/// Coefficients of `p(x + s)` as a polynomial in `s`.
fn taylor_shift(c: &[f64], x: f64) -> Vec<f64> {
    let mut out = c.to_vec();
    let n = out.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            out[j] += x * out[j + 1];
        }
    }
    out
}

fn integrate_f64(c: &[f64], lo: f64, hi: f64) -> f64 {
    let anti = |x: f64| c.iter().enumerate().rev().fold(0.0, |acc, (k, &ck)| acc * x + ck / (k + 1) as f64) * x;
    anti(hi) - anti(lo)
}

fn integrate_complex(c: &[Complex64], lo: f64, hi: f64) -> Complex64 {
    let anti = |x: f64| {
        c.iter()
            .enumerate()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, &ck)| acc * x + ck / (k + 1) as f64)
            * x
    };
    anti(hi) - anti(lo)
}

/// Divides `p(t) − p(z)` by `t − z`; returns the quotient and `p(z)`.
fn synthetic_division(c: &[f64], z: Complex64) -> (Vec<Complex64>, Complex64) {
    if c.is_empty() {
        return (Vec::new(), Complex64::new(0.0, 0.0));
    }
    let n = c.len() - 1;
    let mut q = vec![Complex64::new(0.0, 0.0); n];
    let mut acc = Complex64::new(c[n], 0.0);
    for k in (0..n).rev() {
        q[k] = acc;
        acc = acc * z + c[k];
    }
    (q, acc)
}

#[derive(Serialize, Deserialize)]
struct RawRep {
    #[serde(default)]
    a: f64,
    #[serde(default)]
    b: f64,
    #[serde(default)]
    omega: ScalarMeasure,
}

impl Serialize for HerglotzRep {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawRep { a: self.a, b: self.b, omega: self.omega.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HerglotzRep {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawRep::deserialize(d)?;
        HerglotzRep::new(raw.a, raw.b, raw.omega).map_err(serde::de::Error::custom)
    }
}

//! One scalar Weyl function entering a pasting.

use super::PastingError;
use crate::herglotz::{mobius_exact, real_zeros, sin_cos, Herglotz, HerglotzError, HerglotzRep};
use crate::measure::ScalarMeasure;
use crate::schrodinger::{Edge, EdgeWeyl};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Tolerance for identifying numerically located poles with a given point.
pub(crate) fn pole_tol(x: f64) -> f64 {
    1e-9 * (1.0 + x.abs())
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeylEntry {
    /// Explicit representation; constants model pure relations.
    Rep(HerglotzRep),
    /// Edge with a potential, evaluated through its ODE.
    Edge(EdgeWeyl),
    /// Boundary rotation of a representation with a density part, kept as a
    /// formula since the rotated measure has no closed form.
    Rotated { rep: HerglotzRep, alpha: f64 },
}

impl From<HerglotzRep> for WeylEntry {
    fn from(r: HerglotzRep) -> Self {
        WeylEntry::Rep(r)
    }
}

impl From<ScalarMeasure> for WeylEntry {
    fn from(m: ScalarMeasure) -> Self {
        WeylEntry::Rep(HerglotzRep::from_measure(m))
    }
}

impl From<Edge> for WeylEntry {
    fn from(e: Edge) -> Self {
        WeylEntry::Edge(EdgeWeyl::new(e))
    }
}

impl From<EdgeWeyl> for WeylEntry {
    fn from(e: EdgeWeyl) -> Self {
        WeylEntry::Edge(e)
    }
}

fn rotate_value(alpha: f64, h: f64) -> f64 {
    let (s, c) = sin_cos(alpha);
    (c * h - s) / (s * h + c)
}

impl WeylEntry {
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            WeylEntry::Rep(r) => r.constant_value(),
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, WeylEntry::Edge(_))
    }

    /// Rotation of the vertex condition by `α`.
    pub fn rotated(&self, alpha: f64) -> Result<WeylEntry, PastingError> {
        Ok(match self {
            WeylEntry::Rep(r) if r.is_atomic() => WeylEntry::Rep(mobius_exact(r, alpha)?),
            WeylEntry::Rep(r) => WeylEntry::Rotated { rep: r.clone(), alpha: alpha.rem_euclid(2.0 * std::f64::consts::PI) },
            WeylEntry::Edge(e) => WeylEntry::Edge(crate::schrodinger::boundary_transform_edge(e, alpha)),
            WeylEntry::Rotated { rep, alpha: a } => {
                WeylEntry::Rotated { rep: rep.clone(), alpha: (a + alpha).rem_euclid(2.0 * std::f64::consts::PI) }
            }
        })
    }

    /// Value on the real axis where the function is finite and real.
    pub fn eval_real(&self, x: f64) -> Result<Option<f64>, PastingError> {
        Ok(match self {
            WeylEntry::Rep(r) => r.eval_real(x),
            WeylEntry::Edge(e) => e.eval_real(x)?,
            WeylEntry::Rotated { rep, alpha } => {
                if rep.omega().in_support(x) && rep.omega().atom_mass_at(x).is_none() {
                    None
                } else if rep.omega().atom_mass_at(x).is_some() {
                    let (s, c) = sin_cos(*alpha);
                    (s != 0.0).then_some(c / s)
                } else {
                    let h = rep.eval_real(x).expect("off the support");
                    let v = rotate_value(*alpha, h);
                    v.is_finite().then_some(v)
                }
            }
        })
    }

    /// Derivative on the real axis where [`eval_real`](Self::eval_real) is finite.
    pub fn derivative_real(&self, x: f64) -> Result<Option<f64>, PastingError> {
        Ok(match self {
            WeylEntry::Rep(r) => r.derivative_real(x),
            WeylEntry::Edge(e) => e.derivative_real(x)?,
            WeylEntry::Rotated { rep, alpha } => {
                let (s, c) = sin_cos(*alpha);
                match (rep.eval_real(x), rep.derivative_real(x)) {
                    (Some(h), Some(d)) => Some(d / ((s * h + c) * (s * h + c))),
                    // At an atom of the inner function, h = −W/(z−x) + ... and the
                    // rotation is c/s + 1/(s² W)(x − z) to first order.
                    _ => rep.omega().atom_mass_at(x).map(|w| {
                        let big_w = crate::measure::poly::to_f64(w) * (1.0 + x * x);
                        1.0 / (s * s * big_w)
                    }),
                }
            }
        })
    }

    /// Poles (atoms of the representing measure) in `[lo, hi]`.
    pub fn poles(&self, window: (f64, f64)) -> Result<Vec<f64>, PastingError> {
        let (lo, hi) = window;
        Ok(match self {
            WeylEntry::Rep(r) => r.atoms_f64().iter().map(|a| a.0).filter(|&x| lo <= x && x <= hi).collect(),
            WeylEntry::Edge(e) => e.poles(window)?,
            WeylEntry::Rotated { rep, alpha } => {
                let (s, c) = sin_cos(*alpha);
                if s == 0.0 {
                    rep.atoms_f64().iter().map(|a| a.0).filter(|&x| lo <= x && x <= hi).collect()
                } else {
                    let shifted = HerglotzRep::new(rep.a() + c / s, rep.b(), rep.omega().clone())?;
                    real_zeros(&shifted, window)?
                }
            }
        })
    }

    /// The pole at `x` if there is one, exactly for representations and up to
    /// [`pole_tol`] for numerically located poles.
    pub fn pole_at(&self, x: f64) -> Result<Option<f64>, PastingError> {
        match self {
            WeylEntry::Rep(r) => Ok(r.omega().atom_mass_at(x).map(|_| x)),
            _ => {
                let t = pole_tol(x);
                let near = self.poles((x - 100.0 * t, x + 100.0 * t))?;
                Ok(near.into_iter().filter(|p| (p - x).abs() <= t).min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs())))
            }
        }
    }

    /// Residue `r` in `m(z) ≈ r/(p − z)`, i.e. `(1 + p²)·Ω({p})`.
    pub fn residue_at(&self, p: f64) -> Result<f64, PastingError> {
        Ok(match self {
            WeylEntry::Rep(r) => r.omega().atom_mass_at(p).map(crate::measure::poly::to_f64).unwrap_or(0.0) * (1.0 + p * p),
            WeylEntry::Edge(e) => e.residue_at(p)?,
            WeylEntry::Rotated { rep, alpha } => {
                let (s, _) = sin_cos(*alpha);
                let d = rep.derivative_real(p).ok_or(HerglotzError::AtPole(p))?;
                1.0 / (s * s * d)
            }
        })
    }

    /// Whether `x` lies in the closed support of the absolutely continuous part.
    pub fn in_ac_support(&self, x: f64) -> bool {
        match self {
            WeylEntry::Rep(r) | WeylEntry::Rotated { rep: r, .. } => {
                r.omega().density_support().iter().any(|&(a, b)| a <= x && x <= b)
            }
            WeylEntry::Edge(e) => e.ac_support().is_some_and(|(a, b)| a <= x && x <= b),
        }
    }

    /// Closed intervals carrying absolutely continuous spectrum.
    pub fn ac_support(&self) -> Vec<(f64, f64)> {
        match self {
            WeylEntry::Rep(r) | WeylEntry::Rotated { rep: r, .. } => r.omega().density_support(),
            WeylEntry::Edge(e) => e.ac_support().into_iter().collect(),
        }
    }
}

impl Herglotz for WeylEntry {
    fn eval(&self, z: Complex64) -> Result<Complex64, HerglotzError> {
        match self {
            WeylEntry::Rep(r) => r.eval(z),
            WeylEntry::Edge(e) => e.eval(z),
            WeylEntry::Rotated { rep, alpha } => {
                let (s, c) = sin_cos(*alpha);
                let h = rep.eval(z)?;
                Ok((c * h - s) / (s * h + c))
            }
        }
    }

    fn constant_value(&self) -> Option<f64> {
        WeylEntry::constant_value(self)
    }
}

impl Serialize for WeylEntry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::Error;
        match self {
            WeylEntry::Rep(r) => r.serialize(s),
            WeylEntry::Edge(e) if e.alpha() == 0.0 => e.edge().serialize(s),
            _ => Err(S::Error::custom("rotated entries have no JSON form; serialise the original and the interface")),
        }
    }
}

impl<'de> Deserialize<'de> for WeylEntry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(d)?;
        let obj = v.as_object().ok_or_else(|| D::Error::custom("edge entry must be a JSON object"))?;
        if obj.contains_key("length") {
            serde_json::from_value::<Edge>(v).map(Into::into).map_err(D::Error::custom)
        } else if ["a", "b", "omega"].iter().any(|k| obj.contains_key(*k)) {
            serde_json::from_value::<HerglotzRep>(v).map(Into::into).map_err(D::Error::custom)
        } else if ["atoms", "pieces"].iter().any(|k| obj.contains_key(*k)) {
            serde_json::from_value::<ScalarMeasure>(v).map(Into::into).map_err(D::Error::custom)
        } else {
            Err(D::Error::custom("edge entry is neither an edge, a Herglotz representation nor a measure"))
        }
    }
}

//! JSON form `{"atoms":[[x,w],...],"pieces":[{"interval":[a,b],"coeffs":[c0,...]}]}`.
//!
//! Rationals that are exactly representable as `f64` are written as plain
//! numbers; anything else is written as a `"p/q"` string so that emitted
//! measures re-parse to the identical exact value.

use super::poly::{rational, Poly};
use super::{Atom, DensityPiece, ScalarMeasure};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    Float(f64),
    Exact(String),
}

impl Num {
    fn from_rational(q: &BigRational) -> Num {
        match q.to_f64() {
            Some(f) if f.is_finite() && rational(f) == *q => Num::Float(f),
            _ => Num::Exact(format!("{}/{}", q.numer(), q.denom())),
        }
    }

    fn to_rational(&self) -> Result<BigRational, String> {
        match self {
            Num::Float(f) if f.is_finite() => Ok(rational(*f)),
            Num::Float(f) => Err(format!("non-finite number {f}")),
            Num::Exact(s) => {
                let (n, d) = s.split_once('/').unwrap_or((s.as_str(), "1"));
                let n: BigInt = n.trim().parse().map_err(|_| format!("bad rational {s:?}"))?;
                let d: BigInt = d.trim().parse().map_err(|_| format!("bad rational {s:?}"))?;
                if d == BigInt::from(0) {
                    return Err(format!("zero denominator in {s:?}"));
                }
                Ok(BigRational::new(n, d))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawPiece {
    interval: [f64; 2],
    coeffs: Vec<Num>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    #[serde(default)]
    atoms: Vec<(f64, Num)>,
    #[serde(default)]
    pieces: Vec<RawPiece>,
}

impl Serialize for ScalarMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawMeasure {
            atoms: self.atoms.iter().map(|a| (a.position, Num::from_rational(&a.mass))).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| RawPiece {
                    interval: [p.lo, p.hi],
                    coeffs: p.density.coeffs().iter().map(Num::from_rational).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScalarMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawMeasure::deserialize(d)?;
        let atoms = raw
            .atoms
            .iter()
            .map(|(x, w)| Ok(Atom { position: *x, mass: w.to_rational().map_err(D::Error::custom)? }))
            .collect::<Result<Vec<_>, D::Error>>()?;
        let pieces = raw
            .pieces
            .iter()
            .map(|p| {
                let coeffs = p
                    .coeffs
                    .iter()
                    .map(Num::to_rational)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(D::Error::custom)?;
                Ok(DensityPiece { lo: p.interval[0], hi: p.interval[1], density: Poly::new(coeffs) })
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        ScalarMeasure::from_parts(atoms, pieces).map_err(D::Error::custom)
    }
}

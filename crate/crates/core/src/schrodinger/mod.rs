//! Titchmarsh–Weyl functions of edges `[0, L]` carrying a potential `q`.
//!
//! The vertex sits at `x = 0`. For a finite edge the solution `u` of
//! `−u″ + q u = z u` is fixed by the outer condition
//! `u(L) cos β + u′(L) sin β = 0` through the data `(sin β, −cos β)` at `L`,
//! and the Weyl function is `m(z) = u′(0)/u(0)`.

mod ode;
mod weyl;

pub use ode::{integrate, StepUnderflow, Tolerance};
pub use weyl::{
    boundary_transform_edge, dirichlet_eigenvalues, edge_to_herglotz, solve_ivp, vertex_data, weyl_m, EdgeWeyl, Solution,
};

use crate::herglotz::HerglotzError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchrodingerError {
    #[error("invalid edge: {0}")]
    InvalidEdge(String),
    #[error("operation needs a finite edge")]
    InfiniteEdge,
    #[error("point {x} lies outside the edge [0, {length}]")]
    OutOfRange { x: f64, length: f64 },
    #[error(transparent)]
    Ode(#[from] StepUnderflow),
    #[error("eigenvalue search failed: {0}")]
    EigenSearch(String),
    #[error(transparent)]
    Herglotz(#[from] HerglotzError),
}

/// One polynomial piece `q(x) = Σ c_k x^k` on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialPiece {
    pub interval: [f64; 2],
    pub coeffs: Vec<f64>,
}

impl PotentialPiece {
    fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// Piecewise-polynomial potential; zero off the listed pieces.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Potential {
    #[default]
    Free,
    Pieces(Vec<PotentialPiece>),
}

impl Potential {
    pub fn constant(c: f64, length: f64) -> Self {
        Potential::Pieces(vec![PotentialPiece { interval: [0.0, length], coeffs: vec![c] }])
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Pieces(_) => self.piece_at(x).map_or(0.0, |p| p.eval(x)),
        }
    }

    pub(crate) fn piece_at(&self, x: f64) -> Option<&PotentialPiece> {
        match self {
            Potential::Free => None,
            Potential::Pieces(ps) => ps.iter().find(|p| p.interval[0] <= x && x <= p.interval[1]),
        }
    }

    pub fn is_free(&self) -> bool {
        match self {
            Potential::Free => true,
            Potential::Pieces(ps) => ps.iter().all(|p| p.coeffs.iter().all(|&c| c == 0.0)),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Potential::Free => Vec::new(),
            Potential::Pieces(ps) => ps.iter().flat_map(|p| p.interval).collect(),
        }
    }

    /// Lower bound of `q` on `[0, length]` from sampling plus the piece
    /// endpoints; zero counts when the pieces leave part of the edge bare.
    fn lower_bound(&self, length: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Pieces(ps) => {
                let mut m = f64::INFINITY;
                let mut covered = 0.0;
                for p in ps {
                    let (a, b) = (p.interval[0], p.interval[1]);
                    covered += b - a;
                    for i in 0..=256 {
                        m = m.min(p.eval(a + (b - a) * i as f64 / 256.0));
                    }
                }
                if covered < length {
                    m = m.min(0.0);
                }
                // Sampling can miss narrow dips of higher-degree pieces.
                m - 1e-6 * (1.0 + m.abs())
            }
        }
    }
}

/// A star-graph edge. Infinite edges must be free (limit point at infinity)
/// and carry no outer condition.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    length: f64,
    potential: Potential,
    outer_angle: f64,
}

impl Edge {
    pub fn new(length: f64, potential: Potential, outer_angle: f64) -> Result<Self, SchrodingerError> {
        let bad = |m: String| Err(SchrodingerError::InvalidEdge(m));
        if !(length > 0.0) || length.is_nan() {
            return bad(format!("length must be positive, got {length}"));
        }
        if length.is_infinite() {
            if !potential.is_free() {
                return bad("infinite edges support the free potential only".into());
            }
        } else if !(0.0..PI).contains(&outer_angle) {
            return bad(format!("outer angle must lie in [0, π), got {outer_angle}"));
        }
        if let Potential::Pieces(ps) = &potential {
            let mut sorted: Vec<&PotentialPiece> = ps.iter().collect();
            sorted.sort_by(|a, b| a.interval[0].total_cmp(&b.interval[0]));
            for p in &sorted {
                let [a, b] = p.interval;
                if !(a < b) || a < 0.0 || b > length || p.coeffs.iter().any(|c| !c.is_finite()) {
                    return bad(format!("bad potential piece on [{a}, {b}]"));
                }
            }
            if sorted.windows(2).any(|w| w[1].interval[0] < w[0].interval[1]) {
                return bad("potential pieces overlap".into());
            }
        }
        let outer_angle = if length.is_infinite() { 0.0 } else { outer_angle };
        Ok(Self { length, potential, outer_angle })
    }

    /// `q = 0` on `[0, L]` with outer angle `β`.
    pub fn free(length: f64, outer_angle: f64) -> Result<Self, SchrodingerError> {
        Self::new(length, Potential::Free, outer_angle)
    }

    pub fn free_half_line() -> Self {
        Self { length: f64::INFINITY, potential: Potential::Free, outer_angle: 0.0 }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_finite(&self) -> bool {
        self.length.is_finite()
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn outer_angle(&self) -> f64 {
        self.outer_angle
    }

    /// Potential breakpoints strictly inside `(0, L)`, sorted and deduplicated.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> =
            self.potential.breakpoints().into_iter().filter(|&x| x > 0.0 && x < self.length).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    pub(crate) fn potential_lower_bound(&self) -> f64 {
        self.potential.lower_bound(self.length)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawLength {
    Number(f64),
    Tag(String),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawPotential {
    Tag(String),
    Pieces { pieces: Vec<PotentialPiece> },
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    length: RawLength,
    #[serde(default)]
    potential: Option<RawPotential>,
    #[serde(default)]
    outer_angle: f64,
}

impl Serialize for Edge {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawEdge {
            length: if self.length.is_finite() { RawLength::Number(self.length) } else { RawLength::Tag("inf".into()) },
            potential: Some(match &self.potential {
                Potential::Free => RawPotential::Tag("free".into()),
                Potential::Pieces(ps) => RawPotential::Pieces { pieces: ps.clone() },
            }),
            outer_angle: self.outer_angle,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RawEdge::deserialize(d)?;
        let length = match raw.length {
            RawLength::Number(x) => x,
            RawLength::Tag(t) if t == "inf" => f64::INFINITY,
            RawLength::Tag(t) => return Err(D::Error::custom(format!("unknown length tag {t:?}"))),
        };
        let potential = match raw.potential {
            None => Potential::Free,
            Some(RawPotential::Tag(t)) if t == "free" => Potential::Free,
            Some(RawPotential::Tag(t)) => return Err(D::Error::custom(format!("unknown potential tag {t:?}"))),
            Some(RawPotential::Pieces { pieces }) => Potential::Pieces(pieces),
        };
        Edge::new(length, potential, raw.outer_angle).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let e: Edge = serde_json::from_str(r#"{"length":"inf","potential":"free"}"#).unwrap();
        assert!(!e.is_finite());
        let e: Edge = serde_json::from_str(
            r#"{"length":2,"potential":{"pieces":[{"interval":[0,1],"coeffs":[1,2]}]},"outer_angle":0.5}"#,
        )
        .unwrap();
        assert_eq!(e.potential().eval(0.5), 2.0);
        assert_eq!(e.potential().eval(1.5), 0.0);
        let back: Edge = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<Edge>(r#"{"length":-1}"#).is_err());
        assert!(serde_json::from_str::<Edge>(r#"{"length":1,"outer_angle":4}"#).is_err());
        assert!(serde_json::from_str::<Edge>(
            r#"{"length":"inf","potential":{"pieces":[{"interval":[0,1],"coeffs":[1]}]}}"#
        )
        .is_err());
    }
}

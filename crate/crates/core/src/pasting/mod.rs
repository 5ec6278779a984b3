//! Pasting of scalar Weyl functions with standard interface conditions: the
//! matrix Weyl function `M` of the star vertex and the multiplicity of its
//! spectrum as the rank of `ω = dΩ/dρ`.

mod entry;
mod generalized;
mod omega;
mod rank;

pub use entry::WeylEntry;
pub(crate) use entry::pole_tol;
pub use generalized::{generalized_multiplicity, pure_relation_weyl};
pub use omega::{default_schedule, multiplicity_at, omega_at, omega_eps, pole_set, OmegaMatrix, OmegaMethod, PsdReport};
pub use rank::{exact_rank, predicted_rank_singular, rank_md, rank_one_limit_matrix};

use crate::herglotz::{Herglotz, HerglotzError, HerglotzRep};
use crate::schrodinger::SchrodingerError;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

type C = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PastingError {
    #[error("a pasting needs at least two edges, got {0}")]
    TooFewEdges(usize),
    #[error("at most one edge may be a real constant, got {0}")]
    TooManyConstants(usize),
    #[error("m = Σ m_l vanishes at z = {0}")]
    VanishingSum(C),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("angle b must lie in (0, π), got {0}")]
    BadAngle(f64),
    #[error("cannot decide membership of {x} in the exceptional set of edge {edge}")]
    Undecidable { edge: usize, x: f64 },
    #[error(transparent)]
    Herglotz(#[from] HerglotzError),
    #[error(transparent)]
    Schrodinger(#[from] SchrodingerError),
}

/// `n ≥ 2` Weyl functions `m_1, …, m_n`, at most one of them a real constant.
#[derive(Clone, Debug, PartialEq)]
pub struct PastedSystem {
    entries: Vec<WeylEntry>,
}

impl PastedSystem {
    pub fn new(entries: Vec<WeylEntry>) -> Result<Self, PastingError> {
        if entries.len() < 2 {
            return Err(PastingError::TooFewEdges(entries.len()));
        }
        let constants = entries.iter().filter(|e| e.constant_value().is_some()).count();
        if constants > 1 {
            return Err(PastingError::TooManyConstants(constants));
        }
        Ok(Self { entries })
    }

    pub fn from_reps(reps: Vec<HerglotzRep>) -> Result<Self, PastingError> {
        Self::new(reps.into_iter().map(WeylEntry::Rep).collect())
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[WeylEntry] {
        &self.entries
    }

    pub fn has_numeric_entries(&self) -> bool {
        self.entries.iter().any(WeylEntry::is_numeric)
    }

    pub fn values(&self, z: C) -> Result<Vec<C>, PastingError> {
        self.entries.iter().map(|e| e.eval(z).map_err(Into::into)).collect()
    }

    /// `m = Σ m_l` at `z`.
    pub fn sum(&self, z: C) -> Result<C, PastingError> {
        Ok(self.values(z)?.into_iter().sum())
    }

    /// `Σ m_l(x)` on the real axis when every term is finite.
    pub fn sum_real(&self, x: f64) -> Result<Option<f64>, PastingError> {
        let mut acc = 0.0;
        for e in &self.entries {
            match e.eval_real(x)? {
                Some(v) => acc += v,
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    }
}

/// Interface conditions of a star vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Interface {
    Standard,
    /// Conditions rotated edgewise by `a_l` with coupling angle `b ∈ (0, π)`.
    Angles { a: Vec<f64>, b: f64 },
}

impl Default for Interface {
    fn default() -> Self {
        Interface::Standard
    }
}

/// JSON form of a system: entries plus interface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemDescription {
    pub edges: Vec<WeylEntry>,
    #[serde(default)]
    pub interface: Interface,
}

impl SystemDescription {
    /// The standard pasting realising this description. Angle interfaces are
    /// reduced to a standard pasting of the rotated entries and one extra
    /// constant entry `−cot b`.
    pub fn to_system(&self) -> Result<PastedSystem, PastingError> {
        match &self.interface {
            Interface::Standard => PastedSystem::new(self.edges.clone()),
            Interface::Angles { a, b } => generalized::angle_system(&self.edges, a, *b),
        }
    }
}

/// Blocks `(w11, w12, w21, w22)` of the interface matrix.
pub fn interface_blocks(n: usize) -> [DMatrix<f64>; 4] {
    let mut w11 = DMatrix::zeros(n, n);
    let mut w12 = DMatrix::zeros(n, n);
    let mut w21 = DMatrix::zeros(n, n);
    let mut w22 = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        w11[(i, i)] = -1.0;
        w11[(i, n - 1)] = 1.0;
        w22[(i, i)] = -1.0;
    }
    for j in 0..n {
        w12[(n - 1, j)] = 1.0;
    }
    w21[(n - 1, n - 1)] = -1.0;
    [w11, w12, w21, w22]
}

/// The `2n × 2n` matrix `w` of the standard interface conditions.
pub fn interface_matrix(n: usize) -> Result<DMatrix<f64>, PastingError> {
    if n < 2 {
        return Err(PastingError::TooFewEdges(n));
    }
    let [w11, w12, w21, w22] = interface_blocks(n);
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    w.view_mut((0, 0), (n, n)).copy_from(&w11);
    w.view_mut((0, n), (n, n)).copy_from(&w12);
    w.view_mut((n, 0), (n, n)).copy_from(&w21);
    w.view_mut((n, n), (n, n)).copy_from(&w22);
    Ok(w)
}

/// `J = i [[0, I], [−I, 0]]` on `ℂ^{2n}`.
pub fn j_matrix(n: usize) -> DMatrix<C> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = C::new(0.0, 1.0);
        j[(n + i, i)] = C::new(0.0, -1.0);
    }
    j
}

/// `M` in terms of the values `m_l` at one point.
pub fn matrix_from_values(m: &[C]) -> Result<DMatrix<C>, PastingError> {
    let n = m.len();
    if n < 2 {
        return Err(PastingError::TooFewEdges(n));
    }
    let total: C = m.iter().sum();
    if total == C::new(0.0, 0.0) {
        return Err(PastingError::VanishingSum(total));
    }
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            out[(i, j)] = if i == j { m[i] * (total - m[i]) / total } else { -m[i] * m[j] / total };
        }
        out[(i, n - 1)] = -m[i] / total;
        out[(n - 1, i)] = -m[i] / total;
    }
    out[(n - 1, n - 1)] = -C::new(1.0, 0.0) / total;
    Ok(out)
}

/// Matrix Weyl function of the pasting at `z`, `Im z ≠ 0`.
pub fn matrix_weyl(sys: &PastedSystem, z: C) -> Result<DMatrix<C>, PastingError> {
    let values = sys.values(z)?;
    matrix_from_values(&values).map_err(|e| match e {
        PastingError::VanishingSum(_) => PastingError::VanishingSum(z),
        other => other,
    })
}

/// `tr M = Σ_{l<n} m_l (m − m_l)/m − 1/m`.
pub fn trace_weyl(sys: &PastedSystem, z: C) -> Result<C, PastingError> {
    trace_from_values(&sys.values(z)?).map_err(|e| match e {
        PastingError::VanishingSum(_) => PastingError::VanishingSum(z),
        other => other,
    })
}

pub fn trace_from_values(m: &[C]) -> Result<C, PastingError> {
    let total: C = m.iter().sum();
    if total == C::new(0.0, 0.0) {
        return Err(PastingError::VanishingSum(total));
    }
    let n = m.len();
    let mut acc = -C::new(1.0, 0.0) / total;
    for mi in &m[..n - 1] {
        acc += mi * (total - mi) / total;
    }
    Ok(acc)
}

/// Closed form `(1/n)[(n − 1)² m₀ − 1/m₀]` of the trace when all `n` edges
/// share the Weyl function `m₀`.
pub fn symmetric_trace(n: usize, m0: C) -> C {
    let nf = n as f64;
    ((nf - 1.0) * (nf - 1.0) * m0 - 1.0 / m0) / nf
}

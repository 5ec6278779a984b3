//! Checks of two classical facts on concrete data: simplicity of singular
//! spectrum for two edges, and mutual singularity of the spectral measures
//! of two different boundary conditions.

use super::{find_point_spectrum, Eigenvalue, SpectraError, Unresolved};
use crate::herglotz::{mobius_exact, sin_cos, HerglotzRep};
use crate::pasting::PastedSystem;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KacReport {
    pub passed: bool,
    pub eigenvalues: Vec<Eigenvalue>,
    /// Eigenvalues with `N_A ≠ 1`.
    pub counterexamples: Vec<Eigenvalue>,
    pub unresolved: Vec<Unresolved>,
}

/// Every eigenvalue of a pasting of two edges is simple.
pub fn verify_kac(sys: &PastedSystem, window: (f64, f64)) -> Result<KacReport, SpectraError> {
    if sys.n() != 2 {
        return Err(SpectraError::EdgeCount { expected: 2, got: sys.n() });
    }
    let ps = find_point_spectrum(sys, window)?;
    let counterexamples: Vec<Eigenvalue> = ps.eigenvalues.iter().filter(|e| e.multiplicity != 1).cloned().collect();
    Ok(KacReport {
        passed: counterexamples.is_empty() && ps.unresolved.is_empty(),
        eigenvalues: ps.eigenvalues,
        counterexamples,
        unresolved: ps.unresolved,
    })
}

/// Atom sets of the measures behind `m` rotated by `alpha1` and by `alpha2`
/// are disjoint.
pub fn aronszajn_donoghue_check(m: &HerglotzRep, alpha1: f64, alpha2: f64) -> Result<bool, SpectraError> {
    if !m.is_atomic() {
        return Err(SpectraError::NotAtomic);
    }
    let (s, _) = sin_cos(alpha1 - alpha2);
    if s == 0.0 {
        return Err(SpectraError::EqualAngles(alpha1, alpha2));
    }
    let g1 = mobius_exact(m, alpha1)?;
    let g2 = mobius_exact(m, alpha2)?;
    let a2 = g2.omega();
    Ok(g1.omega().atoms().iter().all(|a| a2.atom_mass_at(a.position).is_none()))
}

//! Spectral analysis of Schrödinger operators on star graphs glued with
//! standard (Kirchhoff) interface conditions.
//!
//! The crate is layered bottom-up:
//!
//! * [`measure`] – exact arithmetic on atoms plus piecewise-polynomial densities,
//!   symmetric derivatives and Lebesgue decompositions.
//! * [`herglotz`] – Herglotz functions `a + bz + ∫(1+xz)/(x−z) dΩ(x)`, boundary
//!   limits, Stieltjes inversion and boundary-condition rotations.
//! * [`schrodinger`] – Titchmarsh–Weyl functions of edges carrying a potential.
//! * [`pasting`] – the matrix Weyl function of the Kirchhoff pasting and the
//!   multiplicity of its spectrum via the rank of `ω = dΩ/dρ`.
//! * [`spectra`] – eigenvalue enumeration, spectral classification, a
//!   finite-difference oracle and theorem checks.

pub mod herglotz;
pub mod pasting;
pub mod measure;
pub mod schrodinger;
pub mod spectra;

//! Exact arithmetic on finite positive measures made of point masses plus
//! piecewise-polynomial densities on bounded intervals.
//!
//! Positions and interval endpoints are stored as the `f64` values the caller
//! supplied and compared exactly; masses and density coefficients are exact
//! rationals, so masses of windows, sums and decompositions are computed
//! without rounding.

mod interval;
pub mod poly;
mod serde_impl;

pub use interval::{Interval, IntervalSet};
pub use poly::Poly;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use poly::{rational, to_f64};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("non-finite value {0} in measure data")]
    NonFinite(f64),
    #[error("atom mass at {position} must be positive, got {mass}")]
    NonPositiveMass { position: f64, mass: f64 },
    #[error("duplicate atom position {0}")]
    DuplicateAtom(f64),
    #[error("density interval [{lo}, {hi}] must satisfy lo < hi and be bounded")]
    BadInterval { lo: f64, hi: f64 },
    #[error("density pieces [{0}, {1}] and [{2}, {3}] overlap")]
    OverlappingPieces(f64, f64, f64, f64),
    #[error("density is negative somewhere on [{lo}, {hi}]")]
    NegativeDensity { lo: f64, hi: f64 },
    #[error("{0} is not in the support of the measure")]
    NotInSupport(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub position: f64,
    pub mass: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityPiece {
    pub lo: f64,
    pub hi: f64,
    pub density: Poly,
}

impl DensityPiece {
    pub fn mass(&self) -> BigRational {
        self.density.integrate(&rational(self.lo), &rational(self.hi))
    }
}

/// Finite positive Borel measure: sorted atoms plus non-overlapping densities.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ScalarMeasure {
    atoms: Vec<Atom>,
    pieces: Vec<DensityPiece>,
}

/// Value of a symmetric derivative `dν/dσ(x)`.
#[derive(Clone, Debug, PartialEq)]
pub enum DerivativeValue {
    Finite(BigRational),
    Infinite,
    /// Neither measure charges any neighbourhood of the point.
    Undefined,
}

impl DerivativeValue {
    pub fn is_positive(&self) -> bool {
        match self {
            DerivativeValue::Finite(q) => q.is_positive(),
            DerivativeValue::Infinite => true,
            DerivativeValue::Undefined => false,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self {
            DerivativeValue::Finite(q) => Some(to_f64(q)),
            DerivativeValue::Infinite => Some(f64::INFINITY),
            DerivativeValue::Undefined => None,
        }
    }
}

fn check_finite(x: f64) -> Result<f64, MeasureError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(MeasureError::NonFinite(x))
    }
}

impl ScalarMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a measure from `(position, mass)` atoms and
    /// `(lo, hi, coefficients)` density pieces.
    pub fn new(atoms: Vec<(f64, f64)>, pieces: Vec<(f64, f64, Vec<f64>)>) -> Result<Self, MeasureError> {
        let atoms = atoms
            .into_iter()
            .map(|(x, w)| {
                check_finite(x)?;
                check_finite(w)?;
                Ok(Atom { position: x, mass: rational(w) })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let pieces = pieces
            .into_iter()
            .map(|(lo, hi, c)| {
                for &v in &c {
                    check_finite(v)?;
                }
                Ok(DensityPiece { lo, hi, density: Poly::from_f64(&c) })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_parts(atoms, pieces)
    }

    /// Validating constructor from exact parts. Zero densities are dropped.
    pub fn from_parts(mut atoms: Vec<Atom>, mut pieces: Vec<DensityPiece>) -> Result<Self, MeasureError> {
        for a in &atoms {
            check_finite(a.position)?;
            if !a.mass.is_positive() {
                return Err(MeasureError::NonPositiveMass { position: a.position, mass: to_f64(&a.mass) });
            }
        }
        atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
        for w in atoms.windows(2) {
            if w[0].position == w[1].position {
                return Err(MeasureError::DuplicateAtom(w[0].position));
            }
        }
        pieces.retain(|p| !p.density.is_zero());
        for p in &pieces {
            if !(p.lo.is_finite() && p.hi.is_finite() && p.lo < p.hi) {
                return Err(MeasureError::BadInterval { lo: p.lo, hi: p.hi });
            }
            if !p.density.is_nonnegative_on(p.lo, p.hi) {
                return Err(MeasureError::NegativeDensity { lo: p.lo, hi: p.hi });
            }
        }
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in pieces.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(MeasureError::OverlappingPieces(w[0].lo, w[0].hi, w[1].lo, w[1].hi));
            }
        }
        Ok(Self { atoms, pieces })
    }

    pub fn atom(position: f64, mass: f64) -> Result<Self, MeasureError> {
        Self::new(vec![(position, mass)], vec![])
    }

    pub fn density(lo: f64, hi: f64, coeffs: &[f64]) -> Result<Self, MeasureError> {
        Self::new(vec![], vec![(lo, hi, coeffs.to_vec())])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.pieces.is_empty()
    }

    pub fn is_atomic(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn atom_mass_at(&self, x: f64) -> Option<&BigRational> {
        self.atoms
            .binary_search_by(|a| a.position.total_cmp(&x))
            .ok()
            .map(|i| &self.atoms[i].mass)
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms.iter().map(|a| a.mass.clone()).sum::<BigRational>()
            + self.pieces.iter().map(DensityPiece::mass).sum::<BigRational>()
    }

    /// Exact mass of a finite union of intervals and points.
    pub fn mass(&self, set: &IntervalSet) -> BigRational {
        set.parts().iter().map(|i| self.mass_interval(i)).sum()
    }

    pub fn mass_f64(&self, set: &IntervalSet) -> f64 {
        to_f64(&self.mass(set))
    }

    fn mass_interval(&self, i: &Interval) -> BigRational {
        let mut total = BigRational::zero();
        for a in &self.atoms {
            if i.contains(a.position) {
                total += &a.mass;
            }
        }
        for p in &self.pieces {
            let lo = p.lo.max(i.lo);
            let hi = p.hi.min(i.hi);
            if lo < hi {
                total += p.density.integrate(&rational(lo), &rational(hi));
            }
        }
        total
    }

    /// Sum of two measures. Atoms at identical positions are merged and
    /// densities are summed on the common refinement of their pieces.
    pub fn add(&self, other: &ScalarMeasure) -> ScalarMeasure {
        let mut atoms: Vec<Atom> = Vec::with_capacity(self.atoms.len() + other.atoms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.atoms.len() || j < other.atoms.len() {
            let ord = match (self.atoms.get(i), other.atoms.get(j)) {
                (Some(a), Some(b)) => a.position.total_cmp(&b.position),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    atoms.push(self.atoms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    atoms.push(other.atoms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    atoms.push(Atom {
                        position: self.atoms[i].position,
                        mass: &self.atoms[i].mass + &other.atoms[j].mass,
                    });
                    i += 1;
                    j += 1;
                }
            }
        }
        let pieces = if other.pieces.is_empty() {
            self.pieces.clone()
        } else if self.pieces.is_empty() {
            other.pieces.clone()
        } else {
            refine_sum(self.pieces.iter().chain(other.pieces.iter()))
        };
        ScalarMeasure { atoms, pieces }
    }

    /// Sum of many measures.
    pub fn sum<'a>(measures: impl IntoIterator<Item = &'a ScalarMeasure>) -> ScalarMeasure {
        measures.into_iter().fold(ScalarMeasure::zero(), |acc, m| acc.add(m))
    }

    /// Multiplies every mass and density by a positive rational.
    pub fn scaled(&self, factor: &BigRational) -> ScalarMeasure {
        assert!(factor.is_positive(), "scale factor must be positive");
        ScalarMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { position: a.position, mass: &a.mass * factor })
                .collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| DensityPiece { lo: p.lo, hi: p.hi, density: p.density.scale(factor) })
                .collect(),
        }
    }

    /// The measure `Δ ↦ ν(X ∩ Δ)`.
    pub fn restrict(&self, set: &IntervalSet) -> ScalarMeasure {
        let atoms = self.atoms.iter().filter(|a| set.contains(a.position)).cloned().collect();
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for i in set.parts() {
                let lo = p.lo.max(i.lo);
                let hi = p.hi.min(i.hi);
                if lo < hi {
                    pieces.push(DensityPiece { lo, hi, density: p.density.clone() });
                }
            }
        }
        ScalarMeasure { atoms, pieces }
    }

    /// `ν([x−ε, x+ε])` as a polynomial in `ε`, valid for all `ε` smaller than
    /// the distance from `x` to the nearest other atom or piece endpoint.
    pub fn local_mass_expansion(&self, x: f64) -> Poly {
        let xq = rational(x);
        let one = BigRational::from_integer(1.into());
        let minus = -one.clone();
        let mut f = match self.atom_mass_at(x) {
            Some(m) => Poly::constant(m.clone()),
            None => Poly::zero(),
        };
        for p in &self.pieces {
            if x < p.lo || x > p.hi {
                continue;
            }
            let anti = p.density.antiderivative();
            let right = anti.compose_affine(&xq, &one);
            let left = anti.compose_affine(&xq, &minus);
            let at_x = Poly::constant(anti.eval(&xq));
            let term = if p.lo < x && x < p.hi {
                right.sub(&left)
            } else if x == p.lo {
                right.sub(&at_x)
            } else {
                at_x.sub(&left)
            };
            f = f.add(&term);
        }
        f
    }

    /// Whether `x` lies in the closed support.
    pub fn in_support(&self, x: f64) -> bool {
        !self.local_mass_expansion(x).is_zero()
    }

    /// Closed intervals carrying density, in increasing order.
    pub fn density_support(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for p in &self.pieces {
            match out.last_mut() {
                Some(last) if last.1 == p.lo => last.1 = p.hi,
                _ => out.push((p.lo, p.hi)),
            }
        }
        out
    }
}

/// Sums densities of (possibly overlapping) pieces on their common refinement.
fn refine_sum<'a>(pieces: impl Iterator<Item = &'a DensityPiece> + Clone) -> Vec<DensityPiece> {
    let mut cuts: Vec<f64> = pieces.clone().flat_map(|p| [p.lo, p.hi]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mut density = Poly::zero();
        let mut covered = false;
        for p in pieces.clone() {
            if p.lo <= lo && hi <= p.hi {
                density = density.add(&p.density);
                covered = true;
            }
        }
        if covered && !density.is_zero() {
            out.push(DensityPiece { lo, hi, density });
        }
    }
    out
}

/// Symmetric derivative `dν/dσ(x)`: the limit of `ν([x−ε,x+ε]) / σ([x−ε,x+ε])`
/// where `x` is in the support of `σ`, and `∞` on `supp ν \ supp σ`.
///
/// Both window masses are polynomials in `ε` near `x`, so the limit is read off
/// from their lowest-order coefficients.
pub fn symmetric_derivative(nu: &ScalarMeasure, sigma: &ScalarMeasure, x: f64) -> DerivativeValue {
    let fn_nu = nu.local_mass_expansion(x);
    let fn_sigma = sigma.local_mass_expansion(x);
    match (fn_nu.leading_low(), fn_sigma.leading_low()) {
        (_, None) if fn_nu.is_zero() => DerivativeValue::Undefined,
        (_, None) => DerivativeValue::Infinite,
        (None, Some(_)) => DerivativeValue::Finite(BigRational::zero()),
        (Some((kn, cn)), Some((ks, cs))) => match kn.cmp(&ks) {
            Ordering::Less => DerivativeValue::Infinite,
            Ordering::Greater => DerivativeValue::Finite(BigRational::zero()),
            Ordering::Equal => DerivativeValue::Finite(cn / cs),
        },
    }
}

/// Lebesgue decomposition `ν = ν_ac + ν_s` with respect to `σ`.
///
/// Atoms of `ν` sitting on atoms of `σ`, and density of `ν` over the density
/// support of `σ`, form the absolutely continuous part; everything else is
/// singular.
pub fn lebesgue_decompose(nu: &ScalarMeasure, sigma: &ScalarMeasure) -> (ScalarMeasure, ScalarMeasure) {
    let (ac_atoms, s_atoms): (Vec<Atom>, Vec<Atom>) =
        nu.atoms.iter().cloned().partition(|a| sigma.atom_mass_at(a.position).is_some());
    let support: Vec<(f64, f64)> = sigma.density_support();
    let mut ac_pieces = Vec::new();
    let mut s_pieces = Vec::new();
    for p in &nu.pieces {
        // Cut the piece at every support boundary that falls inside it.
        let mut cuts = vec![p.lo, p.hi];
        for &(a, b) in &support {
            for c in [a, b] {
                if p.lo < c && c < p.hi {
                    cuts.push(c);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let piece = DensityPiece { lo, hi, density: p.density.clone() };
            if support.iter().any(|&(a, b)| a <= lo && hi <= b) {
                ac_pieces.push(piece);
            } else {
                s_pieces.push(piece);
            }
        }
    }
    (
        ScalarMeasure { atoms: ac_atoms, pieces: ac_pieces },
        ScalarMeasure { atoms: s_atoms, pieces: s_pieces },
    )
}

/// `r(x)`: number of measures whose symmetric derivative against their sum is
/// positive at `x`.
pub fn overlap_count(measures: &[ScalarMeasure], x: f64) -> Result<usize, MeasureError> {
    let total = ScalarMeasure::sum(measures);
    if !total.in_support(x) {
        return Err(MeasureError::NotInSupport(x));
    }
    Ok(measures.iter().filter(|m| symmetric_derivative(m, &total, x).is_positive()).count())
}

/// `ν ⊥ σ`: disjoint atom sets and density supports meeting in a null set.
pub fn mutually_singular(nu: &ScalarMeasure, sigma: &ScalarMeasure) -> bool {
    if nu.atoms.iter().any(|a| sigma.atom_mass_at(a.position).is_some()) {
        return false;
    }
    !nu.pieces
        .iter()
        .any(|p| sigma.pieces.iter().any(|q| p.lo.max(q.lo) < p.hi.min(q.hi)))
}

//! Finite-difference discretisation of the star graph, used as an oracle
//! independent of the Weyl-function machinery.
//!
//! Each edge carries a uniform grid with the vertex as node `0`. Linear
//! elements give the stiffness part, masses are lumped, and the Kirchhoff
//! condition is the natural boundary condition of the quadratic form
//! `Σ ∫ |u′|² + q|u|² + cot β_l |u_l(L_l)|²`. Eigenvalues are located by
//! Sylvester inertia counting; the graph is a tree, so eliminating every
//! edge from its outer end towards the vertex needs no fill-in.

use super::{check_window, SpectraError};
use crate::herglotz::sin_cos;
use crate::schrodinger::Edge;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdCluster {
    pub value: f64,
    pub multiplicity: usize,
    /// Discrete eigenvalues grouped into this cluster.
    pub members: Vec<f64>,
    /// Richardson estimate of the discretisation error.
    pub error_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdSpectrum {
    pub clusters: Vec<FdCluster>,
    /// Some gap between neighbouring clusters is below ten times the
    /// discretisation error.
    pub coarse_grid: bool,
}

struct EdgeGrid {
    h: f64,
    /// Diagonal of stiffness (including potential) and lumped mass for nodes
    /// `1..=last`, listed from the vertex outwards.
    diag: Vec<f64>,
    mass: Vec<f64>,
}

struct Discretisation {
    edges: Vec<EdgeGrid>,
    center_diag: f64,
    center_mass: f64,
}

impl Discretisation {
    fn new(edges: &[Edge], grid: usize) -> Self {
        let lmax = edges.iter().map(Edge::length).fold(0.0, f64::max);
        let mut center_diag = 0.0;
        let mut center_mass = 0.0;
        let mut out = Vec::with_capacity(edges.len());
        for e in edges {
            let l = e.length();
            let nodes = ((grid as f64) * l / lmax).round().max(4.0) as usize;
            let h = l / nodes as f64;
            let q = |j: usize| e.potential().eval(j as f64 * h);
            center_diag += 1.0 / h + 0.5 * h * q(0);
            center_mass += 0.5 * h;
            let (s, c) = sin_cos(e.outer_angle());
            let last = if s == 0.0 { nodes - 1 } else { nodes };
            let mut diag = Vec::with_capacity(last);
            let mut mass = Vec::with_capacity(last);
            for j in 1..=last {
                if j == nodes {
                    diag.push(1.0 / h + 0.5 * h * q(j) + c / s);
                    mass.push(0.5 * h);
                } else {
                    diag.push(2.0 / h + h * q(j));
                    mass.push(h);
                }
            }
            out.push(EdgeGrid { h, diag, mass });
        }
        Self { edges: out, center_diag, center_mass }
    }

    fn size(&self) -> usize {
        1 + self.edges.iter().map(|e| e.diag.len()).sum::<usize>()
    }

    /// Number of eigenvalues below `sigma`.
    fn count_below(&self, sigma: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let fix = |d: f64| if d == 0.0 { -tiny } else { d };
        let mut neg = 0;
        let mut center = self.center_diag - sigma * self.center_mass;
        for e in &self.edges {
            let off2 = 1.0 / (e.h * e.h);
            let mut d = f64::INFINITY;
            for j in (0..e.diag.len()).rev() {
                let a = e.diag[j] - sigma * e.mass[j];
                d = fix(if d.is_infinite() { a } else { a - off2 / d });
                if d < 0.0 {
                    neg += 1;
                }
            }
            if !e.diag.is_empty() {
                center -= off2 / d;
            }
        }
        if fix(center) < 0.0 {
            neg += 1;
        }
        neg
    }

    fn lower_bound(&self) -> f64 {
        // Gershgorin on D^{-1/2} A D^{-1/2}.
        let cm = self.center_mass;
        let mut c_off = 0.0;
        let mut lo = f64::INFINITY;
        for e in &self.edges {
            let m = &e.mass;
            let o = 1.0 / e.h;
            if let Some(&m0) = m.first() {
                c_off += o / (cm * m0).sqrt();
            }
            for j in 0..m.len() {
                let left = if j == 0 { cm } else { m[j - 1] };
                let mut r = o / (m[j] * left).sqrt();
                if j + 1 < m.len() {
                    r += o / (m[j] * m[j + 1]).sqrt();
                }
                lo = lo.min(e.diag[j] / m[j] - r);
            }
        }
        lo.min(self.center_diag / cm - c_off) - 1.0
    }

    /// The `k`-th eigenvalue (from zero) by bisection on the inertia count.
    fn eigenvalue(&self, k: usize, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn eigenvalues_in(&self, window: (f64, f64)) -> Vec<f64> {
        let (lo, hi) = window;
        let k0 = self.count_below(lo);
        let k1 = self.count_below(hi);
        (k0..k1).map(|k| self.eigenvalue(k, lo, hi)).collect()
    }

    fn lowest(&self, count: usize) -> Vec<f64> {
        let count = count.min(self.size());
        let lo = self.lower_bound();
        let mut hi = lo.abs() + 1.0;
        while self.count_below(hi) < count {
            hi *= 2.0;
        }
        (0..count).map(|k| self.eigenvalue(k, lo, hi)).collect()
    }
}

fn cluster(values: &[f64], coarse: &[f64]) -> FdSpectrum {
    let mut clusters: Vec<FdCluster> = Vec::new();
    for &v in values {
        match clusters.last_mut() {
            Some(c) if v - c.members.last().copied().unwrap_or(c.value) < 1e-6 * (1.0 + v.abs()) => c.members.push(v),
            _ => clusters.push(FdCluster { value: v, multiplicity: 0, members: vec![v], error_estimate: 0.0 }),
        }
    }
    for c in &mut clusters {
        c.multiplicity = c.members.len();
        c.value = c.members.iter().sum::<f64>() / c.members.len() as f64;
        // Second-order scheme: the coarse grid error is four times the fine one.
        let nearest = coarse.iter().copied().min_by(|a, b| (a - c.value).abs().total_cmp(&(b - c.value).abs()));
        c.error_estimate = nearest.map(|x| (x - c.value).abs() / 3.0).unwrap_or(f64::INFINITY);
    }
    let coarse_grid = clusters.windows(2).any(|w| {
        let err = w[0].error_estimate.max(w[1].error_estimate);
        w[1].value - w[0].value < 10.0 * err
    });
    FdSpectrum { clusters, coarse_grid }
}

fn validate(edges: &[Edge], grid: usize) -> Result<(), SpectraError> {
    if grid < 100 {
        return Err(SpectraError::Oracle(format!("grid {grid}")));
    }
    if edges.len() < 2 {
        return Err(SpectraError::Oracle(format!("{} edges", edges.len())));
    }
    if let Some(e) = edges.iter().find(|e| !e.is_finite()) {
        return Err(SpectraError::Oracle(format!("edge of length {}", e.length())));
    }
    Ok(())
}

/// Eigenvalues of the standard pasting of finite `edges` in `window`,
/// `grid` nodes on the longest edge, grouped into multiplicity clusters.
pub fn fd_oracle(edges: &[Edge], grid: usize, window: (f64, f64)) -> Result<FdSpectrum, SpectraError> {
    check_window(window)?;
    validate(edges, grid)?;
    let fine = Discretisation::new(edges, grid);
    let coarse = Discretisation::new(edges, grid / 2);
    let (lo, hi) = window;
    let pad = 0.05 * (hi - lo).abs() + 1e-3;
    Ok(cluster(&fine.eigenvalues_in(window), &coarse.eigenvalues_in((lo - pad, hi + pad))))
}

/// The lowest `count` discrete eigenvalues, clustered.
pub fn fd_lowest(edges: &[Edge], grid: usize, count: usize) -> Result<FdSpectrum, SpectraError> {
    validate(edges, grid)?;
    let fine = Discretisation::new(edges, grid);
    let coarse = Discretisation::new(edges, grid / 2);
    let values = fine.lowest(count);
    let reference = coarse.lowest(count + 4);
    Ok(cluster(&values, &reference))
}

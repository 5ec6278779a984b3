use super::ode::{integrate, Tolerance};
use super::{Edge, SchrodingerError};
use crate::herglotz::{reject_real, sin_cos, Herglotz, HerglotzError, HerglotzRep};
use crate::measure::ScalarMeasure;
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

/// `(u, u′)` at `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Solution {
    pub x: f64,
    pub u: C,
    pub du: C,
}

fn step_hint(z: C, span: f64) -> f64 {
    (0.25 / (1.0 + z.norm().sqrt())).min(span.abs().max(1e-300))
}

/// Integrate an edge system between two points, restarting at potential
/// breakpoints so that each leg sees a polynomial right-hand side.
fn integrate_edge<const N: usize>(
    edge: &Edge,
    z: C,
    x0: f64,
    x1: f64,
    y0: [C; N],
    rhs: impl Fn(f64, C, &[C; N]) -> [C; N],
) -> Result<[C; N], SchrodingerError> {
    let (lo, hi) = (x0.min(x1), x0.max(x1));
    let mut stops: Vec<f64> = edge.breakpoints().into_iter().filter(|&b| b > lo && b < hi).collect();
    if x1 < x0 {
        stops.reverse();
    }
    stops.push(x1);
    let mut x = x0;
    let mut y = y0;
    let tol = Tolerance::default();
    for next in stops {
        // The leg lies inside one piece (or none); pick it at the midpoint.
        let piece = edge.potential().piece_at(0.5 * (x + next));
        let q = |t: f64| piece.map_or(0.0, |p| p.eval(t));
        y = integrate(|t, y| rhs(t, C::new(q(t), 0.0) - z, y), x, next, y, tol, step_hint(z, next - x))?;
        x = next;
    }
    Ok(y)
}

fn check_range(edge: &Edge, x: f64) -> Result<(), SchrodingerError> {
    if !(x >= 0.0 && x <= edge.length()) || !x.is_finite() {
        return Err(SchrodingerError::OutOfRange { x, length: edge.length() });
    }
    Ok(())
}

/// Solution of `−u″ + q u = z u` with data `init = (u, u′)` at `x0`,
/// evaluated at `x1`.
pub fn solve_ivp(edge: &Edge, z: C, init: (C, C), x0: f64, x1: f64) -> Result<Solution, SchrodingerError> {
    check_range(edge, x0)?;
    check_range(edge, x1)?;
    let y = integrate_edge(edge, z, x0, x1, [init.0, init.1], |_, qz, y| [y[1], qz * y[0]])?;
    Ok(Solution { x: x1, u: y[0], du: y[1] })
}

/// `(u(0), u′(0), ∂_z u(0), ∂_z u′(0))` for the solution satisfying the
/// outer condition. Finite edges only.
pub fn vertex_data(edge: &Edge, z: C) -> Result<[C; 4], SchrodingerError> {
    if !edge.is_finite() {
        return Err(SchrodingerError::InfiniteEdge);
    }
    let (s, c) = sin_cos(edge.outer_angle());
    let init = [C::new(s, 0.0), C::new(-c, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)];
    integrate_edge(edge, z, edge.length(), 0.0, init, |_, qz, y| [y[1], qz * y[0], y[3], qz * y[2] - y[0]])
}

fn vertex_values(edge: &Edge, z: C) -> Result<(C, C), SchrodingerError> {
    let (s, c) = sin_cos(edge.outer_angle());
    let y = integrate_edge(edge, z, edge.length(), 0.0, [C::new(s, 0.0), C::new(-c, 0.0)], |_, qz, y| {
        [y[1], qz * y[0]]
    })?;
    Ok((y[0], y[1]))
}

/// `√z` on the branch with `Im √z > 0` off the cut `[0, ∞)`.
fn upper_sqrt(z: C) -> C {
    let r = z.sqrt();
    if r.im < 0.0 {
        -r
    } else {
        r
    }
}

/// `m(z) = u′(0)/u(0)`; `i√z` on the free half-line.
pub fn weyl_m(edge: &Edge, z: C) -> Result<C, SchrodingerError> {
    reject_real(z)?;
    if !edge.is_finite() {
        return Ok(C::new(0.0, 1.0) * upper_sqrt(z));
    }
    let (u, du) = vertex_values(edge, z)?;
    Ok(du / u)
}

/// Weyl function of an edge with the vertex condition rotated by `α`:
/// `m_α = (cos α · m − sin α)/(sin α · m + cos α)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeWeyl {
    edge: Edge,
    alpha: f64,
}

impl EdgeWeyl {
    pub fn new(edge: Edge) -> Self {
        Self { edge, alpha: 0.0 }
    }

    pub fn rotated(edge: Edge, alpha: f64) -> Self {
        Self { edge, alpha: alpha.rem_euclid(2.0 * PI) }
    }

    pub fn edge(&self) -> &Edge {
        &self.edge
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Denominator and numerator of `m_α` at the vertex, and their
    /// z-derivatives: `D = s u′ + c u`, `N = c u′ − s u`.
    fn frac(&self, z: C) -> Result<(C, C, C, C), SchrodingerError> {
        let (s, c) = sin_cos(self.alpha);
        let [u, du, v, dv] = vertex_data(&self.edge, z)?;
        Ok((s * du + c * u, c * du - s * u, s * dv + c * v, c * dv - s * v))
    }

    fn denominator_real(&self, x: f64) -> Result<f64, SchrodingerError> {
        let (s, c) = sin_cos(self.alpha);
        let (u, du) = vertex_values(&self.edge, C::new(x, 0.0))?;
        Ok((s * du + c * u).re)
    }

    fn m_free(&self, m: C) -> C {
        let (s, c) = sin_cos(self.alpha);
        (c * m - s) / (s * m + c)
    }

    /// Continuation to the real axis where the function is finite and real.
    pub fn eval_real(&self, x: f64) -> Result<Option<f64>, SchrodingerError> {
        if !self.edge.is_finite() {
            if x >= 0.0 {
                return Ok(None);
            }
            let g = self.m_free(C::new(-(-x).sqrt(), 0.0));
            return Ok(g.re.is_finite().then_some(g.re));
        }
        let (s, c) = sin_cos(self.alpha);
        let (u, du) = vertex_values(&self.edge, C::new(x, 0.0))?;
        let d = (s * du + c * u).re;
        if d == 0.0 {
            return Ok(None);
        }
        Ok(Some((c * du - s * u).re / d))
    }

    /// Derivative of [`eval_real`](Self::eval_real) on the real axis.
    pub fn derivative_real(&self, x: f64) -> Result<Option<f64>, SchrodingerError> {
        let (s, c) = sin_cos(self.alpha);
        if !self.edge.is_finite() {
            if x >= 0.0 {
                return Ok(None);
            }
            let r = (-x).sqrt();
            let den = c - s * r;
            return Ok((den != 0.0).then(|| 0.5 / r / (den * den)));
        }
        let (d, n, dd, dn) = self.frac(C::new(x, 0.0))?;
        if d.re == 0.0 {
            return Ok(None);
        }
        Ok(Some((dn.re * d.re - n.re * dd.re) / (d.re * d.re)))
    }

    /// Real support of the absolutely continuous part: `[0, ∞)` for the free
    /// half-line, nothing for finite edges.
    pub fn ac_support(&self) -> Option<(f64, f64)> {
        (!self.edge.is_finite()).then_some((0.0, f64::INFINITY))
    }

    /// Poles in `[lo, hi]`, i.e. eigenvalues of the edge with the rotated
    /// condition at the vertex.
    pub fn poles(&self, window: (f64, f64)) -> Result<Vec<f64>, SchrodingerError> {
        let (lo, hi) = window;
        if !(lo <= hi) {
            return Ok(Vec::new());
        }
        if !self.edge.is_finite() {
            let (s, c) = sin_cos(self.alpha);
            if s != 0.0 && c / s > 0.0 {
                let y = -(c / s) * (c / s);
                if lo <= y && y <= hi {
                    return Ok(vec![y]);
                }
            }
            return Ok(Vec::new());
        }
        let (s, c) = sin_cos(self.alpha);
        let (sb, cb) = sin_cos(self.edge.outer_angle());
        let robin = |s: f64, c: f64| if s == 0.0 { 0.0 } else { (c / s).abs() };
        let kappa_max = 2.0 * (robin(s, c) + robin(sb, cb)) + 2.0 / self.edge.length() + 1.0;
        scan_roots(|x| self.denominator_real(x), window, self.edge.potential_lower_bound(), kappa_max, self.edge.length())
    }

    /// Mass `Ω({p})` of the pole at `p`.
    pub fn mass_at(&self, p: f64) -> Result<f64, SchrodingerError> {
        Ok(self.residue_at(p)? / (1.0 + p * p))
    }

    /// Residue `r` in `m_α(z) ≈ r/(p − z)` near the pole `p`.
    pub fn residue_at(&self, p: f64) -> Result<f64, SchrodingerError> {
        if !self.edge.is_finite() {
            let (s, c) = sin_cos(self.alpha);
            // m = −√(−x) on the negative axis, so m′(p) = s/(2c) at the pole.
            return Ok(2.0 * c / (s * s * s));
        }
        let (_, n, dd, _) = self.frac(C::new(p, 0.0))?;
        Ok(-(n.re) / dd.re)
    }
}

impl Herglotz for EdgeWeyl {
    fn eval(&self, z: C) -> Result<C, HerglotzError> {
        reject_real(z)?;
        if !self.edge.is_finite() {
            return Ok(self.m_free(C::new(0.0, 1.0) * upper_sqrt(z)));
        }
        let (s, c) = sin_cos(self.alpha);
        let (u, du) = vertex_values(&self.edge, z).map_err(|_| HerglotzError::NonFinite(z.im))?;
        Ok((c * du - s * u) / (s * du + c * u))
    }
}

/// Real zeros of `f` in `window`, scanning in `k = √(z − q0)` above the
/// potential floor `q0` and in `κ = √(q0 − z)` (up to `kappa_max`) below it.
fn scan_roots(
    f: impl Fn(f64) -> Result<f64, SchrodingerError>,
    window: (f64, f64),
    q0: f64,
    kappa_max: f64,
    length: f64,
) -> Result<Vec<f64>, SchrodingerError> {
    let (lo, hi) = window;
    let dk = PI / (32.0 * length);
    let mut grid: Vec<f64> = Vec::new();
    // Below the floor.
    let below_lo = lo.max(q0 - kappa_max * kappa_max);
    let below_hi = hi.min(q0);
    if below_lo <= below_hi {
        let (ka, kb) = ((q0 - below_hi).sqrt(), (q0 - below_lo).sqrt());
        let n = ((kb - ka) / dk).ceil().max(1.0) as usize;
        for i in (0..=n).rev() {
            grid.push(q0 - (ka + (kb - ka) * i as f64 / n as f64).powi(2));
        }
    }
    let above_lo = lo.max(q0);
    if above_lo <= hi {
        let (ka, kb) = ((above_lo - q0).sqrt(), (hi - q0).sqrt());
        let n = ((kb - ka) / dk).ceil().max(1.0) as usize;
        for i in 0..=n {
            grid.push(q0 + (ka + (kb - ka) * i as f64 / n as f64).powi(2));
        }
    }
    for g in grid.iter_mut() {
        *g = g.clamp(lo, hi);
    }
    grid.dedup();

    let mut values = Vec::with_capacity(grid.len());
    for &x in &grid {
        values.push(f(x)?);
    }
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if i + 1 < grid.len() && values[i + 1] != 0.0 && (values[i] < 0.0) != (values[i + 1] < 0.0) {
            roots.push(illinois(&f, grid[i], grid[i + 1], values[i], values[i + 1])?);
        }
    }
    Ok(roots)
}

/// Bracketed root of a real function: regula falsi with the Illinois
/// modification, falling back to bisection when the bracket stalls.
fn illinois(
    f: &impl Fn(f64) -> Result<f64, SchrodingerError>,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
) -> Result<f64, SchrodingerError> {
    let mut side = 0i8;
    for it in 0..200 {
        let width = (b - a).abs();
        if width <= 4.0 * f64::EPSILON * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) || it % 4 == 3 {
            c = 0.5 * (a + b);
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if (fc < 0.0) == (fb < 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Poles of `m` in `window`: the Dirichlet eigenvalues at the vertex.
pub fn dirichlet_eigenvalues(edge: &Edge, window: (f64, f64)) -> Result<Vec<f64>, SchrodingerError> {
    if !edge.is_finite() {
        return Err(SchrodingerError::InfiniteEdge);
    }
    EdgeWeyl::new(edge.clone()).poles(window)
}

/// Purely atomic representation of `m` restricted to the poles in `window`
/// (with `a = b = 0`). Masses come from the residues `−u′(0)/∂_z u(0)`.
pub fn edge_to_herglotz(edge: &Edge, window: (f64, f64)) -> Result<HerglotzRep, SchrodingerError> {
    let w = EdgeWeyl::new(edge.clone());
    let mut atoms = Vec::new();
    for p in w.poles(window)? {
        atoms.push((p, w.mass_at(p)?));
    }
    let omega = ScalarMeasure::new(atoms, vec![]).map_err(HerglotzError::from)?;
    Ok(HerglotzRep::from_measure(omega))
}

/// Rotate an edge Weyl function by `α`: rotations compose additively.
pub fn boundary_transform_edge(m: &EdgeWeyl, alpha: f64) -> EdgeWeyl {
    EdgeWeyl::rotated(m.edge.clone(), m.alpha + alpha)
}

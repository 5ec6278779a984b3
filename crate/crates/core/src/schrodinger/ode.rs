//! Adaptive Dormand–Prince 5(4) integration of small complex systems.

use num_complex::Complex64;

type C = Complex64;

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const CX: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// Difference between the 5th and embedded 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rtol: 1e-13, atol: 1e-300 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("step size underflow at x = {x} (h = {h})")]
pub struct StepUnderflow {
    pub x: f64,
    pub h: f64,
}

/// Integrate `y' = f(x, y)` from `x0` to `x1` (either direction).
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[C; N]) -> [C; N],
    x0: f64,
    x1: f64,
    y0: [C; N],
    tol: Tolerance,
    h_hint: f64,
) -> Result<[C; N], StepUnderflow> {
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = h_hint.abs().min(span.abs()).max(1e-12 * span.abs()) * dir;
    let mut k1 = f(x, &y);
    loop {
        let remaining = x1 - x;
        if remaining * dir <= 0.0 {
            return Ok(y);
        }
        let last = (h.abs() >= remaining.abs()) || (remaining.abs() - h.abs()) < 1e-12 * span.abs();
        let step = if last { remaining } else { h };

        let mut k = [[C::new(0.0, 0.0); N]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s - 1][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += kj[i] * (step * a);
                    }
                }
            }
            if s == 6 {
                // Stage 7 is evaluated at the proposed solution (FSAL).
                k[6] = f(x + step, &ys);
                let mut err = 0.0f64;
                for i in 0..N {
                    let mut e = C::new(0.0, 0.0);
                    for (st, ks) in k.iter().enumerate() {
                        e += ks[i] * E[st];
                    }
                    let e = (e * step).norm();
                    let scale = tol.atol + tol.rtol * y[i].norm().max(ys[i].norm());
                    err = err.max(e / scale);
                }
                if err <= 1.0 {
                    x = if last { x1 } else { x + step };
                    y = ys;
                    k1 = k[6];
                    let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    h = step * grow;
                } else {
                    let shrink = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                    h = step * shrink;
                }
                if h.abs() < 1e-15 * (1.0 + x.abs()) {
                    return Err(StepUnderflow { x, h });
                }
                break;
            }
            k[s] = f(x + CX[s] * step, &ys);
        }
    }
}

//! Real zeros of Herglotz functions between consecutive singularities.

use super::{HerglotzError, HerglotzRep};

/// Root of an increasing function on the open interval `(lo, hi)`, assuming a
/// sign change from negative to positive. The endpoints are never evaluated,
/// so they may be poles. Iterates down to adjacent floats.
pub fn bisect_increasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut best = (f64::INFINITY, 0.5 * (lo + hi));
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            return best.1;
        }
        let v = f(mid);
        if v.abs() < best.0 {
            best = (v.abs(), mid);
        }
        if v == 0.0 {
            return mid;
        } else if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Sign of `h` approaching a gap endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum EndValue {
    Value(f64),
    MinusInf,
    PlusInf,
}

/// All solutions of `h(x) = 0` in `window` off `supp Ω`, one per gap of the
/// support at most (Herglotz functions increase strictly there).
pub fn real_zeros(h: &HerglotzRep, window: (f64, f64)) -> Result<Vec<f64>, HerglotzError> {
    let (wl, wr) = window;
    if !(wl.is_finite() && wr.is_finite()) {
        return Err(HerglotzError::NonFinite(if wl.is_finite() { wr } else { wl }));
    }
    if wl > wr {
        return Ok(Vec::new());
    }
    if h.is_constant() {
        return if h.a() == 0.0 { Err(HerglotzError::IdenticallyZero) } else { Ok(Vec::new()) };
    }
    let features = h.support_features();
    // Gaps are (prev.hi, next.lo) between consecutive features.
    let mut gaps: Vec<((f64, Option<bool>), (f64, Option<bool>))> = Vec::new();
    let mut left = (f64::NEG_INFINITY, None);
    for &(lo, hi) in &features {
        gaps.push((left, (lo, Some(lo == hi))));
        left = (hi, Some(lo == hi));
    }
    gaps.push((left, (f64::INFINITY, None)));

    let eval = |x: f64| h.eval_real(x);
    let mut roots = Vec::new();
    for ((a, a_atom), (b, b_atom)) in gaps {
        let lo = a.max(wl);
        let hi = b.min(wr);
        if lo > hi || (lo == hi && (lo == a || lo == b)) {
            continue;
        }
        let left_val = if lo == a {
            match a_atom {
                Some(true) => EndValue::MinusInf,
                _ => near_edge(&eval, a, b, true),
            }
        } else {
            EndValue::Value(eval(lo).expect("window end lies in a gap"))
        };
        let right_val = if hi == b {
            match b_atom {
                Some(true) => EndValue::PlusInf,
                _ => near_edge(&eval, a, b, false),
            }
        } else {
            EndValue::Value(eval(hi).expect("window end lies in a gap"))
        };
        if let Some(r) = root_in_gap(&|x| eval(x).unwrap_or(f64::NAN), lo, hi, left_val, right_val) {
            roots.push(r);
        }
    }
    Ok(roots)
}

/// Value just inside a gap next to a density edge.
fn near_edge(eval: &impl Fn(f64) -> Option<f64>, a: f64, b: f64, at_left: bool) -> EndValue {
    let (edge, other) = if at_left { (a, b) } else { (b, a) };
    let width = if other.is_finite() { (other - edge).abs() } else { 1.0 + edge.abs() };
    let step = (1e-12 * (1.0 + edge.abs())).min(0.25 * width);
    let x = if at_left { edge + step } else { edge - step };
    eval(x).map(EndValue::Value).unwrap_or(if at_left { EndValue::MinusInf } else { EndValue::PlusInf })
}

pub(crate) fn root_in_gap(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, lv: EndValue, rv: EndValue) -> Option<f64> {
    let neg = |v: EndValue| matches!(v, EndValue::MinusInf) || matches!(v, EndValue::Value(x) if x < 0.0);
    let pos = |v: EndValue| matches!(v, EndValue::PlusInf) || matches!(v, EndValue::Value(x) if x > 0.0);
    // A vanishing limit at ±∞ is not a root.
    if lv == EndValue::Value(0.0) {
        return lo.is_finite().then_some(lo);
    }
    if rv == EndValue::Value(0.0) {
        return hi.is_finite().then_some(hi);
    }
    if !(neg(lv) && pos(rv)) {
        return None;
    }
    let (mut a, mut b) = (lo, hi);
    if !a.is_finite() && !b.is_finite() {
        // Anchor the two-sided search at a point with known sign.
        let mid = if f(0.0) < 0.0 { 0.0 } else { -1.0 };
        if f(mid) < 0.0 {
            a = mid;
        } else {
            b = 0.0;
            let mut step = 1.0;
            a = -step;
            while f(a) >= 0.0 {
                step *= 2.0;
                a = -step;
                if !a.is_finite() {
                    return None;
                }
            }
        }
    }
    // Unbounded sides: walk outwards until the sign is right.
    if !a.is_finite() {
        let mut step = 1.0 + b.abs();
        a = b - step;
        while f(a) >= 0.0 {
            step *= 2.0;
            a = b - step;
            if !a.is_finite() {
                return None;
            }
        }
    }
    if !b.is_finite() {
        let mut step = 1.0 + a.abs();
        b = a + step;
        while f(b) <= 0.0 {
            step *= 2.0;
            b = a + step;
            if !b.is_finite() {
                return None;
            }
        }
    }
    Some(bisect_increasing(f, a, b))
}

//! Finite unions of real intervals and points.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "yes")]
    pub lo_closed: bool,
    #[serde(default = "yes")]
    pub hi_closed: bool,
}

fn yes() -> bool {
    true
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub fn point(x: f64) -> Self {
        Self::closed(x, x)
    }

    /// The whole real line.
    pub fn everything() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn length(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }
}

/// Disjoint, sorted union of intervals. Construction merges overlaps so that
/// no point is counted twice.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn new(mut parts: Vec<Interval>) -> Self {
        parts.retain(|p| !p.is_empty());
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(cur) if p.lo < cur.hi || (p.lo == cur.hi && (cur.hi_closed || p.lo_closed)) => {
                    if p.lo == cur.lo {
                        cur.lo_closed |= p.lo_closed;
                    }
                    if p.hi > cur.hi {
                        cur.hi = p.hi;
                        cur.hi_closed = p.hi_closed;
                    } else if p.hi == cur.hi {
                        cur.hi_closed |= p.hi_closed;
                    }
                }
                _ => merged.push(p),
            }
        }
        Self { parts: merged }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }
}

impl From<Interval> for IntervalSet {
    fn from(i: Interval) -> Self {
        IntervalSet::new(vec![i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_overlaps_and_touching_closed() {
        let s = IntervalSet::new(vec![
            Interval::closed(0.0, 1.0),
            Interval::closed(0.5, 2.0),
            Interval::open(2.0, 3.0),
            Interval::point(5.0),
        ]);
        assert_eq!(s.parts().len(), 2);
        assert_eq!(s.parts()[0].hi, 3.0);
        assert!(s.contains(2.0));
        assert!(!s.contains(3.0));
        assert!(s.contains(5.0));
    }

    #[test]
    fn open_open_touch_keeps_gap() {
        let s = IntervalSet::new(vec![Interval::open(0.0, 1.0), Interval::open(1.0, 2.0)]);
        assert_eq!(s.parts().len(), 2);
        assert!(!s.contains(1.0));
    }
}

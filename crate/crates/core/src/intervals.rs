//! Finite unions of disjoint open intervals with exact Lebesgue measure.
//!
//! Set operations are up to null sets, except that a shared endpoint of two
//! adjacent intervals stays excluded unless some interval of the union
//! actually covers it. This keeps punctured sets like `(-2,0) ∪ (0,2)`
//! faithful under union and intersection.

use serde::{Deserialize, Serialize};

/// A sorted list of pairwise disjoint open intervals `(a_k, b_k)` with
/// `a_k < b_k <= a_{k+1}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Single open interval; empty when `a >= b`.
    pub fn interval(a: f64, b: f64) -> Self {
        if a < b {
            Self {
                intervals: vec![(a, b)],
            }
        } else {
            Self::empty()
        }
    }

    /// Build from arbitrary open intervals, merging genuine overlaps and
    /// keeping touching endpoints separate.
    pub fn from_intervals(mut raw: Vec<(f64, f64)>) -> Self {
        raw.retain(|&(a, b)| a < b);
        raw.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match out.last_mut() {
                // merge only on positive overlap: a touching endpoint is a
                // genuine exclusion
                Some(&mut (_, ref mut hi)) if a < *hi => {
                    if b > *hi {
                        *hi = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        Self { intervals: out }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    /// Open-set membership (exact endpoints excluded).
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a < x && x < b)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut raw = self.intervals.clone();
        raw.extend_from_slice(&other.intervals);
        Self::from_intervals(raw)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            for &(c, d) in &other.intervals {
                if d <= a {
                    continue;
                }
                if c >= b {
                    break;
                }
                let lo = a.max(c);
                let hi = b.min(d);
                if lo < hi {
                    out.push((lo, hi));
                }
            }
        }
        Self { intervals: out }
    }

    /// Set difference up to null sets: removed endpoints become interval
    /// boundaries, so `(-2.5, 2.5) ∖ ((-2,0) ∪ (0,2))` is
    /// `(-2.5, -2) ∪ (2, 2.5)` with the null pieces dropped from the measure.
    pub fn subtract(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            let mut lo = a;
            for &(c, d) in &other.intervals {
                if d <= lo {
                    continue;
                }
                if c >= b {
                    break;
                }
                if c > lo {
                    out.push((lo, c));
                }
                lo = lo.max(d);
                if lo >= b {
                    break;
                }
            }
            if lo < b {
                out.push((lo, b));
            }
        }
        Self::from_intervals(out)
    }

    /// Intersection with the open interval `(lo, hi)`.
    pub fn restrict(&self, lo: f64, hi: f64) -> IntervalSet {
        self.intersect(&Self::interval(lo, hi))
    }

    /// Is `self` a subset of `other` up to null sets, tolerating uncovered
    /// slivers of length at most `slack`?
    pub fn subset_of(&self, other: &IntervalSet, slack: f64) -> bool {
        self.subtract(other)
            .intervals
            .iter()
            .all(|&(a, b)| b - a <= slack)
    }
}

//! Exact k-center queries on the line over a sorted array.
//!
//! Two query algorithms share the array. The large-k one binary searches the
//! end of the first interval with a greedy decider and recurses on the rest;
//! the small-k one tries the `k-1` points splitting the range into equal
//! parts and recurses on both sides.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{RcqError, Result};
use crate::geometry::PointSet;

#[derive(Clone, Debug)]
pub struct SortedArray1D {
    coords: Vec<u64>,
    ids: Vec<usize>,
}

/// Closed intervals of one common length covering the range.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IntervalSolution {
    pub length: u64,
    pub intervals: Vec<(u64, u64)>,
    pub members: Vec<Vec<usize>>,
}

/// Work counters of one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Probes {
    /// Array probes made by decider calls.
    pub decider_probes: usize,
    /// Largest probe count of a single decider call.
    pub max_decider_probes: usize,
    pub decider_calls: usize,
    /// Calls of the small-k recursion, counting every subproblem.
    pub subproblems: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm1D {
    LargeK,
    SmallK,
}

impl SortedArray1D {
    pub fn build(points: &PointSet) -> Result<Self> {
        if points.dim() != 1 {
            return Err(RcqError::DimensionMismatch {
                expected: 1,
                got: points.dim(),
            });
        }
        let mut order: Vec<usize> = points.ids().collect();
        order.sort_by_key(|&i| (points.coord(i, 0), i));
        Ok(SortedArray1D {
            coords: order.iter().map(|&i| points.coord(i, 0)).collect(),
            ids: order,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// Index range `[a, b]` of the points in `[lo, hi]`, `None` when empty.
    pub fn shrink(&self, lo: u64, hi: u64) -> Option<(usize, usize)> {
        if lo > hi {
            return None;
        }
        let a = self.coords.partition_point(|&c| c < lo);
        let b = self.coords.partition_point(|&c| c <= hi);
        (a < b).then(|| (a, b - 1))
    }

    /// The shrunk query `[successor(lo), predecessor(hi)]` as coordinates.
    pub fn shrink_interval(&self, lo: u64, hi: u64) -> Option<(u64, u64)> {
        self.shrink(lo, hi).map(|(a, b)| (self.coords[a], self.coords[b]))
    }

    /// Whether points `a..=b` fit in `ell` intervals of length `len`, by
    /// greedy covering with binary-searched jumps.
    pub fn decider(&self, a: usize, b: usize, ell: usize, len: u64, probes: &mut Probes) -> bool {
        let mut used = 0;
        let mut start = a;
        let mut result = false;
        for _ in 0..ell {
            let reach = self.coords[start].saturating_add(len);
            used += 1;
            if self.coords[b] <= reach {
                result = true;
                break;
            }
            // First index in (start, b] beyond reach.
            let (mut lo, mut hi) = (start + 1, b);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                used += 1;
                if self.coords[mid] > reach {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            start = lo;
        }
        probes.decider_calls += 1;
        probes.decider_probes += used;
        probes.max_decider_probes = probes.max_decider_probes.max(used);
        result
    }

    /// Optimal common length for points `a..=b`, binary searching the end
    /// of the first interval and recursing on the remainder.
    pub fn opt_large_k(&self, a: usize, b: usize, k: usize, probes: &mut Probes) -> u64 {
        let x = self.coords[a];
        if k <= 1 {
            return self.coords[b] - x;
        }
        // Smallest i* with a yes at length p[i*] - x; i* = b always works.
        let (mut lo, mut hi) = (a, b);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.decider(a, b, k, self.coords[mid] - x, probes) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let star = lo;
        let upper = self.coords[star] - x;
        if star == a {
            return upper;
        }
        let below = self.coords[star - 1] - x;
        let rest = self.opt_large_k(star, b, k - 1, probes);
        upper.min(below.max(rest))
    }

    /// Optimal common length for points `a..=b` by the equal-split recursion.
    pub fn opt_small_k(
        &self,
        a: usize,
        b: usize,
        k: usize,
        probes: &mut Probes,
        memo: Option<&mut HashMap<(usize, usize, usize), u64>>,
    ) -> u64 {
        let mut memo = memo;
        self.small_rec(a, b, k.max(1), probes, &mut memo)
    }

    fn small_rec(
        &self,
        a: usize,
        b: usize,
        k: usize,
        probes: &mut Probes,
        memo: &mut Option<&mut HashMap<(usize, usize, usize), u64>>,
    ) -> u64 {
        if let Some(m) = memo.as_deref() {
            if let Some(&v) = m.get(&(a, b, k)) {
                return v;
            }
        }
        probes.subproblems += 1;
        let (x, x2) = (self.coords[a], self.coords[b]);
        let best = if k == 1 {
            x2 - x
        } else {
            let span = (x2 - x) as u128;
            let kk = k as u128;
            let mut best = u64::MAX;
            for i in 1..k {
                // Split point s = x + i·span/k, compared exactly as k(p-x) vs i·span.
                let target = i as u128 * span;
                let within = &self.coords[a..=b];
                let left_end = a + within.partition_point(|&p| kk * (p - x) as u128 <= target) - 1;
                let right_start = a + within.partition_point(|&p| kk * ((p - x) as u128) < target);
                let l = self.small_rec(a, left_end, i, probes, memo);
                let r = self.small_rec(right_start, b, k - i, probes, memo);
                best = best.min(l.max(r));
            }
            best
        };
        if let Some(m) = memo.as_deref_mut() {
            m.insert((a, b, k), best);
        }
        best
    }

    /// Greedy intervals of length `len` over points `a..=b`.
    pub fn intervals_for(&self, a: usize, b: usize, len: u64) -> IntervalSolution {
        let mut sol = IntervalSolution {
            length: len,
            ..Default::default()
        };
        let mut i = a;
        while i <= b {
            let start = self.coords[i];
            let end = start + len;
            let mut members = Vec::new();
            while i <= b && self.coords[i] <= end {
                members.push(self.ids[i]);
                i += 1;
            }
            members.sort_unstable();
            sol.intervals.push((start, end));
            sol.members.push(members);
        }
        sol
    }

    /// Picks the small-k recursion when `3^k < k²·log n`.
    pub fn choose(&self, k: usize) -> Algorithm1D {
        let log_n = (self.len().max(2) as f64).log2();
        let k_f = k as f64;
        if 3f64.powf(k_f) * log_n < k_f * k_f * log_n * log_n {
            Algorithm1D::SmallK
        } else {
            Algorithm1D::LargeK
        }
    }

    pub fn kcenter_query_largek(&self, lo: u64, hi: u64, k: usize) -> (IntervalSolution, Probes) {
        let mut probes = Probes::default();
        let sol = match self.shrink(lo, hi) {
            None => IntervalSolution::default(),
            Some((a, b)) => {
                let len = self.opt_large_k(a, b, k, &mut probes);
                self.intervals_for(a, b, len)
            }
        };
        (sol, probes)
    }

    pub fn kcenter_query_smallk(&self, lo: u64, hi: u64, k: usize, memoize: bool) -> (IntervalSolution, Probes) {
        let mut probes = Probes::default();
        let sol = match self.shrink(lo, hi) {
            None => IntervalSolution::default(),
            Some((a, b)) => {
                let mut memo = HashMap::new();
                let len = self.opt_small_k(a, b, k, &mut probes, memoize.then_some(&mut memo));
                self.intervals_for(a, b, len)
            }
        };
        (sol, probes)
    }

    /// Exact k-center of the points in `[lo, hi]` with the cheaper algorithm.
    pub fn kcenter_query_1d(&self, lo: u64, hi: u64, k: usize) -> Result<(IntervalSolution, Algorithm1D)> {
        if k == 0 {
            return Err(RcqError::invalid("k must be positive"));
        }
        let algo = self.choose(k);
        let sol = match algo {
            Algorithm1D::SmallK => self.kcenter_query_smallk(lo, hi, k, false).0,
            Algorithm1D::LargeK => self.kcenter_query_largek(lo, hi, k).0,
        };
        Ok((sol, algo))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn array(xs: &[u64]) -> SortedArray1D {
        let pts: Vec<Vec<u64>> = xs.iter().map(|&x| vec![x]).collect();
        SortedArray1D::build(&PointSet::from_points(1, 16, &pts).unwrap()).unwrap()
    }

    /// Minimum common length by trying every candidate with a linear greedy.
    fn reference(xs: &[u64], k: usize) -> u64 {
        let mut s = xs.to_vec();
        s.sort_unstable();
        let fits = |len: u64| {
            let mut used = 0;
            let mut i = 0;
            while i < s.len() {
                used += 1;
                let end = s[i] + len;
                while i < s.len() && s[i] <= end {
                    i += 1;
                }
            }
            used <= k
        };
        let mut cands: Vec<u64> = s.iter().flat_map(|&a| s.iter().filter(move |&&b| b >= a).map(move |&b| b - a)).collect();
        cands.sort_unstable();
        cands.into_iter().find(|&l| fits(l)).unwrap_or(0)
    }

    #[test]
    fn shrink_examples() {
        let a = array(&[1, 5, 9]);
        assert_eq!(a.shrink_interval(0, 10), Some((1, 9)));
        assert_eq!(a.shrink_interval(2, 4), None);
    }

    #[test]
    fn decider_examples() {
        let a = array(&(0..10).collect::<Vec<_>>());
        let mut p = Probes::default();
        assert!(a.decider(0, 9, 2, 4, &mut p));
        assert!(!a.decider(0, 9, 2, 3, &mut p));
        assert!(a.decider(0, 9, 10, 0, &mut p));
        assert!(a.decider(0, 9, 1, 9, &mut p));
        assert!(!a.decider(0, 9, 1, 8, &mut p));
    }

    #[test]
    fn query_examples() {
        let a = array(&[0, 1, 5, 6]);
        assert_eq!(a.kcenter_query_largek(0, 10, 2).0.length, 1);
        assert_eq!(a.kcenter_query_smallk(0, 10, 2, false).0.length, 1);
        assert_eq!(a.kcenter_query_largek(0, 10, 4).0.length, 0);
        assert_eq!(a.kcenter_query_smallk(0, 10, 5, true).0.length, 0);
        let big = array(&(0..1024).collect::<Vec<_>>());
        assert_eq!(big.choose(2), Algorithm1D::SmallK);
        assert_eq!(big.choose(20), Algorithm1D::LargeK);
        let sol = a.kcenter_query_1d(0, 10, 2).unwrap().0;
        assert_eq!(sol.intervals, vec![(0, 1), (5, 6)]);
        assert_eq!(sol.members, vec![vec![0, 1], vec![2, 3]]);
    }

    proptest! {
        #[test]
        fn both_algorithms_match_reference(
            xs in proptest::collection::vec(0u64..200, 1..40),
            k in 1usize..7,
        ) {
            let a = array(&xs);
            let want = reference(&xs, k);
            let (large, lp) = a.kcenter_query_largek(0, 1000, k);
            let (small, sp) = a.kcenter_query_smallk(0, 1000, k, false);
            let (memo, _) = a.kcenter_query_smallk(0, 1000, k, true);
            prop_assert_eq!(large.length, want);
            prop_assert_eq!(small.length, want);
            prop_assert_eq!(memo.length, want);
            prop_assert!(sp.subproblems <= 3usize.pow(k as u32 - 1));
            let log = (a.len() as f64).log2().ceil() as usize;
            prop_assert!(lp.max_decider_probes <= k * (log + 2));
            prop_assert!(large.intervals.len() <= k);
        }

        #[test]
        fn decider_is_monotone(xs in proptest::collection::vec(0u64..100, 1..30), ell in 1usize..5, len in 0u64..50) {
            let a = array(&xs);
            let b = a.len() - 1;
            let mut p = Probes::default();
            if a.decider(0, b, ell, len, &mut p) {
                prop_assert!(a.decider(0, b, ell + 1, len, &mut p));
                prop_assert!(a.decider(0, b, ell, len + 1, &mut p));
            }
        }
    }
}

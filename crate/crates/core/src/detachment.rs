//! The detachment set `D = {u* > |u|}` read off a sampled profile, and its
//! split into components that contain a step-function breakpoint and those
//! that sit inside a single gap between breakpoints.

use std::collections::BTreeMap;

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcmodel::{PiecewiseLinearFn, StepFunction};
use crate::scalespace::MaximalProfile;

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(Error::InvalidGrid(format!("empty interval ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn within(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Length of the intersection with `[a, b]`.
    pub fn length_within(&self, a: f64, b: f64) -> f64 {
        (self.hi.min(b) - self.lo.max(a)).max(0.0)
    }
}

fn endpoint<Q: SerializeSeq>(x: f64, s: &mut Q) -> std::result::Result<(), Q::Error> {
    if x == f64::INFINITY {
        s.serialize_element("inf")
    } else if x == f64::NEG_INFINITY {
        s.serialize_element("-inf")
    } else {
        s.serialize_element(&x)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        endpoint(self.lo, &mut seq)?;
        endpoint(self.hi, &mut seq)?;
        seq.end()
    }
}

/// Sorted, pairwise disjoint open intervals.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(mut intervals: Vec<Interval>) -> Result<Self> {
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        if intervals.windows(2).any(|w| w[0].hi > w[1].lo) {
            return Err(Error::InvalidGrid("intervals overlap".into()));
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.intervals.iter()
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.intervals.partition_point(|iv| iv.hi <= x);
        i < self.intervals.len() && self.intervals[i].contains(x)
    }

    /// Every interval of `self` lies inside some interval of `other`.
    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals.iter().all(|iv| other.intervals.iter().any(|o| iv.within(o)))
    }

    pub fn measure_within(&self, a: f64, b: f64) -> f64 {
        self.intervals.iter().map(|iv| iv.length_within(a, b)).sum()
    }
}

/// Maximal runs of grid samples with `ustar - |u| > delta`. Run ends are
/// placed at the linear-interpolation crossing of the threshold; a run that
/// reaches the end of the grid becomes an unbounded ray.
pub fn detachment_set(profile: &MaximalProfile, u: &PiecewiseLinearFn, delta: f64) -> Result<IntervalSet> {
    if !(delta > profile.err) {
        return Err(Error::ThresholdTooSmall { delta, err: profile.err });
    }
    let g: Vec<f64> = profile.gap(u).into_iter().map(|d| d - delta).collect();
    let x = &profile.grid;
    let n = g.len();
    let crossing = |i: usize| x[i] + (x[i + 1] - x[i]) * g[i] / (g[i] - g[i + 1]);
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if g[i] <= 0.0 {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && g[i + 1] > 0.0 {
            i += 1;
        }
        let lo = if start == 0 { f64::NEG_INFINITY } else { crossing(start - 1) };
        let hi = if i == n - 1 { f64::INFINITY } else { crossing(i) };
        out.push(Interval { lo, hi });
        i += 1;
    }
    Ok(IntervalSet { intervals: out })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetachmentDecomposition {
    /// Components containing at least one breakpoint.
    pub d1: IntervalSet,
    /// Components inside the gap `(a_i, a_{i+1})`, keyed by `i` with
    /// `a_0 = -inf` and `a_{N+2} = +inf`.
    #[serde(serialize_with = "string_keys")]
    pub d2: BTreeMap<usize, IntervalSet>,
    #[serde(skip)]
    pub breakpoints: Vec<f64>,
}

fn string_keys<S: Serializer>(m: &BTreeMap<usize, IntervalSet>, s: S) -> std::result::Result<S::Ok, S::Error> {
    // numeric order, not lexicographic
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(&k.to_string(), v)?;
    }
    map.end()
}

impl DetachmentDecomposition {
    pub fn d2_intervals(&self) -> impl Iterator<Item = (usize, &Interval)> {
        self.d2.iter().flat_map(|(k, set)| set.iter().map(move |iv| (*k, iv)))
    }

    /// All components in left-to-right order.
    pub fn all(&self) -> Vec<Interval> {
        let mut v: Vec<Interval> = self.d1.iter().copied().chain(self.d2_intervals().map(|(_, iv)| *iv)).collect();
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        v
    }
}

pub fn decompose(d: &IntervalSet, v: &StepFunction) -> DetachmentDecomposition {
    let a = v.breakpoints();
    let mut d1 = Vec::new();
    let mut d2: BTreeMap<usize, Vec<Interval>> = (0..=a.len()).map(|k| (k, Vec::new())).collect();
    for iv in d.iter() {
        if a.iter().any(|&p| iv.contains(p)) {
            d1.push(*iv);
        } else {
            let k = a.partition_point(|&p| p <= iv.lo);
            d2.get_mut(&k).expect("gap index in range").push(*iv);
        }
    }
    DetachmentDecomposition {
        d1: IntervalSet { intervals: d1 },
        d2: d2.into_iter().map(|(k, ivs)| (k, IntervalSet { intervals: ivs })).collect(),
        breakpoints: a.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use crate::scalespace::{maximal_profile, Grid};

    fn tent() -> PiecewiseLinearFn {
        PiecewiseLinearFn::tent(0.0, 1.0, 1.0).unwrap()
    }

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn zero_function_has_no_detachment() {
        let z = PiecewiseLinearFn::zero();
        let p = maximal_profile(&z, &KernelSpec::poisson(), &Grid::symmetric(3.0, 31).unwrap(), 1e-7).unwrap();
        assert!(detachment_set(&p, &z, 1e-6).unwrap().is_empty());
        assert!(matches!(detachment_set(&p, &z, 1e-7), Err(Error::ThresholdTooSmall { .. })));
    }

    #[test]
    fn tent_detaches_outside_support() {
        let p = maximal_profile(&tent(), &KernelSpec::poisson(), &Grid::symmetric(6.0, 121).unwrap(), 1e-7).unwrap();
        let d = detachment_set(&p, &tent(), 1e-6).unwrap();
        for x in [-5.0, -2.0, -1.0, 1.0, 1.5, 5.9] {
            assert!(d.contains(x), "{x} not detached: {d:?}");
        }
        assert!(d.intervals()[0].lo == f64::NEG_INFINITY);
        assert!(d.intervals().last().unwrap().hi == f64::INFINITY);
        let big = p.gap(&tent()).iter().cloned().fold(0.0, f64::max) + 1.0;
        assert!(detachment_set(&p, &tent(), big).unwrap().is_empty());
    }

    #[test]
    fn threshold_monotonicity() {
        let u = PiecewiseLinearFn::sawtooth(-2.0, 4, 1.0, 1.0, 0.2).unwrap();
        let p = maximal_profile(&u, &KernelSpec::heat(), &Grid::symmetric(5.0, 201).unwrap(), 1e-7).unwrap();
        let mut prev = detachment_set(&p, &u, 1e-6).unwrap();
        for delta in [1e-4, 1e-3, 1e-2, 5e-2] {
            let next = detachment_set(&p, &u, delta).unwrap();
            assert!(next.is_subset_of(&prev), "delta {delta}");
            prev = next;
        }
    }

    #[test]
    fn decomposition_by_definition() {
        let v = StepFunction::new(vec![0.0, 1.0, 2.0], vec![1.0, -1.0]).unwrap();
        let empty = decompose(&IntervalSet::empty(), &v);
        assert!(empty.d1.is_empty() && empty.d2.values().all(|s| s.is_empty()));
        assert_eq!(empty.d2.len(), 4);

        let one = decompose(&IntervalSet::new(vec![iv(-1.0, 1.0)]).unwrap(), &v);
        assert_eq!(one.d1.len(), 1);
        assert!(one.d2.values().all(|s| s.is_empty()));

        let d = IntervalSet::new(vec![iv(0.1, 0.9), iv(0.95, 1.05), iv(f64::NEG_INFINITY, -0.5), iv(2.0, f64::INFINITY)])
            .unwrap();
        let dec = decompose(&d, &v);
        assert_eq!(dec.d1.intervals(), &[iv(0.95, 1.05)]);
        assert_eq!(dec.d2[&1].intervals(), &[iv(0.1, 0.9)]);
        assert_eq!(dec.d2[&0].len(), 1);
        assert_eq!(dec.d2[&3].len(), 1);
        assert_eq!(dec.all().len(), d.len());
        let total: f64 = dec.all().iter().map(|i| i.length_within(-10.0, 10.0)).sum();
        assert_eq!(total, d.measure_within(-10.0, 10.0));
    }

    #[test]
    fn json_shape() {
        let v = StepFunction::new(vec![0.0, 1.0], vec![1.0]).unwrap();
        let d = IntervalSet::new(vec![iv(f64::NEG_INFINITY, -1.0), iv(0.5, 1.5)]).unwrap();
        let s = serde_json::to_string(&decompose(&d, &v)).unwrap();
        assert_eq!(s, r#"{"d1":[[0.5,1.5]],"d2":{"0":[["-inf",-1.0]],"1":[],"2":[]}}"#);
    }
}

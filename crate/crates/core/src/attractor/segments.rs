use crate::rigor::round::{add_down, add_up, sub_down, sub_up};
use crate::rigor::IInterval;

/// A finite union of closed segments with float endpoints, kept sorted and
/// pairwise disjoint. Sets are compared modulo endpoints (measure zero).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SegmentSet {
    segments: Vec<IInterval>,
}

impl SegmentSet {
    pub fn new() -> Self {
        SegmentSet::default()
    }

    /// Union of arbitrary segments: sorts and merges overlapping or touching ones.
    pub fn from_segments(segs: impl IntoIterator<Item = IInterval>) -> Self {
        let mut v: Vec<IInterval> = segs.into_iter().filter(|s| s.width() > 0.0).collect();
        v.sort_by(|a, b| a.lo().total_cmp(&b.lo()).then(a.hi().total_cmp(&b.hi())));
        let mut out: Vec<IInterval> = Vec::with_capacity(v.len());
        for s in v {
            match out.last_mut() {
                Some(last) if s.lo() <= last.hi() => {
                    if s.hi() > last.hi() {
                        *last = IInterval::raw(last.lo(), s.hi());
                    }
                }
                _ => out.push(s),
            }
        }
        SegmentSet { segments: out }
    }

    pub fn segments(&self) -> &[IInterval] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn union(&self, other: &SegmentSet) -> SegmentSet {
        SegmentSet::from_segments(self.segments.iter().chain(other.segments.iter()).copied())
    }

    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a SegmentSet>) -> SegmentSet {
        SegmentSet::from_segments(sets.into_iter().flat_map(|s| s.segments.iter().copied()))
    }

    /// Lower bound of the Lebesgue measure.
    pub fn measure_lo(&self) -> f64 {
        self.segments.iter().fold(0.0, |acc, s| add_down(acc, sub_down(s.hi(), s.lo())))
    }

    /// Upper bound of the Lebesgue measure.
    pub fn measure_hi(&self) -> f64 {
        self.segments.iter().fold(0.0, |acc, s| add_up(acc, sub_up(s.hi(), s.lo())))
    }

    pub fn intersect_interval(&self, x: &IInterval) -> SegmentSet {
        SegmentSet { segments: self.segments.iter().filter_map(|s| s.intersect(x)).filter(|s| s.width() > 0.0).collect() }
    }

    /// Removes the interior of `x`.
    pub fn subtract_interval(&self, x: &IInterval) -> SegmentSet {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        for s in &self.segments {
            if s.hi() <= x.lo() || s.lo() >= x.hi() {
                out.push(*s);
                continue;
            }
            if s.lo() < x.lo() {
                out.push(IInterval::raw(s.lo(), x.lo()));
            }
            if s.hi() > x.hi() {
                out.push(IInterval::raw(x.hi(), s.hi()));
            }
        }
        SegmentSet { segments: out }
    }

    /// `x` lies inside a single segment.
    pub fn covers(&self, x: &IInterval) -> bool {
        let k = self.segments.partition_point(|s| s.hi() < x.hi());
        self.segments.get(k).is_some_and(|s| s.contains_interval(x))
    }
}

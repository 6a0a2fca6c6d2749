use std::ops::Range;

use crate::error::{DecodeError, Error, Result};

/// A non-empty set of 0-based token indices, stored as sorted, disjoint,
/// non-adjacent half-open ranges.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IndexSet {
    ranges: Vec<Range<usize>>,
}

impl IndexSet {
    /// Every index in `0..n`.
    pub fn full(n: usize) -> Result<Self> {
        Self::from_range(0..n)
    }

    /// A single half-open range.
    pub fn from_range(range: Range<usize>) -> Result<Self> {
        Self::from_ranges(std::iter::once(range))
    }

    /// Build from arbitrary ranges, merging overlaps and neighbours. Empty
    /// ranges are ignored.
    pub fn from_ranges<I>(ranges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Range<usize>>,
    {
        let mut rs: Vec<Range<usize>> = ranges.into_iter().filter(|r| r.start < r.end).collect();
        if rs.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        rs.sort_by_key(|r| r.start);
        let mut merged: Vec<Range<usize>> = Vec::with_capacity(rs.len());
        for r in rs {
            match merged.last_mut() {
                Some(last) if r.start <= last.end => last.end = last.end.max(r.end),
                _ => merged.push(r),
            }
        }
        Ok(IndexSet { ranges: merged })
    }

    pub fn from_indices<I>(indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        Self::from_ranges(indices.into_iter().map(|i| i..i + 1))
    }

    /// Accept ranges only if they are already in canonical form.
    pub fn from_canonical(ranges: Vec<Range<usize>>) -> Result<Self, DecodeError> {
        if ranges.is_empty() {
            return Err(DecodeError::EmptyIndices);
        }
        for r in &ranges {
            if r.start >= r.end {
                return Err(DecodeError::EmptyRange {
                    start: r.start,
                    end: r.end,
                });
            }
        }
        for w in ranges.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.start < a.start {
                return Err(DecodeError::UnsortedRanges);
            }
            if b.start < a.end {
                return Err(DecodeError::OverlappingRanges);
            }
            if b.start == a.end {
                return Err(DecodeError::AdjacentRanges);
            }
        }
        Ok(IndexSet { ranges })
    }

    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    /// Number of indices.
    pub fn len(&self) -> usize {
        self.ranges.iter().map(|r| r.end - r.start).sum()
    }

    /// Always false: index sets are non-empty.
    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.ranges.iter().flat_map(|r| r.clone())
    }

    pub fn contains(&self, i: usize) -> bool {
        self.ranges.iter().any(|r| r.contains(&i))
    }

    /// One past the largest index.
    pub fn end(&self) -> usize {
        self.ranges.last().map_or(0, |r| r.end)
    }

    pub fn is_contiguous(&self) -> bool {
        self.ranges.len() == 1
    }

    /// The `k`-th smallest index.
    pub fn nth(&self, mut k: usize) -> Option<usize> {
        for r in &self.ranges {
            let len = r.end - r.start;
            if k < len {
                return Some(r.start + k);
            }
            k -= len;
        }
        None
    }

    /// Map positions relative to this set (0 = smallest member) to absolute
    /// indices.
    pub fn compose(&self, relative: &IndexSet) -> Result<IndexSet> {
        let len = self.len();
        let mut out = Vec::with_capacity(relative.len());
        for k in relative.iter() {
            out.push(
                self.nth(k)
                    .ok_or(Error::IndexOutOfRange { index: k, len })?,
            );
        }
        IndexSet::from_indices(out)
    }

    /// Compact human form, e.g. `0..2,4..5`.
    pub fn display_ranges(&self, sep: &str) -> String {
        self.ranges
            .iter()
            .map(|r| format!("{}..{}", r.start, r.end))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl std::fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IndexSet[{}]", self.display_ranges(", "))
    }
}

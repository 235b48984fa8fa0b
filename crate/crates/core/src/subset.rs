//! Criteria sets and subset bitmasks.
//!
//! Criterion `j` (0-based) is bit `j` of a mask; criterion numbers shown to
//! users are 1-based. Set functions are stored indexed by mask, and the
//! "cardinality list" order (by cardinality, then lexicographic) is used only for
//! display and serialization.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_CRITERIA: usize = 20;

/// A subset of criteria as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn singleton(j: usize) -> Self {
        Subset(1 << j)
    }

    pub fn pair(j: usize, k: usize) -> Self {
        Subset((1 << j) | (1 << k))
    }

    pub fn from_criteria<I: IntoIterator<Item = usize>>(criteria: I) -> Self {
        Subset(criteria.into_iter().fold(0, |acc, j| acc | (1 << j)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn cardinality(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, j: usize) -> bool {
        self.0 >> j & 1 == 1
    }

    pub fn with(self, j: usize) -> Self {
        Subset(self.0 | (1 << j))
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// 0-based criterion indices in increasing order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |j| bits >> j & 1 == 1)
    }

    /// Parses a comma-separated list of 1-based criterion numbers, e.g. `"1,3"`.
    /// The empty string is the empty set.
    pub fn parse_label(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "{}" {
            return Ok(Subset::EMPTY);
        }
        let mut mask = 0u32;
        for part in s.trim_matches(|c| c == '{' || c == '}').split(',') {
            let j: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad criterion number {part:?} in subset {s:?}")))?;
            if j == 0 || j > MAX_CRITERIA {
                return Err(Error::Parse(format!("criterion number {j} out of range in subset {s:?}")));
            }
            mask |= 1 << (j - 1);
        }
        Ok(Subset(mask))
    }
}

/// Sorted 1-based criterion numbers, e.g. `1,3`. The empty set prints as an empty string.
impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for j in self.members() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{}", j + 1)?;
            first = false;
        }
        Ok(())
    }
}

/// The finite criteria set `C` with `m` members.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Criteria(usize);

impl Criteria {
    pub fn new(m: usize) -> Result<Self> {
        if (2..=MAX_CRITERIA).contains(&m) {
            Ok(Criteria(m))
        } else {
            Err(Error::CriteriaCount(m))
        }
    }

    pub fn count(self) -> usize {
        self.0
    }

    /// Number of subsets, `2^m`.
    pub fn subset_count(self) -> usize {
        1 << self.0
    }

    pub fn full(self) -> Subset {
        Subset((1u32 << self.0) - 1)
    }

    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        (0..self.subset_count() as u32).map(Subset)
    }

    pub fn check(self, j: usize) -> Result<()> {
        if j < self.0 {
            Ok(())
        } else {
            Err(Error::CriterionOutOfRange { index: j, count: self.0 })
        }
    }

    /// Subsets ordered by cardinality, then lexicographically by members:
    /// `[∅, {1}, …, {m}, {1,2}, …, {m-1,m}, …, C]`.
    pub fn cardinality_order(self) -> Vec<Subset> {
        let mut order: Vec<Subset> = self.subsets().collect();
        order.sort_by_key(|s| (s.cardinality(), s.members().collect::<Vec<_>>()));
        order
    }

    /// Unordered pairs `(j, k)` with `j < k`, lexicographic.
    pub fn pairs(self) -> Vec<(usize, usize)> {
        let m = self.0;
        (0..m).flat_map(|j| (j + 1..m).map(move |k| (j, k))).collect()
    }
}

impl TryFrom<usize> for Criteria {
    type Error = Error;

    fn try_from(m: usize) -> Result<Self> {
        Criteria::new(m)
    }
}

impl From<Criteria> for usize {
    fn from(c: Criteria) -> usize {
        c.0
    }
}

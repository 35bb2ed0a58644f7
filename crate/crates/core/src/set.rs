//! Ground sets, subsets as machine words, and explicit set families.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::binomial::binom_u64;
use crate::error::{Error, Result};

/// Largest `n` for which full levels are enumerated.
pub const MAX_ENUM_N: u32 = 28;
/// Largest number of members produced by any enumeration.
pub const MAX_ENUM_SIZE: u128 = 1 << 26;

/// The ground set `[n] = {1, ..., n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    n: u32,
}

impl GroundSet {
    pub fn new(n: u32) -> Result<Self> {
        if !(1..=64).contains(&n) {
            return Err(Error::GroundSetSize(n));
        }
        Ok(Self { n })
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn full_mask(self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn admits(self, set: SubsetWord) -> bool {
        set.0 & !self.full_mask() == 0
    }

    pub fn check(self, set: SubsetWord) -> Result<SubsetWord> {
        if self.admits(set) {
            Ok(set)
        } else {
            Err(Error::SubsetOutOfRange {
                bits: set.0,
                n: self.n,
            })
        }
    }

    pub fn complement(self, set: SubsetWord) -> SubsetWord {
        SubsetWord(!set.0 & self.full_mask())
    }
}

/// One subset of `[n]`: bit `i - 1` is set iff element `i` is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SubsetWord(pub u64);

impl SubsetWord {
    pub const EMPTY: SubsetWord = SubsetWord(0);

    pub fn bits(self) -> u64 {
        self.0
    }

    /// Builds a set from 1-based elements.
    pub fn from_elements<I: IntoIterator<Item = u32>>(elements: I, ground: GroundSet) -> Result<Self> {
        let mut bits = 0u64;
        for e in elements {
            if e == 0 || e > ground.n() {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    n: ground.n(),
                });
            }
            bits |= 1 << (e - 1);
        }
        Ok(SubsetWord(bits))
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, element: u32) -> bool {
        element >= 1 && element <= 64 && self.0 >> (element - 1) & 1 == 1
    }

    /// Elements in ascending order, 1-based.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let bit = rest.trailing_zeros();
                rest &= rest - 1;
                Some(bit + 1)
            }
        })
    }

    /// `|self \ other|`.
    pub fn difference_len(self, other: SubsetWord) -> u32 {
        (self.0 & !other.0).count_ones()
    }

    pub fn is_subset_of(self, other: SubsetWord) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_strict_subset_of(self, other: SubsetWord) -> bool {
        self != other && self.is_subset_of(other)
    }

    pub fn union(self, other: SubsetWord) -> SubsetWord {
        SubsetWord(self.0 | other.0)
    }

    pub fn minus(self, other: SubsetWord) -> SubsetWord {
        SubsetWord(self.0 & !other.0)
    }
}

/// Normalized order: by cardinality, then numeric bit value.
impl Ord for SubsetWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.len(), self.0).cmp(&(other.len(), other.0))
    }
}

impl PartialOrd for SubsetWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubsetWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for SubsetWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.elements())
    }
}

/// All `k`-subsets of `[n]` in ascending numeric order (Gosper's hack).
pub fn level_words(n: u32, k: u32) -> impl Iterator<Item = SubsetWord> {
    let limit: u128 = 1u128 << n;
    let mut next: Option<u128> = if k > n { None } else { Some((1u128 << k) - 1) };
    std::iter::from_fn(move || {
        let x = next?;
        next = if x == 0 {
            None
        } else {
            let c = x & x.wrapping_neg();
            let r = x + c;
            let y = (((r ^ x) >> 2) / c) | r;
            (y < limit).then_some(y)
        };
        Some(SubsetWord(x as u64))
    })
}

/// Rejects enumerations beyond the configured caps.
pub fn check_enumeration(n: u32, total: u128) -> Result<()> {
    if n > MAX_ENUM_N {
        return Err(Error::SizeGuard {
            what: "ground set size for level enumeration",
            actual: n as u128,
            limit: MAX_ENUM_N as u128,
        });
    }
    if total > MAX_ENUM_SIZE {
        return Err(Error::SizeGuard {
            what: "enumerated family size",
            actual: total,
            limit: MAX_ENUM_SIZE,
        });
    }
    Ok(())
}

/// Every subset of `[n]` in normalized order. Guarded by the enumeration caps.
pub fn all_subsets(ground: GroundSet) -> Result<Vec<SubsetWord>> {
    let n = ground.n();
    check_enumeration(n, 1u128 << n)?;
    Ok((0..=n).flat_map(|k| level_words(n, k)).collect())
}

/// An explicit, duplicate-free family of subsets of `[n]` in normalized order.
#[derive(Debug, Clone)]
pub struct SetFamily {
    ground: GroundSet,
    members: Vec<SubsetWord>,
    index: OnceLock<HashSet<u64>>,
}

impl SetFamily {
    pub fn new<I: IntoIterator<Item = SubsetWord>>(ground: GroundSet, members: I) -> Result<Self> {
        let mut members: Vec<SubsetWord> = members
            .into_iter()
            .map(|m| ground.check(m))
            .collect::<Result<_>>()?;
        members.sort_unstable();
        members.dedup();
        Ok(Self::from_sorted(ground, members))
    }

    /// Caller guarantees `members` is valid, sorted and duplicate-free.
    pub(crate) fn from_sorted(ground: GroundSet, members: Vec<SubsetWord>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Self {
            ground,
            members,
            index: OnceLock::new(),
        }
    }

    pub fn empty(ground: GroundSet) -> Self {
        Self::from_sorted(ground, Vec::new())
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn n(&self) -> u32 {
        self.ground.n()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[SubsetWord] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = SubsetWord> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, set: SubsetWord) -> bool {
        self.index
            .get_or_init(|| self.members.iter().map(|m| m.0).collect())
            .contains(&set.0)
    }

    /// Members of cardinality `k`, in normalized order.
    pub fn level(&self, k: u32) -> &[SubsetWord] {
        let start = self.members.partition_point(|m| m.len() < k);
        let end = self.members.partition_point(|m| m.len() <= k);
        &self.members[start..end]
    }

    /// `{ [n] \ A : A in F }`.
    pub fn complemented(&self) -> SetFamily {
        let mut members: Vec<SubsetWord> =
            self.members.iter().map(|&m| self.ground.complement(m)).collect();
        members.sort_unstable();
        Self::from_sorted(self.ground, members)
    }

    /// Members whose cardinality lies in `levels`.
    pub fn restrict_levels(&self, levels: std::ops::RangeInclusive<u32>) -> SetFamily {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|m| levels.contains(&m.len()))
            .collect();
        Self::from_sorted(self.ground, members)
    }

    /// True iff every level is either absent or complete.
    pub fn is_level_union(&self) -> bool {
        let n = self.n();
        (0..=n).all(|k| {
            let count = self.level(k).len() as u64;
            count == 0 || count == binom_u64(n, k)
        })
    }
}

impl PartialEq for SetFamily {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.members == other.members
    }
}

impl Eq for SetFamily {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(n: u32) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    #[test]
    fn ground_bounds() {
        assert!(GroundSet::new(0).is_err());
        assert!(GroundSet::new(65).is_err());
        assert_eq!(GroundSet::new(64).unwrap().full_mask(), u64::MAX);
        assert!(!g(3).admits(SubsetWord(0b1000)));
    }

    #[test]
    fn level_enumeration_counts() {
        for n in 1..=12 {
            for k in 0..=n {
                let words: Vec<_> = level_words(n, k).collect();
                assert_eq!(words.len() as u64, binom_u64(n, k));
                assert!(words.iter().all(|w| w.len() == k && g(n).admits(*w)));
                assert!(words.windows(2).all(|w| w[0].0 < w[1].0));
            }
            assert_eq!(level_words(n, n + 1).count(), 0);
        }
        assert_eq!(level_words(64, 64).count(), 1);
        assert_eq!(level_words(64, 1).count(), 64);
        assert_eq!(level_words(64, 63).count(), 64);
    }

    #[test]
    fn normalization_and_display() {
        let ground = g(4);
        let a = SubsetWord::from_elements([2, 3], ground).unwrap();
        let b = SubsetWord::from_elements([4], ground).unwrap();
        let family = SetFamily::new(ground, [a, b, a, SubsetWord::EMPTY]).unwrap();
        assert_eq!(family.members(), &[SubsetWord::EMPTY, b, a]);
        assert_eq!(a.to_string(), "{2,3}");
        assert_eq!(SubsetWord::EMPTY.to_string(), "{}");
        assert!(family.contains(b));
        assert!(!family.contains(SubsetWord(1)));
        assert_eq!(family.level(2), &[a]);
        assert!(SubsetWord::from_elements([5], ground).is_err());
        assert!(SetFamily::new(ground, [SubsetWord(1 << 4)]).is_err());
    }

    #[test]
    fn level_union_detection() {
        let ground = g(4);
        let full2 = SetFamily::new(ground, level_words(4, 2)).unwrap();
        assert!(full2.is_level_union());
        let partial = SetFamily::new(ground, level_words(4, 2).skip(1)).unwrap();
        assert!(!partial.is_level_union());
        assert!(SetFamily::empty(ground).is_level_union());
    }

    #[test]
    fn enumeration_guard() {
        assert!(all_subsets(g(29)).is_err());
        assert_eq!(all_subsets(g(4)).unwrap().len(), 16);
    }

    proptest! {
        #[test]
        fn complement_is_involution(bits in proptest::collection::vec(0u64..256, 0..40)) {
            let ground = g(8);
            let family = SetFamily::new(ground, bits.into_iter().map(SubsetWord)).unwrap();
            prop_assert_eq!(family.complemented().complemented(), family.clone());
            for k in 0..=8 {
                prop_assert_eq!(family.level(k).len(), family.complemented().level(8 - k).len());
            }
        }
    }
}

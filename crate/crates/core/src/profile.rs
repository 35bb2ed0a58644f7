//! Per-level counts of a family, or the LP variable vector.

use num_traits::{Signed, Zero};

use crate::binomial::binomial;
use crate::rational::{format_rational, from_u64, from_uint, Rational};
use crate::set::SetFamily;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    counts: Vec<Rational>,
}

impl LevelProfile {
    pub fn new(counts: Vec<Rational>) -> Self {
        assert!(!counts.is_empty(), "a profile has n + 1 >= 1 entries");
        Self { counts }
    }

    pub fn zeros(n: u32) -> Self {
        Self::new(vec![Rational::zero(); n as usize + 1])
    }

    pub fn from_integers<I: IntoIterator<Item = u64>>(counts: I) -> Self {
        Self::new(counts.into_iter().map(from_u64).collect())
    }

    pub fn n(&self) -> u32 {
        (self.counts.len() - 1) as u32
    }

    pub fn counts(&self) -> &[Rational] {
        &self.counts
    }

    pub fn get(&self, level: usize) -> &Rational {
        &self.counts[level]
    }

    pub fn total(&self) -> Rational {
        self.counts.iter().sum()
    }

    /// Nonnegative and at most `binom(n, i)` on every level.
    pub fn is_realizable(&self) -> bool {
        let n = self.n() as i64;
        self.counts.iter().enumerate().all(|(i, c)| {
            !c.is_negative() && *c <= from_uint(&binomial(n, i as i64))
        })
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.counts.iter().map(format_rational).collect()
    }
}

/// `counts[i]` = number of members of cardinality `i`.
pub fn profile_of(family: &SetFamily) -> LevelProfile {
    let n = family.n();
    let mut counts = vec![0u64; n as usize + 1];
    for member in family.iter() {
        counts[member.len() as usize] += 1;
    }
    LevelProfile::from_integers(counts)
}

//! k-shadows and antichain checks.

use std::collections::HashSet;

use serde::Serialize;

use crate::binomial::binom_u64;
use crate::error::{Error, Result};
use crate::profile::{profile_of, LevelProfile};
use crate::set::{level_words, SetFamily, SubsetWord, MAX_ENUM_SIZE};

/// All `k`-element subsets of `set`.
pub fn k_subsets(set: SubsetWord, k: u32) -> impl Iterator<Item = SubsetWord> {
    let positions: Vec<u32> = set.elements().map(|e| e - 1).collect();
    let m = positions.len() as u32;
    level_words(m, k).map(move |pattern| {
        SubsetWord(
            pattern
                .elements()
                .map(|i| 1u64 << positions[i as usize - 1])
                .fold(0, |acc, bit| acc | bit),
        )
    })
}

#[derive(Debug, Clone)]
pub struct ShadowResult {
    pub shadow: SetFamily,
    pub k: u32,
    pub source_profile: LevelProfile,
    /// `sum_i binom(i, k) |F_i|`.
    pub identity_sum: u128,
    /// `sum_i (i)_k |F_i|` with the falling factorial `(i)_k`.
    pub falling_factorial_sum: u128,
    /// `|shadow| == identity_sum`, i.e. no shadow set lies below two members.
    pub identity_holds: bool,
}

fn falling_factorial(i: u32, k: u32) -> u128 {
    (0..k).map(|j| i.saturating_sub(j) as u128).product()
}

/// All sets obtained from a member by deleting exactly `k` elements.
pub fn k_shadow(family: &SetFamily, k: u32) -> Result<ShadowResult> {
    let n = family.n();
    let identity_sum: u128 = family.iter().map(|a| binom_u64(a.len(), k) as u128).sum();
    if identity_sum > MAX_ENUM_SIZE {
        return Err(Error::SizeGuard {
            what: "k-shadow enumeration",
            actual: identity_sum,
            limit: MAX_ENUM_SIZE,
        });
    }
    let falling_factorial_sum = family.iter().map(|a| falling_factorial(a.len(), k)).sum();
    let mut seen: HashSet<SubsetWord> = HashSet::with_capacity(identity_sum as usize);
    for a in family.iter() {
        seen.extend(k_subsets(a, k).map(|removed| a.minus(removed)));
    }
    let shadow_size = seen.len() as u128;
    let shadow = SetFamily::new(family.ground(), seen)?;
    debug_assert_eq!(shadow.n(), n);
    Ok(ShadowResult {
        shadow,
        k,
        source_profile: profile_of(family),
        identity_sum,
        falling_factorial_sum,
        identity_holds: shadow_size == identity_sum,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AntichainCheck {
    pub antichain: bool,
    /// `(A, B)` with `A ⊂ B`, first in normalized scan order.
    pub witness: Option<(SubsetWord, SubsetWord)>,
}

pub fn is_antichain(family: &SetFamily) -> AntichainCheck {
    let members = family.members();
    let witness = members.iter().enumerate().find_map(|(i, &a)| {
        members[i + 1..]
            .iter()
            .find(|&&b| a.is_strict_subset_of(b))
            .map(|&b| (a, b))
    });
    AntichainCheck {
        antichain: witness.is_none(),
        witness,
    }
}

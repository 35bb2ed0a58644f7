//! The explicit families: the level union `B0`, interval-of-levels families
//! for ratio `p:q`, the modular family `A*` and the power-sum family `A*_k`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;

use crate::binomial::{binom_u64, binomial};
use crate::error::{Error, Result};
use crate::predicates::{is_valid, level_conflict_ratio, verify_family, ConflictPredicate, VerifyStrategy};
use crate::set::{check_enumeration, level_words, GroundSet, SetFamily, SubsetWord};

/// Levels of `B0` together with the two sequences that generate them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelIndexSet {
    pub n: u32,
    pub levels: Vec<u32>,
    pub a_chain: Vec<u32>,
    pub b_chain: Vec<u32>,
}

/// `a_0 = b_0 = n/2`, `a_i = ceil(a_{i-1}/2) - 1` while nonnegative,
/// `b_i = floor((b_{i-1} + n)/2) + 1` while at most `n`.
pub fn index_set_i(n: u32) -> Result<LevelIndexSet> {
    if n % 2 != 0 || !(2..=256).contains(&n) {
        return Err(Error::InvalidConstruction(format!(
            "B0 needs an even n in 2..=256, got {n}"
        )));
    }
    let half = n / 2;
    let mut a_chain = vec![half];
    loop {
        let next = a_chain.last().unwrap().div_ceil(&2) as i64 - 1;
        if next < 0 {
            break;
        }
        a_chain.push(next as u32);
    }
    let mut b_chain = vec![half];
    loop {
        let next = (b_chain.last().unwrap() + n) / 2 + 1;
        if next > n {
            break;
        }
        b_chain.push(next);
    }
    let mut levels: Vec<u32> = a_chain.iter().chain(&b_chain).copied().collect();
    levels.sort_unstable();
    levels.dedup();
    Ok(LevelIndexSet {
        n,
        levels,
        a_chain,
        b_chain,
    })
}

impl LevelIndexSet {
    /// Every two levels are compatible under ratio 1:2.
    pub fn is_ratio_12_compatible(&self) -> bool {
        self.levels.iter().all(|&u| {
            self.levels
                .iter()
                .all(|&v| !level_conflict_ratio(u, v, self.n, 1, 2))
        })
    }
}

/// The union of the full levels in `levels`, in normalized order.
pub fn build_level_union(n: u32, levels: &[u32]) -> Result<SetFamily> {
    let ground = GroundSet::new(n)?;
    let mut levels: Vec<u32> = levels.to_vec();
    levels.sort_unstable();
    levels.dedup();
    if let Some(&bad) = levels.iter().find(|&&k| k > n) {
        return Err(Error::InvalidConstruction(format!("level {bad} exceeds n = {n}")));
    }
    let total: u128 = levels.iter().map(|&k| binom_u64(n, k) as u128).sum();
    check_enumeration(n, total)?;
    let members = levels.iter().flat_map(|&k| level_words(n, k)).collect();
    Ok(SetFamily::from_sorted(ground, members))
}

pub fn build_b0(n: u32) -> Result<SetFamily> {
    let index = index_set_i(n)?;
    build_level_union(n, &index.levels)
}

/// `|B0(n)|` from binomial sums, without enumerating.
pub fn b0_size(n: u32) -> Result<num_bigint::BigUint> {
    let index = index_set_i(n)?;
    Ok(index
        .levels
        .iter()
        .map(|&k| binomial(n as i64, k as i64))
        .sum())
}

/// Levels `start .. start + (q - p)` used by [`build_interval_family`].
pub fn interval_levels(n: u32, p: u32, q: u32, anchor: Option<u32>) -> Result<Vec<u32>> {
    ConflictPredicate::ratio(p, q)?;
    let width = q - p;
    if width > n + 1 {
        return Err(Error::InvalidConstruction(format!(
            "an interval of {width} levels does not fit in [0, {n}]"
        )));
    }
    let start = match anchor {
        Some(a) => {
            if a + width - 1 > n {
                return Err(Error::InvalidConstruction(format!(
                    "interval {a}..={} does not fit in [0, {n}]",
                    a + width - 1
                )));
            }
            a
        }
        None => (n / 2).min(n + 1 - width),
    };
    Ok((start..start + width).collect())
}

/// `q - p` consecutive full levels. Levels inside such an interval differ by
/// less than `q - p`, so no two of them are ratio-compatible. The default
/// placement starts at `floor(n/2)`, moved down if it would pass `n`.
pub fn build_interval_family(n: u32, p: u32, q: u32, anchor: Option<u32>) -> Result<SetFamily> {
    let levels = interval_levels(n, p, q, anchor)?;
    build_level_union(n, &levels)
}

fn element_sum_mod(set: SubsetWord, modulus: u64, power: u32) -> u64 {
    set.elements()
        .map(|e| (e as u64 % modulus).pow(power) % modulus)
        .sum::<u64>()
        % modulus
}

/// All `floor(n/2)`-sets whose element sum is `r (mod n)`. With `r` omitted
/// the smallest residue of maximum class size is used.
pub fn build_modular_family(n: u32, r: Option<u32>) -> Result<(SetFamily, u32)> {
    let ground = GroundSet::new(n)?;
    let half = n / 2;
    check_enumeration(n, binom_u64(n, half) as u128)?;
    let modulus = n as u64;
    let r = match r {
        Some(r) if r >= n => {
            return Err(Error::InvalidConstruction(format!("residue {r} must be below {n}")))
        }
        Some(r) => r,
        None => {
            let mut counts = vec![0u64; n as usize];
            for set in level_words(n, half) {
                counts[element_sum_mod(set, modulus, 1) as usize] += 1;
            }
            let best = *counts.iter().max().unwrap();
            counts.iter().position(|&c| c == best).unwrap() as u32
        }
    };
    let members = level_words(n, half)
        .filter(|&set| element_sum_mod(set, modulus, 1) == r as u64)
        .collect();
    Ok((SetFamily::from_sorted(ground, members), r))
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// All `floor(n/2)`-sets with `sum i^d = 0 (mod n)` for `1 <= d <= k`, `n`
/// prime. The distance-greater-than-`k` property is checked on the result.
pub fn build_power_sum_family(n: u32, k: u32) -> Result<SetFamily> {
    if !is_prime(n) {
        return Err(Error::InvalidConstruction(format!("power-sum family needs prime n, got {n}")));
    }
    if k == 0 {
        return Err(Error::InvalidConstruction("power-sum family needs k >= 1".into()));
    }
    let ground = GroundSet::new(n)?;
    let half = n / 2;
    check_enumeration(n, binom_u64(n, half) as u128)?;
    let modulus = n as u64;
    let members: Vec<SubsetWord> = level_words(n, half)
        .filter(|&set| (1..=k).all(|d| element_sum_mod(set, modulus, d) == 0))
        .collect();
    let family = SetFamily::from_sorted(ground, members);
    if let Some((a, b)) = uniform_distance_violation(&family, k) {
        return Err(Error::InvalidFamily {
            predicate: ConflictPredicate::AtMostDistance(k).to_string(),
            a,
            b,
        });
    }
    Ok(family)
}

/// For a family inside one level `m`: two members with `|A \ B| <= k` share
/// an `(m - k)`-subset. Returns such a pair if one exists.
fn uniform_distance_violation(family: &SetFamily, k: u32) -> Option<(SubsetWord, SubsetWord)> {
    let Some(first) = family.members().first() else {
        return None;
    };
    let m = first.len();
    debug_assert!(family.iter().all(|s| s.len() == m));
    if k >= m {
        let members = family.members();
        return (members.len() >= 2).then(|| (members[0], members[1]));
    }
    let mut owner = std::collections::HashMap::new();
    for set in family.iter() {
        for removed in crate::shadow::k_subsets(set, k) {
            if let Some(prev) = owner.insert(set.minus(removed), set) {
                if prev != set {
                    return Some((prev, set));
                }
            }
        }
    }
    None
}

/// A parsed construction string: `b0`, `levels:0,2,4`, `interval:p:q[:anchor]`,
/// `modular[:r]`, `powersum:k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructionSpec {
    B0,
    LevelUnion(Vec<u32>),
    Interval { p: u32, q: u32, anchor: Option<u32> },
    Modular(Option<u32>),
    PowerSum(u32),
}

impl FromStr for ConstructionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConstruction(format!(
            "{s:?}; expected b0, levels:L1,L2,..., interval:P:Q[:ANCHOR], modular[:R] or powersum:K"
        ));
        let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["b0"] => Ok(Self::B0),
            ["levels", list] => {
                let levels = if list.trim().is_empty() {
                    Vec::new()
                } else {
                    list.split(',').map(num).collect::<Result<_>>()?
                };
                Ok(Self::LevelUnion(levels))
            }
            ["interval", p, q] => Ok(Self::Interval { p: num(p)?, q: num(q)?, anchor: None }),
            ["interval", p, q, a] => Ok(Self::Interval { p: num(p)?, q: num(q)?, anchor: Some(num(a)?) }),
            ["modular"] => Ok(Self::Modular(None)),
            ["modular", r] => Ok(Self::Modular(Some(num(r)?))),
            ["powersum", k] => Ok(Self::PowerSum(num(k)?)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ConstructionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::B0 => f.write_str("b0"),
            Self::LevelUnion(levels) => {
                let list: Vec<String> = levels.iter().map(u32::to_string).collect();
                write!(f, "levels:{}", list.join(","))
            }
            Self::Interval { p, q, anchor: None } => write!(f, "interval:{p}:{q}"),
            Self::Interval { p, q, anchor: Some(a) } => write!(f, "interval:{p}:{q}:{a}"),
            Self::Modular(None) => f.write_str("modular"),
            Self::Modular(Some(r)) => write!(f, "modular:{r}"),
            Self::PowerSum(k) => write!(f, "powersum:{k}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub family: SetFamily,
    /// The residue used by the modular family.
    pub residue: Option<u32>,
    /// The predicate the construction is built to avoid.
    pub predicate: Option<ConflictPredicate>,
}

impl ConstructionSpec {
    pub fn build(&self, n: u32) -> Result<Construction> {
        let (family, residue, predicate) = match self {
            Self::B0 => (build_b0(n)?, None, Some(ConflictPredicate::Ratio { p: 1, q: 2 })),
            Self::LevelUnion(levels) => (build_level_union(n, levels)?, None, None),
            Self::Interval { p, q, anchor } => (
                build_interval_family(n, *p, *q, *anchor)?,
                None,
                Some(ConflictPredicate::ratio(*p, *q)?),
            ),
            Self::Modular(r) => {
                let (family, r) = build_modular_family(n, *r)?;
                (family, Some(r), Some(ConflictPredicate::ExactDistance(1)))
            }
            Self::PowerSum(k) => (
                build_power_sum_family(n, *k)?,
                None,
                Some(ConflictPredicate::AtMostDistance(*k)),
            ),
        };
        Ok(Construction {
            family,
            residue,
            predicate,
        })
    }
}

/// Checks a construction against its own predicate.
pub fn self_check(construction: &Construction) -> Result<bool> {
    match construction.predicate {
        None => Ok(true),
        Some(predicate) => is_valid(&construction.family, predicate),
    }
}

/// Pairwise verification helper for tests and callers that want a report.
pub fn verify_pairwise(family: &SetFamily, predicate: ConflictPredicate) -> Result<bool> {
    Ok(verify_family(family, predicate, VerifyStrategy::Pairwise, 1)?.valid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{profile_of, LevelProfile};
    use num_bigint::BigUint;

    fn words(n: u32, sets: &[&[u32]]) -> Vec<SubsetWord> {
        let g = GroundSet::new(n).unwrap();
        let mut out: Vec<SubsetWord> = sets
            .iter()
            .map(|s| SubsetWord::from_elements(s.iter().copied(), g).unwrap())
            .collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn index_set_examples() {
        let i4 = index_set_i(4).unwrap();
        assert_eq!(i4.levels, vec![0, 2, 4]);
        assert_eq!((i4.a_chain.clone(), i4.b_chain.clone()), (vec![2, 0], vec![2, 4]));
        assert_eq!(index_set_i(2).unwrap().levels, vec![0, 1, 2]);
        let i16 = index_set_i(16).unwrap();
        assert_eq!(i16.levels, vec![0, 1, 3, 8, 13, 15, 16]);
        assert_eq!(i16.a_chain, vec![8, 3, 1, 0]);
        assert_eq!(i16.b_chain, vec![8, 13, 15, 16]);
        assert_eq!(index_set_i(6).unwrap().levels, vec![0, 1, 3, 5, 6]);
        assert!(index_set_i(5).is_err());
        assert!(index_set_i(0).is_err());
        assert!(index_set_i(258).is_err());
    }

    #[test]
    fn power_of_two_closed_form_is_not_the_recursion() {
        // Levels 7 and 8 of [16] conflict: |A| = 8, |B| = 7, |A \ B| = 2 = 2 |B \ A|.
        assert!(level_conflict_ratio(7, 8, 16, 1, 2));
        assert!(level_conflict_ratio(8, 9, 16, 1, 2));
        let levels = index_set_i(16).unwrap().levels;
        assert!(!levels.contains(&7) && !levels.contains(&9));
    }

    #[test]
    fn index_sets_are_compatible() {
        for n in (2..=256).step_by(2) {
            assert!(index_set_i(n).unwrap().is_ratio_12_compatible(), "n={n}");
        }
    }

    #[test]
    fn b0_sizes() {
        assert_eq!(build_b0(4).unwrap().len(), 8);
        let b6 = build_b0(6).unwrap();
        assert_eq!(b6.len(), 34);
        assert_eq!(profile_of(&b6), LevelProfile::from_integers([1, 6, 0, 20, 0, 6, 1]));
        assert_eq!(build_b0(16).unwrap().len(), 14024);
        assert_eq!(b0_size(16).unwrap(), BigUint::from(14024u32));
        assert!(build_b0(30).is_err());
        let r12 = ConflictPredicate::Ratio { p: 1, q: 2 };
        for n in (2..=12).step_by(2) {
            assert!(verify_pairwise(&build_b0(n).unwrap(), r12).unwrap(), "n={n}");
        }
    }

    #[test]
    fn level_union_examples() {
        assert_eq!(build_level_union(2, &[0, 1, 2]).unwrap().len(), 4);
        let two = build_level_union(4, &[2]).unwrap();
        assert_eq!(two.len(), 6);
        assert!(two.iter().all(|s| s.len() == 2));
        assert_eq!(
            profile_of(&build_level_union(4, &[4, 0, 2, 2]).unwrap()),
            LevelProfile::from_integers([1, 0, 6, 0, 1])
        );
        assert!(build_level_union(4, &[5]).is_err());
        assert!(matches!(build_level_union(29, &[1]), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn interval_examples() {
        let f = build_interval_family(6, 1, 2, Some(3)).unwrap();
        assert_eq!((f.len(), interval_levels(6, 1, 2, None).unwrap()), (20, vec![3]));
        let f = build_interval_family(5, 1, 3, Some(2)).unwrap();
        assert_eq!(f.len(), 20);
        assert_eq!(interval_levels(5, 1, 3, None).unwrap(), vec![2, 3]);
        assert_eq!(build_interval_family(4, 2, 3, Some(2)).unwrap().len(), 6);
        assert_eq!(interval_levels(2, 1, 4, None).unwrap(), vec![0, 1, 2]);
        assert!(build_interval_family(2, 1, 5, None).is_err());
        assert!(build_interval_family(6, 1, 3, Some(6)).is_err());
        assert!(build_interval_family(6, 2, 4, None).is_err());
    }

    #[test]
    fn interval_families_are_valid() {
        for n in 1..=12u32 {
            for q in 2..=4u32 {
                for p in 1..q {
                    if p.gcd(&q) != 1 || q - p > n + 1 {
                        continue;
                    }
                    let f = build_interval_family(n, p, q, None).unwrap();
                    let predicate = ConflictPredicate::ratio(p, q).unwrap();
                    assert!(verify_pairwise(&f, predicate).unwrap(), "n={n} {p}:{q}");
                }
            }
        }
    }

    #[test]
    fn modular_examples() {
        let (f, r) = build_modular_family(4, None).unwrap();
        assert_eq!(r, 1);
        assert_eq!(f.members(), words(4, &[&[1, 4], &[2, 3]]).as_slice());
        assert_eq!(build_modular_family(2, None).unwrap().0.len(), 1);
        assert!(build_modular_family(5, None).unwrap().0.len() >= 2);
        let (f, r) = build_modular_family(4, Some(0)).unwrap();
        assert_eq!((f.len(), r), (1, 0));
        assert!(build_modular_family(4, Some(4)).is_err());
    }

    #[test]
    fn modular_families_meet_the_averaging_bound() {
        let d1 = ConflictPredicate::ExactDistance(1);
        for n in 1..=16u32 {
            let (f, _) = build_modular_family(n, None).unwrap();
            assert!(n as u64 * f.len() as u64 >= binom_u64(n, n / 2), "n={n}");
            assert!(verify_pairwise(&f, d1).unwrap(), "n={n}");
            for a in f.iter() {
                for b in f.iter().filter(|&b| b != a) {
                    assert!(a.difference_len(b) >= 2);
                }
            }
        }
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(build_power_sum_family(5, 1).unwrap().members(), words(5, &[&[1, 4], &[2, 3]]).as_slice());
        assert!(build_power_sum_family(5, 2).unwrap().is_empty());
        assert_eq!(build_power_sum_family(3, 1).unwrap().members(), words(3, &[&[3]]).as_slice());
        assert!(build_power_sum_family(9, 1).is_err());
        assert!(build_power_sum_family(7, 0).is_err());
        for n in [5u32, 7, 11, 13] {
            for k in 1..=3 {
                let f = build_power_sum_family(n, k).unwrap();
                assert!(verify_pairwise(&f, ConflictPredicate::AtMostDistance(k)).unwrap());
            }
        }
    }

    #[test]
    fn uniform_check_matches_pairwise() {
        let (f, _) = build_modular_family(9, None).unwrap();
        for k in 0..=4 {
            let pairwise = verify_pairwise(&f, ConflictPredicate::AtMostDistance(k)).unwrap();
            assert_eq!(uniform_distance_violation(&f, k).is_none(), pairwise, "k={k}");
        }
    }

    #[test]
    fn construction_strings() {
        for text in ["b0", "levels:0,2,4", "interval:1:3", "interval:1:3:2", "modular", "modular:1", "powersum:2"] {
            let spec: ConstructionSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert!("levels:a".parse::<ConstructionSpec>().is_err());
        assert!("bogus".parse::<ConstructionSpec>().is_err());
        let built = "modular".parse::<ConstructionSpec>().unwrap().build(4).unwrap();
        assert_eq!(built.residue, Some(1));
        assert!(self_check(&built).unwrap());
        assert!(self_check(&ConstructionSpec::B0.build(8).unwrap()).unwrap());
    }
}

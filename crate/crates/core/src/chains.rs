//! Random orderings of `[n]` and the chain families used by the averaging
//! arguments: any two members of a chain family conflict, so a valid family
//! meets at most one of them.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::binomial::binomial;
use crate::bounds::lym_sum;
use crate::error::{Error, Result};
use crate::predicates::ConflictPredicate;
use crate::rational::{ratio, Rational};
use crate::set::{GroundSet, SetFamily, SubsetWord};

/// Per-trial seed from a master seed and a trial index (splitmix64 mixing),
/// so results do not depend on how trials are scheduled.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A permutation of `1..=n` drawn from ChaCha8 seeded with `seed`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ordering {
    pub perm: Vec<u32>,
    pub seed: u64,
}

impl Ordering {
    pub fn n(&self) -> u32 {
        self.perm.len() as u32
    }

    fn word(&self, positions: &[u32]) -> SubsetWord {
        SubsetWord(positions.iter().fold(0, |acc, &e| acc | 1 << (e - 1)))
    }
}

pub fn random_ordering(n: u32, seed: u64) -> Result<Ordering> {
    GroundSet::new(n)?;
    let mut perm: Vec<u32> = (1..=n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(Ordering { perm, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChainParams {
    /// Windows `[l, 2l]`.
    Ratio12 { l: u32 },
    /// Windows `[2k - n, k]`, by complementing the `[n - k, 2(n - k)]` chains.
    Ratio12Upper { k: u32 },
    /// The class `J_k`, `n = (p + q) m`.
    RatioPq { p: u32, q: u32, k: u32, k_prime: u32, m: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainFamily {
    pub chains: Vec<SubsetWord>,
    pub params: ChainParams,
    pub ordering: Ordering,
}

/// Ordering split as `(a_1 .. a_{ceil(2n/3)}, b_1 .. b_{floor(n/3)})`;
/// `C_i = {a_1 .. a_{2i}} ∪ {b_{i+1} .. b_l}` for `i = 0..=l`.
pub fn chain_family_12(ordering: &Ordering, l: u32) -> Result<ChainFamily> {
    let n = ordering.n();
    let b_len = n / 3;
    if l > b_len {
        return Err(Error::OutOfRange(format!("l = {l} exceeds floor(n/3) = {b_len}")));
    }
    let (a, b) = ordering.perm.split_at((n - b_len) as usize);
    let chains = (0..=l as usize)
        .map(|i| ordering.word(&a[..2 * i]).union(ordering.word(&b[i..l as usize])))
        .collect();
    Ok(ChainFamily {
        chains,
        params: ChainParams::Ratio12 { l },
        ordering: ordering.clone(),
    })
}

/// Complements of `chain_family_12(ordering, n - k)`: sizes `k, k - 1, ..., 2k - n`.
pub fn chain_family_12_upper(ordering: &Ordering, k: u32) -> Result<ChainFamily> {
    let n = ordering.n();
    if k > n || 3 * k < 2 * n {
        return Err(Error::OutOfRange(format!("k = {k} outside [ceil(2n/3), n]")));
    }
    let ground = GroundSet::new(n)?;
    let lower = chain_family_12(ordering, n - k)?;
    Ok(ChainFamily {
        chains: lower.chains.iter().map(|&c| ground.complement(c)).collect(),
        params: ChainParams::Ratio12Upper { k },
        ordering: ordering.clone(),
    })
}

/// With `n = (p + q) m` and the ordering split as `(a_1 .. a_{qm}, b_1 .. b_{pm})`:
/// `C_i = {a_1 .. a_{qi + k'}} ∪ {b_{pi+1} .. b_{pm}}` for `i < m`, plus `C_m`
/// when `k' = 0`, where `k' = (k - pm) mod (q - p)`.
pub fn chain_family_pq(ordering: &Ordering, p: u32, q: u32, k: u32) -> Result<ChainFamily> {
    ConflictPredicate::ratio(p, q)?;
    let n = ordering.n();
    if n % (p + q) != 0 {
        return Err(Error::OutOfRange(format!("p + q = {} does not divide n = {n}", p + q)));
    }
    let width = q - p;
    if k >= width {
        return Err(Error::OutOfRange(format!("k = {k} must be below q - p = {width}")));
    }
    let m = n / (p + q);
    let k_prime = (k as i64 - (p * m) as i64).rem_euclid(width as i64) as u32;
    let (a, b) = ordering.perm.split_at((q * m) as usize);
    let count = if k_prime == 0 { m + 1 } else { m };
    let chains = (0..count)
        .map(|i| {
            let a_end = (q * i + k_prime) as usize;
            let b_start = (p * i) as usize;
            ordering.word(&a[..a_end]).union(ordering.word(&b[b_start..]))
        })
        .collect();
    Ok(ChainFamily {
        chains,
        params: ChainParams::RatioPq { p, q, k, k_prime, m },
        ordering: ordering.clone(),
    })
}

impl ChainFamily {
    pub fn sizes(&self) -> Vec<u32> {
        self.chains.iter().map(|c| c.len()).collect()
    }

    /// The defining difference identity for every pair `i < j`:
    /// `|C_j \ C_i| = 2 |C_i \ C_j|` (lower 1:2 chains), the mirror image for
    /// the complemented chains, `q |C_i \ C_j| = p |C_j \ C_i|` for `p:q`.
    pub fn identity_holds(&self) -> bool {
        let c = &self.chains;
        (0..c.len()).all(|i| {
            (i + 1..c.len()).all(|j| {
                let forward = c[i].difference_len(c[j]);
                let backward = c[j].difference_len(c[i]);
                match self.params {
                    ChainParams::Ratio12 { .. } => backward == 2 * forward && forward > 0,
                    ChainParams::Ratio12Upper { .. } => forward == 2 * backward && backward > 0,
                    ChainParams::RatioPq { p, q, .. } => q * forward == p * backward && forward > 0,
                }
            })
        })
    }

    /// Every pair of chains conflicts under `predicate` in some order.
    pub fn pairwise_conflicting(&self, predicate: ConflictPredicate) -> bool {
        let c = &self.chains;
        (0..c.len()).all(|i| (i + 1..c.len()).all(|j| predicate.conflicts_either(c[i], c[j])))
    }

    /// Sizes match the closed form for the family kind.
    pub fn sizes_as_expected(&self) -> bool {
        let n = self.ordering.n();
        self.sizes().iter().enumerate().all(|(i, &s)| {
            let i = i as u32;
            match self.params {
                ChainParams::Ratio12 { l } => s == l + i,
                ChainParams::Ratio12Upper { k } => s == k - i,
                ChainParams::RatioPq { p, q, k_prime, m, .. } => s == (q - p) * i + k_prime + p * m,
            }
        }) && self.chains.iter().all(|c| GroundSet::new(n).map_or(false, |g| g.admits(*c)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipEstimate {
    pub hits: u64,
    pub trials: u64,
    pub probability: f64,
    pub stderr: f64,
    /// `1 / binom(n, |B|)`
    #[serde(skip)]
    pub expected: Rational,
}

/// Fraction of seeded orderings whose `[l, 2l]` chain family contains `set`.
pub fn estimate_membership(n: u32, l: u32, set: SubsetWord, trials: u64, seed: u64) -> Result<MembershipEstimate> {
    let ground = GroundSet::new(n)?;
    ground.check(set)?;
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    if l > n / 3 {
        return Err(Error::OutOfRange(format!("l = {l} exceeds floor(n/3)")));
    }
    let size = set.len();
    if size < l || size > 2 * l {
        return Err(Error::OutOfRange(format!(
            "|B| = {size} outside [{l}, {}]; membership probability is 0",
            2 * l
        )));
    }
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let ordering = random_ordering(n, derive_seed(seed, t)).expect("n validated");
            let family = chain_family_12(&ordering, l).expect("l validated");
            family.chains[(size - l) as usize] == set
        })
        .count() as u64;
    let probability = hits as f64 / trials as f64;
    Ok(MembershipEstimate {
        hits,
        trials,
        probability,
        stderr: (probability * (1.0 - probability) / trials as f64).sqrt(),
        expected: ratio(&1u32.into(), &binomial(n as i64, size as i64)),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HitsEstimate {
    pub trials: u64,
    pub mean: f64,
    pub stderr: f64,
    /// Largest number of chains hit in a single trial.
    pub max_hits: u64,
    /// `sum_{j=l}^{2l} |F_j| / binom(n, j)`, the exact expectation.
    #[serde(skip)]
    pub predicted: Rational,
}

/// Empirical mean of `X = |F ∩ C|` over seeded `[l, 2l]` chain families.
pub fn expected_hits(family: &SetFamily, l: u32, trials: u64, seed: u64) -> Result<HitsEstimate> {
    let n = family.n();
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    if l > n / 3 {
        return Err(Error::OutOfRange(format!("l = {l} exceeds floor(n/3)")));
    }
    let counts: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ordering = random_ordering(n, derive_seed(seed, t)).expect("n validated");
            let chains = chain_family_12(&ordering, l).expect("l validated");
            chains.chains.iter().filter(|&&c| family.contains(c)).count() as u64
        })
        .collect();
    let sum: u64 = counts.iter().sum();
    let sum_sq: u64 = counts.iter().map(|c| c * c).sum();
    let t = trials as f64;
    let mean = sum as f64 / t;
    let variance = if trials > 1 {
        ((sum_sq as f64 - sum as f64 * mean) / (t - 1.0)).max(0.0)
    } else {
        0.0
    };
    let levels: Vec<u32> = (l..=2 * l).collect();
    Ok(HitsEstimate {
        trials,
        mean,
        stderr: (variance / t).sqrt(),
        max_hits: counts.iter().copied().max().unwrap_or(0),
        predicted: lym_sum(family, &levels),
    })
}

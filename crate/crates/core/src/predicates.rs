//! Forbidden configurations, pair and family checks, level-compatibility
//! rules and conflict graphs.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::binomial::binom_u64;
use crate::error::{Error, Result};
use crate::set::{level_words, SetFamily, SubsetWord};

/// Largest family checked pair by pair: `|F|^2 <= 10^9`.
pub const PAIRWISE_LIMIT: u128 = 1_000_000_000;
/// Largest vertex set for [`conflict_graph`].
pub const GRAPH_LIMIT: u128 = 1 << 20;

/// The forbidden configuration, evaluated on ordered distinct pairs `(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConflictPredicate {
    /// `p |A \ B| = q |B \ A|` with `gcd(p, q) = 1`, `p < q`.
    Ratio { p: u32, q: u32 },
    /// `|A \ B| = k`.
    ExactDistance(u32),
    /// `|A \ B| <= k`.
    AtMostDistance(u32),
    /// `A ⊂ B`.
    Comparability,
}

impl ConflictPredicate {
    pub fn ratio(p: u32, q: u32) -> Result<Self> {
        if p == 0 || p >= q || p.gcd(&q) != 1 {
            return Err(Error::InvalidPredicate(format!(
                "ratio {p}:{q} needs coprime 0 < p < q"
            )));
        }
        Ok(Self::Ratio { p, q })
    }

    /// Conflict test without the distinctness check.
    #[inline]
    pub fn conflicts(self, a: SubsetWord, b: SubsetWord) -> bool {
        let a_minus_b = a.difference_len(b);
        match self {
            Self::Ratio { p, q } => p * a_minus_b == q * b.difference_len(a),
            Self::ExactDistance(k) => a_minus_b == k,
            Self::AtMostDistance(k) => a_minus_b <= k,
            Self::Comparability => a_minus_b == 0,
        }
    }

    /// Conflict in either order; the symmetrized relation.
    #[inline]
    pub fn conflicts_either(self, a: SubsetWord, b: SubsetWord) -> bool {
        self.conflicts(a, b) || self.conflicts(b, a)
    }

    /// Whether `|A \ B| = s` with `|A| = la`, `|B| = lb` is forbidden.
    fn forbids_difference(self, s: u32, la: u32, lb: u32) -> bool {
        match self {
            Self::Ratio { p, q } => {
                let b_minus_a = s + lb - la;
                p * s == q * b_minus_a
            }
            Self::ExactDistance(k) => s == k,
            Self::AtMostDistance(k) => s <= k,
            Self::Comparability => s == 0,
        }
    }
}

impl fmt::Display for ConflictPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ratio { p, q } => write!(f, "ratio:{p}:{q}"),
            Self::ExactDistance(k) => write!(f, "dist:{k}"),
            Self::AtMostDistance(k) => write!(f, "distle:{k}"),
            Self::Comparability => f.write_str("antichain"),
        }
    }
}

impl FromStr for ConflictPredicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| {
            t.parse::<u32>()
                .map_err(|_| Error::InvalidPredicate(format!("bad number {t:?} in {s:?}")))
        };
        match parts.as_slice() {
            ["ratio", p, q] => Self::ratio(num(p)?, num(q)?),
            ["dist", k] => Ok(Self::ExactDistance(num(k)?)),
            ["distle", k] => Ok(Self::AtMostDistance(num(k)?)),
            ["antichain"] => Ok(Self::Comparability),
            _ => Err(Error::InvalidPredicate(format!(
                "{s:?}; expected ratio:P:Q, dist:K, distle:K or antichain"
            ))),
        }
    }
}

impl Serialize for ConflictPredicate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Ordered pair test. `A = B` is rejected.
pub fn pair_conflicts(a: SubsetWord, b: SubsetWord, predicate: ConflictPredicate) -> Result<bool> {
    if a == b {
        return Err(Error::IdenticalPair(a));
    }
    Ok(predicate.conflicts(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyStrategy {
    Pairwise,
    LevelShortcut,
}

impl FromStr for VerifyStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pairwise" => Ok(Self::Pairwise),
            "level-shortcut" | "level" => Ok(Self::LevelShortcut),
            other => Err(Error::OutOfRange(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub valid: bool,
    pub violations: Vec<(SubsetWord, SubsetWord)>,
    pub strategy: VerifyStrategy,
}

/// Checks every ordered distinct pair of `family` (or every ordered pair of
/// levels, for level unions). At most `max_violations` pairs are reported,
/// in normalized scan order.
pub fn verify_family(
    family: &SetFamily,
    predicate: ConflictPredicate,
    strategy: VerifyStrategy,
    max_violations: usize,
) -> Result<VerificationReport> {
    let violations = match strategy {
        VerifyStrategy::Pairwise => pairwise_violations(family, predicate, max_violations)?,
        VerifyStrategy::LevelShortcut => level_violations(family, predicate, max_violations)?,
    };
    Ok(VerificationReport {
        valid: violations.is_empty(),
        violations,
        strategy,
    })
}

/// Pairwise verification when it fits the guard, otherwise the level shortcut.
pub fn is_valid(family: &SetFamily, predicate: ConflictPredicate) -> Result<bool> {
    let strategy = if family.is_level_union() {
        VerifyStrategy::LevelShortcut
    } else {
        VerifyStrategy::Pairwise
    };
    Ok(verify_family(family, predicate, strategy, 1)?.valid)
}

/// `Ok(())` if `family` avoids `predicate`, otherwise the first violation
/// as [`Error::InvalidFamily`].
pub fn require_valid(family: &SetFamily, predicate: ConflictPredicate) -> Result<()> {
    let strategy = if family.is_level_union() {
        VerifyStrategy::LevelShortcut
    } else {
        VerifyStrategy::Pairwise
    };
    let report = verify_family(family, predicate, strategy, 1)?;
    match report.violations.first() {
        None => Ok(()),
        Some(&(a, b)) => Err(Error::InvalidFamily {
            predicate: predicate.to_string(),
            a,
            b,
        }),
    }
}

fn pairwise_violations(
    family: &SetFamily,
    predicate: ConflictPredicate,
    max_violations: usize,
) -> Result<Vec<(SubsetWord, SubsetWord)>> {
    let size = family.len() as u128;
    if size * size > PAIRWISE_LIMIT {
        return Err(Error::SizeGuard {
            what: "pairwise verification |F|^2",
            actual: size * size,
            limit: PAIRWISE_LIMIT,
        });
    }
    if max_violations == 0 {
        return Ok(Vec::new());
    }
    let members = family.members();
    let rows: Vec<Vec<(SubsetWord, SubsetWord)>> = members
        .par_iter()
        .map(|&a| {
            members
                .iter()
                .filter(|&&b| b != a && predicate.conflicts(a, b))
                .take(max_violations)
                .map(|&b| (a, b))
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().take(max_violations).collect())
}

fn level_violations(
    family: &SetFamily,
    predicate: ConflictPredicate,
    max_violations: usize,
) -> Result<Vec<(SubsetWord, SubsetWord)>> {
    if !family.is_level_union() {
        return Err(Error::NotLevelUnion);
    }
    let n = family.n();
    let levels: Vec<u32> = (0..=n).filter(|&k| !family.level(k).is_empty()).collect();
    let mut out = Vec::new();
    for &la in &levels {
        for &lb in &levels {
            if out.len() >= max_violations {
                return Ok(out);
            }
            if let Some(pair) = level_pair_witness(la, lb, n, predicate) {
                out.push(pair);
            }
        }
    }
    Ok(out)
}

/// Elements `lo..=hi` (1-based) as a word; empty when `lo > hi`.
fn interval_word(lo: u32, hi: u32) -> SubsetWord {
    if lo > hi {
        return SubsetWord::EMPTY;
    }
    let upto = |m: u32| if m >= 64 { u64::MAX } else { (1u64 << m) - 1 };
    SubsetWord(upto(hi) & !upto(lo - 1))
}

/// A conflicting ordered pair `(A, B)` with `|A| = la`, `|B| = lb` inside
/// `[n]`, or `None` if the two levels are compatible in that order.
///
/// Only the overlap `s = |A \ B|` matters: it ranges over
/// `max(0, la - lb) ..= min(la, n - lb)`.
pub fn level_pair_witness(
    la: u32,
    lb: u32,
    n: u32,
    predicate: ConflictPredicate,
) -> Option<(SubsetWord, SubsetWord)> {
    if la > n || lb > n {
        return None;
    }
    let lo = la.saturating_sub(lb);
    let hi = la.min(n - lb);
    let s = (lo..=hi)
        .filter(|&s| !(s == 0 && la == lb))
        .find(|&s| predicate.forbids_difference(s, la, lb))?;
    let a = interval_word(1, la);
    let b = interval_word(1, la - s).union(interval_word(la + 1, lb + s));
    debug_assert_eq!((a.len(), b.len(), a.difference_len(b)), (la, lb, s));
    Some((a, b))
}

/// Ordered level test: some `A` at level `la` and `B` at level `lb` conflict.
pub fn level_conflict(la: u32, lb: u32, n: u32, predicate: ConflictPredicate) -> bool {
    level_pair_witness(la, lb, n, predicate).is_some()
}

/// Closed form for ratio `p:q`: with `u <= v`, some set at level `v` and some
/// set at level `u` conflict iff `(q - p) | (v - u)`, `t = p (v - u) / (q - p)`
/// satisfies `t <= u` and `v + t <= n`. Equal levels never conflict.
pub fn level_conflict_ratio(u: u32, v: u32, n: u32, p: u32, q: u32) -> bool {
    debug_assert!(p < q);
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    if lo == hi || hi > n {
        return false;
    }
    let gap = hi - lo;
    let width = q - p;
    if gap % width != 0 {
        return false;
    }
    let t = p as u64 * gap as u64 / width as u64;
    t <= lo as u64 && hi as u64 + t <= n as u64
}

/// Undirected conflict graph on a universe of subsets.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    pub n: u32,
    pub predicate: ConflictPredicate,
    vertices: Vec<SubsetWord>,
    adjacency: Vec<Vec<u32>>,
}

impl ConflictGraph {
    pub fn vertices(&self) -> &[SubsetWord] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn index_of(&self, set: SubsetWord) -> Option<usize> {
        self.vertices.binary_search(&set).ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, ns)| {
            ns.iter()
                .map(move |&j| (i, j as usize))
                .filter(|&(i, j)| i < j)
        })
    }
}

/// Edge `{A, B}` iff `A` conflicts with `B` in either order. The universe is
/// every subset of `[n]` with cardinality in `levels` (default: all).
pub fn conflict_graph(
    n: u32,
    predicate: ConflictPredicate,
    levels: Option<RangeInclusive<u32>>,
) -> Result<ConflictGraph> {
    if !(1..=64).contains(&n) {
        return Err(Error::GroundSetSize(n));
    }
    let levels = levels.unwrap_or(0..=n);
    let lo = *levels.start();
    let hi = (*levels.end()).min(n);
    let size: u128 = (lo..=hi).map(|k| binom_u64(n, k) as u128).sum();
    if size > GRAPH_LIMIT {
        return Err(Error::SizeGuard {
            what: "conflict graph universe",
            actual: size,
            limit: GRAPH_LIMIT,
        });
    }
    let vertices: Vec<SubsetWord> = (lo..=hi).flat_map(|k| level_words(n, k)).collect();
    let upper: Vec<Vec<u32>> = (0..vertices.len())
        .into_par_iter()
        .map(|i| {
            let a = vertices[i];
            (i + 1..vertices.len())
                .filter(|&j| predicate.conflicts_either(a, vertices[j]))
                .map(|j| j as u32)
                .collect()
        })
        .collect();
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for (i, row) in upper.iter().enumerate() {
        for &j in row {
            adjacency[i].push(j);
            adjacency[j as usize].push(i as u32);
        }
    }
    for row in &mut adjacency {
        row.sort_unstable();
    }
    Ok(ConflictGraph {
        n,
        predicate,
        vertices,
        adjacency,
    })
}

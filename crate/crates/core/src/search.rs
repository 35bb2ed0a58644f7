//! Exact maximum valid families (maximum independent sets of the conflict
//! graph) by branch and bound, and seeded greedy maximal families.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::binomial::binom_u64;
use crate::bounds::{build_lp, lp_optimum, LinearProgram, LpVariant};
use crate::error::{Error, Result};
use crate::predicates::{conflict_graph, verify_family, ConflictPredicate, VerifyStrategy};
use crate::rational::{floor_to_int, from_u64};
use crate::set::{all_subsets, GroundSet, SetFamily, SubsetWord};

#[derive(Debug, Clone)]
pub struct SearchBudget {
    /// Largest universe (number of vertices) searched.
    pub max_universe: usize,
    pub time_limit: Option<Duration>,
    /// Sequential search with a reproducible witness.
    pub deterministic: bool,
    /// Prune ratio searches with the level LP at shallow depth.
    pub lp_pruning: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_universe: 1 << 14,
            time_limit: None,
            deterministic: true,
            lp_pruning: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    ProvedOptimal,
    LowerBoundOnly,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub size: usize,
    pub witness: SetFamily,
    pub status: SearchStatus,
    pub nodes_expanded: u64,
}

/// Depth (number of chosen vertices) up to which the LP bound is evaluated.
const LP_DEPTH: usize = 1;

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .position(|&w| w != 0)
            .map(|k| k * 64 + self.0[k].trailing_zeros() as usize)
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and_not(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                (rest != 0).then(|| {
                    let bit = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    k * 64 + bit
                })
            })
        })
    }
}

struct Shared {
    best_size: AtomicUsize,
    best_set: Mutex<Vec<usize>>,
    nodes: AtomicU64,
    timed_out: AtomicBool,
    deadline: Option<Instant>,
}

struct Problem<'a> {
    adjacency: Vec<Bits>,
    levels: Vec<u32>,
    n: u32,
    lp: Option<LinearProgram>,
    shared: &'a Shared,
}

impl Problem<'_> {
    /// Number of cliques in a greedy clique cover of `cand`.
    fn clique_cover(&self, cand: &Bits) -> usize {
        let mut remaining = cand.clone();
        let mut cliques = 0;
        while let Some(v) = remaining.first() {
            cliques += 1;
            remaining.clear(v);
            let mut open = remaining.and(&self.adjacency[v]);
            while let Some(u) = open.first() {
                remaining.clear(u);
                open.clear(u);
                open = open.and(&self.adjacency[u]);
            }
        }
        cliques
    }

    /// Level-LP bound with `current` fixed and `cand` still available.
    fn lp_bound(&self, current: &[usize], cand: &Bits) -> Option<usize> {
        let base = self.lp.as_ref()?;
        let mut chosen = vec![0u64; self.n as usize + 1];
        for &v in current {
            chosen[self.levels[v] as usize] += 1;
        }
        let mut open = chosen.clone();
        for v in cand.iter() {
            open[self.levels[v] as usize] += 1;
        }
        let mut lp = base.clone();
        for j in 0..=self.n as usize {
            lp.lower[j] = from_u64(chosen[j]);
            lp.upper[j] = from_u64(open[j].min(binom_u64(self.n, j as u32)));
        }
        let optimum = lp_optimum(&lp).ok()?;
        floor_to_int(&optimum).to_usize()
    }

    fn out_of_time(&self) -> bool {
        let shared = self.shared;
        if shared.timed_out.load(AtomicOrdering::Relaxed) {
            return true;
        }
        let nodes = shared.nodes.fetch_add(1, AtomicOrdering::Relaxed);
        if nodes % 256 == 0 {
            if let Some(deadline) = shared.deadline {
                if Instant::now() >= deadline {
                    shared.timed_out.store(true, AtomicOrdering::Relaxed);
                    return true;
                }
            }
        }
        false
    }

    fn record(&self, current: &[usize]) {
        let shared = self.shared;
        if current.len() <= shared.best_size.load(AtomicOrdering::Relaxed) {
            return;
        }
        let mut best = shared.best_set.lock().unwrap();
        if current.len() > best.len() {
            *best = current.to_vec();
            shared.best_size.store(current.len(), AtomicOrdering::Relaxed);
        }
    }

    /// Include-first branching on the lowest-index candidate, so sets are
    /// visited in lexicographic order of their sorted vertex indices.
    fn expand(&self, current: &mut Vec<usize>, mut cand: Bits) {
        loop {
            if self.out_of_time() {
                return;
            }
            self.record(current);
            if cand.is_empty() {
                return;
            }
            let best = self.shared.best_size.load(AtomicOrdering::Relaxed);
            if current.len() + self.clique_cover(&cand) <= best {
                return;
            }
            if current.len() <= LP_DEPTH {
                if let Some(bound) = self.lp_bound(current, &cand) {
                    if bound <= best {
                        return;
                    }
                }
            }
            let v = cand.first().unwrap();
            cand.clear(v);
            current.push(v);
            self.expand(current, cand.and_not(&self.adjacency[v]));
            current.pop();
        }
    }
}

/// Lexicographically first maximal independent set.
fn greedy_in_order(adjacency: &[Bits], count: usize) -> Vec<usize> {
    let mut blocked = Bits::empty(count);
    let mut chosen = Vec::new();
    for v in 0..count {
        if blocked.0[v / 64] >> (v % 64) & 1 == 0 {
            chosen.push(v);
            blocked = Bits(blocked.0.iter().zip(&adjacency[v].0).map(|(a, b)| a | b).collect());
        }
    }
    chosen
}

fn check_universe(n: u32, budget_limit: usize) -> Result<GroundSet> {
    let ground = GroundSet::new(n)?;
    if n >= 63 || (1u128 << n) > budget_limit as u128 {
        return Err(Error::SizeGuard {
            what: "search universe 2^n",
            actual: 1u128 << n.min(127),
            limit: budget_limit as u128,
        });
    }
    Ok(ground)
}

/// Maximum family of subsets of `[n]` avoiding `predicate`.
pub fn max_family(n: u32, predicate: ConflictPredicate, budget: &SearchBudget) -> Result<SearchResult> {
    let ground = check_universe(n, budget.max_universe)?;
    let graph = conflict_graph(n, predicate, None)?;
    let count = graph.vertex_count();
    let adjacency: Vec<Bits> = (0..count)
        .map(|v| {
            let mut row = Bits::empty(count);
            for &u in graph.neighbors(v) {
                row.set(u as usize);
            }
            row
        })
        .collect();
    let lp = match predicate {
        ConflictPredicate::Ratio { p, q } if budget.lp_pruning => {
            let variant = if (p, q) == (1, 2) { LpVariant::Full } else { LpVariant::JkOnly };
            Some(build_lp(n, p, q, variant)?)
        }
        _ => None,
    };
    let initial = greedy_in_order(&adjacency, count);
    let shared = Shared {
        best_size: AtomicUsize::new(initial.len()),
        best_set: Mutex::new(initial),
        nodes: AtomicU64::new(0),
        timed_out: AtomicBool::new(false),
        deadline: budget.time_limit.map(|t| Instant::now() + t),
    };
    let problem = Problem {
        levels: graph.vertices().iter().map(|v| v.len()).collect(),
        adjacency,
        n,
        lp,
        shared: &shared,
    };
    let mut all = Bits::empty(count);
    for v in 0..count {
        all.set(v);
    }
    if budget.deterministic {
        problem.expand(&mut Vec::new(), all);
    } else {
        // Root split: branch v takes v as its lowest-index member.
        let root_bound = problem.lp_bound(&[], &all);
        let hopeless = root_bound.is_some_and(|b| b <= shared.best_size.load(AtomicOrdering::Relaxed));
        if !hopeless {
            (0..count).into_par_iter().for_each(|v| {
                let mut later = Bits::empty(count);
                for u in v + 1..count {
                    later.set(u);
                }
                problem.expand(&mut vec![v], later.and_not(&problem.adjacency[v]));
            });
        }
    }

    let best = shared.best_set.into_inner().unwrap();
    let members: Vec<SubsetWord> = best.iter().map(|&v| graph.vertices()[v]).collect();
    let witness = SetFamily::new(ground, members)?;
    let report = verify_family(&witness, predicate, VerifyStrategy::Pairwise, 1)?;
    if let Some(&(a, b)) = report.violations.first() {
        return Err(Error::InvalidFamily {
            predicate: predicate.to_string(),
            a,
            b,
        });
    }
    let status = if shared.timed_out.load(AtomicOrdering::Relaxed) {
        SearchStatus::LowerBoundOnly
    } else {
        SearchStatus::ProvedOptimal
    };
    Ok(SearchResult {
        size: witness.len(),
        witness,
        status,
        nodes_expanded: shared.nodes.load(AtomicOrdering::Relaxed),
    })
}

/// A maximal valid family from a seeded random scan of all subsets.
pub fn greedy_family(n: u32, predicate: ConflictPredicate, seed: u64) -> Result<SetFamily> {
    let ground = check_universe(n, SearchBudget::default().max_universe)?;
    let mut order = all_subsets(ground)?;
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut chosen: Vec<SubsetWord> = Vec::new();
    for candidate in order {
        if chosen.iter().all(|&c| !predicate.conflicts_either(candidate, c)) {
            chosen.push(candidate);
        }
    }
    SetFamily::new(ground, chosen)
}

//! Families of subsets of `[n]` that avoid tilted Sperner configurations:
//! forbidden ratio `p|A \ B| = q|B \ A|`, forbidden exact distance
//! `|A \ B| = k`, and forbidden distance `|A \ B| <= k`.
//!
//! The crate builds the known extremal constructions, verifies families
//! against a predicate, finds exact maxima at small `n` by branch and
//! bound, and bounds family sizes with LYM-type window inequalities solved
//! as exact rational linear programs.

pub mod binomial;
pub mod bounds;
pub mod chains;
pub mod constructions;
pub mod error;
pub mod family_file;
pub mod predicates;
pub mod profile;
pub mod rational;
pub mod report;
pub mod search;
pub mod set;
pub mod shadow;
pub mod simplex;

pub use binomial::{binom_u64, binomial, BinomialTable};
pub use bounds::{
    atmostk_weight_bound, build_lp, check_windows, distance1_level_bound, lp_closed_form_jk,
    solve_lp_exact, window_sets_12, window_sets_pq, LinearProgram, LpSolution, LpVariant,
    Uniqueness, Window,
};
pub use chains::{
    chain_family_12, chain_family_pq, estimate_membership, expected_hits, random_ordering,
    ChainFamily, Ordering,
};
pub use constructions::{
    build_b0, build_interval_family, build_level_union, build_modular_family,
    build_power_sum_family, index_set_i, ConstructionSpec, LevelIndexSet,
};
pub use error::{Error, Result};
pub use family_file::{format_family, parse_family};
pub use predicates::{
    conflict_graph, level_conflict, level_conflict_ratio, pair_conflicts, verify_family,
    ConflictGraph, ConflictPredicate, VerificationReport, VerifyStrategy,
};
pub use profile::{profile_of, LevelProfile};
pub use rational::Rational;
pub use search::{greedy_family, max_family, SearchBudget, SearchResult, SearchStatus};
pub use set::{GroundSet, SetFamily, SubsetWord};
pub use shadow::{is_antichain, k_shadow, ShadowResult};

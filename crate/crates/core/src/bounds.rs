//! Window (LYM-type) inequalities, the level linear programs and their exact
//! solutions, and the finite-n distance bounds.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::binomial::{binom_u64, binomial};
use crate::error::{Error, Result};
use crate::predicates::{require_valid, ConflictPredicate};
use crate::profile::{profile_of, LevelProfile};
use crate::rational::{from_u64, from_uint, ratio, Rational};
use crate::set::SetFamily;
use crate::simplex::{self, Problem, Row, Sense};

/// A set of levels `W` standing for `sum_{j in W} x_j / binom(n, j) <= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Window {
    pub label: String,
    pub levels: Vec<u32>,
}

impl Window {
    fn interval(lo: u32, hi: u32) -> Self {
        Self {
            label: format!("[{lo},{hi}]"),
            levels: (lo..=hi).collect(),
        }
    }
}

/// `[l, 2l]` for `l = 0..=floor(n/3)` and `[2k - n, k]` for `k = ceil(2n/3)..=n`.
pub fn window_sets_12(n: u32) -> Vec<Window> {
    let lower = (0..=n / 3).map(|l| Window::interval(l, 2 * l));
    let upper = (2 * n).div_ceil(3)..=n;
    lower
        .chain(upper.map(|k| Window::interval(2 * k - n, k)))
        .collect()
}

/// The classes `J_0, ..., J_{q-p-1}` of levels in
/// `[ceil(pn/(p+q)), floor(qn/(p+q))]`, split by residue mod `q - p`.
pub fn window_sets_pq(n: u32, p: u32, q: u32) -> Result<Vec<Window>> {
    ConflictPredicate::ratio(p, q)?;
    let (n64, p64, q64) = (n as u64, p as u64, q as u64);
    let lo = (p64 * n64).div_ceil(p64 + q64);
    let hi = q64 * n64 / (p64 + q64);
    let width = q - p;
    Ok((0..width)
        .map(|k| Window {
            label: format!("J_{k}"),
            levels: (lo..=hi)
                .filter(|l| l % width as u64 == k as u64)
                .map(|l| l as u32)
                .collect(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowCheck {
    pub sums: Vec<Rational>,
    pub pass: Vec<bool>,
    pub all_pass: bool,
}

/// `sum_{j in W} profile[j] / binom(n, j)` for every window.
pub fn check_windows(profile: &LevelProfile, windows: &[Window]) -> WindowCheck {
    let n = profile.n() as i64;
    let sums: Vec<Rational> = windows
        .iter()
        .map(|w| {
            w.levels
                .iter()
                .map(|&j| profile.get(j as usize) / from_uint(&binomial(n, j as i64)))
                .sum()
        })
        .collect();
    let pass: Vec<bool> = sums.iter().map(|s| *s <= Rational::one()).collect();
    WindowCheck {
        all_pass: pass.iter().all(|&p| p),
        sums,
        pass,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpVariant {
    /// Every window of [`window_sets_12`]; ratio 1:2 only.
    Full,
    /// Only the `J_k` classes.
    JkOnly,
}

/// `maximize sum x_j` subject to window rows and `lower_j <= x_j <= upper_j`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub n: u32,
    pub windows: Vec<Window>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

impl LinearProgram {
    /// Box constraints `0 <= x_j <= binom(n, j)`.
    pub fn with_windows(n: u32, windows: Vec<Window>) -> Self {
        Self {
            n,
            windows,
            lower: vec![Rational::zero(); n as usize + 1],
            upper: (0..=n)
                .map(|j| from_uint(&binomial(n as i64, j as i64)))
                .collect(),
        }
    }

    pub fn window_count(&self) -> usize {
        self.windows.len()
    }

    pub fn box_count(&self) -> usize {
        self.upper.len()
    }

    /// Shifted to `y = x - lower >= 0`: window rows, then one box row per level.
    fn to_problem(&self) -> Problem {
        let vars = self.n as usize + 1;
        let inv_binom: Vec<Rational> = (0..=self.n)
            .map(|j| ratio(&BigUint::one(), &binomial(self.n as i64, j as i64)))
            .collect();
        let mut rows = Vec::with_capacity(self.windows.len() + vars);
        for w in &self.windows {
            let mut coeffs = vec![Rational::zero(); vars];
            let mut rhs = Rational::one();
            for &j in &w.levels {
                coeffs[j as usize] += &inv_binom[j as usize];
                rhs -= &self.lower[j as usize] * &inv_binom[j as usize];
            }
            rows.push(Row {
                coeffs,
                sense: Sense::Le,
                rhs,
            });
        }
        for j in 0..vars {
            let mut coeffs = vec![Rational::zero(); vars];
            coeffs[j] = Rational::one();
            rows.push(Row {
                coeffs,
                sense: Sense::Le,
                rhs: &self.upper[j] - &self.lower[j],
            });
        }
        Problem {
            objective: vec![Rational::one(); vars],
            rows,
        }
    }
}

pub fn build_lp(n: u32, p: u32, q: u32, variant: LpVariant) -> Result<LinearProgram> {
    ConflictPredicate::ratio(p, q)?;
    let windows = match variant {
        LpVariant::Full if (p, q) != (1, 2) => {
            return Err(Error::OutOfRange(format!(
                "the full window family exists only for ratio 1:2, not {p}:{q}"
            )))
        }
        LpVariant::Full => window_sets_12(n),
        LpVariant::JkOnly => window_sets_pq(n, p, q)?,
    };
    Ok(LinearProgram::with_windows(n, windows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Uniqueness {
    Unique,
    Multiple,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub optimum: Rational,
    pub profile: LevelProfile,
    pub uniqueness: Uniqueness,
    /// Window multipliers followed by box multipliers.
    pub dual: Vec<Rational>,
    /// `dual` is feasible and its bound equals the optimum exactly.
    pub certificate_verified: bool,
}

/// Exact optimum by two-phase simplex (Bland's rule). Uniqueness is read off
/// the reduced costs when they are all strictly negative; otherwise each
/// coordinate is minimized and maximized over the optimal face.
pub fn solve_lp_exact(lp: &LinearProgram) -> Result<LpSolution> {
    let problem = lp.to_problem();
    let opt = simplex::solve(&problem)?;
    let certificate_verified = simplex::verify_dual_certificate(&problem, &opt.duals, &opt.value);
    let uniqueness = if opt.strictly_unique {
        Uniqueness::Unique
    } else {
        face_uniqueness(&problem, &opt.value)?
    };
    let offset: Rational = lp.lower.iter().sum();
    let profile = LevelProfile::new(
        opt.x
            .iter()
            .zip(&lp.lower)
            .map(|(y, lo)| y + lo)
            .collect(),
    );
    Ok(LpSolution {
        optimum: opt.value + offset,
        profile,
        uniqueness,
        dual: opt.duals,
        certificate_verified,
    })
}

/// Optimum only, skipping the uniqueness analysis.
pub fn lp_optimum(lp: &LinearProgram) -> Result<Rational> {
    let problem = lp.to_problem();
    let offset: Rational = lp.lower.iter().sum();
    Ok(simplex::solve(&problem)?.value + offset)
}

fn face_uniqueness(problem: &Problem, value: &Rational) -> Result<Uniqueness> {
    let vars = problem.objective.len();
    let mut face = problem.clone();
    face.rows.push(Row {
        coeffs: problem.objective.clone(),
        sense: Sense::Ge,
        rhs: value.clone(),
    });
    for j in 0..vars {
        let mut range = [Rational::zero(), Rational::zero()];
        for (slot, sign) in [(0, 1i32), (1, -1i32)] {
            let mut objective = vec![Rational::zero(); vars];
            objective[j] = Rational::from_integer(sign.into());
            face.objective = objective;
            range[slot] = simplex::solve(&face)?.value;
        }
        if range[0] != -range[1].clone() {
            return Ok(Uniqueness::Multiple);
        }
    }
    Ok(Uniqueness::Unique)
}

/// Independent optimum of the `J_k`-only LP: free levels count in full and
/// each class contributes its largest binomial.
pub fn lp_closed_form_jk(n: u32, p: u32, q: u32) -> Result<Rational> {
    let windows = window_sets_pq(n, p, q)?;
    let b = |j: u32| binomial(n as i64, j as i64);
    let covered: Vec<u32> = windows.iter().flat_map(|w| w.levels.iter().copied()).collect();
    let outside: BigUint = (0..=n).filter(|j| !covered.contains(j)).map(b).sum();
    let classes: BigUint = windows
        .iter()
        .map(|w| w.levels.iter().map(|&j| b(j)).max().unwrap_or_default())
        .sum();
    Ok(from_uint(&(outside + classes)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Distance1Level {
    pub level: u32,
    pub count: u64,
    /// `(n - i) |F_i|`
    pub lhs: u128,
    /// `binom(n, i + 1)`
    pub rhs: u128,
    pub slack: u128,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Distance1Report {
    pub levels: Vec<Distance1Level>,
    pub all_pass: bool,
}

/// Double count of pairs `A ⊂ B` with `A in F_i`, `|B| = i + 1`: in a family
/// without `|A \ B| = 1`, each such `B` lies above at most one member.
pub fn distance1_level_bound(family: &SetFamily) -> Result<Distance1Report> {
    require_valid(family, ConflictPredicate::ExactDistance(1))?;
    let n = family.n();
    let levels: Vec<Distance1Level> = (0..n)
        .map(|i| {
            let count = family.level(i).len() as u64;
            let lhs = (n - i) as u128 * count as u128;
            let rhs = binom_u64(n, i + 1) as u128;
            Distance1Level {
                level: i,
                count,
                lhs,
                rhs,
                slack: rhs.saturating_sub(lhs),
                pass: lhs <= rhs,
            }
        })
        .collect();
    Ok(Distance1Report {
        all_pass: levels.iter().all(|l| l.pass),
        levels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WeightBound {
    /// `sum_{A in F} binom(|A|, k)`
    pub weight: u128,
    /// `binom(n, floor(n/2))`
    pub bound: u128,
    pub pass: bool,
}

/// In a family with `|A \ B| > k` the k-shadows of distinct members are
/// disjoint and their union is an antichain, so the weight is at most the
/// middle binomial.
pub fn atmostk_weight_bound(family: &SetFamily, k: u32) -> Result<WeightBound> {
    require_valid(family, ConflictPredicate::AtMostDistance(k))?;
    let n = family.n();
    let weight: u128 = family.iter().map(|a| binom_u64(a.len(), k) as u128).sum();
    let bound = binom_u64(n, n / 2) as u128;
    Ok(WeightBound {
        weight,
        bound,
        pass: weight <= bound,
    })
}

/// `sum_{j in levels} |F_j| / binom(n, j)`: the expected number of chain
/// members hit by `family`.
pub fn lym_sum(family: &SetFamily, levels: &[u32]) -> Rational {
    let window = Window {
        label: String::new(),
        levels: levels.to_vec(),
    };
    check_windows(&profile_of(family), &[window]).sums.remove(0)
}

pub fn middle_binomial(n: u32) -> Rational {
    from_u64(binom_u64(n, n / 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_b0, build_modular_family};
    use crate::rational::parse_rational;
    use crate::set::{GroundSet, SubsetWord};

    fn r(text: &str) -> Rational {
        parse_rational(text).unwrap()
    }

    fn labels(ws: &[Window]) -> Vec<String> {
        ws.iter().map(|w| w.label.clone()).collect()
    }

    #[test]
    fn window_examples() {
        assert_eq!(labels(&window_sets_12(4)), ["[0,0]", "[1,2]", "[2,3]", "[4,4]"]);
        assert_eq!(labels(&window_sets_12(3)), ["[0,0]", "[1,2]", "[1,2]", "[3,3]"]);
        assert_eq!(labels(&window_sets_12(1)), ["[0,0]", "[1,1]"]);
        assert_eq!(window_sets_pq(4, 1, 2).unwrap()[0].levels, vec![2]);
        let j = window_sets_pq(5, 1, 3).unwrap();
        assert_eq!((j[0].levels.clone(), j[1].levels.clone()), (vec![2], vec![3]));
        assert_eq!(window_sets_pq(6, 1, 2).unwrap()[0].levels, vec![2, 3, 4]);
        assert!(window_sets_pq(6, 2, 4).is_err());
    }

    #[test]
    fn b0_is_tight_on_a_window() {
        let profile = profile_of(&build_b0(6).unwrap());
        let check = check_windows(&profile, &[Window::interval(1, 2)]);
        assert_eq!(check.sums, vec![Rational::one()]);
        assert!(check.all_pass);
        let zero = check_windows(&LevelProfile::zeros(6), &window_sets_12(6));
        assert!(zero.sums.iter().all(Zero::is_zero));
    }

    #[test]
    fn lp_shapes() {
        let lp = build_lp(4, 1, 2, LpVariant::Full).unwrap();
        assert_eq!((lp.window_count(), lp.box_count()), (4, 5));
        let lp = build_lp(6, 1, 2, LpVariant::JkOnly).unwrap();
        assert_eq!((lp.window_count(), lp.box_count()), (1, 7));
        assert_eq!(lp.windows[0].levels, vec![2, 3, 4]);
        assert_eq!(build_lp(9, 2, 5, LpVariant::JkOnly).unwrap().window_count(), 3);
        assert!(build_lp(6, 1, 3, LpVariant::Full).is_err());
    }

    #[test]
    fn lp_hand_solutions() {
        let sol = solve_lp_exact(&build_lp(4, 1, 2, LpVariant::Full).unwrap()).unwrap();
        assert_eq!(sol.optimum, r("10"));
        assert_eq!(sol.profile, LevelProfile::from_integers([1, 4, 0, 4, 1]));
        assert_eq!(sol.uniqueness, Uniqueness::Unique);
        assert!(sol.certificate_verified);

        let sol = solve_lp_exact(&build_lp(3, 1, 2, LpVariant::Full).unwrap()).unwrap();
        assert_eq!(sol.optimum, r("5"));
        assert_eq!(sol.uniqueness, Uniqueness::Multiple);
        assert!(sol.certificate_verified);
    }

    #[test]
    fn lp_full_dominates_b0() {
        for n in (2..=24).step_by(2) {
            let b0 = profile_of(&build_b0(n.min(20)).unwrap());
            let lp = build_lp(n, 1, 2, LpVariant::Full).unwrap();
            let sol = solve_lp_exact(&lp).unwrap();
            assert!(sol.certificate_verified);
            if n <= 20 {
                assert!(check_windows(&b0, &lp.windows).all_pass);
                assert!(sol.optimum >= b0.total(), "n={n}");
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(lp_closed_form_jk(4, 1, 2).unwrap(), r("16"));
        assert_eq!(lp_closed_form_jk(6, 1, 2).unwrap(), r("34"));
        assert_eq!(lp_closed_form_jk(5, 1, 3).unwrap(), r("32"));
        for (n, p, q) in [(4, 1, 2), (6, 1, 2), (5, 1, 3), (11, 2, 5)] {
            let lp = build_lp(n, p, q, LpVariant::JkOnly).unwrap();
            assert_eq!(solve_lp_exact(&lp).unwrap().optimum, lp_closed_form_jk(n, p, q).unwrap());
        }
    }

    #[test]
    fn simplex_matches_vertex_enumeration_on_small_lps() {
        for n in 1..=5 {
            let lp = build_lp(n, 1, 2, LpVariant::Full).unwrap();
            let problem = lp.to_problem();
            let brute = simplex::vertex_enumeration_max(&problem, 5_000_000).unwrap();
            assert_eq!(solve_lp_exact(&lp).unwrap().optimum, brute, "n={n}");
        }
    }

    #[test]
    fn lower_bounds_shift_the_problem() {
        let mut lp = build_lp(4, 1, 2, LpVariant::Full).unwrap();
        lp.lower[2] = r("6");
        let sol = solve_lp_exact(&lp).unwrap();
        assert_eq!(sol.optimum, r("8"));
        assert_eq!(sol.profile, LevelProfile::from_integers([1, 0, 6, 0, 1]));
        lp.lower[1] = r("1");
        assert_eq!(solve_lp_exact(&lp).unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn distance1_examples() {
        let g3 = GroundSet::new(3).unwrap();
        let f = SetFamily::new(g3, [SubsetWord::EMPTY, SubsetWord(0b111)]).unwrap();
        let report = distance1_level_bound(&f).unwrap();
        assert_eq!((report.levels[0].lhs, report.levels[0].rhs, report.levels[0].slack), (3, 3, 0));
        assert!(report.all_pass);

        let (modular, _) = build_modular_family(4, None).unwrap();
        let report = distance1_level_bound(&modular).unwrap();
        assert_eq!((report.levels[2].lhs, report.levels[2].rhs), (4, 4));

        let empty = distance1_level_bound(&SetFamily::empty(g3)).unwrap();
        assert!(empty.levels.iter().all(|l| l.lhs == 0 && l.pass));

        let bad = SetFamily::new(g3, [SubsetWord::EMPTY, SubsetWord(1)]).unwrap();
        assert!(matches!(distance1_level_bound(&bad), Err(Error::InvalidFamily { .. })));
    }

    #[test]
    fn weight_examples() {
        let g5 = GroundSet::new(5).unwrap();
        let f = SetFamily::new(g5, [SubsetWord(0b1001), SubsetWord(0b0110)]).unwrap();
        assert_eq!(
            atmostk_weight_bound(&f, 1).unwrap(),
            WeightBound { weight: 4, bound: 10, pass: true }
        );
        assert_eq!(atmostk_weight_bound(&SetFamily::empty(g5), 2).unwrap().weight, 0);
        let bad = SetFamily::new(g5, [SubsetWord(0b1), SubsetWord(0b11)]).unwrap();
        assert!(atmostk_weight_bound(&bad, 1).is_err());
    }
}

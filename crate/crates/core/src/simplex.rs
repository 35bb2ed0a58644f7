//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Problems are `maximize c.x` subject to linear rows and `x >= 0`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub sense: Sense,
    pub rhs: Rational,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub objective: Vec<Rational>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone)]
pub struct Optimum {
    pub x: Vec<Rational>,
    pub value: Rational,
    /// One multiplier per row of the original problem.
    pub duals: Vec<Rational>,
    /// True when every nonbasic reduced cost is strictly negative, which
    /// makes the optimal point unique. False means "not decided here".
    pub strictly_unique: bool,
    pub pivots: usize,
}

struct Tableau {
    /// `rows.len() == m`; each row has `cols + 1` entries, the last is the rhs.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs `c_j - c_B B^-1 A_j`, one per column.
    reduced: Vec<Rational>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        if !self.reduced[c].is_zero() {
            let factor = self.reduced[c].clone();
            for (v, p) in self.reduced.iter_mut().zip(&pivot_row[..self.cols]) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        self.reduced = costs.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (d, a) in self.reduced.iter_mut().zip(&row[..self.cols]) {
                if !a.is_zero() {
                    *d -= cb * a;
                }
            }
        }
    }

    /// Bland's rule until optimal. `allowed` masks columns that may enter.
    fn optimize(&mut self, allowed: &[bool]) -> Result<()> {
        loop {
            let Some(entering) = (0..self.cols).find(|&j| allowed[j] && self.reduced[j].is_positive()) else {
                return Ok(());
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[entering];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / a;
                let better = match &leaving {
                    None => true,
                    Some((best_i, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*best_i])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((r, _)) = leaving else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, entering);
        }
    }

    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.cols]
    }
}

/// Solves `problem`; `Err(Infeasible)` or `Err(Unbounded)` otherwise.
pub fn solve(problem: &Problem) -> Result<Optimum> {
    let nv = problem.objective.len();
    let m = problem.rows.len();
    assert!(problem.rows.iter().all(|r| r.coeffs.len() == nv));

    // Normalize to rhs >= 0.
    let mut signs = Vec::with_capacity(m);
    let mut senses = Vec::with_capacity(m);
    for row in &problem.rows {
        if row.rhs.is_negative() {
            signs.push(-Rational::one());
            senses.push(match row.sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            });
        } else {
            signs.push(Rational::one());
            senses.push(row.sense);
        }
    }

    // Column layout: originals, one slack/surplus per inequality, one
    // artificial per Ge/Eq row. `initial[i]` is the unit column basic in row i.
    let mut cols = nv;
    let mut slack_col = vec![None; m];
    for (i, s) in senses.iter().enumerate() {
        if *s != Sense::Eq {
            slack_col[i] = Some(cols);
            cols += 1;
        }
    }
    let mut initial = vec![0; m];
    for (i, s) in senses.iter().enumerate() {
        match s {
            Sense::Le => initial[i] = slack_col[i].unwrap(),
            _ => {
                initial[i] = cols;
                cols += 1;
            }
        }
    }
    let mut artificial = vec![false; cols];
    for (i, s) in senses.iter().enumerate() {
        if *s != Sense::Le {
            artificial[initial[i]] = true;
        }
    }

    let mut rows = Vec::with_capacity(m);
    for (i, row) in problem.rows.iter().enumerate() {
        let mut t = vec![Rational::zero(); cols + 1];
        for (j, a) in row.coeffs.iter().enumerate() {
            t[j] = a * &signs[i];
        }
        if let Some(s) = slack_col[i] {
            t[s] = if senses[i] == Sense::Le {
                Rational::one()
            } else {
                -Rational::one()
            };
        }
        t[initial[i]] = Rational::one();
        t[cols] = &row.rhs * &signs[i];
        rows.push(t);
    }
    let mut tab = Tableau {
        rows,
        reduced: Vec::new(),
        basis: initial.clone(),
        cols,
        pivots: 0,
    };

    if artificial.iter().any(|&a| a) {
        let costs: Vec<Rational> = artificial
            .iter()
            .map(|&a| if a { -Rational::one() } else { Rational::zero() })
            .collect();
        tab.set_costs(&costs);
        tab.optimize(&vec![true; cols])?;
        let infeasibility: Rational = (0..m)
            .filter(|&i| artificial[tab.basis[i]])
            .map(|i| tab.rhs(i).clone())
            .sum();
        if infeasibility.is_positive() {
            return Err(Error::Infeasible);
        }
        // Drive zero-level artificials out where possible; rows where no
        // original or slack column is nonzero are redundant and keep theirs.
        for i in 0..m {
            if artificial[tab.basis[i]] {
                if let Some(j) = (0..cols).find(|&j| !artificial[j] && !tab.rows[i][j].is_zero()) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    let mut costs = vec![Rational::zero(); cols];
    costs[..nv].clone_from_slice(&problem.objective);
    tab.set_costs(&costs);
    let allowed: Vec<bool> = artificial.iter().map(|&a| !a).collect();
    tab.optimize(&allowed)?;

    let mut x = vec![Rational::zero(); nv];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < nv {
            x[b] = tab.rhs(i).clone();
        }
    }
    let value: Rational = x.iter().zip(&problem.objective).map(|(a, b)| a * b).sum();
    // y_i = c_{initial i} - d_{initial i}, and every initial column costs zero.
    let duals: Vec<Rational> = (0..m).map(|i| -&tab.reduced[initial[i]] * &signs[i]).collect();
    let in_basis: Vec<bool> = {
        let mut v = vec![false; cols];
        for &b in &tab.basis {
            v[b] = true;
        }
        v
    };
    let strictly_unique = (0..cols)
        .filter(|&j| allowed[j] && !in_basis[j])
        .all(|j| tab.reduced[j].is_negative());
    Ok(Optimum {
        x,
        value,
        duals,
        strictly_unique,
        pivots: tab.pivots,
    })
}

/// Exact primal feasibility of `x`.
pub fn is_feasible(problem: &Problem, x: &[Rational]) -> bool {
    x.iter().all(|v| !v.is_negative())
        && problem.rows.iter().all(|row| {
            let lhs: Rational = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            match row.sense {
                Sense::Le => lhs <= row.rhs,
                Sense::Ge => lhs >= row.rhs,
                Sense::Eq => lhs == row.rhs,
            }
        })
}

/// Checks that `duals` prove `value` is an upper bound: sign conditions per
/// row sense, `A^T y >= c`, and `b.y == value`.
pub fn verify_dual_certificate(problem: &Problem, duals: &[Rational], value: &Rational) -> bool {
    if duals.len() != problem.rows.len() {
        return false;
    }
    let signs_ok = problem.rows.iter().zip(duals).all(|(row, y)| match row.sense {
        Sense::Le => !y.is_negative(),
        Sense::Ge => !y.is_positive(),
        Sense::Eq => true,
    });
    let columns_ok = problem.objective.iter().enumerate().all(|(j, c)| {
        let lhs: Rational = problem.rows.iter().zip(duals).map(|(row, y)| &row.coeffs[j] * y).sum();
        lhs >= *c
    });
    let bound: Rational = problem.rows.iter().zip(duals).map(|(row, y)| &row.rhs * y).sum();
    signs_ok && columns_ok && bound == *value
}

/// Brute-force optimum over all basic feasible points: every choice of `nv`
/// tight constraints (rows as equalities, or `x_j = 0`) solved exactly.
/// Exponential; intended as an independent cross-check on tiny problems.
pub fn vertex_enumeration_max(problem: &Problem, max_combinations: u128) -> Result<Rational> {
    let nv = problem.objective.len();
    let mut hyperplanes: Vec<(Vec<Rational>, Rational)> = problem
        .rows
        .iter()
        .map(|r| (r.coeffs.clone(), r.rhs.clone()))
        .collect();
    for j in 0..nv {
        let mut e = vec![Rational::zero(); nv];
        e[j] = Rational::one();
        hyperplanes.push((e, Rational::zero()));
    }
    let total = hyperplanes.len();
    let combinations = crate::binomial::binomial(total as i64, nv as i64);
    if combinations > num_bigint::BigUint::from(max_combinations) {
        return Err(Error::SizeGuard {
            what: "vertex enumeration combinations",
            actual: u128::MAX,
            limit: max_combinations,
        });
    }
    let mut best: Option<Rational> = None;
    let mut choice: Vec<usize> = (0..nv).collect();
    loop {
        let system: Vec<&(Vec<Rational>, Rational)> = choice.iter().map(|&i| &hyperplanes[i]).collect();
        if let Some(x) = solve_square(&system) {
            if is_feasible(problem, &x) {
                let value: Rational = x.iter().zip(&problem.objective).map(|(a, b)| a * b).sum();
                if best.as_ref().map_or(true, |b| value > *b) {
                    best = Some(value);
                }
            }
        }
        // Next combination in lexicographic order.
        let mut i = nv;
        loop {
            if i == 0 {
                return best.ok_or(Error::Infeasible);
            }
            i -= 1;
            if choice[i] < total - nv + i {
                choice[i] += 1;
                for k in i + 1..nv {
                    choice[k] = choice[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Gauss-Jordan on a square system; `None` if singular.
fn solve_square(system: &[&(Vec<Rational>, Rational)]) -> Option<Vec<Rational>> {
    let n = system.len();
    let mut a: Vec<Vec<Rational>> = system
        .iter()
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = Rational::one() / &a[col][col];
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * p;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;
    use proptest::prelude::*;

    fn r(text: &str) -> Rational {
        parse_rational(text).unwrap()
    }

    fn row(coeffs: &[&str], sense: Sense, rhs: &str) -> Row {
        Row {
            coeffs: coeffs.iter().map(|c| r(c)).collect(),
            sense,
            rhs: r(rhs),
        }
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y; x <= 4; 2y <= 12; 3x + 2y <= 18  ->  36 at (2, 6).
        let problem = Problem {
            objective: vec![r("3"), r("5")],
            rows: vec![
                row(&["1", "0"], Sense::Le, "4"),
                row(&["0", "2"], Sense::Le, "12"),
                row(&["3", "2"], Sense::Le, "18"),
            ],
        };
        let opt = solve(&problem).unwrap();
        assert_eq!(opt.value, r("36"));
        assert_eq!(opt.x, vec![r("2"), r("6")]);
        assert!(verify_dual_certificate(&problem, &opt.duals, &opt.value));
        assert_eq!(vertex_enumeration_max(&problem, 1000).unwrap(), r("36"));
    }

    #[test]
    fn mixed_senses() {
        // max x + y; x + y = 3; x >= 1; y <= 1/2 -> 3.
        let problem = Problem {
            objective: vec![r("1"), r("1")],
            rows: vec![
                row(&["1", "1"], Sense::Eq, "3"),
                row(&["1", "0"], Sense::Ge, "1"),
                row(&["0", "1"], Sense::Le, "1/2"),
            ],
        };
        let opt = solve(&problem).unwrap();
        assert_eq!(opt.value, r("3"));
        assert!(is_feasible(&problem, &opt.x));
        assert!(verify_dual_certificate(&problem, &opt.duals, &opt.value));

        // min x (as max -x) with x >= 2 and a negative-rhs row.
        let problem = Problem {
            objective: vec![r("-1")],
            rows: vec![row(&["-1"], Sense::Le, "-2")],
        };
        let opt = solve(&problem).unwrap();
        assert_eq!(opt.value, r("-2"));
        assert!(verify_dual_certificate(&problem, &opt.duals, &opt.value));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let infeasible = Problem {
            objective: vec![r("1")],
            rows: vec![row(&["1"], Sense::Le, "1"), row(&["1"], Sense::Ge, "2")],
        };
        assert_eq!(solve(&infeasible).unwrap_err(), Error::Infeasible);
        let unbounded = Problem {
            objective: vec![r("1"), r("0")],
            rows: vec![row(&["0", "1"], Sense::Le, "1")],
        };
        assert_eq!(solve(&unbounded).unwrap_err(), Error::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let problem = Problem {
            objective: vec![r("1"), r("2")],
            rows: vec![
                row(&["1", "1"], Sense::Eq, "2"),
                row(&["2", "2"], Sense::Eq, "4"),
            ],
        };
        let opt = solve(&problem).unwrap();
        assert_eq!(opt.value, r("4"));
        assert!(verify_dual_certificate(&problem, &opt.duals, &opt.value));
    }

    proptest! {
        #[test]
        fn agrees_with_vertex_enumeration(
            coeffs in proptest::collection::vec(0i64..6, 9),
            rhs in proptest::collection::vec(0i64..10, 3),
            objective in proptest::collection::vec(-3i64..6, 3),
        ) {
            let to_r = |v: i64| Rational::from_integer(v.into());
            let mut rows: Vec<Row> = (0..3).map(|i| Row {
                coeffs: coeffs[3 * i..3 * i + 3].iter().map(|&v| to_r(v)).collect(),
                sense: Sense::Le,
                rhs: to_r(rhs[i]),
            }).collect();
            for j in 0..3 {
                let mut e = vec![to_r(0); 3];
                e[j] = to_r(1);
                rows.push(Row { coeffs: e, sense: Sense::Le, rhs: to_r(7) });
            }
            let problem = Problem { objective: objective.iter().map(|&v| to_r(v)).collect(), rows };
            let opt = solve(&problem).unwrap();
            prop_assert!(is_feasible(&problem, &opt.x));
            prop_assert!(verify_dual_certificate(&problem, &opt.duals, &opt.value));
            prop_assert_eq!(opt.value, vertex_enumeration_max(&problem, 10_000).unwrap());
        }
    }
}

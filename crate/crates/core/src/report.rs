//! Per-n reproduction table: `|B0|`, LP bounds, exact maxima and the
//! middle binomial.

use std::time::Duration;

use num_bigint::BigUint;
use serde::Serialize;

use crate::binomial::binomial;
use crate::bounds::{build_lp, lp_closed_form_jk, lp_optimum, LpVariant};
use crate::constructions::b0_size;
use crate::error::Result;
use crate::predicates::ConflictPredicate;
use crate::rational::{format_rational, from_uint, to_f64, Rational};
use crate::search::{max_family, SearchBudget, SearchStatus};

#[derive(Debug, Clone)]
pub struct TableRow {
    pub n: u32,
    pub b0: Option<BigUint>,
    pub lp_full: Rational,
    pub lp_jk: Rational,
    pub exact_max: Option<usize>,
    pub middle: BigUint,
}

#[derive(Debug, Clone)]
pub struct TableOptions {
    /// Rows with `n` above this get no exact maximum.
    pub exact_max_n: u32,
    /// Per-row time limit for the exact search.
    pub exact_time_limit: Option<Duration>,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            exact_max_n: 6,
            exact_time_limit: Some(Duration::from_secs(30)),
        }
    }
}

pub fn table_row(n: u32, options: &TableOptions) -> Result<TableRow> {
    let b0 = if n % 2 == 0 { Some(b0_size(n)?) } else { None };
    let lp_full = lp_optimum(&build_lp(n, 1, 2, LpVariant::Full)?)?;
    let lp_jk = lp_closed_form_jk(n, 1, 2)?;
    let exact_max = if n <= options.exact_max_n {
        let budget = SearchBudget {
            time_limit: options.exact_time_limit,
            ..SearchBudget::default()
        };
        let result = max_family(n, ConflictPredicate::Ratio { p: 1, q: 2 }, &budget)?;
        (result.status == SearchStatus::ProvedOptimal).then_some(result.size)
    } else {
        None
    };
    Ok(TableRow {
        n,
        b0,
        lp_full,
        lp_jk,
        exact_max,
        middle: binomial(n as i64, n as i64 / 2),
    })
}

pub fn table(min_n: u32, max_n: u32, options: &TableOptions) -> Result<Vec<TableRow>> {
    (min_n..=max_n).map(|n| table_row(n, options)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRecord {
    pub n: u32,
    pub b0: String,
    pub lp_full: String,
    pub lp_jk: String,
    pub exact_max: String,
    pub middle_binomial: String,
    pub b0_over_middle: String,
    pub lp_full_over_middle: String,
    pub lp_full_equals_b0: String,
}

pub const TABLE_COLUMNS: [&str; 9] = [
    "n",
    "b0",
    "lp_full",
    "lp_jk",
    "exact_max",
    "middle_binomial",
    "b0_over_middle",
    "lp_full_over_middle",
    "lp_full_equals_b0",
];

/// Display form of a row; unavailable entries are `-`, except a missing
/// exact maximum, which is blank.
impl From<&TableRow> for TableRecord {
    fn from(row: &TableRow) -> Self {
        let dash = || "-".to_string();
        let middle = from_uint(&row.middle);
        let b0 = row.b0.as_ref().map(from_uint);
        let int_or_fraction = |r: &Rational| {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format_rational(r)
            }
        };
        Self {
            n: row.n,
            b0: row.b0.as_ref().map_or_else(dash, BigUint::to_string),
            lp_full: int_or_fraction(&row.lp_full),
            lp_jk: int_or_fraction(&row.lp_jk),
            exact_max: row.exact_max.map_or_else(String::new, |v| v.to_string()),
            middle_binomial: row.middle.to_string(),
            b0_over_middle: b0
                .as_ref()
                .map_or_else(dash, |b| format!("{:.6}", to_f64(&(b / &middle)))),
            lp_full_over_middle: format!("{:.6}", to_f64(&(&row.lp_full / &middle))),
            lp_full_equals_b0: b0
                .as_ref()
                .map_or_else(dash, |b| (*b == row.lp_full).to_string()),
        }
    }
}

impl TableRecord {
    pub fn fields(&self) -> [String; 9] {
        [
            self.n.to_string(),
            self.b0.clone(),
            self.lp_full.clone(),
            self.lp_jk.clone(),
            self.exact_max.clone(),
            self.middle_binomial.clone(),
            self.b0_over_middle.clone(),
            self.lp_full_over_middle.clone(),
            self.lp_full_equals_b0.clone(),
        ]
    }
}

pub fn to_csv(rows: &[TableRow]) -> String {
    let mut out = TABLE_COLUMNS.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&TableRecord::from(row).fields().join(","));
        out.push('\n');
    }
    out
}

//! The `tiltcube` command line: argument parsing and subcommand dispatch.
//!
//! [`run`] returns the exit code and the stdout payload instead of printing,
//! so the binary is a thin wrapper and tests can drive it in-process.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tiltcube::bounds::{check_windows, window_sets_12, window_sets_pq};
use tiltcube::chains::{chain_family_12, derive_seed, random_ordering};
use tiltcube::family_file::{format_family, parse_family};
use tiltcube::predicates::is_valid;
use tiltcube::rational::format_rational;
use tiltcube::report::{table, to_csv, TableOptions, TableRecord};
use tiltcube::{
    atmostk_weight_bound, build_lp, distance1_level_bound, expected_hits, greedy_family, is_antichain, k_shadow,
    max_family, profile_of, solve_lp_exact, verify_family, ConflictPredicate, ConstructionSpec, Error, LpVariant,
    SearchBudget, SetFamily, Uniqueness, VerifyStrategy,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "TILTCUBE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "tiltcube", version, about = "Construct, verify, solve and bound tilted Sperner families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a named construction and write it as a family file.
    Construct(ConstructArgs),
    /// Check a family file against a predicate; exits 1 if it is invalid.
    Verify(VerifyArgs),
    /// Exact maximum valid family by branch and bound (or a seeded greedy one).
    Solve(SolveArgs),
    /// Exact LP upper bound on family size from the window inequalities.
    LpBound(LpBoundArgs),
    /// Monte-Carlo check of the 1:2 chain families.
    Chains(ChainsArgs),
    /// k-shadow of a family and its antichain and counting checks.
    Shadow(ShadowArgs),
    /// Evaluate every applicable inequality on a family file.
    Bounds(BoundsArgs),
    /// Per-n table of constructions, LP bounds and exact maxima.
    Table(TableArgs),
}

#[derive(Debug, Args)]
struct ConstructArgs {
    /// b0, levels:L1,L2,..., interval:P:Q[:ANCHOR], modular[:R] or powersum:K
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: u32,
    /// Output file; the family file goes to stdout when omitted.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    /// Level shortcut for level unions, pairwise otherwise.
    Auto,
    Pairwise,
    LevelShortcut,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// ratio:P:Q, dist:K, distle:K or antichain
    #[arg(long)]
    predicate: String,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 10)]
    max_violations: usize,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    predicate: String,
    /// Time limit in seconds; the result is then a lower bound only.
    #[arg(long)]
    timeout: Option<f64>,
    /// Sequential search with the lexicographically smallest optimal witness.
    #[arg(long)]
    deterministic: bool,
    /// Disable the LP bound inside the search.
    #[arg(long)]
    no_lp: bool,
    /// Omit the witness from the output.
    #[arg(long)]
    no_witness: bool,
    /// Return a seeded random maximal family instead of an exact maximum.
    #[arg(long)]
    greedy: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1 << 14)]
    max_universe: usize,
}

#[derive(Debug, Args)]
struct LpBoundArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long, default_value_t = 2)]
    q: u32,
    /// All `[l, 2l]` and `[2k - n, k]` windows (1:2 only).
    #[arg(long, conflicts_with = "jk")]
    full: bool,
    /// Only the `J_k` windows.
    #[arg(long)]
    jk: bool,
}

#[derive(Debug, Args)]
struct ChainsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    l: u32,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Family whose hits are counted; defaults to the full level `l`.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ShadowArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: u32,
    /// Also write the shadow as a family file.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Distance for the at-most-k weight bound.
    #[arg(long)]
    k: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, default_value_t = 1)]
    min_n: u32,
    #[arg(long, default_value_t = 12)]
    max_n: u32,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Largest n for which the exact maximum is searched.
    #[arg(long, default_value_t = 6)]
    exact_max_n: u32,
    /// Per-row time limit in seconds for the exact search.
    #[arg(long, default_value_t = 30.0)]
    timeout: f64,
}

/// Exit code plus what goes to stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Invalid { stdout: String, message: String },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Cmd = std::result::Result<String, Failure>;

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = match cli.command {
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a),
        Command::Solve(a) => solve(a),
        Command::LpBound(a) => lp_bound(a),
        Command::Chains(a) => chains(a),
        Command::Shadow(a) => shadow(a),
        Command::Bounds(a) => bounds(a),
        Command::Table(a) => table_cmd(a),
    };
    match result {
        Ok(stdout) => Outcome { code: EXIT_OK, stdout, stderr: String::new() },
        Err(Failure::Usage(message)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        },
        Err(Failure::Invalid { stdout, message }) => Outcome {
            code: EXIT_INVALID,
            stdout,
            stderr: format!("{message}\n"),
        },
    }
}

/// Sizes the global rayon pool from [`THREADS_ENV`] if it is set.
pub fn configure_threads() -> std::result::Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn to_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    text
}

fn predicate(text: &str) -> std::result::Result<ConflictPredicate, Failure> {
    Ok(text.parse::<ConflictPredicate>()?)
}

fn read_input(path: &Path) -> std::result::Result<SetFamily, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_family(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn members(family: &SetFamily) -> Value {
    json!(family.members())
}

fn construct(a: ConstructArgs) -> Cmd {
    let spec: ConstructionSpec = a.family.parse()?;
    let built = spec.build(a.n)?;
    let text = format_family(&built.family);
    match a.output {
        None => Ok(text),
        Some(path) => {
            write_output(&path, &text)?;
            Ok(to_json(&json!({
                "family": spec.to_string(),
                "n": a.n,
                "size": built.family.len(),
                "residue": built.residue,
                "predicate": built.predicate.map(|p| p.to_string()),
                "output": path.display().to_string(),
            })))
        }
    }
}

fn verify(a: VerifyArgs) -> Cmd {
    let pred = predicate(&a.predicate)?;
    let family = read_input(&a.input)?;
    let strategy = match a.strategy {
        StrategyArg::Pairwise => VerifyStrategy::Pairwise,
        StrategyArg::LevelShortcut => VerifyStrategy::LevelShortcut,
        StrategyArg::Auto if family.is_level_union() => VerifyStrategy::LevelShortcut,
        StrategyArg::Auto => VerifyStrategy::Pairwise,
    };
    let report = verify_family(&family, pred, strategy, a.max_violations.max(1))?;
    let stdout = to_json(&json!({
        "n": family.n(),
        "size": family.len(),
        "predicate": pred.to_string(),
        "strategy": report.strategy,
        "valid": report.valid,
        "violations": report.violations,
    }));
    if report.valid {
        Ok(stdout)
    } else {
        let (x, y) = report.violations[0];
        Err(Failure::Invalid {
            stdout,
            message: format!("invalid under {pred}: {x} and {y} conflict"),
        })
    }
}

fn solve(a: SolveArgs) -> Cmd {
    let pred = predicate(&a.predicate)?;
    if a.greedy {
        let family = greedy_family(a.n, pred, a.seed)?;
        let mut out = json!({
            "size": family.len(),
            "status": "lower-bound-only",
            "method": "greedy",
            "seed": a.seed,
        });
        if !a.no_witness {
            out["witness"] = members(&family);
        }
        return Ok(to_json(&out));
    }
    let time_limit = match a.timeout {
        None => None,
        Some(s) if s.is_finite() && s >= 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(Failure::Usage(format!("invalid timeout {s}"))),
    };
    let budget = SearchBudget {
        max_universe: a.max_universe,
        time_limit,
        deterministic: a.deterministic,
        lp_pruning: !a.no_lp,
    };
    let result = max_family(a.n, pred, &budget)?;
    let mut out = json!({
        "size": result.size,
        "status": result.status,
        "nodes_expanded": result.nodes_expanded,
    });
    if !a.no_witness {
        out["witness"] = members(&result.witness);
    }
    Ok(to_json(&out))
}

fn lp_bound(a: LpBoundArgs) -> Cmd {
    let variant = if a.jk || (!a.full && (a.p, a.q) != (1, 2)) {
        LpVariant::JkOnly
    } else {
        LpVariant::Full
    };
    let lp = build_lp(a.n, a.p, a.q, variant)?;
    let solution = solve_lp_exact(&lp)?;
    Ok(to_json(&json!({
        "n": a.n,
        "p": a.p,
        "q": a.q,
        "variant": match variant { LpVariant::Full => "full", LpVariant::JkOnly => "jk" },
        "optimum": format_rational(&solution.optimum),
        "profile": solution.profile.to_strings(),
        "unique": solution.uniqueness == Uniqueness::Unique,
        "windows": lp.windows.iter().map(|w| w.label.clone()).collect::<Vec<_>>(),
        "dual": solution.dual.iter().map(format_rational).collect::<Vec<_>>(),
        "certificate_verified": solution.certificate_verified,
    })))
}

fn chains(a: ChainsArgs) -> Cmd {
    let family = match &a.input {
        Some(path) => read_input(path)?,
        None => ConstructionSpec::LevelUnion(vec![a.l]).build(a.n)?.family,
    };
    if family.n() != a.n {
        return Err(Failure::Usage(format!("input has n={}, expected n={}", family.n(), a.n)));
    }
    let hits = expected_hits(&family, a.l, a.trials, a.seed)?;
    let failures = (0..a.trials)
        .filter(|&t| {
            let ordering = random_ordering(a.n, derive_seed(a.seed, t)).expect("n validated");
            let chains = chain_family_12(&ordering, a.l).expect("l validated");
            !(chains.identity_holds() && chains.sizes_as_expected())
        })
        .count();
    let family_valid = is_valid(&family, ConflictPredicate::Ratio { p: 1, q: 2 })?;
    Ok(to_json(&json!({
        "n": a.n,
        "l": a.l,
        "trials": a.trials,
        "seed": a.seed,
        "mean": hits.mean,
        "stderr": hits.stderr,
        "max_hits": hits.max_hits,
        "predicted": format_rational(&hits.predicted),
        "family_size": family.len(),
        "family_valid": family_valid,
        "identity_check": if failures == 0 { "pass" } else { "fail" },
        "identity_failures": failures,
    })))
}

fn shadow(a: ShadowArgs) -> Cmd {
    let family = read_input(&a.input)?;
    let result = k_shadow(&family, a.k)?;
    let antichain = is_antichain(&result.shadow);
    if let Some(path) = &a.output {
        write_output(path, &format_family(&result.shadow))?;
    }
    Ok(to_json(&json!({
        "n": family.n(),
        "k": a.k,
        "source_size": family.len(),
        "shadow_size": result.shadow.len(),
        "identity_sum": result.identity_sum,
        "falling_factorial_sum": result.falling_factorial_sum,
        "identity_holds": result.identity_holds,
        "antichain": antichain.antichain,
        "antichain_witness": antichain.witness,
    })))
}

fn window_report(family: &SetFamily, windows: &[tiltcube::Window], pred: ConflictPredicate) -> Result<Value, Failure> {
    let check = check_windows(&profile_of(family), windows);
    Ok(json!({
        "applicable": is_valid(family, pred)?,
        "all_pass": check.all_pass,
        "windows": windows.iter().zip(&check.sums).zip(&check.pass).map(|((w, s), p)| json!({
            "label": w.label,
            "sum": format_rational(s),
            "pass": p,
        })).collect::<Vec<_>>(),
    }))
}

/// Inequalities that must hold because the family is valid; a failure here is
/// a counterexample and exits 1.
fn bounds(a: BoundsArgs) -> Cmd {
    let family = read_input(&a.input)?;
    let n = family.n();
    let ratio_12 = window_report(&family, &window_sets_12(n), ConflictPredicate::Ratio { p: 1, q: 2 })?;
    let mut violated = ratio_12["applicable"] == true && ratio_12["all_pass"] == false;
    let mut jk = serde_json::Map::new();
    for (p, q) in [(1, 3), (2, 3)] {
        let report = window_report(&family, &window_sets_pq(n, p, q)?, ConflictPredicate::Ratio { p, q })?;
        violated |= report["applicable"] == true && report["all_pass"] == false;
        jk.insert(format!("{p}:{q}"), report);
    }
    let distance1 = match distance1_level_bound(&family) {
        Ok(report) => {
            violated |= !report.all_pass;
            json!({ "applicable": true, "all_pass": report.all_pass, "levels": report.levels })
        }
        Err(Error::InvalidFamily { .. }) => json!({ "applicable": false }),
        Err(e) => return Err(e.into()),
    };
    let atmost = match a.k {
        None => Value::Null,
        Some(k) => match atmostk_weight_bound(&family, k) {
            Ok(w) => {
                violated |= !w.pass;
                json!({ "applicable": true, "k": k, "weight": w.weight, "bound": w.bound, "pass": w.pass })
            }
            Err(Error::InvalidFamily { .. }) => json!({ "applicable": false, "k": k }),
            Err(e) => return Err(e.into()),
        },
    };
    let stdout = to_json(&json!({
        "n": n,
        "size": family.len(),
        "profile": profile_of(&family).to_strings(),
        "ratio_1_2": ratio_12,
        "jk": jk,
        "distance_1": distance1,
        "atmost_k": atmost,
    }));
    if violated {
        Err(Failure::Invalid {
            stdout,
            message: "an inequality failed on a family that satisfies its predicate".into(),
        })
    } else {
        Ok(stdout)
    }
}

fn table_cmd(a: TableArgs) -> Cmd {
    if a.min_n == 0 || a.min_n > a.max_n {
        return Err(Failure::Usage(format!("empty range {}..={}", a.min_n, a.max_n)));
    }
    if !(a.timeout.is_finite() && a.timeout >= 0.0) {
        return Err(Failure::Usage(format!("invalid timeout {}", a.timeout)));
    }
    let options = TableOptions {
        exact_max_n: a.exact_max_n,
        exact_time_limit: Some(Duration::from_secs_f64(a.timeout)),
    };
    let rows = table(a.min_n, a.max_n, &options)?;
    Ok(match a.format {
        Format::Csv => to_csv(&rows),
        Format::Json => to_json(&json!(rows.iter().map(TableRecord::from).collect::<Vec<_>>())),
    })
}

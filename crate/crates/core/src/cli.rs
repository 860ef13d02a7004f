//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a check fails, 2 on bad usage or input.
//! The limit flags `--enum-limit`, `--eulerian-cap` and `--mahonian-cap`
//! print a warning on stderr because run time and memory grow quickly past
//! the defaults.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{rate_table, rate_table_csv, RateStatistic};
use crate::chain::{sample_pairs, PairSample};
use crate::exact_dist::{eulerian_distribution, generic_distribution, mahonian_distribution};
use crate::matrix::AntisymmetricMatrix;
use crate::stein::{ingredients_exact, ingredients_mc, scaling_table, BoundIngredients, BoundReport, Mode};
use crate::verify::{verify, worked_example};
use crate::{Error, Limits, StatisticKind, StatisticSpec};

pub const DEFAULT_MC_TRIALS: u64 = 100_000;
pub const DEFAULT_SAMPLE_COUNT: u64 = 10;

#[derive(Parser, Debug)]
#[command(name = "steinperm", version, about = "Exchangeable pairs and normal approximation bounds for permutation statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every exact invariant check at one n.
    Verify(Opts),
    /// Reproduce the seven-element worked example.
    Example(ExampleOpts),
    /// Exact distribution of the statistic.
    Dist(Opts),
    /// Kolmogorov distance to the normal across n.
    Rate(Opts),
    /// Bound ingredients and bounds, or a scaling table with --n-list.
    Bounds(Opts),
    /// Draw (π, I) pairs and the induced (X, X′).
    Sample(Opts),
}

#[derive(Args, Debug)]
struct Opts {
    #[arg(long, value_enum)]
    stat: Option<StatArg>,
    /// Matrix JSON file: {"n": .., "entries": [["0", "1/2", ..], ..]}
    #[arg(long, value_name = "FILE")]
    matrix: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated list of n.
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "n")]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitOpts,
}

#[derive(Args, Debug)]
struct ExampleOpts {
    #[arg(long, value_enum, default_value_t = ExampleFormat::Text)]
    format: ExampleFormat,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LimitOpts {
    /// Largest n enumerated over S_n.
    #[arg(long)]
    enum_limit: Option<usize>,
    #[arg(long)]
    eulerian_cap: Option<usize>,
    #[arg(long)]
    mahonian_cap: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum StatArg {
    Descents,
    Inversions,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Exact,
    Mc,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ExampleFormat {
    Text,
    Json,
}

enum Failure {
    Usage(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

struct Output {
    text: String,
    passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, passed: true }
    }
}

#[derive(Serialize)]
struct BoundsOutput {
    ingredients: BoundIngredients,
    report: BoundReport,
}

#[derive(Serialize)]
struct SampleOutput {
    statistic: StatisticKind,
    n: usize,
    seed: u64,
    samples: Vec<PairSample>,
}

pub fn main() -> i32 {
    run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock())
}

/// Parses `args` (including the program name) and runs the subcommand,
/// writing results to `out` unless `--out` is given.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let (result, dest) = match &cli.command {
        Command::Example(o) => (cmd_example(o), o.out.clone()),
        Command::Verify(o) => (with_limits(o, err).and_then(|l| cmd_verify(o, &l)), o.out.clone()),
        Command::Dist(o) => (with_limits(o, err).and_then(|l| cmd_dist(o, &l)), o.out.clone()),
        Command::Rate(o) => (with_limits(o, err).and_then(|l| cmd_rate(o, &l)), o.out.clone()),
        Command::Bounds(o) => (with_limits(o, err).and_then(|l| cmd_bounds(o, &l)), o.out.clone()),
        Command::Sample(o) => (cmd_sample(o), o.out.clone()),
    };
    match result {
        Ok(output) => {
            let written = match dest {
                Some(path) => fs::write(&path, &output.text),
                None => out.write_all(output.text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 2;
            }
            if output.passed {
                0
            } else {
                let _ = writeln!(err, "error: one or more checks failed");
                1
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Input(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn with_limits(o: &Opts, err: &mut dyn Write) -> Result<Limits, Failure> {
    let mut limits = Limits::default();
    let overrides = [
        ("enumeration limit", o.limits.enum_limit, &mut limits.enumeration),
        ("Eulerian cap", o.limits.eulerian_cap, &mut limits.eulerian_cap),
        ("Mahonian cap", o.limits.mahonian_cap, &mut limits.mahonian_cap),
    ];
    for (name, value, slot) in overrides {
        if let Some(v) = value {
            if v != *slot {
                let _ = writeln!(
                    err,
                    "warning: {name} changed from {} to {v}; run time and memory grow rapidly with n",
                    *slot
                );
            }
            *slot = v;
        }
    }
    Ok(limits)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn json_only(o: &Opts, what: &str) -> Result<(), Failure> {
    if o.format == Format::Csv {
        return usage(format!("{what} supports only --format json"));
    }
    Ok(())
}

fn no_n_list(o: &Opts, what: &str) -> Result<(), Failure> {
    if o.n_list.is_some() {
        return usage(format!("{what} takes --n, not --n-list"));
    }
    Ok(())
}

fn builtin_kind(s: StatArg) -> StatisticKind {
    match s {
        StatArg::Descents => StatisticKind::Descents,
        StatArg::Inversions => StatisticKind::Inversions,
    }
}

fn load_matrix(path: &PathBuf) -> Result<AntisymmetricMatrix, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(AntisymmetricMatrix::from_json(&text)?)
}

/// The statistic selected by exactly one of `--stat` and `--matrix`, at a single n.
fn single_spec(o: &Opts) -> Result<StatisticSpec, Failure> {
    match (o.stat, &o.matrix) {
        (Some(_), Some(_)) => usage("give exactly one of --stat and --matrix"),
        (None, None) => usage("one of --stat or --matrix is required"),
        (Some(s), None) => match o.n {
            Some(n) => Ok(StatisticSpec::builtin(builtin_kind(s), n)?),
            None => usage("--n is required with --stat"),
        },
        (None, Some(path)) => {
            let m = load_matrix(path)?;
            match o.n {
                Some(n) if n != m.n() => Err(Error::DimensionMismatch { expected: n, found: m.n() }.into()),
                _ => Ok(StatisticSpec::custom(m)),
            }
        }
    }
}

fn require_seed(o: &Opts, why: &str) -> Result<u64, Failure> {
    match o.seed {
        Some(s) => Ok(s),
        None => usage(format!("--seed is required {why}")),
    }
}

fn cmd_example(o: &ExampleOpts) -> Result<Output, Failure> {
    let ex = worked_example()?;
    let mismatches = ex.mismatches();
    let mut text = match o.format {
        ExampleFormat::Text => ex.render(),
        ExampleFormat::Json => json(&ex),
    };
    if o.format == ExampleFormat::Text {
        for m in &mismatches {
            text.push_str(&format!("MISMATCH {m}\n"));
        }
    }
    Ok(Output {
        text,
        passed: mismatches.is_empty(),
    })
}

fn cmd_verify(o: &Opts, limits: &Limits) -> Result<Output, Failure> {
    no_n_list(o, "verify")?;
    let spec = single_spec(o)?;
    let report = verify(&spec, limits)?;
    let text = match o.format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["check", "passed", "detail"]).map_err(Error::from)?;
            for c in &report.checks {
                w.write_record([c.name, if c.passed { "true" } else { "false" }, &c.detail])
                    .map_err(Error::from)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            String::from_utf8(bytes).expect("csv output is utf-8")
        }
    };
    Ok(Output {
        text,
        passed: report.all_passed,
    })
}

fn cmd_dist(o: &Opts, limits: &Limits) -> Result<Output, Failure> {
    json_only(o, "dist")?;
    no_n_list(o, "dist")?;
    let spec = single_spec(o)?;
    let d = match spec.kind() {
        StatisticKind::Descents => eulerian_distribution(spec.n(), limits)?,
        StatisticKind::Inversions => mahonian_distribution(spec.n(), limits)?,
        StatisticKind::Custom => generic_distribution(spec.matrix(), limits)?,
    };
    let mut text = d.to_json();
    text.push('\n');
    Ok(Output::ok(text))
}

fn cmd_rate(o: &Opts, limits: &Limits) -> Result<Output, Failure> {
    if o.matrix.is_some() {
        return usage("rate supports only --stat descents or --stat inversions");
    }
    let stat = match o.stat {
        Some(StatArg::Descents) => RateStatistic::Descents,
        Some(StatArg::Inversions) => RateStatistic::Inversions,
        None => return usage("--stat is required"),
    };
    let ns = match (&o.n_list, o.n) {
        (Some(list), _) => list.clone(),
        (None, Some(n)) => vec![n],
        (None, None) => return usage("--n-list or --n is required"),
    };
    let rows = rate_table(stat, &ns, limits)?;
    Ok(Output::ok(match o.format {
        Format::Json => json(&rows),
        Format::Csv => rate_table_csv(&rows)?,
    }))
}

fn cmd_bounds(o: &Opts, limits: &Limits) -> Result<Output, Failure> {
    json_only(o, "bounds")?;
    let (trials, seed) = match o.mode {
        ModeArg::Exact => (0, o.seed.unwrap_or(0)),
        ModeArg::Mc => (
            o.trials.unwrap_or(DEFAULT_MC_TRIALS),
            require_seed(o, "with --mode mc")?,
        ),
    };
    if let Some(list) = &o.n_list {
        let kind = match (o.stat, &o.matrix) {
            (Some(s), None) => builtin_kind(s),
            _ => return usage("--n-list requires --stat and no --matrix"),
        };
        let mode = match o.mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Mc => Mode::MonteCarlo,
        };
        return Ok(Output::ok(json(&scaling_table(kind, list, mode, trials, seed, limits)?)));
    }
    let spec = single_spec(o)?;
    let ingredients = match o.mode {
        ModeArg::Exact => ingredients_exact(&spec, limits)?,
        ModeArg::Mc => ingredients_mc(&spec, trials, seed)?,
    };
    let report = BoundReport::evaluate(&ingredients)?;
    Ok(Output::ok(json(&BoundsOutput { ingredients, report })))
}

fn cmd_sample(o: &Opts) -> Result<Output, Failure> {
    json_only(o, "sample")?;
    no_n_list(o, "sample")?;
    let seed = require_seed(o, "for sample")?;
    let spec = single_spec(o)?;
    let count = o.trials.unwrap_or(DEFAULT_SAMPLE_COUNT);
    let count = usize::try_from(count).map_err(|_| Failure::Usage("--trials is too large".into()))?;
    let samples = sample_pairs(&spec, count, seed)?;
    Ok(Output::ok(json(&SampleOutput {
        statistic: spec.kind(),
        n: spec.n(),
        seed,
        samples,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["steinperm"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn example_passes() {
        let (code, out, _) = call(&["example"]);
        assert_eq!(code, 0);
        assert!(out.contains("6 4 5 3 2 7 1"));
    }

    #[test]
    fn selector_is_exclusive() {
        assert_eq!(call(&["verify", "--n", "3"]).0, 2);
        assert_eq!(call(&["verify", "--stat", "descents", "--matrix", "m.json", "--n", "3"]).0, 2);
    }

    #[test]
    fn seed_required_for_mc() {
        let (code, _, err) = call(&["bounds", "--stat", "descents", "--n", "5", "--mode", "mc"]);
        assert_eq!(code, 2);
        assert!(err.contains("--seed"));
    }

    #[test]
    fn limit_override_warns() {
        let (code, _, err) = call(&["dist", "--stat", "descents", "--n", "4", "--eulerian-cap", "5"]);
        assert_eq!(code, 0);
        assert!(err.starts_with("warning:"));
        assert_eq!(call(&["dist", "--stat", "descents", "--n", "6", "--eulerian-cap", "5"]).0, 2);
    }
}

//! The `collatz-lab` command line.
//!
//! Every run prints exactly one envelope on standard output:
//!
//! ```json
//! { "schema_version": "1", "command": "...", "params": {...},
//!   "result": {...}, "verdicts": [...], "elapsed_ms": 0 }
//! ```
//!
//! Diagnostics go to standard error. Exit codes: 0 success, 1 a required
//! verdict failed, 2 invalid input, 3 a cap was exhausted.

mod output;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::collatz::{trajectory, DEFAULT_STEP_CAP, DEFAULT_VALUE_CAP_BITS};
use crate::constraints::{catalan_check, enumerate_pow_gap, replay_theorem, TheoremError};
use crate::cycle::{check_preliminaries, Cycle, MinNormalCycle, Verdict};
use crate::decomposition::{
    decompose, sign_matches_addend, signatures_for_cycle, verify_signature, DecomposeError,
    DEFAULT_ODD_STEP_CAP,
};
use crate::nat::{MapParams, Nat};
use crate::search::{find_cycles_with, verify_range_with, CycleSearchOptions, RangeOptions, SearchError};

pub use output::{Envelope, VerdictEntry, SCHEMA_VERSION};

/// Environment variable that overrides `--partitions`.
pub const THREADS_ENV: &str = "COLLATZ_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "collatz-lab", version, about = "Exact Collatz and qn+r cycle machinery")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Map as `q,r` or one of standard, 3n+1, 3n-1, 5n+1.
    #[arg(long, global = true, default_value = "3,1", allow_hyphen_values = true)]
    map: String,
    /// Step cap (odd steps for decompose and replay-theorem).
    #[arg(long, global = true)]
    step_cap: Option<u64>,
    /// Values above 2^BITS count as a cap hit.
    #[arg(long, global = true, default_value_t = DEFAULT_VALUE_CAP_BITS)]
    value_cap_bits: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Iterate the map from N.
    Trajectory { n: String },
    /// Census of cycles reached from seeds 1..=SEED_MAX.
    Cycles {
        #[arg(long, default_value_t = 1000)]
        seed_max: u64,
        #[arg(long)]
        partitions: Option<usize>,
    },
    /// Rotate a cycle so its minimum comes first.
    Normalize {
        #[arg(required = true, num_args = 1..)]
        elements: Vec<String>,
    },
    /// Structural properties of a min-normal cycle.
    CheckProps {
        #[arg(required = true, num_args = 1..)]
        elements: Vec<String>,
    },
    /// Signature (x, y, profile, z) of an odd cycle element.
    Decompose { m: String },
    /// Replay the identity chain on a standard-map cycle (default 1 4 2).
    ReplayTheorem {
        #[arg(num_args = 0..)]
        elements: Vec<String>,
    },
    /// Solutions of 2^y - 3^x = C within bounds.
    Diophantine {
        #[arg(allow_hyphen_values = true)]
        c: String,
        #[arg(long, default_value_t = 40)]
        x_max: u64,
        #[arg(long, default_value_t = 40)]
        y_max: u64,
    },
    /// Solutions of 3^x + 1 = 2^y within bounds.
    Catalan {
        #[arg(long, default_value_t = 60)]
        x_max: u64,
        #[arg(long, default_value_t = 60)]
        y_max: u64,
    },
    /// Verify that every seed in 1..=N reaches 1 (standard map).
    VerifyRange {
        n: String,
        #[arg(long)]
        partitions: Option<usize>,
        /// Disable the stopping-time lookup table.
        #[arg(long)]
        no_lookup_table: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Trajectory { .. } => "trajectory",
            Command::Cycles { .. } => "cycles",
            Command::Normalize { .. } => "normalize",
            Command::CheckProps { .. } => "check-props",
            Command::Decompose { .. } => "decompose",
            Command::ReplayTheorem { .. } => "replay-theorem",
            Command::Diophantine { .. } => "diophantine",
            Command::Catalan { .. } => "catalan",
            Command::VerifyRange { .. } => "verify-range",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Cap(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Cap(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Cap(m) => m,
        }
    }
}

struct Outcome {
    params: Value,
    result: Value,
    verdicts: Vec<VerdictEntry>,
    /// A cap was hit but the payload is still meaningful.
    capped: Option<String>,
}

impl Outcome {
    fn new(params: Value, result: Value) -> Self {
        Outcome {
            params,
            result,
            verdicts: Vec::new(),
            capped: None,
        }
    }
}

/// Runs against the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let started = Instant::now();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            let command = args
                .get(1)
                .and_then(|a| a.to_str())
                .filter(|a| !a.starts_with('-'))
                .unwrap_or("")
                .to_string();
            let env = Envelope::failed(command, json!({}), started.elapsed());
            let _ = output::render(&env, guess_format(&args), out);
            return 2;
        }
    };

    let command = cli.command.name();
    let format = cli.common.format;
    match execute(&cli) {
        Ok(outcome) => {
            let env = Envelope {
                schema_version: SCHEMA_VERSION.into(),
                command: command.into(),
                params: outcome.params,
                result: outcome.result,
                verdicts: outcome.verdicts,
                elapsed_ms: started.elapsed().as_millis() as u64,
            };
            if let Err(e) = output::render(&env, format, out) {
                let _ = writeln!(err, "error: cannot write output: {e}");
                return 2;
            }
            let code = status(&env.verdicts, outcome.capped.is_some());
            match code {
                3 => {
                    let _ = writeln!(err, "cap exhausted: {}", outcome.capped.unwrap_or_default());
                }
                1 => {
                    let _ = writeln!(err, "a required verdict failed");
                }
                _ => {}
            }
            code
        }
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message());
            let env = Envelope::failed(command.into(), json!({}), started.elapsed());
            let _ = output::render(&env, format, out);
            failure.exit_code()
        }
    }
}

/// Cap exhaustion outranks a failed required verdict.
fn status(verdicts: &[VerdictEntry], capped: bool) -> i32 {
    if capped {
        3
    } else if verdicts.iter().any(|v| v.required && v.verdict == Verdict::Fails) {
        1
    } else {
        0
    }
}

fn guess_format(args: &[OsString]) -> Format {
    let args: Vec<&str> = args.iter().filter_map(|a| a.to_str()).collect();
    for (i, a) in args.iter().enumerate() {
        let value = a
            .strip_prefix("--format=")
            .or_else(|| (*a == "--format").then(|| args.get(i + 1).copied()).flatten());
        match value {
            Some("csv") => return Format::Csv,
            Some("text") => return Format::Text,
            _ => {}
        }
    }
    Format::Json
}

fn parse_nat(s: &str, what: &str) -> Result<Nat, Failure> {
    let n: Nat = s
        .parse()
        .map_err(|e| Failure::Invalid(format!("{what}: {e}")))?;
    if n.is_zero() {
        return Err(Failure::Invalid(format!("{what}: 0 is outside the domain (n >= 1)")));
    }
    Ok(n)
}

fn parse_u64(s: &str, what: &str) -> Result<u64, Failure> {
    parse_nat(s, what)?
        .to_u64()
        .ok_or_else(|| Failure::Invalid(format!("{what}: {s} exceeds the supported range")))
}

/// Accepts `4 2 1`, `4,2,1` or any mix.
fn parse_elements(raw: &[String]) -> Result<Vec<Nat>, Failure> {
    raw.iter()
        .flat_map(|s| s.split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_nat(s, "cycle element"))
        .collect()
}

fn partitions(flag: Option<usize>) -> Result<usize, Failure> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        return v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&p| p >= 1)
            .ok_or_else(|| Failure::Invalid(format!("{THREADS_ENV}={v:?} is not a positive integer")));
    }
    Ok(flag.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    }))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let map: MapParams = cli
        .common
        .map
        .parse()
        .map_err(|e: crate::nat::MapError| Failure::Invalid(e.to_string()))?;
    let value_cap_bits = cli.common.value_cap_bits;
    let value_cap = Nat::pow2(value_cap_bits);
    let base = |step_cap: u64| {
        json!({
            "map": to_value(&map),
            "step_cap": step_cap,
            "value_cap_bits": value_cap_bits,
        })
    };

    match &cli.command {
        Command::Trajectory { n } => {
            let n = parse_nat(n, "start value")?;
            let step_cap = cli.common.step_cap.unwrap_or(DEFAULT_STEP_CAP);
            let mut params = base(step_cap);
            params["n"] = json!(n.to_string());
            let rec = trajectory(&n, &map, step_cap, &value_cap)
                .map_err(|e| Failure::Invalid(e.to_string()))?;
            Ok(Outcome::new(params, to_value(&rec)))
        }

        Command::Cycles {
            seed_max,
            partitions: flag,
        } => {
            let step_cap = cli.common.step_cap.unwrap_or(10_000);
            let partition_hint = partitions(*flag)?;
            let mut params = base(step_cap);
            params["seed_max"] = json!(seed_max);
            params["partitions"] = json!(partition_hint);
            let report = find_cycles_with(
                &map,
                *seed_max,
                step_cap,
                &value_cap,
                &CycleSearchOptions {
                    partition_hint,
                    progress: None,
                },
            );
            let mut outcome = Outcome::new(params, to_value(&report));
            for mc in &report.census.cycles {
                let tag = format!("min={}", mc.min());
                let props = check_preliminaries(mc);
                outcome.verdicts.push(VerdictEntry::required(
                    format!("periodic[{tag}]"),
                    props.periodic.verdict,
                    props.periodic.detail.clone(),
                ));
                match signatures_for_cycle(mc, DEFAULT_ODD_STEP_CAP) {
                    Ok(sigs) => {
                        let all_ok = sigs.iter().all(verify_signature);
                        let shared = sigs.windows(2).all(|w| (w[0].x, w[0].y) == (w[1].x, w[1].y))
                            && sigs.first().is_some_and(|s| {
                                s.x as usize == mc.odd_count() && s.y as usize == mc.even_count()
                            });
                        outcome.verdicts.push(VerdictEntry::required(
                            format!("signatures[{tag}]"),
                            Verdict::from_bool(all_ok),
                            format!("m (2^y - q^x) = z for {} odd elements", sigs.len()),
                        ));
                        outcome.verdicts.push(VerdictEntry::required(
                            format!("shared_exponents[{tag}]"),
                            Verdict::from_bool(shared),
                            "all signatures share (x, y) = (#odd, #even)".into(),
                        ));
                    }
                    Err(e) => outcome.verdicts.push(VerdictEntry::required(
                        format!("signatures[{tag}]"),
                        Verdict::Fails,
                        e.to_string(),
                    )),
                }
            }
            if map.is_standard() && report.census.capped_seed_count > 0 {
                outcome.capped = Some(format!(
                    "{} seeds hit a cap under the standard map",
                    report.census.capped_seed_count
                ));
            }
            Ok(outcome)
        }

        Command::Normalize { elements } => {
            let mc = min_normal(elements, &map)?;
            let mut params = base(0);
            params["elements"] = to_value(&parse_elements(elements)?);
            Ok(Outcome::new(params, to_value(&mc)))
        }

        Command::CheckProps { elements } => {
            let mc = min_normal(elements, &map)?;
            let mut params = base(0);
            params["elements"] = to_value(&parse_elements(elements)?);
            let report = check_preliminaries(&mc);
            let mut outcome = Outcome::new(params, to_value(&report));
            for (name, check) in report.checks() {
                // (iv) is known to fail on {1, 4, 2}; it is reported, not enforced
                let entry = if name == "m2_odd" {
                    VerdictEntry::informational(name.into(), check.verdict, check.detail.clone())
                } else {
                    VerdictEntry::required(name.into(), check.verdict, check.detail.clone())
                };
                outcome.verdicts.push(entry);
            }
            Ok(outcome)
        }

        Command::Decompose { m } => {
            let m = parse_nat(m, "cycle element")?;
            let step_cap = cli.common.step_cap.unwrap_or(DEFAULT_ODD_STEP_CAP);
            let mut params = base(step_cap);
            params["m"] = json!(m.to_string());
            let sig = decompose(&m, &map, step_cap).map_err(decompose_failure)?;
            let mut outcome = Outcome::new(params, to_value(&sig));
            outcome.verdicts = vec![
                VerdictEntry::required(
                    "identity".into(),
                    Verdict::from_bool(sig.identity_holds()),
                    format!("m (2^y - q^x) = {} (z = {})", sig.m.to_bigint() * sig.power_gap(), sig.z),
                ),
                VerdictEntry::required(
                    "replay".into(),
                    Verdict::from_bool(verify_signature(&sig)),
                    "profile replays through the map back to m".into(),
                ),
                VerdictEntry::required(
                    "closed_form".into(),
                    Verdict::from_bool(sig.closed_form_z() == sig.z),
                    "recurrence agrees with the closed-form sum".into(),
                ),
                VerdictEntry::required(
                    "sign".into(),
                    Verdict::from_bool(sign_matches_addend(&sig)),
                    "sign of z follows sign of r".into(),
                ),
            ];
            Ok(outcome)
        }

        Command::ReplayTheorem { elements } => {
            let elements = if elements.is_empty() {
                vec!["1".to_string(), "4".to_string(), "2".to_string()]
            } else {
                elements.clone()
            };
            let mc = min_normal(&elements, &map)?;
            let step_cap = cli.common.step_cap.unwrap_or(DEFAULT_ODD_STEP_CAP);
            let mut params = base(step_cap);
            params["elements"] = to_value(&parse_elements(&elements)?);
            let report = replay_theorem(&mc, step_cap).map_err(|e| match e {
                TheoremError::Decompose(d) => decompose_failure(d),
                other => Failure::Invalid(other.to_string()),
            })?;
            let mut outcome = Outcome::new(params, to_value(&report));
            outcome.verdicts = report
                .lines
                .iter()
                .map(|l| VerdictEntry::required(l.name.into(), l.verdict, l.statement.into()))
                .collect();
            Ok(outcome)
        }

        Command::Diophantine { c, x_max, y_max } => {
            let c: BigInt = c
                .trim()
                .parse()
                .map_err(|_| Failure::Invalid(format!("target: {c:?} is not an integer")))?;
            let params = json!({ "c": c.to_string(), "x_max": x_max, "y_max": y_max });
            Ok(Outcome::new(params, to_value(&enumerate_pow_gap(&c, *x_max, *y_max))))
        }

        Command::Catalan { x_max, y_max } => {
            let all = catalan_check(*x_max, *y_max);
            let positive = all.positive_x();
            let known = all.solutions.iter().all(|s| [(0, 1), (1, 2)].contains(s));
            let params = json!({ "x_max": x_max, "y_max": y_max });
            let result = json!({
                "solutions": all.solutions,
                "solutions_positive_x": positive.solutions,
            });
            let mut outcome = Outcome::new(params, result);
            outcome.verdicts.push(VerdictEntry::required(
                "within_known_solutions".into(),
                Verdict::from_bool(known),
                "every solution is (0,1) or (1,2)".into(),
            ));
            Ok(outcome)
        }

        Command::VerifyRange {
            n,
            partitions: flag,
            no_lookup_table,
        } => {
            let n_max = parse_u64(n, "upper bound")?;
            let step_cap = cli.common.step_cap.unwrap_or(DEFAULT_STEP_CAP);
            let partition_hint = partitions(*flag)?;
            let mut params = base(step_cap);
            params["n"] = json!(n_max);
            params["partitions"] = json!(partition_hint);
            params["lookup_table"] = json!(!no_lookup_table);
            let opts = RangeOptions {
                partition_hint,
                use_lookup_table: !no_lookup_table,
                step_cap,
                value_cap_bits,
                progress: None,
            };
            let report = verify_range_with(n_max, &map, &opts).map_err(|e| match e {
                SearchError::CapExhausted { .. } => Failure::Cap(e.to_string()),
                other => Failure::Invalid(other.to_string()),
            })?;
            let mut outcome = Outcome::new(params, to_value(&report));
            outcome.verdicts.push(VerdictEntry::required(
                "all_verified".into(),
                Verdict::from_bool(report.stats.verified_count == n_max),
                format!("{} of {} seeds verified", report.stats.verified_count, n_max),
            ));
            Ok(outcome)
        }
    }
}

fn min_normal(raw: &[String], map: &MapParams) -> Result<MinNormalCycle, Failure> {
    let elements = parse_elements(raw)?;
    let cycle = Cycle::new(elements, map.clone()).map_err(|e| Failure::Invalid(format!("not a cycle: {e}")))?;
    Ok(crate::cycle::min_normalize(&cycle))
}

fn decompose_failure(e: DecomposeError) -> Failure {
    match e {
        DecomposeError::CapExceeded { .. } => Failure::Cap(e.to_string()),
        other => Failure::Invalid(other.to_string()),
    }
}

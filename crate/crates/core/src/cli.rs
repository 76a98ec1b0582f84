//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 infeasible under `--strict`,
//! 3 enumeration or memory guard, 4 a bound check failed.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bounds::{
    alpha_from_q, min_rounds, single_run_parameters, threshold_report, ThresholdInputs,
    ThresholdReport,
};
use crate::circuitsim::{acceptance_probability, Circuit};
use crate::error::{invalid, Error, Result};
use crate::experiments::{load_config, q_from_alpha, run_config, write_outputs, TrialSummary};
use crate::game::{
    exact_win_probability, monte_carlo_win_probability, AdversaryStrategy, GameParams, Subset,
};
use crate::protocol::{
    run_protocol, AbortThreshold, AttackPlan, CorruptionMode, ProtocolParams, RunCounts, Verdict,
};
use crate::rng::{StreamKey, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_BOUND_FAILED: i32 = 4;

const PROTOCOL_STREAM: u64 = 0x7072_6f74;

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Infeasible(_) | Error::Unattainable(_) => EXIT_INFEASIBLE,
        Error::EnumerationGuard { .. } | Error::QubitLimit { .. } => EXIT_GUARD,
        Error::InvalidParameter { .. }
        | Error::CircuitParse { .. }
        | Error::Precondition(_)
        | Error::Config(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_) => EXIT_INVALID,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "robust-vqc",
    version,
    about = "Noise-robust verification thresholds, games, and experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Threshold calculus for one parameter point.
    Thresholds(ThresholdArgs),
    /// The avoidance game, by simulation or exact enumeration.
    #[command(subcommand)]
    Game(GameCommand),
    /// Simulate protocol runs.
    Protocol(ProtocolArgs),
    /// Run an experiment config and write CSV/JSON (and SVG) outputs.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, conflicts_with = "q", required_unless_present = "q")]
    pub alpha: Option<f64>,
    /// Inherent error probability; sets alpha = (1 - 2q) / (2 - 2q).
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Round budget.
    #[arg(long, conflicts_with = "target_p_noise")]
    pub n: Option<u64>,
    /// Pick the smallest N tolerating noise strictly above this.
    #[arg(long)]
    pub target_p_noise: Option<f64>,
    /// Exit 2 unless the point is feasible.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum GameCommand {
    /// Monte Carlo estimate of the prover's win probability.
    Simulate(GameArgs),
    /// Exact win probability by enumerating every C (N <= 24).
    Exact(GameArgs),
}

#[derive(Debug, Args)]
pub struct GameArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub w: f64,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// The prover's set as comma-separated 1-based indices, e.g. `1,4,5`.
    #[arg(long, conflicts_with = "strategy")]
    pub set: Option<String>,
    /// `empty`, `full`, or `uniform:<m>`.
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the result as a one-row CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    /// Circuit file; its last-wire zero probability becomes `p_zero`.
    #[arg(long, conflicts_with = "p_zero", required_unless_present = "p_zero")]
    pub circuit: Option<PathBuf>,
    #[arg(long)]
    pub p_zero: Option<f64>,
    #[arg(long)]
    pub n: u64,
    /// Abort threshold as a number or ratio `a/b`; defaults to the threshold
    /// calculus value at (N, alpha(q), delta).
    #[arg(long)]
    pub w: Option<AbortThreshold>,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub q: f64,
    #[arg(long, default_value_t = 0.0)]
    pub p_noise: f64,
    /// `honest`, `full`, or `uniform:<m>` (non-benign attacks).
    #[arg(long, default_value = "honest")]
    pub attack: String,
    /// `wrong-bit` or `uniform-bit`.
    #[arg(long, default_value = "wrong-bit")]
    pub corruption: String,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Config override `key=value`; repeatable, dotted paths allowed.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub allow_out_of_regime: bool,
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let mut out = std::io::stdout().lock();
    let result = match cli.command {
        Command::Thresholds(a) => cmd_thresholds(&a, &mut out),
        Command::Game(g) => cmd_game(&g, &mut out),
        Command::Protocol(a) => cmd_protocol(&a, &mut out),
        Command::Experiment(a) => cmd_experiment(&a, &mut out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn report_table(r: &ThresholdReport) -> String {
    let i = &r.inputs;
    let rows: [(&str, String); 13] = [
        ("N", i.n.to_string()),
        ("alpha", i.alpha.to_string()),
        ("delta", i.delta.to_string()),
        ("epsilon", i.epsilon.to_string()),
        ("A", r.a.to_string()),
        ("A'", r.a_prime.to_string()),
        ("f", r.f.to_string()),
        ("g", r.g.to_string()),
        ("w", r.w.to_string()),
        ("noise_threshold", r.noise_threshold.to_string()),
        ("feasible_a", r.feasible_a.to_string()),
        ("feasible_f", r.feasible_f.to_string()),
        ("feasible", r.feasible().to_string()),
    ];
    rows.iter().map(|(k, v)| format!("{k:<16} {v}\n")).collect()
}

pub fn cmd_thresholds(a: &ThresholdArgs, out: &mut impl Write) -> Result<i32> {
    let (alpha, q) = match (a.alpha, a.q) {
        (Some(alpha), _) => (alpha, q_from_alpha(alpha)?),
        (None, Some(q)) => (alpha_from_q(q)?, q),
        (None, None) => return Err(invalid("alpha", "give --alpha or --q")),
    };
    ThresholdInputs::new(1, alpha, a.delta, a.epsilon)?;
    let n = match (a.n, a.target_p_noise) {
        (Some(n), _) => n,
        (None, Some(t)) => min_rounds(alpha, a.delta, a.epsilon, t)?,
        (None, None) => {
            writeln!(out, "{:<16} {alpha}\n{:<16} {q}", "alpha", "q")?;
            if q > 0.0 {
                let s = single_run_parameters(q)?;
                writeln!(
                    out,
                    "{:<16} {}\n{:<16} {}\n{:<16} {}",
                    "single_run_c", s.c, "single_run_s", s.s, "gap", s.gap
                )?;
            }
            return Ok(EXIT_OK);
        }
    };
    let report = threshold_report(ThresholdInputs::new(n, alpha, a.delta, a.epsilon)?)?;
    write!(out, "{}", report_table(&report))?;
    writeln!(out, "{}", serde_json::to_string(&report)?)?;
    if a.strict && !report.feasible() {
        eprintln!("infeasible: A >= 100 and f >= 0.9 are both required");
        return Ok(EXIT_INFEASIBLE);
    }
    Ok(EXIT_OK)
}

fn parse_strategy(text: &str, n: usize) -> Result<AdversaryStrategy> {
    let s = match text {
        "empty" => AdversaryStrategy::EmptySet,
        "full" => AdversaryStrategy::FullSet,
        other => match other.strip_prefix("uniform:").map(str::parse::<usize>) {
            Some(Ok(size)) => AdversaryStrategy::UniformRandomOfSize { size },
            _ => {
                return Err(invalid(
                    "strategy",
                    format!("`{text}` is not empty, full, or uniform:<m>"),
                ))
            }
        },
    };
    s.validate(n)?;
    Ok(s)
}

fn parse_one_based(text: &str, n: usize) -> Result<AdversaryStrategy> {
    let members = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(i - 1),
            _ => Err(invalid("set", format!("`{t}` is not a 1-based index"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let s = AdversaryStrategy::FixedSet { members };
    s.validate(n)?;
    Ok(s)
}

pub fn cmd_game(cmd: &GameCommand, out: &mut impl Write) -> Result<i32> {
    let (a, exact) = match cmd {
        GameCommand::Simulate(a) => (a, false),
        GameCommand::Exact(a) => (a, true),
    };
    let params = GameParams::new(a.n, a.alpha, a.w, a.epsilon)?;
    let strategy = match (&a.set, &a.strategy) {
        (Some(set), _) => parse_one_based(set, a.n)?,
        (None, Some(s)) => parse_strategy(s, a.n)?,
        (None, None) => AdversaryStrategy::EmptySet,
    };
    let (probability, summary) = if exact {
        // every subset of a given size wins equally often
        let subset = match &strategy {
            AdversaryStrategy::UniformRandomOfSize { size } => Subset::from_indices(a.n, 0..*size)?,
            other => other.fixed_subset(a.n)?.expect("deterministic strategy"),
        };
        (exact_win_probability(&params, &subset)?, None)
    } else {
        let s = monte_carlo_win_probability(&params, &strategy, a.trials, a.seed)?;
        (s.point_estimate, Some(s))
    };
    match &summary {
        None => writeln!(out, "win_probability {probability:.6}")?,
        Some(s) => writeln!(
            out,
            "win_probability {:.6} ci99 [{:.6}, {:.6}] ({} of {} trials)",
            s.point_estimate, s.ci_low, s.ci_high, s.successes, s.trials
        )?,
    }
    if let Some(path) = &a.out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "mode",
            "n",
            "alpha",
            "w",
            "epsilon",
            "strategy",
            "trials",
            "successes",
            "probability",
            "ci_low",
            "ci_high",
        ])?;
        let field = |v: Option<String>| v.unwrap_or_default();
        w.write_record([
            if exact {
                "exact".into()
            } else {
                "simulate".into()
            },
            a.n.to_string(),
            a.alpha.to_string(),
            a.w.to_string(),
            a.epsilon.to_string(),
            strategy.label(),
            field(summary.as_ref().map(|s| s.trials.to_string())),
            field(summary.as_ref().map(|s| s.successes.to_string())),
            probability.to_string(),
            field(summary.as_ref().map(|s| s.ci_low.to_string())),
            field(summary.as_ref().map(|s| s.ci_high.to_string())),
        ])?;
        w.flush()?;
    }
    Ok(EXIT_OK)
}

fn print_counts(out: &mut impl Write, c: &RunCounts) -> std::io::Result<()> {
    let line: Vec<String> = c
        .key_values()
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    writeln!(out, "{}", line.join(" "))
}

pub fn cmd_protocol(a: &ProtocolArgs, out: &mut impl Write) -> Result<i32> {
    let n = usize::try_from(a.n).map_err(|_| invalid("n", "too large"))?;
    let p_zero = match (&a.circuit, a.p_zero) {
        (Some(path), _) => {
            let circuit = Circuit::parse(&std::fs::read_to_string(path)?)?;
            let p = acceptance_probability(&circuit)?;
            writeln!(out, "p_zero {p}")?;
            p
        }
        (None, Some(p)) => p,
        (None, None) => return Err(invalid("p_zero", "give --circuit or --p-zero")),
    };
    let w = match a.w {
        Some(w) => w,
        None => {
            let r = threshold_report(ThresholdInputs::new(a.n, alpha_from_q(a.q)?, a.delta, 0.0)?)?;
            if !(r.w > 0.0) {
                return Err(Error::Infeasible(format!(
                    "w = {} at N = {}; give --w explicitly",
                    r.w, a.n
                )));
            }
            AbortThreshold::Real(r.w.min(1.0))
        }
    };
    let corruption = match a.corruption.as_str() {
        "wrong-bit" => CorruptionMode::WrongBit,
        "uniform-bit" => CorruptionMode::UniformBit,
        other => {
            return Err(invalid(
                "corruption",
                format!("`{other}` is not wrong-bit or uniform-bit"),
            ))
        }
    };
    let params = ProtocolParams::new(n, w, a.p_noise, p_zero, a.q)?.with_corruption(corruption);
    let strategy = match a.attack.as_str() {
        "honest" => None,
        other => Some(parse_strategy(other, n)?),
    };
    if a.trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    writeln!(out, "instance {} w {}", params.instance_label(), params.w)?;
    let key = StreamKey::new(a.seed, PROTOCOL_STREAM);
    let mut tallies = [0u64; 5];
    for i in 0..a.trials {
        let mut rng = key.trial(i);
        let plan = strategy
            .as_ref()
            .map(|s| AttackPlan::from_subset(&s.sample(n, &mut rng)));
        let counts = run_protocol(&params, plan.as_ref(), &mut rng)?;
        if a.trials == 1 {
            print_counts(out, &counts)?;
        }
        let slot = match counts.verdict {
            Verdict::Accept => 0,
            Verdict::Reject => 1,
            Verdict::Abort(crate::protocol::AbortReason::XTest) => 2,
            Verdict::Abort(crate::protocol::AbortReason::ZTest) => 3,
            Verdict::Abort(crate::protocol::AbortReason::Degenerate) => 4,
        };
        tallies[slot] += 1;
    }
    if a.trials > 1 {
        let names = ["accept", "reject", "abort-x", "abort-z", "abort-degenerate"];
        for (name, count) in names.iter().zip(tallies) {
            writeln!(out, "{name:<17} {count}")?;
        }
        let s = TrialSummary::new(tallies[0], a.trials, a.seed);
        writeln!(
            out,
            "accept_rate {:.6} ci99 [{:.6}, {:.6}]",
            s.point_estimate, s.ci_low, s.ci_high
        )?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_experiment(a: &ExperimentArgs, out: &mut impl Write) -> Result<i32> {
    let mut overrides = a.overrides.clone();
    if let Some(seed) = a.seed {
        overrides.push(format!("seed={seed}"));
    }
    if let Some(trials) = a.trials {
        overrides.push(format!("trials={trials}"));
    }
    if let Some(workers) = a.workers {
        overrides.push(format!("workers={workers}"));
    }
    if a.allow_out_of_regime {
        overrides.push("allow_out_of_regime=true".into());
    }
    let config = load_config(&a.config, &overrides)?;
    let report = run_config(&config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for row in &report.rows {
        let verdict = match row.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "info",
        };
        writeln!(
            out,
            "{verdict:<4} {:<18} {:<22} {}/{} estimate {:.6}{}",
            row.experiment,
            row.strategy,
            row.successes,
            row.trials,
            row.estimate,
            row.ci_high
                .map(|h| format!(" ci_high {h:.6}"))
                .unwrap_or_default()
        )?;
    }
    for path in write_outputs(&report, &a.out)? {
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_BOUND_FAILED
    })
}

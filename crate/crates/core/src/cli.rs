//! The `tpd` command line.
//!
//! Exit codes: 0 yes or success, 3 no or failed check, 2 every applicable
//! solver refused the instance on a guard, 4 bench disagreement, 1 any other error.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_bench, BenchSpec};
use crate::dispatch::{solve_auto, solve_with, SolveOptions};
use crate::dp_structured::KernelMode;
use crate::error::{Error, Result};
use crate::feasibility::verify_schedule;
use crate::generators::{gen_random_instance, reduce_subset_sum, GenParams, TargetRule, TreeShape};
use crate::io::{instance_to_json, read_instance, read_schedule, schedule_to_json, ScheduleFile};
use crate::model::{Mode, TaxaSet};
use crate::outcome::{Algorithm, SolveOutcome};

pub const EXIT_YES: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_NO: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "tpd", version, about = "Exact solvers for phylogenetic diversity under rescue deadlines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the target diversity can be saved.
    Solve(SolveArgs),
    /// Check a schedule file against an instance.
    Verify(VerifyArgs),
    /// Diversity of a set of taxa.
    Pd(PdArgs),
    /// Generate a random or subset-sum instance.
    Gen(GenArgs),
    /// Run a seeded sweep through several solvers and cross-check them.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Collaborative,
    Strict,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Collaborative => Mode::Collaborative,
            ModeArg::Strict => Mode::Strict,
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// `auto` or a solver name.
    #[arg(long, default_value = "auto")]
    algorithm: String,
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    #[arg(long, env = "TPD_SEED", default_value_t = 0)]
    seed: u64,
    /// Where to write the schedule of a yes answer.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overrides the mode stored in the instance.
    #[arg(long)]
    mode: Option<ModeArg>,
    #[arg(long, default_value = "by-capacity")]
    kernel: String,
    /// Largest trial count `auto` accepts for a randomized solver.
    #[arg(long, default_value_t = 50_000)]
    trial_budget: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
}

#[derive(Args, Debug)]
struct PdArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Comma-separated taxon names; all taxa when omitted.
    #[arg(long)]
    taxa: Option<String>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    teams: usize,
    #[arg(long, default_value_t = 8)]
    max_ex: u64,
    #[arg(long, default_value_t = 4)]
    max_len: u64,
    #[arg(long, default_value_t = 5)]
    max_weight: u64,
    #[arg(long, default_value = "random-binary")]
    shape: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Collaborative)]
    mode: ModeArg,
    /// `half`, `fixed:N` or `loss:N`.
    #[arg(long, default_value = "half")]
    target: String,
    #[arg(long, default_value_t = 0.8)]
    savable: f64,
    #[arg(long, env = "TPD_SEED", default_value_t = 0)]
    seed: u64,
    /// Comma-separated values; builds a subset-sum reduction instead.
    #[arg(long)]
    subset_sum: Option<String>,
    #[arg(long, requires = "subset_sum")]
    pick: Option<u64>,
    #[arg(long, requires = "subset_sum")]
    goal: Option<u64>,
    #[arg(long, requires = "subset_sum")]
    offset: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// JSON sweep spec; defaults apply to omitted fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Adds a runtime column, which makes the CSV nondeterministic.
    #[arg(long)]
    timings: bool,
    /// Where the smallest disagreeing instance is written.
    #[arg(long, default_value = "bench-disagreement.json")]
    triage: PathBuf,
}

fn parse_target(s: &str) -> Result<TargetRule> {
    let bad = || Error::BadParams(format!("unknown target rule `{s}`"));
    match s.split_once(':') {
        None if s == "half" => Ok(TargetRule::HalfTotal),
        Some(("fixed", v)) => v.parse().map(TargetRule::Fixed).map_err(|_| bad()),
        Some(("loss", v)) => v.parse().map(TargetRule::Loss).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| Error::BadParams(format!("`{v}` is not a non-negative integer"))))
        .collect()
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_YES;
            }
            let _ = write!(err, "{}", e.render());
            return EXIT_ERROR;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a, out, err),
        Command::Verify(a) => verify(a, out),
        Command::Pd(a) => pd(a, out),
        Command::Gen(a) => gen(a, out),
        Command::Bench(a) => bench(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_guard() {
                EXIT_GUARD
            } else {
                EXIT_ERROR
            }
        }
    }
}

fn print_outcome(out: &mut dyn Write, instance: &crate::model::Instance, o: &SolveOutcome) -> Result<()> {
    let d = &o.diagnostics;
    writeln!(out, "decision: {}", if o.yes { "yes" } else { "no" })?;
    writeln!(out, "algorithm: {}", d.algorithm)?;
    writeln!(out, "mode: {}", d.mode)?;
    writeln!(out, "target: {}", instance.target())?;
    match (&o.witness, d.optimum) {
        (Some(w), _) => writeln!(out, "pd: {}", w.pd)?,
        (None, Some(opt)) => writeln!(out, "pd: {opt}")?,
        (None, None) => writeln!(out, "pd: -")?,
    }
    if let Some(w) = &o.witness {
        writeln!(out, "saved: {}", instance.names(&w.saved).join(","))?;
    }
    writeln!(out, "trials: {}/{}", d.trials_run, d.trials_planned)?;
    if let Some(delta) = d.delta {
        writeln!(out, "delta: {delta}")?;
    }
    if let Some(seed) = d.seed {
        writeln!(out, "seed: {seed}")?;
    }
    Ok(())
}

fn solve(a: SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let mut instance = read_instance(&a.instance)?;
    if let Some(m) = a.mode {
        instance = instance.with_mode(m.into());
    }
    let opts = SolveOptions {
        delta: a.delta,
        seed: a.seed,
        kernel: a.kernel.parse::<KernelMode>()?,
        auto_trial_budget: a.trial_budget,
        ..SolveOptions::default()
    };
    let start = Instant::now();
    let outcome = if a.algorithm == "auto" {
        let report = solve_auto(&instance, &opts)?;
        for (alg, e) in &report.skipped {
            writeln!(out, "skipped: {alg} ({e})")?;
        }
        report.outcome
    } else {
        solve_with(&instance, a.algorithm.parse::<Algorithm>()?, &opts)?
    };
    let elapsed = start.elapsed();
    print_outcome(out, &instance, &outcome)?;
    writeln!(err, "wall time: {:.3} ms", elapsed.as_secs_f64() * 1e3)?;
    match (&outcome.witness, &a.output) {
        (Some(w), Some(path)) => std::fs::write(path, schedule_to_json(&instance, &w.schedule))?,
        (None, Some(path)) => std::fs::write(path, "no\n")?,
        _ => {}
    }
    Ok(if outcome.yes { EXIT_YES } else { EXIT_NO })
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let instance = read_instance(&a.instance)?;
    let text = std::fs::read_to_string(&a.schedule)?;
    let file: ScheduleFile =
        serde_json::from_str(&text).map_err(|e| Error::ParseError { offset: 0, message: e.to_string() })?;
    let schedule = read_schedule(&a.schedule, &instance)?;
    let report = verify_schedule(&instance, &schedule)?;
    for h in &report.hours {
        writeln!(out, "{}: {}/{}", instance.taxon(h.taxon).name, h.assigned, h.required)?;
    }
    for v in &report.violations {
        writeln!(out, "violation: {v:?}")?;
    }
    let pd = instance.pd(&schedule.saved);
    let mut ok = report.passed();
    if file.pd != pd {
        writeln!(out, "violation: pd field {} differs from the computed {pd}", file.pd)?;
        ok = false;
    }
    writeln!(out, "pd: {pd}")?;
    writeln!(out, "target met: {}", if pd >= instance.target() { "yes" } else { "no" })?;
    writeln!(out, "valid: {}", if ok { "yes" } else { "no" })?;
    Ok(if ok { EXIT_YES } else { EXIT_NO })
}

fn pd(a: PdArgs, out: &mut dyn Write) -> Result<i32> {
    let instance = read_instance(&a.instance)?;
    let set: TaxaSet = match &a.taxa {
        None => instance.all_taxa(),
        Some(s) if s.trim().is_empty() => TaxaSet::new(),
        Some(s) => s.split(',').map(|n| instance.taxon_id(n.trim())).collect::<Result<_>>()?,
    };
    writeln!(out, "{}", instance.pd(&set))?;
    Ok(EXIT_YES)
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<i32> {
    let instance = match &a.subset_sum {
        Some(values) => {
            let pick = a.pick.ok_or_else(|| Error::BadParams("--pick is required with --subset-sum".into()))?;
            let goal = a.goal.ok_or_else(|| Error::BadParams("--goal is required with --subset-sum".into()))?;
            reduce_subset_sum(&parse_list(values)?, pick, goal, a.offset)?
        }
        None => {
            let params = GenParams {
                n: a.n,
                teams: a.teams,
                max_ex: a.max_ex,
                max_len: a.max_len,
                max_weight: a.max_weight,
                shape: a.shape.parse::<TreeShape>()?,
                mode: a.mode.into(),
                target: parse_target(&a.target)?,
                savable_fraction: a.savable,
            };
            gen_random_instance(&params, a.seed)?
        }
    };
    let text = instance_to_json(&instance);
    match &a.output {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_YES)
}

fn bench(a: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let spec: BenchSpec = match &a.spec {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)
            .map_err(|e| Error::ParseError { offset: 0, message: e.to_string() })?,
        None => BenchSpec::default(),
    };
    let report = run_bench(&spec, &SolveOptions::default(), a.timings)?;
    match &a.output {
        Some(path) => report.write_csv(std::fs::File::create(path)?, a.timings)?,
        None => report.write_csv(&mut *out, a.timings)?,
    }
    writeln!(
        err,
        "instances: {}, disagreements: {}, randomized misses: {}",
        report.instances.len(),
        report.disagreements.len(),
        report.false_negatives.len()
    )?;
    if let Some(inst) = report.smallest_disagreement() {
        std::fs::write(&a.triage, instance_to_json(inst))?;
        writeln!(err, "smallest disagreeing instance written to {}", a.triage.display())?;
        return Ok(EXIT_DISAGREEMENT);
    }
    Ok(EXIT_YES)
}

//! Command-line surface: `repair`, `unsatguided`, `bench`, `classify`.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 no patch found.

use clap::{Args, Parser, Subcommand};
use minirepair::bench::{run_bench, rows_to_csv, summary_to_json, BenchConfig};
use minirepair::corpus::{load_case, load_corpus};
use minirepair::evalkit::{classify_patch, DomainSpec, OverfittingReport};
use minirepair::lang::{parse, parse_bool_expr, LocationId, Patch, PatchMode, Program};
use minirepair::patchfile::{load_suite, source_diff, trace_to_json, PatchFile};
use minirepair::synth::{repair, NoPatchReason, RepairConfig, SynthPolicy};
use minirepair::testgen::{GenConfig, TestCase};
use minirepair::unsatguided::{run_unsatguided, UgConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "minirepair", version, about = "Test-suite-based condition repair workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a patch making the whole suite pass.
    Repair(RepairArgs),
    /// Run incremental test-suite augmentation and write the trace.
    Unsatguided(UgArgs),
    /// Run the full corpus pipeline and write CSV plus summary reports.
    Bench(BenchArgs),
    /// Classify a patch against a reference program over a finite domain.
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct RepairArgs {
    /// Buggy program (.mini).
    #[arg(long)]
    program: PathBuf,
    /// Test suite (.jsonl).
    #[arg(long)]
    tests: PathBuf,
    /// Candidate-evaluation budget.
    #[arg(long, default_value_t = 200_000)]
    budget: u64,
    /// Repair only this location id.
    #[arg(long)]
    location: Option<u32>,
    /// Output directory for patch.json and patch.diff.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct UgArgs {
    /// Corpus case directory (buggy.mini, correct.mini, tests.jsonl, case.toml).
    #[arg(long, conflicts_with_all = ["program", "tests"])]
    case: Option<PathBuf>,
    /// Buggy program (.mini), with --tests.
    #[arg(long, requires = "tests")]
    program: Option<PathBuf>,
    /// Test suite (.jsonl), with --program.
    #[arg(long)]
    tests: Option<PathBuf>,
    /// Generation seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Initial-repair candidate budget.
    #[arg(long, default_value_t = 200_000)]
    budget: u64,
    /// Re-run budget multiplier over t_initial.
    #[arg(long)]
    multiplier: Option<u64>,
    /// Generated tests per target.
    #[arg(long)]
    count: Option<u32>,
    /// Sampling ranges, `lo..hi` comma-separated per parameter (one range
    /// broadcasts to all parameters).
    #[arg(long)]
    range: Option<String>,
    /// Repair only this location id.
    #[arg(long)]
    location: Option<u32>,
    /// Output directory for trace.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Corpus directory.
    #[arg(long)]
    corpus: PathBuf,
    /// Seeds: `1..30`, or a comma-separated list.
    #[arg(long, default_value = "1..30")]
    seeds: String,
    /// Initial-repair candidate budget.
    #[arg(long, default_value_t = 200_000)]
    budget: u64,
    /// Output directory for rows.csv and summary.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Buggy program (.mini).
    #[arg(long)]
    buggy: PathBuf,
    /// Reference program (.mini).
    #[arg(long)]
    correct: PathBuf,
    /// Patch file written by `repair`.
    #[arg(long, conflicts_with_all = ["expr", "location", "mode"])]
    patch: Option<PathBuf>,
    /// Patch expression in source syntax (with --location and --mode).
    #[arg(long)]
    expr: Option<String>,
    /// Patch location id.
    #[arg(long)]
    location: Option<u32>,
    /// Patch mode: condition_replace or precondition_insert.
    #[arg(long)]
    mode: Option<String>,
    /// Domain ranges, `lo..hi` comma-separated per parameter.
    #[arg(long)]
    domain: String,
    /// Optional output file for the report (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(1)
}

fn parse_ranges(text: &str, arity: usize) -> Result<Vec<(i64, i64)>, String> {
    let mut ranges = Vec::new();
    for part in text.split(',') {
        let (lo, hi) = part
            .split_once("..")
            .ok_or_else(|| format!("bad range {part:?}, expected lo..hi"))?;
        let lo: i64 = lo.trim().parse().map_err(|_| format!("bad range bound {lo:?}"))?;
        let hi: i64 = hi.trim().parse().map_err(|_| format!("bad range bound {hi:?}"))?;
        if lo > hi {
            return Err(format!("empty range {part:?}"));
        }
        ranges.push((lo, hi));
    }
    if ranges.len() == 1 && arity > 1 {
        return Ok(vec![ranges[0]; arity]);
    }
    if ranges.len() != arity {
        return Err(format!(
            "expected {arity} range(s), got {}",
            ranges.len()
        ));
    }
    Ok(ranges)
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, String> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| format!("bad seed {lo:?}"))?;
        let hi: u64 = hi.trim().parse().map_err(|_| format!("bad seed {hi:?}"))?;
        if lo > hi {
            return Err("empty seed range".to_string());
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| format!("bad seed {s:?}")))
        .collect()
}

fn load_program(path: &Path) -> Result<Program, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_repair(args: &RepairArgs) -> ExitCode {
    let program = match load_program(&args.program) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let suite = match load_suite(&args.tests) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let policy = SynthPolicy::default();
    if suite.iter().all(|t| t.passes_on(&program, policy.fuel)) {
        return fail("nothing to repair: every test passes");
    }
    let cfg = RepairConfig {
        max_candidates: args.budget,
        location_override: args.location.map(LocationId),
        policy,
    };
    let outcome = repair(&program, &suite, &cfg);
    match outcome.patch {
        Some(patch) => {
            let patched = program.apply_patch(&patch).expect("validated patch applies");
            let json = PatchFile::from_patch(&patch).to_json();
            let diff = source_diff(&program, &patched);
            if let Err(e) = write_out(&args.out, "patch.json", &json)
                .and_then(|_| write_out(&args.out, "patch.diff", &diff))
            {
                return fail(e);
            }
            println!(
                "patch at {} ({} steps): {}",
                patch.location,
                outcome.steps_used,
                minirepair::lang::bool_to_string(&patch.expression)
            );
            ExitCode::SUCCESS
        }
        None => {
            let reason = match outcome.reason {
                Some(NoPatchReason::BudgetExhausted) => "budget exhausted",
                _ => "search space exhausted",
            };
            eprintln!("no patch ({reason}, {} steps)", outcome.steps_used);
            ExitCode::from(2)
        }
    }
}

fn cmd_unsatguided(args: &UgArgs) -> ExitCode {
    let (program, suite, policy, mut gen_ranges, count, multiplier) = if let Some(case_dir) =
        &args.case
    {
        let case = match load_case(case_dir) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        (
            case.p_buggy.clone(),
            case.manual_suite.clone(),
            case.policy.clone(),
            case.gen_ranges.clone(),
            case.gen_count,
            case.multiplier,
        )
    } else {
        let (Some(program_path), Some(tests_path)) = (&args.program, &args.tests) else {
            return fail("provide --case or both --program and --tests");
        };
        let program = match load_program(program_path) {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        let suite = match load_suite(tests_path) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        let arity = program.params.len();
        let ranges = match &args.range {
            Some(text) => match parse_ranges(text, arity) {
                Ok(r) => r,
                Err(e) => return fail(e),
            },
            None => vec![(-20, 20); arity],
        };
        (program, suite, SynthPolicy::default(), ranges, 20, 2)
    };
    // explicit --range overrides the case default
    if let Some(text) = &args.range {
        match parse_ranges(text, program.params.len()) {
            Ok(r) => gen_ranges = r,
            Err(e) => return fail(e),
        }
    }
    run_ug_with(args, program, suite, policy, gen_ranges, count, multiplier)
}

fn run_ug_with(
    args: &UgArgs,
    program: Program,
    suite: Vec<TestCase>,
    policy: SynthPolicy,
    gen_ranges: Vec<(i64, i64)>,
    count: u32,
    multiplier: u64,
) -> ExitCode {
    if suite.iter().all(|t| t.passes_on(&program, policy.fuel)) {
        return fail("nothing to repair: every test passes");
    }
    let gen = GenConfig {
        seed: args.seed,
        count: args.count.unwrap_or(count),
        ranges: gen_ranges,
        fuel: policy.fuel,
    };
    let mut cfg = UgConfig::new(gen);
    cfg.initial_budget = args.budget;
    cfg.multiplier = args.multiplier.unwrap_or(multiplier);
    cfg.policy = policy;
    cfg.location_override = args.location.map(LocationId);
    let trace = run_unsatguided(&program, &suite, &cfg);
    let json = trace_to_json(&trace);
    if let Err(e) = write_out(&args.out, "trace.json", &json) {
        return fail(e);
    }
    match &trace.final_patch {
        Some(patch) => {
            println!(
                "final patch at {}: {} ({} kept, {} discarded)",
                patch.location,
                minirepair::lang::bool_to_string(&patch.expression),
                trace.kept(),
                trace.discarded()
            );
            ExitCode::SUCCESS
        }
        None => {
            eprintln!("no initial patch; empty trace written");
            ExitCode::from(2)
        }
    }
}

fn cmd_bench(args: &BenchArgs) -> ExitCode {
    let seeds = match parse_seeds(&args.seeds) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if seeds.is_empty() {
        return fail("at least one seed is required");
    }
    let cases = match load_corpus(&args.corpus) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let cfg = BenchConfig {
        seeds,
        budget: args.budget,
    };
    let output = run_bench(&cases, &cfg);
    let csv = rows_to_csv(&output.rows);
    let summary = summary_to_json(&output.summary);
    if let Err(e) = write_out(&args.out, "rows.csv", &csv)
        .and_then(|_| write_out(&args.out, "summary.json", &summary))
    {
        return fail(e);
    }
    println!(
        "{} cases x {} seeds -> {} rows; regression alleviation {:.3} ({} of {}); incomplete-fixing neutrality {:.3} ({} of {})",
        output.summary.cases,
        cfg.seeds.len(),
        output.summary.rows,
        output.summary.regression_alleviation.fraction,
        output.summary.regression_alleviation.nonneg_rows,
        output.summary.regression_alleviation.pool_rows,
        output.summary.incomplete_fixing_neutrality.fraction,
        output.summary.incomplete_fixing_neutrality.nonneg_rows,
        output.summary.incomplete_fixing_neutrality.pool_rows,
    );
    ExitCode::SUCCESS
}

fn cmd_classify(args: &ClassifyArgs) -> ExitCode {
    let buggy = match load_program(&args.buggy) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let correct = match load_program(&args.correct) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let domain = match parse_ranges(&args.domain, buggy.params.len()) {
        Ok(r) => DomainSpec { ranges: r },
        Err(e) => return fail(e),
    };
    let patch: Patch = if let Some(path) = &args.patch {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(format!("{}: {e}", path.display())),
        };
        match PatchFile::from_json(&text).and_then(|f| f.to_patch()) {
            Ok(p) => p,
            Err(e) => return fail(format!("{}: {e}", path.display())),
        }
    } else {
        let (Some(expr), Some(location), Some(mode)) = (&args.expr, args.location, &args.mode)
        else {
            return fail("provide --patch, or --expr with --location and --mode");
        };
        let mode = match mode.as_str() {
            "condition_replace" => PatchMode::ConditionReplace,
            "precondition_insert" => PatchMode::PreconditionInsert,
            other => return fail(format!("unknown mode {other:?}")),
        };
        let expression = match parse_bool_expr(expr) {
            Ok(e) => e,
            Err(e) => return fail(e),
        };
        Patch {
            location: LocationId(location),
            mode,
            expression,
            steps_used: 0,
        }
    };
    if buggy.apply_patch(&patch).is_err() {
        return fail("patch does not apply to the buggy program");
    }
    let fuel = SynthPolicy::default().fuel;
    let (part, label) = classify_patch(&buggy, &correct, &patch, &domain, fuel);
    let report = OverfittingReport {
        label,
        failing_bugexpo: part.i_bug.len() as u64 - part.i_patch_fixed.len() as u64,
        failing_normal: part.i_patch_broken.len() as u64,
        removed_inc: 0,
        removed_reg: 0,
    };
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "label": label.to_string(),
        "i_bug": part.i_bug.len(),
        "i_correct": part.i_correct.len(),
        "i_patch": part.i_patch.len(),
        "i_patch_fixed": part.i_patch_fixed.len(),
        "i_patch_broken": part.i_patch_broken.len(),
        "i_patch_still_wrong": part.i_patch_still_wrong.len(),
        "unrepaired_bug_points": report.failing_bugexpo,
        "broken_correct_points": report.failing_normal,
    }))
    .expect("report serializes");
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                return fail(format!("{}: {e}", path.display()));
            }
        }
        None => println!("{json}"),
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Repair(args) => cmd_repair(args),
        Command::Unsatguided(args) => cmd_unsatguided(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Classify(args) => cmd_classify(args),
    }
}

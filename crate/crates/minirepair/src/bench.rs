//! Corpus-wide evaluation: for every (case, seed) pair, run the plain repair
//! and the augmentation loop, classify both patches against the reference
//! program, and measure impact on the pooled generated tests (all tests
//! generated across all seeds of a case, deduplicated by input, first
//! occurrence wins). Emits one CSV row per pair plus an aggregate summary
//! that is a pure fold of the rows.

use crate::corpus::BenchCase;
use crate::evalkit::{
    assess_impact, classify_patch, classify_tests, repair_oracles, OverfitLabel,
};
use crate::lang::Patch;
use crate::synth::{repair, RepairConfig};
use crate::testgen::TestCase;
use crate::unsatguided::{run_unsatguided, DecisionOutcome, UgConfig, UgTrace};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub seeds: Vec<u64>,
    /// Initial-repair candidate budget.
    pub budget: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seeds: (1..=30).collect(),
            budget: 200_000,
        }
    }
}

/// One (case, seed) row. Mirrors the result-table columns: generated and
/// bug-exposing test counts, per-patch failing counts on the pooled suite,
/// removed-test counts, the change flag and the improvement deltas, plus
/// correctness-by-equivalence for both patches.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub case: String,
    pub seed: u64,
    /// Case ran end to end; false marks an isolated failure (no initial
    /// patch), with the metric fields zeroed.
    pub ok: bool,
    pub gen_tests: u64,
    pub gen_bugexpo: u64,
    pub removed: u64,
    pub removed_bugexpo: u64,
    pub kept_bugexpo: u64,
    pub initial_label: String,
    pub initial_fail_bugexpo: u64,
    pub initial_fail_normal: u64,
    pub final_label: String,
    pub final_fail_bugexpo: u64,
    pub final_fail_normal: u64,
    pub patch_changed: bool,
    pub removed_inc: i64,
    pub removed_reg: i64,
    pub initial_correct: bool,
    pub final_correct: bool,
    /// `<location>:<mode>:<expression>` of the final patch.
    pub final_patch: String,
}

/// Stable textual form used for distinct-patch counting and reports.
pub fn patch_key(p: &Patch) -> String {
    let mode = match p.mode {
        crate::lang::PatchMode::ConditionReplace => "condition_replace",
        crate::lang::PatchMode::PreconditionInsert => "precondition_insert",
    };
    format!("{}:{}:{}", p.location, mode, crate::lang::bool_to_string(&p.expression))
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseSummary {
    pub case: String,
    pub seeds: u64,
    pub initial_label: String,
    /// `X/Y`: runs whose final patch differs from the initial one.
    pub change_ratio: String,
    pub unique_final_patches: u64,
    pub avg_removed_inc: f64,
    pub avg_removed_reg: f64,
    pub inc_direction: String,
    pub reg_direction: String,
    pub correct_preserved: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoolStat {
    pub pool_rows: u64,
    pub nonneg_rows: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub cases: u64,
    pub rows: u64,
    pub per_case: Vec<CaseSummary>,
    /// Rows from cases whose initial patch fails pooled normal tests:
    /// share with `removed_reg >= 0`.
    pub regression_alleviation: PoolStat,
    /// Rows that kept at least one bug-exposing test: share with
    /// `removed_inc >= 0`.
    pub incomplete_fixing_neutrality: PoolStat,
    /// Distribution of `removed_inc` over the neutrality pool.
    pub removed_inc_distribution: BTreeMap<i64, u64>,
}

#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub rows: Vec<BenchRow>,
    pub summary: Summary,
}

/// Patches are the same repair when location, mode and expression agree;
/// bookkeeping like step counts is ignored.
pub fn same_repair(a: &Patch, b: &Patch) -> bool {
    a.location == b.location && a.mode == b.mode && a.expression == b.expression
}

struct CaseRun {
    case_id: String,
    rows: Vec<BenchRow>,
    initial_label: Option<OverfitLabel>,
}

fn no_patch_row(case_id: &str, seed: u64) -> BenchRow {
    BenchRow {
        case: case_id.to_string(),
        seed,
        ok: false,
        gen_tests: 0,
        gen_bugexpo: 0,
        removed: 0,
        removed_bugexpo: 0,
        kept_bugexpo: 0,
        initial_label: "none".to_string(),
        initial_fail_bugexpo: 0,
        initial_fail_normal: 0,
        final_label: "none".to_string(),
        final_fail_bugexpo: 0,
        final_fail_normal: 0,
        patch_changed: false,
        removed_inc: 0,
        removed_reg: 0,
        initial_correct: false,
        final_correct: false,
        final_patch: String::new(),
    }
}

fn run_case(case: &BenchCase, cfg: &BenchConfig) -> CaseRun {
    let fuel = case.policy.fuel;
    let repair_cfg = RepairConfig {
        max_candidates: cfg.budget,
        location_override: case.location_override,
        policy: case.policy.clone(),
    };
    let initial = repair(&case.p_buggy, &case.manual_suite, &repair_cfg);
    let Some(initial_patch) = initial.patch else {
        return CaseRun {
            case_id: case.id.clone(),
            rows: cfg.seeds.iter().map(|&s| no_patch_row(&case.id, s)).collect(),
            initial_label: None,
        };
    };

    let traces: Vec<(u64, UgTrace)> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let mut ug = UgConfig::new(case.gen_config(seed));
            ug.initial_budget = cfg.budget;
            ug.multiplier = case.multiplier;
            ug.policy = case.policy.clone();
            ug.location_override = case.location_override;
            (seed, run_unsatguided(&case.p_buggy, &case.manual_suite, &ug))
        })
        .collect();

    // pooled generated tests across all seeds, deduplicated by input
    let mut pooled: Vec<TestCase> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (_, trace) in &traces {
        for d in &trace.decisions {
            if seen.insert(d.test.input.clone()) {
                pooled.push(d.test.clone());
            }
        }
    }
    let (ts_normal, ts_bugexpo) = classify_tests(&pooled, &case.p_correct, fuel);
    let ts_bugexpo_fixed =
        repair_oracles(&ts_bugexpo, &case.p_correct, fuel).expect("bug-exposing tests fail on reference");

    let (_, initial_label) = classify_patch(
        &case.p_buggy,
        &case.p_correct,
        &initial_patch,
        &case.domain,
        fuel,
    );

    let is_bugexpo =
        |t: &TestCase| -> bool { !t.passes_on(&case.p_correct, fuel) };

    let rows: Vec<BenchRow> = traces
        .par_iter()
        .map(|(seed, trace)| {
            let final_patch = trace.final_patch.as_ref().expect("initial patch exists");
            let impact = assess_impact(
                &case.p_buggy,
                &initial_patch,
                final_patch,
                &ts_normal,
                &ts_bugexpo_fixed,
                fuel,
            );
            let (_, final_label) = classify_patch(
                &case.p_buggy,
                &case.p_correct,
                final_patch,
                &case.domain,
                fuel,
            );
            let gen_bugexpo = trace
                .decisions
                .iter()
                .filter(|d| is_bugexpo(&d.test))
                .count() as u64;
            let removed = trace.discarded() as u64;
            let removed_bugexpo = trace
                .decisions
                .iter()
                .filter(|d| d.outcome != DecisionOutcome::Kept && is_bugexpo(&d.test))
                .count() as u64;
            let kept_bugexpo = gen_bugexpo - removed_bugexpo;
            BenchRow {
                case: case.id.clone(),
                seed: *seed,
                ok: true,
                gen_tests: trace.decisions.len() as u64,
                gen_bugexpo,
                removed,
                removed_bugexpo,
                kept_bugexpo,
                initial_label: initial_label.to_string(),
                initial_fail_bugexpo: impact.failing_bugexpo_old,
                initial_fail_normal: impact.failing_normal_old,
                final_label: final_label.to_string(),
                final_fail_bugexpo: impact.failing_bugexpo_new,
                final_fail_normal: impact.failing_normal_new,
                patch_changed: !same_repair(&initial_patch, final_patch),
                removed_inc: impact.removed_inc,
                removed_reg: impact.removed_reg,
                initial_correct: initial_label == OverfitLabel::Correct,
                final_correct: final_label == OverfitLabel::Correct,
                final_patch: patch_key(final_patch),
            }
        })
        .collect();
    CaseRun {
        case_id: case.id.clone(),
        rows,
        initial_label: Some(initial_label),
    }
}

fn direction(avg: f64) -> String {
    if avg > 0.0 {
        "improve".to_string()
    } else if avg < 0.0 {
        "worse".to_string()
    } else {
        "same".to_string()
    }
}

fn summarize(case_runs: &[CaseRun]) -> Summary {
    let mut per_case = Vec::new();
    let mut reg_pool = 0u64;
    let mut reg_nonneg = 0u64;
    let mut inc_pool = 0u64;
    let mut inc_nonneg = 0u64;
    let mut inc_distribution: BTreeMap<i64, u64> = BTreeMap::new();
    let mut total_rows = 0u64;
    for run in case_runs {
        total_rows += run.rows.len() as u64;
        let ok_rows: Vec<&BenchRow> = run.rows.iter().filter(|r| r.ok).collect();
        let seeds = run.rows.len() as u64;
        let changed = ok_rows.iter().filter(|r| r.patch_changed).count() as u64;
        let mut final_keys: Vec<&str> = ok_rows.iter().map(|r| r.final_patch.as_str()).collect();
        final_keys.sort_unstable();
        final_keys.dedup();
        let avg = |f: fn(&BenchRow) -> i64| -> f64 {
            if ok_rows.is_empty() {
                0.0
            } else {
                ok_rows.iter().map(|r| f(r) as f64).sum::<f64>() / ok_rows.len() as f64
            }
        };
        let avg_inc = avg(|r| r.removed_inc);
        let avg_reg = avg(|r| r.removed_reg);
        per_case.push(CaseSummary {
            case: run.case_id.clone(),
            seeds,
            initial_label: run
                .initial_label
                .map(|l| l.to_string())
                .unwrap_or_else(|| "none".to_string()),
            change_ratio: format!("{changed}/{}", ok_rows.len()),
            unique_final_patches: final_keys.len() as u64,
            avg_removed_inc: avg_inc,
            avg_removed_reg: avg_reg,
            inc_direction: direction(avg_inc),
            reg_direction: direction(avg_reg),
            correct_preserved: ok_rows
                .iter()
                .all(|r| !r.initial_correct || r.final_correct),
        });
        for row in &ok_rows {
            if row.initial_fail_normal > 0 {
                reg_pool += 1;
                if row.removed_reg >= 0 {
                    reg_nonneg += 1;
                }
            }
            if row.kept_bugexpo > 0 {
                inc_pool += 1;
                if row.removed_inc >= 0 {
                    inc_nonneg += 1;
                }
                *inc_distribution.entry(row.removed_inc).or_insert(0) += 1;
            }
        }
    }
    let frac = |num: u64, den: u64| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    Summary {
        cases: case_runs.len() as u64,
        rows: total_rows,
        per_case,
        regression_alleviation: PoolStat {
            pool_rows: reg_pool,
            nonneg_rows: reg_nonneg,
            fraction: frac(reg_nonneg, reg_pool),
        },
        incomplete_fixing_neutrality: PoolStat {
            pool_rows: inc_pool,
            nonneg_rows: inc_nonneg,
            fraction: frac(inc_nonneg, inc_pool),
        },
        removed_inc_distribution: inc_distribution,
    }
}

/// Run the whole corpus. Rows come back in canonical (case id, seed) order
/// regardless of scheduling.
pub fn run_bench(cases: &[BenchCase], cfg: &BenchConfig) -> BenchOutput {
    let mut case_runs: Vec<CaseRun> = cases.par_iter().map(|c| run_case(c, cfg)).collect();
    case_runs.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    for run in &mut case_runs {
        run.rows.sort_by_key(|r| r.seed);
    }
    let summary = summarize(&case_runs);
    let rows = case_runs.into_iter().flat_map(|r| r.rows).collect();
    BenchOutput { rows, summary }
}

pub const CSV_HEADER: &str = "case,seed,ok,gen_tests,gen_bugexpo,removed,removed_bugexpo,kept_bugexpo,initial_label,initial_fail_bugexpo,initial_fail_normal,final_label,final_fail_bugexpo,final_fail_normal,patch_changed,removed_inc,removed_reg,initial_correct,final_correct,final_patch";

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.case,
            r.seed,
            r.ok,
            r.gen_tests,
            r.gen_bugexpo,
            r.removed,
            r.removed_bugexpo,
            r.kept_bugexpo,
            r.initial_label,
            r.initial_fail_bugexpo,
            r.initial_fail_normal,
            r.final_label,
            r.final_fail_bugexpo,
            r.final_fail_normal,
            r.patch_changed,
            r.removed_inc,
            r.removed_reg,
            r.initial_correct,
            r.final_correct,
            r.final_patch,
        ));
    }
    out
}

pub fn summary_to_json(summary: &Summary) -> String {
    serde_json::to_string_pretty(summary).expect("summary serializes")
}

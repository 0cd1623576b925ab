//! The end-to-end repair attempt: rank locations, extract angelic
//! constraints, synthesize, and re-validate the patched program against the
//! whole suite by execution.

use super::{extract_angelic, synthesize, Budget, ComponentSet, SynthPolicy, SynthResult};
use crate::faultloc::{collect_spectrum, rank_locations};
use crate::lang::{LocationId, LocationKind, Patch, PatchMode, Program};
use crate::testgen::TestCase;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairConfig {
    /// Candidate-evaluation budget for the whole walk.
    pub max_candidates: u64,
    /// Skip ranking and try only this location.
    pub location_override: Option<LocationId>,
    pub policy: SynthPolicy,
}

impl RepairConfig {
    pub fn with_budget(max_candidates: u64) -> Self {
        RepairConfig {
            max_candidates,
            location_override: None,
            policy: SynthPolicy::default(),
        }
    }
}

impl Default for RepairConfig {
    fn default() -> Self {
        Self::with_budget(200_000)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoPatchReason {
    /// The budget ran out mid-search.
    BudgetExhausted,
    /// Every location was exhausted (unsatisfiable or infeasible) with
    /// budget remaining.
    SearchExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    pub patch: Option<Patch>,
    pub steps_used: u64,
    pub reason: Option<NoPatchReason>,
}

/// Try to repair `p` so the entire suite passes. Walks locations in rank
/// order (or the override), condition replacement on `if` conditions and
/// precondition insertion on statements; the first synthesized expression
/// whose patched program passes every test wins.
pub fn repair(p: &Program, suite: &[TestCase], cfg: &RepairConfig) -> RepairOutcome {
    assert!(
        suite.iter().any(|t| !t.passes_on(p, cfg.policy.fuel)),
        "repair requires at least one failing test"
    );
    let locations: Vec<LocationId> = match cfg.location_override {
        Some(loc) => vec![loc],
        None => {
            let spectrum = collect_spectrum(p, suite, cfg.policy.fuel);
            rank_locations(&spectrum)
        }
    };
    let mut budget = Budget::new(cfg.max_candidates);
    for loc in locations {
        let Some(info) = p.location(loc) else { continue };
        let mode = match info.kind {
            LocationKind::IfCondition => PatchMode::ConditionReplace,
            LocationKind::Statement => PatchMode::PreconditionInsert,
        };
        let rc = match extract_angelic(p, loc, mode, suite, cfg.policy.angelic_bound, cfg.policy.fuel)
        {
            Ok(rc) => rc,
            Err(_) => continue,
        };
        let comps = ComponentSet::for_location(p, loc, suite, &cfg.policy);
        match synthesize(&rc, &comps, &mut budget) {
            SynthResult::Satisfier(expression) => {
                let patch = Patch {
                    location: loc,
                    mode,
                    expression,
                    steps_used: budget.consumed,
                };
                let patched = match p.apply_patch(&patch) {
                    Ok(patched) => patched,
                    Err(_) => continue,
                };
                if suite.iter().all(|t| t.passes_on(&patched, cfg.policy.fuel)) {
                    return RepairOutcome {
                        patch: Some(patch),
                        steps_used: budget.consumed,
                        reason: None,
                    };
                }
            }
            SynthResult::Unsat => continue,
            SynthResult::BudgetExhausted => {
                return RepairOutcome {
                    patch: None,
                    steps_used: budget.consumed,
                    reason: Some(NoPatchReason::BudgetExhausted),
                }
            }
        }
    }
    RepairOutcome {
        patch: None,
        steps_used: budget.consumed,
        reason: Some(NoPatchReason::SearchExhausted),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{bool_to_string, parse, EvalResult};
    use crate::synth::SynthOp;
    use crate::testgen::TestCase;

    const TOY: &str = "fun f(x) { if (x > 0 && x < 5) { x = x + 1; } else { x = x - 1; } return x; }";

    fn t(x: i64, expected: i64) -> TestCase {
        TestCase::manual(vec![x], EvalResult::Value(expected))
    }

    fn paper_policy() -> SynthPolicy {
        SynthPolicy {
            operators: vec![SynthOp::Lt, SynthOp::Gt, SynthOp::And],
            ..SynthPolicy::default()
        }
    }

    #[test]
    fn case_one_suite_synthesizes_the_correct_condition() {
        let p = parse(TOY).unwrap();
        let suite = vec![t(0, -1), t(1, 2), t(7, 8), t(8, 7)];
        let cfg = RepairConfig {
            policy: paper_policy(),
            ..RepairConfig::default()
        };
        let out = repair(&p, &suite, &cfg);
        let patch = out.patch.expect("patch found");
        assert_eq!(bool_to_string(&patch.expression), "x > 0 && x < 8");
        let patched = p.apply_patch(&patch).unwrap();
        for test in &suite {
            assert!(test.passes_on(&patched, 100_000));
        }
        assert_eq!(patch.steps_used, out.steps_used);
    }

    #[test]
    fn case_three_suite_synthesizes_the_loose_interval() {
        let p = parse(TOY).unwrap();
        let suite = vec![t(0, -1), t(1, 2), t(7, 8), t(10, 9)];
        let cfg = RepairConfig {
            policy: paper_policy(),
            ..RepairConfig::default()
        };
        let out = repair(&p, &suite, &cfg);
        let patch = out.patch.expect("patch found");
        assert_eq!(bool_to_string(&patch.expression), "x > 0 && x < 10");
    }

    #[test]
    fn starvation_budget_reports_exhaustion() {
        let p = parse(TOY).unwrap();
        let suite = vec![t(0, -1), t(1, 2), t(7, 8), t(8, 7)];
        let cfg = RepairConfig {
            max_candidates: 1,
            policy: paper_policy(),
            ..RepairConfig::default()
        };
        let out = repair(&p, &suite, &cfg);
        assert_eq!(out.patch, None);
        assert_eq!(out.reason, Some(NoPatchReason::BudgetExhausted));
    }

    #[test]
    fn deterministic_repeat_runs_are_identical() {
        let p = parse(TOY).unwrap();
        let suite = vec![t(0, -1), t(1, 2), t(7, 8), t(10, 9)];
        let cfg = RepairConfig {
            policy: paper_policy(),
            ..RepairConfig::default()
        };
        let a = repair(&p, &suite, &cfg);
        let b = repair(&p, &suite, &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn missing_precondition_is_repaired_by_insertion() {
        // guard deleted from: if (m > 0) { r = 0; }
        let p = parse("fun f(m, v) { r = v; r = 0; return r; }").unwrap();
        let suite = vec![
            TestCase::manual(vec![1, 7], EvalResult::Value(0)),
            TestCase::manual(vec![2, 0], EvalResult::Value(0)),
            TestCase::manual(vec![0, 5], EvalResult::Value(5)),
            TestCase::manual(vec![-3, 2], EvalResult::Value(2)),
        ];
        let cfg = RepairConfig {
            policy: paper_policy(),
            ..RepairConfig::default()
        };
        let out = repair(&p, &suite, &cfg);
        let patch = out.patch.expect("patch found");
        assert_eq!(patch.mode, crate::lang::PatchMode::PreconditionInsert);
        assert_eq!(bool_to_string(&patch.expression), "m > 0");
        let patched = p.apply_patch(&patch).unwrap();
        for test in &suite {
            assert!(test.passes_on(&patched, 100_000));
        }
    }

    #[test]
    fn override_restricts_the_walk_to_one_location() {
        let p = parse(TOY).unwrap();
        let cond = p.if_condition_locations().next().unwrap().id;
        let suite = vec![t(0, -1), t(1, 2), t(7, 8), t(8, 7)];
        let cfg = RepairConfig {
            location_override: Some(cond),
            policy: paper_policy(),
            ..RepairConfig::default()
        };
        let out = repair(&p, &suite, &cfg);
        assert_eq!(out.patch.unwrap().location, cond);
    }
}

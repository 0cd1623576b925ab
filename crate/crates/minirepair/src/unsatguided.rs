//! Incremental test-suite augmentation: generate regression tests against
//! the program under repair, add them one at a time, re-run synthesis under a
//! multiplied budget, and discard any test under which no patch can be found.

use crate::lang::{LocationId, Patch, Program};
use crate::synth::{repair, NoPatchReason, RepairConfig, SynthPolicy};
use crate::testgen::{generate_tests, sanitize, GenConfig, TestCase};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UgConfig {
    /// Budget for the initial repair.
    pub initial_budget: u64,
    /// Re-run budget is `multiplier * t_initial` candidate evaluations.
    pub multiplier: u64,
    pub gen: GenConfig,
    pub policy: SynthPolicy,
    pub location_override: Option<LocationId>,
    /// Extra tests tried before the generated ones; a harness hook for
    /// scripted scenarios.
    pub injected: Vec<TestCase>,
}

impl UgConfig {
    pub fn new(gen: GenConfig) -> Self {
        UgConfig {
            initial_budget: 200_000,
            multiplier: 2,
            gen,
            policy: SynthPolicy::default(),
            location_override: None,
            injected: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionOutcome {
    Kept,
    DiscardedUnsat,
    DiscardedBudget,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub test: TestCase,
    pub outcome: DecisionOutcome,
    /// The patch adopted after this test, when kept.
    pub adopted: Option<Patch>,
}

/// Full record of one augmentation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UgTrace {
    pub initial_patch: Option<Patch>,
    /// Candidate evaluations the initial repair consumed.
    pub t_initial: u64,
    pub decisions: Vec<Decision>,
    pub final_patch: Option<Patch>,
    /// Manual suite plus every kept test, in adoption order.
    pub ts_aug: Vec<TestCase>,
}

/// Run the augmentation loop over `p` with manually written suite `ts`.
///
/// An initial repair runs under the full budget; on success, tests are
/// generated for every location touched by the initial patch (targets
/// ordered by descending enclosing-region node count, ties by ascending id),
/// sanitized, and tried one at a time in generation order. Each trial re-runs
/// the whole repair with budget `multiplier * t_initial`; a returned patch
/// (even one identical to the current) keeps the test and adopts the patch,
/// otherwise the test is removed again.
pub fn run_unsatguided(p: &Program, ts: &[TestCase], cfg: &UgConfig) -> UgTrace {
    let repair_cfg = RepairConfig {
        max_candidates: cfg.initial_budget,
        location_override: cfg.location_override,
        policy: cfg.policy.clone(),
    };
    let initial = repair(p, ts, &repair_cfg);
    let Some(initial_patch) = initial.patch else {
        return UgTrace {
            initial_patch: None,
            t_initial: initial.steps_used,
            decisions: Vec::new(),
            final_patch: None,
            ts_aug: ts.to_vec(),
        };
    };
    let t_initial = initial.steps_used.max(1);

    let mut targets: Vec<LocationId> = vec![initial_patch.location];
    // descending enclosing-region size, ties by ascending id
    targets.sort_by(|a, b| {
        let ra = p.location(*a).map(|l| l.region_nodes).unwrap_or(0);
        let rb = p.location(*b).map(|l| l.region_nodes).unwrap_or(0);
        rb.cmp(&ra).then(a.cmp(b))
    });

    let mut agts: Vec<TestCase> = cfg.injected.clone();
    agts.extend(generate_tests(p, &targets, &cfg.gen));
    let agts = sanitize(p, &agts, cfg.gen.fuel);

    let mut ts_aug: Vec<TestCase> = ts.to_vec();
    let mut adopted = initial_patch.clone();
    let mut decisions = Vec::with_capacity(agts.len());
    let rerun_budget = cfg.multiplier.saturating_mul(t_initial).max(1);
    for test in agts {
        ts_aug.push(test.clone());
        let rerun_cfg = RepairConfig {
            max_candidates: rerun_budget,
            location_override: cfg.location_override,
            policy: cfg.policy.clone(),
        };
        let outcome = repair(p, &ts_aug, &rerun_cfg);
        match outcome.patch {
            Some(patch) => {
                adopted = patch.clone();
                decisions.push(Decision {
                    test,
                    outcome: DecisionOutcome::Kept,
                    adopted: Some(patch),
                });
            }
            None => {
                ts_aug.pop();
                let reason = match outcome.reason {
                    Some(NoPatchReason::BudgetExhausted) => DecisionOutcome::DiscardedBudget,
                    _ => DecisionOutcome::DiscardedUnsat,
                };
                decisions.push(Decision {
                    test,
                    outcome: reason,
                    adopted: None,
                });
            }
        }
    }
    UgTrace {
        initial_patch: Some(initial_patch),
        t_initial,
        decisions,
        final_patch: Some(adopted),
        ts_aug,
    }
}

impl UgTrace {
    /// Tests tried by this run, in trial order (injected plus drawn).
    pub fn agts(&self) -> Vec<&TestCase> {
        self.decisions.iter().map(|d| &d.test).collect()
    }

    pub fn kept(&self) -> usize {
        self.decisions
            .iter()
            .filter(|d| d.outcome == DecisionOutcome::Kept)
            .count()
    }

    pub fn discarded(&self) -> usize {
        self.decisions.len() - self.kept()
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

    fn toy_cfg(seed: u64) -> UgConfig {
        let gen = GenConfig {
            seed,
            count: 20,
            ranges: vec![(-20, 20)],
            fuel: 100_000,
        };
        let mut cfg = UgConfig::new(gen);
        cfg.multiplier = 400;
        cfg.policy = SynthPolicy {
            operators: vec![SynthOp::Lt, SynthOp::Gt, SynthOp::And],
            ..SynthPolicy::default()
        };
        cfg
    }

    #[test]
    fn case_one_discards_the_injected_bug_exposing_test() {
        let p = parse(TOY).unwrap();
        let suite = vec![t(0, -1), t(1, 2), t(7, 8), t(8, 7)];
        let mut cfg = toy_cfg(1);
        cfg.injected = vec![t(5, 4)];
        let trace = run_unsatguided(&p, &suite, &cfg);
        let initial = trace.initial_patch.clone().unwrap();
        assert_eq!(bool_to_string(&initial.expression), "x > 0 && x < 8");
        assert_eq!(trace.decisions[0].test.input.0, vec![5]);
        assert_eq!(trace.decisions[0].outcome, DecisionOutcome::DiscardedUnsat);
        let fin = trace.final_patch.unwrap();
        assert_eq!(fin.expression, initial.expression);
    }

    #[test]
    fn case_three_keeps_the_pinning_normal_test() {
        let p = parse(TOY).unwrap();
        let suite = vec![t(0, -1), t(1, 2), t(7, 8), t(10, 9)];
        let mut cfg = toy_cfg(1);
        cfg.injected = vec![t(8, 7)]; // normal: buggy and correct agree at 8
        let trace = run_unsatguided(&p, &suite, &cfg);
        assert_eq!(
            bool_to_string(&trace.initial_patch.clone().unwrap().expression),
            "x > 0 && x < 10"
        );
        assert_eq!(trace.decisions[0].outcome, DecisionOutcome::Kept);
        assert_eq!(
            bool_to_string(&trace.decisions[0].adopted.clone().unwrap().expression),
            "x > 0 && x < 8"
        );
        let fin = trace.final_patch.unwrap();
        let patched = p.apply_patch(&fin).unwrap();
        // exhaustively equal to the correct program
        let correct =
            parse("fun f(x) { if (x > 0 && x < 8) { x = x + 1; } else { x = x - 1; } return x; }")
                .unwrap();
        for x in -50..=50 {
            assert_eq!(
                crate::lang::eval(&patched, &crate::lang::InputPoint(vec![x]), 100_000).unwrap(),
                crate::lang::eval(&correct, &crate::lang::InputPoint(vec![x]), 100_000).unwrap()
            );
        }
    }

    #[test]
    fn no_initial_patch_yields_empty_trace() {
        let p = parse(TOY).unwrap();
        let suite = vec![t(0, -1), t(1, 2), t(7, 8), t(8, 7)];
        let mut cfg = toy_cfg(1);
        cfg.initial_budget = 1;
        let trace = run_unsatguided(&p, &suite, &cfg);
        assert_eq!(trace.initial_patch, None);
        assert_eq!(trace.final_patch, None);
        assert!(trace.decisions.is_empty());
        assert_eq!(trace.ts_aug.len(), suite.len());
    }

    #[test]
    fn suite_grows_monotonically_and_discards_never_reappear() {
        let p = parse(TOY).unwrap();
        let suite = vec![t(0, -1), t(1, 2), t(7, 8), t(10, 9)];
        let cfg = toy_cfg(3);
        let trace = run_unsatguided(&p, &suite, &cfg);
        // ts_aug = manual suite + kept tests in order
        assert_eq!(&trace.ts_aug[..suite.len()], &suite[..]);
        let kept: Vec<_> = trace
            .decisions
            .iter()
            .filter(|d| d.outcome == DecisionOutcome::Kept)
            .map(|d| d.test.clone())
            .collect();
        assert_eq!(&trace.ts_aug[suite.len()..], &kept[..]);
        for d in &trace.decisions {
            if d.outcome != DecisionOutcome::Kept {
                assert!(!trace.ts_aug.contains(&d.test));
            }
        }
        // adoption soundness: every adopted patch passes the suite so far
        let mut so_far = suite.clone();
        for d in &trace.decisions {
            if d.outcome == DecisionOutcome::Kept {
                so_far.push(d.test.clone());
                let patched = p.apply_patch(d.adopted.as_ref().unwrap()).unwrap();
                for test in &so_far {
                    assert!(test.passes_on(&patched, 100_000));
                }
            }
        }
    }

    #[test]
    fn reruns_are_deterministic() {
        let p = parse(TOY).unwrap();
        let suite = vec![t(0, -1), t(1, 2), t(7, 8), t(10, 9)];
        let cfg = toy_cfg(7);
        let a = run_unsatguided(&p, &suite, &cfg);
        let b = run_unsatguided(&p, &suite, &cfg);
        assert_eq!(a, b);
    }
}

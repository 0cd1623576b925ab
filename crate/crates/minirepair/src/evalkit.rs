//! Ground-truth evaluation: exhaustive input-domain partitioning against a
//! reference program, the overfitting taxonomy, generated-test
//! classification, oracle repair, and the impact metrics.

use crate::lang::{eval, EvalResult, InputPoint, Patch, Program};
use crate::testgen::TestCase;
use serde::{Deserialize, Serialize};

/// Finite enumerable input domain: one inclusive range per parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub ranges: Vec<(i64, i64)>,
}

pub const MAX_DOMAIN_POINTS: u128 = 1_000_000;

impl DomainSpec {
    pub fn size(&self) -> u128 {
        self.ranges
            .iter()
            .map(|(lo, hi)| (*hi as i128 - *lo as i128 + 1) as u128)
            .product()
    }

    /// Enumerate every point in odometer order (last parameter fastest).
    pub fn points(&self) -> impl Iterator<Item = InputPoint> + '_ {
        assert!(
            self.size() <= MAX_DOMAIN_POINTS,
            "domain too large for exhaustive evaluation"
        );
        let ranges = self.ranges.clone();
        let mut current: Option<Vec<i64>> = Some(ranges.iter().map(|(lo, _)| *lo).collect());
        std::iter::from_fn(move || {
            let point = current.clone()?;
            // advance odometer
            let mut next = point.clone();
            let mut done = true;
            for i in (0..ranges.len()).rev() {
                if next[i] < ranges[i].1 {
                    next[i] += 1;
                    for (j, item) in next.iter_mut().enumerate().skip(i + 1) {
                        *item = ranges[j].0;
                    }
                    done = false;
                    break;
                }
            }
            current = if done { None } else { Some(next) };
            Some(InputPoint(point))
        })
    }
}

/// Exhaustive-domain partition for one buggy/correct pair and optionally one
/// patch. All sets hold inputs in domain enumeration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DomainPartition {
    /// Inputs where the buggy program disagrees with the reference.
    pub i_bug: Vec<InputPoint>,
    /// The rest of the domain.
    pub i_correct: Vec<InputPoint>,
    /// Inputs whose behavior the patch changed.
    pub i_patch: Vec<InputPoint>,
    /// Changed inputs in the buggy domain now agreeing with the reference.
    pub i_patch_fixed: Vec<InputPoint>,
    /// Changed inputs in the correct domain, necessarily broken.
    pub i_patch_broken: Vec<InputPoint>,
    /// Changed inputs in the buggy domain that are still wrong.
    pub i_patch_still_wrong: Vec<InputPoint>,
}

/// Overfitting taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverfitLabel {
    /// Repairs the whole buggy domain and breaks nothing.
    Correct,
    /// Incomplete fixing only: a proper, non-empty part of the buggy domain
    /// is repaired and nothing is broken.
    A,
    /// Regression introduction only: the whole buggy domain is repaired but
    /// correct behavior is broken.
    B,
    /// Both issues at once.
    Ab,
    /// Repairs nothing, or any pattern outside the three classes.
    OtherIncorrect,
}

impl std::fmt::Display for OverfitLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            OverfitLabel::Correct => "correct",
            OverfitLabel::A => "a",
            OverfitLabel::B => "b",
            OverfitLabel::Ab => "ab",
            OverfitLabel::OtherIncorrect => "other_incorrect",
        };
        write!(f, "{s}")
    }
}

fn eval_total(p: &Program, input: &InputPoint, fuel: u64) -> EvalResult {
    eval(p, input, fuel).expect("domain points match program arity")
}

/// Split the domain into buggy and correct input domains by exhaustive
/// comparison of the two programs.
pub fn partition_domain(
    p_buggy: &Program,
    p_correct: &Program,
    domain: &DomainSpec,
    fuel: u64,
) -> DomainPartition {
    assert_eq!(p_buggy.params.len(), p_correct.params.len());
    assert_eq!(domain.ranges.len(), p_buggy.params.len());
    let mut part = DomainPartition::default();
    for point in domain.points() {
        if eval_total(p_buggy, &point, fuel) == eval_total(p_correct, &point, fuel) {
            part.i_correct.push(point);
        } else {
            part.i_bug.push(point);
        }
    }
    part
}

/// Classify a patch against the taxonomy by exhaustive evaluation.
pub fn classify_patch(
    p_buggy: &Program,
    p_correct: &Program,
    patch: &Patch,
    domain: &DomainSpec,
    fuel: u64,
) -> (DomainPartition, OverfitLabel) {
    let patched = p_buggy.apply_patch(patch).expect("patch applies");
    let mut part = DomainPartition::default();
    for point in domain.points() {
        let buggy = eval_total(p_buggy, &point, fuel);
        let correct = eval_total(p_correct, &point, fuel);
        let new = eval_total(&patched, &point, fuel);
        let in_bug = buggy != correct;
        if in_bug {
            part.i_bug.push(point.clone());
        } else {
            part.i_correct.push(point.clone());
        }
        if new != buggy {
            part.i_patch.push(point.clone());
            if in_bug {
                if new == correct {
                    part.i_patch_fixed.push(point);
                } else {
                    part.i_patch_still_wrong.push(point);
                }
            } else {
                part.i_patch_broken.push(point);
            }
        }
    }
    let label = label_partition(&part);
    (part, label)
}

fn label_partition(part: &DomainPartition) -> OverfitLabel {
    let fixed_all = part.i_patch_fixed.len() == part.i_bug.len();
    let broke_none = part.i_patch_broken.is_empty();
    if fixed_all && broke_none {
        return OverfitLabel::Correct;
    }
    if part.i_patch_fixed.is_empty() {
        return OverfitLabel::OtherIncorrect;
    }
    match (fixed_all, broke_none) {
        (false, true) => OverfitLabel::A,
        (true, false) => OverfitLabel::B,
        (false, false) => OverfitLabel::Ab,
        (true, true) => unreachable!(),
    }
}

/// Partition tests by pass/fail on the reference program: failures are
/// bug-exposing, the rest are normal. Order is preserved in both halves.
pub fn classify_tests(
    tests: &[TestCase],
    p_correct: &Program,
    fuel: u64,
) -> (Vec<TestCase>, Vec<TestCase>) {
    let mut normal = Vec::new();
    let mut bug_exposing = Vec::new();
    for t in tests {
        if t.passes_on(p_correct, fuel) {
            normal.push(t.clone());
        } else {
            bug_exposing.push(t.clone());
        }
    }
    (normal, bug_exposing)
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("test #{index} already passes on the reference program")]
pub struct NotBugExposing {
    pub index: usize,
}

/// Replace each bug-exposing test's expected value with the reference
/// program's actual behavior. Provenance is preserved; the result always
/// passes on the reference program, and the operation is idempotent.
pub fn repair_oracles(
    ts_bugexpo: &[TestCase],
    p_correct: &Program,
    fuel: u64,
) -> Result<Vec<TestCase>, NotBugExposing> {
    let mut out = Vec::with_capacity(ts_bugexpo.len());
    for (index, t) in ts_bugexpo.iter().enumerate() {
        if t.passes_on(p_correct, fuel) {
            return Err(NotBugExposing { index });
        }
        let expected = eval(p_correct, &t.input, fuel).map_err(|_| NotBugExposing { index })?;
        out.push(TestCase {
            expected,
            ..t.clone()
        });
    }
    Ok(out)
}

/// Failing-test counts for old and new patches plus the improvement deltas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpactReport {
    pub failing_bugexpo_old: u64,
    pub failing_bugexpo_new: u64,
    pub failing_normal_old: u64,
    pub failing_normal_new: u64,
    /// `failing_bugexpo_old - failing_bugexpo_new`; positive is good.
    pub removed_inc: i64,
    /// `failing_normal_old - failing_normal_new`; positive is good.
    pub removed_reg: i64,
}

fn failing_count(p: &Program, tests: &[TestCase], fuel: u64) -> u64 {
    tests.iter().filter(|t| !t.passes_on(p, fuel)).count() as u64
}

/// Compare two patches on the oracle-repaired bug-exposing tests and the
/// normal tests, by execution.
pub fn assess_impact(
    p_buggy: &Program,
    patch_old: &Patch,
    patch_new: &Patch,
    ts_normal: &[TestCase],
    ts_bugexpo_fixed: &[TestCase],
    fuel: u64,
) -> ImpactReport {
    let old = p_buggy.apply_patch(patch_old).expect("old patch applies");
    let new = p_buggy.apply_patch(patch_new).expect("new patch applies");
    let failing_bugexpo_old = failing_count(&old, ts_bugexpo_fixed, fuel);
    let failing_bugexpo_new = failing_count(&new, ts_bugexpo_fixed, fuel);
    let failing_normal_old = failing_count(&old, ts_normal, fuel);
    let failing_normal_new = failing_count(&new, ts_normal, fuel);
    ImpactReport {
        failing_bugexpo_old,
        failing_bugexpo_new,
        failing_normal_old,
        failing_normal_new,
        removed_inc: failing_bugexpo_old as i64 - failing_bugexpo_new as i64,
        removed_reg: failing_normal_old as i64 - failing_normal_new as i64,
    }
}

/// Classification plus impact, serialized in reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverfittingReport {
    pub label: OverfitLabel,
    pub failing_bugexpo: u64,
    pub failing_normal: u64,
    pub removed_inc: i64,
    pub removed_reg: i64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, parse_bool_expr, PatchMode};
    use crate::testgen::TestCase;

    const BUGGY: &str = "fun f(x) { if (x > 0 && x < 5) { x = x + 1; } else { x = x - 1; } return x; }";
    const CORRECT: &str = "fun f(x) { if (x > 0 && x < 8) { x = x + 1; } else { x = x - 1; } return x; }";

    fn toy() -> (Program, Program) {
        (parse(BUGGY).unwrap(), parse(CORRECT).unwrap())
    }

    fn domain() -> DomainSpec {
        DomainSpec {
            ranges: vec![(-50, 50)],
        }
    }

    fn cond_patch(p: &Program, expr: &str) -> Patch {
        Patch {
            location: p.if_condition_locations().next().unwrap().id,
            mode: PatchMode::ConditionReplace,
            expression: parse_bool_expr(expr).unwrap(),
            steps_used: 0,
        }
    }

    fn points(xs: &[i64]) -> Vec<InputPoint> {
        xs.iter().map(|&x| InputPoint(vec![x])).collect()
    }

    #[test]
    fn toy_buggy_domain_is_five_six_seven() {
        let (buggy, correct) = toy();
        let part = partition_domain(&buggy, &correct, &domain(), 100_000);
        assert_eq!(part.i_bug, points(&[5, 6, 7]));
        assert_eq!(part.i_bug.len() + part.i_correct.len(), 101);
    }

    #[test]
    fn identical_programs_have_empty_buggy_domain() {
        let (buggy, _) = toy();
        let part = partition_domain(&buggy, &buggy, &domain(), 100_000);
        assert!(part.i_bug.is_empty());
    }

    #[test]
    fn taxonomy_labels_match_the_worked_patches() {
        let (buggy, correct) = toy();
        let cases = [
            ("x > 0 && x < 7", OverfitLabel::A),
            ("x > 0 && x < 10", OverfitLabel::B),
            ("x > -1 && x < 7", OverfitLabel::Ab),
            ("x > 0 && x < 8", OverfitLabel::Correct),
        ];
        for (expr, want) in cases {
            let patch = cond_patch(&buggy, expr);
            let (part, label) = classify_patch(&buggy, &correct, &patch, &domain(), 100_000);
            assert_eq!(label, want, "patch {expr}");
            check_partition_laws(&part);
        }
    }

    fn check_partition_laws(part: &DomainPartition) {
        use std::collections::BTreeSet;
        let bug: BTreeSet<_> = part.i_bug.iter().collect();
        let correct: BTreeSet<_> = part.i_correct.iter().collect();
        assert!(bug.is_disjoint(&correct));
        assert_eq!(bug.len() + correct.len(), 101);
        let patch: BTreeSet<_> = part.i_patch.iter().collect();
        let fixed: BTreeSet<_> = part.i_patch_fixed.iter().collect();
        let broken: BTreeSet<_> = part.i_patch_broken.iter().collect();
        let still: BTreeSet<_> = part.i_patch_still_wrong.iter().collect();
        assert!(fixed.is_subset(&bug));
        assert!(still.is_subset(&bug));
        assert!(broken.is_subset(&correct));
        assert_eq!(fixed.len() + broken.len() + still.len(), patch.len());
        let mut union = BTreeSet::new();
        union.extend(fixed.iter().copied());
        union.extend(broken.iter().copied());
        union.extend(still.iter().copied());
        assert_eq!(union, patch);
    }

    #[test]
    fn identity_patch_on_a_buggy_program_is_other_incorrect() {
        let (buggy, correct) = toy();
        let patch = cond_patch(&buggy, "x > 0 && x < 5");
        let (part, label) = classify_patch(&buggy, &correct, &patch, &domain(), 100_000);
        assert!(part.i_patch.is_empty());
        assert_eq!(label, OverfitLabel::OtherIncorrect);
    }

    #[test]
    fn identity_patch_on_a_correct_program_is_correct() {
        let (_, correct) = toy();
        let patch = cond_patch(&correct, "x > 0 && x < 8");
        let (_, label) = classify_patch(&correct, &correct, &patch, &domain(), 100_000);
        assert_eq!(label, OverfitLabel::Correct);
    }

    #[test]
    fn test_classification_follows_the_reference_program() {
        let (_, correct) = toy();
        let tests = vec![
            TestCase::manual(vec![5], EvalResult::Value(4)), // buggy oracle
            TestCase::manual(vec![8], EvalResult::Value(7)), // agrees with reference
        ];
        let (normal, bugexpo) = classify_tests(&tests, &correct, 100_000);
        assert_eq!(normal.len(), 1);
        assert_eq!(normal[0].input.0, vec![8]);
        assert_eq!(bugexpo.len(), 1);
        assert_eq!(bugexpo[0].input.0, vec![5]);
        let (n2, b2) = classify_tests(&[], &correct, 100_000);
        assert!(n2.is_empty() && b2.is_empty());
    }

    #[test]
    fn oracle_repair_rewrites_to_reference_behavior() {
        let (_, correct) = toy();
        let bugexpo = vec![
            TestCase::manual(vec![5], EvalResult::Value(4)),
            TestCase::manual(vec![7], EvalResult::Value(6)),
        ];
        let fixed = repair_oracles(&bugexpo, &correct, 100_000).unwrap();
        assert_eq!(fixed[0].expected, EvalResult::Value(6));
        assert_eq!(fixed[1].expected, EvalResult::Value(8));
        for t in &fixed {
            assert!(t.passes_on(&correct, 100_000));
        }
        // idempotence requires re-repair of an already-passing suite to be
        // rejected, and re-classification to call them all normal
        assert!(repair_oracles(&fixed, &correct, 100_000).is_err());
        let (normal, bugexpo_again) = classify_tests(&fixed, &correct, 100_000);
        assert_eq!(normal.len(), 2);
        assert!(bugexpo_again.is_empty());
        assert_eq!(repair_oracles(&[], &correct, 100_000).unwrap(), Vec::new());
    }

    #[test]
    fn impact_deltas_count_failures_and_are_antisymmetric() {
        let (buggy, correct) = toy();
        let old = cond_patch(&buggy, "x > 0 && x < 10");
        let new = cond_patch(&buggy, "x > 0 && x < 8");
        let ts_normal = vec![
            TestCase::manual(vec![8], EvalResult::Value(7)),
            TestCase::manual(vec![9], EvalResult::Value(8)),
        ];
        let bugexpo = vec![TestCase::manual(vec![7], EvalResult::Value(6))];
        let fixed = repair_oracles(&bugexpo, &correct, 100_000).unwrap();
        let report = assess_impact(&buggy, &old, &new, &ts_normal, &fixed, 100_000);
        assert_eq!(report.removed_reg, 2);
        assert_eq!(report.removed_inc, 0); // both patches pass the repaired test
        let swapped = assess_impact(&buggy, &new, &old, &ts_normal, &fixed, 100_000);
        assert_eq!(swapped.removed_reg, -report.removed_reg);
        assert_eq!(swapped.removed_inc, -report.removed_inc);
        let same = assess_impact(&buggy, &old, &old, &ts_normal, &fixed, 100_000);
        assert_eq!((same.removed_inc, same.removed_reg), (0, 0));
    }

    #[test]
    fn incomplete_fix_delta_registers_on_the_repaired_oracle() {
        let (buggy, correct) = toy();
        let old = cond_patch(&buggy, "x > 0 && x < 7");
        let new = cond_patch(&buggy, "x > 0 && x < 8");
        let bugexpo = vec![TestCase::manual(vec![7], EvalResult::Value(6))];
        let fixed = repair_oracles(&bugexpo, &correct, 100_000).unwrap();
        let report = assess_impact(&buggy, &old, &new, &[], &fixed, 100_000);
        assert_eq!(report.removed_inc, 1);
    }

    #[test]
    fn multi_parameter_domains_enumerate_exhaustively() {
        let d = DomainSpec {
            ranges: vec![(-1, 1), (0, 2)],
        };
        let pts: Vec<_> = d.points().collect();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], InputPoint(vec![-1, 0]));
        assert_eq!(pts[8], InputPoint(vec![1, 2]));
        assert_eq!(d.size(), 9);
    }
}

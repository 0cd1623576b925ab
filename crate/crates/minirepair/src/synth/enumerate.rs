//! Canonical enumeration of candidate boolean expressions.
//!
//! Candidates are visited in a total order: ascending node count; within a
//! node count the literals `true`, `false` (size 1 only), then comparisons
//! (variable pairs in declaration order before variable-vs-constant with
//! constants ascending, comparison operators in the listed order inside each
//! group), then boolean combinators in the listed order, with binary splits
//! by ascending left size and left-major pair order. Negations never wrap
//! another negation; that form is not part of the candidate grammar.
//!
//! The first enumerated candidate whose value matches the required boolean at
//! every recorded binding is the answer, so the result is deterministic,
//! byte-for-byte. Candidates that provably cannot satisfy the constraint are
//! skipped without being tested: a conjunction whose left side is false at a
//! required-true binding, and a disjunction whose left side is true at a
//! required-false binding, fail regardless of the right side. Each tested
//! candidate consumes one budget step; skipped ones consume none, which keeps
//! unsatisfiability proofs affordable under the doubled re-run budgets. This
//! replaces the SMT back-end with an exhaustive, equisatisfiable search over
//! the same finite component space.

use super::{Budget, ComponentSet, RepairConstraint, SynthOp};
use crate::lang::{eval_bool_in_env, BoolExpr, Env};

/// Outcome of one synthesis call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthResult {
    /// First candidate satisfying every row.
    Satisfier(BoolExpr),
    /// The whole space up to `max_size` is exhausted with budget remaining.
    Unsat,
    /// The budget ran out before the space was exhausted.
    BudgetExhausted,
}

struct Instance<'a> {
    env: &'a Env,
    required: bool,
}

struct Search<'a> {
    instances: Vec<Instance<'a>>,
    /// Banks of (expression, value vector) per node count, canonical order.
    banks: Vec<Vec<(BoolExpr, Vec<bool>)>>,
}

impl<'a> Search<'a> {
    fn values(&self, e: &BoolExpr) -> Vec<bool> {
        self.instances
            .iter()
            .map(|i| eval_bool_in_env(e, i.env))
            .collect()
    }

    fn matches(&self, values: &[bool]) -> bool {
        self.instances
            .iter()
            .zip(values)
            .all(|(i, v)| i.required == *v)
    }

    /// A conjunction left operand is viable unless it is false somewhere the
    /// candidate must be true.
    fn and_left_viable(&self, values: &[bool]) -> bool {
        self.instances
            .iter()
            .zip(values)
            .all(|(i, v)| *v || !i.required)
    }

    /// A disjunction left operand is viable unless it is true somewhere the
    /// candidate must be false.
    fn or_left_viable(&self, values: &[bool]) -> bool {
        self.instances
            .iter()
            .zip(values)
            .all(|(i, v)| !*v || i.required)
    }
}

enum StepOutcome {
    Found(BoolExpr),
    OutOfBudget,
    Continue,
}

/// Enumerate candidates in canonical order and return the first satisfier.
pub fn synthesize(
    rc: &RepairConstraint,
    comps: &ComponentSet,
    budget: &mut Budget,
) -> SynthResult {
    let mut instances = Vec::new();
    for row in &rc.rows {
        row.check_invariant();
        for (env, required) in row.bindings.iter().zip(&row.required) {
            instances.push(Instance {
                env,
                required: *required,
            });
        }
    }
    let mut search = Search {
        instances,
        banks: vec![Vec::new(); comps.max_size + 1],
    };

    // size 1: boolean literals
    for lit in [true, false] {
        if !budget.step() {
            return SynthResult::BudgetExhausted;
        }
        let e = BoolExpr::Lit(lit);
        let values = search.values(&e);
        if search.matches(&values) {
            return SynthResult::Satisfier(e);
        }
    }
    if comps.max_size < 3 {
        return SynthResult::Unsat;
    }

    // size 3: comparisons
    for e in comps.comparisons() {
        match consider(&mut search, budget, 3, e, true) {
            StepOutcome::Found(e) => return SynthResult::Satisfier(e),
            StepOutcome::OutOfBudget => return SynthResult::BudgetExhausted,
            StepOutcome::Continue => {}
        }
    }

    for size in 4..=comps.max_size {
        for &op in &comps.operators {
            match op {
                SynthOp::And | SynthOp::Or => {
                    let max_left = size.saturating_sub(4);
                    for left_size in 3..=max_left {
                        let right_size = size - 1 - left_size;
                        if right_size < 3 {
                            continue;
                        }
                        for li in 0..search.banks[left_size].len() {
                            let viable = {
                                let (_, lv) = &search.banks[left_size][li];
                                match op {
                                    SynthOp::And => search.and_left_viable(lv),
                                    _ => search.or_left_viable(lv),
                                }
                            };
                            for ri in 0..search.banks[right_size].len() {
                                let e = {
                                    let (le, _) = &search.banks[left_size][li];
                                    let (re, _) = &search.banks[right_size][ri];
                                    match op {
                                        SynthOp::And => BoolExpr::And(
                                            Box::new(le.clone()),
                                            Box::new(re.clone()),
                                        ),
                                        _ => BoolExpr::Or(
                                            Box::new(le.clone()),
                                            Box::new(re.clone()),
                                        ),
                                    }
                                };
                                match consider(&mut search, budget, size, e, viable) {
                                    StepOutcome::Found(e) => return SynthResult::Satisfier(e),
                                    StepOutcome::OutOfBudget => {
                                        return SynthResult::BudgetExhausted
                                    }
                                    StepOutcome::Continue => {}
                                }
                            }
                        }
                    }
                }
                SynthOp::Not if size >= 4 => {
                    for ci in 0..search.banks[size - 1].len() {
                        if matches!(search.banks[size - 1][ci].0, BoolExpr::Not(_)) {
                            continue;
                        }
                        let e = BoolExpr::Not(Box::new(search.banks[size - 1][ci].0.clone()));
                        match consider(&mut search, budget, size, e, true) {
                            StepOutcome::Found(e) => return SynthResult::Satisfier(e),
                            StepOutcome::OutOfBudget => return SynthResult::BudgetExhausted,
                            StepOutcome::Continue => {}
                        }
                    }
                }
                _ => {}
            }
        }
    }
    SynthResult::Unsat
}

/// Evaluate one candidate, banking its value vector for reuse as an operand
/// of larger expressions. Only viable candidates are tested against the
/// budget; non-viable ones provably mismatch and are banked untested.
fn consider(
    search: &mut Search<'_>,
    budget: &mut Budget,
    size: usize,
    e: BoolExpr,
    viable: bool,
) -> StepOutcome {
    if viable && !budget.step() {
        return StepOutcome::OutOfBudget;
    }
    let values = search.values(&e);
    let hit = viable && search.matches(&values);
    search.banks[size].push((e.clone(), values));
    if hit {
        StepOutcome::Found(e)
    } else {
        StepOutcome::Continue
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::EvalResult;
    use crate::lang::{bool_to_string, LocationId, PatchMode};
    use crate::synth::{ConstraintRow, SynthPolicy};
    use crate::testgen::TestCase;

    fn instance_constraint(pairs: &[(i64, bool)]) -> RepairConstraint {
        let rows = pairs
            .iter()
            .map(|&(x, required)| {
                let mut env = Env::new();
                env.insert("x".to_string(), x);
                ConstraintRow {
                    test: TestCase::manual(vec![x], EvalResult::Value(0)),
                    required: vec![required],
                    bindings: vec![env],
                }
            })
            .collect();
        RepairConstraint {
            location: LocationId(0),
            mode: PatchMode::ConditionReplace,
            rows,
        }
    }

    fn comps(constants: &[i64], ops: &[SynthOp], max_size: usize) -> ComponentSet {
        ComponentSet {
            variables: vec!["x".to_string()],
            constants: constants.to_vec(),
            operators: ops.to_vec(),
            max_size,
        }
    }

    #[test]
    fn worked_example_synthesizes_the_tight_interval() {
        // c(1)=T, c(7)=T, c(0)=F, c(10)=F over constants -1..=10, size <= 7:
        // the satisfier is the tight interval (0, 8) in both component sets;
        // with `<=` available the canonical surface form uses it at 7.
        let rc = instance_constraint(&[(1, true), (7, true), (0, false), (10, false)]);
        let pool: Vec<i64> = (-1..=10).collect();
        let cs = comps(&pool, &SynthOp::DEFAULT_ORDER, 7);
        let mut budget = Budget::new(1_000_000);
        match synthesize(&rc, &cs, &mut budget) {
            SynthResult::Satisfier(e) => {
                assert_eq!(bool_to_string(&e), "x > 0 && x <= 7");
                for x in -50..=50 {
                    let mut env = Env::new();
                    env.insert("x".to_string(), x);
                    assert_eq!(eval_bool_in_env(&e, &env), x > 0 && x < 8);
                }
            }
            other => panic!("expected satisfier, got {other:?}"),
        }
        // the paper's component selection: x, <, >, && and integer constants
        let cs_paper = comps(&pool, &[SynthOp::Lt, SynthOp::Gt, SynthOp::And], 7);
        let mut budget = Budget::new(1_000_000);
        match synthesize(&rc, &cs_paper, &mut budget) {
            SynthResult::Satisfier(e) => {
                assert_eq!(bool_to_string(&e), "x > 0 && x < 8");
            }
            other => panic!("expected satisfier, got {other:?}"),
        }
    }

    #[test]
    fn empty_constraint_yields_literal_true() {
        let rc = RepairConstraint {
            location: LocationId(0),
            mode: PatchMode::ConditionReplace,
            rows: vec![],
        };
        let cs = comps(&[0], &SynthOp::DEFAULT_ORDER, 7);
        let mut budget = Budget::new(10);
        assert_eq!(
            synthesize(&rc, &cs, &mut budget),
            SynthResult::Satisfier(BoolExpr::Lit(true))
        );
        assert_eq!(budget.consumed, 1);
    }

    #[test]
    fn contradictory_rows_are_unsat() {
        let rc = instance_constraint(&[(5, true), (5, false)]);
        let cs = comps(&[0, 1, 5], &SynthOp::DEFAULT_ORDER, 9);
        let mut budget = Budget::new(1_000_000);
        assert_eq!(synthesize(&rc, &cs, &mut budget), SynthResult::Unsat);
    }

    #[test]
    fn starved_budget_reports_exhaustion() {
        let rc = instance_constraint(&[(1, true), (7, true), (0, false), (10, false)]);
        let cs = comps(&[0, 1, 5, 7, 10], &SynthOp::DEFAULT_ORDER, 9);
        let mut budget = Budget::new(1);
        assert_eq!(
            synthesize(&rc, &cs, &mut budget),
            SynthResult::BudgetExhausted
        );
        assert_eq!(budget.consumed, 1);
    }

    #[test]
    fn non_convex_requirement_is_unsat_with_interval_components() {
        // T at 1 and 7, F at 5: conjunctions of < and > cannot separate
        let rc = instance_constraint(&[(1, true), (7, true), (5, false), (0, false), (8, false)]);
        let cs = comps(
            &[0, 1, 5, 7, 8],
            &[SynthOp::Lt, SynthOp::Gt, SynthOp::And],
            9,
        );
        let mut budget = Budget::new(1_000_000);
        assert_eq!(synthesize(&rc, &cs, &mut budget), SynthResult::Unsat);
        // ...but equality/disjunction components can
        let cs_full = comps(&[0, 1, 5, 7, 8], &SynthOp::DEFAULT_ORDER, 9);
        let mut budget = Budget::new(1_000_000);
        match synthesize(&rc, &cs_full, &mut budget) {
            SynthResult::Satisfier(e) => {
                assert_eq!(bool_to_string(&e), "x == 1 || x == 7");
            }
            other => panic!("expected satisfier, got {other:?}"),
        }
    }

    #[test]
    fn adding_a_row_never_turns_unsat_into_sat() {
        let base = [(1, true), (7, true), (5, false)];
        let cs = comps(&[0, 1, 5, 7], &[SynthOp::Lt, SynthOp::Gt, SynthOp::And], 9);
        let rc = instance_constraint(&base);
        let mut b = Budget::new(1_000_000);
        assert_eq!(synthesize(&rc, &cs, &mut b), SynthResult::Unsat);
        let mut extended = base.to_vec();
        extended.push((0, false));
        let rc2 = instance_constraint(&extended);
        let mut b2 = Budget::new(1_000_000);
        assert_eq!(synthesize(&rc2, &cs, &mut b2), SynthResult::Unsat);
    }

    #[test]
    fn multi_variable_comparisons_come_first() {
        // rows demand exactly "a < b"
        let pairs = [((1, 5), true), ((4, 2), false), ((3, 3), false), ((0, 9), true)];
        let rows = pairs
            .iter()
            .map(|&((a, b), required)| {
                let mut env = Env::new();
                env.insert("a".to_string(), a);
                env.insert("b".to_string(), b);
                ConstraintRow {
                    test: TestCase::manual(vec![a, b], EvalResult::Value(0)),
                    required: vec![required],
                    bindings: vec![env],
                }
            })
            .collect();
        let rc = RepairConstraint {
            location: LocationId(0),
            mode: PatchMode::ConditionReplace,
            rows,
        };
        let cs = ComponentSet {
            variables: vec!["a".to_string(), "b".to_string()],
            constants: vec![0, 1],
            operators: SynthOp::DEFAULT_ORDER.to_vec(),
            max_size: 9,
        };
        let mut budget = Budget::new(1_000_000);
        match synthesize(&rc, &cs, &mut budget) {
            SynthResult::Satisfier(e) => assert_eq!(bool_to_string(&e), "a < b"),
            other => panic!("expected satisfier, got {other:?}"),
        }
        assert_eq!(budget.consumed, 3); // true, false, a < b
    }

    #[test]
    fn negation_candidates_cover_pruned_conjunctions() {
        // required: F at 3, T elsewhere; with ops {<, &&, !} the first
        // satisfier is a negated conjunction, whose inner conjunction can
        // never satisfy the rows directly
        let rc = instance_constraint(&[(0, true), (3, false), (5, true)]);
        let cs = comps(&[3, 4], &[SynthOp::Lt, SynthOp::And, SynthOp::Not], 9);
        let mut budget = Budget::new(1_000_000);
        match synthesize(&rc, &cs, &mut budget) {
            SynthResult::Satisfier(e) => {
                // semantics: true exactly when x != 3 on the rows
                for (x, want) in [(0, true), (3, false), (5, true)] {
                    let mut env = Env::new();
                    env.insert("x".to_string(), x);
                    assert_eq!(eval_bool_in_env(&e, &env), want, "at x={x}: {}", bool_to_string(&e));
                }
            }
            other => panic!("expected satisfier, got {other:?}"),
        }
    }

    #[test]
    fn policy_default_matches_expected_defaults() {
        let p = SynthPolicy::default();
        assert_eq!(p.max_size, 9);
        assert_eq!(p.angelic_bound, 12);
        assert_eq!(p.operators, SynthOp::DEFAULT_ORDER.to_vec());
    }
}

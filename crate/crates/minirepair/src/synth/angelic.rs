//! Angelic value extraction: for each failing test, find the
//! lexicographically first forced decision sequence (false before true) that
//! makes the test pass; for each passing test, record the observed sequence.

use super::{ConstraintRow, RepairConstraint};
use crate::lang::interp::{run_with_hook, CondHook, RunStatus};
use crate::lang::{Env, LocationId, PatchMode, Program};
use crate::testgen::TestCase;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    /// Some failing test passes under no forced decision sequence.
    #[error("test #{test_index} passes under no forced sequence at the location")]
    Infeasible { test_index: usize },
    /// A test evaluates the location more than `bound` times.
    #[error("test #{test_index} exceeds the per-test evaluation bound")]
    BoundExceeded { test_index: usize },
}

/// Extract the repair constraint for `loc`/`mode` from the suite.
pub fn extract_angelic(
    p: &Program,
    loc: LocationId,
    mode: PatchMode,
    suite: &[TestCase],
    bound: usize,
    fuel: u64,
) -> Result<RepairConstraint, ExtractError> {
    let mut rows = Vec::with_capacity(suite.len());
    for (test_index, test) in suite.iter().enumerate() {
        let row = if test.passes_on(p, fuel) {
            observe(p, loc, mode, test, bound, fuel)
                .ok_or(ExtractError::BoundExceeded { test_index })?
        } else {
            search(p, loc, mode, test, bound, fuel)
                .ok_or(ExtractError::Infeasible { test_index })?
        };
        row.check_invariant();
        rows.push(row);
    }
    Ok(RepairConstraint {
        location: loc,
        mode,
        rows,
    })
}

fn observe(
    p: &Program,
    loc: LocationId,
    mode: PatchMode,
    test: &TestCase,
    bound: usize,
    fuel: u64,
) -> Option<ConstraintRow> {
    let mut log: Vec<(Env, bool)> = Vec::new();
    let status = run_with_hook(p, &test.input, fuel, CondHook::Observe {
        loc,
        mode,
        log: &mut log,
    })
    .ok()?;
    debug_assert!(matches!(status, RunStatus::Done(_)));
    if log.len() > bound {
        return None;
    }
    let (bindings, required) = log.into_iter().unzip();
    Some(ConstraintRow {
        test: test.clone(),
        required,
        bindings,
    })
}

/// Depth-first search over forced sequences, false branch first, which
/// visits complete sequences in lexicographic order. Paths needing more than
/// `bound` decisions are abandoned.
fn search(
    p: &Program,
    loc: LocationId,
    mode: PatchMode,
    test: &TestCase,
    bound: usize,
    fuel: u64,
) -> Option<ConstraintRow> {
    let mut stack: Vec<Vec<bool>> = vec![Vec::new()];
    while let Some(seq) = stack.pop() {
        let mut log: Vec<Env> = Vec::new();
        let status = run_with_hook(p, &test.input, fuel, CondHook::Force {
            loc,
            mode,
            seq: &seq,
            used: 0,
            log: &mut log,
        })
        .ok()?;
        match status {
            RunStatus::Done(outcome) => {
                if outcome == test.expected {
                    return Some(ConstraintRow {
                        test: test.clone(),
                        required: seq,
                        bindings: log,
                    });
                }
            }
            RunStatus::NeedsDecision => {
                if seq.len() < bound {
                    let mut with_true = seq.clone();
                    with_true.push(true);
                    let mut with_false = seq;
                    with_false.push(false);
                    stack.push(with_true);
                    stack.push(with_false); // popped first: false before true
                }
            }
        }
    }
    None
}

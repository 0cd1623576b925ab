//! Synthesis-based condition repair: angelic value extraction at a candidate
//! location, canonical component-based enumeration of boolean expressions,
//! and the per-location repair walk.

mod angelic;
mod components;
mod enumerate;
mod repair;

pub use angelic::{extract_angelic, ExtractError};
pub use components::{ComponentSet, SynthOp, SynthPolicy};
pub use enumerate::{synthesize, SynthResult};
pub use repair::{repair, NoPatchReason, RepairConfig, RepairOutcome};

use crate::lang::{Env, LocationId, PatchMode};
use crate::testgen::TestCase;

/// Per-test angelic requirements at one repair location: for every test, the
/// boolean value the location must produce at each of its evaluations, with
/// the variable environment captured at that evaluation.
#[derive(Debug, Clone)]
pub struct RepairConstraint {
    pub location: LocationId,
    pub mode: PatchMode,
    pub rows: Vec<ConstraintRow>,
}

#[derive(Debug, Clone)]
pub struct ConstraintRow {
    pub test: TestCase,
    pub required: Vec<bool>,
    pub bindings: Vec<Env>,
}

impl ConstraintRow {
    pub fn check_invariant(&self) {
        assert_eq!(
            self.required.len(),
            self.bindings.len(),
            "required sequence and bindings must have equal length"
        );
    }
}

/// Deterministic candidate-evaluation budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_candidates: u64,
    pub consumed: u64,
}

impl Budget {
    pub fn new(max_candidates: u64) -> Self {
        assert!(max_candidates >= 1, "budget must be positive");
        Budget {
            max_candidates,
            consumed: 0,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.max_candidates - self.consumed
    }

    /// Take one step; false means the budget is exhausted.
    pub(crate) fn step(&mut self) -> bool {
        if self.consumed >= self.max_candidates {
            return false;
        }
        self.consumed += 1;
        true
    }
}

//! Spectrum-based fault localization over repair locations.
//!
//! Ochiai suspiciousness `ef / sqrt((ef+nf) * (ef+ep))`, ties broken by
//! ascending location id, zero-score locations excluded. Ranking comparisons
//! are done on exact integers (cross-multiplied squares) so test order and
//! floating-point rounding can never perturb the result.

use crate::lang::{interp, EvalResult, LocationId, Program};
use crate::testgen::TestCase;
use std::collections::{BTreeMap, BTreeSet};

/// Per-location executed/not-executed vs failing/passing counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub ef: u32,
    pub ep: u32,
    pub nf: u32,
    pub np: u32,
}

#[derive(Debug, Clone, Default)]
pub struct Spectrum {
    pub per_location: BTreeMap<LocationId, Counts>,
    pub total_failing: u32,
    pub total_passing: u32,
}

impl Spectrum {
    pub fn ochiai(&self, loc: LocationId) -> f64 {
        let Some(c) = self.per_location.get(&loc) else {
            return 0.0;
        };
        let denom = (f64::from(c.ef + c.nf) * f64::from(c.ef + c.ep)).sqrt();
        if denom == 0.0 {
            0.0
        } else {
            f64::from(c.ef) / denom
        }
    }
}

/// Execute every test once, recording per-location coverage and pass/fail.
/// Fuel exhaustion and division by zero count as ordinary outcomes compared
/// against the expected value, so a mismatch is simply a failing test.
pub fn collect_spectrum(p: &Program, suite: &[TestCase], fuel: u64) -> Spectrum {
    let mut spectrum = Spectrum::default();
    for loc in p.locations() {
        spectrum.per_location.insert(loc.id, Counts::default());
    }
    for test in suite {
        let mut covered = BTreeSet::new();
        let status = interp::run_with_hook(
            p,
            &test.input,
            fuel,
            interp::CondHook::Coverage(&mut covered),
        );
        let outcome = match status {
            Ok(interp::RunStatus::Done(r)) => r,
            Ok(interp::RunStatus::NeedsDecision) => unreachable!(),
            // arity mismatch: treat as a failing test covering nothing
            Err(_) => EvalResult::FuelExhausted,
        };
        let passed = outcome == test.expected;
        if passed {
            spectrum.total_passing += 1;
        } else {
            spectrum.total_failing += 1;
        }
        for (loc, counts) in spectrum.per_location.iter_mut() {
            let executed = covered.contains(loc);
            match (executed, passed) {
                (true, false) => counts.ef += 1,
                (true, true) => counts.ep += 1,
                (false, false) => counts.nf += 1,
                (false, true) => counts.np += 1,
            }
        }
    }
    spectrum
}

/// Locations by descending Ochiai score; zero scores dropped; ties by
/// ascending id.
pub fn rank_locations(s: &Spectrum) -> Vec<LocationId> {
    let mut scored: Vec<(LocationId, Counts)> = s
        .per_location
        .iter()
        .filter(|(_, c)| c.ef > 0)
        .map(|(id, c)| (*id, *c))
        .collect();
    // score_a > score_b  <=>  ef_a^2 * denom_b > ef_b^2 * denom_a
    scored.sort_by(|(ida, a), (idb, b)| {
        let lhs = u128::from(a.ef) * u128::from(a.ef)
            * u128::from(b.ef + b.nf)
            * u128::from(b.ef + b.ep);
        let rhs = u128::from(b.ef) * u128::from(b.ef)
            * u128::from(a.ef + a.nf)
            * u128::from(a.ef + a.ep);
        rhs.cmp(&lhs).then(ida.cmp(idb))
    });
    scored.into_iter().map(|(id, _)| id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, InputPoint};
    use crate::testgen::{Provenance, TestCase};

    fn manual(args: Vec<i64>, expected: i64) -> TestCase {
        TestCase {
            input: InputPoint(args),
            expected: EvalResult::Value(expected),
            provenance: Provenance::Manual,
            target: None,
        }
    }

    const TOY: &str = "fun f(x) { if (x > 0 && x < 5) { x = x + 1; } else { x = x - 1; } return x; }";

    #[test]
    fn toy_condition_has_full_failing_coverage() {
        let p = parse(TOY).unwrap();
        let suite = vec![
            manual(vec![0], -1),
            manual(vec![1], 2),
            manual(vec![10], 9),
            manual(vec![8], 7),
            manual(vec![7], 8), // fails on buggy toy
        ];
        let s = collect_spectrum(&p, &suite, 100_000);
        let cond = p.if_condition_locations().next().unwrap().id;
        assert_eq!(s.per_location[&cond].ef, 1);
        assert_eq!(s.total_failing, 1);
        let ranking = rank_locations(&s);
        assert!(ranking.contains(&cond));
    }

    #[test]
    fn all_passing_suite_gives_empty_ranking() {
        let p = parse(TOY).unwrap();
        let suite = vec![manual(vec![0], -1), manual(vec![1], 2)];
        let s = collect_spectrum(&p, &suite, 100_000);
        assert_eq!(s.total_failing, 0);
        assert!(rank_locations(&s).is_empty());
    }

    #[test]
    fn single_failing_test_covers_uniformly() {
        let p = parse("fun f(x) { y = x + 1; return y; }").unwrap();
        let suite = vec![manual(vec![1], 99)];
        let s = collect_spectrum(&p, &suite, 100_000);
        for c in s.per_location.values() {
            assert_eq!(c.ef, 1);
        }
        assert_eq!(rank_locations(&s).len(), p.locations().len());
    }

    #[test]
    fn exclusive_failing_coverage_outranks_shared() {
        // ef=1, ep=0 scores 1.0; ef=1, ep=4 scores 1/sqrt(5)
        let mut s = Spectrum::default();
        s.per_location.insert(
            LocationId(0),
            Counts {
                ef: 1,
                ep: 4,
                nf: 0,
                np: 0,
            },
        );
        s.per_location.insert(
            LocationId(1),
            Counts {
                ef: 1,
                ep: 0,
                nf: 0,
                np: 4,
            },
        );
        assert_eq!(rank_locations(&s), vec![LocationId(1), LocationId(0)]);
        assert!((s.ochiai(LocationId(1)) - 1.0).abs() < 1e-12);
        assert!((s.ochiai(LocationId(0)) - 1.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn scores_stay_in_unit_interval_and_passing_coverage_never_raises() {
        let base = Counts {
            ef: 2,
            ep: 1,
            nf: 1,
            np: 3,
        };
        let mut s = Spectrum::default();
        s.per_location.insert(LocationId(0), base);
        let before = s.ochiai(LocationId(0));
        assert!((0.0..=1.0).contains(&before));
        s.per_location.get_mut(&LocationId(0)).unwrap().ep += 1;
        let after = s.ochiai(LocationId(0));
        assert!(after <= before);
    }
}

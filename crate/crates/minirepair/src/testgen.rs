//! Regression test generation with the program under repair as its own
//! oracle, plus the sanitization pipeline and the JSONL suite format.
//!
//! Inputs are drawn from a splitmix64 stream seeded per run: for every draw
//! and every parameter one word picks the mode (even = uniform over the
//! range, odd = boundary-adjacent), uniform mode consumes one more word,
//! boundary mode consumes one word to pick `(literal, offset)` with offsets
//! `-1, 0, +1` around the program's integer literals, clamped to the range.
//! The draw order is the output order; duplicate input vectors are dropped,
//! keeping the first.

use crate::lang::{eval, EvalResult, InputPoint, LocationId, Program};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Test provenance, serialized as `manual` or `gen:<seed>:<ordinal>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Manual,
    Generated { seed: u64, ordinal: u32 },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Manual => write!(f, "manual"),
            Provenance::Generated { seed, ordinal } => write!(f, "gen:{seed}:{ordinal}"),
        }
    }
}

/// One input vector plus an expected outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub input: InputPoint,
    pub expected: EvalResult,
    pub provenance: Provenance,
    /// Location the generator was targeting, when generated.
    pub target: Option<LocationId>,
}

impl TestCase {
    pub fn manual(args: Vec<i64>, expected: EvalResult) -> Self {
        TestCase {
            input: InputPoint(args),
            expected,
            provenance: Provenance::Manual,
            target: None,
        }
    }

    pub fn passes_on(&self, p: &Program, fuel: u64) -> bool {
        match eval(p, &self.input, fuel) {
            Ok(outcome) => outcome == self.expected,
            Err(_) => false,
        }
    }
}

/// Generation settings; `ranges` holds one inclusive `[lo, hi]` per
/// parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub count: u32,
    pub ranges: Vec<(i64, i64)>,
    pub fuel: u64,
}

/// splitmix64: state advances by 0x9E3779B97F4A7C15; output mixes with
/// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB. Fixed here so runs are
/// reproducible across implementations.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[lo, hi]`, both inclusive. Modulo reduction; the tiny bias
    /// is irrelevant here, determinism is what matters.
    pub fn in_range(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi as i128) - (lo as i128) + 1;
        let v = (self.next_u64() as i128) % span;
        (lo as i128 + v) as i64
    }
}

fn clamp(v: i64, lo: i64, hi: i64) -> i64 {
    v.max(lo).min(hi)
}

/// Draw `cfg.count` inputs per target, oracle = the program's own behavior.
pub fn generate_tests(p: &Program, targets: &[LocationId], cfg: &GenConfig) -> Vec<TestCase> {
    assert!(!targets.is_empty(), "targets must be non-empty");
    assert_eq!(
        cfg.ranges.len(),
        p.params.len(),
        "one sampling range per parameter"
    );
    let literals = p.literal_pool();
    let mut rng = SplitMix64::new(cfg.seed);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut ordinal: u32 = 0;
    for &target in targets {
        for _ in 0..cfg.count {
            let mut args = Vec::with_capacity(p.params.len());
            for &(lo, hi) in &cfg.ranges {
                let boundary = rng.next_u64() % 2 == 1;
                let v = if boundary && !literals.is_empty() {
                    let pick = rng.next_u64() as usize % (literals.len() * 3);
                    let lit = literals[pick / 3];
                    let offset = (pick % 3) as i64 - 1;
                    clamp(lit.wrapping_add(offset), lo, hi)
                } else {
                    rng.in_range(lo, hi)
                };
                args.push(v);
            }
            let input = InputPoint(args);
            let this_ordinal = ordinal;
            ordinal += 1;
            if !seen.insert(input.clone()) {
                continue;
            }
            let expected = eval(p, &input, cfg.fuel).expect("arity checked above");
            out.push(TestCase {
                input,
                expected,
                provenance: Provenance::Generated {
                    seed: cfg.seed,
                    ordinal: this_ordinal,
                },
                target: Some(target),
            });
        }
    }
    out
}

/// Sanitization: drop tests that fail re-execution, then re-run each
/// survivor five consecutive times and drop any that ever mismatch. The
/// second stage is vacuous under a deterministic interpreter but stays in as
/// a checked pipeline stage. Order is preserved.
pub fn sanitize(p: &Program, tests: &[TestCase], fuel: u64) -> Vec<TestCase> {
    tests
        .iter()
        .filter(|t| t.passes_on(p, fuel))
        .filter(|t| (0..5).all(|_| t.passes_on(p, fuel)))
        .cloned()
        .collect()
}

// ---------------------------------------------------------------------------
// JSONL wire format: one object per line,
//   {"args":[...], "expected":{"value":n} | {"error":"fuel"|"divzero"},
//    "provenance":"manual" | "gen:<seed>:<ordinal>"}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireTest {
    args: Vec<i64>,
    expected: WireExpected,
    provenance: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
enum WireExpected {
    #[serde(rename = "value")]
    Value(i64),
    #[serde(rename = "error")]
    Error(String),
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteFormatError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: unknown error kind {kind:?} (expected \"fuel\" or \"divzero\")")]
    UnknownErrorKind { line: usize, kind: String },
    #[error("line {line}: bad provenance {text:?}")]
    BadProvenance { line: usize, text: String },
}

fn expected_to_wire(e: EvalResult) -> WireExpected {
    match e {
        EvalResult::Value(v) => WireExpected::Value(v),
        EvalResult::FuelExhausted => WireExpected::Error("fuel".to_string()),
        EvalResult::DivisionByZero => WireExpected::Error("divzero".to_string()),
    }
}

fn parse_provenance(text: &str, line: usize) -> Result<Provenance, SuiteFormatError> {
    if text == "manual" {
        return Ok(Provenance::Manual);
    }
    if let Some(rest) = text.strip_prefix("gen:") {
        let mut parts = rest.splitn(2, ':');
        let seed = parts.next().and_then(|s| s.parse::<u64>().ok());
        let ordinal = parts.next().and_then(|s| s.parse::<u32>().ok());
        if let (Some(seed), Some(ordinal)) = (seed, ordinal) {
            return Ok(Provenance::Generated { seed, ordinal });
        }
    }
    Err(SuiteFormatError::BadProvenance {
        line,
        text: text.to_string(),
    })
}

/// Serialize a suite in the JSONL wire format.
pub fn suite_to_jsonl(tests: &[TestCase]) -> String {
    let mut out = String::new();
    for t in tests {
        let wire = WireTest {
            args: t.input.0.clone(),
            expected: expected_to_wire(t.expected),
            provenance: t.provenance.to_string(),
        };
        out.push_str(&serde_json::to_string(&wire).expect("wire test serializes"));
        out.push('\n');
    }
    out
}

/// Parse a JSONL suite. Blank lines are ignored.
pub fn suite_from_jsonl(text: &str) -> Result<Vec<TestCase>, SuiteFormatError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let wire: WireTest =
            serde_json::from_str(raw).map_err(|source| SuiteFormatError::Json { line, source })?;
        let expected = match wire.expected {
            WireExpected::Value(v) => EvalResult::Value(v),
            WireExpected::Error(kind) => match kind.as_str() {
                "fuel" => EvalResult::FuelExhausted,
                "divzero" => EvalResult::DivisionByZero,
                _ => return Err(SuiteFormatError::UnknownErrorKind { line, kind }),
            },
        };
        out.push(TestCase {
            input: InputPoint(wire.args),
            expected,
            provenance: parse_provenance(&wire.provenance, line)?,
            target: None,
        });
    }
    Ok(out)
}

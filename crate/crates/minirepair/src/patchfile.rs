//! On-disk artifacts: the patch JSON file, the pretty-printed source diff,
//! and the augmentation-trace JSON document.

use crate::lang::{
    bool_to_string, parse_bool_expr, pretty_print, LocationId, Patch, PatchMode, Program,
};
use crate::testgen::{suite_from_jsonl, suite_to_jsonl, TestCase};
use crate::unsatguided::{DecisionOutcome, UgTrace};
use serde::{Deserialize, Serialize};

/// `patch.json`: the location, mode, expression in source syntax, and the
/// candidate-evaluation count of the run that produced it.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PatchFile {
    pub location: u32,
    pub mode: PatchMode,
    pub expression: String,
    pub steps_used: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum PatchFileError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("bad patch expression: {0}")]
    Expression(#[from] crate::lang::ParseError),
}

impl PatchFile {
    pub fn from_patch(p: &Patch) -> Self {
        PatchFile {
            location: p.location.0,
            mode: p.mode,
            expression: bool_to_string(&p.expression),
            steps_used: p.steps_used,
        }
    }

    pub fn to_patch(&self) -> Result<Patch, PatchFileError> {
        Ok(Patch {
            location: LocationId(self.location),
            mode: self.mode,
            expression: parse_bool_expr(&self.expression)?,
            steps_used: self.steps_used,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("patch file serializes")
    }

    pub fn from_json(text: &str) -> Result<PatchFile, PatchFileError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Line diff of the pretty-printed original vs patched program: one hunk
/// covering the changed span, with the common prefix and suffix elided.
pub fn source_diff(original: &Program, patched: &Program) -> String {
    let old = pretty_print(original);
    let new = pretty_print(patched);
    let old_lines: Vec<&str> = old.lines().collect();
    let new_lines: Vec<&str> = new.lines().collect();
    let mut prefix = 0;
    while prefix < old_lines.len()
        && prefix < new_lines.len()
        && old_lines[prefix] == new_lines[prefix]
    {
        prefix += 1;
    }
    let mut suffix = 0;
    while suffix < old_lines.len() - prefix
        && suffix < new_lines.len() - prefix
        && old_lines[old_lines.len() - 1 - suffix] == new_lines[new_lines.len() - 1 - suffix]
    {
        suffix += 1;
    }
    let mut out = String::new();
    out.push_str("--- original\n+++ patched\n");
    out.push_str(&format!(
        "@@ -{},{} +{},{} @@\n",
        prefix + 1,
        old_lines.len() - prefix - suffix,
        prefix + 1,
        new_lines.len() - prefix - suffix,
    ));
    for line in &old_lines[prefix..old_lines.len() - suffix] {
        out.push_str(&format!("-{line}\n"));
    }
    for line in &new_lines[prefix..new_lines.len() - suffix] {
        out.push_str(&format!("+{line}\n"));
    }
    out
}

#[derive(Debug, Serialize)]
struct TraceDecisionWire {
    test: serde_json::Value,
    outcome: DecisionOutcome,
    adopted: Option<PatchFile>,
}

#[derive(Debug, Serialize)]
struct TraceWire {
    initial_patch: Option<PatchFile>,
    t_initial: u64,
    decisions: Vec<TraceDecisionWire>,
    final_patch: Option<PatchFile>,
    ts_aug: Vec<serde_json::Value>,
}

fn test_value(t: &TestCase) -> serde_json::Value {
    let line = suite_to_jsonl(std::slice::from_ref(t));
    serde_json::from_str(line.trim_end()).expect("wire test parses back")
}

/// Serialize a trace as the documented JSON schema:
///
/// ```json
/// {
///   "initial_patch": {"location":2,"mode":"condition_replace","expression":"...","steps_used":21},
///   "t_initial": 21,
///   "decisions": [{"test": {...}, "outcome": "kept", "adopted": {...}}],
///   "final_patch": {...},
///   "ts_aug": [{...test lines...}]
/// }
/// ```
///
/// Tests use the same object shape as one `tests.jsonl` line.
pub fn trace_to_json(trace: &UgTrace) -> String {
    let wire = TraceWire {
        initial_patch: trace.initial_patch.as_ref().map(PatchFile::from_patch),
        t_initial: trace.t_initial,
        decisions: trace
            .decisions
            .iter()
            .map(|d| TraceDecisionWire {
                test: test_value(&d.test),
                outcome: d.outcome,
                adopted: d.adopted.as_ref().map(PatchFile::from_patch),
            })
            .collect(),
        final_patch: trace.final_patch.as_ref().map(PatchFile::from_patch),
        ts_aug: trace.ts_aug.iter().map(test_value).collect(),
    };
    serde_json::to_string_pretty(&wire).expect("trace serializes")
}

/// Parse a JSONL suite from a file path, used by the command-line surface.
pub fn load_suite(path: &std::path::Path) -> Result<Vec<TestCase>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    suite_from_jsonl(&text).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    #[test]
    fn patch_json_roundtrip() {
        let p = parse("fun f(x) { if (x > 0) { x = x + 1; } return x; }").unwrap();
        let patch = Patch {
            location: p.if_condition_locations().next().unwrap().id,
            mode: PatchMode::ConditionReplace,
            expression: parse_bool_expr("x > 0 && x < 8").unwrap(),
            steps_used: 21,
        };
        let file = PatchFile::from_patch(&patch);
        let text = file.to_json();
        let back = PatchFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_patch().unwrap().expression, patch.expression);
    }

    #[test]
    fn diff_shows_only_the_changed_line() {
        let original = parse("fun f(x) { if (x > 0 && x < 5) { x = x + 1; } else { x = x - 1; } return x; }").unwrap();
        let patch = Patch {
            location: original.if_condition_locations().next().unwrap().id,
            mode: PatchMode::ConditionReplace,
            expression: parse_bool_expr("x > 0 && x < 8").unwrap(),
            steps_used: 0,
        };
        let patched = original.apply_patch(&patch).unwrap();
        let diff = source_diff(&original, &patched);
        assert!(diff.contains("-  if (x > 0 && x < 5) {"));
        assert!(diff.contains("+  if (x > 0 && x < 8) {"));
        assert_eq!(diff.matches('-').count() >= 1, true);
    }

    #[test]
    fn unknown_patch_fields_are_rejected() {
        let text = r#"{"location":1,"mode":"condition_replace","expression":"true","steps_used":0,"zzz":1}"#;
        assert!(PatchFile::from_json(text).is_err());
    }
}

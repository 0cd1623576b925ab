//! The built-in benchmark: a directory of case folders, each holding a
//! seeded buggy program, its reference version, a manually written test
//! suite and metadata. Every invariant is checked at load time and any
//! violation rejects the whole corpus.
//!
//! Case layout:
//!
//! ```text
//! corpus/<case-id>/
//!   buggy.mini      # program under repair
//!   correct.mini    # reference program
//!   tests.jsonl     # manual suite (wire format of the testgen module)
//!   case.toml       # metadata, see `CaseMeta`
//! ```

use crate::evalkit::{classify_patch, DomainSpec, OverfitLabel, MAX_DOMAIN_POINTS};
use crate::lang::{parse, Program};
use crate::synth::{repair, RepairConfig, SynthOp, SynthPolicy};
use crate::testgen::{suite_from_jsonl, GenConfig, TestCase};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// `case.toml` schema.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseMeta {
    pub id: String,
    /// Expected taxonomy label of the canonical initial patch under this
    /// case's configuration; validated at load time when present.
    pub expected_initial_label: Option<String>,
    pub domain: DomainMeta,
    #[serde(default)]
    pub components: ComponentsMeta,
    #[serde(default)]
    pub generation: GenerationMeta,
    #[serde(default)]
    pub unsatguided: UnsatGuidedMeta,
    #[serde(default)]
    pub target: TargetMeta,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetMeta {
    /// Pin the repair to this location id instead of ranking (controlled
    /// corpus targets).
    pub location: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainMeta {
    /// One inclusive `[lo, hi]` per parameter.
    pub ranges: Vec<[i64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentsMeta {
    /// Operator subset in enumeration order; defaults to the full list.
    pub operators: Option<Vec<String>>,
    pub max_size: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationMeta {
    /// Per-parameter sampling ranges; defaults to the domain ranges.
    pub range: Option<Vec<[i64; 2]>>,
    pub count: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnsatGuidedMeta {
    /// Re-run budget multiplier; defaults to 2.
    pub multiplier: Option<u64>,
}

/// One loaded and validated benchmark case.
#[derive(Debug, Clone)]
pub struct BenchCase {
    pub id: String,
    pub p_buggy: Program,
    pub p_correct: Program,
    pub manual_suite: Vec<TestCase>,
    pub domain: DomainSpec,
    pub expected_initial_label: Option<OverfitLabel>,
    pub policy: SynthPolicy,
    /// Default generation settings for this case (seed filled in per run).
    pub gen_count: u32,
    pub gen_ranges: Vec<(i64, i64)>,
    pub multiplier: u64,
    pub location_override: Option<crate::lang::LocationId>,
}

impl BenchCase {
    pub fn gen_config(&self, seed: u64) -> GenConfig {
        GenConfig {
            seed,
            count: self.gen_count,
            ranges: self.gen_ranges.clone(),
            fuel: self.policy.fuel,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("corpus directory {0} contains no cases")]
    Empty(PathBuf),
}

fn invalid(path: &Path, message: impl Into<String>) -> CorpusError {
    CorpusError::Invalid {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn label_from_str(s: &str) -> Option<OverfitLabel> {
    Some(match s {
        "correct" => OverfitLabel::Correct,
        "a" => OverfitLabel::A,
        "b" => OverfitLabel::B,
        "ab" => OverfitLabel::Ab,
        "other_incorrect" => OverfitLabel::OtherIncorrect,
        _ => return None,
    })
}

/// Load one case directory.
pub fn load_case(dir: &Path) -> Result<BenchCase, CorpusError> {
    let meta_path = dir.join("case.toml");
    let meta: CaseMeta = toml::from_str(&read(&meta_path)?)
        .map_err(|e| invalid(&meta_path, e.to_string()))?;
    let dir_name = dir
        .file_name()
        .map(|n| n.to_string_lossy().to_string())
        .unwrap_or_default();
    if meta.id != dir_name {
        return Err(invalid(
            &meta_path,
            format!("id {:?} does not match directory name {:?}", meta.id, dir_name),
        ));
    }

    let buggy_path = dir.join("buggy.mini");
    let p_buggy =
        parse(&read(&buggy_path)?).map_err(|e| invalid(&buggy_path, e.to_string()))?;
    let correct_path = dir.join("correct.mini");
    let p_correct =
        parse(&read(&correct_path)?).map_err(|e| invalid(&correct_path, e.to_string()))?;
    if p_buggy.params.len() != p_correct.params.len() {
        return Err(invalid(dir, "buggy and correct programs disagree on arity"));
    }

    let tests_path = dir.join("tests.jsonl");
    let manual_suite =
        suite_from_jsonl(&read(&tests_path)?).map_err(|e| invalid(&tests_path, e.to_string()))?;

    let domain = DomainSpec {
        ranges: meta.domain.ranges.iter().map(|r| (r[0], r[1])).collect(),
    };
    if domain.ranges.len() != p_buggy.params.len() {
        return Err(invalid(&meta_path, "domain arity mismatch"));
    }
    for (lo, hi) in &domain.ranges {
        if lo > hi {
            return Err(invalid(&meta_path, "empty domain range"));
        }
    }
    if domain.size() > MAX_DOMAIN_POINTS {
        return Err(invalid(&meta_path, "domain exceeds the exhaustive-pass cap"));
    }

    let mut policy = SynthPolicy::default();
    if let Some(ops) = &meta.components.operators {
        let mut parsed = Vec::with_capacity(ops.len());
        for op in ops {
            parsed.push(
                SynthOp::parse(op)
                    .ok_or_else(|| invalid(&meta_path, format!("unknown operator {op:?}")))?,
            );
        }
        policy.operators = parsed;
    }
    if let Some(max_size) = meta.components.max_size {
        if max_size == 0 {
            return Err(invalid(&meta_path, "max_size must be at least 1"));
        }
        policy.max_size = max_size;
    }

    let gen_ranges: Vec<(i64, i64)> = match &meta.generation.range {
        Some(rs) => rs.iter().map(|r| (r[0], r[1])).collect(),
        None => domain.ranges.clone(),
    };
    if gen_ranges.len() != p_buggy.params.len() {
        return Err(invalid(&meta_path, "generation range arity mismatch"));
    }

    let expected_initial_label = match &meta.expected_initial_label {
        Some(s) => Some(
            label_from_str(s)
                .ok_or_else(|| invalid(&meta_path, format!("unknown label {s:?}")))?,
        ),
        None => None,
    };

    let location_override = meta.target.location.map(crate::lang::LocationId);
    if let Some(loc) = location_override {
        if p_buggy.location(loc).is_none() {
            return Err(invalid(&meta_path, format!("target location {} does not exist", loc.0)));
        }
    }
    let case = BenchCase {
        id: meta.id,
        p_buggy,
        p_correct,
        manual_suite,
        domain,
        expected_initial_label,
        policy,
        gen_count: meta.generation.count.unwrap_or(20),
        gen_ranges,
        multiplier: meta.unsatguided.multiplier.unwrap_or(2),
        location_override,
    };
    validate_case(&case, dir)?;
    Ok(case)
}

fn validate_case(case: &BenchCase, dir: &Path) -> Result<(), CorpusError> {
    let fuel = case.policy.fuel;
    let failing = case
        .manual_suite
        .iter()
        .filter(|t| !t.passes_on(&case.p_buggy, fuel))
        .count();
    let passing = case.manual_suite.len() - failing;
    if failing == 0 {
        return Err(invalid(dir, "manual suite has no failing test on the buggy program"));
    }
    if passing == 0 {
        return Err(invalid(dir, "manual suite has no passing test on the buggy program"));
    }
    for (i, t) in case.manual_suite.iter().enumerate() {
        if !t.passes_on(&case.p_correct, fuel) {
            return Err(invalid(
                dir,
                format!("manual test #{i} does not pass on the correct program"),
            ));
        }
    }
    if let Some(expected) = case.expected_initial_label {
        let cfg = RepairConfig {
            policy: case.policy.clone(),
            location_override: case.location_override,
            ..RepairConfig::default()
        };
        let outcome = repair(&case.p_buggy, &case.manual_suite, &cfg);
        let Some(patch) = outcome.patch else {
            return Err(invalid(dir, "no canonical initial patch, but a label is expected"));
        };
        let (_, label) = classify_patch(
            &case.p_buggy,
            &case.p_correct,
            &patch,
            &case.domain,
            fuel,
        );
        if label != expected {
            return Err(invalid(
                dir,
                format!("expected initial label {expected}, classified {label}"),
            ));
        }
    }
    Ok(())
}

/// Load every case folder under `path`, sorted by case id.
pub fn load_corpus(path: &Path) -> Result<Vec<BenchCase>, CorpusError> {
    let entries = std::fs::read_dir(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    let mut cases = Vec::with_capacity(dirs.len());
    for dir in dirs {
        cases.push(load_case(&dir)?);
    }
    if cases.is_empty() {
        return Err(CorpusError::Empty(path.to_path_buf()));
    }
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_case(
        dir: &Path,
        id: &str,
        buggy: &str,
        correct: &str,
        tests: &str,
        meta: &str,
    ) -> PathBuf {
        let case_dir = dir.join(id);
        fs::create_dir_all(&case_dir).unwrap();
        fs::write(case_dir.join("buggy.mini"), buggy).unwrap();
        fs::write(case_dir.join("correct.mini"), correct).unwrap();
        fs::write(case_dir.join("tests.jsonl"), tests).unwrap();
        fs::write(case_dir.join("case.toml"), meta).unwrap();
        case_dir
    }

    const BUGGY: &str = "fun f(x) { if (x > 0 && x < 5) { x = x + 1; } else { x = x - 1; } return x; }";
    const CORRECT: &str = "fun f(x) { if (x > 0 && x < 8) { x = x + 1; } else { x = x - 1; } return x; }";
    const CASE1_TESTS: &str = concat!(
        r#"{"args":[0],"expected":{"value":-1},"provenance":"manual"}"#,
        "\n",
        r#"{"args":[1],"expected":{"value":2},"provenance":"manual"}"#,
        "\n",
        r#"{"args":[7],"expected":{"value":8},"provenance":"manual"}"#,
        "\n",
        r#"{"args":[8],"expected":{"value":7},"provenance":"manual"}"#,
        "\n"
    );

    fn toy_meta(id: &str) -> String {
        format!(
            "id = \"{id}\"\nexpected_initial_label = \"correct\"\n\n[domain]\nranges = [[-50, 50]]\n\n[components]\noperators = [\"<\", \">\", \"&&\"]\n"
        )
    }

    #[test]
    fn toy_case_loads_and_validates() {
        let tmp = tempfile::tempdir().unwrap();
        write_case(
            tmp.path(),
            "toy_case1",
            BUGGY,
            CORRECT,
            CASE1_TESTS,
            &toy_meta("toy_case1"),
        );
        let corpus = load_corpus(tmp.path()).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(corpus[0].id, "toy_case1");
        assert_eq!(corpus[0].expected_initial_label, Some(OverfitLabel::Correct));
        // I_bug of the loaded pair is {5, 6, 7}
        let part = crate::evalkit::partition_domain(
            &corpus[0].p_buggy,
            &corpus[0].p_correct,
            &corpus[0].domain,
            100_000,
        );
        let bug: Vec<i64> = part.i_bug.iter().map(|p| p.0[0]).collect();
        assert_eq!(bug, vec![5, 6, 7]);
    }

    #[test]
    fn all_passing_manual_suite_is_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let tests = concat!(
            r#"{"args":[0],"expected":{"value":-1},"provenance":"manual"}"#,
            "\n",
            r#"{"args":[1],"expected":{"value":2},"provenance":"manual"}"#,
            "\n"
        );
        write_case(
            tmp.path(),
            "bad_case",
            BUGGY,
            CORRECT,
            tests,
            &toy_meta("bad_case"),
        );
        let err = load_corpus(tmp.path()).unwrap_err();
        assert!(err.to_string().contains("no failing test"));
    }

    #[test]
    fn manual_test_failing_on_correct_is_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let tests = concat!(
            r#"{"args":[5],"expected":{"value":4},"provenance":"manual"}"#,
            "\n",
            r#"{"args":[0],"expected":{"value":-1},"provenance":"manual"}"#,
            "\n",
            r#"{"args":[7],"expected":{"value":8},"provenance":"manual"}"#,
            "\n"
        );
        write_case(
            tmp.path(),
            "bad_case2",
            BUGGY,
            CORRECT,
            tests,
            &toy_meta("bad_case2"),
        );
        let err = load_corpus(tmp.path()).unwrap_err();
        assert!(err.to_string().contains("does not pass on the correct"));
    }

    #[test]
    fn mismatched_id_is_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        write_case(
            tmp.path(),
            "dir_name",
            BUGGY,
            CORRECT,
            CASE1_TESTS,
            &toy_meta("other_name"),
        );
        assert!(load_corpus(tmp.path()).is_err());
    }
}

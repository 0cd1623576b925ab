//! A test-suite-based program repair workbench for a small deterministic
//! imperative language.
//!
//! The pipeline: parse buggy and reference programs ([`lang`]), rank
//! suspicious locations from test spectra ([`faultloc`]), extract per-test
//! angelic constraints and synthesize replacement conditions or inserted
//! preconditions by canonical enumeration ([`synth`]), generate regression
//! tests whose oracle is the program under repair ([`testgen`]), and run
//! incremental test-suite augmentation that discards tests whose constraints
//! cannot be satisfied ([`unsatguided`]). Ground truth comes from exhaustive
//! input-domain comparison against the reference program ([`evalkit`]) over a
//! built-in benchmark of seeded bugs ([`corpus`]).

pub mod bench;
pub mod corpus;
pub mod evalkit;
pub mod faultloc;
pub mod lang;
pub mod patchfile;
pub mod synth;
pub mod testgen;
pub mod unsatguided;

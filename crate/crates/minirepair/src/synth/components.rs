//! Component sets for condition synthesis: variables in scope at the repair
//! location, a finite constant pool, an ordered operator list and a node-count
//! cap on candidate expressions.

use crate::lang::{BoolExpr, CmpOp, LocationId, Program};
use crate::testgen::TestCase;
use serde::{Deserialize, Serialize};

/// Operators available to the synthesizer, in enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SynthOp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "&&")]
    And,
    #[serde(rename = "||")]
    Or,
    #[serde(rename = "!")]
    Not,
}

impl SynthOp {
    pub const DEFAULT_ORDER: [SynthOp; 9] = [
        SynthOp::Lt,
        SynthOp::Gt,
        SynthOp::Le,
        SynthOp::Ge,
        SynthOp::Eq,
        SynthOp::Ne,
        SynthOp::And,
        SynthOp::Or,
        SynthOp::Not,
    ];

    pub fn as_cmp(self) -> Option<CmpOp> {
        match self {
            SynthOp::Lt => Some(CmpOp::Lt),
            SynthOp::Gt => Some(CmpOp::Gt),
            SynthOp::Le => Some(CmpOp::Le),
            SynthOp::Ge => Some(CmpOp::Ge),
            SynthOp::Eq => Some(CmpOp::Eq),
            SynthOp::Ne => Some(CmpOp::Ne),
            _ => None,
        }
    }

    pub fn parse(text: &str) -> Option<SynthOp> {
        Some(match text {
            "<" => SynthOp::Lt,
            ">" => SynthOp::Gt,
            "<=" => SynthOp::Le,
            ">=" => SynthOp::Ge,
            "==" => SynthOp::Eq,
            "!=" => SynthOp::Ne,
            "&&" => SynthOp::And,
            "||" => SynthOp::Or,
            "!" => SynthOp::Not,
            _ => return None,
        })
    }
}

/// Enumeration policy shared by all locations of one repair run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthPolicy {
    pub operators: Vec<SynthOp>,
    pub max_size: usize,
    /// Cap on condition evaluations per test during angelic extraction.
    pub angelic_bound: usize,
    pub fuel: u64,
}

impl Default for SynthPolicy {
    fn default() -> Self {
        SynthPolicy {
            operators: SynthOp::DEFAULT_ORDER.to_vec(),
            max_size: 9,
            angelic_bound: 12,
            fuel: 100_000,
        }
    }
}

/// Components available when synthesizing at one location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSet {
    /// Variables in scope at the location, declaration order.
    pub variables: Vec<String>,
    /// Sorted, deduplicated constant pool.
    pub constants: Vec<i64>,
    pub operators: Vec<SynthOp>,
    pub max_size: usize,
}

impl ComponentSet {
    /// Pool rule: literals appearing in the program, every component of every
    /// test input in the driving suite, and the anchors 0 and 1.
    pub fn for_location(
        p: &Program,
        loc: LocationId,
        suite: &[TestCase],
        policy: &SynthPolicy,
    ) -> ComponentSet {
        let info = p.location(loc).expect("location exists");
        let mut constants = p.literal_pool();
        constants.extend([0, 1]);
        for t in suite {
            constants.extend(t.input.0.iter().copied());
        }
        constants.sort_unstable();
        constants.dedup();
        ComponentSet {
            variables: info.vars_in_scope.clone(),
            constants,
            operators: policy.operators.clone(),
            max_size: policy.max_size,
        }
    }

    pub fn cmp_ops(&self) -> impl Iterator<Item = CmpOp> + '_ {
        self.operators.iter().filter_map(|op| op.as_cmp())
    }

    pub fn has(&self, op: SynthOp) -> bool {
        self.operators.contains(&op)
    }

    /// All comparison candidates (node count 3) in canonical order:
    /// variable pairs in declaration order first, then constants ascending,
    /// each with all comparison operators in listed order.
    pub fn comparisons(&self) -> Vec<BoolExpr> {
        use crate::lang::IntExpr;
        let mut out = Vec::new();
        for i in 0..self.variables.len() {
            for j in (i + 1)..self.variables.len() {
                for op in self.cmp_ops() {
                    out.push(BoolExpr::Cmp(
                        op,
                        IntExpr::var(&self.variables[i]),
                        IntExpr::var(&self.variables[j]),
                    ));
                }
            }
        }
        for &c in &self.constants {
            for v in &self.variables {
                for op in self.cmp_ops() {
                    out.push(BoolExpr::Cmp(op, IntExpr::var(v), IntExpr::Lit(c)));
                }
            }
        }
        out
    }
}

//! The mini-language: parsing, printing, deterministic interpretation and
//! patch application.

pub mod ast;
pub mod interp;
pub mod parser;
pub mod printer;

pub use ast::{BoolExpr, CmpOp, IntBinOp, IntExpr, LocationId, LocationInfo, LocationKind, Stmt};
pub use interp::{eval, eval_bool_in_env, ArityError, Env, EvalResult, InputPoint};
pub use parser::{parse, parse_bool_expr, ParseError};
pub use printer::{bool_to_string, pretty_print};

use serde::{Deserialize, Serialize};

/// How a patch attaches to a location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchMode {
    /// Replace the boolean expression of an `if` condition.
    ConditionReplace,
    /// Wrap a statement in `if (<expr>) { <stmt> }`.
    PreconditionInsert,
}

/// A repair: a location plus a synthesized boolean expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    pub location: LocationId,
    pub mode: PatchMode,
    pub expression: BoolExpr,
    /// Candidate evaluations consumed when this patch was synthesized.
    pub steps_used: u64,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PatchError {
    #[error("unknown location {0}")]
    UnknownLocation(LocationId),
    #[error("patch mode does not match location {0} ({1:?})")]
    ModeMismatch(LocationId, LocationKind),
}

/// Parsed, validated function. Immutable after construction; location ids and
/// all derived tables are recomputed by the canonical pre-order traversal, so
/// identical source always yields identical ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
    locations: Vec<LocationInfo>,
}

impl Program {
    /// Build a program from raw parts, renumbering locations canonically.
    pub(crate) fn new(name: String, params: Vec<String>, mut body: Vec<Stmt>) -> Self {
        let mut next = 0u32;
        renumber(&mut body, &mut next);
        let locations = collect_locations(&params, &body);
        Program {
            name,
            params,
            body,
            locations,
        }
    }

    pub fn locations(&self) -> &[LocationInfo] {
        &self.locations
    }

    pub fn location(&self, id: LocationId) -> Option<&LocationInfo> {
        self.locations.iter().find(|l| l.id == id)
    }

    pub fn if_condition_locations(&self) -> impl Iterator<Item = &LocationInfo> {
        self.locations
            .iter()
            .filter(|l| l.kind == LocationKind::IfCondition)
    }

    /// Parameters plus every assigned variable, in first-appearance order.
    pub fn all_variables(&self) -> Vec<String> {
        let mut vars = self.params.clone();
        fn walk(stmts: &[Stmt], vars: &mut Vec<String>) {
            for stmt in stmts {
                match stmt {
                    Stmt::Assign { name, .. } => {
                        if !vars.contains(name) {
                            vars.push(name.clone());
                        }
                    }
                    Stmt::If {
                        then_body,
                        else_body,
                        ..
                    } => {
                        walk(then_body, vars);
                        if let Some(e) = else_body {
                            walk(e, vars);
                        }
                    }
                    Stmt::While { body, .. } => walk(body, vars),
                    Stmt::Return { .. } => {}
                }
            }
        }
        walk(&self.body, &mut vars);
        vars
    }

    /// Every integer literal appearing in the program text, sorted, deduped.
    pub fn literal_pool(&self) -> Vec<i64> {
        let mut pool = Vec::new();
        fn walk(stmts: &[Stmt], pool: &mut Vec<i64>) {
            for stmt in stmts {
                match stmt {
                    Stmt::Assign { value, .. } | Stmt::Return { value, .. } => {
                        value.for_each_literal(&mut |v| pool.push(v));
                    }
                    Stmt::If {
                        cond,
                        then_body,
                        else_body,
                        ..
                    } => {
                        cond.for_each_literal(&mut |v| pool.push(v));
                        walk(then_body, pool);
                        if let Some(e) = else_body {
                            walk(e, pool);
                        }
                    }
                    Stmt::While { cond, body, .. } => {
                        cond.for_each_literal(&mut |v| pool.push(v));
                        walk(body, pool);
                    }
                }
            }
        }
        walk(&self.body, &mut pool);
        pool.sort_unstable();
        pool.dedup();
        pool
    }

    /// Apply a patch, returning a new program; `self` is unmodified.
    pub fn apply_patch(&self, patch: &Patch) -> Result<Program, PatchError> {
        let info = self
            .location(patch.location)
            .ok_or(PatchError::UnknownLocation(patch.location))?;
        match (patch.mode, info.kind) {
            (PatchMode::ConditionReplace, LocationKind::IfCondition) => {}
            (PatchMode::PreconditionInsert, LocationKind::Statement) => {}
            _ => return Err(PatchError::ModeMismatch(patch.location, info.kind)),
        }
        let mut body = self.body.clone();
        let applied = apply_in_block(&mut body, patch);
        debug_assert!(applied);
        Ok(Program::new(
            self.name.clone(),
            self.params.clone(),
            body,
        ))
    }
}

/// Convenience: apply a patch to a program (spec-level operation name).
pub fn apply_patch(p: &Program, patch: &Patch) -> Result<Program, PatchError> {
    p.apply_patch(patch)
}

fn apply_in_block(stmts: &mut Vec<Stmt>, patch: &Patch) -> bool {
    for i in 0..stmts.len() {
        match patch.mode {
            PatchMode::PreconditionInsert if stmts[i].id() == patch.location => {
                let original = stmts.remove(i);
                stmts.insert(
                    i,
                    Stmt::If {
                        id: LocationId(u32::MAX),
                        cond_id: LocationId(u32::MAX),
                        cond: patch.expression.clone(),
                        then_body: vec![original],
                        else_body: None,
                    },
                );
                return true;
            }
            PatchMode::ConditionReplace => {
                if let Stmt::If { cond_id, cond, .. } = &mut stmts[i] {
                    if *cond_id == patch.location {
                        *cond = patch.expression.clone();
                        return true;
                    }
                }
            }
            _ => {}
        }
        let found = match &mut stmts[i] {
            Stmt::If {
                then_body,
                else_body,
                ..
            } => {
                apply_in_block(then_body, patch)
                    || else_body
                        .as_mut()
                        .map(|e| apply_in_block(e, patch))
                        .unwrap_or(false)
            }
            Stmt::While { body, .. } => apply_in_block(body, patch),
            _ => false,
        };
        if found {
            return true;
        }
    }
    false
}

fn renumber(stmts: &mut [Stmt], next: &mut u32) {
    for stmt in stmts {
        match stmt {
            Stmt::Assign { id, .. } | Stmt::Return { id, .. } => {
                *id = LocationId(*next);
                *next += 1;
            }
            Stmt::If {
                id,
                cond_id,
                then_body,
                else_body,
                ..
            } => {
                *id = LocationId(*next);
                *next += 1;
                *cond_id = LocationId(*next);
                *next += 1;
                renumber(then_body, next);
                if let Some(e) = else_body {
                    renumber(e, next);
                }
            }
            Stmt::While { id, body, .. } => {
                *id = LocationId(*next);
                *next += 1;
                renumber(body, next);
            }
        }
    }
}

fn collect_locations(params: &[String], body: &[Stmt]) -> Vec<LocationInfo> {
    let mut out = Vec::new();
    let mut declared: Vec<String> = params.to_vec();

    fn walk(stmts: &[Stmt], declared: &mut Vec<String>, out: &mut Vec<LocationInfo>) {
        for stmt in stmts {
            let region = stmt.node_count();
            out.push(LocationInfo {
                id: stmt.id(),
                kind: LocationKind::Statement,
                vars_in_scope: declared.clone(),
                region_nodes: region,
            });
            match stmt {
                Stmt::Assign { name, .. } => {
                    if !declared.contains(name) {
                        declared.push(name.clone());
                    }
                }
                Stmt::If {
                    cond_id,
                    then_body,
                    else_body,
                    ..
                } => {
                    out.push(LocationInfo {
                        id: *cond_id,
                        kind: LocationKind::IfCondition,
                        vars_in_scope: declared.clone(),
                        region_nodes: region,
                    });
                    walk(then_body, declared, out);
                    if let Some(e) = else_body {
                        walk(e, declared, out);
                    }
                }
                Stmt::While { body, .. } => {
                    walk(body, declared, out);
                }
                Stmt::Return { .. } => {}
            }
        }
    }

    walk(body, &mut declared, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TOY_BUGGY: &str = "\
fun f(x) {
  if (x > 0 && x < 5) {
    x = x + 1;
  } else {
    x = x - 1;
  }
  return x;
}
";

    fn toy() -> Program {
        parse(TOY_BUGGY).unwrap()
    }

    fn eval1(p: &Program, x: i64) -> EvalResult {
        eval(p, &InputPoint(vec![x]), 100_000).unwrap()
    }

    #[test]
    fn toy_program_examples() {
        let p = toy();
        assert_eq!(eval1(&p, 0), EvalResult::Value(-1));
        assert_eq!(eval1(&p, 5), EvalResult::Value(4));
        // correct condition on the same body
        let patch = Patch {
            location: p.if_condition_locations().next().unwrap().id,
            mode: PatchMode::ConditionReplace,
            expression: parse_bool_expr("x > 0 && x < 8").unwrap(),
            steps_used: 0,
        };
        let fixed = p.apply_patch(&patch).unwrap();
        assert_eq!(eval1(&fixed, 5), EvalResult::Value(6));
    }

    #[test]
    fn empty_body_has_no_condition_locations() {
        let p = parse("fun f(x) { return x; }").unwrap();
        assert_eq!(p.if_condition_locations().count(), 0);
        assert_eq!(eval1(&p, 3), EvalResult::Value(3));
    }

    #[test]
    fn undeclared_variable_is_rejected() {
        let err = parse("fun f(x) { return y; }").unwrap_err();
        assert!(matches!(err, ParseError::UndeclaredVariable { .. }));
    }

    #[test]
    fn roundtrip_toy() {
        let p = toy();
        let printed = pretty_print(&p);
        let again = parse(&printed).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn division_by_zero_is_an_outcome() {
        let p = parse("fun f(a, b) { return a / b; }").unwrap();
        assert_eq!(
            eval(&p, &InputPoint(vec![4, 0]), 100).unwrap(),
            EvalResult::DivisionByZero
        );
        assert_eq!(
            eval(&p, &InputPoint(vec![9, 2]), 100).unwrap(),
            EvalResult::Value(4)
        );
    }

    #[test]
    fn infinite_loop_exhausts_fuel() {
        let p = parse("fun f(x) { while (true) { } return x; }").unwrap();
        assert_eq!(eval1(&p, 1), EvalResult::FuelExhausted);
    }

    #[test]
    fn identity_patch_is_noop_on_201_point_domain() {
        let p = toy();
        let cond = p.if_condition_locations().next().unwrap().id;
        let patch = Patch {
            location: cond,
            mode: PatchMode::ConditionReplace,
            expression: parse_bool_expr("x > 0 && x < 5").unwrap(),
            steps_used: 0,
        };
        let patched = p.apply_patch(&patch).unwrap();
        for x in -100..=100 {
            assert_eq!(eval1(&p, x), eval1(&patched, x));
        }
    }

    #[test]
    fn precondition_insert_can_skip_a_statement() {
        let p = parse("fun f(x) { t = 0; t = 9; return t; }").unwrap();
        // wrap `t = 9;`
        let target = p.locations()[1].id;
        let patch = Patch {
            location: target,
            mode: PatchMode::PreconditionInsert,
            expression: BoolExpr::Lit(false),
            steps_used: 0,
        };
        let patched = p.apply_patch(&patch).unwrap();
        for x in [-1, 0, 7] {
            assert_eq!(eval1(&patched, x), EvalResult::Value(0));
            assert_eq!(eval1(&p, x), EvalResult::Value(9));
        }
        // guard true keeps behavior
        let patch_true = Patch {
            expression: BoolExpr::Lit(true),
            ..patch
        };
        let patched_true = p.apply_patch(&patch_true).unwrap();
        for x in [-1, 0, 7] {
            assert_eq!(eval1(&patched_true, x), eval1(&p, x));
        }
    }

    #[test]
    fn patched_program_reparses_equal() {
        let p = toy();
        let cond = p.if_condition_locations().next().unwrap().id;
        let patch = Patch {
            location: cond,
            mode: PatchMode::ConditionReplace,
            expression: parse_bool_expr("x > 0 && x < 8").unwrap(),
            steps_used: 0,
        };
        let patched = p.apply_patch(&patch).unwrap();
        assert_eq!(parse(&pretty_print(&patched)).unwrap(), patched);
    }

    #[test]
    fn location_ids_stable_across_reparse() {
        let src = "fun g(a, b) { c = 0; while (a > 0) { if (b > c) { c = c + 1; } a = a - 1; } return c; }";
        let p1 = parse(src).unwrap();
        let p2 = parse(src).unwrap();
        let ids1: Vec<_> = p1.locations().iter().map(|l| (l.id, l.kind)).collect();
        let ids2: Vec<_> = p2.locations().iter().map(|l| (l.id, l.kind)).collect();
        assert_eq!(ids1, ids2);
    }
}

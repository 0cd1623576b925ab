//! Tree-walking interpreter with fuel accounting and condition hooks.
//!
//! Every statement execution costs one unit of fuel; a `while` charges one
//! unit per condition check, so even an empty loop body terminates via
//! [`EvalResult::FuelExhausted`]. Arithmetic is 64-bit wrapping; division by
//! zero is the ordinary [`EvalResult::DivisionByZero`] outcome, never a crash.
//! Locals are zero-initialized, so evaluation is total and deterministic.

use super::ast::*;
use super::{PatchMode, Program};
use std::collections::BTreeMap;

/// Observable outcome of one program execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalResult {
    Value(i64),
    FuelExhausted,
    DivisionByZero,
}

/// One input vector; arity must match the program's parameter list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct InputPoint(pub Vec<i64>);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("arity mismatch: program takes {expected} argument(s), got {got}")]
pub struct ArityError {
    pub expected: usize,
    pub got: usize,
}

/// Variable environment snapshot captured at a condition evaluation.
pub type Env = BTreeMap<String, i64>;

/// Instrumentation applied to one location during a run.
pub(crate) enum CondHook<'a> {
    /// No instrumentation.
    None,
    /// Record every executed statement id and evaluated if-condition id.
    Coverage(&'a mut std::collections::BTreeSet<LocationId>),
    /// Record the observed decision and environment at the hooked point.
    Observe {
        loc: LocationId,
        mode: PatchMode,
        log: &'a mut Vec<(Env, bool)>,
    },
    /// Force decisions at the hooked point from `seq`, recording
    /// environments. When the run needs a decision beyond `seq`, it stops
    /// with [`RunStatus::NeedsDecision`].
    Force {
        loc: LocationId,
        mode: PatchMode,
        seq: &'a [bool],
        used: usize,
        log: &'a mut Vec<Env>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RunStatus {
    Done(EvalResult),
    /// Forced run consumed the whole sequence and hit the hooked point again.
    NeedsDecision,
}

struct Interp<'a, 'h> {
    env: Env,
    fuel: u64,
    hook: &'h mut CondHook<'a>,
}

enum Flow {
    Normal,
    Return(i64),
    Stop(RunStatus),
}

impl<'a, 'h> Interp<'a, 'h> {
    fn charge(&mut self) -> bool {
        if self.fuel == 0 {
            return false;
        }
        self.fuel -= 1;
        true
    }

    fn exec_block(&mut self, stmts: &[Stmt]) -> Flow {
        for stmt in stmts {
            match self.exec_stmt(stmt) {
                Flow::Normal => {}
                other => return other,
            }
        }
        Flow::Normal
    }

    /// Virtual precondition guard: decides whether `stmt` executes at all.
    fn precondition_gate(&mut self, sid: LocationId) -> Result<bool, Flow> {
        let hooked_observe = matches!(
            &*self.hook,
            CondHook::Observe { loc, mode, .. }
                if *mode == PatchMode::PreconditionInsert && *loc == sid
        );
        let hooked_force = matches!(
            &*self.hook,
            CondHook::Force { loc, mode, .. }
                if *mode == PatchMode::PreconditionInsert && *loc == sid
        );
        if !hooked_observe && !hooked_force {
            return Ok(true);
        }
        // charge for the virtual guard, mirroring the patched program
        if !self.charge() {
            return Err(Flow::Stop(RunStatus::Done(EvalResult::FuelExhausted)));
        }
        let env = self.env.clone();
        if hooked_observe {
            if let CondHook::Observe { log, .. } = &mut *self.hook {
                log.push((env, true));
            }
            return Ok(true);
        }
        if let CondHook::Force { seq, used, log, .. } = &mut *self.hook {
            if *used >= seq.len() {
                return Err(Flow::Stop(RunStatus::NeedsDecision));
            }
            let decision = seq[*used];
            *used += 1;
            log.push(env);
            Ok(decision)
        } else {
            unreachable!()
        }
    }

    fn exec_stmt(&mut self, stmt: &Stmt) -> Flow {
        match self.precondition_gate(stmt.id()) {
            Ok(true) => {}
            Ok(false) => return Flow::Normal,
            Err(flow) => return flow,
        }
        if let CondHook::Coverage(set) = &mut *self.hook {
            set.insert(stmt.id());
        }
        match stmt {
            Stmt::Assign { name, value, .. } => {
                if !self.charge() {
                    return Flow::Stop(RunStatus::Done(EvalResult::FuelExhausted));
                }
                match self.eval_int(value) {
                    Ok(v) => {
                        self.env.insert(name.clone(), v);
                        Flow::Normal
                    }
                    Err(flow) => flow,
                }
            }
            Stmt::If {
                cond_id,
                cond,
                then_body,
                else_body,
                ..
            } => {
                if !self.charge() {
                    return Flow::Stop(RunStatus::Done(EvalResult::FuelExhausted));
                }
                let decision = match self.if_condition(*cond_id, cond) {
                    Ok(b) => b,
                    Err(flow) => return flow,
                };
                if decision {
                    self.exec_block(then_body)
                } else if let Some(else_body) = else_body {
                    self.exec_block(else_body)
                } else {
                    Flow::Normal
                }
            }
            Stmt::While { cond, body, .. } => loop {
                if !self.charge() {
                    return Flow::Stop(RunStatus::Done(EvalResult::FuelExhausted));
                }
                match self.eval_bool(cond) {
                    Ok(true) => match self.exec_block(body) {
                        Flow::Normal => continue,
                        other => return other,
                    },
                    Ok(false) => return Flow::Normal,
                    Err(flow) => return flow,
                }
            },
            Stmt::Return { value, .. } => {
                if !self.charge() {
                    return Flow::Stop(RunStatus::Done(EvalResult::FuelExhausted));
                }
                match self.eval_int(value) {
                    Ok(v) => Flow::Return(v),
                    Err(flow) => flow,
                }
            }
        }
    }

    fn if_condition(&mut self, cond_id: LocationId, cond: &BoolExpr) -> Result<bool, Flow> {
        if let CondHook::Coverage(set) = &mut *self.hook {
            set.insert(cond_id);
        }
        let hooked_force = matches!(
            &*self.hook,
            CondHook::Force { loc, mode, .. }
                if *mode == PatchMode::ConditionReplace && *loc == cond_id
        );
        if hooked_force {
            let env = self.env.clone();
            if let CondHook::Force { seq, used, log, .. } = &mut *self.hook {
                if *used >= seq.len() {
                    return Err(Flow::Stop(RunStatus::NeedsDecision));
                }
                let decision = seq[*used];
                *used += 1;
                log.push(env);
                return Ok(decision);
            }
            unreachable!()
        }
        let hooked_observe = matches!(
            &*self.hook,
            CondHook::Observe { loc, mode, .. }
                if *mode == PatchMode::ConditionReplace && *loc == cond_id
        );
        // expression evaluation never mutates the environment
        let value = self.eval_bool(cond)?;
        if hooked_observe {
            let env = self.env.clone();
            if let CondHook::Observe { log, .. } = &mut *self.hook {
                log.push((env, value));
            }
        }
        Ok(value)
    }

    fn eval_int(&mut self, e: &IntExpr) -> Result<i64, Flow> {
        match e {
            IntExpr::Lit(v) => Ok(*v),
            IntExpr::Var(name) => Ok(*self.env.get(name).unwrap_or(&0)),
            IntExpr::Bin(op, l, r) => {
                let l = self.eval_int(l)?;
                let r = self.eval_int(r)?;
                match op {
                    IntBinOp::Add => Ok(l.wrapping_add(r)),
                    IntBinOp::Sub => Ok(l.wrapping_sub(r)),
                    IntBinOp::Mul => Ok(l.wrapping_mul(r)),
                    IntBinOp::Div => {
                        if r == 0 {
                            Err(Flow::Stop(RunStatus::Done(EvalResult::DivisionByZero)))
                        } else {
                            Ok(l.wrapping_div(r))
                        }
                    }
                }
            }
        }
    }

    fn eval_bool(&mut self, e: &BoolExpr) -> Result<bool, Flow> {
        match e {
            BoolExpr::Lit(b) => Ok(*b),
            BoolExpr::Cmp(op, l, r) => {
                let l = self.eval_int(l)?;
                let r = self.eval_int(r)?;
                Ok(op.apply(l, r))
            }
            BoolExpr::And(l, r) => Ok(self.eval_bool(l)? && self.eval_bool(r)?),
            BoolExpr::Or(l, r) => Ok(self.eval_bool(l)? || self.eval_bool(r)?),
            BoolExpr::Not(inner) => Ok(!self.eval_bool(inner)?),
        }
    }
}

pub(crate) fn run_with_hook(
    program: &Program,
    input: &InputPoint,
    fuel: u64,
    mut hook: CondHook<'_>,
) -> Result<RunStatus, ArityError> {
    if input.0.len() != program.params.len() {
        return Err(ArityError {
            expected: program.params.len(),
            got: input.0.len(),
        });
    }
    let mut env: Env = program
        .all_variables()
        .into_iter()
        .map(|v| (v, 0))
        .collect();
    for (name, value) in program.params.iter().zip(&input.0) {
        env.insert(name.clone(), *value);
    }
    let mut interp = Interp {
        env,
        fuel,
        hook: &mut hook,
    };
    Ok(match interp.exec_block(&program.body) {
        Flow::Normal => RunStatus::Done(EvalResult::Value(0)),
        Flow::Return(v) => RunStatus::Done(EvalResult::Value(v)),
        Flow::Stop(s) => s,
    })
}

/// Deterministically evaluate `program` on `input` with the given fuel.
pub fn eval(program: &Program, input: &InputPoint, fuel: u64) -> Result<EvalResult, ArityError> {
    match run_with_hook(program, input, fuel, CondHook::None)? {
        RunStatus::Done(r) => Ok(r),
        RunStatus::NeedsDecision => unreachable!("plain runs never request decisions"),
    }
}

/// Evaluate a candidate boolean expression against an environment snapshot.
/// Synthesized candidates contain no division, so a total fallback of 0 for
/// division by zero is never observable through this path.
pub fn eval_bool_in_env(e: &BoolExpr, env: &Env) -> bool {
    fn int(e: &IntExpr, env: &Env) -> i64 {
        match e {
            IntExpr::Lit(v) => *v,
            IntExpr::Var(name) => *env.get(name).unwrap_or(&0),
            IntExpr::Bin(op, l, r) => {
                let l = int(l, env);
                let r = int(r, env);
                match op {
                    IntBinOp::Add => l.wrapping_add(r),
                    IntBinOp::Sub => l.wrapping_sub(r),
                    IntBinOp::Mul => l.wrapping_mul(r),
                    IntBinOp::Div => {
                        if r == 0 {
                            0
                        } else {
                            l.wrapping_div(r)
                        }
                    }
                }
            }
        }
    }
    match e {
        BoolExpr::Lit(b) => *b,
        BoolExpr::Cmp(op, l, r) => op.apply(int(l, env), int(r, env)),
        BoolExpr::And(l, r) => eval_bool_in_env(l, env) && eval_bool_in_env(r, env),
        BoolExpr::Or(l, r) => eval_bool_in_env(l, env) || eval_bool_in_env(r, env),
        BoolExpr::Not(inner) => !eval_bool_in_env(inner, env),
    }
}

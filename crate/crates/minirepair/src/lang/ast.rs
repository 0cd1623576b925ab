//! AST for the mini-language: integer variables, `+ - * /`, comparisons,
//! boolean connectives, assignment, `if`/`else`, `while`, `return`.

use std::fmt;

/// Stable address of a repairable program point.
///
/// Ids are assigned in pre-order over the statement tree: a statement gets an
/// id when visited and an `if` statement additionally assigns the next id to
/// its condition. Re-parsing identical source always yields identical ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct LocationId(pub u32);

impl fmt::Display for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntBinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl IntBinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            IntBinOp::Add => "+",
            IntBinOp::Sub => "-",
            IntBinOp::Mul => "*",
            IntBinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    pub fn apply(self, l: i64, r: i64) -> bool {
        match self {
            CmpOp::Lt => l < r,
            CmpOp::Gt => l > r,
            CmpOp::Le => l <= r,
            CmpOp::Ge => l >= r,
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
        }
    }
}

/// Integer-valued expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IntExpr {
    Lit(i64),
    Var(String),
    Bin(IntBinOp, Box<IntExpr>, Box<IntExpr>),
}

impl IntExpr {
    pub fn var(name: &str) -> Self {
        IntExpr::Var(name.to_string())
    }

    pub fn node_count(&self) -> usize {
        match self {
            IntExpr::Lit(_) | IntExpr::Var(_) => 1,
            IntExpr::Bin(_, l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    pub fn for_each_literal(&self, f: &mut impl FnMut(i64)) {
        match self {
            IntExpr::Lit(v) => f(*v),
            IntExpr::Var(_) => {}
            IntExpr::Bin(_, l, r) => {
                l.for_each_literal(f);
                r.for_each_literal(f);
            }
        }
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(&str)) {
        match self {
            IntExpr::Lit(_) => {}
            IntExpr::Var(v) => f(v),
            IntExpr::Bin(_, l, r) => {
                l.for_each_var(f);
                r.for_each_var(f);
            }
        }
    }
}

/// Boolean-valued expression. Conditions of `if`/`while` live here, and so do
/// synthesized patch expressions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Lit(bool),
    Cmp(CmpOp, IntExpr, IntExpr),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Not(Box<BoolExpr>),
}

impl BoolExpr {
    pub fn cmp(op: CmpOp, l: IntExpr, r: IntExpr) -> Self {
        BoolExpr::Cmp(op, l, r)
    }

    pub fn node_count(&self) -> usize {
        match self {
            BoolExpr::Lit(_) => 1,
            BoolExpr::Cmp(_, l, r) => 1 + l.node_count() + r.node_count(),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => 1 + l.node_count() + r.node_count(),
            BoolExpr::Not(e) => 1 + e.node_count(),
        }
    }

    pub fn for_each_literal(&self, f: &mut impl FnMut(i64)) {
        match self {
            BoolExpr::Lit(_) => {}
            BoolExpr::Cmp(_, l, r) => {
                l.for_each_literal(f);
                r.for_each_literal(f);
            }
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
                l.for_each_literal(f);
                r.for_each_literal(f);
            }
            BoolExpr::Not(e) => e.for_each_literal(f),
        }
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(&str)) {
        match self {
            BoolExpr::Lit(_) => {}
            BoolExpr::Cmp(_, l, r) => {
                l.for_each_var(f);
                r.for_each_var(f);
            }
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
                l.for_each_var(f);
                r.for_each_var(f);
            }
            BoolExpr::Not(e) => e.for_each_var(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign {
        id: LocationId,
        name: String,
        value: IntExpr,
    },
    If {
        id: LocationId,
        cond_id: LocationId,
        cond: BoolExpr,
        then_body: Vec<Stmt>,
        else_body: Option<Vec<Stmt>>,
    },
    While {
        id: LocationId,
        cond: BoolExpr,
        body: Vec<Stmt>,
    },
    Return {
        id: LocationId,
        value: IntExpr,
    },
}

impl Stmt {
    pub fn id(&self) -> LocationId {
        match self {
            Stmt::Assign { id, .. }
            | Stmt::If { id, .. }
            | Stmt::While { id, .. }
            | Stmt::Return { id, .. } => *id,
        }
    }

    /// AST node count of the whole statement subtree (statement nodes plus
    /// every expression node).
    pub fn node_count(&self) -> usize {
        match self {
            Stmt::Assign { value, .. } => 1 + value.node_count(),
            Stmt::If {
                cond,
                then_body,
                else_body,
                ..
            } => {
                1 + cond.node_count()
                    + then_body.iter().map(Stmt::node_count).sum::<usize>()
                    + else_body
                        .as_ref()
                        .map(|b| b.iter().map(Stmt::node_count).sum::<usize>())
                        .unwrap_or(0)
            }
            Stmt::While { cond, body, .. } => {
                1 + cond.node_count() + body.iter().map(Stmt::node_count).sum::<usize>()
            }
            Stmt::Return { value, .. } => 1 + value.node_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocationKind {
    Statement,
    IfCondition,
}

/// Per-location metadata derived from the AST at construction time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocationInfo {
    pub id: LocationId,
    pub kind: LocationKind,
    /// Params plus every variable assigned strictly earlier in source order.
    pub vars_in_scope: Vec<String>,
    /// Node count of the enclosing statement subtree (for an `if` condition,
    /// the whole `if` statement).
    pub region_nodes: usize,
}

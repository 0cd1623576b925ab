//! Canonical pretty-printer. `parse(pretty_print(p))` is structurally equal
//! to `p`, including location ids.

use super::ast::*;
use super::Program;
use std::fmt::Write;

pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    write!(out, "fun {}({})", p.name, p.params.join(", ")).unwrap();
    out.push_str(" {\n");
    print_block(&p.body, 1, &mut out);
    out.push_str("}\n");
    out
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn print_block(stmts: &[Stmt], depth: usize, out: &mut String) {
    for stmt in stmts {
        print_stmt(stmt, depth, out);
    }
}

fn print_stmt(stmt: &Stmt, depth: usize, out: &mut String) {
    indent(depth, out);
    match stmt {
        Stmt::Assign { name, value, .. } => {
            out.push_str(name);
            out.push_str(" = ");
            out.push_str(&int_to_string(value));
            out.push_str(";\n");
        }
        Stmt::If {
            cond,
            then_body,
            else_body,
            ..
        } => {
            out.push_str("if (");
            out.push_str(&bool_to_string(cond));
            out.push_str(") {\n");
            print_block(then_body, depth + 1, out);
            indent(depth, out);
            out.push('}');
            if let Some(else_body) = else_body {
                out.push_str(" else {\n");
                print_block(else_body, depth + 1, out);
                indent(depth, out);
                out.push('}');
            }
            out.push('\n');
        }
        Stmt::While { cond, body, .. } => {
            out.push_str("while (");
            out.push_str(&bool_to_string(cond));
            out.push_str(") {\n");
            print_block(body, depth + 1, out);
            indent(depth, out);
            out.push_str("}\n");
        }
        Stmt::Return { value, .. } => {
            out.push_str("return ");
            out.push_str(&int_to_string(value));
            out.push_str(";\n");
        }
    }
}

fn int_prec(e: &IntExpr) -> u8 {
    match e {
        IntExpr::Lit(_) | IntExpr::Var(_) => 3,
        IntExpr::Bin(IntBinOp::Mul | IntBinOp::Div, ..) => 2,
        IntExpr::Bin(IntBinOp::Add | IntBinOp::Sub, ..) => 1,
    }
}

pub fn int_to_string(e: &IntExpr) -> String {
    match e {
        IntExpr::Lit(v) => v.to_string(),
        IntExpr::Var(v) => v.clone(),
        IntExpr::Bin(op, l, r) => {
            let prec = int_prec(e);
            let ls = if int_prec(l) < prec {
                format!("({})", int_to_string(l))
            } else {
                int_to_string(l)
            };
            // left-associative: parenthesize right child at equal precedence
            let rs = if int_prec(r) <= prec {
                format!("({})", int_to_string(r))
            } else {
                int_to_string(r)
            };
            format!("{ls} {} {rs}", op.symbol())
        }
    }
}

fn bool_prec(e: &BoolExpr) -> u8 {
    match e {
        BoolExpr::Lit(_) | BoolExpr::Cmp(..) => 4,
        BoolExpr::Not(_) => 3,
        BoolExpr::And(..) => 2,
        BoolExpr::Or(..) => 1,
    }
}

pub fn bool_to_string(e: &BoolExpr) -> String {
    match e {
        BoolExpr::Lit(b) => b.to_string(),
        BoolExpr::Cmp(op, l, r) => {
            format!("{} {} {}", int_to_string(l), op.symbol(), int_to_string(r))
        }
        BoolExpr::And(l, r) => {
            let prec = 2;
            let ls = wrap_bool(l, prec);
            let rs = wrap_bool_right(r, prec);
            format!("{ls} && {rs}")
        }
        BoolExpr::Or(l, r) => {
            let prec = 1;
            let ls = wrap_bool(l, prec);
            let rs = wrap_bool_right(r, prec);
            format!("{ls} || {rs}")
        }
        BoolExpr::Not(inner) => format!("!({})", bool_to_string(inner)),
    }
}

fn wrap_bool(e: &BoolExpr, parent: u8) -> String {
    if bool_prec(e) < parent {
        format!("({})", bool_to_string(e))
    } else {
        bool_to_string(e)
    }
}

fn wrap_bool_right(e: &BoolExpr, parent: u8) -> String {
    if bool_prec(e) <= parent {
        format!("({})", bool_to_string(e))
    } else {
        bool_to_string(e)
    }
}

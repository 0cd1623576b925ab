//! Hand-rolled lexer and recursive-descent parser for `.mini` sources.
//!
//! Grammar:
//!
//! ```text
//! program := "fun" ident "(" ident ("," ident)* ")" block
//! block   := "{" stmt* "}"
//! stmt    := ident "=" expr ";"
//!          | "if" "(" expr ")" block ("else" block)?
//!          | "while" "(" expr ")" block
//!          | "return" expr ";"
//! ```
//!
//! Expressions are split into an integer layer (`+ - * /` over literals,
//! variables and parenthesized integer expressions) and a boolean layer
//! (comparisons, `&& || !`, `true`/`false`). Conditions must be boolean,
//! assignment and return values must be integers; mixing the two is a parse
//! error. `-` directly before an integer literal in operand position is a
//! negative literal.

use super::ast::*;
use super::Program;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: unexpected character {found:?}")]
    UnexpectedChar { line: u32, col: u32, found: char },
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Unexpected {
        line: u32,
        col: u32,
        expected: String,
        found: String,
    },
    #[error("{line}:{col}: integer literal out of range")]
    IntOutOfRange { line: u32, col: u32 },
    #[error("{line}:{col}: expected a boolean expression")]
    ExpectedBool { line: u32, col: u32 },
    #[error("{line}:{col}: expected an integer expression")]
    ExpectedInt { line: u32, col: u32 },
    #[error("{line}:{col}: undeclared variable `{name}`")]
    UndeclaredVariable { line: u32, col: u32, name: String },
    #[error("duplicate parameter `{name}`")]
    DuplicateParam { name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    KwFun,
    KwIf,
    KwElse,
    KwWhile,
    KwReturn,
    KwTrue,
    KwFalse,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    Ne,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::KwFun => "fun",
            Tok::KwIf => "if",
            Tok::KwElse => "else",
            Tok::KwWhile => "while",
            Tok::KwReturn => "return",
            Tok::KwTrue => "true",
            Tok::KwFalse => "false",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Assign => "=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            _ => "?",
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

type Spanned = (Tok, u32, u32);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
                self.bump();
            }
            // line comments: `//` to end of line
            if self.peek() == Some(b'/') && self.src.get(self.pos + 1) == Some(&b'/') {
                while !matches!(self.peek(), None | Some(b'\n')) {
                    self.bump();
                }
                continue;
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, line, col));
                return Ok(out);
            };
            let tok = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b',' => Tok::Comma,
                b';' => Tok::Semi,
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'<' => {
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Le
                    } else {
                        Tok::Lt
                    }
                }
                b'>' => {
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Ge
                    } else {
                        Tok::Gt
                    }
                }
                b'=' => {
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::EqEq
                    } else {
                        Tok::Assign
                    }
                }
                b'!' => {
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Ne
                    } else {
                        Tok::Bang
                    }
                }
                b'&' => {
                    if self.peek() == Some(b'&') {
                        self.bump();
                        Tok::AndAnd
                    } else {
                        return Err(ParseError::UnexpectedChar {
                            line,
                            col,
                            found: '&',
                        });
                    }
                }
                b'|' => {
                    if self.peek() == Some(b'|') {
                        self.bump();
                        Tok::OrOr
                    } else {
                        return Err(ParseError::UnexpectedChar {
                            line,
                            col,
                            found: '|',
                        });
                    }
                }
                b'0'..=b'9' => {
                    let mut text = String::new();
                    text.push(c as char);
                    while matches!(self.peek(), Some(b'0'..=b'9')) {
                        text.push(self.bump().unwrap() as char);
                    }
                    let v: i64 = text
                        .parse()
                        .map_err(|_| ParseError::IntOutOfRange { line, col })?;
                    Tok::Int(v)
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let mut text = String::new();
                    text.push(c as char);
                    while matches!(self.peek(), Some(b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'_')) {
                        text.push(self.bump().unwrap() as char);
                    }
                    match text.as_str() {
                        "fun" => Tok::KwFun,
                        "if" => Tok::KwIf,
                        "else" => Tok::KwElse,
                        "while" => Tok::KwWhile,
                        "return" => Tok::KwReturn,
                        "true" => Tok::KwTrue,
                        "false" => Tok::KwFalse,
                        _ => Tok::Ident(text),
                    }
                }
                other => {
                    return Err(ParseError::UnexpectedChar {
                        line,
                        col,
                        found: other as char,
                    })
                }
            };
            out.push((tok, line, col));
        }
    }
}

/// Either layer of the expression grammar, before the context (condition vs
/// assignment) forces one.
enum AnyExpr {
    Int(IntExpr),
    Bool(BoolExpr),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let (tok, line, col) = self.next();
        if tok == want {
            Ok(())
        } else {
            Err(ParseError::Unexpected {
                line,
                col,
                expected: format!("`{}`", want.text()),
                found: tok.describe(),
            })
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        let (tok, line, col) = self.next();
        match tok {
            Tok::Ident(s) => Ok(s),
            other => Err(ParseError::Unexpected {
                line,
                col,
                expected: "identifier".to_string(),
                found: other.describe(),
            }),
        }
    }

    fn parse_program(&mut self) -> Result<(String, Vec<String>, Vec<Stmt>), ParseError> {
        self.expect(Tok::KwFun)?;
        let name = self.expect_ident()?;
        self.expect(Tok::LParen)?;
        let mut params = vec![self.expect_ident()?];
        while self.peek().0 == Tok::Comma {
            self.next();
            params.push(self.expect_ident()?);
        }
        self.expect(Tok::RParen)?;
        let body = self.parse_block()?;
        self.expect(Tok::Eof)?;
        Ok((name, params, body))
    }

    fn parse_block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while self.peek().0 != Tok::RBrace {
            stmts.push(self.parse_stmt()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(stmts)
    }

    fn parse_stmt(&mut self) -> Result<Stmt, ParseError> {
        let dummy = LocationId(u32::MAX);
        let (tok, line, col) = self.peek().clone();
        match tok {
            Tok::KwIf => {
                self.next();
                self.expect(Tok::LParen)?;
                let cond = self.parse_bool(line, col)?;
                self.expect(Tok::RParen)?;
                let then_body = self.parse_block()?;
                let else_body = if self.peek().0 == Tok::KwElse {
                    self.next();
                    Some(self.parse_block()?)
                } else {
                    None
                };
                Ok(Stmt::If {
                    id: dummy,
                    cond_id: dummy,
                    cond,
                    then_body,
                    else_body,
                })
            }
            Tok::KwWhile => {
                self.next();
                self.expect(Tok::LParen)?;
                let cond = self.parse_bool(line, col)?;
                self.expect(Tok::RParen)?;
                let body = self.parse_block()?;
                Ok(Stmt::While {
                    id: dummy,
                    cond,
                    body,
                })
            }
            Tok::KwReturn => {
                self.next();
                let value = self.parse_int(line, col)?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Return { id: dummy, value })
            }
            Tok::Ident(name) => {
                self.next();
                self.expect(Tok::Assign)?;
                let value = self.parse_int(line, col)?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Assign {
                    id: dummy,
                    name,
                    value,
                })
            }
            other => Err(ParseError::Unexpected {
                line,
                col,
                expected: "statement".to_string(),
                found: other.describe(),
            }),
        }
    }

    fn parse_bool(&mut self, line: u32, col: u32) -> Result<BoolExpr, ParseError> {
        match self.parse_expr()? {
            AnyExpr::Bool(b) => Ok(b),
            AnyExpr::Int(_) => Err(ParseError::ExpectedBool { line, col }),
        }
    }

    fn parse_int(&mut self, line: u32, col: u32) -> Result<IntExpr, ParseError> {
        match self.parse_expr()? {
            AnyExpr::Int(e) => Ok(e),
            AnyExpr::Bool(_) => Err(ParseError::ExpectedInt { line, col }),
        }
    }

    // or_expr := and_expr ("||" and_expr)*
    fn parse_expr(&mut self) -> Result<AnyExpr, ParseError> {
        let mut lhs = self.parse_and()?;
        while self.peek().0 == Tok::OrOr {
            let (_, line, col) = self.next();
            let l = match lhs {
                AnyExpr::Bool(b) => b,
                AnyExpr::Int(_) => return Err(ParseError::ExpectedBool { line, col }),
            };
            let (_, rline, rcol) = self.peek().clone();
            let r = match self.parse_and()? {
                AnyExpr::Bool(b) => b,
                AnyExpr::Int(_) => {
                    return Err(ParseError::ExpectedBool {
                        line: rline,
                        col: rcol,
                    })
                }
            };
            lhs = AnyExpr::Bool(BoolExpr::Or(Box::new(l), Box::new(r)));
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<AnyExpr, ParseError> {
        let mut lhs = self.parse_not()?;
        while self.peek().0 == Tok::AndAnd {
            let (_, line, col) = self.next();
            let l = match lhs {
                AnyExpr::Bool(b) => b,
                AnyExpr::Int(_) => return Err(ParseError::ExpectedBool { line, col }),
            };
            let (_, rline, rcol) = self.peek().clone();
            let r = match self.parse_not()? {
                AnyExpr::Bool(b) => b,
                AnyExpr::Int(_) => {
                    return Err(ParseError::ExpectedBool {
                        line: rline,
                        col: rcol,
                    })
                }
            };
            lhs = AnyExpr::Bool(BoolExpr::And(Box::new(l), Box::new(r)));
        }
        Ok(lhs)
    }

    fn parse_not(&mut self) -> Result<AnyExpr, ParseError> {
        if self.peek().0 == Tok::Bang {
            let (_, line, col) = self.next();
            let inner = match self.parse_not()? {
                AnyExpr::Bool(b) => b,
                AnyExpr::Int(_) => return Err(ParseError::ExpectedBool { line, col }),
            };
            return Ok(AnyExpr::Bool(BoolExpr::Not(Box::new(inner))));
        }
        self.parse_cmp()
    }

    // cmp := add (relop add)?
    fn parse_cmp(&mut self) -> Result<AnyExpr, ParseError> {
        let lhs = self.parse_add()?;
        let op = match self.peek().0 {
            Tok::Lt => Some(CmpOp::Lt),
            Tok::Gt => Some(CmpOp::Gt),
            Tok::Le => Some(CmpOp::Le),
            Tok::Ge => Some(CmpOp::Ge),
            Tok::EqEq => Some(CmpOp::Eq),
            Tok::Ne => Some(CmpOp::Ne),
            _ => None,
        };
        let Some(op) = op else { return Ok(lhs) };
        let (_, line, col) = self.next();
        let l = match lhs {
            AnyExpr::Int(e) => e,
            AnyExpr::Bool(_) => return Err(ParseError::ExpectedInt { line, col }),
        };
        let (_, rline, rcol) = self.peek().clone();
        let r = match self.parse_add()? {
            AnyExpr::Int(e) => e,
            AnyExpr::Bool(_) => {
                return Err(ParseError::ExpectedInt {
                    line: rline,
                    col: rcol,
                })
            }
        };
        Ok(AnyExpr::Bool(BoolExpr::Cmp(op, l, r)))
    }

    fn parse_add(&mut self) -> Result<AnyExpr, ParseError> {
        let mut lhs = self.parse_mul()?;
        loop {
            let op = match self.peek().0 {
                Tok::Plus => IntBinOp::Add,
                Tok::Minus => IntBinOp::Sub,
                _ => break,
            };
            let (_, line, col) = self.next();
            let l = match lhs {
                AnyExpr::Int(e) => e,
                AnyExpr::Bool(_) => return Err(ParseError::ExpectedInt { line, col }),
            };
            let (_, rline, rcol) = self.peek().clone();
            let r = match self.parse_mul()? {
                AnyExpr::Int(e) => e,
                AnyExpr::Bool(_) => {
                    return Err(ParseError::ExpectedInt {
                        line: rline,
                        col: rcol,
                    })
                }
            };
            lhs = AnyExpr::Int(IntExpr::Bin(op, Box::new(l), Box::new(r)));
        }
        Ok(lhs)
    }

    fn parse_mul(&mut self) -> Result<AnyExpr, ParseError> {
        let mut lhs = self.parse_primary()?;
        loop {
            let op = match self.peek().0 {
                Tok::Star => IntBinOp::Mul,
                Tok::Slash => IntBinOp::Div,
                _ => break,
            };
            let (_, line, col) = self.next();
            let l = match lhs {
                AnyExpr::Int(e) => e,
                AnyExpr::Bool(_) => return Err(ParseError::ExpectedInt { line, col }),
            };
            let (_, rline, rcol) = self.peek().clone();
            let r = match self.parse_primary()? {
                AnyExpr::Int(e) => e,
                AnyExpr::Bool(_) => {
                    return Err(ParseError::ExpectedInt {
                        line: rline,
                        col: rcol,
                    })
                }
            };
            lhs = AnyExpr::Int(IntExpr::Bin(op, Box::new(l), Box::new(r)));
        }
        Ok(lhs)
    }

    fn parse_primary(&mut self) -> Result<AnyExpr, ParseError> {
        let (tok, line, col) = self.next();
        match tok {
            Tok::Int(v) => Ok(AnyExpr::Int(IntExpr::Lit(v))),
            Tok::Minus => {
                let (tok2, l2, c2) = self.next();
                match tok2 {
                    Tok::Int(v) => Ok(AnyExpr::Int(IntExpr::Lit(-v))),
                    other => Err(ParseError::Unexpected {
                        line: l2,
                        col: c2,
                        expected: "integer literal after `-`".to_string(),
                        found: other.describe(),
                    }),
                }
            }
            Tok::Ident(name) => Ok(AnyExpr::Int(IntExpr::Var(name))),
            Tok::KwTrue => Ok(AnyExpr::Bool(BoolExpr::Lit(true))),
            Tok::KwFalse => Ok(AnyExpr::Bool(BoolExpr::Lit(false))),
            Tok::LParen => {
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(ParseError::Unexpected {
                line,
                col,
                expected: "expression".to_string(),
                found: other.describe(),
            }),
        }
    }
}

/// Parse a `.mini` source file into a validated [`Program`].
pub fn parse(source: &str) -> Result<Program, ParseError> {
    let toks = Lexer::new(source).tokenize()?;
    let mut p = Parser { toks, pos: 0 };
    let (name, params, body) = p.parse_program()?;
    let mut seen = std::collections::HashSet::new();
    for param in &params {
        if !seen.insert(param.clone()) {
            return Err(ParseError::DuplicateParam {
                name: param.clone(),
            });
        }
    }
    let program = Program::new(name, params, body);
    check_scopes(&program)?;
    Ok(program)
}

/// Parse a standalone boolean expression (patch syntax).
pub fn parse_bool_expr(source: &str) -> Result<BoolExpr, ParseError> {
    let toks = Lexer::new(source).tokenize()?;
    let mut p = Parser { toks, pos: 0 };
    let expr = match p.parse_expr()? {
        AnyExpr::Bool(b) => b,
        AnyExpr::Int(_) => return Err(ParseError::ExpectedBool { line: 1, col: 1 }),
    };
    p.expect(Tok::Eof)?;
    Ok(expr)
}

/// Every variable read must be a parameter or assigned by an earlier
/// statement in source order.
fn check_scopes(p: &Program) -> Result<(), ParseError> {
    fn walk(
        stmts: &[Stmt],
        declared: &mut Vec<String>,
    ) -> Result<(), ParseError> {
        for stmt in stmts {
            match stmt {
                Stmt::Assign { name, value, .. } => {
                    check_int(value, declared)?;
                    if !declared.contains(name) {
                        declared.push(name.clone());
                    }
                }
                Stmt::If {
                    cond,
                    then_body,
                    else_body,
                    ..
                } => {
                    check_bool(cond, declared)?;
                    walk(then_body, declared)?;
                    if let Some(e) = else_body {
                        walk(e, declared)?;
                    }
                }
                Stmt::While { cond, body, .. } => {
                    check_bool(cond, declared)?;
                    walk(body, declared)?;
                }
                Stmt::Return { value, .. } => check_int(value, declared)?,
            }
        }
        Ok(())
    }

    fn check_int(e: &IntExpr, declared: &[String]) -> Result<(), ParseError> {
        let mut bad = None;
        e.for_each_var(&mut |v| {
            if bad.is_none() && !declared.iter().any(|d| d == v) {
                bad = Some(v.to_string());
            }
        });
        match bad {
            Some(name) => Err(ParseError::UndeclaredVariable {
                line: 0,
                col: 0,
                name,
            }),
            None => Ok(()),
        }
    }

    fn check_bool(e: &BoolExpr, declared: &[String]) -> Result<(), ParseError> {
        let mut bad = None;
        e.for_each_var(&mut |v| {
            if bad.is_none() && !declared.iter().any(|d| d == v) {
                bad = Some(v.to_string());
            }
        });
        match bad {
            Some(name) => Err(ParseError::UndeclaredVariable {
                line: 0,
                col: 0,
                name,
            }),
            None => Ok(()),
        }
    }

    let mut declared = p.params.clone();
    walk(&p.body, &mut declared)
}

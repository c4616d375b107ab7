//! Text rendering of blocks, for diffs and CLI output.

use std::fmt::Write;

use super::ast::{BoolExpr, CritterProgram, Expr, Input, Matcher, Stmt, Target, TestProgram};
use super::path::Node;

pub fn expr(e: &Expr) -> String {
    match e {
        Expr::Int { value } => value.to_string(),
        Expr::Color { value } => value.to_string(),
        Expr::Attr { attr } => attr.name().to_string(),
        Expr::Input { input: Input::X } => "x".into(),
        Expr::Input { input: Input::Y } => "y".into(),
        Expr::Var { name } => name.clone(),
        Expr::BinOp { op, lhs, rhs } => format!("({} {} {})", expr(lhs), op.symbol(), expr(rhs)),
    }
}

pub fn cond(b: &BoolExpr) -> String {
    match b {
        BoolExpr::Compare { lhs, op, rhs } => format!("{} {} {}", expr(lhs), op.symbol(), expr(rhs)),
        BoolExpr::Predicate { expr: e, predicate } => format!("{} is {predicate:?}", expr(e)).to_lowercase(),
        BoolExpr::TextureIs { texture } => format!("texture == {texture}"),
        BoolExpr::And { left, right } => format!("({} and {})", cond(left), cond(right)),
        BoolExpr::Or { left, right } => format!("({} or {})", cond(left), cond(right)),
        BoolExpr::Not { operand } => format!("not {}", cond(operand)),
    }
}

fn block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for s in stmts {
        stmt_into(out, s, depth);
    }
}

fn stmt_into(out: &mut String, s: &Stmt, depth: usize) {
    let pad = "  ".repeat(depth);
    match s {
        Stmt::Assign { target, value } => {
            let name = match target {
                Target::Attr { attr } => attr.name(),
                Target::Var { name } => name,
            };
            let _ = writeln!(out, "{pad}{name} := {}", expr(value));
        }
        Stmt::If {
            cond: c,
            then,
            otherwise,
        } => {
            let _ = writeln!(out, "{pad}if {} {{", cond(c));
            block(out, then, depth + 1);
            if !otherwise.is_empty() {
                let _ = writeln!(out, "{pad}}} else {{");
                block(out, otherwise, depth + 1);
            }
            let _ = writeln!(out, "{pad}}}");
        }
    }
}

pub fn stmt(s: &Stmt) -> String {
    let mut out = String::new();
    stmt_into(&mut out, s, 0);
    out.trim_end().to_string()
}

pub fn node(n: &Node) -> String {
    match n {
        Node::Block(b) => {
            let mut out = String::new();
            block(&mut out, b, 0);
            out.trim_end().to_string()
        }
        Node::AssertList(a) => a.iter().map(|a| node(&Node::Assert(a.clone()))).collect::<Vec<_>>().join("\n"),
        Node::Stmt(s) => stmt(s),
        Node::Expr(e) => expr(e),
        Node::Bool(b) => cond(b),
        Node::Assert(a) => match &a.matcher {
            Matcher::Equals { value } => format!("assert {} == {}", a.property.name(), expr(value)),
            Matcher::Predicate { predicate } => format!("assert {} is {predicate:?}", a.property.name()).to_lowercase(),
        },
    }
}

pub fn critter(p: &CritterProgram) -> String {
    let mut out = String::from("init:\n");
    block(&mut out, &p.init, 1);
    out.push_str("loop:\n");
    block(&mut out, &p.body, 1);
    out
}

pub fn test(t: &TestProgram) -> String {
    let mut out = String::new();
    block(&mut out, &t.setup, 0);
    for a in &t.asserts {
        out.push_str(&node(&Node::Assert(a.clone())));
        out.push('\n');
    }
    out
}

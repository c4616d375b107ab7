use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{Assert, Attr, BoolExpr, CritterProgram, Expr, Matcher, Stmt, Target, TestProgram};
use super::path::{NodePath, Section};

/// Static types of the block language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ty {
    Int,
    Color,
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ty::Int => "integer",
            Ty::Color => "color",
        })
    }
}

impl Attr {
    pub fn ty(self) -> Ty {
        match self {
            Attr::ShirtColor | Attr::HairColor => Ty::Color,
            Attr::Size => Ty::Int,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeErrorCode {
    TypeMismatch,
    PredicateOnColor,
    OperandNotInteger,
    OrderedCompareOnColor,
    UnknownVariable,
    IfInInit,
    InputInInit,
    AttributeWriteInSetup,
    NoAsserts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeError {
    pub path: NodePath,
    pub code: TypeErrorCode,
    pub detail: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {}: {}", self.code, self.path, self.detail)
    }
}

/// Programs the checker understands.
pub trait Typecheck {
    fn typecheck(&self) -> Vec<TypeError>;
    /// Inferred variable types, used to seed variables with defaults.
    fn variable_types(&self) -> BTreeMap<String, Ty>;
}

pub fn typecheck<P: Typecheck + ?Sized>(program: &P) -> Vec<TypeError> {
    program.typecheck()
}

impl Typecheck for CritterProgram {
    fn typecheck(&self) -> Vec<TypeError> {
        let env = infer_vars(&[&self.init, &self.body]);
        let mut cx = Checker {
            env: &env,
            errors: Vec::new(),
            no_input: false,
            no_attr_writes: false,
        };
        cx.no_input = true;
        for (i, stmt) in self.init.iter().enumerate() {
            let path = NodePath::new(Section::Init, [i]);
            if matches!(stmt, Stmt::If { .. }) {
                cx.error(path.clone(), TypeErrorCode::IfInInit, "init may only contain assignments");
            }
            cx.stmt(stmt, &path);
        }
        cx.no_input = false;
        cx.block(&self.body, &NodePath::root(Section::Loop));
        cx.errors
    }

    fn variable_types(&self) -> BTreeMap<String, Ty> {
        infer_vars(&[&self.init, &self.body])
    }
}

impl Typecheck for TestProgram {
    fn typecheck(&self) -> Vec<TypeError> {
        let env = infer_vars(&[&self.setup]);
        let mut cx = Checker {
            env: &env,
            errors: Vec::new(),
            no_input: false,
            no_attr_writes: true,
        };
        cx.block(&self.setup, &NodePath::root(Section::Setup));
        if self.asserts.is_empty() {
            cx.error(
                NodePath::root(Section::Asserts),
                TypeErrorCode::NoAsserts,
                "a test needs at least one assert",
            );
        }
        for (i, a) in self.asserts.iter().enumerate() {
            cx.assert(a, &NodePath::new(Section::Asserts, [i]));
        }
        cx.errors
    }

    fn variable_types(&self) -> BTreeMap<String, Ty> {
        infer_vars(&[&self.setup])
    }
}

/// Variable types come from their assignments. Iterates to a fixed point so
/// `a := b` picks up `b`'s type regardless of statement order.
fn infer_vars(blocks: &[&[Stmt]]) -> BTreeMap<String, Ty> {
    fn collect<'a>(stmts: &'a [Stmt], out: &mut Vec<(&'a str, &'a Expr)>) {
        for s in stmts {
            match s {
                Stmt::Assign {
                    target: Target::Var { name },
                    value,
                } => out.push((name, value)),
                Stmt::Assign { .. } => {}
                Stmt::If { then, otherwise, .. } => {
                    collect(then, out);
                    collect(otherwise, out);
                }
            }
        }
    }

    let mut assigns = Vec::new();
    for b in blocks {
        collect(b, &mut assigns);
    }
    let mut env = BTreeMap::new();
    loop {
        let mut changed = false;
        for (name, value) in &assigns {
            if env.contains_key(*name) {
                continue;
            }
            if let Some(ty) = expr_type(value, &env) {
                env.insert(name.to_string(), ty);
                changed = true;
            }
        }
        if !changed {
            return env;
        }
    }
}

fn expr_type(e: &Expr, env: &BTreeMap<String, Ty>) -> Option<Ty> {
    match e {
        Expr::Int { .. } | Expr::Input { .. } | Expr::BinOp { .. } => Some(Ty::Int),
        Expr::Color { .. } => Some(Ty::Color),
        Expr::Attr { attr } => Some(attr.ty()),
        Expr::Var { name } => env.get(name).copied(),
    }
}

struct Checker<'e> {
    env: &'e BTreeMap<String, Ty>,
    errors: Vec<TypeError>,
    no_input: bool,
    no_attr_writes: bool,
}

impl Checker<'_> {
    fn error(&mut self, path: NodePath, code: TypeErrorCode, detail: impl Into<String>) {
        self.errors.push(TypeError {
            path,
            code,
            detail: detail.into(),
        });
    }

    fn block(&mut self, stmts: &[Stmt], path: &NodePath) {
        for (i, s) in stmts.iter().enumerate() {
            self.stmt(s, &path.child(i));
        }
    }

    fn stmt(&mut self, stmt: &Stmt, path: &NodePath) {
        match stmt {
            Stmt::Assign { target, value } => {
                let value_ty = self.expr(value, &path.child(0));
                let target_ty = match target {
                    Target::Attr { attr } => {
                        if self.no_attr_writes {
                            self.error(
                                path.clone(),
                                TypeErrorCode::AttributeWriteInSetup,
                                format!("test setup cannot write {}", attr.name()),
                            );
                        }
                        Some(attr.ty())
                    }
                    Target::Var { name } => self.env.get(name).copied(),
                };
                if let (Some(t), Some(v)) = (target_ty, value_ty) {
                    if t != v {
                        self.error(
                            path.clone(),
                            TypeErrorCode::TypeMismatch,
                            format!("cannot assign {v} to {t} target"),
                        );
                    }
                }
            }
            Stmt::If {
                cond,
                then,
                otherwise,
            } => {
                self.cond(cond, &path.child(0));
                self.block(then, &path.child(1));
                self.block(otherwise, &path.child(2));
            }
        }
    }

    fn expr(&mut self, e: &Expr, path: &NodePath) -> Option<Ty> {
        match e {
            Expr::Input { input } if self.no_input => {
                self.error(
                    path.clone(),
                    TypeErrorCode::InputInInit,
                    format!("init runs before any tile is entered; cannot read {input:?}"),
                );
                Some(Ty::Int)
            }
            Expr::Var { name } if !self.env.contains_key(name) => {
                self.error(
                    path.clone(),
                    TypeErrorCode::UnknownVariable,
                    format!("variable `{name}` is never assigned"),
                );
                None
            }
            Expr::BinOp { lhs, rhs, .. } => {
                for (i, operand) in [lhs, rhs].into_iter().enumerate() {
                    let p = path.child(i);
                    if self.expr(operand, &p) == Some(Ty::Color) {
                        self.error(p, TypeErrorCode::OperandNotInteger, "arithmetic needs integers");
                    }
                }
                Some(Ty::Int)
            }
            _ => expr_type(e, self.env),
        }
    }

    fn cond(&mut self, b: &BoolExpr, path: &NodePath) {
        match b {
            BoolExpr::Compare { lhs, op, rhs } => {
                let l = self.expr(lhs, &path.child(0));
                let r = self.expr(rhs, &path.child(1));
                let (Some(l), Some(r)) = (l, r) else {
                    return;
                };
                if op.is_equality() {
                    if l != r {
                        self.error(
                            path.clone(),
                            TypeErrorCode::TypeMismatch,
                            format!("cannot compare {l} with {r}"),
                        );
                    }
                } else if l == Ty::Color || r == Ty::Color {
                    self.error(
                        path.clone(),
                        TypeErrorCode::OrderedCompareOnColor,
                        format!("`{}` needs integer operands", op.symbol()),
                    );
                }
            }
            BoolExpr::Predicate { expr, predicate } => {
                if self.expr(expr, &path.child(0)) == Some(Ty::Color) {
                    self.error(
                        path.clone(),
                        TypeErrorCode::PredicateOnColor,
                        format!("{predicate:?} needs an integer"),
                    );
                }
            }
            BoolExpr::TextureIs { .. } => {}
            BoolExpr::And { left, right } | BoolExpr::Or { left, right } => {
                self.cond(left, &path.child(0));
                self.cond(right, &path.child(1));
            }
            BoolExpr::Not { operand } => self.cond(operand, &path.child(0)),
        }
    }

    fn assert(&mut self, a: &Assert, path: &NodePath) {
        match &a.matcher {
            Matcher::Equals { value } => {
                if let Some(ty) = self.expr(value, &path.child(0)) {
                    if ty != a.property.ty() {
                        self.error(
                            path.clone(),
                            TypeErrorCode::TypeMismatch,
                            format!("{} is {}, expected value is {ty}", a.property.name(), a.property.ty()),
                        );
                    }
                }
            }
            Matcher::Predicate { predicate } => {
                if a.property.ty() == Ty::Color {
                    self.error(
                        path.clone(),
                        TypeErrorCode::PredicateOnColor,
                        format!("{predicate:?} cannot be checked on {}", a.property.name()),
                    );
                }
            }
        }
    }
}

//! Tree-walking evaluation of critter and test programs.
//!
//! Semantics are total: integers saturate at ±[`INT_LIMIT`], division
//! truncates toward zero and `n / 0 = 0`. Ill-typed fragments (which the
//! checker rejects) evaluate to harmless defaults rather than panicking.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ast::{
    ArithOp, Attr, BoolExpr, Color, CmpOp, CritterProgram, CritterState, Expr, Input, IntPredicate, Matcher,
    Stmt, Target, TestProgram, TileInput, Value,
};
use super::path::{NodePath, Section};
use super::typecheck::{Ty, Typecheck};

pub const INT_LIMIT: i64 = 1_000_000;

fn saturate(n: i64) -> i64 {
    n.clamp(-INT_LIMIT, INT_LIMIT)
}

fn default_value(ty: Ty) -> Value {
    match ty {
        Ty::Int => Value::Int(0),
        Ty::Color => Value::Color(Color::Red),
    }
}

fn seed_vars(types: BTreeMap<String, Ty>) -> BTreeMap<String, Value> {
    types.into_iter().map(|(k, t)| (k, default_value(t))).collect()
}

/// Default attributes, every program variable at its type's default, then
/// the init section in order.
pub fn init_state(program: &CritterProgram) -> CritterState {
    let mut state = CritterState {
        vars: seed_vars(program.variable_types()),
        ..CritterState::default()
    };
    Machine {
        state: &mut state,
        input: None,
        attr_writes: true,
    }
    .block(&program.init);
    state
}

/// Runs the loop section once for the tile described by `input`.
pub fn step_loop(program: &CritterProgram, state: &CritterState, input: &TileInput) -> CritterState {
    let mut next = state.clone();
    Machine {
        state: &mut next,
        input: Some(input),
        attr_writes: true,
    }
    .block(&program.body);
    next
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TestVerdict {
    Pass,
    Fail { assert: NodePath },
}

impl TestVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, TestVerdict::Pass)
    }
}

/// Evaluates a mine's test against a critter. Setup runs in a fresh variable
/// scope on a scratch copy; the critter's own state is only read.
pub fn eval_test(test: &TestProgram, state: &CritterState, input: &TileInput) -> TestVerdict {
    let mut scratch = CritterState {
        vars: seed_vars(test.variable_types()),
        ..state.clone()
    };
    let mut m = Machine {
        state: &mut scratch,
        input: Some(input),
        attr_writes: false,
    };
    m.block(&test.setup);
    for (i, a) in test.asserts.iter().enumerate() {
        let actual = m.state.attr(a.property);
        let ok = match &a.matcher {
            Matcher::Equals { value } => m.eval(value) == actual,
            Matcher::Predicate { predicate } => match actual {
                Value::Int(n) => holds(*predicate, n),
                Value::Color(_) => false,
            },
        };
        if !ok {
            return TestVerdict::Fail {
                assert: NodePath::new(Section::Asserts, [i]),
            };
        }
    }
    TestVerdict::Pass
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2i64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn holds(predicate: IntPredicate, n: i64) -> bool {
    match predicate {
        IntPredicate::Even => n % 2 == 0,
        IntPredicate::Odd => n % 2 != 0,
        IntPredicate::Negative => n < 0,
        IntPredicate::Positive => n > 0,
        IntPredicate::Prime => is_prime(n),
    }
}

struct Machine<'s, 'i> {
    state: &'s mut CritterState,
    input: Option<&'i TileInput>,
    attr_writes: bool,
}

impl Machine<'_, '_> {
    fn block(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, stmt: &Stmt) {
        match stmt {
            Stmt::Assign { target, value } => {
                let v = self.eval(value);
                match (target, v) {
                    (Target::Attr { .. }, _) if !self.attr_writes => {}
                    (Target::Attr { attr: Attr::ShirtColor }, Value::Color(c)) => self.state.shirt_color = c,
                    (Target::Attr { attr: Attr::HairColor }, Value::Color(c)) => self.state.hair_color = c,
                    (Target::Attr { attr: Attr::Size }, Value::Int(n)) => self.state.size = n,
                    (Target::Attr { .. }, _) => {}
                    (Target::Var { name }, v) => {
                        self.state.vars.insert(name.clone(), v);
                    }
                }
            }
            Stmt::If {
                cond,
                then,
                otherwise,
            } => {
                if self.test(cond) {
                    self.block(then);
                } else {
                    self.block(otherwise);
                }
            }
        }
    }

    fn eval(&self, e: &Expr) -> Value {
        match e {
            Expr::Int { value } => Value::Int(saturate(*value)),
            Expr::Color { value } => Value::Color(*value),
            Expr::Attr { attr } => self.state.attr(*attr),
            Expr::Input { input } => Value::Int(match (self.input, input) {
                (Some(t), Input::X) => t.x,
                (Some(t), Input::Y) => t.y,
                (None, _) => 0,
            }),
            Expr::Var { name } => self.state.vars.get(name).copied().unwrap_or(Value::Int(0)),
            Expr::BinOp { op, lhs, rhs } => {
                let (a, b) = (self.int(lhs), self.int(rhs));
                // Operands are within ±1e6, so none of these overflow i64.
                let r = match op {
                    ArithOp::Add => a + b,
                    ArithOp::Sub => a - b,
                    ArithOp::Mul => a * b,
                    ArithOp::Div if b == 0 => 0,
                    ArithOp::Div => a / b,
                };
                Value::Int(saturate(r))
            }
        }
    }

    fn int(&self, e: &Expr) -> i64 {
        match self.eval(e) {
            Value::Int(n) => saturate(n),
            Value::Color(_) => 0,
        }
    }

    fn test(&self, b: &BoolExpr) -> bool {
        match b {
            BoolExpr::Compare { lhs, op, rhs } => {
                let (l, r) = (self.eval(lhs), self.eval(rhs));
                match (op, l, r) {
                    (CmpOp::Eq, l, r) => l == r,
                    (CmpOp::Ne, l, r) => l != r,
                    (op, Value::Int(a), Value::Int(b)) => match op {
                        CmpOp::Lt => a < b,
                        CmpOp::Le => a <= b,
                        CmpOp::Gt => a > b,
                        _ => a >= b,
                    },
                    _ => false,
                }
            }
            BoolExpr::Predicate { expr, predicate } => match self.eval(expr) {
                Value::Int(n) => holds(*predicate, n),
                Value::Color(_) => false,
            },
            BoolExpr::TextureIs { texture } => self.input.is_some_and(|t| t.texture == *texture),
            BoolExpr::And { left, right } => self.test(left) && self.test(right),
            BoolExpr::Or { left, right } => self.test(left) || self.test(right),
            BoolExpr::Not { operand } => !self.test(operand),
        }
    }
}

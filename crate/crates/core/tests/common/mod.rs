//! Shared generators and helpers for the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use code_critters::blocklang::*;
use code_critters::board::Pos;
use code_critters::engine::Mine;
use code_critters::levels::{fixture, Level};
use code_critters::mutation::Mutant;
use proptest::prelude::*;
use proptest::strategy::Union;

pub fn color() -> impl Strategy<Value = Color> {
    proptest::sample::select(Color::ALL.to_vec())
}

pub fn texture() -> impl Strategy<Value = Texture> {
    proptest::sample::select(Texture::ALL.to_vec())
}

/// Integer expressions. `var` names the integer variable in scope; `input`
/// allows tile coordinates.
pub fn int_expr(input: bool, var: &'static str) -> BoxedStrategy<Expr> {
    let mut leaves: Vec<BoxedStrategy<Expr>> = vec![
        (-30i64..30).prop_map(Expr::int).boxed(),
        Just(Expr::attr(Attr::Size)).boxed(),
        Just(Expr::var(var)).boxed(),
    ];
    if input {
        leaves.push(prop_oneof![Just(Expr::input(Input::X)), Just(Expr::input(Input::Y))].boxed());
    }
    Union::new(leaves)
        .prop_recursive(3, 12, 2, |inner| {
            (proptest::sample::select(ArithOp::ALL.to_vec()), inner.clone(), inner)
                .prop_map(|(op, l, r)| Expr::binop(op, l, r))
        })
        .boxed()
}

pub fn color_expr(var: &'static str) -> BoxedStrategy<Expr> {
    prop_oneof![
        color().prop_map(Expr::color),
        Just(Expr::attr(Attr::ShirtColor)),
        Just(Expr::attr(Attr::HairColor)),
        Just(Expr::var(var)),
    ]
    .boxed()
}

pub fn cond(int_var: &'static str, color_var: &'static str) -> BoxedStrategy<BoolExpr> {
    let leaf = prop_oneof![
        (int_expr(true, int_var), proptest::sample::select(CmpOp::ALL.to_vec()), int_expr(true, int_var))
            .prop_map(|(l, op, r)| BoolExpr::compare(l, op, r)),
        (color_expr(color_var), prop_oneof![Just(CmpOp::Eq), Just(CmpOp::Ne)], color_expr(color_var))
            .prop_map(|(l, op, r)| BoolExpr::compare(l, op, r)),
        (int_expr(true, int_var), proptest::sample::select(IntPredicate::ALL.to_vec()))
            .prop_map(|(e, p)| BoolExpr::predicate(e, p)),
        texture().prop_map(BoolExpr::texture_is),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| BoolExpr::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| BoolExpr::or(l, r)),
            inner.prop_map(BoolExpr::not),
        ]
    })
    .boxed()
}

fn loop_assign() -> BoxedStrategy<Stmt> {
    prop_oneof![
        color_expr("c").prop_map(|e| Stmt::set_attr(Attr::ShirtColor, e)),
        color_expr("c").prop_map(|e| Stmt::set_attr(Attr::HairColor, e)),
        int_expr(true, "n").prop_map(|e| Stmt::set_attr(Attr::Size, e)),
        int_expr(true, "n").prop_map(|e| Stmt::set_var("n", e)),
        color_expr("c").prop_map(|e| Stmt::set_var("c", e)),
    ]
    .boxed()
}

fn loop_stmt() -> BoxedStrategy<Stmt> {
    loop_assign()
        .prop_recursive(2, 10, 3, |inner| {
            (
                cond("n", "c"),
                proptest::collection::vec(inner.clone(), 0..3),
                proptest::collection::vec(inner, 0..3),
            )
                .prop_map(|(c, t, e)| Stmt::if_else(c, t, e))
        })
        .boxed()
}

fn init_stmt() -> BoxedStrategy<Stmt> {
    prop_oneof![
        color_expr("c").prop_map(|e| Stmt::set_attr(Attr::ShirtColor, e)),
        color_expr("c").prop_map(|e| Stmt::set_attr(Attr::HairColor, e)),
        int_expr(false, "n").prop_map(|e| Stmt::set_attr(Attr::Size, e)),
        int_expr(false, "n").prop_map(|e| Stmt::set_var("n", e)),
    ]
    .boxed()
}

/// Well-typed critter programs.
pub fn program() -> impl Strategy<Value = CritterProgram> {
    (
        -10i64..10,
        color(),
        proptest::collection::vec(init_stmt(), 0..3),
        proptest::collection::vec(loop_stmt(), 0..4),
    )
        .prop_map(|(n, c, rest, body)| {
            let mut init = vec![Stmt::set_var("n", Expr::int(n)), Stmt::set_var("c", Expr::color(c))];
            init.extend(rest);
            CritterProgram::new(init, body)
        })
}

fn setup_stmt() -> BoxedStrategy<Stmt> {
    let assign = prop_oneof![
        int_expr(true, "t").prop_map(|e| Stmt::set_var("t", e)),
        color_expr("k").prop_map(|e| Stmt::set_var("k", e)),
    ];
    assign
        .prop_recursive(1, 4, 2, |inner| {
            (cond("t", "k"), proptest::collection::vec(inner, 0..2)).prop_map(|(c, t)| Stmt::if_then(c, t))
        })
        .boxed()
}

fn assert_block() -> BoxedStrategy<Assert> {
    prop_oneof![
        color_expr("k").prop_map(|e| Assert::equals(Attr::ShirtColor, e)),
        color_expr("k").prop_map(|e| Assert::equals(Attr::HairColor, e)),
        int_expr(true, "t").prop_map(|e| Assert::equals(Attr::Size, e)),
        proptest::sample::select(IntPredicate::ALL.to_vec()).prop_map(|p| Assert::satisfies(Attr::Size, p)),
    ]
    .boxed()
}

/// Well-typed mine test programs.
pub fn test_program() -> impl Strategy<Value = TestProgram> {
    (
        -5i64..5,
        color(),
        proptest::collection::vec(setup_stmt(), 0..3),
        proptest::collection::vec(assert_block(), 1..4),
    )
        .prop_map(|(t, k, rest, asserts)| {
            let mut setup = vec![Stmt::set_var("t", Expr::int(t)), Stmt::set_var("k", Expr::color(k))];
            setup.extend(rest);
            TestProgram::new(setup, asserts)
        })
}

pub fn state() -> impl Strategy<Value = CritterState> {
    (color(), color(), -1000i64..1000, -50i64..50, color()).prop_map(|(s, h, size, n, c)| {
        let mut st = CritterState {
            shirt_color: s,
            hair_color: h,
            size,
            ..CritterState::default()
        };
        st.vars.insert("n".into(), Value::Int(n));
        st.vars.insert("c".into(), Value::Color(c));
        st
    })
}

pub fn tile_input() -> impl Strategy<Value = TileInput> {
    (texture(), 1i64..=16, 1i64..=16).prop_map(|(texture, x, y)| TileInput { texture, x, y })
}

pub fn tutorial() -> Level {
    fixture("tutorial-shirt").unwrap()
}

pub fn beginner() -> Level {
    fixture("beginner-fork").unwrap()
}

pub fn advanced() -> Level {
    fixture("advanced-coverage").unwrap()
}

pub fn mutants(level: &Level) -> Vec<Mutant> {
    level.build_mutants().unwrap()
}

pub fn shirt_mine(x: u32, y: u32, c: Color) -> Mine {
    Mine {
        position: Pos::new(x, y),
        test: TestProgram::asserting(vec![Assert::equals(Attr::ShirtColor, Expr::color(c))]),
    }
}

/// The two mines from the shirt walkthrough: one on grass, one on dirt.
pub fn prescribed_mines() -> Vec<Mine> {
    code_critters::blocklang::from_json(include_str!("../../fixtures/mines/tutorial-shirt.json")).unwrap()
}

pub fn shirt_cut() -> Arc<CritterProgram> {
    Arc::new(tutorial().cut)
}

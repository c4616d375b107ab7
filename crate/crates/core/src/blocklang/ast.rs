//! AST for critter programs and mine test programs.
//!
//! Every node serializes to a JSON object carrying a `kind` discriminator.
//! The same documents are used by level files, the HTTP API and the FFI
//! layer, so the serde attributes here define the wire format.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Shirt and hair colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Color {
    Red,
    Blue,
    Green,
    Yellow,
    Purple,
    Brown,
}

impl Color {
    pub const ALL: [Color; 6] = [
        Color::Red,
        Color::Blue,
        Color::Green,
        Color::Yellow,
        Color::Purple,
        Color::Brown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "RED",
            Color::Blue => "BLUE",
            Color::Green => "GREEN",
            Color::Yellow => "YELLOW",
            Color::Purple => "PURPLE",
            Color::Brown => "BROWN",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tile textures. Only grass, dirt and ice can be walked on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Texture {
    Grass,
    Dirt,
    Water,
    Ice,
    Wood,
}

impl Texture {
    pub const ALL: [Texture; 5] = [
        Texture::Grass,
        Texture::Dirt,
        Texture::Water,
        Texture::Ice,
        Texture::Wood,
    ];

    pub fn is_walkable(self) -> bool {
        matches!(self, Texture::Grass | Texture::Dirt | Texture::Ice)
    }

    /// One-letter code used in board row strings.
    pub fn code(self) -> char {
        match self {
            Texture::Grass => 'G',
            Texture::Dirt => 'D',
            Texture::Water => 'W',
            Texture::Ice => 'I',
            Texture::Wood => 'O',
        }
    }

    pub fn from_code(c: char) -> Option<Texture> {
        match c {
            'G' => Some(Texture::Grass),
            'D' => Some(Texture::Dirt),
            'W' => Some(Texture::Water),
            'I' => Some(Texture::Ice),
            'O' => Some(Texture::Wood),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Texture::Grass => "GRASS",
            Texture::Dirt => "DIRT",
            Texture::Water => "WATER",
            Texture::Ice => "ICE",
            Texture::Wood => "WOOD",
        }
    }
}

impl fmt::Display for Texture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Critter attributes readable by programs and checkable by asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attr {
    ShirtColor,
    HairColor,
    Size,
}

impl Attr {
    pub const ALL: [Attr; 3] = [Attr::ShirtColor, Attr::HairColor, Attr::Size];

    pub fn name(self) -> &'static str {
        match self {
            Attr::ShirtColor => "shirt_color",
            Attr::HairColor => "hair_color",
            Attr::Size => "size",
        }
    }
}

/// Coordinates of the tile currently being entered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Input {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArithOp {
    #[serde(rename = "+")]
    Add,
    #[serde(rename = "-")]
    Sub,
    #[serde(rename = "*")]
    Mul,
    #[serde(rename = "/")]
    Div,
}

impl ArithOp {
    pub const ALL: [ArithOp; 4] = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div];

    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];

    /// Only `==` and `!=` accept color operands.
    pub fn is_equality(self) -> bool {
        matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IntPredicate {
    Even,
    Odd,
    Negative,
    Positive,
    Prime,
}

impl IntPredicate {
    pub const ALL: [IntPredicate; 5] = [
        IntPredicate::Even,
        IntPredicate::Odd,
        IntPredicate::Negative,
        IntPredicate::Positive,
        IntPredicate::Prime,
    ];
}

/// A runtime value. Variables hold either kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Color(Color),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Expr {
    Int {
        value: i64,
    },
    Color {
        value: Color,
    },
    Attr {
        attr: Attr,
    },
    Input {
        input: Input,
    },
    Var {
        name: String,
    },
    #[serde(rename = "binop")]
    BinOp {
        op: ArithOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

impl Expr {
    pub fn int(value: i64) -> Expr {
        Expr::Int { value }
    }

    pub fn color(value: Color) -> Expr {
        Expr::Color { value }
    }

    pub fn attr(attr: Attr) -> Expr {
        Expr::Attr { attr }
    }

    pub fn input(input: Input) -> Expr {
        Expr::Input { input }
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var { name: name.into() }
    }

    pub fn binop(op: ArithOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::BinOp {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoolExpr {
    Compare {
        lhs: Expr,
        op: CmpOp,
        rhs: Expr,
    },
    Predicate {
        expr: Expr,
        predicate: IntPredicate,
    },
    TextureIs {
        texture: Texture,
    },
    And {
        left: Box<BoolExpr>,
        right: Box<BoolExpr>,
    },
    Or {
        left: Box<BoolExpr>,
        right: Box<BoolExpr>,
    },
    Not {
        operand: Box<BoolExpr>,
    },
}

impl BoolExpr {
    pub fn compare(lhs: Expr, op: CmpOp, rhs: Expr) -> BoolExpr {
        BoolExpr::Compare { lhs, op, rhs }
    }

    pub fn predicate(expr: Expr, predicate: IntPredicate) -> BoolExpr {
        BoolExpr::Predicate { expr, predicate }
    }

    pub fn texture_is(texture: Texture) -> BoolExpr {
        BoolExpr::TextureIs { texture }
    }

    pub fn and(left: BoolExpr, right: BoolExpr) -> BoolExpr {
        BoolExpr::And {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn or(left: BoolExpr, right: BoolExpr) -> BoolExpr {
        BoolExpr::Or {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(operand: BoolExpr) -> BoolExpr {
        BoolExpr::Not {
            operand: Box::new(operand),
        }
    }
}

/// Left-hand side of an assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Target {
    Attr { attr: Attr },
    Var { name: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Stmt {
    Assign {
        target: Target,
        value: Expr,
    },
    If {
        cond: BoolExpr,
        then: Vec<Stmt>,
        #[serde(rename = "else", default)]
        otherwise: Vec<Stmt>,
    },
}

impl Stmt {
    pub fn set_attr(attr: Attr, value: Expr) -> Stmt {
        Stmt::Assign {
            target: Target::Attr { attr },
            value,
        }
    }

    pub fn set_var(name: impl Into<String>, value: Expr) -> Stmt {
        Stmt::Assign {
            target: Target::Var { name: name.into() },
            value,
        }
    }

    pub fn if_then(cond: BoolExpr, then: Vec<Stmt>) -> Stmt {
        Stmt::If {
            cond,
            then,
            otherwise: Vec::new(),
        }
    }

    pub fn if_else(cond: BoolExpr, then: Vec<Stmt>, otherwise: Vec<Stmt>) -> Stmt {
        Stmt::If {
            cond,
            then,
            otherwise,
        }
    }
}

/// A critter's behavior: `init` runs once at spawn, `body` (the `loop`
/// section on the wire) runs once for every tile the critter enters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CritterProgram {
    pub init: Vec<Stmt>,
    #[serde(rename = "loop")]
    pub body: Vec<Stmt>,
}

impl CritterProgram {
    pub fn new(init: Vec<Stmt>, body: Vec<Stmt>) -> Self {
        CritterProgram { init, body }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Matcher {
    Equals { value: Expr },
    Predicate { predicate: IntPredicate },
}

/// The assert block: a property and what it should be.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "AssertDoc", into = "AssertDoc")]
pub struct Assert {
    pub property: Attr,
    pub matcher: Matcher,
}

// Wire shape of `Assert`, so it carries a `kind` tag like every other node.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum AssertDoc {
    Assert { property: Attr, matcher: Matcher },
}

impl From<AssertDoc> for Assert {
    fn from(doc: AssertDoc) -> Self {
        let AssertDoc::Assert { property, matcher } = doc;
        Assert { property, matcher }
    }
}

impl From<Assert> for AssertDoc {
    fn from(a: Assert) -> Self {
        AssertDoc::Assert {
            property: a.property,
            matcher: a.matcher,
        }
    }
}

impl Assert {
    pub fn equals(property: Attr, value: Expr) -> Assert {
        Assert {
            property,
            matcher: Matcher::Equals { value },
        }
    }

    pub fn satisfies(property: Attr, predicate: IntPredicate) -> Assert {
        Assert {
            property,
            matcher: Matcher::Predicate { predicate },
        }
    }
}

/// The program attached to a mine.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestProgram {
    #[serde(default)]
    pub setup: Vec<Stmt>,
    pub asserts: Vec<Assert>,
}

impl TestProgram {
    pub fn new(setup: Vec<Stmt>, asserts: Vec<Assert>) -> Self {
        TestProgram { setup, asserts }
    }

    pub fn asserting(asserts: Vec<Assert>) -> Self {
        TestProgram {
            setup: Vec::new(),
            asserts,
        }
    }
}

/// Mutable critter attributes plus the program's own variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CritterState {
    pub shirt_color: Color,
    pub hair_color: Color,
    pub size: i64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub vars: BTreeMap<String, Value>,
}

impl Default for CritterState {
    fn default() -> Self {
        CritterState {
            shirt_color: Color::Red,
            hair_color: Color::Brown,
            size: 1,
            vars: BTreeMap::new(),
        }
    }
}

impl CritterState {
    pub fn attr(&self, attr: Attr) -> Value {
        match attr {
            Attr::ShirtColor => Value::Color(self.shirt_color),
            Attr::HairColor => Value::Color(self.hair_color),
            Attr::Size => Value::Int(self.size),
        }
    }

    /// The part of the state a mine can observe.
    pub fn attributes(&self) -> Attributes {
        Attributes {
            shirt_color: self.shirt_color,
            hair_color: self.hair_color,
            size: self.size,
        }
    }
}

/// Snapshot of the observable attributes, used in event logs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Attributes {
    pub shirt_color: Color,
    pub hair_color: Color,
    pub size: i64,
}

/// What the loop body sees about the tile being entered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TileInput {
    pub texture: Texture,
    pub x: i64,
    pub y: i64,
}

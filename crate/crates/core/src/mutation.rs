//! Mutation operators over critter programs.
//!
//! Four classes of edits, distinguished by where they land:
//!
//! * `INITIALIZATION` - literals and operators inside the init section.
//! * `ASSIGNMENT` - literals and operators inside a loop assignment's value.
//! * `BRANCH` - removing an `if` or swapping its branches.
//! * `CONDITION` - anything at or below an `if` condition: negation, dropping
//!   one side of `and`/`or`, operator and constant replacement.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::blocklang::path::{all_paths, remove_in_place, replace_in_place};
use crate::blocklang::{
    describe, render, resolve, typecheck, ArithOp, BoolExpr, CmpOp, Color, CritterProgram, Expr, IntPredicate,
    Node, NodeRef, NodePath, PathError, Section, Stmt, Texture, TypeError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MutationClass {
    Initialization,
    Assignment,
    Branch,
    Condition,
}

impl MutationClass {
    pub const ALL: [MutationClass; 4] = [
        MutationClass::Initialization,
        MutationClass::Assignment,
        MutationClass::Branch,
        MutationClass::Condition,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Literal {
    Int(i64),
    Color(Color),
    Texture(Texture),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicOp {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "op", rename_all = "snake_case")]
pub enum Operator {
    Arith(ArithOp),
    Compare(CmpOp),
    Logic(LogicOp),
    Predicate(IntPredicate),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Edit {
    ReplaceValue { value: Literal },
    ReplaceOperator { op: Operator },
    RemoveNode,
    SwapBranches,
    NegateCondition,
    /// Replaces an `and`/`or` with the operand that is kept; `side` is the
    /// operand being dropped.
    DropConjunct { side: Side },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mutation {
    pub class: MutationClass,
    pub path: NodePath,
    pub edit: Edit,
}

impl Mutation {
    pub fn new(class: MutationClass, path: NodePath, edit: Edit) -> Self {
        Mutation { class, path, edit }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutationError {
    #[error("path {0} does not resolve in the base program")]
    PathInvalid(NodePath),
    #[error("edit cannot be applied at {path}: {reason}")]
    IncompatibleEdit { path: NodePath, reason: String },
    #[error("mutation produces an ill-typed program ({} errors)", .0.len())]
    ProducesIllTyped(Vec<TypeError>),
    #[error("a mutant needs at least one mutation")]
    EmptyMutationList,
    #[error("mutation paths {0} and {1} overlap")]
    ConflictingPaths(NodePath, NodePath),
    #[error("mutations leave the program unchanged")]
    NoEffect,
}

impl From<PathError> for MutationError {
    fn from(e: PathError) -> Self {
        match e {
            PathError::PathInvalid(p) => MutationError::PathInvalid(p),
            PathError::KindMismatch { path, expected, found } => MutationError::IncompatibleEdit {
                path,
                reason: format!("expected {expected}, found {found}"),
            },
        }
    }
}

/// Where a path sits in the program, as far as mutation classes care.
fn classify(base: &CritterProgram, path: &NodePath, edit: &Edit) -> Option<MutationClass> {
    let mut node = resolve(base, &NodePath::root(path.section)).ok()?;
    let mut in_assign = false;
    let mut in_cond = false;
    for &i in &path.indices {
        match node {
            NodeRef::Stmt(Stmt::Assign { .. }) => in_assign = true,
            NodeRef::Stmt(Stmt::If { .. }) if i == 0 => in_cond = true,
            _ => {}
        }
        node = node.child(i)?;
    }
    match (path.section, node, edit) {
        (Section::Init, NodeRef::Expr(_), _) if in_assign => Some(MutationClass::Initialization),
        (Section::Loop, NodeRef::Stmt(Stmt::If { .. }), Edit::RemoveNode | Edit::SwapBranches) => {
            Some(MutationClass::Branch)
        }
        (Section::Loop, NodeRef::Expr(_) | NodeRef::Bool(_), _) if in_cond => Some(MutationClass::Condition),
        (Section::Loop, NodeRef::Expr(_), _) if in_assign => Some(MutationClass::Assignment),
        _ => None,
    }
}

fn incompatible(path: &NodePath, reason: impl Into<String>) -> MutationError {
    MutationError::IncompatibleEdit {
        path: path.clone(),
        reason: reason.into(),
    }
}

/// The replacement node for `edit` applied to `node`; `None` means removal.
fn edited_node(node: NodeRef<'_>, edit: &Edit, path: &NodePath) -> Result<Option<Node>, MutationError> {
    let bad = || incompatible(path, format!("{edit:?} does not fit a {} node", node.kind()));
    let out = match (node, edit) {
        (NodeRef::Expr(Expr::Int { .. }), Edit::ReplaceValue { value: Literal::Int(n) }) => Node::Expr(Expr::int(*n)),
        (NodeRef::Expr(Expr::Color { .. }), Edit::ReplaceValue { value: Literal::Color(c) }) => {
            Node::Expr(Expr::color(*c))
        }
        (NodeRef::Bool(BoolExpr::TextureIs { .. }), Edit::ReplaceValue { value: Literal::Texture(t) }) => {
            Node::Bool(BoolExpr::texture_is(*t))
        }
        (NodeRef::Expr(Expr::BinOp { lhs, rhs, .. }), Edit::ReplaceOperator { op: Operator::Arith(op) }) => {
            Node::Expr(Expr::BinOp {
                op: *op,
                lhs: lhs.clone(),
                rhs: rhs.clone(),
            })
        }
        (NodeRef::Bool(BoolExpr::Compare { lhs, rhs, .. }), Edit::ReplaceOperator { op: Operator::Compare(op) }) => {
            Node::Bool(BoolExpr::compare(lhs.clone(), *op, rhs.clone()))
        }
        (NodeRef::Bool(BoolExpr::Predicate { expr, .. }), Edit::ReplaceOperator { op: Operator::Predicate(p) }) => {
            Node::Bool(BoolExpr::predicate(expr.clone(), *p))
        }
        (
            NodeRef::Bool(BoolExpr::And { left, right } | BoolExpr::Or { left, right }),
            Edit::ReplaceOperator { op: Operator::Logic(op) },
        ) => Node::Bool(match op {
            LogicOp::And => BoolExpr::And {
                left: left.clone(),
                right: right.clone(),
            },
            LogicOp::Or => BoolExpr::Or {
                left: left.clone(),
                right: right.clone(),
            },
        }),
        (NodeRef::Bool(BoolExpr::And { left, right } | BoolExpr::Or { left, right }), Edit::DropConjunct { side }) => {
            Node::Bool(match side {
                Side::Left => (**right).clone(),
                Side::Right => (**left).clone(),
            })
        }
        (NodeRef::Bool(BoolExpr::Not { operand }), Edit::NegateCondition) => Node::Bool((**operand).clone()),
        (NodeRef::Bool(b), Edit::NegateCondition) => Node::Bool(BoolExpr::not(b.clone())),
        (NodeRef::Stmt(Stmt::If { .. }), Edit::RemoveNode) => return Ok(None),
        (
            NodeRef::Stmt(Stmt::If {
                cond,
                then,
                otherwise,
            }),
            Edit::SwapBranches,
        ) => Node::Stmt(Stmt::if_else(cond.clone(), otherwise.clone(), then.clone())),
        _ => return Err(bad()),
    };
    Ok(Some(out))
}

/// Checks `m` against `base` and returns the replacement node.
fn prepare(base: &CritterProgram, m: &Mutation) -> Result<(Node, Option<Node>), MutationError> {
    let node = resolve(base, &m.path)?;
    match classify(base, &m.path, &m.edit) {
        Some(class) if class == m.class => {}
        Some(class) => {
            return Err(incompatible(
                &m.path,
                format!("edit belongs to class {class:?}, not {:?}", m.class),
            ))
        }
        None => return Err(incompatible(&m.path, "no mutation class applies at this path")),
    }
    let after = edited_node(node, &m.edit, &m.path)?;
    Ok((node.to_owned_node(), after))
}

fn write(program: &mut CritterProgram, path: &NodePath, after: Option<Node>) -> Result<(), MutationError> {
    match after {
        Some(n) => replace_in_place(program, path, n)?,
        None => {
            remove_in_place(program, path)?;
        }
    }
    Ok(())
}

/// Applies one mutation. The result is guaranteed to type-check.
pub fn apply(base: &CritterProgram, m: &Mutation) -> Result<CritterProgram, MutationError> {
    let (_, after) = prepare(base, m)?;
    let mut out = base.clone();
    write(&mut out, &m.path, after)?;
    let errors = typecheck(&out);
    if !errors.is_empty() {
        return Err(MutationError::ProducesIllTyped(errors));
    }
    Ok(out)
}

fn candidate_edits(node: NodeRef<'_>) -> Vec<Edit> {
    let mut edits = Vec::new();
    match node {
        NodeRef::Expr(Expr::Int { value: n }) => {
            let mut seen = BTreeSet::new();
            for v in [n.saturating_sub(1), n.saturating_add(1), 0, n.saturating_neg()] {
                if v != *n && seen.insert(v) {
                    edits.push(Edit::ReplaceValue { value: Literal::Int(v) });
                }
            }
        }
        NodeRef::Expr(Expr::Color { value }) => {
            for c in Color::ALL.into_iter().filter(|c| c != value) {
                edits.push(Edit::ReplaceValue { value: Literal::Color(c) });
            }
        }
        NodeRef::Expr(Expr::BinOp { op, .. }) => {
            for o in ArithOp::ALL.into_iter().filter(|o| o != op) {
                edits.push(Edit::ReplaceOperator { op: Operator::Arith(o) });
            }
        }
        NodeRef::Bool(b) => {
            match b {
                BoolExpr::TextureIs { texture } => {
                    for t in Texture::ALL.into_iter().filter(|t| t != texture) {
                        edits.push(Edit::ReplaceValue { value: Literal::Texture(t) });
                    }
                }
                BoolExpr::Compare { op, .. } => {
                    for o in CmpOp::ALL.into_iter().filter(|o| o != op) {
                        edits.push(Edit::ReplaceOperator { op: Operator::Compare(o) });
                    }
                }
                BoolExpr::Predicate { predicate, .. } => {
                    for p in IntPredicate::ALL.into_iter().filter(|p| p != predicate) {
                        edits.push(Edit::ReplaceOperator { op: Operator::Predicate(p) });
                    }
                }
                BoolExpr::And { .. } | BoolExpr::Or { .. } => {
                    let other = if matches!(b, BoolExpr::And { .. }) {
                        LogicOp::Or
                    } else {
                        LogicOp::And
                    };
                    edits.push(Edit::ReplaceOperator { op: Operator::Logic(other) });
                    edits.push(Edit::DropConjunct { side: Side::Left });
                    edits.push(Edit::DropConjunct { side: Side::Right });
                }
                BoolExpr::Not { .. } => {}
            }
            edits.push(Edit::NegateCondition);
        }
        NodeRef::Stmt(Stmt::If { .. }) => {
            edits.push(Edit::RemoveNode);
            edits.push(Edit::SwapBranches);
        }
        _ => {}
    }
    edits
}

/// Every single-edit mutation of `base` in the requested classes, in
/// pre-order of the addressed node. Edits that leave the program unchanged
/// or break typing are left out.
pub fn enumerate_mutations(base: &CritterProgram, classes: &[MutationClass]) -> Vec<Mutation> {
    let mut out = Vec::new();
    for (path, _) in all_paths(base, &[Section::Init, Section::Loop]) {
        let Ok(node) = resolve(base, &path) else {
            continue;
        };
        for edit in candidate_edits(node) {
            let Some(class) = classify(base, &path, &edit) else {
                continue;
            };
            if !classes.contains(&class) {
                continue;
            }
            let m = Mutation::new(class, path.clone(), edit);
            if matches!(apply(base, &m), Ok(p) if p != *base) {
                out.push(m);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MutantId(pub String);

impl std::fmt::Display for MutantId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutant {
    pub id: MutantId,
    pub base: Arc<CritterProgram>,
    pub mutations: Vec<Mutation>,
    pub program: CritterProgram,
}

fn mutant_id(base: &CritterProgram, mutations: &[Mutation]) -> MutantId {
    let mut sorted = mutations.to_vec();
    sorted.sort();
    let mut h = Sha256::new();
    h.update(crate::blocklang::to_json(base).as_bytes());
    h.update(b"\n");
    h.update(crate::blocklang::to_json(&sorted).as_bytes());
    let digest = h.finalize();
    MutantId(format!("m-{}", hex::encode(&digest[..8])))
}

/// Builds a mutant from one or more non-overlapping mutations. Application
/// order does not matter: edits are applied deepest-last-first so removals
/// never shift a path that is still pending.
pub fn make_mutant(base: Arc<CritterProgram>, mutations: Vec<Mutation>) -> Result<Mutant, MutationError> {
    if mutations.is_empty() {
        return Err(MutationError::EmptyMutationList);
    }
    for (i, a) in mutations.iter().enumerate() {
        for b in &mutations[i + 1..] {
            if a.path.is_prefix_of(&b.path) || b.path.is_prefix_of(&a.path) {
                return Err(MutationError::ConflictingPaths(a.path.clone(), b.path.clone()));
            }
        }
    }
    let mut prepared = Vec::with_capacity(mutations.len());
    for m in &mutations {
        let (_, after) = prepare(&base, m)?;
        prepared.push((m.path.clone(), after));
    }
    prepared.sort_by(|a, b| b.0.cmp(&a.0));
    let mut program = (*base).clone();
    for (path, after) in prepared {
        write(&mut program, &path, after)?;
    }
    let errors = typecheck(&program);
    if !errors.is_empty() {
        return Err(MutationError::ProducesIllTyped(errors));
    }
    if program == *base {
        return Err(MutationError::NoEffect);
    }
    Ok(Mutant {
        id: mutant_id(&base, &mutations),
        base,
        mutations,
        program,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub class: MutationClass,
    pub path: NodePath,
    /// Readable location such as `loop[0].cond`.
    pub location: String,
    pub before: Node,
    /// `None` when the node was removed.
    pub after: Option<Node>,
    pub summary: String,
}

/// One diff entry per mutation of `mutant`.
pub fn explain(mutant: &Mutant) -> Vec<DiffEntry> {
    mutant
        .mutations
        .iter()
        .filter_map(|m| {
            let (before, after) = prepare(&mutant.base, m).ok()?;
            let location = describe(mutant.base.as_ref(), &m.path);
            let summary = match &after {
                Some(a) => format!("{location}: {} -> {}", render::node(&before), render::node(a)),
                None => format!("{location}: removed `{}`", render::node(&before).replace('\n', " ")),
            };
            Some(DiffEntry {
                class: m.class,
                path: m.path.clone(),
                location,
                before,
                after,
                summary,
            })
        })
        .collect()
}

/// Rebuilds a mutant program from `base` and its diff entries.
pub fn replay(base: &CritterProgram, entries: &[DiffEntry]) -> Result<CritterProgram, MutationError> {
    let mut ordered: Vec<&DiffEntry> = entries.iter().collect();
    ordered.sort_by(|a, b| b.path.cmp(&a.path));
    let mut program = base.clone();
    for e in ordered {
        write(&mut program, &e.path, e.after.clone())?;
    }
    Ok(program)
}

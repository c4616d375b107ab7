//! Addressing AST nodes by path.
//!
//! A path names a program section and then descends by child index. Child
//! numbering per node kind:
//!
//! | node                | children                                  |
//! |---------------------|-------------------------------------------|
//! | statement block     | `i` = i-th statement                      |
//! | assert list         | `i` = i-th assert                         |
//! | `assign`            | `0` = value                               |
//! | `if`                | `0` = cond, `1` = then block, `2` = else  |
//! | `binop`, `compare`  | `0` = lhs, `1` = rhs                      |
//! | `predicate`         | `0` = expr                                |
//! | `and`, `or`         | `0` = left, `1` = right                   |
//! | `not`               | `0` = operand                             |
//! | `assert`            | `0` = equals value (if any)               |
//!
//! An empty index list addresses the section itself.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::{Assert, BoolExpr, CritterProgram, Expr, Matcher, Stmt, TestProgram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    Init,
    Loop,
    Setup,
    Asserts,
}

impl Section {
    pub fn name(self) -> &'static str {
        match self {
            Section::Init => "init",
            Section::Loop => "loop",
            Section::Setup => "setup",
            Section::Asserts => "asserts",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodePath {
    pub section: Section,
    #[serde(default)]
    pub indices: Vec<usize>,
}

impl NodePath {
    pub fn new(section: Section, indices: impl Into<Vec<usize>>) -> Self {
        NodePath {
            section,
            indices: indices.into(),
        }
    }

    pub fn root(section: Section) -> Self {
        NodePath {
            section,
            indices: Vec::new(),
        }
    }

    pub fn child(&self, index: usize) -> Self {
        let mut indices = self.indices.clone();
        indices.push(index);
        NodePath {
            section: self.section,
            indices,
        }
    }

    pub fn parent(&self) -> Option<NodePath> {
        let (_, rest) = self.indices.split_last()?;
        Some(NodePath {
            section: self.section,
            indices: rest.to_vec(),
        })
    }

    /// True if `self` equals `other` or lies above it in the tree.
    pub fn is_prefix_of(&self, other: &NodePath) -> bool {
        self.section == other.section && other.indices.starts_with(&self.indices)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.section.name())?;
        for i in &self.indices {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("path {0} does not resolve in this program")]
    PathInvalid(NodePath),
    #[error("path {path} addresses a {found} node, not a {expected} node")]
    KindMismatch {
        path: NodePath,
        expected: NodeKind,
        found: NodeKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Block,
    AssertList,
    Stmt,
    Expr,
    Bool,
    Assert,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Block => "block",
            NodeKind::AssertList => "assert list",
            NodeKind::Stmt => "statement",
            NodeKind::Expr => "expression",
            NodeKind::Bool => "condition",
            NodeKind::Assert => "assert",
        })
    }
}

/// An owned AST node of any kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "node", content = "value", rename_all = "snake_case")]
pub enum Node {
    Block(Vec<Stmt>),
    AssertList(Vec<Assert>),
    Stmt(Stmt),
    Expr(Expr),
    Bool(BoolExpr),
    Assert(Assert),
}

impl Node {
    pub fn kind(&self) -> NodeKind {
        match self {
            Node::Block(_) => NodeKind::Block,
            Node::AssertList(_) => NodeKind::AssertList,
            Node::Stmt(_) => NodeKind::Stmt,
            Node::Expr(_) => NodeKind::Expr,
            Node::Bool(_) => NodeKind::Bool,
            Node::Assert(_) => NodeKind::Assert,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum NodeRef<'a> {
    Block(&'a [Stmt]),
    AssertList(&'a [Assert]),
    Stmt(&'a Stmt),
    Expr(&'a Expr),
    Bool(&'a BoolExpr),
    Assert(&'a Assert),
}

impl<'a> NodeRef<'a> {
    pub fn kind(&self) -> NodeKind {
        match self {
            NodeRef::Block(_) => NodeKind::Block,
            NodeRef::AssertList(_) => NodeKind::AssertList,
            NodeRef::Stmt(_) => NodeKind::Stmt,
            NodeRef::Expr(_) => NodeKind::Expr,
            NodeRef::Bool(_) => NodeKind::Bool,
            NodeRef::Assert(_) => NodeKind::Assert,
        }
    }

    pub fn to_owned_node(&self) -> Node {
        match *self {
            NodeRef::Block(b) => Node::Block(b.to_vec()),
            NodeRef::AssertList(a) => Node::AssertList(a.to_vec()),
            NodeRef::Stmt(s) => Node::Stmt(s.clone()),
            NodeRef::Expr(e) => Node::Expr(e.clone()),
            NodeRef::Bool(b) => Node::Bool(b.clone()),
            NodeRef::Assert(a) => Node::Assert(a.clone()),
        }
    }

    pub fn child(self, index: usize) -> Option<NodeRef<'a>> {
        match self {
            NodeRef::Block(b) => b.get(index).map(NodeRef::Stmt),
            NodeRef::AssertList(a) => a.get(index).map(NodeRef::Assert),
            NodeRef::Stmt(Stmt::Assign { value, .. }) => (index == 0).then_some(NodeRef::Expr(value)),
            NodeRef::Stmt(Stmt::If {
                cond,
                then,
                otherwise,
            }) => match index {
                0 => Some(NodeRef::Bool(cond)),
                1 => Some(NodeRef::Block(then)),
                2 => Some(NodeRef::Block(otherwise)),
                _ => None,
            },
            NodeRef::Expr(Expr::BinOp { lhs, rhs, .. }) => match index {
                0 => Some(NodeRef::Expr(lhs)),
                1 => Some(NodeRef::Expr(rhs)),
                _ => None,
            },
            NodeRef::Expr(_) => None,
            NodeRef::Bool(b) => match (b, index) {
                (BoolExpr::Compare { lhs, .. }, 0) => Some(NodeRef::Expr(lhs)),
                (BoolExpr::Compare { rhs, .. }, 1) => Some(NodeRef::Expr(rhs)),
                (BoolExpr::Predicate { expr, .. }, 0) => Some(NodeRef::Expr(expr)),
                (BoolExpr::And { left, .. } | BoolExpr::Or { left, .. }, 0) => {
                    Some(NodeRef::Bool(left))
                }
                (BoolExpr::And { right, .. } | BoolExpr::Or { right, .. }, 1) => {
                    Some(NodeRef::Bool(right))
                }
                (BoolExpr::Not { operand }, 0) => Some(NodeRef::Bool(operand)),
                _ => None,
            },
            NodeRef::Assert(a) => match (&a.matcher, index) {
                (Matcher::Equals { value }, 0) => Some(NodeRef::Expr(value)),
                _ => None,
            },
        }
    }

    /// Number of addressable children.
    pub fn child_count(self) -> usize {
        (0..).take_while(|&i| self.child(i).is_some()).count()
    }
}

enum NodeMut<'a> {
    Block(&'a mut Vec<Stmt>),
    AssertList(&'a mut Vec<Assert>),
    Stmt(&'a mut Stmt),
    Expr(&'a mut Expr),
    Bool(&'a mut BoolExpr),
    Assert(&'a mut Assert),
}

impl<'a> NodeMut<'a> {
    fn kind(&self) -> NodeKind {
        match self {
            NodeMut::Block(_) => NodeKind::Block,
            NodeMut::AssertList(_) => NodeKind::AssertList,
            NodeMut::Stmt(_) => NodeKind::Stmt,
            NodeMut::Expr(_) => NodeKind::Expr,
            NodeMut::Bool(_) => NodeKind::Bool,
            NodeMut::Assert(_) => NodeKind::Assert,
        }
    }

    fn child(self, index: usize) -> Option<NodeMut<'a>> {
        match self {
            NodeMut::Block(b) => b.get_mut(index).map(NodeMut::Stmt),
            NodeMut::AssertList(a) => a.get_mut(index).map(NodeMut::Assert),
            NodeMut::Stmt(Stmt::Assign { value, .. }) => (index == 0).then_some(NodeMut::Expr(value)),
            NodeMut::Stmt(Stmt::If {
                cond,
                then,
                otherwise,
            }) => match index {
                0 => Some(NodeMut::Bool(cond)),
                1 => Some(NodeMut::Block(then)),
                2 => Some(NodeMut::Block(otherwise)),
                _ => None,
            },
            NodeMut::Expr(Expr::BinOp { lhs, rhs, .. }) => match index {
                0 => Some(NodeMut::Expr(lhs)),
                1 => Some(NodeMut::Expr(rhs)),
                _ => None,
            },
            NodeMut::Expr(_) => None,
            NodeMut::Bool(b) => match (b, index) {
                (BoolExpr::Compare { lhs, .. }, 0) => Some(NodeMut::Expr(lhs)),
                (BoolExpr::Compare { rhs, .. }, 1) => Some(NodeMut::Expr(rhs)),
                (BoolExpr::Predicate { expr, .. }, 0) => Some(NodeMut::Expr(expr)),
                (BoolExpr::And { left, .. } | BoolExpr::Or { left, .. }, 0) => {
                    Some(NodeMut::Bool(left))
                }
                (BoolExpr::And { right, .. } | BoolExpr::Or { right, .. }, 1) => {
                    Some(NodeMut::Bool(right))
                }
                (BoolExpr::Not { operand }, 0) => Some(NodeMut::Bool(operand)),
                _ => None,
            },
            NodeMut::Assert(a) => match (&mut a.matcher, index) {
                (Matcher::Equals { value }, 0) => Some(NodeMut::Expr(value)),
                _ => None,
            },
        }
    }
}

/// A program whose nodes can be addressed by [`NodePath`].
pub trait Addressable: Clone {
    fn section(&self, section: Section) -> Option<NodeRef<'_>>;
    #[doc(hidden)]
    fn section_mut(&mut self, section: Section) -> Option<SectionMut<'_>>;
}

#[doc(hidden)]
pub enum SectionMut<'a> {
    Block(&'a mut Vec<Stmt>),
    AssertList(&'a mut Vec<Assert>),
}

impl Addressable for CritterProgram {
    fn section(&self, section: Section) -> Option<NodeRef<'_>> {
        match section {
            Section::Init => Some(NodeRef::Block(&self.init)),
            Section::Loop => Some(NodeRef::Block(&self.body)),
            _ => None,
        }
    }

    fn section_mut(&mut self, section: Section) -> Option<SectionMut<'_>> {
        match section {
            Section::Init => Some(SectionMut::Block(&mut self.init)),
            Section::Loop => Some(SectionMut::Block(&mut self.body)),
            _ => None,
        }
    }
}

impl Addressable for TestProgram {
    fn section(&self, section: Section) -> Option<NodeRef<'_>> {
        match section {
            Section::Setup => Some(NodeRef::Block(&self.setup)),
            Section::Asserts => Some(NodeRef::AssertList(&self.asserts)),
            _ => None,
        }
    }

    fn section_mut(&mut self, section: Section) -> Option<SectionMut<'_>> {
        match section {
            Section::Setup => Some(SectionMut::Block(&mut self.setup)),
            Section::Asserts => Some(SectionMut::AssertList(&mut self.asserts)),
            _ => None,
        }
    }
}

pub fn resolve<'a, P: Addressable>(program: &'a P, path: &NodePath) -> Result<NodeRef<'a>, PathError> {
    let invalid = || PathError::PathInvalid(path.clone());
    let mut node = program.section(path.section).ok_or_else(invalid)?;
    for &i in &path.indices {
        node = node.child(i).ok_or_else(invalid)?;
    }
    Ok(node)
}

fn resolve_mut<'a, P: Addressable>(program: &'a mut P, path: &NodePath) -> Result<NodeMut<'a>, PathError> {
    let invalid = || PathError::PathInvalid(path.clone());
    let mut node = match program.section_mut(path.section).ok_or_else(invalid)? {
        SectionMut::Block(b) => NodeMut::Block(b),
        SectionMut::AssertList(a) => NodeMut::AssertList(a),
    };
    for &i in &path.indices {
        node = node.child(i).ok_or_else(invalid)?;
    }
    Ok(node)
}

/// Returns a copy of `program` with the node at `path` replaced by `node`.
pub fn replace<P: Addressable>(program: &P, path: &NodePath, node: Node) -> Result<P, PathError> {
    let mut out = program.clone();
    replace_in_place(&mut out, path, node)?;
    Ok(out)
}

pub(crate) fn replace_in_place<P: Addressable>(
    program: &mut P,
    path: &NodePath,
    node: Node,
) -> Result<(), PathError> {
    let slot = resolve_mut(program, path)?;
    let found = slot.kind();
    match (slot, node) {
        (NodeMut::Block(dst), Node::Block(src)) => *dst = src,
        (NodeMut::AssertList(dst), Node::AssertList(src)) => *dst = src,
        (NodeMut::Stmt(dst), Node::Stmt(src)) => *dst = src,
        (NodeMut::Expr(dst), Node::Expr(src)) => *dst = src,
        (NodeMut::Bool(dst), Node::Bool(src)) => *dst = src,
        (NodeMut::Assert(dst), Node::Assert(src)) => *dst = src,
        (_, node) => {
            return Err(PathError::KindMismatch {
                path: path.clone(),
                expected: node.kind(),
                found,
            })
        }
    }
    Ok(())
}

/// Returns a copy of `program` with the statement or assert at `path`
/// removed from its enclosing list.
pub fn remove<P: Addressable>(program: &P, path: &NodePath) -> Result<P, PathError> {
    let mut out = program.clone();
    remove_in_place(&mut out, path)?;
    Ok(out)
}

pub(crate) fn remove_in_place<P: Addressable>(program: &mut P, path: &NodePath) -> Result<Node, PathError> {
    let invalid = || PathError::PathInvalid(path.clone());
    let parent = path.parent().ok_or_else(invalid)?;
    let index = *path.indices.last().ok_or_else(invalid)?;
    match resolve_mut(program, &parent)? {
        NodeMut::Block(b) if index < b.len() => Ok(Node::Stmt(b.remove(index))),
        NodeMut::AssertList(a) if index < a.len() => Ok(Node::Assert(a.remove(index))),
        NodeMut::Block(_) | NodeMut::AssertList(_) => Err(invalid()),
        other => Err(PathError::KindMismatch {
            path: parent,
            expected: NodeKind::Block,
            found: other.kind(),
        }),
    }
}

/// All node paths of a program in pre-order.
pub fn all_paths<P: Addressable>(program: &P, sections: &[Section]) -> Vec<(NodePath, NodeKind)> {
    fn walk(node: NodeRef<'_>, path: NodePath, out: &mut Vec<(NodePath, NodeKind)>) {
        out.push((path.clone(), node.kind()));
        let mut i = 0;
        while let Some(child) = node.child(i) {
            walk(child, path.child(i), out);
            i += 1;
        }
    }
    let mut out = Vec::new();
    for &s in sections {
        if let Some(root) = program.section(s) {
            walk(root, NodePath::root(s), &mut out);
        }
    }
    out
}

/// Human-readable rendering such as `loop[0].then[1].value`.
pub fn describe<P: Addressable>(program: &P, path: &NodePath) -> String {
    let mut out = path.section.name().to_string();
    let Some(mut node) = program.section(path.section) else {
        return path.to_string();
    };
    for &i in &path.indices {
        let label = match node {
            NodeRef::Block(_) | NodeRef::AssertList(_) => {
                out.push_str(&format!("[{i}]"));
                None
            }
            NodeRef::Stmt(Stmt::Assign { .. }) => Some("value"),
            NodeRef::Stmt(Stmt::If { .. }) => Some(["cond", "then", "else"].get(i).copied().unwrap_or("?")),
            NodeRef::Expr(_) => Some(["lhs", "rhs"].get(i).copied().unwrap_or("?")),
            NodeRef::Bool(BoolExpr::Compare { .. }) => Some(["lhs", "rhs"].get(i).copied().unwrap_or("?")),
            NodeRef::Bool(BoolExpr::Predicate { .. }) => Some("expr"),
            NodeRef::Bool(BoolExpr::Not { .. }) => Some("operand"),
            NodeRef::Bool(_) => Some(["left", "right"].get(i).copied().unwrap_or("?")),
            NodeRef::Assert(_) => Some("value"),
        };
        if let Some(label) = label {
            out.push('.');
            out.push_str(label);
        }
        match node.child(i) {
            Some(next) => node = next,
            None => return path.to_string(),
        }
    }
    out
}

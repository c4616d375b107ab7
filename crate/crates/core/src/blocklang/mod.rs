//! The block language shared by critters and mines.

pub mod ast;
pub mod interp;
pub mod palette;
pub mod path;
pub mod render;
pub mod serial;
pub mod typecheck;

pub use ast::*;
pub use interp::{eval_test, init_state, is_prime, step_loop, TestVerdict, INT_LIMIT};
pub use palette::{palette, BlockPalette};
pub use path::{describe, remove, replace, resolve, Addressable, Node, NodeKind, NodePath, NodeRef, PathError, Section};
pub use serial::{from_json, to_json, to_json_pretty, DecodeError};
pub use typecheck::{typecheck, Ty, TypeError, TypeErrorCode, Typecheck};

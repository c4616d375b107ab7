//! Engine for a block-based mutation-testing tower defense game.
//!
//! Critters walk from a colony to a tower running a small block program on
//! every tile. Some of them run mutated programs. Players place mines, each
//! carrying assertions over critter state, to trap the mutants while letting
//! healthy critters pass.

pub mod blocklang;
pub mod mutation;
pub mod board;
pub mod engine;
pub mod analysis;
pub mod levels;
#[cfg(feature = "server")]
pub mod service;

//! Exact computation in Leavitt path algebras and their regular algebras
//! over a tree-shaped poset of fields.
//!
//! The layers build on each other: [`scalars`] and [`quiver`] give the
//! fields and graphs, [`pathalg`] the path algebra and its matrices,
//! [`ratseries`] rational series, [`leavitt`] and [`qalg`] the two
//! algebras, [`monoid`] the graph monoid. [`parse`], [`random`], [`verify`]
//! and [`cli`] sit on top.

pub mod cli;
pub mod leavitt;
pub mod monoid;
pub mod parse;
pub mod pathalg;
pub mod qalg;
pub mod quiver;
pub mod random;
pub mod ratseries;
pub mod scalars;
pub mod verify;

//! The guide's chapters as modules, so that `cargo test` runs every code
//! block in the book as a doc-test.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/triangulations.md")]
pub mod triangulations {}
#[doc = include_str!("../../../book/src/packing.md")]
pub mod packing {}
#[doc = include_str!("../../../book/src/statistics.md")]
pub mod statistics {}
#[doc = include_str!("../../../book/src/harness.md")]
pub mod harness {}

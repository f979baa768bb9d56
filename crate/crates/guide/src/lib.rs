//! The `syncgrid` guide. Each chapter of `book/` is included here so that
//! `cargo test` compiles and runs every snippet in it.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/environment.md")]
pub mod environment {}

#[doc = include_str!("../../../book/src/mst.md")]
pub mod mst {}

#[doc = include_str!("../../../book/src/coordination-graphs.md")]
pub mod coordination_graphs {}

#[doc = include_str!("../../../book/src/learning.md")]
pub mod learning {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}

#[doc = include_str!("../../../book/src/config.md")]
pub mod config {}

#[doc = include_str!("../../../book/src/file-formats.md")]
pub mod file_formats {}

//! The guide under `book/` is plain mdbook, which cannot build snippets that
//! depend on workspace crates. Each chapter is attached to an empty module
//! here instead, and `cargo test --doc -p sonic-ecology-guide` runs them.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/landscape.md")]
pub mod landscape {}
#[doc = include_str!("../../../book/src/search.md")]
pub mod search {}
#[doc = include_str!("../../../book/src/lifecycle.md")]
pub mod lifecycle {}
#[doc = include_str!("../../../book/src/entrainment.md")]
pub mod entrainment {}
#[doc = include_str!("../../../book/src/analysis.md")]
pub mod analysis {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

//! The `book/` chapters compiled as doc-tests, one module per chapter, so
//! `cargo test` keeps the guide's listings in sync with the crate.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/beliefs.md")]
pub mod beliefs {}

#[doc = include_str!("../../../book/src/concavification.md")]
pub mod concavification {}

#[doc = include_str!("../../../book/src/backward-induction.md")]
pub mod backward_induction {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/limits.md")]
pub mod limits {}

//! Runs the guide's code snippets as doc-tests. One module per chapter so a
//! failure names its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/catalog.md")]
pub mod catalog {}

#[doc = include_str!("../../../book/src/energy.md")]
pub mod energy {}

#[doc = include_str!("../../../book/src/saddle.md")]
pub mod saddle {}

#[doc = include_str!("../../../book/src/control.md")]
pub mod control {}

#[doc = include_str!("../../../book/src/embedding.md")]
pub mod embedding {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

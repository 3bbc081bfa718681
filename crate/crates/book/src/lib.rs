//! Guide chapters, compiled as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/majorization.md")]
pub mod majorization {}
#[doc = include_str!("../../../book/src/uncertainty.md")]
pub mod uncertainty {}
#[doc = include_str!("../../../book/src/coherence.md")]
pub mod coherence {}
#[doc = include_str!("../../../book/src/nonlocality.md")]
pub mod nonlocality {}
#[doc = include_str!("../../../book/src/experiment.md")]
pub mod experiment {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

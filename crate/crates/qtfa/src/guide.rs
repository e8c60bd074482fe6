//! The book chapters, compiled as doc-tests.
//!
//! The `book/` directory at the repository root is an mdBook; every fenced
//! Rust block in its chapters is included here verbatim, so `cargo test`
//! keeps the narrative and the library in lockstep.

#[doc = include_str!("../../../book/src/phase-space.md")]
pub mod phase_space {}

#[doc = include_str!("../../../book/src/time-frequency.md")]
pub mod time_frequency {}

#[doc = include_str!("../../../book/src/quantization.md")]
pub mod quantization {}

#[doc = include_str!("../../../book/src/operator-tfa.md")]
pub mod operator_tfa {}

#[doc = include_str!("../../../book/src/symplectic.md")]
pub mod symplectic {}

#[doc = include_str!("../../../book/src/metaplectic.md")]
pub mod metaplectic {}

#[doc = include_str!("../../../book/src/reconstruction.md")]
pub mod reconstruction {}

#[doc = include_str!("../../../book/src/identification.md")]
pub mod identification {}

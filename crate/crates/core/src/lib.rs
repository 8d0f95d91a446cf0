//! Classical and quantum mechanics of a free particle on the two-sheeted
//! hyperboloid `x² + y² − z² = −a²`.
//!
//! The guide in `book/` walks through each module with runnable examples.

pub mod phase;
pub mod geometry;
pub mod classical;
pub mod spectral;
pub mod verify;

// The book chapters are compiled as doc-tests so their snippets stay in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/phase-space.md")]
    mod phase_space {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/classical.md")]
    mod classical {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}

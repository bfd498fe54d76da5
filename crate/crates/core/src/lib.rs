//! Numerics for the chaotic dynamics of `f(z) = e^z`: orbits with overflow
//! tracking, logarithm branches, hyperbolic metrics, inverse branches of
//! iterates, and searches for checkable witnesses of escape, transitivity,
//! periodic points and sensitive dependence.
//!
//! The guide in `book/` walks through each layer; its code is run as doc-tests.

pub mod branches;
pub mod dynamics;
pub mod hyperbolic;
pub mod inverse;
pub mod render;
pub mod witness;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/orbits.md")]
    mod orbits {}
    #[doc = include_str!("../../../book/src/logarithms.md")]
    mod logarithms {}
    #[doc = include_str!("../../../book/src/hyperbolic.md")]
    mod hyperbolic {}
    #[doc = include_str!("../../../book/src/pullbacks.md")]
    mod pullbacks {}
    #[doc = include_str!("../../../book/src/witnesses.md")]
    mod witnesses {}
    #[doc = include_str!("../../../book/src/precision.md")]
    mod precision {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}

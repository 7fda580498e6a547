//! Verification workbench for modular multiplicative unitaries at finite
//! dimension.
//!
//! A unitary `W` on `H⊗H` is *multiplicative* when it satisfies the pentagon
//! equation `W₂₃W₁₂ = W₁₂W₁₃W₂₃`. It is *modular* when positive operators
//! `Q`, `Q̂` and a unitary `W̃` on `H̄⊗H` exist with
//! `W(Q̂⊗Q)W* = Q̂⊗Q` and
//! `⟨x⊗u, W(z⊗y)⟩ = ⟨z̄⊗Qu, W̃(x̄⊗Q⁻¹y)⟩`.
//!
//! The crate is organised by layer:
//!
//! * [`tensor`]: spaces, operators, legs, transposes, slices, functional calculus.
//! * [`munit`]: pentagon residuals, modularity certificates, duality, certificate search.
//! * [`qgroup`]: the algebras `A`, `Â` and the maps `Δ`, `κ`, `τ`, `R` with their identities.
//! * [`modifier`]: the Weyl pair on a periodic grid and the lifted unitary `W_M`.
//! * [`workbench`]: group tables, generators, run configuration, reports.
//!
//! The guide under `book/` walks through each layer; its code listings are
//! compiled and run as doc-tests of this crate.

// `!(x < tol)` fails NaN residuals, which `x >= tol` would pass
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod modifier;
pub mod munit;
pub mod qgroup;
pub mod report;
pub mod tensor;
pub mod workbench;

pub use error::{MuError, Result};
pub use report::CheckReport;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/pentagon.md")]
    mod pentagon {}
    #[doc = include_str!("../../../book/src/modularity.md")]
    mod modularity {}
    #[doc = include_str!("../../../book/src/quantum-group.md")]
    mod quantum_group {}
    #[doc = include_str!("../../../book/src/modifier.md")]
    mod modifier {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

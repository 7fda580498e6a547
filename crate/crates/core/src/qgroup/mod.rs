//! The quantum-group structure carried by a modular multiplicative unitary:
//! slice algebras, comultiplication, coinverse and its polar decomposition,
//! and the identities tying them to `(Q, Q̂, W̃)`.

pub mod algebra;
pub mod antipode;
pub mod comult;
pub mod extract;
pub mod identities;

pub use algebra::{algebra_left, algebra_right, check_multiplier, SliceAlgebra};
pub use antipode::{check_kappa, kappa, tau, unitary_antipode, Kappa};
pub use comult::{check_comult, comult};
pub use extract::{extract, ExtractOptions, QGData};
pub use identities::{
    check_comult_covariance, check_scaling_implementation, check_script_t, check_transpose_antipode, check_wtilde_comult, script_t,
};

//! Dense complex operator algebra over finite-dimensional Hilbert spaces and
//! their conjugates: tensor products, leg placement, transposes, slices and
//! functional calculus of positive operators.

pub mod functional;
pub mod io;
pub mod legs;
pub mod linalg;
pub mod operator;
pub mod positive;
pub mod space;

pub use functional::Functional;
pub use linalg::{Mat, C64};
pub use operator::{flip, leg_embed, realign_left, realign_right, slice_left, slice_right, tensor, transpose, Operator};
pub use positive::{mat_pow, PositiveOperator};
pub use space::{Factor, Space};

/// Largest total dimension for which operators are materialized densely.
pub const DENSE_BUDGET: usize = 4096;

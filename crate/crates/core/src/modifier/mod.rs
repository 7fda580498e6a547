//! The lifted construction: a pair `(r, s)` on a periodic grid `K`, the
//! intertwiner `X = Q₂^{is₁}Q̂₂^{−is₁}` and `W_M = X₁₂W₂₄X₁₂*` on
//! `(K⊗H)^{⊗2}`, with `Q_M = r⊗Q`.
//!
//! Residuals split in two families. Leg exchange, the pentagon of `W_M` and
//! the inner-product relation use only spectral calculus of `s` and hold to
//! rounding at every grid size. The intertwining `X*(r⊗Q)X = r⊗Q̂` and the
//! commutation of `W_M` with `Q_M⊗Q_M` need `r^{it}` to translate `s`, which a
//! periodic grid does only away from its wrap point.

pub mod checks;
pub mod convergence;
pub mod lifted;
pub mod transport;
pub mod weyl;

pub use checks::{check_manageability_wm, check_redu, check_tozs, check_trick, commutator_residual, pentagon_residual_wm, ProbeOptions};
pub use convergence::{convergence_study, max_residual, write_csv, ConvergenceRow};
pub use lifted::{beta, beta_inverse, build_wm, build_x, q_m, Intertwiner, LiftedUnitary};
pub use transport::{span_transport, BaseStructure};
pub use weyl::{bulk_probes, grid_weyl_pair, WeylPair};

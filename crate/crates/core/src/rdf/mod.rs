//! Nonanticipative rate-distortion on finite alphabets.
//!
//! For a source `P(x^n)` without feedback and a single-letter distortion
//! `ρ`, the solver minimizes the Lagrangian
//! `I(X^n → Y^n) − s · Σ_i E ρ(X_i, Y_i)` over causal channels by
//! alternating between a reproduction law `P̄(y^n)` and the channel it
//! induces. Each converged slope `s ≤ 0` yields a point `(D_s, R(D_s))`.

mod baa;
mod curve;
mod distortion;
mod marginal;

pub use baa::{
    baa_run, baa_run_from, baa_update, fixed_point_residual, na_rdf_value, optimal_channel_for_marginals,
    BaaConfig, BaaTrace, Init, RDPoint, TraceEntry, UpdateRule,
};
pub use curve::{rd_curve, CurveMode, CurveShape};
pub use distortion::{expected_distortion, DistortionSpec, Slope};
pub use marginal::ReproductionMarginal;

//! Finite-alphabet probability primitives.
//!
//! Sequences `x^n = (x_0, …, x_n)` are flattened row-major with stage 0 as
//! the most significant digit (see [`SequenceIndexer`]). Joint laws over
//! `X^n × Y^n` are stored x-major: entry `x_flat * |Y^n| + y_flat`.

mod divergence;
mod indexer;
mod joint;
mod kernel;
mod pmf;
mod source;

pub use divergence::{binary_entropy, entropy, kl_divergence, nats_to_bits, Measure};
pub use indexer::{SequenceIndexer, MAX_JOINT_ENTRIES};
pub use joint::{causal_product, condition_joint, marginals, pi_measure, JointCausalDistribution};
pub use kernel::{CausalKernelFamily, KernelKind, StageTable};
pub use pmf::{Alphabet, FinitePmf, MASS_TOL};
pub use source::FeedbackFreeSource;

pub(crate) use divergence::kl_raw;
pub(crate) use joint::{expand, kernel_product, prefix_marginal};
pub(crate) use kernel::max_abs;
pub(crate) use pmf::{mass_total, normalize_row};

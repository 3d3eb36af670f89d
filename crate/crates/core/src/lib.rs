//! # causalrd
//!
//! Finite-alphabet directed information and nonanticipative (causal)
//! rate-distortion.
//!
//! The crate realizes causal stochastic kernels on finite product spaces
//! `X_0 × … × X_n`, `Y_0 × … × Y_n` by exhaustive enumeration and builds on
//! them:
//!
//! | Module | Contents |
//! |---|---|
//! | [`prob`] | pmfs, sequence indexing, causal kernel families, causal products, conditioning, KL divergence |
//! | [`directed`] | directed information, mutual information, the two variational bounds and their achievers |
//! | [`rdf`] | distortion, the alternating-minimization solver for the causal RDF, R(D) sweeps |
//! | [`oracle`] | brute-force grid search, classical memoryless Blahut–Arimoto, binary closed form |
//! | [`random`] | seeded random pmfs and kernel families for property checks |
//!
//! All logarithms are natural; use [`prob::nats_to_bits`] for reporting.
//!
//! ```
//! use causalrd::prob::{Alphabet, CausalKernelFamily, FinitePmf};
//! use causalrd::directed::directed_information;
//!
//! let bit = Alphabet::binary("x");
//! let p = CausalKernelFamily::memoryless_source(
//!     &FinitePmf::bernoulli(0.5).unwrap(),
//!     &Alphabet::binary("y"),
//!     0,
//! ).unwrap();
//! let q = CausalKernelFamily::binary_symmetric_channel(0.1, 0).unwrap();
//! let report = directed_information(&p, &q).unwrap();
//! let expected = std::f64::consts::LN_2 - causalrd::prob::binary_entropy(0.1);
//! assert!((report.value_nats - expected).abs() < 1e-12);
//! # let _ = bit;
//! ```

pub mod directed;
pub mod error;
pub mod oracle;
pub mod prob;
pub mod random;
pub mod rdf;

pub use error::{Error, Result};
pub use prob::{
    Alphabet, CausalKernelFamily, FeedbackFreeSource, FinitePmf, JointCausalDistribution,
    KernelKind, SequenceIndexer,
};
pub use rdf::{BaaConfig, BaaTrace, DistortionSpec, RDPoint, Slope, UpdateRule};

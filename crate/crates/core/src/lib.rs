//! Universal online contention resolution schemes for matroids under correlated priors.
//!
//! Elements are 0-indexed throughout. Schemes are split into an expensive build
//! phase (order preselection, LP column generation) and a cheap per-draw run phase.

pub mod error;
pub mod harness;
pub mod lp;
pub mod mask;
pub mod matroid;
pub mod numeric;
pub mod oracle;
pub mod permutation;
pub mod preselect;
pub mod prior;
pub mod scheme;
pub mod sim;
pub mod subsample;

pub use error::{OcrsError, Result};
pub use harness::{estimate_balancedness, BalancednessReport, Instance};
pub use lp::{build_lp_scheme, build_secretary_reduction, BuildReport, ColumnMode, LpBuildConfig};
pub use mask::SubsetMask;
pub use matroid::{Matroid, MatroidSpec};
pub use numeric::Scalar;
pub use oracle::{exact_balancedness, max_uncontentious_alpha, AlphaCertificate};
pub use permutation::{prefix_of, Permutation};
pub use preselect::{EstimationMode, PreselectConfig, PreselectVariant, Preselection};
pub use prior::{Prior, PriorSpec};
pub use scheme::{greedy_ordered, secretary_wrap, Scheme, SecretaryAlg, Session};

/// Random stream used for every simulation; per-worker streams come from `set_stream`.
pub type SimRng = rand_chacha::ChaCha8Rng;

//! Bayesian nonparametric model selection across ordered populations.
//!
//! Observations are measurements of `M` response variables on patients grouped
//! into `J` populations with a known severity order. Each response is modeled
//! as
//!
//! ```text
//! X[i,j,m] = theta[j,m] + eps[i,j,m]
//! ```
//!
//! where the population locations `theta[.,m]` carry an order-restricted
//! random-partition prior (ties between locations define the selected model)
//! and the error terms follow a mixture over a *symmetric hierarchical
//! Dirichlet process*: a hierarchy of Dirichlet processes symmetrized about
//! zero, so that every mixture atom comes in a `(+xi, -xi)` pair and the error
//! component has mean zero by construction. Inference runs through a marginal
//! Gibbs sampler in Chinese-restaurant-franchise form, with each franchise
//! table serving a pair of sign-symmetric dishes.
//!
//! Module map:
//!
//! * [`partitions`] — set-partition combinatorics, the Dirichlet-process
//!   partition law, the order-restricted prior and decision summaries.
//! * [`conjugate`] — Gaussian kernels and Normal / Normal-Inverse-Gamma
//!   conjugate updates and marginal likelihoods.
//! * [`shdp`] — the symmetric hierarchical DP: franchise state, partition
//!   probability functions, generative samplers and Gibbs full conditionals.
//! * [`sampler`] — the chain: initialization, sweeps, concentration updates,
//!   checkpointing.
//! * [`summaries`] — posterior tables, co-clustering, point estimates, density
//!   estimates, CSV/SVG emission.
//! * [`data`] — dataset ingestion, standardization and simulation generators.
//! * [`validate`] — self-contained oracle suite (exact identities, quadrature,
//!   Monte Carlo agreement) runnable from tests or the CLI.

pub mod conjugate;
pub mod data;
pub mod partitions;
pub mod sampler;
pub mod shdp;
pub mod summaries;
pub mod validate;

pub(crate) mod util;

pub use conjugate::{GaussianParams, NormalInverseGammaParams};
pub use data::{Dataset, Dgp};
pub use partitions::{PartitionDistribution, SetPartition};
pub use sampler::{
    Chain, ChainState, GammaParams, MCMCOptions, ModelConfig, PriorMode, SampleRecord,
};
pub use shdp::{DishAtom, FranchiseState};
pub use summaries::PosteriorSummary;

//! The marginal Gibbs sampler.
//!
//! One sweep visits, in order: the franchise latents of every response (table,
//! sign and dish assignments plus atom refreshes), the location partition and
//! values of every response, the shared location concentration `omega`, and
//! the per-restaurant / per-response concentrations. Three location-prior
//! modes are supported: the order-restricted partition prior, a plain mixture
//! of Dirichlet processes, and a uniform prior over order-consistent
//! partitions.

mod chain;
mod omega;
mod theta;

pub use chain::{run_chain, Chain, ChainState, Checkpoint, FranchiseSnapshot, SampleRecord};
pub use omega::{
    escobar_west_update, restricted_omega_log_weight, sample_concentrations,
    sample_omega_escobar_west, sample_omega_sir, tied_concentration_update,
};
pub use theta::{sample_theta_labels, ThetaBlock};

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conjugate::{GaussianParams, NormalInverseGammaParams};
use crate::data::DataError;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("i/o at iteration {iter}: {source}")]
    Sink {
        iter: u64,
        #[source]
        source: std::io::Error,
    },
    #[error("checkpoint rejected: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("state audit failed at iteration {iter}: {detail}")]
    Audit { iter: u64, detail: String },
}

/// Location-prior variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorMode {
    /// Order-restricted partition prior (four populations).
    Restricted,
    /// Mixture of Dirichlet processes; no order restriction.
    Dp,
    /// Uniform over order-consistent partitions; no concentration parameter.
    Uniform,
}

impl std::str::FromStr for PriorMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "restricted" => Ok(PriorMode::Restricted),
            "dp" => Ok(PriorMode::Dp),
            "uniform" => Ok(PriorMode::Uniform),
            other => Err(format!("unknown prior mode '{other}'")),
        }
    }
}

/// Shape/rate gamma prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub shape: f64,
    pub rate: f64,
}

impl GammaParams {
    pub fn new(shape: f64, rate: f64) -> Self {
        assert!(shape > 0.0 && rate > 0.0);
        GammaParams { shape, rate }
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rand_distr::Gamma::new(self.shape, 1.0 / self.rate)
            .unwrap()
            .sample(rng)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub prior_mode: PriorMode,
    /// Location base measure `G`, shared across responses unless overridden.
    pub location_prior: GaussianParams,
    /// Atom base measure, shared across responses unless overridden. Must be
    /// centered (`mu0 = 0`) so the error mixture is symmetric.
    pub atom_prior: NormalInverseGammaParams,
    #[serde(default)]
    pub location_prior_by_response: Option<Vec<GaussianParams>>,
    #[serde(default)]
    pub atom_prior_by_response: Option<Vec<NormalInverseGammaParams>>,
    pub omega_prior: GammaParams,
    pub gamma_prior: GammaParams,
    pub alpha_prior: GammaParams,
    pub standardize: bool,
    /// Share one restaurant concentration across populations within a
    /// response instead of one per (population, response).
    #[serde(default)]
    pub tie_gamma: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            prior_mode: PriorMode::Restricted,
            location_prior: GaussianParams::new(0.0, 1.0),
            atom_prior: NormalInverseGammaParams::new(0.0, 1.0, 2.0, 4.0),
            location_prior_by_response: None,
            atom_prior_by_response: None,
            omega_prior: GammaParams::new(3.0, 3.0),
            gamma_prior: GammaParams::new(3.0, 3.0),
            alpha_prior: GammaParams::new(3.0, 3.0),
            standardize: true,
            tie_gamma: false,
        }
    }
}

impl ModelConfig {
    pub fn location_prior_for(&self, m: usize) -> GaussianParams {
        self.location_prior_by_response
            .as_ref()
            .map_or(self.location_prior, |v| v[m])
    }

    pub fn atom_prior_for(&self, m: usize) -> NormalInverseGammaParams {
        self.atom_prior_by_response
            .as_ref()
            .map_or(self.atom_prior, |v| v[m])
    }

    pub fn validate(&self, n_populations: usize, n_responses: usize) -> Result<(), SamplerError> {
        if self.prior_mode == PriorMode::Restricted && n_populations != 4 {
            return Err(SamplerError::Config(format!(
                "the restricted prior is implemented for 4 populations, got {n_populations}"
            )));
        }
        let atoms: Vec<NormalInverseGammaParams> = (0..n_responses)
            .map(|m| self.atom_prior_for(m))
            .collect();
        if atoms.iter().any(|p| p.mu0 != 0.0) {
            return Err(SamplerError::Config(
                "atom prior must be centered (mu0 = 0) for a symmetric error mixture".into(),
            ));
        }
        if let Some(v) = &self.location_prior_by_response {
            if v.len() != n_responses {
                return Err(SamplerError::Config(
                    "location_prior_by_response length mismatch".into(),
                ));
            }
        }
        if let Some(v) = &self.atom_prior_by_response {
            if v.len() != n_responses {
                return Err(SamplerError::Config(
                    "atom_prior_by_response length mismatch".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MCMCOptions {
    pub iterations: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub seed: u64,
    /// Full-state recount every this many sweeps.
    pub audit_interval: u64,
    /// Candidate pool for the importance-resampling omega update.
    pub omega_pool_size: usize,
    /// Periodic checkpoint cadence; the final state is always a checkpoint.
    pub checkpoint_interval: Option<u64>,
}

impl Default for MCMCOptions {
    fn default() -> Self {
        MCMCOptions {
            iterations: 10_000,
            burn_in: 5_000,
            thin: 1,
            seed: 0,
            audit_interval: 100,
            omega_pool_size: 1_000,
            checkpoint_interval: None,
        }
    }
}

impl MCMCOptions {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.burn_in >= self.iterations {
            return Err(SamplerError::Config(format!(
                "burn_in {} must be below iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(SamplerError::Config("thin must be at least 1".into()));
        }
        if self.omega_pool_size == 0 {
            return Err(SamplerError::Config("omega pool must be non-empty".into()));
        }
        Ok(())
    }
}

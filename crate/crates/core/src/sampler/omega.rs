//! Concentration-parameter updates.
//!
//! `omega` (the location concentration shared across responses) is updated by
//! sampling-importance-resampling against its prior in restricted mode and by
//! the auxiliary-variable scheme of Escobar & West (1995), generalized to
//! several responses, in mixture-of-DPs mode. Restaurant and menu
//! concentrations reuse the single-group auxiliary scheme on table and dish
//! counts.

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma};

use super::GammaParams;
use crate::partitions::SetPartition;
use crate::shdp::FranchiseState;
use crate::util::{ln_gamma, sample_categorical_log};

/// Log importance weight of an `omega` candidate given `total_blocks` blocks
/// across `m` responses of four populations each:
/// `omega^(sum T - M) / ((omega+2)(omega^2+omega+3))^M`, the block-count part
/// of the restricted prior with its quartic normalizer.
pub fn restricted_omega_log_weight(omega: f64, total_blocks: usize, m: usize) -> f64 {
    (total_blocks as f64 - m as f64) * omega.ln()
        - m as f64 * ((omega + 2.0) * (omega * omega + omega + 3.0)).ln()
}

/// Draws `omega` by importance resampling from the prior: `pool_size`
/// candidates weighted by [`restricted_omega_log_weight`]. If every weight
/// underflows the current value is kept and a warning logged.
pub fn sample_omega_sir<R: Rng + ?Sized>(
    partitions: &[SetPartition],
    prior: &GammaParams,
    pool_size: usize,
    current: f64,
    rng: &mut R,
) -> f64 {
    debug_assert!(partitions.iter().all(|p| p.n_items() == 4));
    let m = partitions.len();
    let total_blocks: usize = partitions.iter().map(SetPartition::n_blocks).sum();
    let mut candidates = Vec::with_capacity(pool_size);
    let mut log_weights = Vec::with_capacity(pool_size);
    for _ in 0..pool_size {
        let w = prior.sample(rng);
        log_weights.push(restricted_omega_log_weight(w, total_blocks, m));
        candidates.push(w);
    }
    match sample_categorical_log(&log_weights, rng) {
        Some(i) => candidates[i],
        None => {
            log::warn!("omega importance weights all underflowed; keeping {current}");
            current
        }
    }
}

/// Multi-response Escobar-West update with a common group size `d`: one
/// auxiliary `u_m ~ Beta(omega+1, d)` per response, a mixture label
/// `v in 0..=M` with weights `C(M,v) d^v Gamma(a + sum T - v) (b - sum log u)^v`,
/// then `omega ~ Gamma(a + sum T - v, b - sum log u)`.
pub fn sample_omega_escobar_west<R: Rng + ?Sized>(
    block_counts: &[usize],
    d: usize,
    current: f64,
    prior: &GammaParams,
    rng: &mut R,
) -> f64 {
    assert!(!block_counts.is_empty() && d >= 1);
    let m = block_counts.len();
    let t_sum: usize = block_counts.iter().sum();
    let beta = Beta::new(current + 1.0, d as f64).unwrap();
    let mut log_u_sum = 0.0;
    for _ in 0..m {
        log_u_sum += beta.sample(rng).ln();
    }
    let rate = prior.rate - log_u_sum; // strictly above prior.rate: u < 1
    let ln_rate = rate.ln();
    let ln_d = (d as f64).ln();
    let ln_binom = |v: usize| -> f64 {
        ln_gamma(m as f64 + 1.0) - ln_gamma(v as f64 + 1.0) - ln_gamma((m - v) as f64 + 1.0)
    };
    let log_weights: Vec<f64> = (0..=m)
        .map(|v| {
            ln_binom(v)
                + v as f64 * ln_d
                + ln_gamma(prior.shape + t_sum as f64 - v as f64)
                + v as f64 * ln_rate
        })
        .collect();
    let v = sample_categorical_log(&log_weights, rng).expect("weights are finite");
    let shape = prior.shape + t_sum as f64 - v as f64;
    Gamma::new(shape, 1.0 / rate).unwrap().sample(rng)
}

/// Single-group auxiliary update for a Dirichlet-process concentration given
/// `k` clusters among `n` draws.
pub fn escobar_west_update<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    current: f64,
    prior: &GammaParams,
    rng: &mut R,
) -> f64 {
    sample_omega_escobar_west(&[k], n, current, prior, rng)
}

/// Auxiliary update for a concentration shared by groups of unequal sizes:
/// per group `u ~ Beta(c+1, n)` and a Bernoulli `n/(n+c)` shape decrement,
/// then a gamma draw.
pub fn tied_concentration_update<R: Rng + ?Sized>(
    cluster_counts: &[usize],
    group_sizes: &[usize],
    current: f64,
    prior: &GammaParams,
    rng: &mut R,
) -> f64 {
    assert_eq!(cluster_counts.len(), group_sizes.len());
    let mut shape = prior.shape + cluster_counts.iter().sum::<usize>() as f64;
    let mut rate = prior.rate;
    for &n in group_sizes {
        if n == 0 {
            continue;
        }
        let u = Beta::new(current + 1.0, n as f64).unwrap().sample(rng);
        rate -= u.ln();
        if rng.gen::<f64>() < n as f64 / (n as f64 + current) {
            shape -= 1.0;
        }
    }
    Gamma::new(shape, 1.0 / rate).unwrap().sample(rng)
}

/// Refreshes the restaurant concentrations (per restaurant, or one shared
/// value when `tie` is set) from table counts, and the menu concentration
/// from the dish-pair count over total tables.
pub fn sample_concentrations<R: Rng + ?Sized>(
    fr: &mut FranchiseState,
    sizes: &[usize],
    gamma_prior: &GammaParams,
    alpha_prior: &GammaParams,
    tie: bool,
    rng: &mut R,
) {
    if tie {
        let counts: Vec<usize> = fr.restaurants.iter().map(|r| r.tables.len()).collect();
        let g = tied_concentration_update(&counts, sizes, fr.gamma[0], gamma_prior, rng);
        for gj in fr.gamma.iter_mut() {
            *gj = g;
        }
    } else {
        for j in 0..fr.restaurants.len() {
            let k = fr.restaurants[j].tables.len();
            fr.gamma[j] = escobar_west_update(k, sizes[j], fr.gamma[j], gamma_prior, rng);
        }
    }
    let total = fr.total_tables();
    fr.alpha = escobar_west_update(fr.n_dishes(), total, fr.alpha, alpha_prior, rng);
}

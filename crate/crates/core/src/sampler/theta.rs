//! Location partition and value updates.
//!
//! Restricted and uniform modes rebuild the label vector in one forward scan:
//! population `j` either ties the previous population's location, with weight
//! `a_j` times the likelihood at that location, or opens a new block, with
//! weight `1 - a_j` times the marginal likelihood under the base measure `G`.
//! A block opened mid-scan receives a posterior draw immediately so later
//! populations can evaluate the tie likelihood against it. The mixture-of-DPs
//! mode is the usual one-at-a-time conditional update with occupancy weights.
//! Either way the scan ends by redrawing every block location from its
//! conjugate posterior pooling all member populations.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::PriorMode;
use crate::conjugate::{
    normal_location_marginal_loglik, normal_location_posterior, normal_logpdf, GaussianParams,
};
use crate::partitions::{theta_tie_weight, SetPartition};
use crate::util::sample_categorical_log;

/// Partition of populations plus the per-population location values.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaBlock {
    pub partition: SetPartition,
    pub values: Vec<f64>,
}

impl ThetaBlock {
    /// Finest partition with the given values.
    pub fn finest(values: Vec<f64>) -> Self {
        ThetaBlock {
            partition: SetPartition::finest(values.len()),
            values,
        }
    }
}

fn loglik_at(z: &[f64], sigma2: &[f64], theta: f64) -> f64 {
    z.iter()
        .zip(sigma2)
        .map(|(&zi, &s2)| normal_logpdf(zi, &GaussianParams::new(theta, s2)))
        .sum()
}

fn posterior_draw<R: Rng + ?Sized>(
    g: &GaussianParams,
    z: &[f64],
    sigma2: &[f64],
    rng: &mut R,
) -> f64 {
    let post = normal_location_posterior(g, z, sigma2);
    Normal::new(post.mean, post.variance.sqrt())
        .unwrap()
        .sample(rng)
}

/// One block update of the location latents for a single response. `z[j]` are
/// the de-noised residuals of population `j` and `sigma2[j]` their current
/// variances; empty residual vectors reduce the update to a draw from the
/// partition prior.
pub fn sample_theta_labels<R: Rng + ?Sized>(
    block: &mut ThetaBlock,
    z: &[Vec<f64>],
    sigma2: &[Vec<f64>],
    omega: f64,
    g: &GaussianParams,
    mode: PriorMode,
    rng: &mut R,
) {
    let jn = z.len();
    assert_eq!(sigma2.len(), jn);
    match mode {
        PriorMode::Restricted | PriorMode::Uniform => {
            forward_scan(block, z, sigma2, omega, g, mode, rng)
        }
        PriorMode::Dp => conditional_scan(block, z, sigma2, omega, g, rng),
    }
    repool_values(block, z, sigma2, g, rng);
}

fn forward_scan<R: Rng + ?Sized>(
    block: &mut ThetaBlock,
    z: &[Vec<f64>],
    sigma2: &[Vec<f64>],
    omega: f64,
    g: &GaussianParams,
    mode: PriorMode,
    rng: &mut R,
) {
    let jn = z.len();
    let mut labels = vec![0usize];
    let mut block_theta = vec![posterior_draw(g, &z[0], &sigma2[0], rng)];
    for j in 1..jn {
        let a = match mode {
            PriorMode::Restricted => {
                theta_tie_weight(omega, j + 1, &SetPartition::from_labels(&labels))
                    .expect("restricted mode is four populations")
            }
            PriorMode::Uniform => 0.5,
            PriorMode::Dp => unreachable!(),
        };
        let prev = block_theta[labels[j - 1]];
        let lw_tie = a.ln() + loglik_at(&z[j], &sigma2[j], prev);
        let lw_new = (1.0 - a).ln() + normal_location_marginal_loglik(g, &z[j], &sigma2[j]);
        match sample_categorical_log(&[lw_tie, lw_new], rng) {
            Some(0) => labels.push(labels[j - 1]),
            _ => {
                labels.push(block_theta.len());
                block_theta.push(posterior_draw(g, &z[j], &sigma2[j], rng));
            }
        }
    }
    block.partition = SetPartition::from_labels(&labels);
    block.values = labels.iter().map(|&l| block_theta[l]).collect();
}

fn conditional_scan<R: Rng + ?Sized>(
    block: &mut ThetaBlock,
    z: &[Vec<f64>],
    sigma2: &[Vec<f64>],
    omega: f64,
    g: &GaussianParams,
    rng: &mut R,
) {
    let jn = z.len();
    let mut labels = block.partition.labels().to_vec();
    // Current block values and occupancies.
    let n_blocks = block.partition.n_blocks();
    let mut theta: Vec<f64> = (0..n_blocks)
        .map(|b| {
            block.values[labels.iter().position(|&l| l == b).unwrap()]
        })
        .collect();
    let mut counts = vec![0usize; n_blocks];
    for &l in &labels {
        counts[l] += 1;
    }
    for j in 0..jn {
        // Detach population j.
        let old = labels[j];
        counts[old] -= 1;
        if counts[old] == 0 {
            counts.remove(old);
            theta.remove(old);
            for l in labels.iter_mut() {
                if *l > old {
                    *l -= 1;
                }
            }
        }
        let mut lw: Vec<f64> = counts
            .iter()
            .zip(&theta)
            .map(|(&n, &t)| (n as f64).ln() + loglik_at(&z[j], &sigma2[j], t))
            .collect();
        lw.push(omega.ln() + normal_location_marginal_loglik(g, &z[j], &sigma2[j]));
        let pick = sample_categorical_log(&lw, rng).expect("finite weights");
        if pick < counts.len() {
            labels[j] = pick;
            counts[pick] += 1;
        } else {
            labels[j] = counts.len();
            counts.push(1);
            theta.push(posterior_draw(g, &z[j], &sigma2[j], rng));
        }
    }
    block.values = labels.iter().map(|&l| theta[l]).collect();
    block.partition = SetPartition::from_labels(&labels);
}

fn repool_values<R: Rng + ?Sized>(
    block: &mut ThetaBlock,
    z: &[Vec<f64>],
    sigma2: &[Vec<f64>],
    g: &GaussianParams,
    rng: &mut R,
) {
    let labels = block.partition.labels();
    let mut drawn = vec![f64::NAN; block.partition.n_blocks()];
    for b in 0..drawn.len() {
        let mut zz = Vec::new();
        let mut ss = Vec::new();
        for (j, &l) in labels.iter().enumerate() {
            if l == b {
                zz.extend_from_slice(&z[j]);
                ss.extend_from_slice(&sigma2[j]);
            }
        }
        drawn[b] = posterior_draw(g, &zz, &ss, rng);
    }
    block.values = labels.iter().map(|&l| drawn[l]).collect();
}

//! Gaussian kernels and conjugate updates.
//!
//! Two conjugate families back the sampler:
//!
//! * Normal-Inverse-Gamma for mixture atoms `(xi, sigma^2)`, with the
//!   convention `x | xi, s2 ~ N(xi, s2)`, `xi | s2 ~ N(mu0, s2 / tau)`,
//!   `s2 ~ InvGamma(a, b)` (`b` a rate, so `E[s2] = b / (a - 1)` for `a > 1`).
//!   `tau` multiplies the *precision* of `xi` given `s2`; switching to an
//!   independent-variance reading would mean editing this convention here.
//! * Normal-Normal for location parameters with known per-observation
//!   variances.
//!
//! Marginal likelihoods are computed as ratios of posterior to prior
//! normalizing constants, so a single code path serves 0..n observations and
//! the chain rule `m(x1, x2) = m(x1) m(x2 | posterior after x1)` holds by
//! construction.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::util::ln_gamma;

const LN_2PI: f64 = 1.8378770664093453;

/// Mean and variance of a univariate Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianParams {
    pub fn new(mean: f64, variance: f64) -> Self {
        assert!(variance > 0.0, "variance must be positive");
        GaussianParams { mean, variance }
    }
}

/// Normal-Inverse-Gamma parameters; see the module docs for the convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalInverseGammaParams {
    pub mu0: f64,
    pub tau: f64,
    pub a: f64,
    pub b: f64,
}

impl NormalInverseGammaParams {
    pub fn new(mu0: f64, tau: f64, a: f64, b: f64) -> Self {
        assert!(tau > 0.0 && a > 0.0 && b > 0.0, "tau, a, b must be positive");
        NormalInverseGammaParams { mu0, tau, a, b }
    }

    /// Draws `(xi, sigma2)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        // 1/sigma2 ~ Gamma(a, rate b); rand_distr parameterizes by scale.
        let precision = Gamma::new(self.a, 1.0 / self.b).unwrap().sample(rng);
        let sigma2 = 1.0 / precision;
        let xi = Normal::new(self.mu0, (sigma2 / self.tau).sqrt())
            .unwrap()
            .sample(rng);
        (xi, sigma2)
    }
}

/// Exact log density of `N(mean, variance)` at `x`.
#[inline]
pub fn normal_logpdf(x: f64, p: &GaussianParams) -> f64 {
    let d = x - p.mean;
    -0.5 * (LN_2PI + p.variance.ln() + d * d / p.variance)
}

/// Posterior Normal-Inverse-Gamma parameters after observing `obs`.
pub fn nig_update(prior: &NormalInverseGammaParams, obs: &[f64]) -> NormalInverseGammaParams {
    let n = obs.len() as f64;
    if obs.is_empty() {
        return *prior;
    }
    let mean = obs.iter().sum::<f64>() / n;
    let ss: f64 = obs.iter().map(|x| (x - mean) * (x - mean)).sum();
    let tau_n = prior.tau + n;
    let mu_n = (prior.tau * prior.mu0 + n * mean) / tau_n;
    let a_n = prior.a + 0.5 * n;
    let d = mean - prior.mu0;
    let b_n = prior.b + 0.5 * ss + 0.5 * prior.tau * n * d * d / tau_n;
    NormalInverseGammaParams {
        mu0: mu_n,
        tau: tau_n,
        a: a_n,
        b: b_n,
    }
}

/// Log marginal density of `obs` with `(xi, sigma2)` integrated out, via the
/// ratio of normalizing constants:
///
/// ```text
/// m(x_1..n) = (2 pi)^(-n/2) sqrt(tau0/tau_n) Gamma(a_n)/Gamma(a0) b0^a0 / b_n^a_n
/// ```
pub fn nig_marginal_loglik(prior: &NormalInverseGammaParams, obs: &[f64]) -> f64 {
    if obs.is_empty() {
        return 0.0;
    }
    let post = nig_update(prior, obs);
    let n = obs.len() as f64;
    -0.5 * n * LN_2PI + 0.5 * (prior.tau.ln() - post.tau.ln()) + ln_gamma(post.a)
        - ln_gamma(prior.a)
        + prior.a * prior.b.ln()
        - post.a * post.b.ln()
}

/// Posterior of a location `theta` with prior `N(mean, variance)` given
/// independent observations `z_i ~ N(theta, sigmas2_i)`.
pub fn normal_location_posterior(
    prior: &GaussianParams,
    z: &[f64],
    sigmas2: &[f64],
) -> GaussianParams {
    assert_eq!(z.len(), sigmas2.len(), "z and sigmas2 lengths differ");
    let mut precision = 1.0 / prior.variance;
    let mut weighted = prior.mean / prior.variance;
    for (&zi, &s2) in z.iter().zip(sigmas2) {
        precision += 1.0 / s2;
        weighted += zi / s2;
    }
    GaussianParams {
        mean: weighted / precision,
        variance: 1.0 / precision,
    }
}

/// Log marginal density of `z` with the location integrated out: multivariate
/// normal with covariance `diag(sigmas2) + variance * ones ones'`, evaluated
/// through the matrix-determinant lemma and Sherman-Morrison so no matrix is
/// formed.
pub fn normal_location_marginal_loglik(prior: &GaussianParams, z: &[f64], sigmas2: &[f64]) -> f64 {
    assert_eq!(z.len(), sigmas2.len(), "z and sigmas2 lengths differ");
    if z.is_empty() {
        return 0.0;
    }
    let n = z.len() as f64;
    let v0 = prior.variance;
    let mut ln_det_d = 0.0;
    let mut p = 0.0; // sum 1/s2
    let mut q = 0.0; // sum r^2/s2
    let mut r1 = 0.0; // sum r/s2
    for (&zi, &s2) in z.iter().zip(sigmas2) {
        let r = zi - prior.mean;
        ln_det_d += s2.ln();
        p += 1.0 / s2;
        q += r * r / s2;
        r1 += r / s2;
    }
    let ln_det = ln_det_d + (1.0 + v0 * p).ln();
    let quad = q - v0 * r1 * r1 / (1.0 + v0 * p);
    -0.5 * (n * LN_2PI + ln_det + quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::oracles::{location_marginal_quadrature, nig_marginal_quadrature};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn normal_logpdf_known_values() {
        let std = GaussianParams::new(0.0, 1.0);
        assert!((normal_logpdf(0.0, &std) + 0.9189385332046727).abs() < 1e-12);
        let p = GaussianParams::new(2.0, 0.5);
        assert!((normal_logpdf(2.0, &p) - (-0.5 * std::f64::consts::PI.ln())).abs() < 1e-12);
        // Symmetry about the mean (up to rounding of the offsets themselves).
        assert!((normal_logpdf(2.7, &p) - normal_logpdf(1.3, &p)).abs() < 1e-12);
    }

    #[test]
    fn nig_update_examples() {
        let prior = NormalInverseGammaParams::new(0.0, 1.0, 2.0, 4.0);
        assert_eq!(nig_update(&prior, &[]), prior);
        let post = nig_update(&prior, &[0.0, 0.0]);
        assert_eq!(post, NormalInverseGammaParams::new(0.0, 3.0, 3.0, 4.0));
    }

    #[test]
    fn nig_batch_equals_sequential() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..100 {
            let prior = NormalInverseGammaParams::new(
                rng.gen::<f64>() * 4.0 - 2.0,
                rng.gen::<f64>() * 3.0 + 0.1,
                rng.gen::<f64>() * 3.0 + 0.5,
                rng.gen::<f64>() * 5.0 + 0.5,
            );
            let n = rng.gen_range(1..=6);
            let obs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 6.0 - 3.0).collect();
            let batch = nig_update(&prior, &obs);
            let mut seq = prior;
            for &x in &obs {
                seq = nig_update(&seq, &[x]);
            }
            assert!((batch.mu0 - seq.mu0).abs() < 1e-9);
            assert!((batch.tau - seq.tau).abs() < 1e-9);
            assert!((batch.a - seq.a).abs() < 1e-9);
            assert!((batch.b - seq.b).abs() < 1e-9);
        }
    }

    #[test]
    fn nig_marginal_against_quadrature() {
        let prior = NormalInverseGammaParams::new(0.0, 1.0, 2.0, 4.0);
        assert_eq!(nig_marginal_loglik(&prior, &[]), 0.0);
        let closed = nig_marginal_loglik(&prior, &[0.7]);
        let quad = nig_marginal_quadrature(&prior, &[0.7]);
        assert!(
            ((closed - quad) / quad).abs() < 1e-6,
            "closed={closed} quad={quad}"
        );
    }

    #[test]
    fn nig_marginal_chain_rule() {
        let prior = NormalInverseGammaParams::new(0.3, 1.5, 2.5, 3.0);
        let joint = nig_marginal_loglik(&prior, &[1.0, -0.4]);
        let step = nig_marginal_loglik(&prior, &[1.0])
            + nig_marginal_loglik(&nig_update(&prior, &[1.0]), &[-0.4]);
        assert!((joint - step).abs() < 1e-10);
    }

    #[test]
    fn location_posterior_examples() {
        let prior = GaussianParams::new(0.0, 1.0);
        assert_eq!(normal_location_posterior(&prior, &[], &[]), prior);
        let post = normal_location_posterior(&prior, &[2.0], &[1.0]);
        assert!((post.mean - 1.0).abs() < 1e-12);
        assert!((post.variance - 0.5).abs() < 1e-12);
        // Precision additivity: variance strictly decreases with data.
        assert!(post.variance < prior.variance);
    }

    #[test]
    fn location_marginal_single_point_is_convolution() {
        let prior = GaussianParams::new(0.5, 2.0);
        let got = normal_location_marginal_loglik(&prior, &[1.2], &[0.7]);
        let expect = normal_logpdf(1.2, &GaussianParams::new(0.5, 2.7));
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn location_marginal_against_quadrature_and_permutation() {
        let prior = GaussianParams::new(-0.2, 1.3);
        let z = [0.8, -1.1];
        let s2 = [0.6, 2.2];
        let got = normal_location_marginal_loglik(&prior, &z, &s2);
        let quad = location_marginal_quadrature(&prior, &z, &s2);
        assert!(((got - quad) / quad).abs() < 1e-8, "got={got} quad={quad}");
        let swapped = normal_location_marginal_loglik(&prior, &[-1.1, 0.8], &[2.2, 0.6]);
        assert!((got - swapped).abs() < 1e-12);
    }

    #[test]
    fn densities_finite_far_out() {
        let p = GaussianParams::new(0.0, 1.0);
        assert!(normal_logpdf(50.0, &p).is_finite());
        let prior = NormalInverseGammaParams::new(0.0, 1.0, 2.0, 4.0);
        assert!(nig_marginal_loglik(&prior, &[1e6]).is_finite());
        assert!(normal_location_marginal_loglik(&p, &[-1e6], &[1.0]).is_finite());
    }
}

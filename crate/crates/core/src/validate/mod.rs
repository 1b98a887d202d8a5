//! Self-contained correctness checks with machine-readable results.
//!
//! Each check pits a production code path against an independent oracle:
//! exact algebraic identities, brute-force enumeration, adaptive quadrature,
//! or Monte Carlo agreement at stated tolerances. The CLI `validate`
//! subcommand runs the whole suite; the acceptance tests call the same
//! functions at full strength.

pub mod oracles;

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::conjugate::{
    nig_marginal_loglik, normal_location_marginal_loglik, GaussianParams,
    NormalInverseGammaParams,
};
use crate::partitions::{
    contiguous_partitions, dp_eppf_log, enumerate_set_partitions, restricted_log_normalizer,
    restricted_prior, theta_tie_weight, SetPartition,
};
use crate::sampler::{
    restricted_omega_log_weight, sample_omega_escobar_west, sample_theta_labels, GammaParams,
    PriorMode, ThetaBlock,
};
use crate::shdp::{crf_generate, shdp_peppf_log};
use crate::util::ln_gamma;
use oracles::{
    ks_distance, location_marginal_quadrature, nig_marginal_quadrature, outcome_counts,
    signed_outcome, tie_weight_by_enumeration, NumericCdf,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Measured statistic (an error, a z-score, a distance).
    pub statistic: f64,
    /// The statistic must not exceed this.
    pub threshold: f64,
    pub passed: bool,
    pub runtime_ms: u64,
    pub detail: String,
}

impl CheckResult {
    fn finish(name: &str, statistic: f64, threshold: f64, start: Instant, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            statistic,
            threshold,
            passed: statistic <= threshold && statistic.is_finite(),
            runtime_ms: start.elapsed().as_millis() as u64,
            detail,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ValidateOptions {
    pub seed: u64,
    /// Replicates for the generative-vs-exact partition law comparison.
    pub peppf_replicates: usize,
    /// Sweeps per mode for the prior-only label sampler comparison.
    pub gibbs_sweeps: usize,
    /// Draws for the concentration-sampler distribution checks.
    pub omega_draws: usize,
    /// Random datasets for the quadrature comparisons.
    pub quadrature_datasets: usize,
    /// Deliberately corrupt one statistic (exercise failure reporting).
    pub inject_fault: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            seed: 20240901,
            peppf_replicates: 200_000,
            gibbs_sweeps: 100_000,
            omega_draws: 100_000,
            quadrature_datasets: 50,
            inject_fault: false,
        }
    }
}

impl ValidateOptions {
    /// Reduced effort for smoke runs.
    pub fn quick() -> Self {
        ValidateOptions {
            peppf_replicates: 20_000,
            gibbs_sweeps: 10_000,
            omega_draws: 20_000,
            quadrature_datasets: 10,
            ..Default::default()
        }
    }
}

/// Exact identities of the partition layer. Threshold 1e-10 on the worst
/// relative error (the tie-weight product identity is exact to 1e-12 and
/// reported in the detail string).
pub fn check_prior_identities(seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;

    // Normalizer equals (omega+2)(omega^2+omega+3) at 20 random omega.
    for _ in 0..20 {
        let omega: f64 = rng.gen::<f64>() * 10.0 + 1e-3;
        let z = restricted_log_normalizer(omega, 4).unwrap().exp();
        let poly = (omega + 2.0) * (omega * omega + omega + 3.0);
        worst = worst.max(((z - poly) / poly).abs());
    }

    // Sequential tie/new products reproduce all eight contiguous masses.
    let mut worst_product: f64 = 0.0;
    for &omega in &[0.5, 1.0, 3.0] {
        let prior = restricted_prior(omega, 4).unwrap();
        for p in contiguous_partitions(4).unwrap() {
            let labels = p.labels();
            let mut mass = 1.0;
            for j in 2..=4 {
                let a = theta_tie_weight(omega, j, &p.prefix(j - 1)).unwrap();
                mass *= if labels[j - 1] == labels[j - 2] {
                    a
                } else {
                    1.0 - a
                };
            }
            worst_product = worst_product.max((mass - prior.prob_of(&p)).abs());
        }
    }
    worst = worst.max(worst_product * 1e2); // 1e-12 budget inside a 1e-10 gate

    // Closed-form tie weights equal the brute-force ratio for every prefix.
    for _ in 0..10 {
        let omega: f64 = rng.gen::<f64>() * 5.0 + 0.05;
        for j in 2..=4usize {
            for prefix in enumerate_set_partitions(j - 1)
                .unwrap()
                .into_iter()
                .filter(SetPartition::is_order_consistent)
            {
                let closed = theta_tie_weight(omega, j, &prefix).unwrap();
                let brute = tie_weight_by_enumeration(omega, j, &prefix);
                worst = worst.max(((closed - brute) / brute).abs());
            }
        }
    }

    // Partition-law normalization for up to six items.
    for n in 1..=6 {
        for &omega in &[0.1, 1.0, 10.0] {
            let total: f64 = enumerate_set_partitions(n)
                .unwrap()
                .iter()
                .map(|p| dp_eppf_log(omega, p).unwrap().exp())
                .sum();
            worst = worst.max((total - 1.0).abs());
        }
    }

    CheckResult::finish(
        "prior_identities",
        worst,
        1e-10,
        start,
        format!("worst tie-product deviation {worst_product:.2e}"),
    )
}

/// Generative franchise frequencies against the exact signed partition law,
/// for every size configuration with at most four customers in up to two
/// restaurants. Statistic: worst z-score over outcomes with expected count
/// at least 10 (below that the normal error bar is meaningless); the exact
/// signed/unsigned identity and the total-mass normalization are asserted as
/// side conditions.
pub fn check_peppf_mc(replicates: usize, seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let base = NormalInverseGammaParams::new(0.0, 1.0, 2.0, 4.0);
    let configs: [(&[usize], &[f64]); 8] = [
        (&[1], &[0.8]),
        (&[2], &[0.8]),
        (&[3], &[0.8]),
        (&[4], &[0.8]),
        (&[1, 1], &[0.8, 1.3]),
        (&[2, 1], &[0.8, 1.3]),
        (&[2, 2], &[0.8, 1.3]),
        (&[3, 1], &[0.8, 1.3]),
    ];
    let alpha = 1.1;
    let mut worst_z: f64 = 0.0;
    let mut detail = String::new();
    for (sizes, gamma) in configs {
        let mut tallies: HashMap<(SetPartition, Vec<i8>), usize> = HashMap::new();
        for _ in 0..replicates {
            let state = crf_generate(gamma, alpha, sizes, &base, &mut rng);
            *tallies.entry(signed_outcome(&state)).or_insert(0) += 1;
        }
        let mut mass_seen = 0.0;
        for ((partition, signs), count) in &tallies {
            let (plus, minus) = outcome_counts(partition, signs, sizes);
            let p = shdp_peppf_log(&plus, &minus, gamma, alpha).unwrap().exp();
            mass_seen += p;
            // Below ~20 expected hits the normal error bar is not meaningful;
            // those cells are covered by the total-mass side condition.
            if p * replicates as f64 >= 20.0 {
                let se = (p * (1.0 - p) / replicates as f64).sqrt();
                let z = ((*count as f64 / replicates as f64) - p).abs() / se;
                if z > worst_z {
                    worst_z = z;
                    detail = format!(
                        "worst at sizes {sizes:?}, outcome mass {p:.4}, z={z:.2}"
                    );
                }
            }
        }
        // The visited outcomes carry essentially all the mass.
        assert!(
            mass_seen > 1.0 - 50.0 / replicates as f64,
            "outcome mass only {mass_seen}"
        );
    }
    CheckResult::finish("peppf_generative_mc", worst_z, 3.0, start, detail)
}

/// Closed-form marginal likelihoods against adaptive quadrature. Statistic:
/// worst log-scale discrepancy relative to tolerance, normalized so 1.0 is
/// the gate (1e-6 for the atom marginal, 1e-8 for the location marginal).
pub fn check_conjugate_quadrature(n_datasets: usize, seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_nig: f64 = 0.0;
    let mut worst_loc: f64 = 0.0;
    for _ in 0..n_datasets {
        let prior = NormalInverseGammaParams::new(
            rng.gen::<f64>() * 2.0 - 1.0,
            0.5 + rng.gen::<f64>() * 1.5,
            1.5 + rng.gen::<f64>() * 1.5,
            2.0 + rng.gen::<f64>() * 4.0,
        );
        let n = rng.gen_range(1..=3);
        let obs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 6.0 - 3.0).collect();
        let closed = nig_marginal_loglik(&prior, &obs);
        let quad = nig_marginal_quadrature(&prior, &obs);
        let err = (closed - quad).abs();
        worst_nig = worst_nig.max(err);
        worst_ratio = worst_ratio.max(err / 1e-6);

        let g = GaussianParams::new(rng.gen::<f64>() * 2.0 - 1.0, 0.5 + rng.gen::<f64>() * 2.0);
        let zn = rng.gen_range(1..=3);
        let z: Vec<f64> = (0..zn).map(|_| rng.gen::<f64>() * 6.0 - 3.0).collect();
        let s2: Vec<f64> = (0..zn).map(|_| 0.2 + rng.gen::<f64>() * 3.0).collect();
        let closed = normal_location_marginal_loglik(&g, &z, &s2);
        let quad = location_marginal_quadrature(&g, &z, &s2);
        let err = (closed - quad).abs();
        worst_loc = worst_loc.max(err);
        worst_ratio = worst_ratio.max(err / 1e-8);
    }
    CheckResult::finish(
        "conjugate_quadrature",
        worst_ratio,
        1.0,
        start,
        format!("atom marginal {worst_nig:.2e} (gate 1e-6), location {worst_loc:.2e} (gate 1e-8)"),
    )
}

/// Prior-only label sampler: with no data the label frequencies must match
/// the mode's partition prior. Restricted and uniform scans draw fresh
/// partitions each sweep; the mixture-of-DPs scan is a Markov chain, so its
/// tallies keep every second sweep to wash out the one-step correlation.
/// Statistic: worst z-score over (mode, partition) cells with expected count
/// at least 10.
pub fn check_prior_only_gibbs(sweeps: usize, seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let g = GaussianParams::new(0.0, 1.0);
    let omega = 1.0;
    let empty_z: Vec<Vec<f64>> = vec![Vec::new(); 4];
    let empty_s2 = empty_z.clone();
    let all = enumerate_set_partitions(4).unwrap();
    let mut worst_z: f64 = 0.0;
    let mut detail = String::new();

    for mode in [PriorMode::Restricted, PriorMode::Uniform, PriorMode::Dp] {
        let reference: HashMap<SetPartition, f64> = match mode {
            PriorMode::Restricted => restricted_prior(omega, 4)
                .unwrap()
                .entries()
                .iter()
                .cloned()
                .collect(),
            PriorMode::Uniform => all
                .iter()
                .map(|p| {
                    let pr = if p.is_order_consistent() { 1.0 / 8.0 } else { 0.0 };
                    (p.clone(), pr)
                })
                .collect(),
            PriorMode::Dp => all
                .iter()
                .map(|p| (p.clone(), dp_eppf_log(omega, p).unwrap().exp()))
                .collect(),
        };
        let mut block = ThetaBlock::finest(vec![0.0; 4]);
        let mut counts: HashMap<SetPartition, usize> = HashMap::new();
        let mut kept = 0usize;
        let scans = if mode == PriorMode::Dp { sweeps * 2 } else { sweeps };
        for s in 0..scans {
            sample_theta_labels(&mut block, &empty_z, &empty_s2, omega, &g, mode, &mut rng);
            if mode != PriorMode::Dp || s % 2 == 1 {
                *counts.entry(block.partition.clone()).or_insert(0) += 1;
                kept += 1;
            }
        }
        for (p, &expected) in &reference {
            let observed = *counts.get(p).unwrap_or(&0) as f64 / kept as f64;
            if expected == 0.0 {
                assert_eq!(observed, 0.0, "forbidden partition sampled in {mode:?}");
                continue;
            }
            if expected * kept as f64 >= 10.0 {
                let se = (expected * (1.0 - expected) / kept as f64).sqrt();
                let z = (observed - expected).abs() / se;
                if z > worst_z {
                    worst_z = z;
                    detail = format!("worst in {mode:?} at {:?}, z={z:.2}", p.labels());
                }
            }
        }
    }
    CheckResult::finish("prior_only_gibbs", worst_z, 3.0, start, detail)
}

/// Concentration samplers. The auxiliary-scheme draws must reproduce the
/// quadrature-normalized conditional (Kolmogorov-Smirnov below 0.02 over the
/// requested draws, both for a generic block count and for the prior-dominated
/// one-table-one-customer case), and the importance weight at
/// `(omega, M, T) = (1, 1, 1)` must equal exactly 1/15. Statistic: worst KS
/// distance over the distribution checks, scaled so 1.0 is the gate.
pub fn check_omega_samplers(draws: usize, seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let prior = GammaParams::new(3.0, 3.0);
    let mut worst = 0.0f64;
    let mut details = Vec::new();

    // Exact importance-weight value.
    let w = restricted_omega_log_weight(1.0, 1, 1).exp();
    assert!((w - 1.0 / 15.0).abs() < 1e-15, "SIR weight {w} != 1/15");

    // Long-run auxiliary draws against p(omega | T) up to normalization:
    // prior(omega) omega^(T-1) (omega + J) B(omega + 1, J).
    for (t, n) in [(2usize, 4usize), (1, 1)] {
        let target = move |w: f64| -> f64 {
            if w <= 0.0 {
                return 0.0;
            }
            let ln_prior = prior.shape * prior.rate.ln() - ln_gamma(prior.shape)
                + (prior.shape - 1.0) * w.ln()
                - prior.rate * w;
            let ln_beta = ln_gamma(w + 1.0) + ln_gamma(n as f64) - ln_gamma(w + 1.0 + n as f64);
            (ln_prior + (t as f64 - 1.0) * w.ln() + (w + n as f64).ln() + ln_beta).exp()
        };
        let cdf = NumericCdf::build(&target, 40.0, 40_000);
        let mut omega = 1.0;
        let mut sample = Vec::with_capacity(draws);
        for _ in 0..draws {
            omega = sample_omega_escobar_west(&[t], n, omega, &prior, &mut rng);
            sample.push(omega);
        }
        let d = ks_distance(&mut sample, &|x| cdf.eval(x));
        details.push(format!("T={t} J={n}: KS={d:.4}"));
        worst = worst.max(d / 0.02);
    }
    CheckResult::finish(
        "omega_samplers",
        worst,
        1.0,
        start,
        details.join("; "),
    )
}

/// Quick structural exercise of the franchise state: generate, remove and
/// restore random customers, recount everything. Statistic: failures.
pub fn check_franchise_integrity(seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let base = NormalInverseGammaParams::new(0.0, 1.0, 2.0, 4.0);
    let mut failures = 0usize;
    for rep in 0..200 {
        let sizes = [1 + (rep % 4), 1 + (rep % 3)];
        let mut fr = crf_generate(&[0.9, 1.4], 1.2, &sizes, &base, &mut rng);
        let before = fr.clone();
        let j = rep % 2;
        let i = rng.gen_range(0..sizes[j]);
        let removal = fr.remove_customer(j, i);
        fr.restore_customer(j, i, removal);
        if fr != before || fr.audit(&sizes).is_err() {
            failures += 1;
        }
        // Recounted tables-per-dish agree with the incremental counts.
        let ell = fr.ell_by_restaurant();
        for (h, entry) in fr.menu.iter().enumerate() {
            let total: usize = ell.iter().map(|row| row[h]).sum();
            if total != entry.tables {
                failures += 1;
            }
        }
    }
    CheckResult::finish(
        "franchise_integrity",
        failures as f64,
        0.0,
        start,
        "remove/restore and recount over 200 random states".into(),
    )
}

/// Runs the whole suite.
pub fn run_all(opts: &ValidateOptions) -> Vec<CheckResult> {
    let mut results = vec![
        check_prior_identities(opts.seed),
        check_peppf_mc(opts.peppf_replicates, opts.seed.wrapping_add(1)),
        check_conjugate_quadrature(opts.quadrature_datasets, opts.seed.wrapping_add(2)),
        check_prior_only_gibbs(opts.gibbs_sweeps, opts.seed.wrapping_add(3)),
        check_omega_samplers(opts.omega_draws, opts.seed.wrapping_add(4)),
        check_franchise_integrity(opts.seed.wrapping_add(5)),
    ];
    if opts.inject_fault {
        if let Some(first) = results.first_mut() {
            first.statistic = first.threshold * 1e6 + 1.0;
            first.passed = false;
            first.detail = format!("fault injected for testing; was: {}", first.detail);
        }
    }
    results
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_pass_quickly() {
        let r = check_prior_identities(1);
        assert!(r.passed, "{r:?}");
        assert!(r.runtime_ms < 1_000, "took {} ms", r.runtime_ms);
    }

    #[test]
    fn reduced_mc_checks_pass() {
        let r = check_peppf_mc(30_000, 2);
        assert!(r.passed, "{r:?}");
        let r = check_prior_only_gibbs(20_000, 3);
        assert!(r.passed, "{r:?}");
        let r = check_omega_samplers(20_000, 4);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn quadrature_checks_pass() {
        let r = check_conjugate_quadrature(10, 5);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn integrity_check_passes_and_fault_injection_fails() {
        let r = check_franchise_integrity(6);
        assert!(r.passed, "{r:?}");
        let results = run_all(&ValidateOptions {
            inject_fault: true,
            ..ValidateOptions::quick()
        });
        assert!(results.iter().any(|r| !r.passed));
    }
}

//! Posterior summaries over retained sample records: partition tables,
//! ordered-partition tables, co-clustering, cluster counts, credible
//! intervals, predictive densities and pairwise-loss point estimates, plus
//! CSV/SVG emission.

pub mod linkage;
mod output;
pub mod svg;

pub use output::write_all;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::conjugate::{nig_marginal_loglik, NormalInverseGammaParams};
use crate::partitions::{
    binder_estimate, enumerate_set_partitions, PartitionDistribution, SetPartition,
};
use crate::sampler::SampleRecord;
use crate::shdp::pair_logpdf;

/// Static context shared by all summary computations: labels, sizes, the
/// standardization transform, atom priors (for the predictive density) and
/// output knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryContext {
    pub population_labels: Vec<String>,
    pub response_labels: Vec<String>,
    pub sizes: Vec<usize>,
    /// Per response `(mean, sd)` mapping standardized draws back to the
    /// original scale; `(0, 1)` when standardization was off.
    pub standardization: Vec<(f64, f64)>,
    pub atom_priors: Vec<NormalInverseGammaParams>,
    /// Per response `(min, max, pooled sd)` of the raw data, for grids.
    pub data_range: Vec<(f64, f64, f64)>,
    /// Credible level for location intervals.
    pub level: f64,
    pub grid_points: usize,
    /// Cluster patients on `(pair, sign)` instead of the pair alone.
    pub signed_coclustering: bool,
}

impl SummaryContext {
    pub fn n_populations(&self) -> usize {
        self.population_labels.len()
    }

    /// Density grid on the original scale: the data range widened by three
    /// pooled standard deviations each side.
    pub fn density_grid(&self, m: usize) -> Vec<f64> {
        let (lo, hi, sd) = self.data_range[m];
        let a = lo - 3.0 * sd;
        let b = hi + 3.0 * sd;
        (0..self.grid_points)
            .map(|i| a + (b - a) * i as f64 / (self.grid_points - 1) as f64)
            .collect()
    }
}

fn slice<'a>(records: &'a [SampleRecord], m: usize) -> Vec<&'a SampleRecord> {
    records.iter().filter(|r| r.m == m).collect()
}

/// Empirical partition distribution over all canonical partitions of the
/// populations, zero-filled for unvisited ones.
pub fn tabulate_partitions(records: &[SampleRecord], m: usize) -> PartitionDistribution {
    let rs = slice(records, m);
    assert!(!rs.is_empty(), "no samples for response {m}");
    let j = rs[0].partition.n_items();
    let mut counts: HashMap<&SetPartition, usize> = HashMap::new();
    for r in &rs {
        *counts.entry(&r.partition).or_insert(0) += 1;
    }
    let total = rs.len() as f64;
    let entries = enumerate_set_partitions(j)
        .expect("population count in range")
        .into_iter()
        .map(|p| {
            let c = counts.get(&p).copied().unwrap_or(0);
            (p, c as f64 / total)
        })
        .collect();
    PartitionDistribution::new(entries)
}

/// A partition together with the rank order of its block locations
/// (`ranks[b]` = position of block `b` when blocks sort ascending by
/// location, ties broken by block index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedPartitionProb {
    pub partition: SetPartition,
    pub ranks: Vec<usize>,
    pub prob: f64,
}

fn block_ranks(partition: &SetPartition, theta: &[f64]) -> Vec<usize> {
    let b = partition.n_blocks();
    let mut block_value = vec![f64::NAN; b];
    for (j, &l) in partition.labels().iter().enumerate() {
        if block_value[l].is_nan() {
            block_value[l] = theta[j];
        }
    }
    let mut order: Vec<usize> = (0..b).collect();
    order.sort_by(|&x, &y| {
        block_value[x]
            .partial_cmp(&block_value[y])
            .unwrap()
            .then(x.cmp(&y))
    });
    let mut ranks = vec![0usize; b];
    for (pos, &blk) in order.iter().enumerate() {
        ranks[blk] = pos;
    }
    ranks
}

/// Formats an ordered partition as blocks in population order joined by the
/// comparison of adjacent block locations, e.g. `{C,G,M}>{S}`.
pub fn format_ordered(partition: &SetPartition, ranks: &[usize], alphabet: &[String]) -> String {
    let blocks = partition.blocks();
    let mut out = String::new();
    for (b, block) in blocks.iter().enumerate() {
        if b > 0 {
            out.push(if ranks[b - 1] < ranks[b] { '<' } else { '>' });
        }
        out.push('{');
        for (pos, &i) in block.iter().enumerate() {
            if pos > 0 {
                out.push(',');
            }
            out.push_str(&alphabet[i]);
        }
        out.push('}');
    }
    out
}

/// Splits each partition's posterior mass across the observed orderings of
/// its block locations; sorted by probability, descending.
pub fn tabulate_ordered_partitions(records: &[SampleRecord], m: usize) -> Vec<OrderedPartitionProb> {
    let rs = slice(records, m);
    assert!(!rs.is_empty());
    let mut counts: HashMap<(SetPartition, Vec<usize>), usize> = HashMap::new();
    for r in &rs {
        let ranks = block_ranks(&r.partition, &r.theta);
        *counts.entry((r.partition.clone(), ranks)).or_insert(0) += 1;
    }
    let total = rs.len() as f64;
    let mut out: Vec<OrderedPartitionProb> = counts
        .into_iter()
        .map(|((partition, ranks), c)| OrderedPartitionProb {
            partition,
            ranks,
            prob: c as f64 / total,
        })
        .collect();
    out.sort_by(|a, b| {
        b.prob
            .partial_cmp(&a.prob)
            .unwrap()
            .then_with(|| a.partition.cmp(&b.partition))
            .then_with(|| a.ranks.cmp(&b.ranks))
    });
    out
}

fn patient_keys(r: &SampleRecord, signed: bool) -> Vec<(u64, i8)> {
    r.dish_label_per_patient
        .iter()
        .zip(&r.sign_per_patient)
        .map(|(&d, &s)| (d, if signed { s } else { 1 }))
        .collect()
}

/// Fraction of samples in which each pair of patients shares a dish pair
/// (or a signed dish when `signed`). Patients are population-major.
pub fn coclustering_matrix(records: &[SampleRecord], m: usize, signed: bool) -> Vec<Vec<f64>> {
    let rs = slice(records, m);
    assert!(!rs.is_empty());
    let n = rs[0].dish_label_per_patient.len();
    let mut acc = vec![vec![0u32; n]; n];
    for r in &rs {
        let keys = patient_keys(r, signed);
        for i in 0..n {
            for i2 in (i + 1)..n {
                if keys[i] == keys[i2] {
                    acc[i][i2] += 1;
                }
            }
        }
    }
    let total = rs.len() as f64;
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        out[i][i] = 1.0;
        for i2 in (i + 1)..n {
            let v = acc[i][i2] as f64 / total;
            out[i][i2] = v;
            out[i2][i] = v;
        }
    }
    out
}

/// Empirical distribution of the number of menu pairs, as sorted
/// `(count, probability)` pairs.
pub fn cluster_count_posterior(records: &[SampleRecord], m: usize) -> Vec<(usize, f64)> {
    let rs = slice(records, m);
    assert!(!rs.is_empty());
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for r in &rs {
        *counts.entry(r.franchise.atoms.len()).or_insert(0) += 1;
    }
    let total = rs.len() as f64;
    let mut out: Vec<(usize, f64)> = counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / total))
        .collect();
    out.sort_by_key(|&(k, _)| k);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibleInterval {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let idx = p * (n - 1) as f64;
    let lo = idx.floor() as usize;
    let hi = idx.ceil() as usize;
    let w = idx - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

/// Equal-tailed location intervals per population, mapped to the original
/// scale via the standardization record.
pub fn theta_credible_intervals(
    records: &[SampleRecord],
    m: usize,
    level: f64,
    destd: (f64, f64),
) -> Vec<CredibleInterval> {
    assert!(level > 0.0 && level < 1.0);
    let rs = slice(records, m);
    assert!(!rs.is_empty());
    let jn = rs[0].theta.len();
    let (mean_m, sd_m) = destd;
    (0..jn)
        .map(|j| {
            let mut draws: Vec<f64> = rs.iter().map(|r| r.theta[j] * sd_m + mean_m).collect();
            draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mean = draws.iter().sum::<f64>() / draws.len() as f64;
            let tail = (1.0 - level) / 2.0;
            CredibleInterval {
                mean,
                lower: quantile(&draws, tail),
                upper: quantile(&draws, 1.0 - tail),
            }
        })
        .collect()
}

/// Predictive density of one retained state for a new observation of
/// population `j`, evaluated at a standardized point.
fn state_predictive(r: &SampleRecord, j: usize, p0: &NormalInverseGammaParams, x_std: f64) -> f64 {
    let snap = &r.franchise;
    let eps = x_std - r.theta[j];
    let n_j: usize = snap.tables[j].iter().map(|&(occ, _)| occ).sum();
    let gamma_j = snap.gamma[j];
    let alpha = snap.alpha;
    let total_tables: usize = snap.ell.iter().sum();
    let denom = n_j as f64 + gamma_j;
    let mut f = 0.0;
    for &(occ, dish) in &snap.tables[j] {
        f += occ as f64 / denom * pair_logpdf(&snap.atoms[dish], eps).exp();
    }
    let menu_denom = total_tables as f64 + alpha;
    let mut new_part = 0.0;
    for (h, atom) in snap.atoms.iter().enumerate() {
        new_part += snap.ell[h] as f64 / menu_denom * pair_logpdf(atom, eps).exp();
    }
    new_part += alpha / menu_denom * nig_marginal_loglik(p0, &[eps]).exp();
    f + gamma_j / denom * new_part
}

/// Posterior predictive density of a new observation in population `j` on the
/// original scale: the average over retained states of the closed-form
/// conditional predictive.
pub fn density_estimate(
    records: &[SampleRecord],
    m: usize,
    j: usize,
    grid: &[f64],
    p0: &NormalInverseGammaParams,
    destd: (f64, f64),
) -> Vec<f64> {
    let rs = slice(records, m);
    assert!(!rs.is_empty());
    let (mean_m, sd_m) = destd;
    grid.iter()
        .map(|&x| {
            let x_std = (x - mean_m) / sd_m;
            let avg: f64 = rs
                .iter()
                .map(|r| state_predictive(r, j, p0, x_std))
                .sum::<f64>()
                / rs.len() as f64;
            avg / sd_m
        })
        .collect()
}

/// Canonical patient partition of one sample.
pub fn sample_patient_partition(r: &SampleRecord, signed: bool) -> SetPartition {
    let keys = patient_keys(r, signed);
    let mut map: HashMap<(u64, i8), usize> = HashMap::new();
    let mut labels = Vec::with_capacity(keys.len());
    for k in keys {
        let next = map.len();
        labels.push(*map.entry(k).or_insert(next));
    }
    SetPartition::from_labels(&labels)
}

/// Pairwise-loss point estimate of the patient clustering. Candidates are the
/// partitions visited by the chain plus average-linkage cuts of the
/// co-clustering matrix at probability thresholds 0.3, 0.5 and 0.7.
pub fn binder_point_estimate(
    records: &[SampleRecord],
    m: usize,
    coclust: &[Vec<f64>],
    signed: bool,
) -> SetPartition {
    let rs = slice(records, m);
    assert!(!rs.is_empty());
    let mut candidates: Vec<SetPartition> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for r in &rs {
        let p = sample_patient_partition(r, signed);
        if seen.insert(p.clone()) {
            candidates.push(p);
        }
    }
    let n = coclust.len();
    let dissim: Vec<Vec<f64>> = coclust
        .iter()
        .map(|row| row.iter().map(|v| 1.0 - v).collect())
        .collect();
    let merges = linkage::average_linkage(&dissim);
    for threshold in [0.3, 0.5, 0.7] {
        let p = linkage::cut(&merges, n, 1.0 - threshold);
        if seen.insert(p.clone()) {
            candidates.push(p);
        }
    }
    binder_estimate(coclust, &candidates).expect("candidates are non-empty")
}

/// Effective sample size from the initial-positive autocorrelation sum.
pub fn ess(draws: &[f64]) -> f64 {
    let n = draws.len();
    if n < 3 {
        return n as f64;
    }
    let nf = n as f64;
    let mean = draws.iter().sum::<f64>() / nf;
    let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / nf;
    if var <= 0.0 {
        return nf;
    }
    let mut acf_sum = 0.0;
    for k in 1..n.min(1_000) {
        let cov: f64 = (0..n - k)
            .map(|i| (draws[i] - mean) * (draws[i + k] - mean))
            .sum::<f64>()
            / nf;
        let rho = cov / var;
        if rho <= 0.0 {
            break;
        }
        acf_sum += rho;
    }
    (nf / (1.0 + 2.0 * acf_sum)).min(nf)
}

/// Everything reported for one response.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub response: String,
    pub partition_probs: PartitionDistribution,
    pub ordered_partition_probs: Vec<OrderedPartitionProb>,
    /// Entropy of the partition posterior, base `Bell(J)`.
    pub entropy: f64,
    pub coclust: Vec<Vec<f64>>,
    pub cluster_count_pmf: Vec<(usize, f64)>,
    pub theta_ci: Vec<CredibleInterval>,
    pub density_grid: Vec<f64>,
    /// Per-population density values over `density_grid`.
    pub densities: Vec<Vec<f64>>,
    pub binder: SetPartition,
    pub theta_ess: Vec<f64>,
}

impl PosteriorSummary {
    pub fn compute(records: &[SampleRecord], m: usize, ctx: &SummaryContext) -> Self {
        let partition_probs = tabulate_partitions(records, m);
        let n_partitions = partition_probs.entries().len() as f64;
        let entropy = partition_probs.entropy(n_partitions);
        let coclust = coclustering_matrix(records, m, ctx.signed_coclustering);
        let binder = binder_point_estimate(records, m, &coclust, ctx.signed_coclustering);
        let destd = ctx.standardization[m];
        let grid = ctx.density_grid(m);
        let densities = (0..ctx.n_populations())
            .map(|j| density_estimate(records, m, j, &grid, &ctx.atom_priors[m], destd))
            .collect();
        let rs = slice(records, m);
        let theta_ess = (0..ctx.n_populations())
            .map(|j| {
                let draws: Vec<f64> = rs.iter().map(|r| r.theta[j]).collect();
                ess(&draws)
            })
            .collect();
        PosteriorSummary {
            response: ctx.response_labels[m].clone(),
            partition_probs,
            ordered_partition_probs: tabulate_ordered_partitions(records, m),
            entropy,
            coclust,
            cluster_count_pmf: cluster_count_posterior(records, m),
            theta_ci: theta_credible_intervals(records, m, ctx.level, destd),
            density_grid: grid,
            densities,
            binder,
            theta_ess,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::FranchiseSnapshot;
    use crate::shdp::DishAtom;

    /// Hand-built record: J=2 populations of 2 patients each, two menu pairs.
    fn record(
        iter: u64,
        theta: Vec<f64>,
        labels: &[usize],
        dishes: Vec<u64>,
        signs: Vec<i8>,
        atoms: Vec<DishAtom>,
        ell: Vec<usize>,
        tables: Vec<Vec<(usize, usize)>>,
    ) -> SampleRecord {
        SampleRecord {
            iter,
            m: 0,
            theta,
            partition: SetPartition::from_labels(labels),
            dish_label_per_patient: dishes,
            sign_per_patient: signs,
            omega: 1.0,
            franchise: FranchiseSnapshot {
                atoms,
                dish_ids: ell.iter().enumerate().map(|(i, _)| i as u64).collect(),
                ell,
                tables,
                gamma: vec![1.0, 1.0],
                alpha: 1.0,
            },
        }
    }

    fn simple_records() -> Vec<SampleRecord> {
        let atom = DishAtom::new(0.0, 1.0);
        let mk = |iter, theta: Vec<f64>, labels: &[usize], dishes: Vec<u64>| {
            record(
                iter,
                theta,
                labels,
                dishes,
                vec![1, 1, 1, 1],
                vec![atom],
                vec![2],
                vec![vec![(2, 0)], vec![(2, 0)]],
            )
        };
        vec![
            mk(1, vec![0.0, 1.0], &[0, 1], vec![7, 7, 7, 7]),
            mk(2, vec![0.0, 1.0], &[0, 1], vec![7, 7, 7, 7]),
            mk(3, vec![0.5, 0.5], &[0, 0], vec![7, 7, 9, 9]),
            mk(4, vec![1.5, 0.5], &[0, 1], vec![7, 7, 7, 7]),
        ]
    }

    #[test]
    fn partition_tabulation_counts() {
        let recs = simple_records();
        let dist = tabulate_partitions(&recs, 0);
        assert_eq!(dist.entries().len(), 2); // Bell(2)
        assert!((dist.prob_of(&SetPartition::from_labels(&[0, 1])) - 0.75).abs() < 1e-12);
        assert!((dist.prob_of(&SetPartition::coarsest(2)) - 0.25).abs() < 1e-12);
        let (map, p) = dist.map_partition();
        assert_eq!(map.labels(), &[0, 1]);
        assert!((p - 0.75).abs() < 1e-12);
    }

    #[test]
    fn ordered_masses_refine_unordered() {
        let recs = simple_records();
        let ordered = tabulate_ordered_partitions(&recs, 0);
        // {1}{2} splits into theta1<theta2 (2 samples) and theta1>theta2 (1).
        let total_two_block: f64 = ordered
            .iter()
            .filter(|o| o.partition.n_blocks() == 2)
            .map(|o| o.prob)
            .sum();
        assert!((total_two_block - 0.75).abs() < 1e-12);
        let asc = ordered
            .iter()
            .find(|o| o.partition.n_blocks() == 2 && o.ranks == vec![0, 1])
            .unwrap();
        assert!((asc.prob - 0.5).abs() < 1e-12);
        let names = vec!["A".to_string(), "B".to_string()];
        assert_eq!(format_ordered(&asc.partition, &asc.ranks, &names), "{A}<{B}");
        let desc = ordered
            .iter()
            .find(|o| o.partition.n_blocks() == 2 && o.ranks == vec![1, 0])
            .unwrap();
        assert_eq!(format_ordered(&desc.partition, &desc.ranks, &names), "{A}>{B}");
    }

    #[test]
    fn coclustering_basics() {
        let recs = simple_records();
        let c = coclustering_matrix(&recs, 0, false);
        assert_eq!(c[0][0], 1.0);
        // Patients 0,1 always share: 1.0. Patients 0,2 share in 3/4.
        assert!((c[0][1] - 1.0).abs() < 1e-12);
        assert!((c[0][2] - 0.75).abs() < 1e-12);
        // Symmetric.
        assert_eq!(c[2][0], c[0][2]);
    }

    #[test]
    fn cluster_counts_and_quantiles() {
        let recs = simple_records();
        let pmf = cluster_count_posterior(&recs, 0);
        let total: f64 = pmf.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(pmf, vec![(1, 1.0)]);

        let cis = theta_credible_intervals(&recs, 0, 0.95, (0.0, 1.0));
        assert_eq!(cis.len(), 2);
        // Constant draws collapse the interval.
        let const_recs: Vec<SampleRecord> = recs[..2].to_vec();
        let ci = theta_credible_intervals(&const_recs, 0, 0.5, (0.0, 1.0));
        assert_eq!(ci[0].lower, ci[0].upper);
        assert_eq!(ci[0].mean, 0.0);
    }

    #[test]
    fn normal_quantiles_recovered() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(12);
        let atom = DishAtom::new(0.0, 1.0);
        let recs: Vec<SampleRecord> = (0..100_000)
            .map(|i| {
                let t: f64 = {
                    let (u1, u2): (f64, f64) = (rng.gen(), rng.gen());
                    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
                };
                record(
                    i,
                    vec![t, 0.0],
                    &[0, 1],
                    vec![1, 1, 1, 1],
                    vec![1, 1, 1, 1],
                    vec![atom],
                    vec![2],
                    vec![vec![(2, 0)], vec![(2, 0)]],
                )
            })
            .collect();
        let ci = &theta_credible_intervals(&recs, 0, 0.95, (0.0, 1.0))[0];
        assert!((ci.lower + 1.96).abs() < 0.03, "lower {}", ci.lower);
        assert!((ci.upper - 1.96).abs() < 0.03, "upper {}", ci.upper);
    }

    #[test]
    fn density_integrates_to_one_and_is_even_in_residual() {
        let p0 = NormalInverseGammaParams::new(0.0, 1.0, 2.0, 4.0);
        let atom = DishAtom::new(0.8, 0.6);
        let rec = record(
            1,
            vec![0.4, -0.2],
            &[0, 1],
            vec![0, 0, 0, 0],
            vec![1, 1, -1, 1],
            vec![atom],
            vec![2],
            vec![vec![(2, 0)], vec![(2, 0)]],
        );
        let recs = vec![rec];
        let grid: Vec<f64> = (0..2001).map(|i| -15.0 + 30.0 * i as f64 / 2000.0).collect();
        let f = density_estimate(&recs, 0, 0, &grid, &p0, (0.0, 1.0));
        let step = grid[1] - grid[0];
        let mass: f64 = f.iter().sum::<f64>() * step;
        assert!((mass - 1.0).abs() < 1e-2, "mass {mass}");
        // Error-component symmetry: density even around theta_j.
        let theta = 0.4;
        for &d in &[0.3, 1.1, 2.5] {
            let fp = density_estimate(&recs, 0, 0, &[theta + d], &p0, (0.0, 1.0))[0];
            let fm = density_estimate(&recs, 0, 0, &[theta - d], &p0, (0.0, 1.0))[0];
            assert!((fp - fm).abs() < 1e-12);
        }
    }

    /// A state with one centered unit-variance pair and vanishing
    /// concentrations is exactly a standard normal around theta.
    #[test]
    fn density_degenerates_to_single_kernel() {
        let p0 = NormalInverseGammaParams::new(0.0, 1.0, 2.0, 4.0);
        let mut rec = record(
            1,
            vec![0.0, 0.0],
            &[0, 1],
            vec![0, 0, 0, 0],
            vec![1, 1, 1, 1],
            vec![DishAtom::new(0.0, 1.0)],
            vec![2],
            vec![vec![(2, 0)], vec![(2, 0)]],
        );
        rec.franchise.gamma = vec![1e-12, 1e-12];
        let recs = vec![rec];
        for &x in &[0.0, 0.7, -1.3] {
            let f = density_estimate(&recs, 0, 0, &[x], &p0, (0.0, 1.0))[0];
            let expect = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
            assert!((f - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn binder_recovers_two_clear_blocks() {
        // Three samples always splitting patients {0,1} vs {2,3}.
        let atom = DishAtom::new(0.0, 1.0);
        let recs: Vec<SampleRecord> = (0..3)
            .map(|i| {
                record(
                    i,
                    vec![0.0, 0.0],
                    &[0, 1],
                    vec![4, 4, 9, 9],
                    vec![1, 1, 1, 1],
                    vec![atom, atom],
                    vec![1, 1],
                    vec![vec![(2, 0)], vec![(2, 1)]],
                )
            })
            .collect();
        let c = coclustering_matrix(&recs, 0, false);
        let b = binder_point_estimate(&recs, 0, &c, false);
        assert_eq!(b.labels(), &[0, 0, 1, 1]);
    }

    #[test]
    fn ess_detects_correlation() {
        let iid: Vec<f64> = (0..4000)
            .map(|i| ((i * 2654435761u64 as usize) % 1000) as f64 / 1000.0)
            .collect();
        let e = ess(&iid);
        assert!(e > 2000.0, "iid-ish ess {e}");
        let correlated: Vec<f64> = (0..4000).map(|i| (i / 200) as f64).collect();
        assert!(ess(&correlated) < 100.0);
        assert_eq!(ess(&[1.0, 1.0, 1.0, 1.0]), 4.0);
    }
}

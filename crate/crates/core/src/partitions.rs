//! Set partitions of ordered populations.
//!
//! A model for `J` severity-ordered populations is a partition of `{1..J}`:
//! populations in the same block share a location parameter. This module
//! provides the combinatorics (enumeration in restricted-growth form), the
//! Dirichlet-process partition law, the order-restricted prior that puts mass
//! only on partitions whose blocks are contiguous runs of the severity order,
//! the sequential tie/new predictive weights that generate it, and
//! decision-theoretic summaries (entropy, Binder point estimates).

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::util::{ln_gamma, ln_rising, log_sum_exp};

/// Enumeration is bounded by Bell-number growth; Bell(8) = 4140.
pub const MAX_ITEMS: usize = 8;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("item count {0} outside supported range 1..={MAX_ITEMS}")]
    ItemCount(usize),
    #[error("concentration must be positive, got {0}")]
    NonPositiveConcentration(f64),
    #[error("tie weight is defined for population index j in 2..=4, got {0}")]
    UnsupportedIndex(usize),
    #[error("prefix partition has {got} items, expected {expected}")]
    PrefixLength { got: usize, expected: usize },
    #[error("candidate list is empty")]
    NoCandidates,
    #[error("labels are not a valid restricted-growth vector: {0:?}")]
    NotCanonical(Vec<usize>),
}

/// A partition of `n` labeled items in canonical restricted-growth form:
/// `labels[i]` is the block of item `i`, blocks numbered by first occurrence,
/// so `labels[0] == 0` and each label exceeds the running maximum by at most
/// one. Canonical form makes equality, hashing and ordering structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    labels: Vec<usize>,
}

impl SetPartition {
    /// Builds a partition from arbitrary block labels, renumbering blocks by
    /// first occurrence.
    pub fn from_labels(raw: &[usize]) -> Self {
        assert!(!raw.is_empty(), "partition needs at least one item");
        let mut map: Vec<(usize, usize)> = Vec::new();
        let mut labels = Vec::with_capacity(raw.len());
        for &r in raw {
            let next = map.len();
            let canon = match map.iter().find(|(k, _)| *k == r) {
                Some((_, v)) => *v,
                None => {
                    map.push((r, next));
                    next
                }
            };
            labels.push(canon);
        }
        SetPartition { labels }
    }

    /// All items in one block.
    pub fn coarsest(n: usize) -> Self {
        SetPartition { labels: vec![0; n] }
    }

    /// Every item in its own block.
    pub fn finest(n: usize) -> Self {
        SetPartition {
            labels: (0..n).collect(),
        }
    }

    pub fn n_items(&self) -> usize {
        self.labels.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.n_blocks()];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l].push(i);
        }
        blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.n_blocks()];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// The partition restricted to the first `len` items. A canonical prefix
    /// of a canonical label vector is itself canonical.
    pub fn prefix(&self, len: usize) -> Self {
        SetPartition {
            labels: self.labels[..len].to_vec(),
        }
    }

    /// True when every block is a contiguous interval of the item order.
    pub fn is_order_consistent(&self) -> bool {
        // Canonical labels of an interval partition step by 0 or +1.
        self.labels
            .windows(2)
            .all(|w| w[1] == w[0] || w[1] == w[0] + 1)
    }

    /// Renders as block sets in item order, e.g. `{C}{G,M}{S}`.
    pub fn format_with(&self, alphabet: &[String]) -> String {
        assert_eq!(alphabet.len(), self.n_items(), "alphabet length mismatch");
        let mut out = String::new();
        for block in self.blocks() {
            out.push('{');
            for (pos, i) in block.iter().enumerate() {
                if pos > 0 {
                    out.push(',');
                }
                out.push_str(&alphabet[*i]);
            }
            out.push('}');
        }
        out
    }
}

// Serialized as a bare restricted-growth integer vector.
impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.labels.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let labels = Vec::<usize>::deserialize(d)?;
        if labels.is_empty() || labels[0] != 0 {
            return Err(D::Error::custom("labels must start at 0"));
        }
        let mut max = 0usize;
        for &l in &labels[1..] {
            if l > max + 1 {
                return Err(D::Error::custom("labels not in restricted-growth form"));
            }
            max = max.max(l);
        }
        Ok(SetPartition { labels })
    }
}

/// A probability distribution over canonical partitions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionDistribution {
    entries: Vec<(SetPartition, f64)>,
}

impl PartitionDistribution {
    /// Builds from (partition, probability) pairs; probabilities must be
    /// non-negative and sum to one within `1e-12`.
    pub fn new(entries: Vec<(SetPartition, f64)>) -> Self {
        let total: f64 = entries.iter().map(|(_, p)| *p).sum();
        assert!(
            (total - 1.0).abs() < 1e-12,
            "probabilities sum to {total}, expected 1"
        );
        assert!(entries.iter().all(|(_, p)| *p >= 0.0));
        PartitionDistribution { entries }
    }

    pub fn entries(&self) -> &[(SetPartition, f64)] {
        &self.entries
    }

    pub fn prob_of(&self, p: &SetPartition) -> f64 {
        self.entries
            .iter()
            .find(|(q, _)| q == p)
            .map_or(0.0, |(_, pr)| *pr)
    }

    /// Highest-probability entry (first wins on ties).
    pub fn map_partition(&self) -> (&SetPartition, f64) {
        let (p, pr) = self
            .entries
            .iter()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("distribution is non-empty");
        (p, *pr)
    }

    pub fn entropy(&self, base: f64) -> f64 {
        let probs: Vec<f64> = self.entries.iter().map(|(_, p)| *p).collect();
        entropy(&probs, base)
    }
}

/// All partitions of `n` items in canonical form; `Bell(n)` of them.
pub fn enumerate_set_partitions(n: usize) -> Result<Vec<SetPartition>, PartitionError> {
    if n == 0 || n > MAX_ITEMS {
        return Err(PartitionError::ItemCount(n));
    }
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn rec(labels: &mut Vec<usize>, pos: usize, max: usize, out: &mut Vec<SetPartition>) {
        if pos == labels.len() {
            out.push(SetPartition {
                labels: labels.clone(),
            });
            return;
        }
        for l in 0..=max + 1 {
            labels[pos] = l;
            rec(labels, pos + 1, max.max(l), out);
        }
    }
    rec(&mut labels, 1, 0, &mut out);
    Ok(out)
}

/// The `2^(n-1)` partitions whose blocks are contiguous intervals.
pub fn contiguous_partitions(n: usize) -> Result<Vec<SetPartition>, PartitionError> {
    Ok(enumerate_set_partitions(n)?
        .into_iter()
        .filter(SetPartition::is_order_consistent)
        .collect())
}

/// Log probability of `p` under the Dirichlet-process partition law with
/// concentration `omega`:
///
/// ```text
/// P(p) = omega^k / (omega)_J * prod_i (n_i - 1)!
/// ```
///
/// with `(omega)_J` the ascending factorial.
pub fn dp_eppf_log(omega: f64, p: &SetPartition) -> Result<f64, PartitionError> {
    if omega <= 0.0 {
        return Err(PartitionError::NonPositiveConcentration(omega));
    }
    let k = p.n_blocks() as f64;
    let sizes = p.block_sizes();
    let mut ln = k * omega.ln() - ln_rising(omega, p.n_items());
    for s in sizes {
        ln += ln_gamma(s as f64); // (s-1)!
    }
    Ok(ln)
}

/// Log of the restricted-prior normalizer: the sum of
/// `omega^(k-1) * prod (n_i - 1)!` over contiguous partitions of `n` items.
/// For `n = 4` this equals `(omega+2)(omega^2+omega+3)`.
pub fn restricted_log_normalizer(omega: f64, n: usize) -> Result<f64, PartitionError> {
    if omega <= 0.0 {
        return Err(PartitionError::NonPositiveConcentration(omega));
    }
    let terms: Vec<f64> = contiguous_partitions(n)?
        .iter()
        .map(|p| {
            (p.n_blocks() as f64 - 1.0) * omega.ln()
                + p.block_sizes()
                    .iter()
                    .map(|&s| ln_gamma(s as f64))
                    .sum::<f64>()
        })
        .collect();
    Ok(log_sum_exp(&terms))
}

/// The order-restricted prior: mass proportional to the DP partition law on
/// contiguous partitions, exactly zero elsewhere. Entries cover all `Bell(n)`
/// partitions.
pub fn restricted_prior(omega: f64, n: usize) -> Result<PartitionDistribution, PartitionError> {
    let all = enumerate_set_partitions(n)?;
    let log_weights: Vec<f64> = all
        .iter()
        .map(|p| {
            if p.is_order_consistent() {
                dp_eppf_log(omega, p)
            } else {
                Ok(f64::NEG_INFINITY)
            }
        })
        .collect::<Result<_, _>>()?;
    let norm = log_sum_exp(&log_weights);
    let entries = all
        .into_iter()
        .zip(log_weights)
        .map(|(p, lw)| {
            let pr = if lw == f64::NEG_INFINITY {
                0.0
            } else {
                (lw - norm).exp()
            };
            (p, pr)
        })
        .collect();
    Ok(PartitionDistribution::new(entries))
}

/// Probability that location `j` (1-based, `2 <= j <= 4`) ties the previous
/// location, given the partition of locations `1..j-1`, under the restricted
/// prior with `J = 4` populations. Closed forms for the four-population case;
/// see `validate::oracles::tie_weight_by_enumeration` for the generic ratio
/// they were derived from.
pub fn theta_tie_weight(
    omega: f64,
    j: usize,
    prefix: &SetPartition,
) -> Result<f64, PartitionError> {
    if omega <= 0.0 {
        return Err(PartitionError::NonPositiveConcentration(omega));
    }
    if !(2..=4).contains(&j) {
        return Err(PartitionError::UnsupportedIndex(j));
    }
    if prefix.n_items() != j - 1 {
        return Err(PartitionError::PrefixLength {
            got: prefix.n_items(),
            expected: j - 1,
        });
    }
    let w = omega;
    Ok(match j {
        2 => (w * w + 3.0 * w + 6.0) / ((w + 2.0) * (w * w + w + 3.0)),
        3 => {
            if prefix.n_blocks() == 1 {
                (2.0 * w + 6.0) / (w * w + 3.0 * w + 6.0)
            } else {
                (w + 2.0) / (w * w + 2.0 * w + 2.0)
            }
        }
        4 => {
            let l = prefix.labels();
            if l[0] == l[1] && l[1] == l[2] {
                3.0 / (w + 3.0)
            } else if l[0] != l[1] && l[1] == l[2] {
                2.0 / (w + 2.0)
            } else {
                1.0 / (w + 1.0)
            }
        }
        _ => unreachable!(),
    })
}

/// Shannon entropy `sum -p log_base p` with `0 log 0 := 0`. Tolerates the
/// slight rounding of tabulated probability columns.
pub fn entropy(probs: &[f64], base: f64) -> f64 {
    assert!(base > 0.0 && base != 1.0, "invalid entropy base {base}");
    let total: f64 = probs.iter().sum();
    assert!(
        (total - 1.0).abs() < 0.05,
        "probabilities sum to {total}, expected ~1"
    );
    let nats: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    nats / base.ln()
}

/// Pairwise-disagreement loss of a candidate clustering against a
/// co-clustering probability matrix:
/// `sum_{i<i'} | 1[i,i' together] - coclust[i][i'] |`.
pub fn binder_loss(candidate: &SetPartition, coclust: &[Vec<f64>]) -> f64 {
    let n = candidate.n_items();
    let labels = candidate.labels();
    let mut loss = 0.0;
    for i in 0..n {
        for i2 in (i + 1)..n {
            let together = if labels[i] == labels[i2] { 1.0 } else { 0.0 };
            loss += (together - coclust[i][i2]).abs();
        }
    }
    loss
}

/// The candidate minimizing [`binder_loss`]; first wins on exact ties.
pub fn binder_estimate(
    coclust: &[Vec<f64>],
    candidates: &[SetPartition],
) -> Result<SetPartition, PartitionError> {
    if candidates.is_empty() {
        return Err(PartitionError::NoCandidates);
    }
    let n = coclust.len();
    debug_assert!(coclust.iter().all(|row| row.len() == n));
    debug_assert!((0..n).all(|i| (coclust[i][i] - 1.0).abs() < 1e-9));
    let mut best = &candidates[0];
    let mut best_loss = f64::INFINITY;
    for c in candidates {
        assert_eq!(c.n_items(), n, "candidate size mismatch");
        let l = binder_loss(c, coclust);
        if l < best_loss {
            best_loss = l;
            best = c;
        }
    }
    Ok(best.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn enumeration_counts_are_bell_numbers() {
        let bell = [1usize, 2, 5, 15, 52, 203, 877, 4140];
        for (n, &b) in (1..=8).zip(bell.iter()) {
            let parts = enumerate_set_partitions(n).unwrap();
            assert_eq!(parts.len(), b, "n={n}");
            // No duplicates.
            let mut seen = std::collections::HashSet::new();
            for p in &parts {
                assert!(seen.insert(p.clone()));
            }
        }
        assert!(enumerate_set_partitions(0).is_err());
        assert!(enumerate_set_partitions(9).is_err());
    }

    /// Independent enumeration oracle: filter all label vectors in
    /// {0..n-1}^n down to canonical ones.
    #[test]
    fn enumeration_matches_brute_force_for_j5() {
        let n = 5usize;
        let mut count = 0usize;
        let total = n.pow(n as u32);
        'outer: for code in 0..total {
            let mut c = code;
            let mut labels = vec![0usize; n];
            for l in labels.iter_mut() {
                *l = c % n;
                c /= n;
            }
            if labels[0] != 0 {
                continue;
            }
            let mut max = 0usize;
            for &l in &labels[1..] {
                if l > max + 1 {
                    continue 'outer;
                }
                max = max.max(l);
            }
            count += 1;
        }
        assert_eq!(count, 52);
        assert_eq!(enumerate_set_partitions(5).unwrap().len(), 52);
    }

    #[test]
    fn order_consistency_examples() {
        assert!(SetPartition::from_labels(&[0, 0, 1, 1]).is_order_consistent());
        assert!(!SetPartition::from_labels(&[0, 1, 0, 2]).is_order_consistent());
        assert!(SetPartition::finest(4).is_order_consistent());
        for n in 1..=MAX_ITEMS {
            assert_eq!(
                contiguous_partitions(n).unwrap().len(),
                1 << (n - 1),
                "contiguous count at n={n}"
            );
        }
    }

    #[test]
    fn dp_eppf_examples() {
        let p = SetPartition::from_labels(&[0, 0, 1, 2]);
        let lp = dp_eppf_log(1.0, &p).unwrap();
        assert!((lp - (1.0f64 / 24.0).ln()).abs() < 1e-12);

        let one = SetPartition::coarsest(4);
        assert!((dp_eppf_log(1.0, &one).unwrap() - (6.0f64 / 24.0).ln()).abs() < 1e-12);

        assert!((dp_eppf_log(3.7, &SetPartition::coarsest(1)).unwrap()).abs() < 1e-14);
        assert!(dp_eppf_log(0.0, &one).is_err());
    }

    #[test]
    fn dp_eppf_normalizes_up_to_j6() {
        for n in 1..=6 {
            for &omega in &[0.1, 1.0, 10.0] {
                let total: f64 = enumerate_set_partitions(n)
                    .unwrap()
                    .iter()
                    .map(|p| dp_eppf_log(omega, p).unwrap().exp())
                    .sum();
                assert!((total - 1.0).abs() < 1e-12, "n={n} omega={omega}");
            }
        }
    }

    #[test]
    fn restricted_prior_examples() {
        let prior = restricted_prior(1.0, 4).unwrap();
        assert!((prior.prob_of(&SetPartition::coarsest(4)) - 0.4).abs() < 1e-12);
        assert_eq!(prior.prob_of(&SetPartition::from_labels(&[0, 1, 0, 2])), 0.0);
        assert_eq!(prior.entries().len(), 15);
        for &omega in &[0.1, 1.0, 10.0] {
            let prior = restricted_prior(omega, 4).unwrap();
            let total: f64 = prior.entries().iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for (p, pr) in prior.entries() {
                if !p.is_order_consistent() {
                    assert_eq!(*pr, 0.0);
                }
            }
        }
    }

    #[test]
    fn normalizer_is_the_quartic_polynomial_at_j4() {
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        for _ in 0..20 {
            let omega: f64 = rng.gen::<f64>() * 10.0 + 1e-3;
            let z = restricted_log_normalizer(omega, 4).unwrap().exp();
            let poly = (omega + 2.0) * (omega * omega + omega + 3.0);
            assert!((z - poly).abs() / poly < 1e-10, "omega={omega}");
        }
    }

    #[test]
    fn tie_weight_examples() {
        let p1 = SetPartition::coarsest(1);
        assert!((theta_tie_weight(1.0, 2, &p1).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        let all_tied = SetPartition::coarsest(3);
        assert!((theta_tie_weight(1.0, 4, &all_tied).unwrap() - 0.75).abs() < 1e-14);
        assert!(theta_tie_weight(1.0, 5, &SetPartition::coarsest(4)).is_err());
        assert!(theta_tie_weight(1.0, 3, &p1).is_err());
        assert!(theta_tie_weight(-1.0, 2, &p1).is_err());
    }

    /// The sequential tie/new weights must reproduce the restricted-prior mass
    /// of every contiguous partition exactly.
    #[test]
    fn sequential_weights_reproduce_restricted_prior() {
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
                assert!(
                    (mass - prior.prob_of(&p)).abs() < 1e-12,
                    "omega={omega} partition={:?}",
                    labels
                );
            }
        }
    }

    #[test]
    fn entropy_examples() {
        let uniform = vec![1.0 / 15.0; 15];
        assert!((entropy(&uniform, 15.0) - 1.0).abs() < 1e-12);
        let degenerate = {
            let mut v = vec![0.0; 15];
            v[3] = 1.0;
            v
        };
        assert_eq!(entropy(&degenerate, 15.0), 0.0);
        // Published posterior column for the first cardiac index (rounds to
        // three decimals, hence the loose sum check inside `entropy`).
        let ci = [
            0.021, 0.002, 0.002, 0.000, 0.001, 0.463, 0.000, 0.146, 0.000, 0.000, 0.000, 0.233,
            0.000, 0.000, 0.133,
        ];
        assert!((entropy(&ci, 15.0) - 0.501).abs() < 1e-3);
    }

    #[test]
    fn binder_trivial_cases() {
        // Two perfect blocks of three.
        let n = 6;
        let truth = SetPartition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let mut coclust = vec![vec![0.0; n]; n];
        for i in 0..n {
            for i2 in 0..n {
                if truth.labels()[i] == truth.labels()[i2] {
                    coclust[i][i2] = 1.0;
                }
            }
        }
        let candidates = vec![SetPartition::finest(n), truth.clone(), SetPartition::coarsest(n)];
        assert_eq!(binder_estimate(&coclust, &candidates).unwrap(), truth);

        let ones = vec![vec![1.0; n]; n];
        let candidates = vec![SetPartition::coarsest(n), SetPartition::finest(n)];
        assert_eq!(
            binder_estimate(&ones, &candidates).unwrap(),
            SetPartition::coarsest(n)
        );
        assert!(binder_estimate(&ones, &[]).is_err());
    }

    /// Brute force over all Bell(6)=203 candidates with an independent naive
    /// loss computation.
    #[test]
    fn binder_matches_exhaustive_minimizer() {
        let n = 6;
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mut coclust = vec![vec![0.0; n]; n];
        for i in 0..n {
            coclust[i][i] = 1.0;
            for i2 in (i + 1)..n {
                let v: f64 = rng.gen();
                coclust[i][i2] = v;
                coclust[i2][i] = v;
            }
        }
        let candidates = enumerate_set_partitions(n).unwrap();
        let found = binder_estimate(&coclust, &candidates).unwrap();

        // Oracle: naive double loop, independent argmin.
        let mut best: Option<(&SetPartition, f64)> = None;
        for c in &candidates {
            let mut loss = 0.0;
            for i in 0..n {
                for i2 in 0..n {
                    if i2 > i {
                        let ind = if c.labels()[i] == c.labels()[i2] { 1.0 } else { 0.0 };
                        loss += (ind - coclust[i][i2]).abs();
                    }
                }
            }
            match best {
                None => best = Some((c, loss)),
                Some((_, bl)) if loss < bl => best = Some((c, loss)),
                _ => {}
            }
        }
        assert_eq!(&found, best.unwrap().0);
    }

    #[test]
    fn serde_round_trip_is_bare_vector() {
        let p = SetPartition::from_labels(&[0, 0, 1, 2]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[0,0,1,2]");
        let back: SetPartition = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<SetPartition>("[0,2,1]").is_err());
    }

    #[test]
    fn formatting_uses_alphabet() {
        let p = SetPartition::from_labels(&[0, 1, 1, 2]);
        let names: Vec<String> = ["C", "G", "M", "S"].iter().map(|s| s.to_string()).collect();
        assert_eq!(p.format_with(&names), "{C}{G,M}{S}");
    }
}

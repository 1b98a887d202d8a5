//! Exact partition probability functions for the hierarchical and symmetric
//! hierarchical Dirichlet processes.
//!
//! These evaluate the probability of a given multi-population clustering by
//! summing over the latent tables-per-dish counts, which is exponential in the
//! number of occupied cells. They exist as oracles for the generative sampler
//! and the Gibbs conditionals; the production sampler never calls them.

use thiserror::Error;

use super::stirling::stirling1_unsigned_table;
use crate::util::{ln_gamma, ln_rising, log_sum_exp};

/// Exhaustive latent sum is exponential; cap the total count.
pub const MAX_TOTAL: usize = 12;

#[derive(Debug, Error)]
pub enum PeppfError {
    #[error("total count {0} exceeds the exhaustive-sum cap {MAX_TOTAL}")]
    TooLarge(usize),
    #[error("count shape invalid: {0}")]
    Shape(String),
}

fn validate(counts: &[Vec<usize>], gamma: &[f64], alpha: f64) -> Result<usize, PeppfError> {
    if counts.len() != gamma.len() || counts.is_empty() {
        return Err(PeppfError::Shape(
            "one count row per population required".into(),
        ));
    }
    let k = counts[0].len();
    if counts.iter().any(|row| row.len() != k) {
        return Err(PeppfError::Shape("ragged count rows".into()));
    }
    if k == 0 {
        return Err(PeppfError::Shape("no dishes".into()));
    }
    for h in 0..k {
        if counts.iter().map(|row| row[h]).sum::<usize>() == 0 {
            return Err(PeppfError::Shape(format!("dish column {h} is empty")));
        }
    }
    if !(alpha > 0.0) || gamma.iter().any(|&g| !(g > 0.0)) {
        return Err(PeppfError::Shape("concentrations must be positive".into()));
    }
    let n: usize = counts.iter().flatten().sum();
    if n > MAX_TOTAL {
        return Err(PeppfError::TooLarge(n));
    }
    Ok(n)
}

/// Log probability that customers with per-(population, dish) counts
/// `counts[j][h]` exhibit exactly this dish clustering under a hierarchical
/// Dirichlet process with restaurant concentrations `gamma[j]` and menu
/// concentration `alpha`:
///
/// ```text
/// prod_j 1/(gamma_j)_{n_j} * sum_l alpha^k/(alpha)_{|l|}
///     * prod_h (l_{.,h} - 1)! * prod_{j,h} gamma_j^{l_jh} |s(n_jh, l_jh)|
/// ```
///
/// where each `l_jh` ranges over `1..=n_jh` (the per-restaurant ascending
/// factorials of the cluster-count law cancel against the marginal ones).
pub fn hdp_peppf_log(
    counts: &[Vec<usize>],
    gamma: &[f64],
    alpha: f64,
) -> Result<f64, PeppfError> {
    validate(counts, gamma, alpha)?;
    let k = counts[0].len();
    let cells: Vec<(usize, usize, usize)> = (0..counts.len())
        .flat_map(|j| (0..k).map(move |h| (j, h, counts[j][h])))
        .filter(|&(_, _, n)| n > 0)
        .collect();
    let n_max = cells.iter().map(|&(_, _, n)| n).max().unwrap();
    let stirling = stirling1_unsigned_table(n_max);

    let mut prefactor = 0.0;
    for (j, row) in counts.iter().enumerate() {
        prefactor -= ln_rising(gamma[j], row.iter().sum());
    }

    // Walk every vector l with l_cell in 1..=n_cell.
    let mut ell = vec![1usize; cells.len()];
    let mut terms = Vec::new();
    loop {
        let mut ell_dot = vec![0usize; k];
        let mut total = 0usize;
        let mut term = (k as f64) * alpha.ln();
        for (c, &(j, h, n)) in cells.iter().enumerate() {
            let l = ell[c];
            ell_dot[h] += l;
            total += l;
            term += l as f64 * gamma[j].ln() + stirling.ln_abs(n, l);
        }
        term -= ln_rising(alpha, total);
        for &d in &ell_dot {
            term += ln_gamma(d as f64); // (l_{.,h} - 1)!
        }
        terms.push(term);

        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == cells.len() {
                return Ok(prefactor + log_sum_exp(&terms));
            }
            if ell[pos] < cells[pos].2 {
                ell[pos] += 1;
                break;
            }
            ell[pos] = 1;
            pos += 1;
        }
    }
}

/// Log probability of a signed dish clustering under the symmetric hierarchy:
/// the sign pattern is uniform given the unsigned clustering, so the value is
/// the unsigned probability on `n+ + n-` minus `N log 2`.
pub fn shdp_peppf_log(
    counts_plus: &[Vec<usize>],
    counts_minus: &[Vec<usize>],
    gamma: &[f64],
    alpha: f64,
) -> Result<f64, PeppfError> {
    if counts_plus.len() != counts_minus.len()
        || counts_plus
            .iter()
            .zip(counts_minus)
            .any(|(a, b)| a.len() != b.len())
    {
        return Err(PeppfError::Shape("signed count shapes differ".into()));
    }
    let pooled: Vec<Vec<usize>> = counts_plus
        .iter()
        .zip(counts_minus)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
        .collect();
    let n: usize = pooled.iter().flatten().sum();
    Ok(hdp_peppf_log(&pooled, gamma, alpha)? - n as f64 * std::f64::consts::LN_2)
}

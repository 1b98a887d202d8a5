//! Signless Stirling numbers of the first kind and the induced law of the
//! number of Dirichlet-process clusters.

use crate::util::{ln_rising, log_add_exp, log_sum_exp};

/// Largest supported table size.
pub const MAX_N: usize = 2000;

/// Triangular table of `ln |s(n, k)|` for `0 <= k <= n <= nmax`, built from
/// `|s(n+1, k)| = n |s(n, k)| + |s(n, k-1)|` with `|s(0, 0)| = 1`. Stored in
/// log space so row 2000 is still finite.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    rows: Vec<Vec<f64>>,
}

impl StirlingTable {
    pub fn nmax(&self) -> usize {
        self.rows.len() - 1
    }

    /// `ln |s(n, k)|`; negative infinity where the number is zero.
    pub fn ln_abs(&self, n: usize, k: usize) -> f64 {
        assert!(n <= self.nmax() && k <= n, "index ({n},{k}) out of range");
        self.rows[n][k]
    }
}

/// Builds the log-space table up to `nmax` rows.
pub fn stirling1_unsigned_table(nmax: usize) -> StirlingTable {
    assert!(nmax <= MAX_N, "nmax {nmax} exceeds {MAX_N}");
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(nmax + 1);
    rows.push(vec![0.0]); // |s(0,0)| = 1
    for n in 1..=nmax {
        let prev = &rows[n - 1];
        let mut row = vec![f64::NEG_INFINITY; n + 1];
        let ln_n1 = ((n - 1) as f64).ln(); // -inf at n=1 is fine: 0 * |s(1,k)|
        for k in 1..=n {
            let carry = if k <= n - 1 {
                ln_n1 + prev[k]
            } else {
                f64::NEG_INFINITY
            };
            row[k] = log_add_exp(carry, prev[k - 1]);
        }
        rows.push(row);
    }
    StirlingTable { rows }
}

/// Distribution of the number of clusters among `n` draws from a Dirichlet
/// process with concentration `gamma`:
/// `P(K = l) = gamma^l |s(n, l)| / (gamma)_n`, `l = 1..=n`.
pub fn antoniak_pmf(n: usize, gamma: f64) -> Vec<f64> {
    assert!(n >= 1, "need at least one draw");
    assert!(gamma > 0.0, "concentration must be positive");
    let table = stirling1_unsigned_table(n);
    let ln_norm = ln_rising(gamma, n);
    let log_probs: Vec<f64> = (1..=n)
        .map(|l| l as f64 * gamma.ln() + table.ln_abs(n, l) - ln_norm)
        .collect();
    // Exact normalization holds analytically; renormalize to absorb rounding.
    let total = log_sum_exp(&log_probs);
    log_probs.iter().map(|lp| (lp - total).exp()).collect()
}

//! Independent oracles: numerical quadrature, brute-force enumeration and
//! distribution-distance helpers. Everything here deliberately avoids the
//! closed forms and samplers it is used to check.

use crate::conjugate::{GaussianParams, NormalInverseGammaParams};
use crate::partitions::{contiguous_partitions, SetPartition};
use crate::shdp::FranchiseState;
use crate::util::ln_gamma;

const LN_2PI: f64 = 1.8378770664093453;

/// Adaptive Simpson on `[a, b]` with absolute tolerance `eps`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), eps, 48)
}

/// Adaptive Simpson over fixed panels, so a sharp interior peak cannot be
/// stepped over by the first coarse split.
pub fn integrate_panels(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize, eps: f64) -> f64 {
    let step = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * step;
            adaptive_simpson(f, lo, lo + step, eps / panels as f64)
        })
        .sum()
}

/// Log joint marginal of `obs` under the Normal-Inverse-Gamma model by direct
/// two-dimensional quadrature over `(xi, log sigma2)`.
pub fn nig_marginal_quadrature(prior: &NormalInverseGammaParams, obs: &[f64]) -> f64 {
    assert!(!obs.is_empty());
    let n = obs.len() as f64;
    let sum: f64 = obs.iter().sum();
    let ln_inv_gamma = |s2: f64| -> f64 {
        prior.a * prior.b.ln() - ln_gamma(prior.a) - (prior.a + 1.0) * s2.ln() - prior.b / s2
    };
    let outer = |v: f64| -> f64 {
        let s2 = v.exp();
        // Given sigma2 the integrand is Gaussian in xi around the precision-
        // weighted center; integrate a 15-sigma window around it.
        let center = (prior.tau * prior.mu0 + sum) / (prior.tau + n);
        let sd = (s2 / (prior.tau + n)).sqrt();
        let inner = |xi: f64| -> f64 {
            let mut ln = 0.0;
            for &x in obs {
                ln += -0.5 * (LN_2PI + s2.ln() + (x - xi) * (x - xi) / s2);
            }
            ln += -0.5
                * (LN_2PI + (s2 / prior.tau).ln()
                    + (xi - prior.mu0) * (xi - prior.mu0) * prior.tau / s2);
            ln.exp()
        };
        let xi_int = integrate_panels(&inner, center - 15.0 * sd, center + 15.0 * sd, 8, 1e-13);
        // Jacobian of sigma2 = exp(v).
        xi_int * (ln_inv_gamma(s2) + v).exp()
    };
    integrate_panels(&outer, -14.0, 16.0, 24, 1e-12).ln()
}

/// Log marginal of `z` with the location integrated out, by one-dimensional
/// quadrature.
pub fn location_marginal_quadrature(prior: &GaussianParams, z: &[f64], sigmas2: &[f64]) -> f64 {
    assert!(!z.is_empty());
    let mut precision = 1.0 / prior.variance;
    let mut weighted = prior.mean / prior.variance;
    for (&zi, &s2) in z.iter().zip(sigmas2) {
        precision += 1.0 / s2;
        weighted += zi / s2;
    }
    let center = weighted / precision;
    let sd = precision.sqrt().recip();
    let f = |theta: f64| -> f64 {
        let mut ln = -0.5
            * (LN_2PI
                + prior.variance.ln()
                + (theta - prior.mean) * (theta - prior.mean) / prior.variance);
        for (&zi, &s2) in z.iter().zip(sigmas2) {
            ln += -0.5 * (LN_2PI + s2.ln() + (zi - theta) * (zi - theta) / s2);
        }
        ln.exp()
    };
    integrate_panels(&f, center - 15.0 * sd, center + 15.0 * sd, 8, 1e-14).ln()
}

/// Tie probability for population `j` (1-based) by brute-force ratio of
/// restricted-prior masses over the contiguous partitions of four items
/// consistent with `prefix`.
pub fn tie_weight_by_enumeration(omega: f64, j: usize, prefix: &SetPartition) -> f64 {
    let weight = |p: &SetPartition| -> f64 {
        let mut w = omega.powi(p.n_blocks() as i32 - 1);
        for s in p.block_sizes() {
            w *= ln_gamma(s as f64).exp(); // (s-1)!
        }
        w
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for p in contiguous_partitions(4).unwrap() {
        if p.prefix(j - 1) != *prefix {
            continue;
        }
        let w = weight(&p);
        den += w;
        if p.labels()[j - 1] == p.labels()[j - 2] {
            num += w;
        }
    }
    num / den
}

/// Kolmogorov-Smirnov distance between draws and a numeric CDF.
pub fn ks_distance(draws: &mut [f64], cdf: &dyn Fn(f64) -> f64) -> f64 {
    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = draws.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in draws.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Normalized CDF of an unnormalized density on `[0, upper]`, tabulated by
/// trapezoid on a fine grid with linear interpolation between knots.
pub struct NumericCdf {
    grid: Vec<f64>,
    cum: Vec<f64>,
}

impl NumericCdf {
    pub fn build(density: &dyn Fn(f64) -> f64, upper: f64, points: usize) -> Self {
        let grid: Vec<f64> = (0..=points)
            .map(|i| upper * i as f64 / points as f64)
            .collect();
        let vals: Vec<f64> = grid.iter().map(|&x| density(x)).collect();
        let mut cum = vec![0.0f64; grid.len()];
        for i in 1..grid.len() {
            cum[i] = cum[i - 1] + 0.5 * (vals[i] + vals[i - 1]) * (grid[i] - grid[i - 1]);
        }
        let total = *cum.last().unwrap();
        for c in cum.iter_mut() {
            *c /= total;
        }
        NumericCdf { grid, cum }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.grid[0] {
            return 0.0;
        }
        if x >= *self.grid.last().unwrap() {
            return 1.0;
        }
        let idx = self
            .grid
            .partition_point(|&g| g <= x)
            .min(self.grid.len() - 1);
        let (x0, x1) = (self.grid[idx - 1], self.grid[idx]);
        let (c0, c1) = (self.cum[idx - 1], self.cum[idx]);
        c0 + (c1 - c0) * (x - x0) / (x1 - x0)
    }
}

/// Canonical outcome of a generated franchise: the pooled-customer partition
/// by menu pair plus the per-customer sign vector.
pub fn signed_outcome(state: &FranchiseState) -> (SetPartition, Vec<i8>) {
    let mut dish_labels = Vec::new();
    let mut signs = Vec::new();
    for r in &state.restaurants {
        for seat in r.seats.iter().flatten() {
            dish_labels.push(r.tables[seat.table].dish);
            signs.push(seat.sign);
        }
    }
    (SetPartition::from_labels(&dish_labels), signs)
}

/// Per-(population, dish) signed counts for an outcome over populations of
/// the given sizes.
pub fn outcome_counts(
    partition: &SetPartition,
    signs: &[i8],
    sizes: &[usize],
) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let k = partition.n_blocks();
    let mut plus = vec![vec![0usize; k]; sizes.len()];
    let mut minus = vec![vec![0usize; k]; sizes.len()];
    let mut idx = 0;
    for (j, &nj) in sizes.iter().enumerate() {
        for _ in 0..nj {
            let h = partition.labels()[idx];
            if signs[idx] == 1 {
                plus[j][h] += 1;
            } else {
                minus[j][h] += 1;
            }
            idx += 1;
        }
    }
    (plus, minus)
}

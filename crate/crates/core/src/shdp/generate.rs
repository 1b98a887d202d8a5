//! Generative samplers: the sequential franchise scheme and the truncated
//! stick-breaking construction of the symmetric Dirichlet process.

use rand::Rng;
use rand_distr::{Beta, Distribution};

use super::state::{DishAtom, DishPlacement, FranchiseState};
use crate::conjugate::NormalInverseGammaParams;

fn pick_weighted<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    debug_assert!(total > 0.0);
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Samples a franchise configuration forward, one customer at a time: an
/// entering customer joins an occupied table with weight its occupancy or a
/// new one with weight `gamma[j]`; at an occupied table the sign is a fair
/// coin on the table's pair; a new table orders an existing pair with weight
/// its franchise-wide table count or a fresh pair with weight `alpha`, again
/// with a fair sign. Fresh pair atoms are drawn from `base`.
pub fn crf_generate<R: Rng + ?Sized>(
    gamma: &[f64],
    alpha: f64,
    sizes: &[usize],
    base: &NormalInverseGammaParams,
    rng: &mut R,
) -> FranchiseState {
    let mut fr = FranchiseState::new(gamma.to_vec(), alpha, sizes);
    for j in 0..sizes.len() {
        for i in 0..sizes[j] {
            let n_tables = fr.restaurants[j].tables.len();
            let mut w: Vec<f64> = fr.restaurants[j]
                .tables
                .iter()
                .map(|t| t.occupancy as f64)
                .collect();
            w.push(fr.gamma[j]);
            let pick = pick_weighted(&w, rng);
            let sign = if rng.gen_bool(0.5) { 1i8 } else { -1i8 };
            if pick < n_tables {
                fr.seat_existing(j, i, pick, sign);
            } else {
                let mut dw: Vec<f64> = fr.menu.iter().map(|e| e.tables as f64).collect();
                dw.push(fr.alpha);
                let dpick = pick_weighted(&dw, rng);
                let placement = if dpick < fr.menu.len() {
                    DishPlacement::Existing(dpick)
                } else {
                    let (xi, sigma2) = base.sample(rng);
                    DishPlacement::New(DishAtom::new(xi, sigma2))
                };
                fr.seat_new_table(j, i, placement, sign);
            }
        }
    }
    fr
}

/// A truncated symmetric Dirichlet process: `2K` weighted signed atoms plus
/// the untouched tail mass.
#[derive(Debug, Clone)]
pub struct SdpTruncation {
    /// `(weight, atom)`, atoms emitted in `+,-` pairs with equal weights.
    pub atoms: Vec<(f64, DishAtom)>,
    /// `prod_{h<=K} (1 - v_h)`; emitted mass plus tail is exactly one.
    pub tail_mass: f64,
}

/// Stick-breaking with pair splitting: stick fractions `v_h ~ Beta(1, alpha)`
/// and each broken piece is shared equally by the two signed copies of an
/// atom from `base`.
pub fn stick_breaking_sdp<R: Rng + ?Sized, F: FnMut(&mut R) -> DishAtom>(
    alpha: f64,
    mut base: F,
    truncation: usize,
    rng: &mut R,
) -> SdpTruncation {
    assert!(truncation >= 1, "truncation must be at least 1");
    assert!(alpha > 0.0);
    let beta = Beta::new(1.0, alpha).unwrap();
    let mut atoms = Vec::with_capacity(2 * truncation);
    let mut remaining = 1.0f64;
    for _ in 0..truncation {
        let v = beta.sample(rng);
        let piece = v * remaining;
        remaining *= 1.0 - v;
        let atom = base(rng);
        atoms.push((piece / 2.0, atom));
        atoms.push((piece / 2.0, atom.negated()));
    }
    SdpTruncation {
        atoms,
        tail_mass: remaining,
    }
}

impl SdpTruncation {
    /// Draws one residual from the truncated measure, resolving the tail by a
    /// fresh symmetrized draw from `base`.
    pub fn sample_residual<R: Rng + ?Sized, F: FnMut(&mut R) -> DishAtom>(
        &self,
        mut base: F,
        rng: &mut R,
    ) -> f64 {
        let u = rng.gen::<f64>();
        let mut acc = 0.0;
        let mut chosen: Option<DishAtom> = None;
        for (w, atom) in &self.atoms {
            acc += w;
            if u < acc {
                chosen = Some(*atom);
                break;
            }
        }
        let atom = chosen.unwrap_or_else(|| {
            let a = base(rng);
            if rng.gen_bool(0.5) {
                a
            } else {
                a.negated()
            }
        });
        let noise: f64 = rand_distr::StandardNormal.sample(rng);
        atom.xi + atom.sigma2.sqrt() * noise
    }
}

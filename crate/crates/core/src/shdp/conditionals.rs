//! Gibbs full conditionals for the franchise latent variables.
//!
//! All weights are returned in log space; draw with
//! `util::sample_categorical_log` (max-subtraction), since residuals can sit
//! many standard deviations out during burn-in.

use rand::Rng;

use super::state::{DishAtom, FranchiseState};
use crate::conjugate::{
    nig_marginal_loglik, nig_update, normal_logpdf, GaussianParams, NormalInverseGammaParams,
};
use crate::util::{log_add_exp, log_sum_exp};

/// Log density of a residual against a dish *pair*: the equal mixture of the
/// stored atom and its mirror.
pub fn pair_logpdf(atom: &DishAtom, eps: f64) -> f64 {
    let plus = normal_logpdf(eps, &GaussianParams::new(atom.xi, atom.sigma2));
    let minus = normal_logpdf(eps, &GaussianParams::new(-atom.xi, atom.sigma2));
    log_add_exp(plus, minus) - std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableChoice {
    Existing(usize),
    New,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DishChoice {
    Existing(usize),
    New,
}

/// Table assignment weights for a detached customer of restaurant `j` with
/// residual `eps`: an occupied table scores its occupancy times the pair
/// density; a new table scores `gamma[j]` times the menu predictive (existing
/// pairs weighted by their table counts, a fresh pair by `alpha` through the
/// prior predictive).
pub fn table_full_conditional(
    state: &FranchiseState,
    j: usize,
    eps: f64,
    prior: &NormalInverseGammaParams,
) -> Vec<(TableChoice, f64)> {
    let total_tables = state.total_tables() as f64;
    let ln_denom = (total_tables + state.alpha).ln();
    let mut out: Vec<(TableChoice, f64)> = state.restaurants[j]
        .tables
        .iter()
        .enumerate()
        .map(|(t, table)| {
            let lw =
                (table.occupancy as f64).ln() + pair_logpdf(&state.menu[table.dish].atom, eps);
            (TableChoice::Existing(t), lw)
        })
        .collect();
    let mut parts: Vec<f64> = state
        .menu
        .iter()
        .map(|e| (e.tables as f64).ln() - ln_denom + pair_logpdf(&e.atom, eps))
        .collect();
    parts.push(state.alpha.ln() - ln_denom + nig_marginal_loglik(prior, &[eps]));
    out.push((TableChoice::New, state.gamma[j].ln() + log_sum_exp(&parts)));
    out
}

/// Menu weights for the dish of a freshly opened table with a single customer
/// residual `eps`: existing pair `h` scores its table count times the pair
/// density, a new pair scores `alpha` times the prior predictive. (The common
/// `1/(|l| + alpha)` factor cancels.)
pub fn new_table_dish_conditional(
    state: &FranchiseState,
    eps: f64,
    prior: &NormalInverseGammaParams,
) -> Vec<(DishChoice, f64)> {
    let mut out: Vec<(DishChoice, f64)> = state
        .menu
        .iter()
        .enumerate()
        .map(|(h, e)| {
            (
                DishChoice::Existing(h),
                (e.tables as f64).ln() + pair_logpdf(&e.atom, eps),
            )
        })
        .collect();
    out.push((
        DishChoice::New,
        state.alpha.ln() + nig_marginal_loglik(prior, &[eps]),
    ));
    out
}

/// Probability that a customer with residual `eps` takes the `+` side of
/// `atom`; the log-density gap collapses to a logistic in `2 eps xi / s2`.
pub fn sign_full_conditional(atom: &DishAtom, eps: f64) -> f64 {
    let d = 2.0 * eps * atom.xi / atom.sigma2;
    1.0 / (1.0 + (-d).exp())
}

/// Dish weights for a table whose current dish has been detached from the
/// counts, given the signed residuals of its customers: existing pair `h`
/// scores its remaining table count times the product of densities at the
/// stored representative, a new pair scores `alpha` times the joint prior
/// predictive.
pub fn dish_full_conditional(
    state: &FranchiseState,
    signed_residuals: &[f64],
    prior: &NormalInverseGammaParams,
) -> Vec<(DishChoice, f64)> {
    let mut out: Vec<(DishChoice, f64)> = state
        .menu
        .iter()
        .enumerate()
        .map(|(h, e)| {
            let lik: f64 = signed_residuals
                .iter()
                .map(|&se| normal_logpdf(se, &GaussianParams::new(e.atom.xi, e.atom.sigma2)))
                .sum();
            (DishChoice::Existing(h), (e.tables as f64).ln() + lik)
        })
        .collect();
    out.push((
        DishChoice::New,
        state.alpha.ln() + nig_marginal_loglik(prior, signed_residuals),
    ));
    out
}

/// Redraws every menu atom from its conjugate posterior given the signed
/// residuals currently eating that pair (grouped by menu slot). A pair with
/// no residuals gets a fresh prior draw.
pub fn resample_atoms<R: Rng + ?Sized>(
    state: &mut FranchiseState,
    signed_by_dish: &[Vec<f64>],
    prior: &NormalInverseGammaParams,
    rng: &mut R,
) {
    assert_eq!(signed_by_dish.len(), state.menu.len());
    for (entry, obs) in state.menu.iter_mut().zip(signed_by_dish) {
        let post = nig_update(prior, obs);
        let (xi, sigma2) = post.sample(rng);
        entry.atom = DishAtom::new(xi, sigma2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shdp::state::DishPlacement;
    use crate::util::sample_categorical_log;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn prior() -> NormalInverseGammaParams {
        NormalInverseGammaParams::new(0.0, 1.0, 2.0, 4.0)
    }

    #[test]
    fn empty_restaurant_forces_new_table_and_fresh_pair() {
        let fr = FranchiseState::new(vec![0.7], 1.9, &[1]);
        let w = table_full_conditional(&fr, 0, 0.3, &prior());
        assert_eq!(w.len(), 1);
        assert!(matches!(w[0].0, TableChoice::New));
        // New-table weight reduces to gamma * hbar(eps) when the menu is empty.
        let expect = 0.7f64.ln() + nig_marginal_loglik(&prior(), &[0.3]);
        assert!((w[0].1 - expect).abs() < 1e-12);
        let d = new_table_dish_conditional(&fr, 0.3, &prior());
        assert_eq!(d.len(), 1);
        assert!(matches!(d[0].0, DishChoice::New));
    }

    #[test]
    fn centered_atom_collapses_pair_to_plain_normal() {
        // At xi = 0 the pair mixture is the plain kernel, so the occupied-
        // table weight is occupancy times N(eps; 0, s2).
        let mut fr = FranchiseState::new(vec![1.0], 1.0, &[2]);
        fr.seat_new_table(0, 0, DishPlacement::New(DishAtom::new(0.0, 1.0)), 1);
        let eps = 0.62;
        let w = table_full_conditional(&fr, 0, eps, &prior());
        let expect = crate::conjugate::normal_logpdf(
            eps,
            &crate::conjugate::GaussianParams::new(0.0, 1.0),
        );
        assert!((w[0].1 - expect).abs() < 1e-12);
    }

    #[test]
    fn table_weights_match_hand_evaluation_on_three_customer_state() {
        // Restaurant 0: table A (2 customers, pair 0), restaurant 1: table B
        // (1 customer, pair 1). Table structure is forced given the dish
        // counts, so the predictive can be written down directly.
        let mut fr = FranchiseState::new(vec![0.8, 1.1], 1.4, &[3, 1]);
        let a0 = DishAtom::new(0.6, 0.9);
        let a1 = DishAtom::new(-1.2, 1.5);
        fr.seat_new_table(0, 0, DishPlacement::New(a0), 1);
        fr.seat_existing(0, 1, 0, -1i8);
        fr.seat_new_table(1, 0, DishPlacement::New(a1), 1);

        let eps = 0.45;
        let w = table_full_conditional(&fr, 0, eps, &prior());
        // Occupied table: 2 * pair density.
        let expect_old = (2.0f64).ln() + pair_logpdf(&a0, eps);
        assert!((w[0].1 - expect_old).abs() < 1e-12);
        // New table: gamma_0 * [ 1/(2+a) pair0 + 1/(2+a) pair1 + a/(2+a) hbar ].
        let a = 1.4f64;
        let expect_new = 0.8f64.ln()
            + log_sum_exp(&[
                (1.0f64 / (2.0 + a)).ln() + pair_logpdf(&a0, eps),
                (1.0f64 / (2.0 + a)).ln() + pair_logpdf(&a1, eps),
                (a / (2.0 + a)).ln() + nig_marginal_loglik(&prior(), &[eps]),
            ]);
        assert!((w[1].1 - expect_new).abs() < 1e-12);
    }

    #[test]
    fn sign_examples() {
        assert_eq!(sign_full_conditional(&DishAtom::new(0.0, 2.0), 1.7), 0.5);
        let p = sign_full_conditional(&DishAtom::new(1.0, 1.0), 1.0);
        assert!((p - 1.0 / (1.0 + (-2.0f64).exp())).abs() < 1e-12);
        assert!((p - 0.8808).abs() < 1e-4);
        // Antisymmetry.
        let atom = DishAtom::new(0.7, 0.8);
        let lhs = sign_full_conditional(&atom, 0.33);
        let rhs = 1.0 - sign_full_conditional(&atom, -0.33);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn dish_weights_trivial_and_flip_invariant() {
        // Lone table, empty menu after detachment: new dish certain.
        let mut fr = FranchiseState::new(vec![1.0], 1.0, &[1]);
        fr.seat_new_table(0, 0, DishPlacement::New(DishAtom::new(0.2, 1.0)), 1);
        let _detach = fr.detach_table_dish(0, 0);
        let w = dish_full_conditional(&fr, &[0.4], &prior());
        assert_eq!(w.len(), 1);
        assert!(matches!(w[0].0, DishChoice::New));

        // Global sign flip of residuals combined with a sign flip of the
        // customers leaves the signed residuals, hence the weights, unchanged.
        let mut fr = FranchiseState::new(vec![1.0], 1.0, &[3]);
        fr.seat_new_table(0, 0, DishPlacement::New(DishAtom::new(0.9, 1.1)), 1);
        fr.seat_existing(0, 1, 0, 1i8);
        fr.seat_new_table(0, 2, DishPlacement::New(DishAtom::new(-0.4, 0.7)), -1i8);
        let _detach = fr.detach_table_dish(0, 0);
        let signed = [0.5, -0.2];
        let w1 = dish_full_conditional(&fr, &signed, &prior());
        let w2 = dish_full_conditional(&fr, &signed, &prior());
        for (a, b) in w1.iter().zip(&w2) {
            assert_eq!(a.1, b.1);
        }
    }

    /// Composing the table choice with the new-table dish choice reproduces
    /// the one-step predictive evaluated directly, on a state whose latent
    /// table counts are forced.
    #[test]
    fn composition_matches_direct_predictive() {
        let mut fr = FranchiseState::new(vec![0.8, 1.1], 1.4, &[2, 1]);
        let a0 = DishAtom::new(0.6, 0.9);
        let a1 = DishAtom::new(-1.2, 1.5);
        fr.seat_new_table(0, 0, DishPlacement::New(a0), 1);
        fr.seat_new_table(1, 0, DishPlacement::New(a1), 1);

        // Probability that a new customer of restaurant 0 eats pair 0,
        // pair 1, or a fresh pair, via table + dish composition.
        let eps = -0.8;
        let tw = table_full_conditional(&fr, 0, eps, &prior());
        let lws: Vec<f64> = tw.iter().map(|(_, w)| *w).collect();
        let norm = log_sum_exp(&lws);
        let p_old_table = (lws[0] - norm).exp(); // table with pair 0
        let p_new_table = (lws[1] - norm).exp();
        let dw = new_table_dish_conditional(&fr, eps, &prior());
        let dlws: Vec<f64> = dw.iter().map(|(_, w)| *w).collect();
        let dnorm = log_sum_exp(&dlws);
        let p_pair0 = p_old_table + p_new_table * (dlws[0] - dnorm).exp();
        let p_pair1 = p_new_table * (dlws[1] - dnorm).exp();
        let p_fresh = p_new_table * (dlws[2] - dnorm).exp();

        // Direct evaluation: with one table per pair the predictive weights
        // are (occupancy + gamma * l_h/(|l|+alpha)) pair_h + gamma *
        // alpha/(|l|+alpha) hbar, normalized.
        let g = 0.8f64;
        let al = 1.4f64;
        let n0 = 1.0f64;
        let f0 = pair_logpdf(&a0, eps).exp();
        let f1 = pair_logpdf(&a1, eps).exp();
        let fh = nig_marginal_loglik(&prior(), &[eps]).exp();
        let w0 = (n0 + g * 1.0 / (2.0 + al)) * f0;
        let w1 = (g * 1.0 / (2.0 + al)) * f1;
        let wf = g * (al / (2.0 + al)) * fh;
        let z = w0 + w1 + wf;
        assert!((p_pair0 - w0 / z).abs() < 1e-12);
        assert!((p_pair1 - w1 / z).abs() < 1e-12);
        assert!((p_fresh - wf / z).abs() < 1e-12);
    }

    /// The implied predictive density of a new residual is exactly even.
    #[test]
    fn predictive_is_sign_symmetric() {
        let mut fr = FranchiseState::new(vec![0.8, 1.1], 1.4, &[2, 1]);
        fr.seat_new_table(0, 0, DishPlacement::New(DishAtom::new(0.6, 0.9)), 1);
        fr.seat_existing(0, 1, 0, -1i8);
        fr.seat_new_table(1, 0, DishPlacement::New(DishAtom::new(-1.2, 1.5)), 1);
        for &e in &[0.17, 0.9, 2.4] {
            let wp = table_full_conditional(&fr, 0, e, &prior());
            let wm = table_full_conditional(&fr, 0, -e, &prior());
            for (a, b) in wp.iter().zip(&wm) {
                assert!((a.1 - b.1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn atom_resampling_shrinks_and_degenerates() {
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        let mut fr = FranchiseState::new(vec![1.0], 1.0, &[1]);
        fr.seat_new_table(0, 0, DishPlacement::New(DishAtom::new(5.0, 5.0)), 1);

        // 1000 signed residuals at exactly +1: posterior mean of xi within
        // 0.05 of 1.
        let obs = vec![1.0; 1000];
        let mut means = 0.0;
        for _ in 0..50 {
            resample_atoms(&mut fr, &[obs.clone()], &prior(), &mut rng);
            means += fr.menu[0].atom.xi;
        }
        assert!((means / 50.0 - 1.0).abs() < 0.05);

        // Degenerate prior pins the draw at (mu0, b/a).
        let tight = NormalInverseGammaParams::new(0.3, 1e8, 1e8, 2.5e8);
        resample_atoms(&mut fr, &[vec![]], &tight, &mut rng);
        assert!((fr.menu[0].atom.xi - 0.3).abs() < 1e-2);
        assert!((fr.menu[0].atom.sigma2 - 2.5).abs() < 1e-2);
    }

    #[test]
    fn categorical_sampling_consumes_weights_deterministically() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let lw = [(0.2f64).ln(), (0.8f64).ln()];
        let i = sample_categorical_log(&lw, &mut rng).unwrap();
        let mut rng2 = ChaCha20Rng::seed_from_u64(4);
        let i2 = sample_categorical_log(&lw, &mut rng2).unwrap();
        assert_eq!(i, i2);
    }
}

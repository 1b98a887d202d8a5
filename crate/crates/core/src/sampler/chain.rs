//! Chain state, sweeps, emission and checkpointing.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::omega::{sample_concentrations, sample_omega_escobar_west, sample_omega_sir};
use super::theta::{sample_theta_labels, ThetaBlock};
use super::{MCMCOptions, ModelConfig, PriorMode, SamplerError};
use crate::conjugate::nig_update;
use crate::data::{atomic_write, standardize, Dataset};
use crate::partitions::SetPartition;
use crate::shdp::{
    dish_full_conditional, new_table_dish_conditional, resample_atoms,
    sign_full_conditional, table_full_conditional, DishAtom, DishChoice, DishPlacement,
    FranchiseState, TableChoice,
};
use crate::util::sample_categorical_log;

const CHECKPOINT_VERSION: u32 = 1;

/// Data in sampler layout: standardized values `[m][j][i]` plus the transform
/// needed to report on the original scale.
#[derive(Debug, Clone)]
pub(crate) struct PreparedData {
    pub x: Vec<Vec<Vec<f64>>>,
    pub sizes: Vec<usize>,
    pub standardization: Vec<(f64, f64)>,
    pub fingerprint: u64,
}

impl PreparedData {
    fn build(ds: &Dataset, config: &ModelConfig) -> Result<Self, SamplerError> {
        let fingerprint = ds.fingerprint();
        let working = if config.standardize {
            standardize(ds)?
        } else {
            ds.clone()
        };
        let standardization = working
            .standardization
            .clone()
            .unwrap_or_else(|| vec![(0.0, 1.0); ds.n_responses()]);
        Ok(PreparedData {
            x: working.values,
            sizes: ds.sizes.clone(),
            standardization,
            fingerprint,
        })
    }

    fn n_responses(&self) -> usize {
        self.x.len()
    }
}

/// All latent variables of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    /// Location values `[m][j]`.
    pub theta: Vec<Vec<f64>>,
    /// Location partition per response.
    pub theta_labels: Vec<SetPartition>,
    /// Franchise per response.
    pub franchise: Vec<FranchiseState>,
    /// Shared location concentration.
    pub omega: f64,
    /// Chain RNG; its cursor travels with the state so resumption continues
    /// the exact stream.
    pub rng: ChaCha20Rng,
}

/// Everything a summary needs from one response slice of one retained sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FranchiseSnapshot {
    /// Menu atoms by slot.
    pub atoms: Vec<DishAtom>,
    /// Stable pair ids by slot.
    pub dish_ids: Vec<u64>,
    /// Franchise-wide tables per pair, by slot.
    pub ell: Vec<usize>,
    /// Per restaurant: `(occupancy, menu slot)` per table.
    pub tables: Vec<Vec<(usize, usize)>>,
    pub gamma: Vec<f64>,
    pub alpha: f64,
}

/// One emitted sample line: response slice `m` of a retained sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub iter: u64,
    pub m: usize,
    pub theta: Vec<f64>,
    pub partition: SetPartition,
    /// Stable pair id of each patient, population-major order.
    pub dish_label_per_patient: Vec<u64>,
    /// Sign of each patient, same order.
    pub sign_per_patient: Vec<i8>,
    pub omega: f64,
    pub franchise: FranchiseSnapshot,
}

/// Versioned chain checkpoint; resuming replays nothing and continues the
/// RNG stream exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub iter: u64,
    pub state: ChainState,
    pub config: ModelConfig,
    pub options: MCMCOptions,
    pub data_fingerprint: u64,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<(), SamplerError> {
        let bytes = serde_json::to_vec(self)?;
        atomic_write(path, &bytes)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Checkpoint, SamplerError> {
        let bytes = std::fs::read(path)?;
        let cp: Checkpoint = serde_json::from_slice(&bytes)?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(SamplerError::Checkpoint(format!(
                "version {} unsupported (expected {CHECKPOINT_VERSION})",
                cp.version
            )));
        }
        Ok(cp)
    }
}

pub struct Chain {
    state: ChainState,
    data: PreparedData,
    config: ModelConfig,
    options: MCMCOptions,
    iter: u64,
}

impl Chain {
    /// Builds and initializes a chain: locations start at per-population
    /// sample means on the finest partition; each restaurant seats everyone
    /// at a single table and all restaurants share one menu pair drawn from
    /// the atom posterior given the initial residuals; concentrations start
    /// at their prior means.
    pub fn new(
        ds: &Dataset,
        config: &ModelConfig,
        options: &MCMCOptions,
    ) -> Result<Chain, SamplerError> {
        options.validate()?;
        config.validate(ds.n_populations(), ds.n_responses())?;
        if ds.sizes.iter().any(|&n| n == 0) {
            return Err(SamplerError::Config("empty population".into()));
        }
        let data = PreparedData::build(ds, config)?;
        let mut rng = ChaCha20Rng::seed_from_u64(options.seed);
        // Chains are distinguished by RNG stream, not seed, so multi-chain
        // runs derive their streams from one master seed.
        rng.set_stream(0);

        let jn = data.sizes.len();
        let mn = data.n_responses();
        let mut theta = Vec::with_capacity(mn);
        let mut theta_labels = Vec::with_capacity(mn);
        let mut franchise = Vec::with_capacity(mn);
        for m in 0..mn {
            let means: Vec<f64> = (0..jn)
                .map(|j| data.x[m][j].iter().sum::<f64>() / data.sizes[j] as f64)
                .collect();
            let mut residuals = Vec::with_capacity(ds.total_patients());
            for j in 0..jn {
                residuals.extend(data.x[m][j].iter().map(|&x| x - means[j]));
            }
            let gamma0 = config.gamma_prior.mean();
            let alpha0 = config.alpha_prior.mean();
            let mut fr = FranchiseState::new(vec![gamma0; jn], alpha0, &data.sizes);
            let post = nig_update(&config.atom_prior_for(m), &residuals);
            let (xi, sigma2) = post.sample(&mut rng);
            for j in 0..jn {
                for i in 0..data.sizes[j] {
                    if fr.restaurants[j].tables.is_empty() {
                        if fr.n_dishes() == 0 {
                            fr.seat_new_table(
                                j,
                                i,
                                DishPlacement::New(DishAtom::new(xi, sigma2)),
                                1,
                            );
                        } else {
                            fr.seat_new_table(j, i, DishPlacement::Existing(0), 1);
                        }
                    } else {
                        fr.seat_existing(j, i, 0, 1i8);
                    }
                }
            }
            fr.audit(&data.sizes).expect("fresh state is consistent");
            theta.push(means);
            theta_labels.push(SetPartition::finest(jn));
            franchise.push(fr);
        }
        let state = ChainState {
            theta,
            theta_labels,
            franchise,
            omega: config.omega_prior.mean(),
            rng,
        };
        Ok(Chain {
            state,
            data,
            config: config.clone(),
            options: *options,
            iter: 0,
        })
    }

    /// Restores a chain from a checkpoint taken on the same data and
    /// configuration.
    pub fn from_checkpoint(cp: Checkpoint, ds: &Dataset) -> Result<Chain, SamplerError> {
        let data = PreparedData::build(ds, &cp.config)?;
        if data.fingerprint != cp.data_fingerprint {
            return Err(SamplerError::Checkpoint(
                "data fingerprint differs from the checkpointed run".into(),
            ));
        }
        Ok(Chain {
            state: cp.state,
            data,
            config: cp.config,
            options: cp.options,
            iter: cp.iter,
        })
    }

    pub fn iteration(&self) -> u64 {
        self.iter
    }

    pub fn options(&self) -> &MCMCOptions {
        &self.options
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    /// Per-response `(mean, sd)` applied before sampling; `(0, 1)` when
    /// standardization is off.
    pub fn standardization(&self) -> &[(f64, f64)] {
        &self.data.standardization
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            iter: self.iter,
            state: self.state.clone(),
            config: self.config.clone(),
            options: self.options,
            data_fingerprint: self.data.fingerprint,
        }
    }

    /// One full sweep: franchise latents for every response, then locations,
    /// then the shared concentration, then restaurant/menu concentrations.
    pub fn step(&mut self) -> Result<(), SamplerError> {
        self.iter += 1;
        let mn = self.data.n_responses();
        for m in 0..mn {
            self.sweep_franchise(m);
        }
        for m in 0..mn {
            self.sweep_theta(m);
        }
        self.sweep_omega();
        for m in 0..mn {
            let ChainState {
                franchise, rng, ..
            } = &mut self.state;
            sample_concentrations(
                &mut franchise[m],
                &self.data.sizes,
                &self.config.gamma_prior,
                &self.config.alpha_prior,
                self.config.tie_gamma,
                rng,
            );
        }
        if self.iter % self.options.audit_interval == 0 {
            self.audit()?;
        }
        Ok(())
    }

    fn sweep_franchise(&mut self, m: usize) {
        let prior = self.config.atom_prior_for(m);
        let ChainState {
            theta,
            franchise,
            rng,
            ..
        } = &mut self.state;
        let fr = &mut franchise[m];
        let x = &self.data.x[m];
        let jn = self.data.sizes.len();

        // Tables and signs, one customer at a time.
        for j in 0..jn {
            for i in 0..self.data.sizes[j] {
                let eps = x[j][i] - theta[m][j];
                let _removed = fr.remove_customer(j, i);
                let weights = table_full_conditional(fr, j, eps, &prior);
                let lw: Vec<f64> = weights.iter().map(|(_, w)| *w).collect();
                let pick = sample_categorical_log(&lw, rng).expect("finite weights");
                match weights[pick].0 {
                    TableChoice::Existing(t) => {
                        let atom = fr.menu[fr.restaurants[j].tables[t].dish].atom;
                        let sign = if rng.gen::<f64>() < sign_full_conditional(&atom, eps) {
                            1i8
                        } else {
                            -1i8
                        };
                        fr.seat_existing(j, i, t, sign);
                    }
                    TableChoice::New => {
                        let dish_weights = new_table_dish_conditional(fr, eps, &prior);
                        let dlw: Vec<f64> = dish_weights.iter().map(|(_, w)| *w).collect();
                        let dpick = sample_categorical_log(&dlw, rng).expect("finite weights");
                        match dish_weights[dpick].0 {
                            DishChoice::Existing(h) => {
                                let atom = fr.menu[h].atom;
                                let sign =
                                    if rng.gen::<f64>() < sign_full_conditional(&atom, eps) {
                                        1i8
                                    } else {
                                        -1i8
                                    };
                                fr.seat_new_table(j, i, DishPlacement::Existing(h), sign);
                            }
                            DishChoice::New => {
                                let sign = if rng.gen_bool(0.5) { 1i8 } else { -1i8 };
                                let post = nig_update(&prior, &[sign as f64 * eps]);
                                let (xi, s2) = post.sample(rng);
                                fr.seat_new_table(
                                    j,
                                    i,
                                    DishPlacement::New(DishAtom::new(xi, s2)),
                                    sign,
                                );
                            }
                        }
                    }
                }
            }
        }

        // Dishes, one table at a time.
        for j in 0..jn {
            for t in 0..fr.restaurants[j].tables.len() {
                let members = fr.customers_at(j, t);
                let signed: Vec<f64> = members
                    .iter()
                    .map(|&i| {
                        let seat = fr.restaurants[j].seats[i].unwrap();
                        seat.sign as f64 * (x[j][i] - theta[m][j])
                    })
                    .collect();
                let _detached = fr.detach_table_dish(j, t);
                let weights = dish_full_conditional(fr, &signed, &prior);
                let lw: Vec<f64> = weights.iter().map(|(_, w)| *w).collect();
                let pick = sample_categorical_log(&lw, rng).expect("finite weights");
                match weights[pick].0 {
                    DishChoice::Existing(h) => fr.attach_table_dish(j, t, DishPlacement::Existing(h)),
                    DishChoice::New => {
                        let post = nig_update(&prior, &signed);
                        let (xi, s2) = post.sample(rng);
                        fr.attach_table_dish(j, t, DishPlacement::New(DishAtom::new(xi, s2)));
                    }
                }
            }
        }

        // Atom refresh from all signed residuals per pair.
        let mut grouped: Vec<Vec<f64>> = vec![Vec::new(); fr.n_dishes()];
        for j in 0..jn {
            for i in 0..self.data.sizes[j] {
                let seat = fr.restaurants[j].seats[i].unwrap();
                let dish = fr.restaurants[j].tables[seat.table].dish;
                grouped[dish].push(seat.sign as f64 * (x[j][i] - theta[m][j]));
            }
        }
        resample_atoms(fr, &grouped, &prior, rng);
    }

    fn sweep_theta(&mut self, m: usize) {
        let g = self.config.location_prior_for(m);
        let ChainState {
            theta,
            theta_labels,
            franchise,
            omega,
            rng,
        } = &mut self.state;
        let fr = &franchise[m];
        let x = &self.data.x[m];
        let jn = self.data.sizes.len();
        let mut z = vec![Vec::new(); jn];
        let mut s2 = vec![Vec::new(); jn];
        for j in 0..jn {
            for i in 0..self.data.sizes[j] {
                let seat = fr.restaurants[j].seats[i].unwrap();
                let atom = fr.menu[fr.restaurants[j].tables[seat.table].dish].atom;
                z[j].push(x[j][i] - seat.sign as f64 * atom.xi);
                s2[j].push(atom.sigma2);
            }
        }
        let mut block = ThetaBlock {
            partition: theta_labels[m].clone(),
            values: theta[m].clone(),
        };
        sample_theta_labels(&mut block, &z, &s2, *omega, &g, self.config.prior_mode, rng);
        theta_labels[m] = block.partition;
        theta[m] = block.values;
    }

    fn sweep_omega(&mut self) {
        let ChainState {
            theta_labels,
            omega,
            rng,
            ..
        } = &mut self.state;
        match self.config.prior_mode {
            PriorMode::Restricted => {
                *omega = sample_omega_sir(
                    theta_labels,
                    &self.config.omega_prior,
                    self.options.omega_pool_size,
                    *omega,
                    rng,
                );
            }
            PriorMode::Dp => {
                let counts: Vec<usize> =
                    theta_labels.iter().map(SetPartition::n_blocks).collect();
                *omega = sample_omega_escobar_west(
                    &counts,
                    self.data.sizes.len(),
                    *omega,
                    &self.config.omega_prior,
                    rng,
                );
            }
            // No concentration parameter under the uniform prior; keep the
            // record field populated with prior draws.
            PriorMode::Uniform => {
                *omega = self.config.omega_prior.sample(rng);
            }
        }
    }

    fn audit(&self) -> Result<(), SamplerError> {
        for m in 0..self.data.n_responses() {
            self.state.franchise[m]
                .audit(&self.data.sizes)
                .map_err(|detail| SamplerError::Audit {
                    iter: self.iter,
                    detail,
                })?;
            let labels = &self.state.theta_labels[m];
            if self.config.prior_mode != PriorMode::Dp && !labels.is_order_consistent() {
                return Err(SamplerError::Audit {
                    iter: self.iter,
                    detail: format!("non-contiguous location partition in response {m}"),
                });
            }
            // Location equality pattern must match the label vector.
            let theta = &self.state.theta[m];
            for a in 0..theta.len() {
                for b in (a + 1)..theta.len() {
                    let same_label = labels.labels()[a] == labels.labels()[b];
                    let same_value = theta[a] == theta[b];
                    if same_label != same_value {
                        return Err(SamplerError::Audit {
                            iter: self.iter,
                            detail: format!("theta/label mismatch in response {m}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn emit(&self, m: usize) -> SampleRecord {
        let fr = &self.state.franchise[m];
        let mut dish_label_per_patient = Vec::with_capacity(self.data.sizes.iter().sum());
        let mut sign_per_patient = Vec::with_capacity(dish_label_per_patient.capacity());
        for (j, r) in fr.restaurants.iter().enumerate() {
            for i in 0..self.data.sizes[j] {
                let seat = r.seats[i].unwrap();
                dish_label_per_patient.push(fr.menu[r.tables[seat.table].dish].id);
                sign_per_patient.push(seat.sign);
            }
        }
        SampleRecord {
            iter: self.iter,
            m,
            theta: self.state.theta[m].clone(),
            partition: self.state.theta_labels[m].clone(),
            dish_label_per_patient,
            sign_per_patient,
            omega: self.state.omega,
            franchise: FranchiseSnapshot {
                atoms: fr.menu.iter().map(|e| e.atom).collect(),
                dish_ids: fr.menu.iter().map(|e| e.id).collect(),
                ell: fr.menu.iter().map(|e| e.tables).collect(),
                tables: fr
                    .restaurants
                    .iter()
                    .map(|r| r.tables.iter().map(|t| (t.occupancy, t.dish)).collect())
                    .collect(),
                gamma: fr.gamma.clone(),
                alpha: fr.alpha,
            },
        }
    }

    fn should_emit(&self) -> bool {
        self.iter > self.options.burn_in
            && (self.iter - self.options.burn_in) % self.options.thin == 0
    }

    /// Advances to `options.iterations`, feeding every retained record to the
    /// sink. Sink failures surface with the chain position attached.
    pub fn run(
        &mut self,
        sink: &mut dyn FnMut(&SampleRecord) -> std::io::Result<()>,
    ) -> Result<(), SamplerError> {
        while self.iter < self.options.iterations {
            self.step()?;
            if self.should_emit() {
                for m in 0..self.data.n_responses() {
                    let record = self.emit(m);
                    sink(&record).map_err(|source| SamplerError::Sink {
                        iter: self.iter,
                        source,
                    })?;
                }
            }
        }
        Ok(())
    }
}

/// Runs a fresh chain to completion and collects the retained records.
pub fn run_chain(
    ds: &Dataset,
    config: &ModelConfig,
    options: &MCMCOptions,
) -> Result<(Vec<SampleRecord>, Chain), SamplerError> {
    let mut chain = Chain::new(ds, config, options)?;
    let mut records = Vec::new();
    chain.run(&mut |r| {
        records.push(r.clone());
        Ok(())
    })?;
    Ok((records, chain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{simulate, Dgp};
    use crate::sampler::GammaParams;
    use crate::conjugate::NormalInverseGammaParams;

    fn small_options(iterations: u64, burn_in: u64, seed: u64) -> MCMCOptions {
        MCMCOptions {
            iterations,
            burn_in,
            thin: 1,
            seed,
            audit_interval: 10,
            omega_pool_size: 64,
            checkpoint_interval: None,
        }
    }

    fn small_data() -> Dataset {
        simulate(Dgp::Main, &[8, 5, 4, 6], 42).unwrap()
    }

    #[test]
    fn init_state_shape_and_determinism() {
        let ds = small_data();
        let config = ModelConfig::default();
        let opts = small_options(10, 5, 3);
        let a = Chain::new(&ds, &config, &opts).unwrap();
        let b = Chain::new(&ds, &config, &opts).unwrap();
        assert_eq!(a.state, b.state);
        // Finest partition and one dish to start.
        assert_eq!(a.state.theta_labels[0].n_blocks(), 4);
        assert_eq!(a.state.franchise[0].n_dishes(), 1);
        assert_eq!(a.state.franchise[0].total_tables(), 4);
        // Initial locations are per-population means of standardized data.
        let std = standardize(&ds).unwrap();
        for j in 0..4 {
            let mean = std.values[0][j].iter().sum::<f64>() / std.values[0][j].len() as f64;
            assert!((a.state.theta[0][j] - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn sweeps_are_deterministic_and_audited() {
        let ds = small_data();
        let config = ModelConfig::default();
        let (rec_a, _) = run_chain(&ds, &config, &small_options(60, 30, 9)).unwrap();
        let (rec_b, _) = run_chain(&ds, &config, &small_options(60, 30, 9)).unwrap();
        assert_eq!(rec_a.len(), 30);
        let ja = serde_json::to_string(&rec_a).unwrap();
        let jb = serde_json::to_string(&rec_b).unwrap();
        assert_eq!(ja, jb);
        let (rec_c, _) = run_chain(&ds, &config, &small_options(60, 30, 10)).unwrap();
        assert_ne!(ja, serde_json::to_string(&rec_c).unwrap());
    }

    #[test]
    fn emission_count_honors_thin() {
        let ds = small_data();
        let config = ModelConfig::default();
        let mut opts = small_options(50, 20, 1);
        opts.thin = 3;
        let (records, _) = run_chain(&ds, &config, &opts).unwrap();
        assert_eq!(records.len(), 10); // iters 23,26,...,50
    }

    #[test]
    fn checkpoint_resume_matches_uninterrupted() {
        let ds = small_data();
        let config = ModelConfig::default();
        let full_opts = small_options(80, 30, 5);
        let (full, _) = run_chain(&ds, &config, &full_opts).unwrap();

        // Stop at 50, checkpoint, resume to 80.
        let mut part_opts = full_opts;
        part_opts.iterations = 50;
        let mut chain = Chain::new(&ds, &config, &part_opts).unwrap();
        let mut first_half = Vec::new();
        chain
            .run(&mut |r| {
                first_half.push(r.clone());
                Ok(())
            })
            .unwrap();
        let mut cp = chain.checkpoint();
        cp.options.iterations = 80;

        let dir = std::env::temp_dir().join(format!("shdp-ckpt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("chain.checkpoint.json");
        cp.save(&path).unwrap();
        let loaded = Checkpoint::load(&path).unwrap();
        let mut resumed = Chain::from_checkpoint(loaded, &ds).unwrap();
        let mut second_half = Vec::new();
        resumed
            .run(&mut |r| {
                second_half.push(r.clone());
                Ok(())
            })
            .unwrap();
        std::fs::remove_dir_all(&dir).unwrap();

        let stitched: Vec<&SampleRecord> = first_half.iter().chain(&second_half).collect();
        assert_eq!(stitched.len(), full.len());
        for (a, b) in stitched.iter().zip(&full) {
            assert_eq!(
                serde_json::to_string(a).unwrap(),
                serde_json::to_string(&b).unwrap()
            );
        }

        // Tampered data is rejected.
        let other = simulate(Dgp::Main, &[8, 5, 4, 6], 43).unwrap();
        let cp2 = resumed.checkpoint();
        assert!(Chain::from_checkpoint(cp2, &other).is_err());
    }

    /// Zeros with an (almost) degenerate atom prior: a thousand sweeps must
    /// run without numerical failure.
    #[test]
    fn smoke_on_degenerate_inputs() {
        let mut ds = small_data();
        for j in ds.values[0].iter_mut() {
            for v in j.iter_mut() {
                *v = 0.0;
            }
        }
        let config = ModelConfig {
            standardize: false,
            atom_prior: NormalInverseGammaParams::new(0.0, 1e6, 1e6, 1e6),
            omega_prior: GammaParams::new(3.0, 3.0),
            ..ModelConfig::default()
        };
        let mut chain = Chain::new(&ds, &config, &small_options(1000, 999, 1)).unwrap();
        let mut n = 0;
        chain
            .run(&mut |r| {
                assert!(r.theta.iter().all(|t| t.is_finite()));
                assert!(r.omega.is_finite());
                n += 1;
                Ok(())
            })
            .unwrap();
        assert_eq!(n, 1);
    }

    #[test]
    fn restricted_mode_requires_four_populations() {
        let ds = small_data();
        let mut bad = ds.clone();
        bad.population_labels.push("5".into());
        bad.sizes.push(3);
        bad.patient_ids.push(vec!["x1".into(), "x2".into(), "x3".into()]);
        bad.values[0].push(vec![0.1, 0.2, 0.3]);
        let config = ModelConfig::default();
        assert!(Chain::new(&bad, &config, &small_options(10, 5, 1)).is_err());
        let dp = ModelConfig {
            prior_mode: PriorMode::Dp,
            ..ModelConfig::default()
        };
        assert!(Chain::new(&bad, &dp, &small_options(10, 5, 1)).is_ok());
    }
}

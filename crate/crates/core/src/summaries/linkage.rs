//! Average-linkage agglomerative clustering over a dissimilarity matrix.
//! Used for similarity-ordered heatmaps and for candidate partitions in the
//! pairwise-loss point estimate.

use crate::partitions::SetPartition;

#[derive(Debug, Clone)]
pub struct Merge {
    /// Node ids; leaves are `0..n`, internal nodes `n + merge index`.
    pub left: usize,
    pub right: usize,
    pub height: f64,
}

/// Lance-Williams average linkage; `n - 1` merges in height order for the
/// naive O(n^3) algorithm, which is fine at cohort scale.
pub fn average_linkage(dissimilarity: &[Vec<f64>]) -> Vec<Merge> {
    let n = dissimilarity.len();
    assert!(n > 0);
    let mut active: Vec<(usize, usize)> = (0..n).map(|i| (i, 1usize)).collect(); // (node id, size)
    let mut dist: Vec<Vec<f64>> = dissimilarity.to_vec();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    let mut next_id = n;
    while active.len() > 1 {
        let mut best = (0usize, 1usize, f64::INFINITY);
        for a in 0..active.len() {
            for b in (a + 1)..active.len() {
                if dist[a][b] < best.2 {
                    best = (a, b, dist[a][b]);
                }
            }
        }
        let (a, b, h) = best;
        let (id_a, size_a) = active[a];
        let (id_b, size_b) = active[b];
        merges.push(Merge {
            left: id_a,
            right: id_b,
            height: h,
        });
        // New cluster distance to the rest: size-weighted average.
        let mut new_row = Vec::with_capacity(active.len() - 1);
        for c in 0..active.len() {
            if c == a || c == b {
                continue;
            }
            let d = (size_a as f64 * dist[a][c] + size_b as f64 * dist[b][c])
                / (size_a + size_b) as f64;
            new_row.push(d);
        }
        // Drop b then a (b > a), append the merged cluster.
        let keep: Vec<usize> = (0..active.len()).filter(|&c| c != a && c != b).collect();
        let mut nd = vec![vec![0.0; keep.len() + 1]; keep.len() + 1];
        for (x, &cx) in keep.iter().enumerate() {
            for (y, &cy) in keep.iter().enumerate() {
                nd[x][y] = dist[cx][cy];
            }
        }
        for (x, &d) in new_row.iter().enumerate() {
            nd[x][keep.len()] = d;
            nd[keep.len()][x] = d;
        }
        let mut na: Vec<(usize, usize)> = keep.iter().map(|&c| active[c]).collect();
        na.push((next_id, size_a + size_b));
        next_id += 1;
        active = na;
        dist = nd;
    }
    merges
}

/// Leaf order of the merge tree (left subtree first).
pub fn leaf_order(merges: &[Merge], n: usize) -> Vec<usize> {
    if n == 1 {
        return vec![0];
    }
    fn walk(node: usize, n: usize, merges: &[Merge], out: &mut Vec<usize>) {
        if node < n {
            out.push(node);
        } else {
            let m = &merges[node - n];
            walk(m.left, n, merges, out);
            walk(m.right, n, merges, out);
        }
    }
    let mut out = Vec::with_capacity(n);
    walk(n + merges.len() - 1, n, merges, &mut out);
    out
}

/// Partition obtained by applying every merge with height at or below the
/// threshold.
pub fn cut(merges: &[Merge], n: usize, threshold: f64) -> SetPartition {
    let mut parent: Vec<usize> = (0..n + merges.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for (k, m) in merges.iter().enumerate() {
        let node = n + k;
        if m.height <= threshold {
            let l = find(&mut parent, m.left);
            let r = find(&mut parent, m.right);
            parent[l] = node;
            parent[r] = node;
        }
    }
    let labels: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    SetPartition::from_labels(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block_matrix() -> Vec<Vec<f64>> {
        // Two tight blocks {0,1,2} and {3,4}, far apart.
        let n = 5;
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let same = (i < 3) == (j < 3);
                d[i][j] = if same { 0.1 } else { 0.9 };
            }
        }
        d
    }

    #[test]
    fn recovers_blocks_at_mid_threshold() {
        let d = block_matrix();
        let merges = average_linkage(&d);
        assert_eq!(merges.len(), 4);
        let p = cut(&merges, 5, 0.5);
        assert_eq!(p.n_blocks(), 2);
        assert_eq!(p.labels(), &[0, 0, 0, 1, 1]);
        // Cutting above everything gives one block; below, singletons.
        assert_eq!(cut(&merges, 5, 2.0).n_blocks(), 1);
        assert_eq!(cut(&merges, 5, 0.01).n_blocks(), 5);
    }

    #[test]
    fn leaf_order_is_a_permutation_grouping_blocks() {
        let d = block_matrix();
        let merges = average_linkage(&d);
        let order = leaf_order(&merges, 5);
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        // Members of the same block are adjacent.
        let pos: Vec<usize> = (0..5).map(|i| order.iter().position(|&x| x == i).unwrap()).collect();
        let block0: Vec<usize> = pos[..3].to_vec();
        assert!(block0.iter().max().unwrap() - block0.iter().min().unwrap() == 2);
    }
}

use super::{allocate, Allocation};
use crate::digraph::{Digraph, DigraphBuilder};
use crate::error::{Error, Result};
use crate::expander::regular_expander_subdigraph;
use crate::tree::RootedOrientedTree;
use crate::treeops::tidy_order;

/// Weighted re-allocation through a blow-up of the core.
///
/// Cluster `i` is replaced by a block of `weights[i]` copies, every core arc
/// by the complete bipartite arc set between the blocks, and the tree is
/// allocated on a regular expander inside the blow-up before projecting each
/// block back onto its cluster. Blocks with larger weight soak up a
/// proportionally larger share of the tree, which is how a later phase
/// corrects cluster imbalances left by an earlier one.
///
/// The root lands on the first copy of `root_target`, so `weights[root_target]`
/// must be positive. Weights may otherwise be zero: such a cluster simply
/// receives no tree vertices at all, since its block is empty. The projection
/// can only merge neighbour images, so the raw degree bound survives and the
/// result still has phi-degree at most 3.
pub fn blowup_allocate(
    t2: &RootedOrientedTree,
    core: &Digraph,
    weights: &[usize],
    root_target: usize,
    seed: u64,
) -> Result<Allocation> {
    let k = core.vertex_count();
    if weights.len() != k {
        return Err(Error::invalid(format!(
            "got {} weights for a core on {k} vertices",
            weights.len()
        )));
    }
    if root_target >= k || weights[root_target] == 0 {
        return Err(Error::invalid(
            "the root's target cluster must exist and have positive weight",
        ));
    }
    let total: usize = weights.iter().sum();
    if total < 12 {
        return Err(Error::invalid(format!(
            "blow-up must have at least 12 vertices to host a regular expander, got {total}"
        )));
    }

    let mut start = Vec::with_capacity(k + 1);
    let mut block_of = Vec::with_capacity(total);
    let mut acc = 0usize;
    for (i, &w) in weights.iter().enumerate() {
        start.push(acc);
        acc += w;
        block_of.extend(std::iter::repeat(i).take(w));
    }
    start.push(acc);

    let mut builder = DigraphBuilder::new(total);
    for i in 0..k {
        for &j in core.out_neighbors(i) {
            let j = j as usize;
            for x in start[i]..start[i + 1] {
                for y in start[j]..start[j + 1] {
                    builder.add(x, y);
                }
            }
        }
    }
    let blowup = builder.build();

    let alpha = blowup.min_semidegree() as f64 / total as f64 - 0.5;
    if alpha <= 0.0 {
        return Err(Error::invalid(format!(
            "blow-up semidegree {} does not exceed half of {total}; the weights starve some block",
            blowup.min_semidegree()
        )));
    }
    let expander = regular_expander_subdigraph(&blowup, &Digraph::empty(total), alpha.min(0.499), seed)
        .map_err(|e| {
            Error::construction("blow-up expander", format!("no regular expander in the blow-up: {e}"))
        })?;

    let order = tidy_order(t2, None)?;
    let raw = allocate(t2, &order, &expander.h, start[root_target], seed)?;
    let projected: Vec<usize> = raw.targets().iter().map(|&x| block_of[x]).collect();
    let phi = Allocation::new(projected, k)?;
    phi.verify_homomorphism(t2, core)
        .expect("blow-up arcs only join blocks whose clusters are core-adjacent");
    assert!(phi.max_phi_degree(t2) <= 3, "projection cannot raise the phi-degree");
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treeops::{random_tree, TreeFamily};

    fn long_path(n: usize) -> RootedOrientedTree {
        let arcs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        RootedOrientedTree::from_arcs(n, 0, &arcs).unwrap()
    }

    #[test]
    fn equal_weights_balance_like_plain_allocation() {
        let core = Digraph::complete(8);
        let t = long_path(40_000);
        let phi = blowup_allocate(&t, &core, &[4; 8], 0, 11).unwrap();
        for i in 0..8 {
            let share = phi.load(i) as f64 / 40_000.0;
            assert!((share - 0.125).abs() < 0.125 * 0.06, "cluster {i} share {share:.4}");
        }
    }

    #[test]
    fn doubled_weight_doubles_the_share() {
        let core = Digraph::complete(8);
        let t = long_path(40_000);
        let mut weights = [2usize; 8];
        weights[1] = 4;
        let mut shares = Vec::new();
        for seed in 0..10 {
            let phi = blowup_allocate(&t, &core, &weights, 0, seed).unwrap();
            shares.push(phi.load(1) as f64 / 40_000.0);
        }
        let mean = shares.iter().sum::<f64>() / shares.len() as f64;
        // Weight 4 out of 18 copies.
        assert!((mean - 4.0 / 18.0).abs() < 4.0 / 18.0 * 0.05, "mean heavy share {mean:.4}");
    }

    #[test]
    fn zero_weight_clusters_receive_nothing() {
        let core = Digraph::complete(6);
        let t = random_tree(500, Some(5), TreeFamily::Uniform, 3).unwrap();
        let mut weights = [4usize; 6];
        weights[5] = 0;
        let phi = blowup_allocate(&t, &core, &weights, 0, 7).unwrap();
        assert_eq!(phi.load(5), 0);
        assert_eq!(phi.loads().iter().sum::<usize>(), 500);
    }

    #[test]
    fn empty_root_block_is_rejected() {
        let core = Digraph::complete(6);
        let t = long_path(10);
        let mut weights = [4usize; 6];
        weights[2] = 0;
        assert!(blowup_allocate(&t, &core, &weights, 2, 1).is_err());
    }

    #[test]
    fn starved_blowup_is_rejected() {
        // A directed 6-cycle core blown up still has semidegree far below
        // half the blow-up order.
        let core = Digraph::from_arcs(6, (0..6).map(|v| (v, (v + 1) % 6))).unwrap();
        let t = long_path(10);
        let err = blowup_allocate(&t, &core, &[3; 6], 0, 1).unwrap_err();
        assert!(err.to_string().contains("semidegree"), "{err}");
    }
}

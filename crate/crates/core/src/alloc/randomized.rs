use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::Allocation;
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::tree::RootedOrientedTree;
use crate::treeops::{max_open_count, AncestralOrder};

/// Randomized vertex allocation along an ancestral order.
///
/// The root goes to `x1`. Walking the order, whenever a vertex with an
/// undefined image is reached, its parent draws one uniform out-neighbour
/// and one uniform in-neighbour of its own image, and every child of that
/// parent is assigned in a single batch: out-children to the out-neighbour,
/// in-children to the in-neighbour. Both draws happen even when one side has
/// no children, so the transcript depends only on the order in which parents
/// first hand off, not on sibling orientations.
///
/// Batching is what keeps images concentrated: each vertex sees at most
/// three distinct images among its neighbours (parent, shared out-child
/// image, shared in-child image), and the root's children occupy at most two
/// images in total. Both bounds are asserted on every run, as is the
/// homomorphism property.
pub fn allocate(
    tree: &RootedOrientedTree,
    order: &AncestralOrder,
    d: &Digraph,
    x1: usize,
    seed: u64,
) -> Result<Allocation> {
    let n = tree.vertex_count();
    max_open_count(tree, &order.order)?;
    if d.min_semidegree() == 0 {
        return Err(Error::invalid(
            "host must have positive minimum semidegree: some vertex has an empty in- or \
             out-neighbourhood",
        ));
    }
    if x1 >= d.vertex_count() {
        return Err(Error::invalid(format!(
            "start vertex {x1} is beyond the host size {}",
            d.vertex_count()
        )));
    }

    let mut rng = StdRng::seed_from_u64(seed);
    let mut target = vec![usize::MAX; n];
    target[order.order[0]] = x1;
    for &t in &order.order[1..] {
        if target[t] != usize::MAX {
            continue;
        }
        let p = tree.parent(t).expect("non-root vertex has a parent");
        let xp = target[p];
        debug_assert_ne!(xp, usize::MAX, "ancestral order allocates parents first");
        let x_out = *d.out_neighbors(xp).choose(&mut rng).expect("semidegree checked") as usize;
        let x_in = *d.in_neighbors(xp).choose(&mut rng).expect("semidegree checked") as usize;
        for &c in tree.children(p) {
            debug_assert_eq!(target[c], usize::MAX, "children are assigned exactly once");
            target[c] = if tree.has_arc(p, c) { x_out } else { x_in };
        }
    }

    let phi = Allocation::new(target, d.vertex_count())?;
    phi.verify_homomorphism(tree, d)
        .expect("batched neighbour draws always produce a homomorphism");
    assert!(phi.max_phi_degree(tree) <= 3, "a raw allocation run must have phi-degree <= 3");
    let root = tree.root();
    for out in [true, false] {
        let mut images =
            tree.children(root).iter().filter(|&&c| tree.has_arc(root, c) == out).map(|&c| {
                phi.target(c)
            });
        if let Some(first) = images.next() {
            assert!(
                images.all(|x| x == first),
                "root children on same-orientation edges must share an image"
            );
        }
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treeops::{random_tree, tidy_order, TreeFamily};

    fn triangle() -> Digraph {
        Digraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn single_vertex_lands_on_the_start() {
        let t = RootedOrientedTree::single_vertex();
        let order = tidy_order(&t, None).unwrap();
        let phi = allocate(&t, &order, &triangle(), 2, 5).unwrap();
        assert_eq!(phi.targets(), &[2]);
    }

    #[test]
    fn star_children_share_the_unique_neighbours() {
        // Root 0 with out-children 1..=5 and in-children 6, 7. On a directed
        // triangle the draws are forced: N+(0) = {1}, N-(0) = {2}.
        let mut arcs: Vec<(usize, usize)> = (1..=5).map(|c| (0, c)).collect();
        arcs.extend([(6, 0), (7, 0)]);
        let t = RootedOrientedTree::from_arcs(8, 0, &arcs).unwrap();
        let order = tidy_order(&t, None).unwrap();
        for seed in 0..5 {
            let phi = allocate(&t, &order, &triangle(), 0, seed).unwrap();
            assert!((1..=5).all(|c| phi.target(c) == 1));
            assert!([6, 7].iter().all(|&c| phi.target(c) == 2));
        }
    }

    #[test]
    fn long_path_on_a_complete_host_balances() {
        let n = 50_000;
        let arcs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let t = RootedOrientedTree::from_arcs(n, 0, &arcs).unwrap();
        let order = tidy_order(&t, None).unwrap();
        let host = Digraph::complete(8);
        for seed in [3, 11, 19] {
            let phi = allocate(&t, &order, &host, 0, seed).unwrap();
            for x in 0..8 {
                let share = phi.load(x) as f64 / n as f64;
                assert!(
                    (share - 0.125).abs() < 0.125 * 0.05,
                    "seed {seed}: cluster {x} holds share {share:.4}"
                );
            }
        }
    }

    #[test]
    fn random_trees_stay_within_degree_three() {
        let host = Digraph::complete(9);
        for seed in 0..10 {
            let t = random_tree(200, Some(6), TreeFamily::Uniform, seed).unwrap();
            let order = tidy_order(&t, None).unwrap();
            let phi = allocate(&t, &order, &host, seed as usize % 9, seed).unwrap();
            assert!(phi.max_phi_degree(&t) <= 3);
            phi.verify_homomorphism(&t, &host).unwrap();
        }
    }

    #[test]
    fn host_with_a_sink_is_rejected() {
        let host = Digraph::from_arcs(2, [(0, 1)]).unwrap();
        let t = RootedOrientedTree::from_arcs(2, 0, &[(0, 1)]).unwrap();
        let order = tidy_order(&t, None).unwrap();
        let err = allocate(&t, &order, &host, 0, 1).unwrap_err();
        assert!(err.to_string().contains("semidegree"), "{err}");
    }

    #[test]
    fn non_ancestral_orders_are_rejected() {
        let t = RootedOrientedTree::from_arcs(3, 0, &[(0, 1), (1, 2)]).unwrap();
        let mut order = tidy_order(&t, None).unwrap();
        order.order.swap(0, 2);
        assert!(allocate(&t, &order, &triangle(), 0, 1).is_err());
    }
}

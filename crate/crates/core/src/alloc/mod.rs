//! Vertex allocations: many-to-one assignments of tree vertices to the
//! vertices of a small host, usually a reduced cluster digraph.
//!
//! An allocation is the combinatorial skeleton of an embedding. It fixes
//! which host vertex (cluster) every tree vertex will land in while ignoring
//! the concrete image inside the cluster; the embedding stage later refines
//! it into an injective map. Quality is measured by the loads: how many tree
//! vertices each host vertex receives.

mod blowup;
mod leaves;
mod paths;
mod randomized;
mod spanning;
mod walks;

pub use blowup::blowup_allocate;
pub use leaves::{allocate_spanning_many_leaves, SpanningLeavesAllocation};
pub use paths::{allocate_spanning_many_paths, SpanningPathsAllocation};
pub use randomized::allocate;
pub use spanning::SpanningParams;
pub use walks::{mixing_bound, random_p_walk, walk_distribution, WalkDistribution};

use serde::Serialize;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::tree::RootedOrientedTree;

/// Tree vertex `v` is assigned to host vertex `targets[v]`; `loads[x]`
/// counts the tree vertices assigned to host vertex `x`. The two views are
/// kept consistent by construction: mutation goes through [`set_target`].
///
/// [`set_target`]: Allocation::set_target
#[derive(Clone, Debug, Serialize)]
pub struct Allocation {
    targets: Vec<usize>,
    loads: Vec<usize>,
}

impl Allocation {
    pub fn new(targets: Vec<usize>, host_count: usize) -> Result<Self> {
        let mut loads = vec![0usize; host_count];
        for (v, &x) in targets.iter().enumerate() {
            if x >= host_count {
                return Err(Error::invalid(format!(
                    "allocation target of tree vertex {v} is {x}, beyond host size {host_count}"
                )));
            }
            loads[x] += 1;
        }
        Ok(Allocation { targets, loads })
    }

    pub fn tree_count(&self) -> usize {
        self.targets.len()
    }

    pub fn host_count(&self) -> usize {
        self.loads.len()
    }

    pub fn target(&self, v: usize) -> usize {
        self.targets[v]
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn load(&self, x: usize) -> usize {
        self.loads[x]
    }

    pub fn loads(&self) -> &[usize] {
        &self.loads
    }

    /// Reassigns tree vertex `v`, keeping the load table exact.
    pub(crate) fn set_target(&mut self, v: usize, x: usize) {
        debug_assert!(x < self.loads.len());
        let old = self.targets[v];
        self.loads[old] -= 1;
        self.loads[x] += 1;
        self.targets[v] = x;
    }

    /// The maximum, over tree vertices `v`, of the number of distinct host
    /// vertices the neighbours of `v` are sent to. Randomised allocation
    /// keeps this small (3 or 4 depending on the construction), which is what
    /// lets the embedding stage reserve candidate sets of useful size.
    pub fn max_phi_degree(&self, tree: &RootedOrientedTree) -> usize {
        assert_eq!(tree.vertex_count(), self.targets.len());
        let mut best = 0;
        let mut images = Vec::new();
        for v in 0..tree.vertex_count() {
            images.clear();
            images.extend(tree.neighbors(v).iter().map(|&u| self.targets[u]));
            images.sort_unstable();
            images.dedup();
            best = best.max(images.len());
        }
        best
    }

    /// Checks that every tree arc maps to a host arc. Host digraphs carry no
    /// loops, so adjacent tree vertices sharing a target is an error too.
    pub fn verify_homomorphism(
        &self,
        tree: &RootedOrientedTree,
        host: &Digraph,
    ) -> Result<()> {
        if tree.vertex_count() != self.targets.len() {
            return Err(Error::invalid(format!(
                "allocation covers {} vertices but the tree has {}",
                self.targets.len(),
                tree.vertex_count()
            )));
        }
        if host.vertex_count() != self.loads.len() {
            return Err(Error::invalid(format!(
                "allocation addresses {} host vertices but the host has {}",
                self.loads.len(),
                host.vertex_count()
            )));
        }
        for &(a, b) in tree.arcs() {
            let (x, y) = (self.targets[a], self.targets[b]);
            if !host.has_arc(x, y) {
                return Err(Error::invalid(format!(
                    "tree arc {a}->{b} maps to {x}->{y}, which is not a host arc"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_follow_targets() {
        let a = Allocation::new(vec![0, 2, 2, 1, 2], 4).unwrap();
        assert_eq!(a.loads(), &[1, 1, 3, 0]);
        assert_eq!(a.tree_count(), 5);
        assert_eq!(a.host_count(), 4);
        assert_eq!(a.target(4), 2);
    }

    #[test]
    fn out_of_range_target_is_rejected() {
        assert!(Allocation::new(vec![0, 5], 4).is_err());
    }

    #[test]
    fn set_target_keeps_loads_exact() {
        let mut a = Allocation::new(vec![0, 0, 1], 3).unwrap();
        a.set_target(1, 2);
        assert_eq!(a.targets(), &[0, 2, 1]);
        assert_eq!(a.loads(), &[1, 1, 1]);
    }

    #[test]
    fn phi_degree_counts_distinct_neighbour_images() {
        // Star: root 0 with out-children 1, 2, 3.
        let star = RootedOrientedTree::from_arcs(4, 0, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        // All children share one image: the root sees 1 class, children see 1.
        let tight = Allocation::new(vec![0, 1, 1, 1], 2).unwrap();
        assert_eq!(tight.max_phi_degree(&star), 1);
        // Children spread over three images: the root sees 3.
        let spread = Allocation::new(vec![0, 1, 2, 3], 4).unwrap();
        assert_eq!(spread.max_phi_degree(&star), 3);
    }

    #[test]
    fn homomorphism_checks_every_arc() {
        // Host: directed triangle 0->1->2->0.
        let host = Digraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        // Tree: path r->a->b, allocated around the triangle.
        let tree = RootedOrientedTree::from_arcs(3, 0, &[(0, 1), (1, 2)]).unwrap();
        let good = Allocation::new(vec![0, 1, 2], 3).unwrap();
        good.verify_homomorphism(&tree, &host).unwrap();

        // 2->0 is an arc but 0->2 is not; reversing the images must fail.
        let bad = Allocation::new(vec![0, 2, 1], 3).unwrap();
        assert!(bad.verify_homomorphism(&tree, &host).is_err());

        // Collapsing an arc onto one host vertex is a loop, also rejected.
        let collapsed = Allocation::new(vec![0, 0, 1], 3).unwrap();
        assert!(collapsed.verify_homomorphism(&tree, &host).is_err());
    }
}

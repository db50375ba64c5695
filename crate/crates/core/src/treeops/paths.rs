use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::tree::RootedOrientedTree;

/// A path in the underlying tree whose interior vertices all have underlying
/// degree 2, listed endpoint to endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarePath {
    pub vertices: Vec<usize>,
}

impl BarePath {
    pub fn len_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn len_edges(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    /// Checks adjacency of consecutive vertices and degree 2 on the interior.
    pub fn is_bare_in(&self, tree: &RootedOrientedTree) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        for w in self.vertices.windows(2) {
            if !tree.has_arc(w[0], w[1]) && !tree.has_arc(w[1], w[0]) {
                return false;
            }
        }
        self.vertices[1..self.vertices.len().saturating_sub(1)]
            .iter()
            .all(|&v| tree.underlying_degree(v) == 2)
    }
}

/// One edge at a leaf: `leaf` has underlying degree 1 and `support` is its
/// unique neighbour. `arc` is oriented as in the tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeafEdge {
    pub leaf: usize,
    pub support: usize,
    pub arc: (usize, usize),
}

/// Decomposes the tree into maximal bare paths: the segments between vertices
/// of underlying degree != 2. Those special vertices are shared between the
/// segments that meet there; every edge lies in exactly one segment.
///
/// Each segment is reported from its lower-numbered endpoint, and segments are
/// listed in increasing order of (start vertex, first step); generators rely
/// on this traversal convention. For a tree with l >= 3 leaves the number of
/// segments p satisfies l <= p <= 2l - 3; a path gives p = 1.
pub fn bare_path_decomposition(tree: &RootedOrientedTree) -> Result<Vec<BarePath>> {
    let n = tree.vertex_count();
    if n < 2 {
        return Err(Error::invalid("bare path decomposition needs at least 2 vertices"));
    }
    let special: Vec<usize> = (0..n).filter(|&v| tree.underlying_degree(v) != 2).collect();
    let mut used: HashSet<(usize, usize)> = HashSet::new();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut paths = Vec::new();
    for &s in &special {
        // neighbour slices are sorted, which fixes the traversal order
        for &first in tree.neighbors(s) {
            if used.contains(&key(s, first)) {
                continue;
            }
            let mut path = vec![s, first];
            used.insert(key(s, first));
            let (mut prev, mut cur) = (s, first);
            while tree.underlying_degree(cur) == 2 {
                let next = tree
                    .neighbors(cur)
                    .iter()
                    .copied()
                    .find(|&u| u != prev)
                    .expect("degree-2 vertex has a second neighbour");
                used.insert(key(cur, next));
                path.push(next);
                prev = cur;
                cur = next;
            }
            paths.push(BarePath { vertices: path });
        }
    }
    debug_assert_eq!(
        paths.iter().map(BarePath::len_edges).sum::<usize>(),
        n - 1,
        "segments must partition the edges"
    );
    Ok(paths)
}

/// Carves vertex-disjoint bare paths of exactly `order_len` vertices out of
/// the maximal segments: floor((len - 1) / (order_len + 1)) blocks per segment
/// of `len` edges, starting one vertex in and separated by one-vertex gaps.
/// Both segment endpoints stay untouched, so blocks from different segments
/// never share a vertex.
pub fn disjoint_bare_paths(
    tree: &RootedOrientedTree,
    order_len: usize,
) -> Result<Vec<BarePath>> {
    if order_len < 3 {
        return Err(Error::invalid("order_len must be at least 3"));
    }
    if tree.vertex_count() < 2 {
        return Ok(Vec::new());
    }
    let stride = order_len + 1;
    let mut out = Vec::new();
    for seg in bare_path_decomposition(tree)? {
        let len = seg.len_edges();
        if len < 2 {
            continue;
        }
        let count = (len - 1) / stride;
        for t in 0..count {
            let start = 1 + t * stride;
            out.push(BarePath { vertices: seg.vertices[start..start + order_len].to_vec() });
        }
    }
    debug_assert!({
        let mut seen = HashSet::new();
        out.iter().flat_map(|p| &p.vertices).all(|&v| seen.insert(v))
    });
    Ok(out)
}

/// A maximum-cardinality set of vertex-disjoint leaf edges. Two leaf edges
/// share a vertex exactly when they share the support (for n >= 3 a leaf is
/// never another leaf's neighbour), so picking one leaf per support is
/// optimal. The lowest-numbered leaf wins for determinism.
pub fn disjoint_leaf_edges(tree: &RootedOrientedTree) -> Result<Vec<LeafEdge>> {
    let n = tree.vertex_count();
    if n < 2 {
        return Err(Error::invalid("leaf edges need at least 2 vertices"));
    }
    let orient = |a: usize, b: usize| if tree.has_arc(a, b) { (a, b) } else { (b, a) };
    if n == 2 {
        return Ok(vec![LeafEdge { leaf: 0, support: 1, arc: orient(0, 1) }]);
    }
    let mut chosen: Vec<LeafEdge> = Vec::new();
    let mut taken = vec![false; n];
    for leaf in 0..n {
        if tree.underlying_degree(leaf) != 1 {
            continue;
        }
        let support = tree.neighbors(leaf)[0];
        if taken[support] {
            continue;
        }
        taken[support] = true;
        chosen.push(LeafEdge { leaf, support, arc: orient(leaf, support) });
    }
    Ok(chosen)
}

use crate::error::{Error, Result};
use crate::tree::RootedOrientedTree;
use crate::treeops::split::TreeSplit;

/// A vertex order in which the root comes first and every vertex appears
/// after its parent. `tidy` guarantees that every prefix has at most log2(n)
/// open vertices (vertices in the prefix with a child outside it).
#[derive(Clone, Debug)]
pub struct AncestralOrder {
    pub order: Vec<usize>,
    pub position: Vec<usize>,
    pub tidy: bool,
    /// With a split constraint: order[..boundary] is exactly the first-emitted
    /// side (the smaller one), including the shared root at position 0.
    pub split_boundary: Option<usize>,
}

impl AncestralOrder {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn position_of(&self, v: usize) -> usize {
        self.position[v]
    }
}

/// Builds a tidy ancestral order by visiting children in increasing subtree
/// size. Any open vertex then keeps a pending child at least as large as the
/// subtree currently being walked, so subtree sizes at least double along the
/// chain of open vertices; hence at most log2(n) of them at any prefix.
///
/// With a split {T1, T2} sharing the root, all vertices of the smaller side
/// are emitted before any vertex of the larger side (minus the root). The
/// smaller side spans at most (n+1)/2 vertices, which preserves the log2(n)
/// open bound.
pub fn tidy_order(
    tree: &RootedOrientedTree,
    split: Option<&TreeSplit>,
) -> Result<AncestralOrder> {
    let n = tree.vertex_count();
    let sizes = tree.subtree_sizes();

    // side_of[v]: 1 or 2 for vertices on one side only, 3 for the shared root
    let mut first_side: Option<Vec<bool>> = None;
    let mut boundary = None;
    if let Some(s) = split {
        if s.shared != tree.root() {
            return Err(Error::invalid("split must share the tree root"));
        }
        let mut tag = vec![0u8; n];
        for &v in &s.side1 {
            if v >= n {
                return Err(Error::invalid("split vertex out of range"));
            }
            tag[v] |= 1;
        }
        for &v in &s.side2 {
            if v >= n {
                return Err(Error::invalid("split vertex out of range"));
            }
            tag[v] |= 2;
        }
        let cover_ok = tag
            .iter()
            .enumerate()
            .all(|(v, &t)| if v == s.shared { t == 3 } else { t == 1 || t == 2 });
        let edges_ok = tree
            .arcs()
            .iter()
            .all(|&(u, v)| (tag[u] & tag[v]) != 0);
        if !cover_ok || !edges_ok {
            return Err(Error::invalid("split is not a tree partition"));
        }
        let small = if s.side1.len() <= s.side2.len() { 1u8 } else { 2u8 };
        let in_first: Vec<bool> = tag.iter().map(|&t| t & small != 0).collect();
        boundary = Some(in_first.iter().filter(|&&b| b).count());
        first_side = Some(in_first);
    }

    let mut order = Vec::with_capacity(n);
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        order.push(v);
        let mut kids: Vec<usize> = tree.children(v).to_vec();
        kids.sort_unstable_by_key(|&c| (sizes[c], c));
        if v == tree.root() {
            if let Some(first) = &first_side {
                // larger side below on the stack, smaller side on top
                kids.sort_by_key(|&c| (usize::from(first[c]), std::cmp::Reverse((sizes[c], c))));
            } else {
                kids.reverse();
            }
        } else {
            kids.reverse();
        }
        stack.extend_from_slice(&kids);
    }

    let mut position = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    Ok(AncestralOrder { order, position, tidy: true, split_boundary: boundary })
}

/// Maximum, over all prefixes of `order`, of the number of prefix vertices
/// that still have a child outside the prefix. Errors if the order is not
/// ancestral (root first, each vertex after its parent, a permutation).
pub fn max_open_count(tree: &RootedOrientedTree, order: &[usize]) -> Result<usize> {
    let n = tree.vertex_count();
    if order.len() != n {
        return Err(Error::invalid("order length mismatch"));
    }
    let mut seen = vec![false; n];
    let mut remaining: Vec<usize> = (0..n).map(|v| tree.children(v).len()).collect();
    let mut open = 0usize;
    let mut max_open = 0usize;
    for (i, &v) in order.iter().enumerate() {
        if v >= n || seen[v] {
            return Err(Error::invalid("order is not a permutation"));
        }
        seen[v] = true;
        match tree.parent(v) {
            None => {
                if i != 0 {
                    return Err(Error::invalid("root must come first"));
                }
            }
            Some(p) => {
                if !seen[p] {
                    return Err(Error::invalid(format!("vertex {v} precedes its parent")));
                }
                remaining[p] -= 1;
                if remaining[p] == 0 {
                    open -= 1;
                }
            }
        }
        if remaining[v] > 0 {
            open += 1;
        }
        max_open = max_open.max(open);
    }
    Ok(max_open)
}

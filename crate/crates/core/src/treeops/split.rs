use crate::error::{Error, Result};
use crate::tree::RootedOrientedTree;

/// A tree partition {T1, T2}: the two sides share exactly `shared`, their
/// vertex sets cover the tree, and every edge lies in exactly one side. Each
/// side contains at least a third of the marked vertices (the shared vertex
/// counts for both sides).
#[derive(Clone, Debug)]
pub struct TreeSplit {
    pub shared: usize,
    pub side1: Vec<usize>,
    pub side2: Vec<usize>,
}

impl TreeSplit {
    /// Extracts one side as a tree rooted at the shared vertex, together with
    /// the map new index -> old index.
    pub fn side_tree(
        &self,
        tree: &RootedOrientedTree,
        first: bool,
    ) -> Result<(RootedOrientedTree, Vec<usize>)> {
        let side = if first { &self.side1 } else { &self.side2 };
        let mut new_of = vec![usize::MAX; tree.vertex_count()];
        for (i, &v) in side.iter().enumerate() {
            new_of[v] = i;
        }
        let mut arcs = Vec::with_capacity(side.len().saturating_sub(1));
        for &(u, v) in tree.arcs() {
            if new_of[u] != usize::MAX && new_of[v] != usize::MAX {
                arcs.push((new_of[u], new_of[v]));
            }
        }
        let t = RootedOrientedTree::from_arcs(side.len(), new_of[self.shared], &arcs)?;
        Ok((t, side.clone()))
    }
}

/// Splits T into a tree partition {T1, T2} such that each side contains at
/// least |marked|/3 of the marked vertices.
///
/// The cut vertex v is the deepest vertex whose subtree holds at least a third
/// of the marks; child subtrees of v are then accumulated until the threshold
/// is reached. Since each child subtree holds fewer than a third, the
/// accumulated side stays below two thirds, leaving enough for the other side.
pub fn split_tree(tree: &RootedOrientedTree, marked: &[usize]) -> Result<TreeSplit> {
    let n = tree.vertex_count();
    if marked.is_empty() {
        return Err(Error::invalid("marked set must be nonempty"));
    }
    let mut is_marked = vec![false; n];
    for &v in marked {
        if v >= n {
            return Err(Error::invalid(format!("marked vertex {v} out of range")));
        }
        is_marked[v] = true;
    }
    let total: usize = is_marked.iter().filter(|&&b| b).count();
    if n == 1 {
        return Ok(TreeSplit { shared: 0, side1: vec![0], side2: vec![0] });
    }
    let need = total.div_ceil(3);

    // marks per subtree
    let order = tree.bfs_order();
    let mut cnt = vec![0usize; n];
    for &v in order.iter().rev() {
        cnt[v] += usize::from(is_marked[v]);
        if let Some(p) = tree.parent(v) {
            cnt[p] += cnt[v];
        }
    }

    // deepest vertex with cnt >= need
    let mut v = tree.root();
    loop {
        match tree.children(v).iter().copied().find(|&c| cnt[c] >= need) {
            Some(c) => v = c,
            None => break,
        }
    }

    let subtree_of = |r: usize| -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![r];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend_from_slice(tree.children(u));
        }
        out.sort_unstable();
        out
    };

    let mut acc = 0usize;
    let mut chosen: Vec<usize> = Vec::new();
    for &c in tree.children(v) {
        if acc >= need {
            break;
        }
        acc += cnt[c];
        chosen.push(c);
    }

    let (side1, side2) = if acc >= need {
        // T1 = v plus the chosen child subtrees; T2 = the rest plus v.
        let mut in_side1 = vec![false; n];
        in_side1[v] = true;
        for &c in &chosen {
            for u in subtree_of(c) {
                in_side1[u] = true;
            }
        }
        let side1: Vec<usize> = (0..n).filter(|&u| in_side1[u]).collect();
        let side2: Vec<usize> = (0..n).filter(|&u| !in_side1[u] || u == v).collect();
        (side1, side2)
    } else {
        // All children together fall short, so cnt(v) == need and v is marked:
        // take the whole subtree at v, with v shared.
        let side1 = subtree_of(v);
        let mut in_side1 = vec![false; n];
        for &u in &side1 {
            in_side1[u] = true;
        }
        let side2: Vec<usize> = (0..n).filter(|&u| !in_side1[u] || u == v).collect();
        (side1, side2)
    };

    let split = TreeSplit { shared: v, side1, side2 };
    debug_assert!(split_is_valid(tree, &split, &is_marked, total));
    Ok(split)
}

fn split_is_valid(
    tree: &RootedOrientedTree,
    split: &TreeSplit,
    is_marked: &[bool],
    total: usize,
) -> bool {
    let n = tree.vertex_count();
    let count = |side: &[usize]| side.iter().filter(|&&u| is_marked[u]).count();
    let m1 = count(&split.side1);
    let m2 = count(&split.side2);
    if 3 * m1 < total || 3 * m2 < total {
        return false;
    }
    // sides overlap exactly in the shared vertex and cover everything
    let mut tag = vec![0u8; n];
    for &u in &split.side1 {
        tag[u] |= 1;
    }
    for &u in &split.side2 {
        tag[u] |= 2;
    }
    tag.iter().enumerate().all(|(u, &t)| if u == split.shared { t == 3 } else { t == 1 || t == 2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treeops::gen::{random_tree, TreeFamily};

    fn path(n: usize) -> RootedOrientedTree {
        let arcs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        RootedOrientedTree::from_arcs(n, 0, &arcs).unwrap()
    }

    fn mark_count(side: &[usize], marked: &[usize]) -> usize {
        side.iter().filter(|v| marked.contains(v)).count()
    }

    #[test]
    fn path_split_balances_marks() {
        let t = path(30);
        let marked: Vec<usize> = (0..30).collect();
        let s = split_tree(&t, &marked).unwrap();
        assert!(3 * mark_count(&s.side1, &marked) >= 30);
        assert!(3 * mark_count(&s.side2, &marked) >= 30);
    }

    #[test]
    fn star_split() {
        // star: all edges out of centre 0
        let arcs: Vec<(usize, usize)> = (1..8).map(|i| (0, i)).collect();
        let t = RootedOrientedTree::from_arcs(8, 0, &arcs).unwrap();
        let marked: Vec<usize> = (1..8).collect();
        let s = split_tree(&t, &marked).unwrap();
        assert_eq!(s.shared, 0);
        assert!(3 * mark_count(&s.side1, &marked) >= 7);
        assert!(3 * mark_count(&s.side2, &marked) >= 7);
    }

    #[test]
    fn single_mark() {
        let t = path(10);
        let s = split_tree(&t, &[4]).unwrap();
        // both sides must contain the lone mark, so it is the shared vertex
        assert_eq!(s.shared, 4);
    }

    #[test]
    fn single_vertex_degenerate() {
        let t = RootedOrientedTree::single_vertex();
        let s = split_tree(&t, &[0]).unwrap();
        assert_eq!(s.side1, vec![0]);
        assert_eq!(s.side2, vec![0]);
    }

    #[test]
    fn random_trees_split_within_bounds() {
        for seed in 0..20 {
            let t = random_tree(200, Some(5), TreeFamily::Uniform, seed).unwrap();
            let marked: Vec<usize> = (0..200).step_by(3).collect();
            let s = split_tree(&t, &marked).unwrap();
            let total = marked.len();
            assert!(3 * mark_count(&s.side1, &marked) >= total, "seed {seed}");
            assert!(3 * mark_count(&s.side2, &marked) >= total, "seed {seed}");
        }
    }

    #[test]
    fn side_tree_extraction_preserves_arcs() {
        let t = path(12);
        let marked: Vec<usize> = (0..12).collect();
        let s = split_tree(&t, &marked).unwrap();
        let (t1, back) = s.side_tree(&t, true).unwrap();
        assert_eq!(t1.root(), back.iter().position(|&o| o == s.shared).unwrap());
        for &(u, v) in t1.arcs() {
            assert!(t.has_arc(back[u], back[v]));
        }
    }
}

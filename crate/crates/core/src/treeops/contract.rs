use crate::error::{Error, Result};
use crate::tree::RootedOrientedTree;
use crate::treeops::paths::BarePath;

/// Bookkeeping for a path contraction: which new vertex each old vertex went
/// to, and which old vertices each new vertex stands for.
#[derive(Clone, Debug)]
pub struct ContractionMap {
    /// old vertex -> new vertex
    pub group_of: Vec<usize>,
    /// new vertex -> old vertices; path order for collapsed paths, singleton otherwise
    pub members: Vec<Vec<usize>>,
    /// new vertex -> index of the input path it came from, if any
    pub path_index: Vec<Option<usize>>,
}

impl ContractionMap {
    /// Old endpoints of the contracted arc (a, b) in the new tree: the unique
    /// original arc running between the two groups.
    pub fn original_arc(
        &self,
        tree: &RootedOrientedTree,
        a: usize,
        b: usize,
    ) -> Option<(usize, usize)> {
        for &u in &self.members[a] {
            for &v in &self.members[b] {
                if tree.has_arc(u, v) {
                    return Some((u, v));
                }
            }
        }
        None
    }
}

/// Collapses each given bare path to a single vertex. New vertices are
/// numbered by first appearance when scanning old vertices in increasing
/// order; the result is again a tree (groups are connected, so the quotient of
/// a tree stays acyclic), rooted at the image of the old root.
pub fn contract_bare_paths(
    tree: &RootedOrientedTree,
    paths: &[BarePath],
) -> Result<(RootedOrientedTree, ContractionMap)> {
    let n = tree.vertex_count();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (i, p) in paths.iter().enumerate() {
        if p.vertices.is_empty() {
            return Err(Error::invalid("empty path in contraction input"));
        }
        if !p.is_bare_in(tree) {
            return Err(Error::invalid(format!("input {i} is not a bare path of the tree")));
        }
        for &v in &p.vertices {
            if v >= n {
                return Err(Error::invalid(format!("path vertex {v} out of range")));
            }
            if owner[v].replace(i).is_some() {
                return Err(Error::invalid(format!("paths overlap at vertex {v}")));
            }
        }
    }

    let mut group_of = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut path_index: Vec<Option<usize>> = Vec::new();
    for v in 0..n {
        if group_of[v] != usize::MAX {
            continue;
        }
        match owner[v] {
            None => {
                group_of[v] = members.len();
                members.push(vec![v]);
                path_index.push(None);
            }
            Some(i) => {
                let g = members.len();
                for &u in &paths[i].vertices {
                    group_of[u] = g;
                }
                members.push(paths[i].vertices.clone());
                path_index.push(Some(i));
            }
        }
    }

    let mut new_arcs = Vec::new();
    for &(u, v) in tree.arcs() {
        if group_of[u] != group_of[v] {
            new_arcs.push((group_of[u], group_of[v]));
        }
    }
    let contracted =
        RootedOrientedTree::from_arcs(members.len(), group_of[tree.root()], &new_arcs)?;
    Ok((contracted, ContractionMap { group_of, members, path_index }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treeops::gen::{random_tree, TreeFamily};
    use crate::treeops::paths::disjoint_bare_paths;

    fn path(n: usize) -> RootedOrientedTree {
        let arcs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        RootedOrientedTree::from_arcs(n, 0, &arcs).unwrap()
    }

    /// Every original arc is either inside a group (consecutive in its path)
    /// or maps to an arc of the contracted tree, and the counts match.
    fn round_trip_ok(
        t: &RootedOrientedTree,
        tc: &RootedOrientedTree,
        map: &ContractionMap,
    ) -> bool {
        let mut internal = 0usize;
        for &(u, v) in t.arcs() {
            if map.group_of[u] == map.group_of[v] {
                let m = &map.members[map.group_of[u]];
                let pu = m.iter().position(|&x| x == u).unwrap();
                let pv = m.iter().position(|&x| x == v).unwrap();
                if pu.abs_diff(pv) != 1 {
                    return false;
                }
                internal += 1;
            } else if !tc.has_arc(map.group_of[u], map.group_of[v]) {
                return false;
            }
        }
        t.arcs().len() == internal + tc.arcs().len()
    }

    #[test]
    fn whole_path_collapses_to_a_point() {
        let t = path(7);
        let whole = BarePath { vertices: (0..7).collect() };
        let (tc, map) = contract_bare_paths(&t, &[whole]).unwrap();
        assert_eq!(tc.vertex_count(), 1);
        assert_eq!(map.members[0].len(), 7);
    }

    #[test]
    fn spider_legs_collapse_to_star() {
        // centre 0 with 3 legs of 7 vertices each
        let mut arcs = Vec::new();
        for i in 0..3 {
            let base = 1 + i * 7;
            arcs.push((0, base));
            for j in 0..6 {
                arcs.push((base + j, base + j + 1));
            }
        }
        let t = RootedOrientedTree::from_arcs(22, 0, &arcs).unwrap();
        let legs: Vec<BarePath> =
            (0..3).map(|i| BarePath { vertices: (1 + i * 7..1 + (i + 1) * 7).collect() }).collect();
        let (tc, map) = contract_bare_paths(&t, &legs).unwrap();
        assert_eq!(tc.vertex_count(), 4);
        assert_eq!(tc.underlying_degree(map.group_of[0]), 3);
        assert!(round_trip_ok(&t, &tc, &map));
    }

    #[test]
    fn empty_list_is_identity() {
        let t = path(9);
        let (tc, map) = contract_bare_paths(&t, &[]).unwrap();
        assert_eq!(tc.vertex_count(), 9);
        assert_eq!(tc.arcs(), t.arcs());
        assert!(map.path_index.iter().all(Option::is_none));
    }

    #[test]
    fn overlapping_paths_rejected() {
        let t = path(10);
        let a = BarePath { vertices: vec![1, 2, 3] };
        let b = BarePath { vertices: vec![3, 4, 5] };
        assert!(contract_bare_paths(&t, &[a, b]).is_err());
    }

    #[test]
    fn non_bare_input_rejected() {
        let arcs = vec![(0, 1), (1, 2), (1, 3)];
        let t = RootedOrientedTree::from_arcs(4, 0, &arcs).unwrap();
        // 1 is interior here but has degree 3
        let p = BarePath { vertices: vec![0, 1, 2] };
        assert!(contract_bare_paths(&t, &[p]).is_err());
    }

    #[test]
    fn carved_paths_contract_on_random_trees() {
        for seed in 0..10 {
            let t = random_tree(400, None, TreeFamily::PathRich, 400 + seed).unwrap();
            let paths = disjoint_bare_paths(&t, 7).unwrap();
            assert!(!paths.is_empty(), "seed {seed}");
            let (tc, map) = contract_bare_paths(&t, &paths).unwrap();
            assert_eq!(tc.vertex_count(), 400 - paths.len() * 6);
            assert!(round_trip_ok(&t, &tc, &map));
            // original endpoints recoverable through the map
            for &(a, b) in tc.arcs() {
                let (u, v) = map.original_arc(&t, a, b).unwrap();
                assert!(t.has_arc(u, v));
            }
        }
    }
}

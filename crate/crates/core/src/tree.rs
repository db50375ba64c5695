use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[inline]
fn pack(u: usize, v: usize) -> u64 {
    ((u as u64) << 32) | v as u64
}

/// An oriented tree rooted at `root`: an orientation of an (undirected) tree,
/// i.e. every edge carries exactly one direction. The rooting is structural
/// bookkeeping only; arc directions are independent of parent/child relations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RootedOrientedTree {
    n: usize,
    root: usize,
    parent: Vec<usize>, // parent[root] == usize::MAX
    adj: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    #[serde(skip)]
    arc_set: HashSet<u64>,
    arcs: Vec<(usize, usize)>,
}

pub const NO_PARENT: usize = usize::MAX;

impl RootedOrientedTree {
    /// Builds from a list of directed arcs forming a tree when directions are
    /// ignored. `root` may be any vertex.
    pub fn from_arcs(n: usize, root: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("tree must have at least one vertex"));
        }
        if root >= n {
            return Err(Error::invalid(format!("root {root} out of range n={n}")));
        }
        if arcs.len() != n - 1 {
            return Err(Error::invalid(format!(
                "tree on {n} vertices needs {} arcs, got {}",
                n - 1,
                arcs.len()
            )));
        }
        let mut adj = vec![Vec::new(); n];
        let mut arc_set = HashSet::with_capacity(arcs.len());
        for &(u, v) in arcs {
            if u == v || u >= n || v >= n {
                return Err(Error::invalid(format!("bad tree arc ({u},{v})")));
            }
            if !arc_set.insert(pack(u, v)) || arc_set.contains(&pack(v, u)) {
                return Err(Error::invalid(format!("duplicate edge between {u} and {v}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        // BFS from root assigns parents and checks connectivity (hence acyclicity).
        let mut parent = vec![NO_PARENT; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        seen[root] = true;
        queue.push_back(root);
        let mut reached = 1usize;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        if reached != n {
            return Err(Error::invalid("edge set is not a connected tree"));
        }
        let mut children = vec![Vec::new(); n];
        for v in 0..n {
            if parent[v] != NO_PARENT {
                children[parent[v]].push(v);
            }
        }
        for c in &mut children {
            c.sort_unstable();
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(RootedOrientedTree {
            n,
            root,
            parent,
            adj,
            children,
            arc_set,
            arcs: arcs.to_vec(),
        })
    }

    pub fn single_vertex() -> Self {
        RootedOrientedTree {
            n: 1,
            root: 0,
            parent: vec![NO_PARENT],
            adj: vec![Vec::new()],
            children: vec![Vec::new()],
            arc_set: HashSet::new(),
            arcs: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            NO_PARENT => None,
            p => Some(p),
        }
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn underlying_degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Maximum degree of the underlying tree.
    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.adj[v].len()).max().unwrap_or(0)
    }

    /// True iff the directed arc u->v is present.
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.arc_set.contains(&pack(u, v))
    }

    /// All directed arcs in input order.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Children reached by an arc parent->child.
    pub fn out_children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.children[v].iter().copied().filter(move |&c| self.has_arc(v, c))
    }

    /// Children whose edge is oriented child->parent.
    pub fn in_children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.children[v].iter().copied().filter(move |&c| self.has_arc(c, v))
    }

    pub fn leaves(&self) -> Vec<usize> {
        if self.n == 1 {
            return vec![0];
        }
        (0..self.n).filter(|&v| self.adj[v].len() == 1).collect()
    }

    pub fn is_path(&self) -> bool {
        self.n <= 2 || (0..self.n).all(|v| self.adj[v].len() <= 2)
    }

    /// Depth of every vertex below the root.
    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n];
        for &v in &self.bfs_order() {
            if let Some(p) = self.parent(v) {
                d[v] = d[p] + 1;
            }
        }
        d
    }

    /// Vertices in breadth-first order from the root.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.n);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(self.root);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &c in &self.children[u] {
                queue.push_back(c);
            }
        }
        order
    }

    /// Subtree sizes (vertex counts including the vertex itself).
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let order = self.bfs_order();
        let mut size = vec![1usize; self.n];
        for &v in order.iter().rev() {
            if let Some(p) = self.parent(v) {
                size[p] += size[v];
            }
        }
        size
    }

    /// The unique tree path from u to v, inclusive.
    pub fn path_between(&self, u: usize, v: usize) -> Vec<usize> {
        let depths = self.depths();
        let (mut a, mut b) = (u, v);
        let mut left = vec![a];
        let mut right = vec![b];
        while depths[a] > depths[b] {
            a = self.parent[a];
            left.push(a);
        }
        while depths[b] > depths[a] {
            b = self.parent[b];
            right.push(b);
        }
        while a != b {
            a = self.parent[a];
            b = self.parent[b];
            left.push(a);
            right.push(b);
        }
        right.pop();
        right.reverse();
        left.extend(right);
        left
    }

    /// Same tree re-rooted at `new_root`; arc directions are untouched.
    pub fn rerooted(&self, new_root: usize) -> Result<Self> {
        RootedOrientedTree::from_arcs(self.n, new_root, &self.arcs)
    }

    /// Text format: first line "n root", then one line "child parent dir" per
    /// edge where dir is '+' for parent->child and '-' for child->parent.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.root);
        for v in 0..self.n {
            if let Some(p) = self.parent(v) {
                let dir = if self.has_arc(p, v) { '+' } else { '-' };
                let _ = writeln!(s, "{} {} {}", v, p, dir);
            }
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| Error::Parse("empty tree file".into()))?;
        let mut it = head.split_whitespace();
        let n: usize = it
            .next()
            .ok_or_else(|| Error::Parse("missing vertex count".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad vertex count: {e}")))?;
        let root: usize = it
            .next()
            .ok_or_else(|| Error::Parse("missing root".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad root: {e}")))?;
        let mut arcs = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("bad tree line: {line:?}")));
            }
            let child: usize =
                parts[0].parse().map_err(|e| Error::Parse(format!("bad child: {e}")))?;
            let parent: usize =
                parts[1].parse().map_err(|e| Error::Parse(format!("bad parent: {e}")))?;
            match parts[2] {
                "+" => arcs.push((parent, child)),
                "-" => arcs.push((child, parent)),
                other => return Err(Error::Parse(format!("bad direction {other:?}"))),
            }
        }
        RootedOrientedTree::from_arcs(n, root, &arcs)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Edge {
            child: usize,
            parent: usize,
            dir: char,
        }
        #[derive(Serialize)]
        struct J {
            n: usize,
            root: usize,
            edges: Vec<Edge>,
        }
        let mut edges = Vec::new();
        for v in 0..self.n {
            if let Some(p) = self.parent(v) {
                edges.push(Edge { child: v, parent: p, dir: if self.has_arc(p, v) { '+' } else { '-' } });
            }
        }
        serde_json::to_string(&J { n: self.n, root: self.root, edges }).expect("serialize tree")
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Edge {
            child: usize,
            parent: usize,
            dir: char,
        }
        #[derive(Deserialize)]
        struct J {
            n: usize,
            root: usize,
            edges: Vec<Edge>,
        }
        let j: J =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad tree json: {e}")))?;
        let arcs: Vec<(usize, usize)> = j
            .edges
            .iter()
            .map(|e| if e.dir == '+' { (e.parent, e.child) } else { (e.child, e.parent) })
            .collect();
        RootedOrientedTree::from_arcs(j.n, j.root, &arcs)
    }
}

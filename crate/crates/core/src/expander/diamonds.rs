use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::cover::greedy_cover;
use crate::digraph::{Digraph, DigraphBuilder};
use crate::error::{Error, Result};
use crate::tree::RootedOrientedTree;

/// Orientation of a rooted path on three vertices, root first. `Out` means
/// the arc points away from the root end: `OutIn` is root -> middle <- leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathPattern {
    OutOut,
    OutIn,
    InOut,
    InIn,
}

impl PathPattern {
    pub fn id(self) -> u8 {
        match self {
            PathPattern::OutOut => 0,
            PathPattern::OutIn => 1,
            PathPattern::InOut => 2,
            PathPattern::InIn => 3,
        }
    }

    pub fn first_out(self) -> bool {
        matches!(self, PathPattern::OutOut | PathPattern::OutIn)
    }

    pub fn second_out(self) -> bool {
        matches!(self, PathPattern::OutOut | PathPattern::InOut)
    }

    /// Reads the pattern off a path of order 3 rooted in one of its leaves.
    pub fn from_path(p: &RootedOrientedTree) -> Result<Self> {
        if p.vertex_count() != 3 {
            return Err(Error::invalid(format!(
                "pattern path must have order 3, got {}",
                p.vertex_count()
            )));
        }
        let root = p.root();
        if p.underlying_degree(root) != 1 {
            return Err(Error::invalid("pattern path must be rooted in a leaf"));
        }
        let mid = p.neighbors(root)[0];
        let last = p
            .neighbors(mid)
            .iter()
            .copied()
            .find(|&v| v != root)
            .ok_or_else(|| Error::invalid("pattern is not a path"))?;
        Ok(match (p.has_arc(root, mid), p.has_arc(mid, last)) {
            (true, true) => PathPattern::OutOut,
            (true, false) => PathPattern::OutIn,
            (false, true) => PathPattern::InOut,
            (false, false) => PathPattern::InIn,
        })
    }

    /// The canonical order-3 path realising this pattern: vertices 0-1-2 with
    /// root 0, arcs oriented so that [`from_path`] reads the pattern back.
    ///
    /// [`from_path`]: PathPattern::from_path
    pub fn reference_path(self) -> RootedOrientedTree {
        let first = self.oriented(0, 1, self.first_out());
        let second = self.oriented(1, 2, self.second_out());
        RootedOrientedTree::from_arcs(3, 0, &[first, second])
            .expect("a two-arc path is always a valid tree")
    }

    fn oriented(self, from_root_side: usize, to_leaf_side: usize, out: bool) -> (usize, usize) {
        if out {
            (from_root_side, to_leaf_side)
        } else {
            (to_leaf_side, from_root_side)
        }
    }
}

impl Serialize for PathPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.id())
    }
}

/// A path gadget with its middle vertex doubled: both branches
/// prefix-middle.0-suffix and prefix-middle.1-suffix trace the pattern, so a
/// path allocated through one middle can be rerouted through the other
/// without disturbing its endpoints.
#[derive(Clone, Copy, Debug)]
pub struct Diamond {
    pub prefix: usize,
    pub middle: (usize, usize),
    pub suffix: usize,
    pub pattern: PathPattern,
}

impl Serialize for Diamond {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Diamond", 4)?;
        st.serialize_field("prefix", &self.prefix)?;
        st.serialize_field("middle", &[self.middle.0, self.middle.1])?;
        st.serialize_field("suffix", &self.suffix)?;
        st.serialize_field("pattern", &self.pattern)?;
        st.end()
    }
}

impl Diamond {
    pub fn new(
        prefix: usize,
        middle: (usize, usize),
        suffix: usize,
        pattern: PathPattern,
    ) -> Result<Self> {
        let ids = [prefix, middle.0, middle.1, suffix];
        for i in 0..4 {
            for j in i + 1..4 {
                if ids[i] == ids[j] {
                    return Err(Error::invalid(format!(
                        "diamond vertices must be distinct, got {ids:?}"
                    )));
                }
            }
        }
        Ok(Diamond { prefix, middle, suffix, pattern })
    }

    /// The two arcs of one branch, through `middle.1` when `second` is set.
    pub fn branch_arcs(&self, second: bool) -> [(usize, usize); 2] {
        let m = if second { self.middle.1 } else { self.middle.0 };
        [
            self.pattern.oriented(self.prefix, m, self.pattern.first_out()),
            self.pattern.oriented(m, self.suffix, self.pattern.second_out()),
        ]
    }

    pub fn arcs(&self) -> [(usize, usize); 4] {
        let [a, b] = self.branch_arcs(false);
        let [c, d] = self.branch_arcs(true);
        [a, b, c, d]
    }

    /// All four arcs must be present in the host.
    pub fn check_in(&self, host: &Digraph) -> Result<()> {
        for (u, v) in self.arcs() {
            if !host.has_arc(u, v) {
                return Err(Error::invalid(format!(
                    "diamond arc {u}->{v} is missing from the host"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialize diamond")
    }
}

/// A chain of diamonds in which each one starts where the previous ended:
/// the first middle of diamond i+1 equals the second middle of diamond i.
/// Rerouting one path per diamond shifts allocation weight from the chain's
/// first middle to its last, leaving all interior counts unchanged.
#[derive(Clone, Debug, Serialize)]
pub struct DiamondPath {
    diamonds: Vec<Diamond>,
}

impl DiamondPath {
    pub fn new(diamonds: Vec<Diamond>) -> Result<Self> {
        if diamonds.is_empty() {
            return Err(Error::invalid("a diamond path needs at least one diamond"));
        }
        for w in diamonds.windows(2) {
            if w[1].middle.0 != w[0].middle.1 {
                return Err(Error::invalid(format!(
                    "diamond middles do not chain: {:?} then {:?}",
                    w[0].middle, w[1].middle
                )));
            }
        }
        Ok(DiamondPath { diamonds })
    }

    pub fn diamonds(&self) -> &[Diamond] {
        &self.diamonds
    }

    pub fn first_middle(&self) -> usize {
        self.diamonds[0].middle.0
    }

    pub fn last_middle(&self) -> usize {
        self.diamonds[self.diamonds.len() - 1].middle.1
    }

    /// Chains a path between two vertices through a family where diamond i
    /// has middle (i, i+1), as produced by [`p_connected_subgraph`]. The
    /// returned path runs from min(a, b) up to max(a, b).
    pub fn connecting(all: &[Diamond], a: usize, b: usize) -> Result<DiamondPath> {
        if a == b {
            return Err(Error::invalid("endpoints coincide, nothing to connect"));
        }
        let (lo, hi) = (a.min(b), a.max(b));
        if hi > all.len() {
            return Err(Error::invalid(format!(
                "vertex {hi} is beyond the last middle {}",
                all.len()
            )));
        }
        for (i, d) in all.iter().enumerate().take(hi).skip(lo) {
            if d.middle != (i, i + 1) {
                return Err(Error::invalid(format!(
                    "diamond {i} has middle {:?}, expected ({i}, {})",
                    d.middle,
                    i + 1
                )));
            }
        }
        DiamondPath::new(all[lo..hi].to_vec())
    }
}

/// Builds a spanning subgraph of `d` that is one diamond per consecutive
/// middle pair (i, i+1), with prefixes and suffixes assigned by greedy
/// covers so no vertex is overused in either role. The maximum underlying
/// semidegree of the union stays at most 4/alpha: each cover edge
/// contributes two host arcs, and each role is held few times.
pub fn p_connected_subgraph(
    d: &Digraph,
    p: &RootedOrientedTree,
    alpha: f64,
    seed: u64,
) -> Result<(Digraph, Vec<Diamond>)> {
    let n = d.vertex_count();
    if n < 4 {
        return Err(Error::invalid(format!("host must have at least 4 vertices, got {n}")));
    }
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::invalid(format!("alpha = {alpha} must lie in (0, 1/2]")));
    }
    let need = ((0.5 + alpha) * n as f64).ceil() as usize;
    if d.min_semidegree() < need {
        return Err(Error::invalid(format!(
            "minimum semidegree {} is below (1/2 + alpha) n = {need}",
            d.min_semidegree()
        )));
    }
    let pattern = PathPattern::from_path(p)?;

    // Prefix candidates: vertices completing the first pattern arc to both
    // middles at once. A processing order shuffled by the seed spreads the
    // greedy loads across instances.
    let mut order: Vec<usize> = (0..n - 1).collect();
    order.shuffle(&mut StdRng::seed_from_u64(seed));

    let prefix_cands = |i: usize| -> Vec<usize> {
        candidates(d, i, i + 1, pattern.first_out(), &[i, i + 1])
    };
    let chosen_prefix = run_cover(&order, n, prefix_cands, "prefix")?;
    let suffix_cands = |i: usize| -> Vec<usize> {
        // Suffix completes the second pattern arc from both middles; it must
        // also avoid the already-chosen prefix to keep the gadget on four
        // distinct vertices.
        candidates(d, i, i + 1, !pattern.second_out(), &[i, i + 1, chosen_prefix[i]])
    };
    let chosen_suffix = run_cover(&order, n, suffix_cands, "suffix")?;

    let mut builder = DigraphBuilder::new(n);
    let mut diamonds = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let dia = Diamond::new(chosen_prefix[i], (i, i + 1), chosen_suffix[i], pattern)?;
        for (u, v) in dia.arcs() {
            debug_assert!(d.has_arc(u, v));
            builder.add(u, v);
        }
        diamonds.push(dia);
    }
    let h = builder.build();

    let bound = 4.0 / alpha;
    let top = h.max_semidegree();
    if top as f64 > bound + 1e-9 {
        return Err(Error::construction(
            "p_connected_subgraph",
            format!("diamond union has semidegree {top}, above 4/alpha = {bound:.2}"),
        ));
    }
    Ok((h, diamonds))
}

/// Vertices with the pattern arc to both of y and w. `towards` says the arc
/// points from the candidate towards the middles.
fn candidates(d: &Digraph, y: usize, w: usize, towards: bool, exclude: &[usize]) -> Vec<usize> {
    let (a, b) = if towards {
        (d.in_neighbors(y), d.in_neighbors(w))
    } else {
        (d.out_neighbors(y), d.out_neighbors(w))
    };
    let mut in_a = vec![false; d.vertex_count()];
    for &x in a {
        in_a[x as usize] = true;
    }
    b.iter()
        .map(|&x| x as usize)
        .filter(|&x| in_a[x] && !exclude.contains(&x))
        .collect()
}

fn run_cover(
    order: &[usize],
    n: usize,
    cands: impl Fn(usize) -> Vec<usize>,
    role: &str,
) -> Result<Vec<usize>> {
    let rows: Vec<Vec<usize>> = order.iter().map(|&i| cands(i)).collect();
    let min_deg = rows.iter().map(Vec::len).min().unwrap_or(0);
    if min_deg == 0 {
        let i = order[rows.iter().position(|r| r.is_empty()).unwrap()];
        return Err(Error::construction(
            "p_connected_subgraph",
            format!("no {role} candidate completes both branches at middle pair ({i}, {})", i + 1),
        ));
    }
    let eps = min_deg as f64 / n as f64;
    let cover = greedy_cover(&rows, n, eps)
        .map_err(|e| Error::construction("p_connected_subgraph", e.to_string()))?;
    let mut chosen = vec![usize::MAX; n - 1];
    for (row, &i) in order.iter().enumerate() {
        chosen[i] = cover.choice[row];
    }
    Ok(chosen)
}

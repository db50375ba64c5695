use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tree::RootedOrientedTree;
use crate::treeops::paths::bare_path_decomposition;

/// Instance families for tree generation.
///
/// `Uniform` draws a uniformly random labelled tree (optionally conditioned on
/// a degree cap), `PathRich` guarantees many disjoint bare paths of order 7,
/// `LeafRich` guarantees many disjoint leaf edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeFamily {
    Uniform,
    PathRich,
    LeafRich,
}

impl std::str::FromStr for TreeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(TreeFamily::Uniform),
            "path-rich" => Ok(TreeFamily::PathRich),
            "leaf-rich" => Ok(TreeFamily::LeafRich),
            other => Err(Error::invalid(format!(
                "unknown tree family {other:?} (expected uniform, path-rich or leaf-rich)"
            ))),
        }
    }
}

impl std::fmt::Display for TreeFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TreeFamily::Uniform => "uniform",
            TreeFamily::PathRich => "path-rich",
            TreeFamily::LeafRich => "leaf-rich",
        })
    }
}

/// Draws a random oriented tree on vertices 0..n rooted at 0.
///
/// Uniform trees come from a random length-(n-2) label sequence; with a degree
/// cap the sequence is rejection-sampled (up to 50 draws), falling back to
/// sampling each symbol from labels with remaining capacity. The fallback
/// always respects the cap but is only approximately the conditioned uniform
/// distribution; at large n with tight caps rejection alone would essentially
/// never succeed.
pub fn random_tree(
    n: usize,
    delta_max: Option<usize>,
    family: TreeFamily,
    seed: u64,
) -> Result<RootedOrientedTree> {
    if n == 0 {
        return Err(Error::invalid("tree needs at least one vertex"));
    }
    if let Some(d) = delta_max {
        if d < 2 && n >= 3 {
            return Err(Error::invalid(format!("no tree on {n} vertices has max degree {d}")));
        }
        if d == 0 && n == 2 {
            return Err(Error::invalid("an edge needs degree 1"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n == 1 {
        return Ok(RootedOrientedTree::single_vertex());
    }
    if n == 2 {
        let arc = if rng.gen::<bool>() { (0, 1) } else { (1, 0) };
        return Ok(RootedOrientedTree::from_arcs(2, 0, &[arc])?);
    }
    match family {
        TreeFamily::Uniform => uniform_tree(n, delta_max, &mut rng),
        TreeFamily::PathRich => path_rich_tree(n, delta_max, &mut rng),
        TreeFamily::LeafRich => leaf_rich_tree(n, delta_max, &mut rng),
    }
}

fn uniform_tree(
    n: usize,
    delta_max: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<RootedOrientedTree> {
    let seq = match delta_max {
        None => (0..n - 2).map(|_| rng.gen_range(0..n)).collect(),
        Some(d) => {
            let cap = d - 1; // occurrences in the sequence = degree - 1
            let mut found = None;
            for _ in 0..50 {
                let cand: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
                let mut occ = vec![0usize; n];
                if cand.iter().all(|&v| {
                    occ[v] += 1;
                    occ[v] <= cap
                }) {
                    found = Some(cand);
                    break;
                }
            }
            found.unwrap_or_else(|| capped_sequence(n, cap, rng))
        }
    };
    let edges = decode_tree_sequence(n, &seq);
    orient_and_build(n, &edges, &[], rng)
}

/// Each label may appear at most `cap` times; symbols are drawn uniformly
/// from the labels with remaining capacity.
fn capped_sequence(n: usize, cap: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut avail: Vec<usize> = (0..n).collect();
    let mut left = vec![cap; n];
    let mut seq = Vec::with_capacity(n - 2);
    for _ in 0..n - 2 {
        let idx = rng.gen_range(0..avail.len());
        let v = avail[idx];
        seq.push(v);
        left[v] -= 1;
        if left[v] == 0 {
            avail.swap_remove(idx);
        }
    }
    seq
}

/// Standard decoding: label sequence of length n-2 -> labelled tree edges.
fn decode_tree_sequence(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut heap: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let Reverse(leaf) = heap.pop().expect("a tree sequence always leaves a leaf");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
        if degree[s] == 1 {
            heap.push(Reverse(s));
        }
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    debug_assert_eq!(rest.len(), 2);
    edges.push((rest[0], rest[1]));
    edges
}

/// Orients `edges` uniformly at random except for `forced` arcs, which are
/// taken as written, then roots the tree at 0.
fn orient_and_build(
    n: usize,
    edges: &[(usize, usize)],
    forced: &[(usize, usize)],
    rng: &mut ChaCha8Rng,
) -> Result<RootedOrientedTree> {
    use std::collections::HashSet;
    let forced_set: HashSet<(usize, usize)> = forced.iter().copied().collect();
    let mut arcs = Vec::with_capacity(edges.len());
    for &(u, v) in edges {
        if forced_set.contains(&(u, v)) {
            arcs.push((u, v));
        } else if forced_set.contains(&(v, u)) {
            arcs.push((v, u));
        } else if rng.gen::<bool>() {
            arcs.push((u, v));
        } else {
            arcs.push((v, u));
        }
    }
    RootedOrientedTree::from_arcs(n, 0, &arcs)
}

/// A subdivided skeleton: roughly n/24 branching vertices whose segments are
/// evenly lengthened to n vertices total. Per segment of len edges the carving
/// rule yields floor((len-1)/8) disjoint order-7 paths, which sums to about
/// n/12, comfortably above the guaranteed n/20.
///
/// Arcs at within-segment positions 3 and 4 mod 8 are forced to point at the
/// vertex between them. Carved order-7 blocks start at position 1 + 8t, so
/// every block's middle triple reads v3 -> v4 <- v5; downstream consumers that
/// group blocks by middle orientation then see a single dominant class. The
/// pattern is its own reversal, so re-rooting or re-reading a segment
/// backwards lands in the same class.
fn path_rich_tree(
    n: usize,
    delta_max: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<RootedOrientedTree> {
    let q = if delta_max == Some(2) { 2 } else { (n / 24).max(2) };
    let skel_edges = if q == 2 {
        vec![(0usize, 1usize)]
    } else {
        let cap = delta_max.unwrap_or(4).min(4).max(3) - 1;
        decode_tree_sequence(q, &capped_sequence(q, cap, rng))
    };
    let skel = RootedOrientedTree::from_arcs(q, 0, &skel_edges)?;
    let segments = bare_path_decomposition(&skel)?;
    let m = segments.len();

    // grow each segment proportionally: new edge counts sum to n - 1
    let total_old = (q - 1) as f64;
    let extra = n - q;
    let mut grown: Vec<usize> = segments
        .iter()
        .map(|s| s.len_edges() + (s.len_edges() as f64 * extra as f64 / total_old) as usize)
        .collect();
    let mut assigned: usize = grown.iter().sum();
    let mut i = 0;
    while assigned < n - 1 {
        grown[i % m] += 1;
        assigned += 1;
        i += 1;
    }
    while assigned > n - 1 {
        let j = grown.iter().position(|&g| g > 1).expect("some segment can shrink");
        grown[j] -= 1;
        assigned -= 1;
    }

    // specials keep their relative order and take the low ids, so the segment
    // construction direction matches the decomposition traversal direction
    let specials: Vec<usize> =
        (0..q).filter(|&v| skel.underlying_degree(v) != 2).collect();
    let mut final_id = vec![usize::MAX; q];
    for (i, &s) in specials.iter().enumerate() {
        final_id[s] = i;
    }
    let mut next = specials.len();
    let mut edges = Vec::with_capacity(n - 1);
    let mut forced = Vec::new();
    for (j, seg) in segments.iter().enumerate() {
        let a = final_id[seg.vertices[0]];
        let b = final_id[*seg.vertices.last().expect("segment has endpoints")];
        let mut chain = Vec::with_capacity(grown[j] + 1);
        chain.push(a);
        for _ in 0..grown[j] - 1 {
            chain.push(next);
            next += 1;
        }
        chain.push(b);
        for (t, w) in chain.windows(2).enumerate() {
            edges.push((w[0], w[1]));
            match t % 8 {
                3 => forced.push((w[0], w[1])),
                4 => forced.push((w[1], w[0])),
                _ => {}
            }
        }
    }
    debug_assert_eq!(next, n);
    orient_and_build(n, &edges, &forced, rng)
}

/// A backbone path on ceil(n/2) vertices with the remaining vertices attached
/// as leaves to distinct backbone vertices: floor(n/2) disjoint leaf edges by
/// construction, against the guaranteed n/10.
fn leaf_rich_tree(
    n: usize,
    delta_max: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<RootedOrientedTree> {
    if let Some(d) = delta_max {
        if d < 3 && n >= 4 {
            return Err(Error::invalid("leaf-rich trees need max degree at least 3"));
        }
    }
    let b = n.div_ceil(2);
    let mut edges: Vec<(usize, usize)> = (0..b - 1).map(|i| (i, i + 1)).collect();
    for leaf in b..n {
        edges.push((leaf - b, leaf));
    }
    orient_and_build(n, &edges, &[], rng)
}

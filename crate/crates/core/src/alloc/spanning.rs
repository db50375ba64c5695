use crate::digraph::{Digraph, DigraphBuilder};
use crate::error::{Error, Result};
use crate::expander::PathPattern;
use crate::regularity::ReducedDigraph;
use crate::tree::RootedOrientedTree;
use crate::treeops::BarePath;

/// Stride between retries when searching correction seeds.
pub(crate) const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Decorrelated seed for the `tag`-th internal randomized step.
pub(crate) fn derive_seed(seed: u64, tag: u64) -> u64 {
    seed.wrapping_add(SEED_STRIDE.wrapping_mul(tag.wrapping_add(1)))
}

/// Tunables shared by the two spanning allocation constructions.
#[derive(Clone, Copy, Debug)]
pub struct SpanningParams {
    /// Promised supply density: the caller guarantees at least lambda * n
    /// disjoint order-7 bare paths (or leaf edges). The per-cluster
    /// postcondition floors are stated in terms of this lambda.
    pub lambda: f64,
    /// Copies per cluster in the correction blow-up. The asymptotic scale is
    /// far below anything meaningful at practical orders, so the scale is a
    /// parameter; the blow-up only has to be big enough to host a regular
    /// expander with the wanted bias.
    pub blowup_per_cluster: usize,
    /// Exceptional-set density of the source partition; enters the
    /// neighbour-balance postcondition bound 2 eps n / (alpha k).
    pub eps: f64,
    /// Semidegree margin of the source partition, same role.
    pub alpha: f64,
    /// Correction seeds tried before conceding that no exactly balanceable
    /// outcome was found.
    pub phase2_tries: usize,
}

impl Default for SpanningParams {
    fn default() -> Self {
        SpanningParams {
            lambda: 0.05,
            blowup_per_cluster: 8,
            eps: 0.1,
            alpha: 0.2,
            phase2_tries: 64,
        }
    }
}

/// The reduced digraph as one host: vertices 0..k are the clusters with the
/// core arcs, vertex k + j stands for the j-th exceptional vertex, wired to
/// the clusters it sees with majority in- and out-degree. Spanning
/// allocations are homomorphisms into this digraph.
pub(crate) struct ExtendedHost {
    pub host: Digraph,
    pub k: usize,
    pub n0: usize,
}

pub(crate) fn extended_host(r: &ReducedDigraph) -> Result<ExtendedHost> {
    let k = r.core.vertex_count();
    let n0 = r.v0_links.len();
    let mut b = DigraphBuilder::new(k + n0);
    for (u, v) in r.core.arcs() {
        b.add(u, v);
    }
    for (j, link) in r.v0_links.iter().enumerate() {
        if link.in_from.is_empty() || link.out_to.is_empty() {
            return Err(Error::invalid(format!(
                "exceptional vertex {} lacks majority clusters on one side",
                link.vertex
            )));
        }
        for &y in &link.in_from {
            if y >= k {
                return Err(Error::invalid(format!("link cluster {y} out of range")));
            }
            b.add(y, k + j);
        }
        for &y in &link.out_to {
            if y >= k {
                return Err(Error::invalid(format!("link cluster {y} out of range")));
            }
            b.add(k + j, y);
        }
    }
    Ok(ExtendedHost { host: b.build(), k, n0 })
}

/// Successor and predecessor along a Hamilton cycle of the core, indexed by
/// cluster. Validates that the claimed cycle really is one.
pub(crate) struct CycleSteps {
    pub succ: Vec<usize>,
    pub pred: Vec<usize>,
}

pub(crate) fn cycle_steps(core: &Digraph, h: &[usize]) -> Result<CycleSteps> {
    let k = core.vertex_count();
    if h.len() != k {
        return Err(Error::invalid(format!("cycle visits {} of {k} clusters", h.len())));
    }
    let mut seen = vec![false; k];
    for &c in h {
        if c >= k || seen[c] {
            return Err(Error::invalid("cycle is not a permutation of the clusters"));
        }
        seen[c] = true;
    }
    let mut succ = vec![0usize; k];
    let mut pred = vec![0usize; k];
    for i in 0..k {
        let (a, b) = (h[i], h[(i + 1) % k]);
        if !core.has_arc(a, b) {
            return Err(Error::invalid(format!("cycle step {a}->{b} is not a core arc")));
        }
        succ[a] = b;
        pred[b] = a;
    }
    Ok(CycleSteps { succ, pred })
}

/// Largest-remainder apportionment of `total` units proportional to the
/// nonnegative `shares` (ties to the smaller index).
pub(crate) fn apportion(shares: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = shares.iter().sum();
    if sum <= 0.0 {
        let base = total / shares.len();
        let mut out = vec![base; shares.len()];
        for item in out.iter_mut().take(total - base * shares.len()) {
            *item += 1;
        }
        return out;
    }
    let quota: Vec<f64> = shares.iter().map(|&s| s / sum * total as f64).collect();
    let mut out: Vec<usize> = quota.iter().map(|&q| q.floor() as usize).collect();
    let assigned: usize = out.iter().sum();
    let mut idx: Vec<usize> = (0..shares.len()).collect();
    idx.sort_by(|&a, &b| {
        (quota[b] - out[b] as f64)
            .partial_cmp(&(quota[a] - out[a] as f64))
            .expect("finite remainders")
            .then(a.cmp(&b))
    });
    for &i in idx.iter().take(total - assigned) {
        out[i] += 1;
    }
    out
}

/// Blow-up weights for the correction phase: proportional to the positive
/// part of the per-cluster deficits, with the root's block kept nonempty.
pub(crate) fn correction_weights(
    deficits: &[i64],
    root_target: usize,
    per_cluster: usize,
) -> Vec<usize> {
    let k = deficits.len();
    let total = (per_cluster * k).max(12);
    let shares: Vec<f64> = deficits.iter().map(|&d| d.max(0) as f64).collect();
    let mut w = apportion(&shares, total);
    if w[root_target] == 0 {
        let donor = (0..k).max_by_key(|&i| (w[i], usize::MAX - i)).expect("k >= 1");
        w[donor] -= 1;
        w[root_target] += 1;
    }
    w
}

/// The canonical top-down reading of an order-7 bare path: `Some` exactly
/// when the seven vertices form a parent chain in the rooted tree, listed
/// root-side first. Paths that bend over their depth minimum are rejected;
/// they cannot be read off in ancestral order.
pub(crate) fn monotone_seven(tree: &RootedOrientedTree, p: &BarePath) -> Option<[usize; 7]> {
    if p.vertices.len() != 7 {
        return None;
    }
    let mut v: [usize; 7] = p.vertices[..].try_into().expect("length checked");
    let chain = |v: &[usize; 7]| (0..6).all(|i| tree.parent(v[i + 1]) == Some(v[i]));
    if chain(&v) {
        return Some(v);
    }
    v.reverse();
    chain(&v).then_some(v)
}

/// Orientation class of the middle section (third to fifth vertex).
pub(crate) fn middle_pattern(tree: &RootedOrientedTree, v: &[usize; 7]) -> PathPattern {
    match (tree.has_arc(v[2], v[3]), tree.has_arc(v[3], v[4])) {
        (true, true) => PathPattern::OutOut,
        (true, false) => PathPattern::OutIn,
        (false, true) => PathPattern::InOut,
        (false, false) => PathPattern::InIn,
    }
}

/// Clusters j with an arc to/from `x` as oriented by `x_to_j`, and to/from
/// `y` as oriented by `j_to_y`. This is the candidate set for the second (or
/// sixth) vertex of a special path: it must extend the homomorphism from its
/// two already-placed neighbours.
pub(crate) fn wedge_candidates(
    core: &Digraph,
    x: usize,
    x_to_j: bool,
    y: usize,
    j_to_y: bool,
) -> Vec<usize> {
    let pool = if x_to_j { core.out_neighbors(x) } else { core.in_neighbors(x) };
    pool.iter()
        .map(|&j| j as usize)
        .filter(|&j| if j_to_y { core.has_arc(j, y) } else { core.has_arc(y, j) })
        .collect()
}

/// The candidate with the most room left under the shared cluster quota:
/// minimal current load, ties to the smallest cluster id.
pub(crate) fn most_deficient(cands: &[usize], load: &[i64]) -> Option<usize> {
    cands.iter().copied().min_by_key(|&c| (load[c], c))
}

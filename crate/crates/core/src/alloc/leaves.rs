use super::spanning::{
    correction_weights, cycle_steps, derive_seed, extended_host, most_deficient, SpanningParams,
};
use super::{allocate, blowup_allocate, Allocation};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::regularity::ReducedDigraph;
use crate::tree::RootedOrientedTree;
use crate::treeops::{disjoint_leaf_edges, split_tree, tidy_order, AncestralOrder, LeafEdge};

/// A perfectly balanced allocation of a tree with many leaves into a reduced
/// digraph, together with the uniformly oriented leaf-edge family carrying
/// the construction.
#[derive(Clone, Debug)]
pub struct SpanningLeavesAllocation {
    /// The input tree rerooted at the split vertex; every edge list below
    /// and the allocation itself refer to this tree.
    pub tree: RootedOrientedTree,
    /// Ancestral order emitting the smaller split side first.
    pub order: AncestralOrder,
    /// Images: clusters `0..k`, then one extension vertex per exceptional
    /// vertex. Every cluster carries exactly `quota` preimages and every
    /// extension vertex exactly one.
    pub phi: Allocation,
    /// Preimages per cluster, `(n - n0) / k`.
    pub quota: usize,
    /// Whether the chosen family points from support to leaf.
    pub outward: bool,
    /// Edge whose leaf covers extension vertex `k + j`, per `j`.
    pub cover_edges: Vec<LeafEdge>,
    /// Edges pinned onto Hamilton cycle arcs, the same number per arc.
    pub pinned_edges: Vec<LeafEdge>,
    /// Spare edges; rebalancing re-targets their leaves across core arcs.
    pub spare_edges: Vec<LeafEdge>,
}

/// Allocates a spanning tree with many leaves onto the clusters of a reduced
/// digraph so that every cluster receives exactly `(n - n0) / k` vertices
/// and every exceptional vertex exactly one.
///
/// The disjoint leaf edges of the tree are thinned to their majority
/// orientation; the tree is split at a vertex leaving at least a third of
/// the supports on each side and rerooted there. Each side is walked with
/// its family leaves removed, the first plainly and the second through a
/// blow-up of the core weighted towards the clusters still short. The
/// removed leaves then re-enter by hand: one onto each extension vertex, a
/// fixed number onto every Hamilton cycle arc, and the rest wherever load is
/// lowest, still next to their supports' images. Leftover imbalance is
/// cleared exactly by re-targeting spare leaves across core arcs, one
/// index-adjacent cluster at a time; fresh correction seeds are tried until
/// that clearing succeeds.
pub fn allocate_spanning_many_leaves(
    tree: &RootedOrientedTree,
    r: &ReducedDigraph,
    cycle: &[usize],
    params: &SpanningParams,
    seed: u64,
) -> Result<SpanningLeavesAllocation> {
    let n = tree.vertex_count();
    let ext = extended_host(r)?;
    let (k, n0) = (ext.k, ext.n0);
    if k < 2 {
        return Err(Error::invalid("need at least two clusters"));
    }
    if n0 >= n || (n - n0) % k != 0 {
        return Err(Error::invalid(format!(
            "tree order {n} minus {n0} exceptional vertices must be a positive multiple of {k}"
        )));
    }
    let quota = (n - n0) / k;
    let steps = cycle_steps(&r.core, cycle)?;
    let edges = disjoint_leaf_edges(tree)?;
    let required = (params.lambda * n as f64).ceil() as usize;
    if edges.len() < required {
        return Err(Error::invalid(format!(
            "{} disjoint leaf edges, the construction is promised at least {required}",
            edges.len()
        )));
    }
    let outs = edges.iter().filter(|e| e.arc.0 == e.support).count();
    let outward = 2 * outs >= edges.len();
    let family: Vec<LeafEdge> =
        edges.into_iter().filter(|e| (e.arc.0 == e.support) == outward).collect();

    // Split at a vertex giving both sides a fair share of the supports, then
    // reroot there; edges touching the split vertex stay ordinary.
    let marked: Vec<usize> = family.iter().map(|e| e.support).collect();
    let split = split_tree(tree, &marked)?;
    let tree = tree.rerooted(split.shared)?;
    let order = tidy_order(&tree, Some(&split))?;
    let boundary = order.split_boundary.expect("split order carries its boundary");
    let mut side_of = vec![0u8; n];
    for &v in &split.side1 {
        side_of[v] = 1;
    }
    for &v in &split.side2 {
        side_of[v] = if side_of[v] == 1 { 3 } else { 2 };
    }
    let first_side = side_of[*order.order[..boundary]
        .iter()
        .find(|&&v| v != split.shared)
        .expect("the first side has more than the root")];
    let sided: Vec<(LeafEdge, bool)> = family
        .iter()
        .filter(|e| side_of[e.support] != 3 && side_of[e.leaf] != 3)
        .map(|&e| {
            debug_assert_eq!(side_of[e.leaf], side_of[e.support], "a leaf follows its support");
            (e, side_of[e.support] == first_side)
        })
        .collect();
    let mut dropped = vec![false; n];
    for (e, _) in &sided {
        dropped[e.leaf] = true;
    }

    // Phase one: walk the first side without the family leaves.
    let verts1: Vec<usize> =
        order.order[..boundary].iter().copied().filter(|&v| !dropped[v]).collect();
    let sub1 = side_subtree(&tree, &verts1)?;
    let order1 = tidy_order(&sub1, None)?;
    let phi1 = allocate(&sub1, &order1, &r.core, 0, derive_seed(seed, 1))?;
    let mut target = vec![usize::MAX; n];
    let mut load = vec![0i64; k];
    for (new, &old) in verts1.iter().enumerate() {
        target[old] = phi1.target(new);
        load[phi1.target(new)] += 1;
    }
    let img_r = target[tree.root()];

    // The removed first-side leaves re-enter: first a cover of the extension
    // vertices by leaves whose support images qualify, then a fixed pin
    // count onto every Hamilton cycle arc, the rest wherever load is lowest.
    let m_l = (params.lambda * n as f64 / (32.0 * k as f64)).ceil().max(1.0) as usize;
    let mut first_edges: Vec<LeafEdge> = sided.iter().filter(|&&(_, f)| f).map(|&(e, _)| e).collect();
    let second_edges: Vec<LeafEdge> = sided.iter().filter(|&&(_, f)| !f).map(|&(e, _)| e).collect();
    first_edges.sort_by_key(|e| e.leaf);
    let mut taken = vec![false; first_edges.len()];
    let mut cover_edges = Vec::with_capacity(n0);
    for j in 0..n0 {
        let link = &r.v0_links[j];
        let wanted = if outward { &link.in_from } else { &link.out_to };
        let pick = (0..first_edges.len())
            .find(|&i| !taken[i] && wanted.contains(&target[first_edges[i].support]))
            .ok_or_else(|| {
                Error::construction(
                    "phase 1",
                    format!("no first-side leaf support lands next to extension vertex {j}"),
                )
            })?;
        taken[pick] = true;
        let e = first_edges[pick];
        target[e.leaf] = k + j;
        cover_edges.push(e);
    }
    let mut pinned_edges = Vec::with_capacity(k * m_l);
    for c in 0..k {
        let mut got = 0;
        for i in 0..first_edges.len() {
            if got == m_l {
                break;
            }
            if taken[i] || target[first_edges[i].support] != c {
                continue;
            }
            taken[i] = true;
            let e = first_edges[i];
            let image = if outward { steps.succ[c] } else { steps.pred[c] };
            target[e.leaf] = image;
            load[image] += 1;
            pinned_edges.push(e);
            got += 1;
        }
        if got < m_l {
            return Err(Error::construction(
                "phase 1",
                format!("cluster {c} holds {got} leaf supports, the cycle pins need {m_l}"),
            ));
        }
    }
    let mut spare_edges: Vec<LeafEdge> = Vec::new();
    for (i, &e) in first_edges.iter().enumerate() {
        if taken[i] {
            continue;
        }
        let pick = place_leaf(&e, &r.core, outward, &target, &load)?;
        target[e.leaf] = pick;
        load[pick] += 1;
        spare_edges.push(e);
    }

    // Ledger for the second side, corrected for the root unit the blow-up
    // re-draws; its family leaves follow the walk, so nothing else is fixed.
    let deficits: Vec<i64> =
        (0..k).map(|i| quota as i64 - load[i] + i64::from(i == img_r)).collect();
    let weights = correction_weights(&deficits, img_r, params.blowup_per_cluster);
    let verts2: Vec<usize> = std::iter::once(split.shared)
        .chain(order.order[boundary..].iter().copied().filter(|&v| !dropped[v]))
        .collect();
    let sub2 = side_subtree(&tree, &verts2)?;

    // Phase two and three: walk the second side through the weighted
    // blow-up, place its leaves where load is lowest, then clear the
    // remaining imbalance exactly by re-targeting spare leaves. A failed
    // clearing retries the walk.
    for t in 0..params.phase2_tries {
        let phi2 =
            match blowup_allocate(&sub2, &r.core, &weights, img_r, derive_seed(seed, 1000 + t as u64)) {
                Ok(a) => a,
                Err(_) => continue,
            };
        let mut full = target.clone();
        let mut load2 = load.clone();
        for (new, &old) in verts2.iter().enumerate().skip(1) {
            full[old] = phi2.target(new);
            load2[phi2.target(new)] += 1;
        }
        let mut spares2 = spare_edges.clone();
        if second_edges
            .iter()
            .try_for_each(|e| {
                let pick = place_leaf(e, &r.core, outward, &full, &load2)?;
                full[e.leaf] = pick;
                load2[pick] += 1;
                spares2.push(*e);
                Ok::<_, Error>(())
            })
            .is_err()
        {
            continue;
        }
        let delta: Vec<i64> = (0..k).map(|i| quota as i64 - load2[i]).collect();
        if route_spares(&mut full, &spares2, &delta, &r.core, outward, n).is_err() {
            continue;
        }

        debug_assert!(full.iter().all(|&x| x != usize::MAX));
        let phi_full = Allocation::new(full, k + n0)?;
        let out = SpanningLeavesAllocation {
            tree,
            order,
            phi: phi_full,
            quota,
            outward,
            cover_edges,
            pinned_edges,
            spare_edges: spares2,
        };
        check_posts(&out, &ext.host, r, cycle, params, m_l);
        return Ok(out);
    }
    Err(Error::construction(
        "phase 2",
        format!("no correction walk balanced exactly within {} seeds", params.phase2_tries),
    ))
}

/// Relabels the side spanned by `verts` (the split vertex first) as its own
/// tree; returns it with the old-to-new vertex map.
fn side_subtree(tree: &RootedOrientedTree, verts: &[usize]) -> Result<RootedOrientedTree> {
    let mut new_of = vec![usize::MAX; tree.vertex_count()];
    for (i, &v) in verts.iter().enumerate() {
        new_of[v] = i;
    }
    let root = verts[0];
    let mut arcs = Vec::with_capacity(verts.len().saturating_sub(1));
    for &v in verts {
        if v == root {
            continue;
        }
        let p = tree.parent(v).expect("side vertices below the root have parents");
        debug_assert!(new_of[p] != usize::MAX, "walked sides are closed under parents");
        arcs.push(if tree.has_arc(p, v) { (new_of[p], new_of[v]) } else { (new_of[v], new_of[p]) });
    }
    RootedOrientedTree::from_arcs(verts.len(), 0, &arcs)
}

/// The lowest-loaded cluster next to the support's image, on the family's
/// side of it.
fn place_leaf(
    e: &LeafEdge,
    core: &Digraph,
    outward: bool,
    target: &[usize],
    load: &[i64],
) -> Result<usize> {
    let s = target[e.support];
    let pool: Vec<usize> = if outward {
        core.out_neighbors(s).iter().map(|&x| x as usize).collect()
    } else {
        core.in_neighbors(s).iter().map(|&x| x as usize).collect()
    };
    most_deficient(&pool, load).ok_or_else(|| {
        Error::construction("placement", format!("support image {s} has no neighbour for its leaf"))
    })
}

/// Clears `delta` exactly by walking surplus units to deficient clusters one
/// index-adjacent hop at a time: each hop from `a` towards `b` re-targets a
/// spare leaf currently at `a` whose support image also sees `b`, so the
/// move stays a homomorphism. Re-targeted leaves become available at their
/// new cluster. Mirrors the checks of the diamond-based rerouting: deltas
/// sum to zero and each stays below n/log n.
fn route_spares(
    target: &mut [usize],
    spares: &[LeafEdge],
    delta: &[i64],
    core: &Digraph,
    outward: bool,
    n: usize,
) -> Result<()> {
    debug_assert_eq!(delta.iter().sum::<i64>(), 0, "cluster deltas must cancel");
    let cap = n as f64 / (n as f64).ln();
    if let Some((c, &d)) = delta.iter().enumerate().find(|(_, &d)| (d.abs() as f64) >= cap) {
        return Err(Error::construction(
            "phase 3",
            format!("|delta[{c}]| = {} reaches n/log n = {cap:.2}", d.abs()),
        ));
    }
    let k = delta.len();
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, e) in spares.iter().enumerate() {
        pools[target[e.leaf]].push(i);
    }
    let mut gains = Vec::new();
    let mut losses = Vec::new();
    for (c, &d) in delta.iter().enumerate() {
        for _ in 0..d.abs() {
            if d > 0 {
                gains.push(c);
            } else {
                losses.push(c);
            }
        }
    }
    let mut hop = |a: usize, b: usize, pools: &mut Vec<Vec<usize>>| -> Result<()> {
        let ok = |i: usize| {
            let s = target[spares[i].support];
            if outward { core.has_arc(s, b) } else { core.has_arc(b, s) }
        };
        let pos = pools[a].iter().rposition(|&i| ok(i)).ok_or_else(|| {
            Error::construction(
                "phase 3",
                format!("cluster {a} ran out of spare leaves that can move to {b}"),
            )
        })?;
        let i = pools[a].swap_remove(pos);
        target[spares[i].leaf] = b;
        pools[b].push(i);
        Ok(())
    };
    for (&u, &v) in losses.iter().zip(&gains) {
        if u < v {
            for j in u..v {
                hop(j, j + 1, &mut pools)?;
            }
        } else {
            for j in (v..u).rev() {
                hop(j + 1, j, &mut pools)?;
            }
        }
    }
    Ok(())
}

/// Every guarantee of the construction, asserted on the finished allocation.
fn check_posts(
    out: &SpanningLeavesAllocation,
    host: &Digraph,
    r: &ReducedDigraph,
    cycle: &[usize],
    params: &SpanningParams,
    m_l: usize,
) {
    let (tree, phi) = (&out.tree, &out.phi);
    let n = tree.vertex_count();
    let k = r.core.vertex_count();
    let n0 = r.v0_links.len();
    phi.verify_homomorphism(tree, host).expect("spanning allocation is a homomorphism");
    assert!(phi.max_phi_degree(tree) <= 4, "neighbourhood images exceed four");
    for e in out
        .cover_edges
        .iter()
        .chain(&out.pinned_edges)
        .chain(&out.spare_edges)
    {
        assert_eq!(e.arc.0 == e.support, out.outward, "family orientation is mixed");
    }
    for (j, e) in out.cover_edges.iter().enumerate() {
        assert_eq!(phi.target(e.leaf), k + j, "cover leaf {j} off its extension vertex");
    }
    for j in 0..n0 {
        assert_eq!(phi.load(k + j), 1, "extension vertex {j} not covered exactly once");
    }
    let mut per_arc = vec![0usize; k];
    let pos: Vec<usize> = {
        let mut p = vec![0; k];
        for (i, &c) in cycle.iter().enumerate() {
            p[c] = i;
        }
        p
    };
    for e in out.pinned_edges.iter().chain(&out.spare_edges) {
        let (s, l) = (phi.target(e.support), phi.target(e.leaf));
        let (from, to) = if out.outward { (s, l) } else { (l, s) };
        if cycle[(pos[from] + 1) % k] == to {
            per_arc[pos[from]] += 1;
        }
    }
    let floor = params.lambda * n as f64 / (32.0 * k as f64);
    assert!(m_l as f64 >= floor, "pin count {m_l} below its floor {floor:.3}");
    assert!(
        per_arc.iter().all(|&c| c >= m_l),
        "a Hamilton cycle arc carries fewer than {m_l} family edges: {per_arc:?}"
    );
    for x in 0..k {
        assert_eq!(phi.load(x), out.quota, "cluster {x} missed the quota");
    }
}

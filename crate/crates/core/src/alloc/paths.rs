use std::collections::HashSet;

use super::spanning::{
    correction_weights, cycle_steps, derive_seed, extended_host, middle_pattern, monotone_seven,
    most_deficient, wedge_candidates, SpanningParams,
};
use super::{allocate, blowup_allocate, Allocation};
use crate::error::{Error, Result};
use crate::expander::{
    greedy_cover, p_connected_subgraph, shift_weights, Diamond, DiamondBranches, PathPattern,
    RegisteredPath,
};
use crate::regularity::ReducedDigraph;
use crate::tree::RootedOrientedTree;
use crate::treeops::{contract_bare_paths, split_tree, tidy_order, AncestralOrder, BarePath};

/// A perfectly balanced allocation of a tree with many disjoint order-7 bare
/// paths into a reduced digraph, together with the reserved path families
/// the embedding stage leans on.
#[derive(Clone, Debug)]
pub struct SpanningPathsAllocation {
    /// The input tree rerooted at the split vertex; every vertex list below
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
    /// Path whose centre covers extension vertex `k + j`, per `j`.
    pub exception_paths: Vec<[usize; 7]>,
    /// Paths whose middle arcs ride the Hamilton cycle of the core, the same
    /// number centred on every cluster.
    pub cycle_paths: Vec<[usize; 7]>,
    /// Spare paths parked on diamond branches; rebalancing reroutes their
    /// centres between the two middles of their diamond.
    pub spare_paths: Vec<[usize; 7]>,
    /// The diamond chain used for rebalancing, middles `(i, i + 1)`.
    pub diamonds: Vec<Diamond>,
}

#[derive(Clone, Copy)]
enum Role {
    /// Centre covers an extension vertex.
    Exception,
    /// Centre sits on a cluster with its middle arcs on the Hamilton cycle.
    Cycle,
    /// Parked on a diamond branch, available to the rebalancing stage.
    Spare { diamond: usize, second: bool },
}

struct Special {
    v: [usize; 7],
    in_first: bool,
    role: Role,
    /// Images of the middle section (third, centre, fifth vertex), fixed
    /// before any walk runs.
    pinned: (usize, usize, usize),
}

/// Allocates a spanning tree with a supply of disjoint order-7 bare paths
/// onto the clusters of a reduced digraph so that every cluster receives
/// exactly `(n - n0) / k` vertices and every exceptional vertex exactly one.
///
/// The tree is split at a vertex leaving at least a third of the supplied
/// path vertices on each side and rerooted there. Reserve paths are
/// contracted away on whichever side holds them and their middles pinned by
/// hand: one path centre per exceptional vertex, a fixed number of centres
/// per cluster with middle arcs on `cycle`, and the rest parked on the
/// branches of a diamond chain. The first side is then allocated by a
/// neighbour walk, the second through a blow-up of the core weighted towards
/// the clusters still short, and the leftover imbalance is cleared exactly
/// by rerouting spare centres across their diamonds. Fresh correction seeds
/// are tried until the final rerouting succeeds.
///
/// `cycle` must be a Hamilton cycle of the core; the supply must hold at
/// least `lambda * n` paths, pairwise disjoint bare paths of order 7.
pub fn allocate_spanning_many_paths(
    tree: &RootedOrientedTree,
    paths: &[BarePath],
    r: &ReducedDigraph,
    cycle: &[usize],
    params: &SpanningParams,
    seed: u64,
) -> Result<SpanningPathsAllocation> {
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
    let required = (params.lambda * n as f64).ceil() as usize;
    if paths.len() < required {
        return Err(Error::invalid(format!(
            "{} paths supplied, the construction is promised at least {required}",
            paths.len()
        )));
    }
    let mut used = vec![false; n];
    for (i, p) in paths.iter().enumerate() {
        if p.vertices.len() != 7 {
            return Err(Error::invalid(format!(
                "path {i} has order {}, expected 7",
                p.vertices.len()
            )));
        }
        if !p.is_bare_in(tree) {
            return Err(Error::invalid(format!("path {i} is not a bare path of the tree")));
        }
        for &v in &p.vertices {
            if used[v] {
                return Err(Error::invalid(format!("path {i} overlaps an earlier path at {v}")));
            }
            used[v] = true;
        }
    }
    let margin = r.core.min_semidegree() as f64 / k as f64 - 0.5;
    if margin <= 0.0 {
        return Err(Error::invalid(format!(
            "core semidegree {} is at most half of {k}",
            r.core.min_semidegree()
        )));
    }

    // Split at a vertex giving both sides a fair share of the supply, then
    // reroot there so each side becomes a union of root branches.
    let marked: Vec<usize> = paths.iter().flat_map(|p| p.vertices.iter().copied()).collect();
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

    // Canonical top-down reading for every path lying fully inside one side;
    // paths through the split vertex stay ordinary tree vertices.
    let mut pool: Vec<([usize; 7], PathPattern, bool)> = Vec::new();
    for p in paths {
        let Some(v) = monotone_seven(&tree, p) else { continue };
        if v.iter().any(|&x| side_of[x] == 3) {
            continue;
        }
        let s = side_of[v[0]];
        if v.iter().any(|&x| side_of[x] != s) {
            continue;
        }
        pool.push((v, middle_pattern(&tree, &v), s == first_side));
    }
    let variants =
        [PathPattern::OutOut, PathPattern::OutIn, PathPattern::InOut, PathPattern::InIn];
    let counts = variants.map(|pat| pool.iter().filter(|(_, q, _)| *q == pat).count());
    let mut best = 0;
    for i in 1..4 {
        if counts[i] > counts[best] {
            best = i;
        }
    }
    let p_ref = variants[best];
    pool.retain(|(_, q, _)| *q == p_ref);
    pool.sort_by_key(|(v, _, _)| *v);
    let (first_pool, second_pool): (Vec<_>, Vec<_>) = pool.into_iter().partition(|&(_, _, f)| f);

    // Reserve selection. The lists prefer the first side (a uniformly
    // oriented tree can place the whole majority pattern on one side), and
    // every role works on either: middles are pinned before the side's walk
    // runs, wherever that side sits in the schedule.
    let m_h = (params.lambda * n as f64 / (48.0 * k as f64)).ceil().max(1.0) as usize;
    let need_pinned = n0 + k * m_h;
    let all: Vec<([usize; 7], bool)> = first_pool
        .iter()
        .map(|&(v, _, _)| (v, true))
        .chain(second_pool.iter().map(|&(v, _, _)| (v, false)))
        .collect();
    if all.len() < need_pinned {
        return Err(Error::construction(
            "setup",
            format!(
                "{} usable paths, the exceptional and cycle reserves need {need_pinned}",
                all.len()
            ),
        ));
    }
    let per_branch = (all.len() - need_pinned) / (2 * (k - 1));
    if per_branch == 0 {
        return Err(Error::construction(
            "setup",
            format!(
                "{} spare paths cannot stock {} diamond branches",
                all.len() - need_pinned,
                2 * (k - 1)
            ),
        ));
    }
    let (_, diamonds) = p_connected_subgraph(&r.core, &p_ref.reference_path(), margin, seed)?;

    // The exceptional middles: third and fifth vertices must see their
    // extension vertex with the path's arc orientations, chosen by a greedy
    // cover so no cluster is leaned on too often.
    let mut cover_sides: Vec<Vec<usize>> = Vec::with_capacity(2 * n0);
    for j in 0..n0 {
        let link = &r.v0_links[j];
        cover_sides.push(if p_ref.first_out() { link.in_from.clone() } else { link.out_to.clone() });
        cover_sides.push(if p_ref.second_out() { link.out_to.clone() } else { link.in_from.clone() });
    }
    let cover = greedy_cover(&cover_sides, k, params.alpha)?;

    let mut specials: Vec<Special> = Vec::new();
    for (j, &(v, in_first)) in all[..n0].iter().enumerate() {
        let pinned = (cover.choice[2 * j], k + j, cover.choice[2 * j + 1]);
        specials.push(Special { v, in_first, role: Role::Exception, pinned });
    }
    for (t, &(v, in_first)) in all[n0..need_pinned].iter().enumerate() {
        let c = t / m_h;
        let v3 = if p_ref.first_out() { steps.pred[c] } else { steps.succ[c] };
        let v5 = if p_ref.second_out() { steps.succ[c] } else { steps.pred[c] };
        specials.push(Special { v, in_first, role: Role::Cycle, pinned: (v3, c, v5) });
    }
    for (t, &(v, in_first)) in
        all[need_pinned..].iter().take(2 * (k - 1) * per_branch).enumerate()
    {
        let (diamond, second) = (t / (2 * per_branch), (t / per_branch) % 2 == 1);
        let d = &diamonds[diamond];
        let centre = if second { d.middle.1 } else { d.middle.0 };
        specials.push(Special {
            v,
            in_first,
            role: Role::Spare { diamond, second },
            pinned: (d.prefix, centre, d.suffix),
        });
    }

    // Phase one: walk the first side with its reserve paths contracted, then
    // unfold them onto their pinned middles.
    let verts1: Vec<usize> = order.order[..boundary].to_vec();
    let (sub1, new1) = side_subtree(&tree, &verts1)?;
    let firsts: Vec<usize> = (0..specials.len()).filter(|&i| specials[i].in_first).collect();
    let paths1: Vec<BarePath> = firsts
        .iter()
        .map(|&i| BarePath { vertices: specials[i].v.iter().map(|&x| new1[x]).collect() })
        .collect();
    let (sub1c, cmap1) = contract_bare_paths(&sub1, &paths1)?;
    let order1 = tidy_order(&sub1c, None)?;
    let phi1 = allocate(&sub1c, &order1, &r.core, 0, derive_seed(seed, 1))?;

    let mut target = vec![usize::MAX; n];
    let mut load = vec![0i64; k];
    for (new, &old) in verts1.iter().enumerate() {
        let g = cmap1.group_of[new];
        if cmap1.path_index[g].is_none() {
            target[old] = phi1.target(g);
            load[phi1.target(g)] += 1;
        }
    }
    let mut anchors = vec![usize::MAX; specials.len()];
    for &i in &firsts {
        let sp = &specials[i];
        anchors[i] = phi1.target(cmap1.group_of[new1[sp.v[0]]]);
        place_fixed(sp, anchors[i], &mut target, &mut load, k);
    }
    for &i in &firsts {
        extend_free(&specials[i], anchors[i], r, &tree, &mut target, &mut load, 1)?;
    }
    let img_r = target[tree.root()];

    // Ledger for the second side: how far each cluster still is from quota,
    // corrected for the root unit the blow-up re-draws and for the middles of
    // the second side's spares, which are pinned before its walk.
    let mut fixed2 = vec![0i64; k];
    for sp in specials.iter().filter(|sp| !sp.in_first) {
        for image in [sp.pinned.0, sp.pinned.1, sp.pinned.2] {
            if image < k {
                fixed2[image] += 1;
            }
        }
    }
    let deficits: Vec<i64> =
        (0..k).map(|i| quota as i64 - load[i] + i64::from(i == img_r) - fixed2[i]).collect();
    let weights = correction_weights(&deficits, img_r, params.blowup_per_cluster);

    let verts2: Vec<usize> =
        std::iter::once(split.shared).chain(order.order[boundary..].iter().copied()).collect();
    let (sub2, new2) = side_subtree(&tree, &verts2)?;
    let seconds: Vec<usize> = (0..specials.len()).filter(|&i| !specials[i].in_first).collect();
    let paths2: Vec<BarePath> = seconds
        .iter()
        .map(|&i| BarePath { vertices: specials[i].v.iter().map(|&x| new2[x]).collect() })
        .collect();
    let (sub2c, cmap2) = contract_bare_paths(&sub2, &paths2)?;

    // Phase two and three: walk the second side through the weighted
    // blow-up, then clear the remaining imbalance exactly by rerouting spare
    // centres across their diamonds. A failed clearing retries the walk.
    for t in 0..params.phase2_tries {
        let phi2 = match blowup_allocate(&sub2c, &r.core, &weights, img_r, derive_seed(seed, 1000 + t as u64))
        {
            Ok(a) => a,
            Err(_) => continue,
        };
        let mut full = target.clone();
        let mut load2 = load.clone();
        for (new, &old) in verts2.iter().enumerate().skip(1) {
            let g = cmap2.group_of[new];
            if cmap2.path_index[g].is_none() {
                full[old] = phi2.target(g);
                load2[phi2.target(g)] += 1;
            }
        }
        let mut anchors2 = anchors.clone();
        for &i in &seconds {
            let sp = &specials[i];
            anchors2[i] = phi2.target(cmap2.group_of[new2[sp.v[0]]]);
            place_fixed(sp, anchors2[i], &mut full, &mut load2, k);
        }
        if seconds
            .iter()
            .try_for_each(|&i| extend_free(&specials[i], anchors2[i], r, &tree, &mut full, &mut load2, 2))
            .is_err()
        {
            continue;
        }

        debug_assert!(full.iter().all(|&x| x != usize::MAX));
        let phi_full = Allocation::new(full, k + n0)?;
        let mut branches = vec![DiamondBranches::default(); diamonds.len()];
        for sp in &specials {
            if let Role::Spare { diamond, second } = sp.role {
                let reg = RegisteredPath { prefix: sp.v[2], centre: sp.v[3], suffix: sp.v[4] };
                if second {
                    branches[diamond].on_second.push(reg);
                } else {
                    branches[diamond].on_first.push(reg);
                }
            }
        }
        let delta: Vec<i64> = (0..k + n0)
            .map(|i| if i < k { quota as i64 - phi_full.load(i) as i64 } else { 0 })
            .collect();
        let rho = match shift_weights(&phi_full, &diamonds, &branches, &delta) {
            Ok(rho) => rho,
            Err(_) => continue,
        };

        let out = SpanningPathsAllocation {
            tree,
            order,
            phi: rho,
            quota,
            exception_paths: specials
                .iter()
                .filter(|sp| matches!(sp.role, Role::Exception))
                .map(|sp| sp.v)
                .collect(),
            cycle_paths: specials
                .iter()
                .filter(|sp| matches!(sp.role, Role::Cycle))
                .map(|sp| sp.v)
                .collect(),
            spare_paths: specials
                .iter()
                .filter(|sp| matches!(sp.role, Role::Spare { .. }))
                .map(|sp| sp.v)
                .collect(),
            diamonds,
        };
        check_posts(&out, &ext.host, r, cycle, params, m_h);
        return Ok(out);
    }
    Err(Error::construction(
        "phase 2",
        format!("no correction walk balanced exactly within {} seeds", params.phase2_tries),
    ))
}

/// Relabels the side spanned by `verts` (the split vertex first) as its own
/// tree; returns it with the old-to-new vertex map.
fn side_subtree(
    tree: &RootedOrientedTree,
    verts: &[usize],
) -> Result<(RootedOrientedTree, Vec<usize>)> {
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
        debug_assert!(new_of[p] != usize::MAX, "split sides are closed under parents");
        arcs.push(if tree.has_arc(p, v) { (new_of[p], new_of[v]) } else { (new_of[v], new_of[p]) });
    }
    let sub = RootedOrientedTree::from_arcs(verts.len(), 0, &arcs)?;
    Ok((sub, new_of))
}

/// Writes the walk-anchored endpoints and the pinned middle of one reserve
/// path; only clusters are counted in the running loads.
fn place_fixed(sp: &Special, anchor: usize, target: &mut [usize], load: &mut [i64], k: usize) {
    target[sp.v[0]] = anchor;
    target[sp.v[6]] = anchor;
    load[anchor] += 2;
    let (a, b, c) = sp.pinned;
    for (vertex, image) in [(sp.v[2], a), (sp.v[3], b), (sp.v[4], c)] {
        target[vertex] = image;
        if image < k {
            load[image] += 1;
        }
    }
}

/// Chooses the two free vertices of a reserve path: each must extend the
/// homomorphism between its two placed neighbours, and among the candidates
/// the cluster furthest below quota is taken.
fn extend_free(
    sp: &Special,
    anchor: usize,
    r: &ReducedDigraph,
    tree: &RootedOrientedTree,
    target: &mut [usize],
    load: &mut [i64],
    phase: i32,
) -> Result<()> {
    let stage = if phase == 1 { "phase 1" } else { "phase 2" };
    let v = &sp.v;
    let pairs = [
        (v[1], anchor, tree.has_arc(v[0], v[1]), target[v[2]], tree.has_arc(v[1], v[2])),
        (v[5], target[v[4]], tree.has_arc(v[4], v[5]), anchor, tree.has_arc(v[5], v[6])),
    ];
    for (vertex, from, from_out, to, to_out) in pairs {
        let cands = wedge_candidates(&r.core, from, from_out, to, to_out);
        let pick = most_deficient(&cands, load).ok_or_else(|| {
            Error::construction(stage, format!("no cluster joins {from} to {to} for a reserve path"))
        })?;
        target[vertex] = pick;
        load[pick] += 1;
    }
    Ok(())
}

/// Every guarantee of the construction, asserted on the finished allocation.
fn check_posts(
    out: &SpanningPathsAllocation,
    host: &crate::digraph::Digraph,
    r: &ReducedDigraph,
    cycle: &[usize],
    params: &SpanningParams,
    m_h: usize,
) {
    let (tree, phi) = (&out.tree, &out.phi);
    let n = tree.vertex_count();
    let k = r.core.vertex_count();
    let n0 = r.v0_links.len();
    phi.verify_homomorphism(tree, host).expect("spanning allocation is a homomorphism");
    assert!(phi.max_phi_degree(tree) <= 4, "neighbourhood images exceed four");
    for (j, p) in out.exception_paths.iter().enumerate() {
        assert_eq!(phi.target(p[3]), k + j, "exception centre {j} off its extension vertex");
    }
    for j in 0..n0 {
        assert_eq!(phi.load(k + j), 1, "extension vertex {j} not covered exactly once");
    }
    let mut centres = vec![0usize; k];
    let ham: HashSet<(usize, usize)> =
        (0..k).map(|i| (cycle[i], cycle[(i + 1) % k])).collect();
    for p in &out.cycle_paths {
        let c = phi.target(p[3]);
        centres[c] += 1;
        for (a, b) in [(p[2], p[3]), (p[3], p[4])] {
            let arc =
                if tree.has_arc(a, b) { (phi.target(a), phi.target(b)) } else { (phi.target(b), phi.target(a)) };
            assert!(ham.contains(&arc), "cycle path middle arc {arc:?} leaves the Hamilton cycle");
        }
    }
    let floor = params.lambda * n as f64 / (48.0 * k as f64);
    assert!(m_h as f64 >= floor, "cycle reserve {m_h} below its floor {floor:.3}");
    assert!(centres.iter().all(|&c| c == m_h), "cycle centres unevenly spread: {centres:?}");
    let mut near = vec![0usize; k];
    for p in &out.exception_paths {
        near[phi.target(p[2])] += 1;
        near[phi.target(p[4])] += 1;
    }
    let bound = 2.0 * params.eps * n as f64 / (params.alpha * k as f64);
    assert!(
        near.iter().all(|&c| (c as f64) <= bound),
        "exception neighbours crowd a cluster: {near:?} against {bound:.2}"
    );
    for x in 0..k {
        assert_eq!(phi.load(x), out.quota, "cluster {x} missed the quota");
    }
}

use std::collections::BTreeSet;

use super::diamonds::Diamond;
use crate::alloc::Allocation;
use crate::error::{Error, Result};

/// An order-3 path of the tree registered for rerouting, by vertex ids.
/// Its images under the allocation must lie on one branch of one diamond.
#[derive(Clone, Copy, Debug)]
pub struct RegisteredPath {
    pub prefix: usize,
    pub centre: usize,
    pub suffix: usize,
}

/// The registered paths currently riding each branch of a diamond, keyed by
/// which middle their centre maps to.
#[derive(Clone, Debug, Default)]
pub struct DiamondBranches {
    pub on_first: Vec<RegisteredPath>,
    pub on_second: Vec<RegisteredPath>,
}

/// Adjusts an allocation so every host vertex x ends up with exactly
/// `delta[x]` more (or fewer) preimages, by rerouting registered paths
/// between the two middles of diamonds.
///
/// One reroute on diamond i moves a centre between middles i and i+1,
/// trading one unit of load between those hosts and touching nothing else.
/// A unit is shifted from a loser u to a gainer v by rerouting once on every
/// diamond between them; interior middles gain from one diamond and lose to
/// the next, so only the endpoints change. Budgets are dynamic: a path
/// rerouted earlier becomes available on its new branch. The deltas must sum
/// to zero and stay below n/log n each (n the tree order), mirroring how
/// much slack the allocator's path families actually carry. The diamond
/// chain covers hosts 0..=diamonds.len(); any host beyond it (an exceptional
/// vertex, say) must carry delta zero.
pub fn shift_weights(
    phi: &Allocation,
    diamonds: &[Diamond],
    branches: &[DiamondBranches],
    delta: &[i64],
) -> Result<Allocation> {
    let n = phi.host_count();
    if delta.len() != n {
        return Err(Error::invalid(format!(
            "delta covers {} hosts but the allocation has {n}",
            delta.len()
        )));
    }
    if delta.iter().map(|&d| d as i128).sum::<i128>() != 0 {
        return Err(Error::invalid("deltas must sum to zero"));
    }
    let tree_n = phi.tree_count();
    if tree_n >= 2 {
        let cap = tree_n as f64 / (tree_n as f64).ln();
        if let Some((v, &dv)) = delta.iter().enumerate().find(|(_, &d)| (d.abs() as f64) >= cap)
        {
            return Err(Error::invalid(format!(
                "|delta[{v}]| = {} reaches n/log n = {cap:.2}",
                dv.abs()
            )));
        }
    }
    if delta.iter().all(|&d| d == 0) {
        return Ok(phi.clone());
    }
    if diamonds.len() != branches.len() {
        return Err(Error::invalid(format!(
            "{} diamonds but {} branch registries",
            diamonds.len(),
            branches.len()
        )));
    }
    if diamonds.len() + 1 > n {
        return Err(Error::invalid(format!(
            "{} chained diamonds need at least {} hosts, allocation has {n}",
            diamonds.len(),
            diamonds.len() + 1
        )));
    }
    if let Some((v, _)) = delta.iter().enumerate().skip(diamonds.len() + 1).find(|(_, &d)| d != 0)
    {
        return Err(Error::invalid(format!(
            "host {v} lies beyond the diamond chain but has nonzero delta"
        )));
    }
    for (i, d) in diamonds.iter().enumerate() {
        if d.middle != (i, i + 1) {
            return Err(Error::invalid(format!(
                "diamond {i} has middle {:?}, expected ({i}, {})",
                d.middle,
                i + 1
            )));
        }
    }

    // Flatten the registries, checking every claimed position against phi.
    let mut paths: Vec<RegisteredPath> = Vec::new();
    let mut on_first: Vec<Vec<usize>> = vec![Vec::new(); diamonds.len()];
    let mut on_second: Vec<Vec<usize>> = vec![Vec::new(); diamonds.len()];
    let mut centres = BTreeSet::new();
    for (i, reg) in branches.iter().enumerate() {
        for (second, list) in [(false, &reg.on_first), (true, &reg.on_second)] {
            for p in list {
                let middle = if second { diamonds[i].middle.1 } else { diamonds[i].middle.0 };
                check_position(phi, p, &diamonds[i], middle, i)?;
                if !centres.insert(p.centre) {
                    return Err(Error::invalid(format!(
                        "tree vertex {} is registered as a centre twice",
                        p.centre
                    )));
                }
                let idx = paths.len();
                paths.push(*p);
                if second {
                    on_second[i].push(idx);
                } else {
                    on_first[i].push(idx);
                }
            }
        }
    }

    let mut rho = phi.clone();
    let mut moved = BTreeSet::new();
    let mut gains: Vec<usize> = Vec::new();
    let mut losses: Vec<usize> = Vec::new();
    for (v, &d) in delta.iter().enumerate() {
        for _ in 0..d.abs() {
            if d > 0 {
                gains.push(v);
            } else {
                losses.push(v);
            }
        }
    }
    for (&u, &v) in losses.iter().zip(&gains) {
        if u < v {
            for j in u..v {
                let idx = on_first[j].pop().ok_or_else(|| branch_exhausted(j, j))?;
                rho.set_target(paths[idx].centre, j + 1);
                on_second[j].push(idx);
                moved.insert(idx);
            }
        } else {
            for j in (v..u).rev() {
                let idx = on_second[j].pop().ok_or_else(|| branch_exhausted(j, j + 1))?;
                rho.set_target(paths[idx].centre, j);
                on_first[j].push(idx);
                moved.insert(idx);
            }
        }
    }

    // The preimage identity is exact or the routing above is wrong.
    for x in 0..n {
        assert_eq!(
            rho.load(x) as i64,
            phi.load(x) as i64 + delta[x],
            "preimage count drifted at host {x}"
        );
    }
    // Every touched path must still realize a branch of its diamond, and
    // nothing but centres of touched paths may have moved.
    for (i, d) in diamonds.iter().enumerate() {
        for (list, middle) in [(&on_first[i], d.middle.0), (&on_second[i], d.middle.1)] {
            for &idx in list.iter() {
                check_position(&rho, &paths[idx], d, middle, i)?;
            }
        }
    }
    let touched: BTreeSet<usize> = moved.iter().map(|&idx| paths[idx].centre).collect();
    for v in 0..rho.tree_count() {
        if rho.target(v) != phi.target(v) {
            assert!(touched.contains(&v), "vertex {v} moved without being rerouted");
        }
    }
    Ok(rho)
}

fn check_position(
    alloc: &Allocation,
    p: &RegisteredPath,
    d: &Diamond,
    middle: usize,
    index: usize,
) -> Result<()> {
    let count = alloc.tree_count();
    for v in [p.prefix, p.centre, p.suffix] {
        if v >= count {
            return Err(Error::invalid(format!(
                "registered path names tree vertex {v}, beyond {count}"
            )));
        }
    }
    if alloc.target(p.prefix) != d.prefix
        || alloc.target(p.centre) != middle
        || alloc.target(p.suffix) != d.suffix
    {
        return Err(Error::invalid(format!(
            "path ({}, {}, {}) maps to ({}, {}, {}), not the branch of diamond {index} \
             through middle {middle}",
            p.prefix,
            p.centre,
            p.suffix,
            alloc.target(p.prefix),
            alloc.target(p.centre),
            alloc.target(p.suffix)
        )));
    }
    Ok(())
}

fn branch_exhausted(diamond: usize, middle: usize) -> Error {
    Error::construction(
        "shift_weights",
        format!("diamond {diamond} ran out of spare paths on the branch through middle {middle}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expander::diamonds::PathPattern;

    /// Chain over `n` hosts with `per_branch` registered paths everywhere.
    /// Prefix and suffix hosts are picked outside the middle pair; tree
    /// vertices are dealt out three per path.
    fn rig(n: usize, per_branch: usize) -> (Allocation, Vec<Diamond>, Vec<DiamondBranches>) {
        let mut targets = Vec::new();
        let mut diamonds = Vec::new();
        let mut branches = Vec::new();
        for i in 0..n - 1 {
            let prefix = (i + 2) % n;
            let suffix = (i + 3) % n;
            let d = Diamond::new(prefix, (i, i + 1), suffix, PathPattern::OutOut).unwrap();
            let mut reg = DiamondBranches::default();
            for second in [false, true] {
                for _ in 0..per_branch {
                    let base = targets.len();
                    targets.extend_from_slice(&[
                        prefix,
                        if second { i + 1 } else { i },
                        suffix,
                    ]);
                    let path =
                        RegisteredPath { prefix: base, centre: base + 1, suffix: base + 2 };
                    if second {
                        reg.on_second.push(path);
                    } else {
                        reg.on_first.push(path);
                    }
                }
            }
            diamonds.push(d);
            branches.push(reg);
        }
        (Allocation::new(targets, n).unwrap(), diamonds, branches)
    }

    #[test]
    fn zero_delta_is_identity() {
        let (phi, diamonds, branches) = rig(4, 2);
        let rho = shift_weights(&phi, &diamonds, &branches, &[0, 0, 0, 0]).unwrap();
        assert_eq!(rho.targets(), phi.targets());
    }

    #[test]
    fn ascending_shift_moves_exactly_one_unit() {
        let (phi, diamonds, branches) = rig(4, 3);
        let delta = [-1, 0, 0, 1];
        let rho = shift_weights(&phi, &diamonds, &branches, &delta).unwrap();
        for x in 0..4 {
            assert_eq!(rho.load(x) as i64, phi.load(x) as i64 + delta[x]);
        }
        // Exactly one centre is rerouted per diamond on the route.
        let changed: Vec<usize> =
            (0..phi.tree_count()).filter(|&v| rho.target(v) != phi.target(v)).collect();
        assert_eq!(changed.len(), 3);
        assert!(changed.iter().all(|&v| v % 3 == 1), "only centres move: {changed:?}");
    }

    #[test]
    fn descending_shift_uses_the_other_branches() {
        let (phi, diamonds, branches) = rig(5, 2);
        let delta = [2, 0, 0, 0, -2];
        let rho = shift_weights(&phi, &diamonds, &branches, &delta).unwrap();
        for x in 0..5 {
            assert_eq!(rho.load(x) as i64, phi.load(x) as i64 + delta[x]);
        }
    }

    #[test]
    fn nonzero_sum_is_rejected() {
        let (phi, diamonds, branches) = rig(4, 2);
        let err = shift_weights(&phi, &diamonds, &branches, &[1, 0, 0, 0]).unwrap_err();
        assert!(err.to_string().contains("sum"), "{err}");
    }

    #[test]
    fn oversized_delta_is_rejected() {
        // The tree has 162 vertices, so n/log n is about 31.8 and a swing of
        // 32 is out of bounds no matter how many paths are registered.
        let (phi, diamonds, branches) = rig(4, 9);
        let err = shift_weights(&phi, &diamonds, &branches, &[-32, 0, 0, 32]).unwrap_err();
        assert!(err.to_string().contains("n/log n"), "{err}");
    }

    #[test]
    fn hosts_beyond_the_chain_must_sit_still() {
        // Extend the host space past the diamond chain, as when exceptional
        // vertices ride along: zero deltas there are fine, nonzero are not.
        let (phi, diamonds, branches) = rig(4, 2);
        let mut targets: Vec<usize> = (0..phi.tree_count()).map(|v| phi.target(v)).collect();
        targets.push(5);
        let wide = Allocation::new(targets, 6).unwrap();
        let rho = shift_weights(&wide, &diamonds, &branches, &[-1, 0, 0, 1, 0, 0]).unwrap();
        assert_eq!(rho.load(0), wide.load(0) - 1);
        let err = shift_weights(&wide, &diamonds, &branches, &[-1, 0, 0, 0, 0, 1]).unwrap_err();
        assert!(err.to_string().contains("beyond the diamond chain"), "{err}");
    }

    #[test]
    fn exhausted_branch_is_named() {
        let (phi, diamonds, branches) = rig(4, 1);
        // Two units over diamond 1 with a single spare path on it. The
        // second unit starts at host 1 so it cannot reuse the path that the
        // first unit parked on diamond 0's second branch.
        let err = shift_weights(&phi, &diamonds, &branches, &[-1, -1, 0, 2]).unwrap_err();
        assert!(err.to_string().contains("diamond 1"), "{err}");
    }

    #[test]
    fn both_directions_work_on_single_spares() {
        // One spare path per branch, shifted forth and the load pulled back:
        // the same rig routes -1/+1 and then +1/-1 in two separate calls.
        let (phi, diamonds, branches) = rig(4, 1);
        let rho = shift_weights(&phi, &diamonds, &branches, &[-1, 0, 0, 1]).unwrap();
        assert_ne!(rho.targets(), phi.targets());
        let back = shift_weights(&phi, &diamonds, &branches, &[1, 0, 0, -1]).unwrap();
        for x in 0..4 {
            assert_eq!(back.load(x) as i64, phi.load(x) as i64 + [1, 0, 0, -1][x]);
        }
    }

    #[test]
    fn misregistered_path_is_rejected() {
        let (phi, diamonds, mut branches) = rig(4, 2);
        // Claim a path on diamond 0's first branch whose centre image is 1.
        let bad = branches[1].on_first[0];
        branches[0].on_first.push(bad);
        let err = shift_weights(&phi, &diamonds, &branches, &[-1, 0, 0, 1]).unwrap_err();
        assert!(err.to_string().contains("not the branch"), "{err}");
    }
}

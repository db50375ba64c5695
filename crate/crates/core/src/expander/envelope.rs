use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::predicate::{is_expander, ExpanderMode, EXHAUSTIVE_LIMIT};
use super::regular::RegularExpander;
use crate::digraph::{Digraph, DigraphBuilder};
use crate::error::{Error, Result};

/// Attempts per degree value with reshuffled candidate-arc order.
const SHUFFLES_PER_DEGREE: usize = 4;

/// Wraps the forced arcs `f` in a d-regular spanning expander inside `g`,
/// for the smallest achievable `d`.
///
/// This is the small-host counterpart of [`regular_expander_subdigraph`]:
/// instead of sparsifying and layering matchings, it completes `f` directly
/// to a d-regular subdigraph with one exact flow computation per candidate
/// degree (source feeds each vertex its missing out-arcs, each vertex drains
/// its missing in-arcs, candidate arcs of `g` not in `f` carry unit flow) and
/// then tests expansion exhaustively. Degrees run from max(2, Δ⁰(f)) up to
/// δ⁰(g), with a few reshuffles of the candidate order per degree.
///
/// Only hosts small enough for the exhaustive expander test are accepted;
/// larger hosts have enough slack for the sparsifying construction.
///
/// [`regular_expander_subdigraph`]: super::regular_expander_subdigraph
pub fn regular_envelope(g: &Digraph, f: &Digraph, seed: u64) -> Result<RegularExpander> {
    let n = g.vertex_count();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::invalid(format!(
            "envelope hosts are capped at {EXHAUSTIVE_LIMIT} vertices for the exhaustive \
             expansion test, got {n}"
        )));
    }
    if n < 3 {
        return Err(Error::invalid("no digraph on fewer than 3 vertices expands"));
    }
    if f.vertex_count() != n {
        return Err(Error::invalid(format!(
            "forced subgraph is on {} vertices, host on {n}",
            f.vertex_count()
        )));
    }
    for (u, v) in f.arcs() {
        if !g.has_arc(u, v) {
            return Err(Error::invalid(format!("forced arc ({u}, {v}) is missing from the host")));
        }
    }

    let d_low = f.max_semidegree().max(2);
    let d_high = g.min_semidegree();
    let mut candidates: Vec<(usize, usize)> = g.arcs().filter(|&(u, v)| !f.has_arc(u, v)).collect();
    let mut rng = StdRng::seed_from_u64(seed);

    for d in d_low..=d_high {
        for _ in 0..SHUFFLES_PER_DEGREE {
            candidates.shuffle(&mut rng);
            if let Some(h) = complete_to_regular(n, f, &candidates, d) {
                if is_expander(&h, ExpanderMode::Exhaustive)? {
                    debug_assert_eq!(h.is_regular(), Some(d));
                    return Ok(RegularExpander { h, degree: d, repaired_arcs: 0, sparsify_p: 1.0 });
                }
            }
        }
    }
    Err(Error::construction(
        "regular envelope",
        format!(
            "no degree in {d_low}..={d_high} completes the forced arcs to a regular expander \
             inside the host"
        ),
    ))
}

/// Exact d-regular completion of `f` using `candidates` for the free arcs,
/// or None when the demands cannot all be met.
fn complete_to_regular(
    n: usize,
    f: &Digraph,
    candidates: &[(usize, usize)],
    d: usize,
) -> Option<Digraph> {
    // Flow network: 0 = source, 1 = sink, 2 + u = u's out-side,
    // 2 + n + v = v's in-side.
    let mut net = FlowNet::new(2 + 2 * n);
    let mut demand = 0usize;
    for u in 0..n {
        if f.out_degree(u) > d || f.in_degree(u) > d {
            return None;
        }
        demand += d - f.out_degree(u);
        net.add_edge(0, 2 + u, d - f.out_degree(u));
        net.add_edge(2 + n + u, 1, d - f.in_degree(u));
    }
    let mut arc_edge = Vec::with_capacity(candidates.len());
    for &(u, v) in candidates {
        arc_edge.push(net.add_edge(2 + u, 2 + n + v, 1));
    }
    if net.max_flow(0, 1) < demand {
        return None;
    }
    let mut b = DigraphBuilder::new(n);
    for (u, v) in f.arcs() {
        b.add(u, v);
    }
    for (i, &(u, v)) in candidates.iter().enumerate() {
        if net.is_saturated(arc_edge[i]) {
            b.add(u, v);
        }
    }
    Some(b.build())
}

struct FlowEdge {
    to: usize,
    cap: usize,
}

/// Minimal BFS-augmenting max flow; node and edge counts here are tiny.
struct FlowNet {
    edges: Vec<FlowEdge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNet {
    fn new(nodes: usize) -> Self {
        FlowNet { edges: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    /// Adds a forward edge and its residual twin; returns the forward index.
    fn add_edge(&mut self, from: usize, to: usize, cap: usize) -> usize {
        let id = self.edges.len();
        self.edges.push(FlowEdge { to, cap });
        self.edges.push(FlowEdge { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    fn is_saturated(&self, edge: usize) -> bool {
        self.edges[edge].cap == 0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut total = 0;
        loop {
            let mut prev_edge = vec![usize::MAX; self.adj.len()];
            let mut queue = std::collections::VecDeque::from([s]);
            prev_edge[s] = usize::MAX - 1;
            while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let v = self.edges[e].to;
                    if self.edges[e].cap > 0 && prev_edge[v] == usize::MAX {
                        prev_edge[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if prev_edge[t] == usize::MAX {
                return total;
            }
            let mut bottleneck = usize::MAX;
            let mut v = t;
            while v != s {
                let e = prev_edge[v];
                bottleneck = bottleneck.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = prev_edge[v];
                self.edges[e].cap -= bottleneck;
                self.edges[e ^ 1].cap += bottleneck;
                v = self.edges[e ^ 1].to;
            }
            total += bottleneck;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_forcing_on_a_complete_host_yields_the_smallest_degree() {
        let g = Digraph::complete(8);
        let env = regular_envelope(&g, &Digraph::empty(8), 5).unwrap();
        assert_eq!(env.degree, 2);
        assert_eq!(env.h.is_regular(), Some(2));
        assert!(is_expander(&env.h, ExpanderMode::Exhaustive).unwrap());
    }

    #[test]
    fn forced_arcs_survive_and_lift_the_degree() {
        let g = Digraph::complete(9);
        // Vertex 0 with four forced out-arcs.
        let f = Digraph::from_arcs(9, (1..=4).map(|v| (0, v))).unwrap();
        let env = regular_envelope(&g, &f, 3).unwrap();
        assert!(env.degree >= 4);
        assert_eq!(env.h.is_regular(), Some(env.degree));
        for (u, v) in f.arcs() {
            assert!(env.h.has_arc(u, v));
        }
        assert!(is_expander(&env.h, ExpanderMode::Exhaustive).unwrap());
    }

    #[test]
    fn same_seed_reproduces_the_same_envelope() {
        let g = Digraph::complete(10);
        let f = Digraph::from_arcs(10, [(0, 1), (2, 3)]).unwrap();
        let a = regular_envelope(&g, &f, 77).unwrap();
        let b = regular_envelope(&g, &f, 77).unwrap();
        assert_eq!(a.degree, b.degree);
        let arcs_a: Vec<_> = a.h.arcs().collect();
        let arcs_b: Vec<_> = b.h.arcs().collect();
        assert_eq!(arcs_a, arcs_b);
    }

    #[test]
    fn sparse_hosts_cannot_be_enveloped() {
        let cycle = Digraph::from_arcs(6, (0..6).map(|v| (v, (v + 1) % 6))).unwrap();
        let err = regular_envelope(&cycle, &Digraph::empty(6), 1).unwrap_err();
        assert!(err.to_string().contains("regular expander"), "{err}");
    }

    #[test]
    fn oversized_hosts_and_foreign_arcs_are_rejected() {
        let g = Digraph::complete(23);
        assert!(regular_envelope(&g, &Digraph::empty(23), 1).is_err());
        let g = Digraph::from_arcs(5, (0..5).flat_map(|u| (0..5).filter(move |&v| v != u).map(move |v| (u, v)))).unwrap();
        let f = Digraph::from_arcs(5, [(0, 1)]).unwrap();
        let mut g_missing = DigraphBuilder::new(5);
        for (u, v) in g.arcs().filter(|&a| a != (0, 1)) {
            g_missing.add(u, v);
        }
        assert!(regular_envelope(&g_missing.build(), &f, 1).is_err());
    }

    #[test]
    fn every_degree_up_to_the_host_floor_is_reachable() {
        // Forcing a (d-1)-regular subdigraph pushes the envelope to at least
        // d-1; the result must still be regular and expanding.
        let g = Digraph::complete(11);
        for d in 2..=6 {
            let f =
                Digraph::from_arcs(11, (0..11).flat_map(move |u| (1..d).map(move |o| (u, (u + o) % 11))))
                    .unwrap();
            let env = regular_envelope(&g, &f, d as u64).unwrap();
            assert!(env.degree + 1 >= d);
            assert_eq!(env.h.is_regular(), Some(env.degree));
        }
    }
}

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[inline]
fn pack(u: usize, v: usize) -> u64 {
    ((u as u64) << 32) | v as u64
}

/// Directed graph on vertices 0..n-1 with no loops and no parallel arcs.
/// Anti-parallel pairs (u->v and v->u) are allowed; `is_oriented` reports
/// whether any are present. Adjacency lists are kept sorted so neighbour
/// scans are deterministic and membership checks can fall back to the arc set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
    #[serde(skip)]
    arc_set: HashSet<u64>,
}

impl Digraph {
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut b = DigraphBuilder::new(n);
        for (u, v) in arcs {
            b.try_add(u, v)?;
        }
        Ok(b.build())
    }

    /// Digraph on `n` vertices with no arcs.
    pub fn empty(n: usize) -> Self {
        DigraphBuilder::new(n).build()
    }

    /// Complete digraph: both arcs between every vertex pair.
    pub fn complete(n: usize) -> Self {
        let mut b = DigraphBuilder::new(n);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    b.add(u, v);
                }
            }
        }
        b.build()
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arc_set.len()
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.arc_set.contains(&pack(u, v))
    }

    pub fn out_neighbors(&self, v: usize) -> &[u32] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[u32] {
        &self.inn[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].len()
    }

    /// min(out-degree, in-degree) at v.
    pub fn semidegree(&self, v: usize) -> usize {
        self.out[v].len().min(self.inn[v].len())
    }

    /// Minimum semidegree over all vertices; 0 for the empty graph.
    pub fn min_semidegree(&self) -> usize {
        (0..self.n).map(|v| self.semidegree(v)).min().unwrap_or(0)
    }

    /// max over vertices of max(in-degree, out-degree).
    pub fn max_semidegree(&self) -> usize {
        (0..self.n)
            .map(|v| self.out[v].len().max(self.inn[v].len()))
            .max()
            .unwrap_or(0)
    }

    /// True when no anti-parallel pair of arcs is present.
    pub fn is_oriented(&self) -> bool {
        self.arcs().all(|(u, v)| !self.has_arc(v, u))
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v as usize)))
    }

    /// Exactly d-in and d-out regular?
    pub fn is_regular(&self) -> Option<usize> {
        if self.n == 0 {
            return Some(0);
        }
        let d = self.out[0].len();
        for v in 0..self.n {
            if self.out[v].len() != d || self.inn[v].len() != d {
                return None;
            }
        }
        Some(d)
    }

    /// Number of arcs from X into Y. X and Y need not be disjoint.
    pub fn arcs_between(&self, xs: &[usize], ys: &[usize]) -> usize {
        let yset: HashSet<usize> = ys.iter().copied().collect();
        let mut e = 0usize;
        for &x in xs {
            for &v in &self.out[x] {
                if yset.contains(&(v as usize)) {
                    e += 1;
                }
            }
        }
        e
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.n);
        for (u, v) in self.arcs() {
            let _ = writeln!(s, "{} {}", u, v);
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad vertex count: {e}")))?;
        let mut b = DigraphBuilder::new(n);
        for line in lines {
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .ok_or_else(|| Error::Parse(format!("bad arc line: {line:?}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad arc line {line:?}: {e}")))?;
            let v: usize = it
                .next()
                .ok_or_else(|| Error::Parse(format!("bad arc line: {line:?}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad arc line {line:?}: {e}")))?;
            b.try_add(u, v)?;
        }
        Ok(b.build())
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct J<'a> {
            n: usize,
            arcs: Vec<(usize, usize)>,
            #[serde(skip_serializing_if = "Option::is_none")]
            _marker: Option<&'a ()>,
        }
        let arcs: Vec<(usize, usize)> = self.arcs().collect();
        serde_json::to_string(&J { n: self.n, arcs, _marker: None }).expect("serialize digraph")
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct J {
            n: usize,
            arcs: Vec<(usize, usize)>,
        }
        let j: J =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad digraph json: {e}")))?;
        Digraph::from_arcs(j.n, j.arcs)
    }
}

/// Mutable accumulator; `build` sorts adjacency and freezes the graph.
#[derive(Clone, Debug)]
pub struct DigraphBuilder {
    n: usize,
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
    arc_set: HashSet<u64>,
}

impl DigraphBuilder {
    pub fn new(n: usize) -> Self {
        DigraphBuilder {
            n,
            out: vec![Vec::new(); n],
            inn: vec![Vec::new(); n],
            arc_set: HashSet::new(),
        }
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.arc_set.contains(&pack(u, v))
    }

    /// Adds u->v; returns false when the arc is a duplicate. Panics on loops
    /// or out-of-range vertices (callers validate untrusted input first).
    pub fn add(&mut self, u: usize, v: usize) -> bool {
        assert!(u != v, "self-loop {u}->{u}");
        assert!(u < self.n && v < self.n, "arc ({u},{v}) out of range n={}", self.n);
        if !self.arc_set.insert(pack(u, v)) {
            return false;
        }
        self.out[u].push(v as u32);
        self.inn[v].push(u as u32);
        true
    }

    pub fn try_add(&mut self, u: usize, v: usize) -> Result<bool> {
        if u == v {
            return Err(Error::invalid(format!("self-loop {u}->{v}")));
        }
        if u >= self.n || v >= self.n {
            return Err(Error::invalid(format!("arc ({u},{v}) out of range n={}", self.n)));
        }
        Ok(self.add(u, v))
    }

    pub fn remove(&mut self, u: usize, v: usize) -> bool {
        if !self.arc_set.remove(&pack(u, v)) {
            return false;
        }
        self.out[u].retain(|&x| x != v as u32);
        self.inn[v].retain(|&x| x != u as u32);
        true
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_set.len()
    }

    pub fn build(mut self) -> Digraph {
        for v in 0..self.n {
            self.out[v].sort_unstable();
            self.inn[v].sort_unstable();
        }
        Digraph { n: self.n, out: self.out, inn: self.inn, arc_set: self.arc_set }
    }
}

impl From<&Digraph> for DigraphBuilder {
    fn from(g: &Digraph) -> Self {
        DigraphBuilder {
            n: g.n,
            out: g.out.clone(),
            inn: g.inn.clone(),
            arc_set: g.arc_set.clone(),
        }
    }
}

// serde skips the arc set; rebuild it when deserializing through a helper.
impl Digraph {
    pub fn rebuild_arc_set(&mut self) {
        self.arc_set =
            self.out.iter().enumerate().flat_map(|(u, vs)| vs.iter().map(move |&v| pack(u, v as usize))).collect();
    }
}

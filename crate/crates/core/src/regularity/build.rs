//! Cluster decomposition of a dense digraph: an equitable random partition,
//! verified rather than constructed cleverly. Attempts are cheap because the
//! hosts this targets are quasirandom, so a random partition is regular with
//! overwhelming probability; every claimed property is re-checked and a
//! failing attempt is re-randomized a bounded number of times.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::params::PartitionParams;
use crate::regularity::check::{
    regular_verdict_on_matrix, super_verdict_on_matrix, BitMatrix, RegMode,
};

/// Float slack on threshold comparisons.
const THRESH_SLACK: f64 = 1e-9;

/// Node budget for the Hamilton cycle search before giving up.
const HAMILTON_STEP_BUDGET: usize = 50_000_000;

/// V0 plus k equal clusters. Cluster indices are cyclic: the builder labels
/// clusters so that each consecutive pair (i, i+1 mod k) is super-regular.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterDecomposition {
    pub exceptional: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
    pub m: usize,
}

impl ClusterDecomposition {
    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    /// Map from host vertex to cluster index; None for exceptional vertices.
    pub fn cluster_of(&self, n: usize) -> Vec<Option<usize>> {
        let mut map = vec![None; n];
        for (i, cluster) in self.clusters.iter().enumerate() {
            for &v in cluster {
                map[v] = Some(i);
            }
        }
        map
    }

    /// Partition-ness, equal sizes, the exceptional-set budget, and the
    /// divisibility the allocator relies on.
    pub fn check_invariants(&self, n: usize, eps: f64) -> Result<()> {
        let k = self.k();
        let mut seen = vec![false; n];
        let mut mark = |v: usize| -> Result<()> {
            if v >= n {
                return Err(Error::invalid(format!("vertex {v} out of range")));
            }
            if seen[v] {
                return Err(Error::invalid(format!("vertex {v} appears twice")));
            }
            seen[v] = true;
            Ok(())
        };
        for &v in &self.exceptional {
            mark(v)?;
        }
        for cluster in &self.clusters {
            if cluster.len() != self.m {
                return Err(Error::invalid(format!(
                    "cluster size {} differs from m = {}",
                    cluster.len(),
                    self.m
                )));
            }
            for &v in cluster {
                mark(v)?;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::invalid("decomposition does not cover the host"));
        }
        if self.exceptional.len() as f64 >= eps * n as f64 {
            return Err(Error::invalid(format!(
                "exceptional set has {} vertices, at or above eps n = {}",
                self.exceptional.len(),
                eps * n as f64
            )));
        }
        if (n - self.exceptional.len()) % k != 0 {
            return Err(Error::invalid("covered vertex count not divisible by k"));
        }
        Ok(())
    }
}

/// Which clusters an exceptional vertex is usefully joined to: `out_to`
/// lists clusters receiving many arcs from it, `in_from` clusters sending
/// many arcs to it (threshold (1/2 + eta) m in both directions).
#[derive(Clone, Debug, Serialize)]
pub struct V0Link {
    pub vertex: usize,
    pub in_from: Vec<usize>,
    pub out_to: Vec<usize>,
}

/// Quotient of the host by a cluster decomposition: core arcs are the
/// cluster pairs that passed the regularity check, plus per-exceptional
/// vertex cluster links and the measured density of every ordered pair.
#[derive(Clone, Debug, Serialize)]
pub struct ReducedDigraph {
    pub core: Digraph,
    pub v0_links: Vec<V0Link>,
    pub density_table: Vec<Vec<f64>>,
}

/// JSON export of a decomposition and its reduced digraph.
pub fn decomposition_to_json(dec: &ClusterDecomposition, red: &ReducedDigraph) -> String {
    let arcs: Vec<[usize; 2]> = red.core.arcs().map(|(u, v)| [u, v]).collect();
    let links: serde_json::Map<String, serde_json::Value> = red
        .v0_links
        .iter()
        .map(|l| {
            (
                l.vertex.to_string(),
                serde_json::json!({ "in": l.in_from, "out": l.out_to }),
            )
        })
        .collect();
    serde_json::json!({
        "V0": dec.exceptional,
        "m": dec.m,
        "clusters": dec.clusters,
        "reduced": {
            "arcs": arcs,
            "v0_links": links,
            "density_table": red.density_table,
        },
    })
    .to_string()
}

/// Directed Hamilton cycle, returned as the vertex order starting at 0.
/// Depth-first search trying out-neighbours in ascending order, so the
/// returned cycle is the lexicographically first one; a step budget guards
/// against adversarial cores (dense cores resolve almost immediately, and
/// for k <= 12 even a full exhaustion fits the budget).
pub fn hamilton_cycle(g: &Digraph) -> Result<Vec<usize>> {
    let k = g.vertex_count();
    if k < 2 {
        return Err(Error::invalid("Hamilton cycle needs at least 2 vertices"));
    }
    let mut path = Vec::with_capacity(k);
    let mut used = vec![false; k];
    path.push(0);
    used[0] = true;
    let mut steps = 0usize;
    if dfs(g, &mut path, &mut used, &mut steps) {
        return Ok(path);
    }
    if steps > HAMILTON_STEP_BUDGET {
        return Err(Error::construction(
            "hamilton_cycle",
            format!("search aborted after {steps} steps"),
        ));
    }
    Err(Error::construction("hamilton_cycle", "no Hamilton cycle in the core"))
}

fn dfs(g: &Digraph, path: &mut Vec<usize>, used: &mut [bool], steps: &mut usize) -> bool {
    let last = *path.last().expect("path nonempty");
    if path.len() == g.vertex_count() {
        return g.has_arc(last, path[0]);
    }
    for &v in g.out_neighbors(last) {
        let v = v as usize;
        if used[v] {
            continue;
        }
        *steps += 1;
        if *steps > HAMILTON_STEP_BUDGET {
            return false;
        }
        used[v] = true;
        path.push(v);
        if dfs(g, path, used, steps) {
            return true;
        }
        path.pop();
        used[v] = false;
    }
    false
}

/// Hamilton cycle through the core of a reduced digraph.
pub fn hamilton_cycle_core(r: &ReducedDigraph) -> Result<Vec<usize>> {
    hamilton_cycle(&r.core)
}

/// Partition the host into an exceptional set and k equal clusters so that
/// consecutive clusters form super-regular pairs, regular cluster pairs form
/// a core with large semidegree, and every exceptional vertex keeps strong
/// links to more than alpha k clusters in both directions.
///
/// The construction randomizes, then verifies: shuffle an equitable
/// partition, find the regular pairs by sampling, route a Hamilton cycle
/// through them and relabel clusters along it, evict vertices with atypical
/// degrees towards their cyclic neighbours, re-check everything on the final
/// clusters, and re-randomize on any failure, at most `attempts` times.
pub fn build_cluster_partition(
    g: &Digraph,
    p: &PartitionParams,
    seed: u64,
) -> Result<(ClusterDecomposition, ReducedDigraph)> {
    p.validate()?;
    let n = g.vertex_count();
    if p.k >= n {
        return Err(Error::invalid(format!("k = {} too large for host of {n} vertices", p.k)));
    }
    if ((n / p.k) as f64) * p.eps < 1.0 {
        return Err(Error::invalid(format!(
            "clusters of about {} vertices are below 1/eps = {:.1}",
            n / p.k,
            1.0 / p.eps
        )));
    }
    let need = ((0.5 + p.alpha) * n as f64).ceil() as usize;
    if g.min_semidegree() < need {
        return Err(Error::invalid(format!(
            "minimum semidegree {} below (1/2 + alpha) n = {need}",
            g.min_semidegree()
        )));
    }
    let mut last_failure = String::from("no attempts made");
    for attempt in 0..p.attempts {
        let aseed = seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        match attempt_partition(g, p, aseed) {
            Ok(out) => return Ok(out),
            Err(Error::ConstructionFailure { detail, .. }) => last_failure = detail,
            Err(e) => return Err(e),
        }
    }
    Err(Error::construction(
        "build_cluster_partition",
        format!("no valid decomposition in {} attempts; last failure: {last_failure}", p.attempts),
    ))
}

fn fail(detail: String) -> Error {
    Error::construction("build_cluster_partition", detail)
}

fn attempt_partition(
    g: &Digraph,
    p: &PartitionParams,
    seed: u64,
) -> Result<(ClusterDecomposition, ReducedDigraph)> {
    let n = g.vertex_count();
    let k = p.k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let m0 = n / k;
    let mut clusters: Vec<Vec<usize>> =
        (0..k).map(|i| perm[i * m0..(i + 1) * m0].to_vec()).collect();
    let mut exceptional: Vec<usize> = perm[k * m0..].to_vec();

    // regular pairs of the raw partition, just to route the cycle
    let mats = pair_matrices(g, &clusters, n);
    let core0 = core_from_checks(&mats, &clusters, p, seed)?;
    let cycle = hamilton_cycle(&core0)
        .map_err(|e| fail(format!("(f): no Hamilton cycle through the core: {e}")))?;
    let mut clusters: Vec<Vec<usize>> =
        cycle.iter().map(|&c| std::mem::take(&mut clusters[c])).collect();

    // evict vertices atypical towards their cyclic neighbours; the margin
    // eps/2 below leaves room for the clusters shrinking under us
    let mats = permute_matrices(mats, &cycle, k);
    let evict_thr = (p.d - p.eps / 2.0) * m0 as f64;
    for i in 0..k {
        let next = (i + 1) % k;
        let prev = (i + k - 1) % k;
        let out_mat = &mats[i * k + next];
        let in_counts = mats[prev * k + i].col_counts();
        let mut kept = Vec::with_capacity(clusters[i].len());
        for (pos, &v) in clusters[i].iter().enumerate() {
            let deg_out = out_mat.row_count(pos) as f64;
            let deg_in = in_counts[pos] as f64;
            if deg_out < evict_thr - THRESH_SLACK || deg_in < evict_thr - THRESH_SLACK {
                exceptional.push(v);
            } else {
                kept.push(v);
            }
        }
        clusters[i] = kept;
    }

    // equalize and make the covered count divisible by k
    let m = clusters.iter().map(Vec::len).min().expect("k >= 2 clusters");
    if m == 0 || (m as f64) * p.eps < 1.0 {
        return Err(fail(format!("(a): clusters shrank to {m} vertices, below 1/eps")));
    }
    for cluster in &mut clusters {
        cluster.shuffle(&mut rng);
        exceptional.extend(cluster.drain(m..));
        cluster.sort_unstable();
    }
    exceptional.sort_unstable();
    if exceptional.len() as f64 >= p.eps * n as f64 {
        return Err(fail(format!(
            "(a): exceptional set has {} vertices, at or above eps n = {:.0}",
            exceptional.len(),
            p.eps * n as f64
        )));
    }

    // final reduced digraph on the settled clusters
    let mats = pair_matrices(g, &clusters, n);
    let core = core_from_checks(&mats, &clusters, p, seed ^ 0x5DEE_CE66)?;
    for i in 0..k {
        let next = (i + 1) % k;
        if !core.has_arc(i, next) {
            return Err(fail(format!("(d): consecutive pair {i} -> {next} lost regularity")));
        }
        let verdict = super_verdict_on_matrix(
            &mats[i * k + next],
            &clusters[i],
            &clusters[next],
            p.d,
            p.eps,
            RegMode::Sampled { trials: p.trials, seed: pair_seed(seed ^ 0x5DEE_CE66, i, next, k) },
        )?;
        if !verdict.pass {
            return Err(fail(format!(
                "(b)/(c): pair {i} -> {next} not super-regular: {:?}",
                verdict.failure
            )));
        }
    }
    let min_core = core.min_semidegree() as f64;
    if min_core + THRESH_SLACK < (0.5 + p.eta) * k as f64 {
        return Err(fail(format!(
            "(f): core semidegree {min_core} below (1/2 + eta) k = {:.2}",
            (0.5 + p.eta) * k as f64
        )));
    }

    let link_thr = (0.5 + p.eta) * m as f64;
    let cluster_of = cluster_index(n, &clusters);
    let mut v0_links = Vec::with_capacity(exceptional.len());
    for &v in &exceptional {
        let mut out_deg = vec![0usize; k];
        for &w in g.out_neighbors(v) {
            if let Some(i) = cluster_of[w as usize] {
                out_deg[i] += 1;
            }
        }
        let mut in_deg = vec![0usize; k];
        for &w in g.in_neighbors(v) {
            if let Some(i) = cluster_of[w as usize] {
                in_deg[i] += 1;
            }
        }
        let out_to: Vec<usize> =
            (0..k).filter(|&i| out_deg[i] as f64 >= link_thr - THRESH_SLACK).collect();
        let in_from: Vec<usize> =
            (0..k).filter(|&i| in_deg[i] as f64 >= link_thr - THRESH_SLACK).collect();
        let semi = out_to.len().min(in_from.len()) as f64;
        if semi <= p.alpha * k as f64 + THRESH_SLACK {
            return Err(fail(format!(
                "(g): exceptional vertex {v} linked to only {semi} clusters, needs more than {:.2}",
                p.alpha * k as f64
            )));
        }
        v0_links.push(V0Link { vertex: v, in_from, out_to });
    }

    let density_table: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 0.0 } else { mats[i * k + j].density() }).collect())
        .collect();
    let dec = ClusterDecomposition { exceptional, clusters, m };
    dec.check_invariants(n, p.eps).map_err(|e| fail(format!("(a): {e}")))?;
    Ok((dec, ReducedDigraph { core, v0_links, density_table }))
}

fn cluster_index(n: usize, clusters: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut map = vec![None; n];
    for (i, cluster) in clusters.iter().enumerate() {
        for &v in cluster {
            map[v] = Some(i);
        }
    }
    map
}

/// Incidence matrices of all ordered cluster pairs, built in one arc sweep.
fn pair_matrices(g: &Digraph, clusters: &[Vec<usize>], n: usize) -> Vec<BitMatrix> {
    let k = clusters.len();
    let cluster_of = cluster_index(n, clusters);
    let mut pos = vec![0usize; n];
    for cluster in clusters {
        for (i, &v) in cluster.iter().enumerate() {
            pos[v] = i;
        }
    }
    let mut mats: Vec<BitMatrix> = (0..k * k)
        .map(|idx| BitMatrix::new(clusters[idx / k].len(), clusters[idx % k].len()))
        .collect();
    for (u, v) in g.arcs() {
        if let (Some(i), Some(j)) = (cluster_of[u], cluster_of[v]) {
            if i != j {
                mats[i * k + j].set(pos[u], pos[v]);
            }
        }
    }
    mats
}

fn permute_matrices(mats: Vec<BitMatrix>, cycle: &[usize], k: usize) -> Vec<BitMatrix> {
    let mut slots: Vec<Option<BitMatrix>> = mats.into_iter().map(Some).collect();
    (0..k * k)
        .map(|idx| {
            let (i, j) = (idx / k, idx % k);
            slots[cycle[i] * k + cycle[j]].take().expect("each source slot used once")
        })
        .collect()
}

fn pair_seed(seed: u64, i: usize, j: usize, k: usize) -> u64 {
    seed.wrapping_add(((i * k + j + 1) as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Core digraph on the clusters: arc i -> j iff the pair passed the
/// regularity check at (d, eps).
fn core_from_checks(
    mats: &[BitMatrix],
    clusters: &[Vec<usize>],
    p: &PartitionParams,
    seed: u64,
) -> Result<Digraph> {
    let k = clusters.len();
    let mut arcs = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let verdict = regular_verdict_on_matrix(
                &mats[i * k + j],
                &clusters[i],
                &clusters[j],
                p.d,
                p.eps,
                RegMode::Sampled { trials: p.trials, seed: pair_seed(seed, i, j, k) },
            )?;
            if verdict.pass {
                arcs.push((i, j));
            }
        }
    }
    Digraph::from_arcs(k, arcs)
}

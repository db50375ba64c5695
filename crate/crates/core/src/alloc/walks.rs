use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::tree::RootedOrientedTree;

/// Orientation sequence of a path rooted at one of its endpoints: entry `i`
/// is true when the `i`-th edge points away from the root.
fn path_orientations(p: &RootedOrientedTree) -> Result<Vec<bool>> {
    if !p.is_path() || (p.vertex_count() > 1 && p.underlying_degree(p.root()) != 1) {
        return Err(Error::invalid(
            "walks follow a path rooted at one of its endpoints",
        ));
    }
    let mut steps = Vec::with_capacity(p.vertex_count().saturating_sub(1));
    let mut prev = usize::MAX;
    let mut cur = p.root();
    while let Some(&next) = p.neighbors(cur).iter().find(|&&u| u != prev) {
        steps.push(p.has_arc(cur, next));
        prev = cur;
        cur = next;
    }
    Ok(steps)
}

/// A random walk through `d` guided by the oriented path `p`: starting at
/// `v0`, each forward edge of the path moves to a uniform out-neighbour of
/// the current vertex and each backward edge to a uniform in-neighbour.
///
/// Returns the full vertex sequence, one entry per path vertex.
pub fn random_p_walk(
    d: &Digraph,
    p: &RootedOrientedTree,
    v0: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    let steps = path_orientations(p)?;
    if d.min_semidegree() == 0 {
        return Err(Error::invalid(
            "host must have positive minimum semidegree for the walk to continue",
        ));
    }
    if v0 >= d.vertex_count() {
        return Err(Error::invalid(format!(
            "walk start {v0} is beyond the host size {}",
            d.vertex_count()
        )));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut walk = Vec::with_capacity(steps.len() + 1);
    walk.push(v0);
    let mut cur = v0;
    for forward in steps {
        let pool = if forward { d.out_neighbors(cur) } else { d.in_neighbors(cur) };
        cur = *pool.choose(&mut rng).expect("semidegree checked") as usize;
        walk.push(cur);
    }
    Ok(walk)
}

/// Exact per-step marginals of a random walk guided by an oriented path.
///
/// `probs[i][x]` is the probability that the walk occupies host vertex `x`
/// after following the first `i` path edges.
#[derive(Debug, Clone)]
pub struct WalkDistribution {
    probs: Vec<Vec<f64>>,
}

impl WalkDistribution {
    /// Number of steps taken; there are `steps() + 1` probability vectors.
    pub fn steps(&self) -> usize {
        self.probs.len() - 1
    }

    /// Marginal distribution after `i` steps.
    pub fn step_probs(&self, i: usize) -> &[f64] {
        &self.probs[i]
    }

    /// Marginal distribution at the far endpoint of the path.
    pub fn final_probs(&self) -> &[f64] {
        self.probs.last().expect("at least the start vector exists")
    }

    /// Squared euclidean distance from uniform after `i` steps:
    /// the sum over vertices of (p_x - 1/k)^2.
    pub fn m_value(&self, i: usize) -> f64 {
        let k = self.probs[i].len() as f64;
        self.probs[i].iter().map(|&p| (p - 1.0 / k) * (p - 1.0 / k)).sum()
    }

    /// Largest single-vertex squared deviation from uniform in the final
    /// vector. On an expander this is what the geometric mixing bound caps.
    pub fn max_sq_deviation(&self) -> f64 {
        let probs = self.final_probs();
        let k = probs.len() as f64;
        probs
            .iter()
            .map(|&p| (p - 1.0 / k) * (p - 1.0 / k))
            .fold(0.0, f64::max)
    }
}

/// Geometric decay cap for the walk's squared deviation from uniform on a
/// k-vertex regular expander: (1 - 1/(2k^3))^steps.
pub fn mixing_bound(k: usize, steps: usize) -> f64 {
    let k = k as f64;
    (1.0 - 1.0 / (2.0 * k * k * k)).powi(steps as i32)
}

/// Exact distribution of [`random_p_walk`] on a regular host, computed by
/// repeatedly applying the in- or out-averaging step operator.
///
/// Regularity makes each operator doubly stochastic, which gives two
/// invariants asserted on every run: total mass stays 1 (to 1e-9) and the
/// squared distance from uniform never increases (to 1e-12).
pub fn walk_distribution(d: &Digraph, p: &RootedOrientedTree, v0: usize) -> Result<WalkDistribution> {
    let steps = path_orientations(p)?;
    let deg = match d.is_regular() {
        Some(deg) if deg >= 1 => deg,
        _ => {
            return Err(Error::invalid(
                "exact walk distributions need a regular host with positive degree",
            ))
        }
    };
    let k = d.vertex_count();
    if v0 >= k {
        return Err(Error::invalid(format!("walk start {v0} is beyond the host size {k}")));
    }

    let mut probs = Vec::with_capacity(steps.len() + 1);
    let mut cur = vec![0.0f64; k];
    cur[v0] = 1.0;
    probs.push(cur.clone());
    for forward in steps {
        let mut next = vec![0.0f64; k];
        for y in 0..k {
            let share = cur[y] / deg as f64;
            let heirs = if forward { d.out_neighbors(y) } else { d.in_neighbors(y) };
            for &x in heirs {
                next[x as usize] += share;
            }
        }
        let mass: f64 = next.iter().sum();
        assert!((mass - 1.0).abs() <= 1e-9, "step operator must preserve mass, got {mass}");
        cur = next;
        probs.push(cur.clone());
    }

    let dist = WalkDistribution { probs };
    for i in 1..=dist.steps() {
        assert!(
            dist.m_value(i) <= dist.m_value(i - 1) + 1e-12,
            "averaging must not move the distribution away from uniform"
        );
    }
    Ok(dist)
}

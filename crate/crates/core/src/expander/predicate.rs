use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::digraph::Digraph;
use crate::error::{Error, Result};

/// Largest order for which the exhaustive expander test is accepted.
/// 2^22 subsets with one word of neighbourhood DP per subset is the point
/// where both time and the two scratch tables are still comfortably cheap.
pub const EXHAUSTIVE_LIMIT: usize = 22;

/// Random subsets drawn per size class in heuristic mode.
const HEURISTIC_SUBSETS_PER_SIZE: usize = 10_000;

#[derive(Clone, Copy, Debug)]
pub enum ExpanderMode {
    /// Check every nonempty proper subset. Only for |D| ≤ [`EXHAUSTIVE_LIMIT`].
    Exhaustive,
    /// All singletons and co-singletons, plus random subsets of every other
    /// size. A `false` answer is authoritative (a violating set was found);
    /// `true` only says no violation was sampled.
    Heuristic { seed: u64 },
}

/// Tests the expansion property: |N⁻(S)| > |S| and |N⁺(S)| > |S| for every
/// nonempty proper S. Graphs on at most one vertex pass vacuously; graphs on
/// two vertices always fail (a singleton has at most one neighbour).
pub fn is_expander(d: &Digraph, mode: ExpanderMode) -> Result<bool> {
    let n = d.vertex_count();
    if n <= 1 {
        return Ok(true);
    }
    match mode {
        ExpanderMode::Exhaustive => {
            if n > EXHAUSTIVE_LIMIT {
                return Err(Error::invalid(format!(
                    "exhaustive expander check limited to {EXHAUSTIVE_LIMIT} vertices, got {n}"
                )));
            }
            let out_masks = direction_masks(d, true);
            let in_masks = direction_masks(d, false);
            Ok(exhaustive_direction(&out_masks, n) && exhaustive_direction(&in_masks, n))
        }
        ExpanderMode::Heuristic { seed } => Ok(heuristic(d, seed)),
    }
}

fn direction_masks(d: &Digraph, forward: bool) -> Vec<u32> {
    (0..d.vertex_count())
        .map(|v| {
            let nbrs = if forward { d.out_neighbors(v) } else { d.in_neighbors(v) };
            nbrs.iter().fold(0u32, |m, &w| m | (1 << w))
        })
        .collect()
}

/// One direction of the exhaustive test. nbr[S] is built from nbr[S minus
/// its lowest bit], so each subset costs O(1) on top of its predecessor.
fn exhaustive_direction(masks: &[u32], n: usize) -> bool {
    let size = 1usize << n;
    let full = (size - 1) as u32;
    let mut nbr = vec![0u32; size];
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        nbr[s] = nbr[s & (s - 1)] | masks[low];
        let su = s as u32;
        if su != full && nbr[s].count_ones() <= su.count_ones() {
            return false;
        }
    }
    true
}

fn heuristic(d: &Digraph, seed: u64) -> bool {
    let n = d.vertex_count();
    // Singletons: both neighbourhoods of every vertex must beat size 1.
    for v in 0..n {
        if d.out_degree(v) < 2 || d.in_degree(v) < 2 {
            return false;
        }
    }
    // Co-singletons: S = V minus {v} fails on the out side only when some
    // vertex has its whole in-neighbourhood inside {v}, i.e. in-degree ≤ 1.
    // The singleton pass above already rejected those, so co-singletons
    // need no extra scan.

    let words = n.div_ceil(64);
    let mut out_rows = vec![0u64; n * words];
    let mut in_rows = vec![0u64; n * words];
    for v in 0..n {
        for &w in d.out_neighbors(v) {
            out_rows[v * words + (w as usize) / 64] |= 1u64 << (w % 64);
        }
        for &w in d.in_neighbors(v) {
            in_rows[v * words + (w as usize) / 64] |= 1u64 << (w % 64);
        }
    }

    let mut rng = StdRng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc_out = vec![0u64; words];
    let mut acc_in = vec![0u64; words];
    for s in 2..n.saturating_sub(1) {
        for _ in 0..HEURISTIC_SUBSETS_PER_SIZE {
            // Partial Fisher-Yates: the first s entries become the sample.
            for i in 0..s {
                let j = rng.gen_range(i..n);
                perm.swap(i, j);
            }
            acc_out.fill(0);
            acc_in.fill(0);
            for &v in &perm[..s] {
                for w in 0..words {
                    acc_out[w] |= out_rows[v * words + w];
                    acc_in[w] |= in_rows[v * words + w];
                }
            }
            let plus: u32 = acc_out.iter().map(|w| w.count_ones()).sum();
            let minus: u32 = acc_in.iter().map(|w| w.count_ones()).sum();
            if plus as usize <= s || minus as usize <= s {
                return false;
            }
        }
    }
    true
}

/// Finds a vertex u with two in-neighbours x, y whose f-values differ by at
/// least (max f − min f)/(n−1).
///
/// The construction follows the level-set argument: sort the distinct values
/// of f, cut at the widest consecutive gap into low side X and high side Y,
/// and use expansion of both sides. |N⁺(X)| > |X| and |N⁺(Y)| > |Y| with
/// |X| + |Y| = n force a vertex u seen from both sides; its in-neighbours on
/// the two sides straddle the gap. Within each side we return the extreme
/// in-neighbour, so the certified difference is at least the gap itself.
pub fn mix_neighbours_witness(d: &Digraph, f: &[f64]) -> Result<(usize, usize, usize)> {
    let n = d.vertex_count();
    if f.len() != n {
        return Err(Error::invalid(format!(
            "value map covers {} vertices but the digraph has {n}",
            f.len()
        )));
    }
    if n < 3 {
        return Err(Error::invalid(format!("need at least 3 vertices, got {n}")));
    }
    for (v, &x) in f.iter().enumerate() {
        if !x.is_finite() || !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("f({v}) = {x} is outside [0, 1]")));
        }
    }
    let mut values: Vec<f64> = f.to_vec();
    values.sort_by(|a, b| a.total_cmp(b));
    values.dedup();
    if values.len() < 2 {
        return Err(Error::invalid("f is constant, no gap to witness"));
    }
    let spread = values[values.len() - 1] - values[0];

    // Widest consecutive gap; at least spread/(levels−1) ≥ spread/(n−1).
    let mut cut = values[0];
    let mut best_gap = f64::NEG_INFINITY;
    for w in values.windows(2) {
        if w[1] - w[0] > best_gap {
            best_gap = w[1] - w[0];
            cut = w[0];
        }
    }

    let low = |v: usize| f[v] <= cut;
    let mut u_pick = None;
    for u in 0..n {
        let (mut from_x, mut from_y) = (false, false);
        for &w in d.in_neighbors(u) {
            if low(w as usize) {
                from_x = true;
            } else {
                from_y = true;
            }
        }
        if from_x && from_y {
            u_pick = Some(u);
            break;
        }
    }
    let Some(u) = u_pick else {
        return Err(Error::invalid(
            "no vertex sees both sides of the level cut; the digraph is not an expander",
        ));
    };
    let mut x = usize::MAX;
    let mut y = usize::MAX;
    for &w in d.in_neighbors(u) {
        let w = w as usize;
        if low(w) {
            if x == usize::MAX || f[w] < f[x] {
                x = w;
            }
        } else if y == usize::MAX || f[w] > f[y] {
            y = w;
        }
    }
    debug_assert!(f[y] - f[x] >= spread / (n as f64 - 1.0) - 1e-12);
    Ok((u, x, y))
}

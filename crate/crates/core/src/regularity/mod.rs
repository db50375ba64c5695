//! Cluster decompositions of dense digraphs: density and regularity checking
//! for vertex-set pairs, equitable random partitions verified into a reduced
//! digraph, and a Hamilton cycle on its core.

mod build;
mod check;

pub use build::{
    build_cluster_partition, decomposition_to_json, hamilton_cycle, hamilton_cycle_core,
    ClusterDecomposition, ReducedDigraph, V0Link,
};
pub use check::{
    check_regular_pair, check_super_regular, generate_super_regular_pair, BitMatrix, RegMode,
    RegVerdict, RegWitness, SuperFailure, SuperVerdict,
};

use crate::digraph::Digraph;
use crate::error::{Error, Result};

/// Arc density e(G[X -> Y]) / (|X| |Y|) of the bipartite subdigraph of arcs
/// leaving X into Y.
pub fn pair_density(g: &Digraph, xs: &[usize], ys: &[usize]) -> Result<f64> {
    validate_pair(g, xs, ys)?;
    let mut arcs = 0usize;
    for &x in xs {
        for &y in ys {
            if g.has_arc(x, y) {
                arcs += 1;
            }
        }
    }
    Ok(arcs as f64 / (xs.len() as f64 * ys.len() as f64))
}

pub(crate) fn validate_pair(g: &Digraph, xs: &[usize], ys: &[usize]) -> Result<()> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("pair sides must be nonempty"));
    }
    let n = g.vertex_count();
    let mut seen = vec![0u8; n];
    for &x in xs {
        if x >= n {
            return Err(Error::invalid(format!("vertex {x} out of range")));
        }
        if seen[x] != 0 {
            return Err(Error::invalid(format!("vertex {x} repeated in X")));
        }
        seen[x] = 1;
    }
    for &y in ys {
        if y >= n {
            return Err(Error::invalid(format!("vertex {y} out of range")));
        }
        if seen[y] != 0 {
            return Err(Error::invalid(format!("vertex {y} in both sides or repeated")));
        }
        seen[y] = 2;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn complete_pair_density_is_one() {
        let g = Digraph::complete(8);
        let xs = [0, 1, 2, 3];
        let ys = [4, 5, 6, 7];
        assert_eq!(pair_density(&g, &xs, &ys).unwrap(), 1.0);
    }

    #[test]
    fn arcless_pair_density_is_zero() {
        let g = Digraph::from_arcs(6, []).unwrap();
        assert_eq!(pair_density(&g, &[0, 1, 2], &[3, 4, 5]).unwrap(), 0.0);
    }

    #[test]
    fn thirty_seven_arcs_out_of_hundred() {
        // arcs x -> 10 + ((3x + t) % 10) for x in 0..10, t in 0..4, minus 3
        let mut arcs = Vec::new();
        for x in 0..10usize {
            for t in 0..4usize {
                arcs.push((x, 10 + (3 * x + t) % 10));
            }
        }
        arcs.truncate(37);
        let g = Digraph::from_arcs(20, arcs).unwrap();
        let xs: Vec<usize> = (0..10).collect();
        let ys: Vec<usize> = (10..20).collect();
        assert!((pair_density(&g, &xs, &ys).unwrap() - 0.37).abs() < 1e-12);
    }

    #[test]
    fn overlapping_sides_rejected() {
        let g = Digraph::complete(5);
        assert!(pair_density(&g, &[0, 1], &[1, 2]).is_err());
        assert!(pair_density(&g, &[0, 0], &[2]).is_err());
        assert!(pair_density(&g, &[], &[2]).is_err());
    }

    #[test]
    fn density_matches_naive_double_loop() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let n = 60;
            let mut arcs = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.gen_bool(0.3) {
                        arcs.push((u, v));
                    }
                }
            }
            let g = Digraph::from_arcs(n, arcs.iter().copied()).unwrap();
            let xs: Vec<usize> = (0..25).collect();
            let ys: Vec<usize> = (30..55).collect();
            let naive = arcs
                .iter()
                .filter(|&&(u, v)| xs.contains(&u) && ys.contains(&v))
                .count() as f64
                / (xs.len() * ys.len()) as f64;
            assert!((pair_density(&g, &xs, &ys).unwrap() - naive).abs() < 1e-12);
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::tree::RootedOrientedTree;

/// A candidate embedding: tree vertex v maps to host vertex `map[v]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn new(map: Vec<usize>) -> Self {
        Embedding { map }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialize embedding")
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad embedding json: {e}")))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub enum Violation {
    WrongLength { expected: usize, got: usize },
    ImageOutOfRange { tree_vertex: usize, image: usize },
    NotInjective { a: usize, b: usize, image: usize },
    MissingArc { from: usize, to: usize, from_image: usize, to_image: usize },
    NotSpanning { host_size: usize, tree_size: usize },
}

const MAX_VIOLATIONS: usize = 64;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub checked_arcs: usize,
    /// First violations found, capped so pathological inputs stay readable.
    pub violations: Vec<Violation>,
    pub truncated: bool,
}

impl VerifyReport {
    fn push(&mut self, v: Violation) {
        self.ok = false;
        if self.violations.len() < MAX_VIOLATIONS {
            self.violations.push(v);
        } else {
            self.truncated = true;
        }
    }
}

/// Checks that `emb` is an injective homomorphism of T into G: every tree arc
/// u->v must appear as an arc emb(u)->emb(v) of G. With `spanning` set, also
/// requires |T| = |G| (injectivity then makes the map a bijection).
pub fn verify_embedding(
    tree: &RootedOrientedTree,
    host: &Digraph,
    emb: &Embedding,
    spanning: bool,
) -> VerifyReport {
    let mut report =
        VerifyReport { ok: true, checked_arcs: 0, violations: Vec::new(), truncated: false };
    let n_t = tree.vertex_count();
    let n_g = host.vertex_count();
    if emb.map.len() != n_t {
        report.push(Violation::WrongLength { expected: n_t, got: emb.map.len() });
        return report;
    }
    if spanning && n_t != n_g {
        report.push(Violation::NotSpanning { host_size: n_g, tree_size: n_t });
    }
    let mut owner: Vec<usize> = vec![usize::MAX; n_g];
    for (v, &img) in emb.map.iter().enumerate() {
        if img >= n_g {
            report.push(Violation::ImageOutOfRange { tree_vertex: v, image: img });
            continue;
        }
        if owner[img] != usize::MAX {
            report.push(Violation::NotInjective { a: owner[img], b: v, image: img });
        } else {
            owner[img] = v;
        }
    }
    for &(u, v) in tree.arcs() {
        let (iu, iv) = (emb.map[u], emb.map[v]);
        if iu >= n_g || iv >= n_g {
            continue; // already reported above
        }
        report.checked_arcs += 1;
        if !host.has_arc(iu, iv) {
            report.push(Violation::MissingArc { from: u, to: v, from_image: iu, to_image: iv });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri_host() -> Digraph {
        Digraph::from_arcs(4, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 1)]).unwrap()
    }

    #[test]
    fn accepts_valid_embedding() {
        let t = RootedOrientedTree::from_arcs(3, 0, &[(0, 1), (1, 2)]).unwrap();
        let r = verify_embedding(&t, &tri_host(), &Embedding::new(vec![0, 1, 2]), false);
        assert!(r.ok, "{:?}", r.violations);
        assert_eq!(r.checked_arcs, 2);
    }

    #[test]
    fn flags_missing_arc() {
        let t = RootedOrientedTree::from_arcs(3, 0, &[(0, 1), (2, 1)]).unwrap();
        // arc 2->1 requires image arc 2->1 in host, absent (host has 1->2)
        let r = verify_embedding(&t, &tri_host(), &Embedding::new(vec![0, 1, 2]), false);
        assert!(!r.ok);
        assert!(matches!(r.violations[0], Violation::MissingArc { from: 2, to: 1, .. }));
    }

    #[test]
    fn flags_collision_and_range() {
        let t = RootedOrientedTree::from_arcs(3, 0, &[(0, 1), (1, 2)]).unwrap();
        let r = verify_embedding(&t, &tri_host(), &Embedding::new(vec![0, 0, 9]), false);
        assert!(!r.ok);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::NotInjective { .. })));
        assert!(r.violations.iter().any(|v| matches!(v, Violation::ImageOutOfRange { .. })));
    }

    #[test]
    fn spanning_requires_equal_sizes() {
        let t = RootedOrientedTree::from_arcs(3, 0, &[(0, 1), (1, 2)]).unwrap();
        let r = verify_embedding(&t, &tri_host(), &Embedding::new(vec![0, 1, 2]), true);
        assert!(!r.ok);
        assert!(matches!(r.violations[0], Violation::NotSpanning { .. }));
    }
}

//! Expander predicates and expander-based constructions.
//!
//! A digraph is an expander when |N⁻(S)| > |S| and |N⁺(S)| > |S| for every
//! nonempty proper vertex subset S. This module tests that property
//! (exhaustively on small graphs, by sampling above), extracts spanning
//! regular expander subdigraphs from dense hosts, partitions arc sets into
//! equitable matchings, builds greedy covers of bipartite graphs, assembles
//! path-connected diamond structures, and shifts allocation weights along
//! diamond paths. The constructions feed the allocation stage: a regular
//! expander is where tree paths are routed by random walks, and diamonds are
//! the gadgets that let an allocation trade load between adjacent clusters
//! without breaking the homomorphism property.

mod cover;
mod diamonds;
mod envelope;
mod matchings;
mod predicate;
mod regular;
mod shift;

pub use cover::{greedy_cover, GreedyCover};
pub use diamonds::{p_connected_subgraph, Diamond, DiamondPath, PathPattern};
pub use envelope::regular_envelope;
pub use matchings::equitable_matching_partition;
pub use predicate::{is_expander, mix_neighbours_witness, ExpanderMode, EXHAUSTIVE_LIMIT};
pub use regular::{regular_expander_subdigraph, RegularExpander};
pub use shift::{shift_weights, DiamondBranches, RegisteredPath};

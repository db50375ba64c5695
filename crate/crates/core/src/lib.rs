//! Embedding bounded-degree oriented trees into dense digraphs with large
//! minimum semidegree.
//!
//! The crate provides the full pipeline: digraph and oriented-tree
//! representations, structural tree operations (partitions, tidy orders,
//! bare paths, far-apart families, contraction, generators), cluster
//! partitions of dense hosts, regular expander subdigraphs, randomized
//! allocation of tree vertices to clusters, the reservation-based embedding
//! itself, and end-to-end drivers with instance generators and verification.

pub mod alloc;
pub mod digraph;
pub mod embedding;
pub mod error;
pub mod expander;
pub mod params;
pub mod regularity;
pub mod tree;
pub mod treeops;

pub use alloc::{
    allocate, allocate_spanning_many_leaves, allocate_spanning_many_paths, blowup_allocate,
    mixing_bound, random_p_walk, walk_distribution, Allocation, SpanningLeavesAllocation,
    SpanningParams, SpanningPathsAllocation, WalkDistribution,
};
pub use digraph::{Digraph, DigraphBuilder};
pub use embedding::{verify_embedding, Embedding, VerifyReport, Violation};
pub use error::{Error, Result};
pub use expander::{
    is_expander, regular_envelope, regular_expander_subdigraph, ExpanderMode, RegularExpander,
};
pub use params::{degree_budget, ParamHierarchy, PartitionParams};
pub use regularity::{build_cluster_partition, ClusterDecomposition, RegMode, ReducedDigraph};
pub use tree::RootedOrientedTree;

mod contract;
mod far;
mod gen;
mod order;
mod paths;
mod split;

pub use contract::{contract_bare_paths, ContractionMap};
pub use far::{far_apart_families, FarApartFamily};
pub use gen::{random_tree, TreeFamily};
pub use order::{max_open_count, tidy_order, AncestralOrder};
pub use paths::{
    bare_path_decomposition, disjoint_bare_paths, disjoint_leaf_edges, BarePath, LeafEdge,
};
pub use split::{split_tree, TreeSplit};

//! Generator and verifier for multipede graph-isomorphism benchmark instances.

pub mod base;
pub mod bench;
pub mod error;
pub mod f2;
pub mod graph;
pub mod groups;
pub mod instance;
pub mod io;
pub mod multipede;
pub mod oddness;
pub mod rates;
pub mod refine;
pub mod search;
pub mod shrink;

pub use base::{bipartite_base, cycle_with_diagonals, random_edge_permutation, BipartiteBase};
pub use error::{Error, Result};
pub use f2::F2Matrix;
pub use graph::{Graph, InstancePair, Permutation, Relation};
pub use refine::{color_refinement, Coloring};
pub use search::{are_isomorphic, find_automorphism, AutReport, SearchConfig};

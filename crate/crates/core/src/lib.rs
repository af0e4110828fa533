//! Finite truncations of the countably-branching tree, the Laakso-variant
//! graphs `G_n`, the level-preserving quotient map between them, and
//! exhaustive checks of the metric properties that connect them.

pub mod error;
pub mod export;
pub mod james_model;
pub mod laakso_graph;
pub mod moduli;
pub mod quotient_analysis;
pub mod tree_space;
pub mod tree_to_laakso;
pub mod verify;

pub use error::{Error, Result};
pub use laakso_graph::{Address, BuildLimits, LaaksoGraph, VertexId};
pub use quotient_analysis::{CoarseProfile, FiniteMetricSpace, ForkWitness, MetricMapTable};
pub use tree_space::{TreeNode, TreeSpace};
pub use tree_to_laakso::PhiMap;

//! Exact solvers, reductions and checkers for k-anonymity and l-diversity
//! on small tables.
//!
//! Costs are generic over [`Scalar`]: `u64` for suppression counts and
//! [`Rational`] for fractional hierarchy costs. The aliases below fix the
//! common instantiations.

pub mod acceptance;
pub mod cost;
pub mod database;
pub mod diversity;
pub mod error;
pub mod generate;
pub mod graph;
pub mod hierarchy;
pub mod oracles;
pub mod reductions;
pub mod scalar;
pub mod simplex;
pub mod solvers;

pub use cost::{CostModel, Suppression};
pub use database::{Alphabet, AnonymizationSolution, Cell, Database, RowGroup};
pub use diversity::{DiversityInstance, DiversityRule, DiversitySolution};
pub use error::{Error, Result};
pub use graph::{Graph, TripartiteGraph};
pub use hierarchy::GeneralizationHierarchy;
pub use scalar::{Rational, Scalar};
pub use simplex::{CostHypergraph, SimplexMatching};
pub use solvers::{Kernel, Solution};

pub type Hypergraph = CostHypergraph<u64>;
pub type RationalHypergraph = CostHypergraph<Rational>;
pub type Matching = SimplexMatching<u64>;
pub type Hierarchy = GeneralizationHierarchy<u64>;
pub type RationalHierarchy = GeneralizationHierarchy<Rational>;

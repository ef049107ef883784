//! Ternary idempotent path algebras.
//!
//! The crate provides axiom checkers for an idempotent aggregation paired
//! with gamma-indexed ternary operations, built-in and table-backed
//! instances, window folds along graph paths with a brute-force path oracle,
//! a monotone relaxation solver, and finite model searches for binary
//! factorizations.

pub mod algebra;
pub mod graph;
pub mod instances;
pub mod path_eval;
pub mod separation;
pub mod solver;

pub use algebra::{Algebra, AlgebraError, AxiomReport, CheckConfig, Gamma, Witness};
pub use graph::{DirectedWeightedGraph, GraphError, WindowCounts, WindowGraph};
pub use instances::{bool_f2, minplus_degenerate, ExtInt, Instance, MinPlus, TableAlgebra};
pub use path_eval::{OracleOpt, PathError, PathMode};
pub use separation::{FactorizationReport, SearchError, SeparationReport, TtgsSearchReport};
pub use solver::{RelaxationTrace, Solution, SolveOptions, SolverError, Valuation};

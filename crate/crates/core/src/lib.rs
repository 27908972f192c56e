//! Exact search engine for maximal `m`-distance sets that contain the
//! Euclidean representation `H̃(n,m)` of the Hamming graph.
//!
//! The crate is organised bottom-up:
//!
//! * [`exact`]: scaled integer points, the Hamming embedding, exact squared
//!   distances (rational and quadratic irrational).
//! * [`class`]: block patterns and candidate classes, their `M` statistic,
//!   the modification step and its inverse.
//! * [`search`]: parameter profiles, addable-class enumeration, the
//!   maximality frontier and the minimum-`m` formula.
//! * [`clique`]: bitset graphs, maximal-clique enumeration and an exact
//!   maximum-clique solver.
//! * [`families`]: intersecting families, EKR-type bounds and the
//!   largest-bounded-subset selector.
//! * [`assembly`]: the class compatibility graph, assembled sets, exact
//!   verification and classification reports.
//! * [`extended`]: the codimension-one extension for `m = 2`.

pub mod assembly;
pub mod class;
pub mod clique;
pub mod combinatorics;
pub mod error;
pub mod exact;
pub mod extended;
pub mod families;
pub mod search;

pub use class::{BlockPattern, CandidateClass};
pub use error::{Error, Result};
pub use exact::{QuadraticValue, RootPoint, ScaledVector, SquaredDistance};

//! Enumeration of the complete Pareto front of a monotone feasibility
//! function over a finite integer grid.
//!
//! The only thing the enumerator knows about a problem is a
//! [`FeasibilityOracle`]: a monotone boolean query on grid points. Starting
//! from the top corner of the grid, [`Enumerator`] keeps an anti-chain of
//! maximal unexplored points, probes one of them per step, and when the probe
//! is feasible walks down to a Pareto point with one binary search per
//! dimension. Every infeasible probe made by the main loop is a co-Pareto
//! point, so the run certifies its own completeness.
//!
//! The crate is `no_std` (it needs `alloc`). Process-backed oracles, problem
//! files and the command-line front end live in the `pareto-front` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod enumerator;
pub mod grid;
pub mod oracle;
pub mod reference;

pub use enumerator::{
    enumerate, expand_frontier, search_pareto_point, EnumerationError, EnumerationResult, Enumerator, Event,
    SelectionStrategy, StepError,
};
pub use grid::{is_antichain, maximal_elements, minimal_elements, GridError, Point, PointSet, SearchSpace};
pub use oracle::{
    ConeUnionOracle, CountingOracle, FeasibilityOracle, MonotonicityGuard, NegativeCacheOracle, OracleError,
    OracleStats, TraceEntry, WeightedThresholdOracle,
};

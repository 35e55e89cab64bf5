//! The feasibility-oracle contract, two built-in monotone oracle families and
//! the wrappers used to instrument a run: call counting, a negative-result
//! cache and an opt-in monotonicity guard.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::grid::{GridError, Point, PointSet, SearchSpace};

/// Why an oracle could not answer a query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The query point does not belong to the oracle's search space.
    Usage(GridError),
    /// The oracle itself failed (crashed, replied with garbage, ...).
    Failure { point: Point, message: String },
    /// Two answers contradict monotonicity: `feasible ≤ infeasible` but
    /// `f(feasible)` was true and `f(infeasible)` false.
    NonMonotone { feasible: Point, infeasible: Point },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Usage(e) => write!(f, "invalid query: {e}"),
            OracleError::Failure { point, message } => {
                write!(f, "oracle failed on {point}: {message}")
            }
            OracleError::NonMonotone { feasible, infeasible } => write!(
                f,
                "oracle is not monotone: {feasible} is feasible but {infeasible} is not, \
                 although {feasible} <= {infeasible}"
            ),
        }
    }
}

impl core::error::Error for OracleError {}

impl From<GridError> for OracleError {
    fn from(e: GridError) -> Self {
        OracleError::Usage(e)
    }
}

/// A monotone boolean query over grid points.
///
/// Implementors promise that `evaluate(x) == true` and `x ≤ y` imply
/// `evaluate(y) == true`, and that repeated queries of the same point give
/// the same answer. The enumerator queries strictly sequentially.
pub trait FeasibilityOracle {
    fn evaluate(&mut self, point: &Point) -> Result<bool, OracleError>;
}

impl<O: FeasibilityOracle + ?Sized> FeasibilityOracle for &mut O {
    fn evaluate(&mut self, point: &Point) -> Result<bool, OracleError> {
        (**self).evaluate(point)
    }
}

impl<O: FeasibilityOracle + ?Sized> FeasibilityOracle for Box<O> {
    fn evaluate(&mut self, point: &Point) -> Result<bool, OracleError> {
        (**self).evaluate(point)
    }
}

/// Adapts a closure into an oracle. See [`from_fn`].
#[derive(Debug, Clone)]
pub struct FnOracle<F>(F);

/// Wraps `f` as an infallible oracle.
pub fn from_fn<F: FnMut(&Point) -> bool>(f: F) -> FnOracle<F> {
    FnOracle(f)
}

impl<F: FnMut(&Point) -> bool> FeasibilityOracle for FnOracle<F> {
    fn evaluate(&mut self, point: &Point) -> Result<bool, OracleError> {
        Ok((self.0)(point))
    }
}

/// Feasible exactly on the up-closure of a set of generators: `x` is
/// feasible iff some generator `g` has `g ≤ x`.
///
/// When the generators form an anti-chain they are exactly the Pareto front.
#[derive(Debug, Clone)]
pub struct ConeUnionOracle {
    space: SearchSpace,
    generators: PointSet,
}

impl ConeUnionOracle {
    pub fn new(space: SearchSpace, generators: PointSet) -> Result<Self, GridError> {
        for g in &generators {
            space.check(g)?;
        }
        Ok(ConeUnionOracle { space, generators })
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn generators(&self) -> &PointSet {
        &self.generators
    }
}

impl FeasibilityOracle for ConeUnionOracle {
    fn evaluate(&mut self, point: &Point) -> Result<bool, OracleError> {
        self.space.check(point)?;
        Ok(self.generators.has_below(point))
    }
}

/// Feasible iff `Σ w_i·x_i ≥ threshold`, monotone because weights are
/// non-negative.
#[derive(Debug, Clone)]
pub struct WeightedThresholdOracle {
    space: SearchSpace,
    weights: Vec<u64>,
    threshold: i64,
}

impl WeightedThresholdOracle {
    pub fn new(space: SearchSpace, weights: Vec<u64>, threshold: i64) -> Result<Self, GridError> {
        if weights.len() != space.arity() {
            return Err(GridError::ArityMismatch { expected: space.arity(), found: weights.len() });
        }
        Ok(WeightedThresholdOracle { space, weights, threshold })
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn threshold(&self) -> i64 {
        self.threshold
    }
}

impl FeasibilityOracle for WeightedThresholdOracle {
    fn evaluate(&mut self, point: &Point) -> Result<bool, OracleError> {
        self.space.check(point)?;
        let Ok(threshold) = u128::try_from(self.threshold) else {
            return Ok(true);
        };
        // u64 * u64 fits in u128; the sum saturates instead of wrapping
        let sum = point
            .coords()
            .iter()
            .zip(&self.weights)
            .fold(0u128, |acc, (&x, &w)| acc.saturating_add(u128::from(x) * u128::from(w)));
        Ok(sum >= threshold)
    }
}

/// One answered query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub point: Point,
    pub feasible: bool,
}

/// Call counters, optionally with the full query trace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleStats {
    pub total_calls: u64,
    pub true_calls: u64,
    pub false_calls: u64,
    pub trace: Option<Vec<TraceEntry>>,
}

impl OracleStats {
    pub fn new() -> Self {
        OracleStats::default()
    }

    pub fn traced() -> Self {
        OracleStats { trace: Some(Vec::new()), ..OracleStats::default() }
    }

    pub fn record(&mut self, point: &Point, feasible: bool) {
        self.total_calls += 1;
        if feasible {
            self.true_calls += 1;
        } else {
            self.false_calls += 1;
        }
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEntry { point: point.clone(), feasible });
        }
    }
}

/// Counts (and optionally traces) every query that reaches `inner`.
#[derive(Debug, Clone)]
pub struct CountingOracle<O> {
    inner: O,
    stats: OracleStats,
}

impl<O: FeasibilityOracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        CountingOracle { inner, stats: OracleStats::new() }
    }

    pub fn traced(inner: O) -> Self {
        CountingOracle { inner, stats: OracleStats::traced() }
    }

    pub fn stats(&self) -> &OracleStats {
        &self.stats
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_parts(self) -> (O, OracleStats) {
        (self.inner, self.stats)
    }
}

impl<O: FeasibilityOracle> FeasibilityOracle for CountingOracle<O> {
    fn evaluate(&mut self, point: &Point) -> Result<bool, OracleError> {
        let answer = self.inner.evaluate(point)?;
        self.stats.record(point, answer);
        Ok(answer)
    }
}

/// Remembers the maximal points known to be infeasible and answers any
/// query below one of them with `false` without consulting `inner`.
///
/// Positive answers are never cached: the enumerator never queries a point
/// above one that was already found feasible.
#[derive(Debug, Clone)]
pub struct NegativeCacheOracle<O> {
    inner: O,
    infeasible: PointSet,
    hits: u64,
}

impl<O: FeasibilityOracle> NegativeCacheOracle<O> {
    pub fn new(inner: O) -> Self {
        NegativeCacheOracle { inner, infeasible: PointSet::new(), hits: 0 }
    }

    /// The cached anti-chain of maximal infeasible points.
    pub fn infeasible_frontier(&self) -> &PointSet {
        &self.infeasible
    }

    /// Queries answered from the cache.
    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }

    /// Records that `point` is infeasible, keeping only maximal entries.
    pub fn cache_insert(&mut self, point: Point) {
        if self.infeasible.has_above(&point) {
            return;
        }
        self.infeasible = self.infeasible.iter().filter(|y| !y.leq(&point)).cloned().collect();
        self.infeasible.insert(point);
    }
}

impl<O: FeasibilityOracle> FeasibilityOracle for NegativeCacheOracle<O> {
    fn evaluate(&mut self, point: &Point) -> Result<bool, OracleError> {
        if self.infeasible.has_above(point) {
            self.hits += 1;
            return Ok(false);
        }
        let answer = self.inner.evaluate(point)?;
        if !answer {
            self.cache_insert(point.clone());
        }
        Ok(answer)
    }
}

/// Cross-checks every answer of `inner` against all earlier answers and
/// fails with [`OracleError::NonMonotone`] on the first contradiction.
///
/// Memory grows with the number of distinct witnesses, so this is meant for
/// debugging and tests.
#[derive(Debug, Clone)]
pub struct MonotonicityGuard<O> {
    inner: O,
    max_false: PointSet,
    min_true: PointSet,
}

impl<O> MonotonicityGuard<O> {
    pub fn new(inner: O) -> Self {
        MonotonicityGuard { inner, max_false: PointSet::new(), min_true: PointSet::new() }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }

    /// Checks `f(point) == answer` against the recorded history and records
    /// it if consistent.
    pub fn check(&mut self, point: &Point, answer: bool) -> Result<(), OracleError> {
        if answer {
            if let Some(y) = self.max_false.iter().find(|y| point.leq(y)) {
                return Err(OracleError::NonMonotone { feasible: point.clone(), infeasible: y.clone() });
            }
            if !self.min_true.has_below(point) {
                self.min_true = self.min_true.iter().filter(|y| !point.leq(y)).cloned().collect();
                self.min_true.insert(point.clone());
            }
        } else {
            if let Some(y) = self.min_true.iter().find(|y| y.leq(point)) {
                return Err(OracleError::NonMonotone { feasible: y.clone(), infeasible: point.clone() });
            }
            if !self.max_false.has_above(point) {
                self.max_false = self.max_false.iter().filter(|y| !y.leq(point)).cloned().collect();
                self.max_false.insert(point.clone());
            }
        }
        Ok(())
    }
}

impl<O: FeasibilityOracle> FeasibilityOracle for MonotonicityGuard<O> {
    fn evaluate(&mut self, point: &Point) -> Result<bool, OracleError> {
        let answer = self.inner.evaluate(point)?;
        self.check(point, answer)?;
        Ok(answer)
    }
}

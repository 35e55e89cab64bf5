//! The enumeration loop.
//!
//! [`Enumerator`] holds the frontier `S` (maximal points below which an
//! undiscovered Pareto point may still lie), the Pareto points found so far
//! and the co-Pareto points certified so far. Each [`Enumerator::step`]
//! probes one frontier point:
//!
//! * infeasible: the point is a co-Pareto point and leaves the frontier;
//! * feasible: [`search_pareto_point`] walks down to a Pareto point `y` and
//!   [`expand_frontier`] replaces every frontier point above `y` by the
//!   maximal points below it that are not above `y`.
//!
//! After every step the frontier together with the found front is an
//! anti-chain, and the set of points below the frontier strictly shrinks, so
//! the loop terminates with the complete front.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::grid::{maximal_elements, Point, PointSet, SearchSpace};
use crate::oracle::{FeasibilityOracle, OracleError, OracleStats};

/// Which frontier point the next step probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum SelectionStrategy {
    /// Lexicographically greatest frontier point.
    #[default]
    LexMax,
    /// Lexicographically smallest frontier point.
    LexMin,
    /// The frontier point that has been waiting longest.
    QueueOrder,
}

impl SelectionStrategy {
    pub const ALL: [SelectionStrategy; 3] =
        [SelectionStrategy::LexMax, SelectionStrategy::LexMin, SelectionStrategy::QueueOrder];

    pub fn name(self) -> &'static str {
        match self {
            SelectionStrategy::LexMax => "lex-max",
            SelectionStrategy::LexMin => "lex-min",
            SelectionStrategy::QueueOrder => "queue",
        }
    }
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Error for an unrecognized strategy name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownStrategy;

impl fmt::Display for UnknownStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown selection strategy (expected lex-max, lex-min or queue)")
    }
}

impl core::error::Error for UnknownStrategy {}

impl FromStr for SelectionStrategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lex-max" | "lexicographic-max" => Ok(SelectionStrategy::LexMax),
            "lex-min" | "lexicographic-min" => Ok(SelectionStrategy::LexMin),
            "queue" | "queue-order" | "fifo" => Ok(SelectionStrategy::QueueOrder),
            _ => Err(UnknownStrategy),
        }
    }
}

/// Outcome of one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    ParetoPointFound(Point),
    CoParetoPointFound(Point),
    Done,
}

/// Fronts and call statistics of a run (complete, or partial if the run
/// was aborted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationResult {
    pub front: PointSet,
    pub co_front: PointSet,
    pub stats: OracleStats,
}

/// An oracle failure during [`enumerate`], carrying everything found before
/// it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationError {
    pub error: OracleError,
    pub partial: Box<EnumerationResult>,
}

impl fmt::Display for EnumerationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (after finding {} Pareto points and {} co-Pareto points)",
            self.error,
            self.partial.front.len(),
            self.partial.co_front.len()
        )
    }
}

impl core::error::Error for EnumerationError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Error from [`Enumerator::step_at`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepError {
    NotInFrontier(Point),
    Oracle(OracleError),
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::NotInFrontier(p) => write!(f, "{p} is not a frontier point"),
            StepError::Oracle(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for StepError {}

impl From<OracleError> for StepError {
    fn from(e: OracleError) -> Self {
        StepError::Oracle(e)
    }
}

/// Records every answer into `stats` on the way through.
struct Tally<'a, O: ?Sized> {
    inner: &'a mut O,
    stats: &'a mut OracleStats,
}

impl<O: FeasibilityOracle + ?Sized> FeasibilityOracle for Tally<'_, O> {
    fn evaluate(&mut self, point: &Point) -> Result<bool, OracleError> {
        let answer = self.inner.evaluate(point)?;
        self.stats.record(point, answer);
        Ok(answer)
    }
}

/// Walks down from a feasible point to a Pareto point below it.
///
/// Dimension by dimension, binary-searches the least value of that
/// coordinate that keeps the point feasible. The range `[0, x_i + 1)` is
/// probed at `min + ⌊(max − min − 1) / 2⌋`, so the top of a range, already
/// known to be feasible, is never queried and each dimension costs at most
/// `⌈log₂(x_i + 1)⌉` calls.
///
/// The caller must already know that `x` is feasible; it is not re-checked.
pub fn search_pareto_point<O: FeasibilityOracle + ?Sized>(mut x: Point, oracle: &mut O) -> Result<Point, OracleError> {
    for dim in 0..x.arity() {
        let mut min: u128 = 0;
        let mut max: u128 = u128::from(x.coords()[dim]) + 1;
        while max - min > 1 {
            let mid = min + (max - min - 1) / 2;
            // mid < max <= x_i + 1
            x.set_coord(dim, mid as u64);
            if oracle.evaluate(&x)? {
                max = mid + 1;
            } else {
                min = mid + 1;
            }
        }
        x.set_coord(dim, min as u64);
    }
    Ok(x)
}

/// `S'` in generation order, before pruning. Frontier points not above
/// `pareto` are kept; each one above it is replaced by its copies with
/// coordinate `i` lowered to `pareto_i - 1`, for every `i` with
/// `pareto_i > 0`.
fn expansion_candidates<'a>(frontier: impl IntoIterator<Item = &'a Point>, pareto: &Point) -> Vec<Point> {
    let mut candidates = Vec::new();
    for y in frontier {
        if !pareto.leq(y) {
            candidates.push(y.clone());
            continue;
        }
        for (dim, &c) in pareto.coords().iter().enumerate() {
            if c > 0 {
                candidates.push(y.with_coord(dim, c - 1));
            }
        }
    }
    candidates
}

/// The frontier after `pareto` has been found: the maximal elements of the
/// region below `frontier` that is not above `pareto`.
pub fn expand_frontier(frontier: &PointSet, pareto: &Point) -> PointSet {
    let candidates: PointSet = expansion_candidates(frontier, pareto).into_iter().collect();
    maximal_elements(&candidates)
}

/// Step-by-step enumeration state.
///
/// Besides the frontier expansion, the enumerator drops every frontier
/// point that lies below a point already known to be infeasible (an earlier
/// co-Pareto point, or a found Pareto point): no undiscovered Pareto point
/// can lie below either. This keeps the frontier together with the front an
/// anti-chain and makes every infeasible main-loop probe a co-Pareto point.
/// Points dropped because they lie below a Pareto point are held back and
/// reported as co-Pareto points as soon as all their upper neighbours are
/// known to be feasible.
#[derive(Debug, Clone)]
pub struct Enumerator {
    space: SearchSpace,
    strategy: SelectionStrategy,
    frontier: PointSet,
    // insertion tick of every frontier point, for QueueOrder
    arrivals: BTreeMap<Point, u64>,
    next_arrival: u64,
    front: PointSet,
    co_front: PointSet,
    // infeasible points below the front, not yet certified co-Pareto
    shadowed: PointSet,
    pending: VecDeque<Event>,
    stats: OracleStats,
}

impl Enumerator {
    pub fn new(space: SearchSpace, strategy: SelectionStrategy) -> Self {
        let top = space.top();
        let mut arrivals = BTreeMap::new();
        arrivals.insert(top.clone(), 0);
        Enumerator {
            space,
            strategy,
            frontier: PointSet::singleton(top),
            arrivals,
            next_arrival: 1,
            front: PointSet::new(),
            co_front: PointSet::new(),
            shadowed: PointSet::new(),
            pending: VecDeque::new(),
            stats: OracleStats::new(),
        }
    }

    /// Keep the full query trace in the stats.
    pub fn with_trace(mut self) -> Self {
        if self.stats.trace.is_none() {
            self.stats.trace = Some(Vec::new());
        }
        self
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn strategy(&self) -> SelectionStrategy {
        self.strategy
    }

    pub fn frontier(&self) -> &PointSet {
        &self.frontier
    }

    pub fn front(&self) -> &PointSet {
        &self.front
    }

    pub fn co_front(&self) -> &PointSet {
        &self.co_front
    }

    /// Queries issued so far.
    pub fn stats(&self) -> &OracleStats {
        &self.stats
    }

    /// No frontier left and every event delivered.
    pub fn is_done(&self) -> bool {
        self.frontier.is_empty() && self.pending.is_empty()
    }

    /// The frontier point the strategy would probe next.
    pub fn next_candidate(&self) -> Option<&Point> {
        match self.strategy {
            SelectionStrategy::LexMax => self.frontier.last(),
            SelectionStrategy::LexMin => self.frontier.first(),
            SelectionStrategy::QueueOrder => {
                self.frontier.iter().min_by_key(|p| self.arrivals.get(*p).copied().unwrap_or(u64::MAX))
            }
        }
    }

    /// Returns the next event. Events left over from an earlier probe come
    /// first; otherwise runs one iteration of the main loop on the point
    /// chosen by the strategy.
    ///
    /// On error the state is left as it was before the step (apart from the
    /// stats, which include the calls that were answered).
    pub fn step<O: FeasibilityOracle + ?Sized>(&mut self, oracle: &mut O) -> Result<Event, OracleError> {
        if let Some(event) = self.pending.pop_front() {
            return Ok(event);
        }
        let Some(x) = self.next_candidate().cloned() else {
            return Ok(Event::Done);
        };
        self.probe(x, oracle)?;
        Ok(self.pending.pop_front().unwrap_or(Event::Done))
    }

    /// Runs one iteration of the main loop on a frontier point picked by the
    /// caller and returns the oldest undelivered event.
    pub fn step_at<O: FeasibilityOracle + ?Sized>(&mut self, x: &Point, oracle: &mut O) -> Result<Event, StepError> {
        if !self.frontier.contains(x) {
            return Err(StepError::NotInFrontier(x.clone()));
        }
        self.probe(x.clone(), oracle)?;
        Ok(self.pending.pop_front().unwrap_or(Event::Done))
    }

    fn probe<O: FeasibilityOracle + ?Sized>(&mut self, x: Point, oracle: &mut O) -> Result<(), OracleError> {
        let mut tally = Tally { inner: oracle, stats: &mut self.stats };
        if !tally.evaluate(&x)? {
            self.frontier.remove(&x);
            self.arrivals.remove(&x);
            self.co_front.insert(x.clone());
            self.pending.push_back(Event::CoParetoPointFound(x));
            return Ok(());
        }

        let pareto = search_pareto_point(x, &mut tally)?;
        self.front.insert(pareto.clone());
        self.pending.push_back(Event::ParetoPointFound(pareto.clone()));

        let mut ordered: Vec<&Point> = self.frontier.iter().collect();
        if self.strategy == SelectionStrategy::QueueOrder {
            ordered.sort_by_key(|p| self.arrivals[*p]);
        }
        let candidates = expansion_candidates(ordered, &pareto);
        let mut frontier = PointSet::new();
        for p in maximal_elements(&candidates.iter().cloned().collect()) {
            if self.co_front.has_above(&p) {
                continue;
            }
            if self.front.has_above(&p) {
                self.shadowed.insert(p);
            } else {
                frontier.insert(p);
            }
        }

        let mut arrivals = BTreeMap::new();
        for p in candidates {
            if frontier.contains(&p) && !arrivals.contains_key(&p) {
                let tick = match self.arrivals.get(&p) {
                    Some(&t) => t,
                    None => {
                        self.next_arrival += 1;
                        self.next_arrival - 1
                    }
                };
                arrivals.insert(p, tick);
            }
        }
        self.frontier = frontier;
        self.arrivals = arrivals;
        self.certify_shadowed();
        Ok(())
    }

    /// Moves every held-back point whose upper neighbours all lie above the
    /// front into the co-front.
    fn certify_shadowed(&mut self) {
        let bounds = self.space.bounds();
        let (certified, waiting): (Vec<Point>, Vec<Point>) =
            core::mem::take(&mut self.shadowed).into_iter().partition(|c| {
                (0..c.arity())
                    .filter(|&i| c.coords()[i] < bounds[i])
                    .all(|i| self.front.has_below(&c.with_coord(i, c.coords()[i] + 1)))
            });
        self.shadowed = waiting.into_iter().collect();
        for c in certified {
            if self.co_front.insert(c.clone()) {
                self.pending.push_back(Event::CoParetoPointFound(c));
            }
        }
    }

    /// Steps until done, handing every event (including the final
    /// [`Event::Done`]) to `sink` as it happens.
    pub fn run<O, F>(mut self, oracle: &mut O, mut sink: F) -> Result<EnumerationResult, EnumerationError>
    where
        O: FeasibilityOracle + ?Sized,
        F: FnMut(&Event),
    {
        loop {
            match self.step(oracle) {
                Ok(event) => {
                    sink(&event);
                    if event == Event::Done {
                        return Ok(self.into_result());
                    }
                }
                Err(error) => return Err(EnumerationError { error, partial: Box::new(self.into_result()) }),
            }
        }
    }

    pub fn into_result(self) -> EnumerationResult {
        EnumerationResult { front: self.front, co_front: self.co_front, stats: self.stats }
    }
}

/// Enumerates the complete Pareto and co-Pareto fronts of `oracle` over
/// `space`, streaming events to `sink`.
pub fn enumerate<O, F>(
    space: SearchSpace,
    oracle: &mut O,
    strategy: SelectionStrategy,
    sink: F,
) -> Result<EnumerationResult, EnumerationError>
where
    O: FeasibilityOracle + ?Sized,
    F: FnMut(&Event),
{
    Enumerator::new(space, strategy).run(oracle, sink)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{from_fn, ConeUnionOracle, CountingOracle, TraceEntry};

    fn pts<const K: usize>(points: &[[u64; K]]) -> PointSet {
        points.iter().map(|&p| Point::from(p)).collect()
    }

    fn example_oracle() -> ConeUnionOracle {
        ConeUnionOracle::new(SearchSpace::uniform(3, 3).unwrap(), pts(&[[2, 1, 1], [1, 2, 2]])).unwrap()
    }

    #[test]
    fn search_from_top_finds_lexicographically_least_pareto_point() {
        let mut o = CountingOracle::traced(example_oracle());
        let y = search_pareto_point(Point::from([3, 3, 3]), &mut o).unwrap();
        assert_eq!(y, Point::from([1, 2, 2]));
        let trace: Vec<TraceEntry> = o.stats().trace.clone().unwrap();
        let expected = [
            ([1, 3, 3], true),
            ([0, 3, 3], false),
            ([1, 1, 3], false),
            ([1, 2, 3], true),
            ([1, 2, 1], false),
            ([1, 2, 2], true),
        ];
        assert_eq!(trace.len(), 6);
        for (entry, (p, f)) in trace.iter().zip(expected) {
            assert_eq!(entry.point, Point::from(p));
            assert_eq!(entry.feasible, f);
        }
    }

    #[test]
    fn search_from_side_point() {
        let mut o = example_oracle();
        assert_eq!(search_pareto_point(Point::from([3, 1, 3]), &mut o).unwrap(), Point::from([2, 1, 1]));
    }

    #[test]
    fn search_on_all_feasible_reaches_origin() {
        let mut o = from_fn(|_| true);
        assert_eq!(search_pareto_point(Point::from([7, 0, 4, 1]), &mut o).unwrap(), Point::from([0, 0, 0, 0]));
    }

    #[test]
    fn expand_frontier_examples() {
        let s = expand_frontier(&pts(&[[3, 3, 3]]), &Point::from([1, 2, 2]));
        assert_eq!(s, pts(&[[0, 3, 3], [3, 1, 3], [3, 3, 1]]));
        let s = expand_frontier(&s, &Point::from([2, 1, 1]));
        assert_eq!(s, pts(&[[0, 3, 3], [1, 1, 3], [1, 3, 1], [3, 0, 3], [3, 3, 0]]));
        assert_eq!(expand_frontier(&pts(&[[0, 0]]), &Point::from([0, 0])), PointSet::new());
    }

    #[test]
    fn first_step_finds_first_pareto_point() {
        let mut e = Enumerator::new(SearchSpace::uniform(3, 3).unwrap(), SelectionStrategy::LexMax);
        let mut o = example_oracle();
        assert_eq!(e.step(&mut o), Ok(Event::ParetoPointFound(Point::from([1, 2, 2]))));
        assert_eq!(e.step_at(&Point::from([3, 1, 3]), &mut o), Ok(Event::ParetoPointFound(Point::from([2, 1, 1]))));
        assert_eq!(e.step_at(&Point::from([3, 1, 3]), &mut o), Err(StepError::NotInFrontier(Point::from([3, 1, 3]))));
    }

    #[test]
    fn empty_frontier_is_done() {
        let mut e = Enumerator::new(SearchSpace::uniform(2, 0).unwrap(), SelectionStrategy::LexMax);
        let mut o = from_fn(|_| false);
        assert_eq!(e.step(&mut o), Ok(Event::CoParetoPointFound(Point::from([0, 0]))));
        assert!(e.is_done());
        assert_eq!(e.step(&mut o), Ok(Event::Done));
    }

    #[test]
    fn point_below_front_is_certified_without_a_probe() {
        let line = SearchSpace::new(vec![3]).unwrap();
        assert_eq!(
            expand_frontier(&PointSet::singleton(Point::from([3])), &Point::from([2])),
            PointSet::singleton(Point::from([1]))
        );

        let mut e = Enumerator::new(line, SelectionStrategy::LexMax);
        let mut o = from_fn(|p: &Point| p.coords()[0] >= 2);
        assert_eq!(e.step(&mut o), Ok(Event::ParetoPointFound(Point::from([2]))));
        assert!(e.frontier().is_empty());
        let calls = e.stats().total_calls;
        assert_eq!(e.step(&mut o), Ok(Event::CoParetoPointFound(Point::from([1]))));
        assert_eq!(e.stats().total_calls, calls);
        assert_eq!(e.step(&mut o), Ok(Event::Done));
        assert!(e.is_done());
    }

    #[test]
    fn points_below_earlier_co_pareto_points_are_not_probed() {
        // bounds (1,1,6): expansion after (1,0,0) yields (0,0,2) and (0,1,1),
        // both below found Pareto points
        let space = SearchSpace::new(vec![1, 1, 6]).unwrap();
        let mut o = ConeUnionOracle::new(space.clone(), pts(&[[0, 0, 3], [0, 1, 2], [1, 0, 0]])).unwrap();
        let r = enumerate(space, &mut o, SelectionStrategy::LexMax, |_| {}).unwrap();
        assert_eq!(r.front, pts(&[[0, 0, 3], [0, 1, 2], [1, 0, 0]]));
        assert_eq!(r.co_front, pts(&[[0, 0, 2], [0, 1, 1]]));
    }

    #[test]
    fn queue_order_probes_oldest_point_first() {
        let mut e = Enumerator::new(SearchSpace::uniform(3, 3).unwrap(), SelectionStrategy::QueueOrder);
        let mut o = example_oracle();
        e.step(&mut o).unwrap();
        // generated in dimension order from (3,3,3)
        assert_eq!(e.next_candidate(), Some(&Point::from([0, 3, 3])));
        assert_eq!(e.step(&mut o), Ok(Event::CoParetoPointFound(Point::from([0, 3, 3]))));
        assert_eq!(e.next_candidate(), Some(&Point::from([3, 1, 3])));
    }

    #[test]
    fn failure_keeps_partial_results() {
        let mut calls = 0;
        let mut o = from_fn(|p: &Point| {
            calls += 1;
            p.coords().iter().sum::<u64>() >= 3
        });
        let mut flaky = FailAfter { inner: &mut o, left: 9 };
        let err =
            enumerate(SearchSpace::uniform(2, 3).unwrap(), &mut flaky, SelectionStrategy::LexMax, |_| {}).unwrap_err();
        assert!(matches!(err.error, OracleError::Failure { .. }));
        assert_eq!(err.partial.stats.total_calls, 9);
        assert!(!err.partial.front.is_empty());
    }

    struct FailAfter<'a, O> {
        inner: &'a mut O,
        left: u32,
    }

    impl<O: FeasibilityOracle> FeasibilityOracle for FailAfter<'_, O> {
        fn evaluate(&mut self, point: &Point) -> Result<bool, OracleError> {
            if self.left == 0 {
                return Err(OracleError::Failure { point: point.clone(), message: "gone".into() });
            }
            self.left -= 1;
            self.inner.evaluate(point)
        }
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in SelectionStrategy::ALL {
            assert_eq!(s.name().parse::<SelectionStrategy>(), Ok(s));
        }
        assert!("random".parse::<SelectionStrategy>().is_err());
        assert_eq!(SelectionStrategy::default(), SelectionStrategy::LexMax);
    }
}

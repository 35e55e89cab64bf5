#![allow(dead_code)]

use pareto_front_core::reference::{
    down_closure_size, find_redundant_positive, random_monotone_instance, RandomInstanceSpec,
};
use pareto_front_core::{
    is_antichain, ConeUnionOracle, EnumerationResult, Enumerator, Event, FeasibilityOracle, Point, PointSet,
    SearchSpace, SelectionStrategy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Grids up to this size get the down-closure shrink check after each step.
pub const DOWN_CLOSURE_CHECK_LIMIT: u64 = 10_000;

pub fn pts<const K: usize>(points: &[[u64; K]]) -> PointSet {
    points.iter().map(|&p| Point::from(p)).collect()
}

pub fn worked_example() -> (SearchSpace, ConeUnionOracle) {
    let space = SearchSpace::uniform(3, 3).unwrap();
    let oracle = ConeUnionOracle::new(space.clone(), pts(&[[2, 1, 1], [1, 2, 2]])).unwrap();
    (space, oracle)
}

/// Instance `index` of the shared random corpus: 1..=4 dimensions, 1..=9
/// values per dimension, target front size 0..=12.
pub fn corpus_instance(index: u64) -> (SearchSpace, ConeUnionOracle) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + index);
    let k = rng.random_range(1..=4usize);
    let bounds: Vec<u64> = (0..k).map(|_| rng.random_range(0..=8)).collect();
    let space = SearchSpace::new(bounds).unwrap();
    let target_front_size = rng.random_range(0..=12);
    let oracle = random_monotone_instance(&RandomInstanceSpec { space: space.clone(), target_front_size, seed: index });
    (space, oracle)
}

/// Runs the enumerator step by step with tracing on, checking after every
/// step that frontier ∪ front is a disjoint anti-chain and (on small grids)
/// that every main-loop iteration strictly shrank the down-closure of the
/// frontier, and at the end
/// that no query was issued above an earlier feasible one.
pub fn checked_run<O: FeasibilityOracle + ?Sized>(
    space: &SearchSpace,
    oracle: &mut O,
    strategy: SelectionStrategy,
) -> Result<(EnumerationResult, Vec<Event>), String> {
    let check_closure = space.grid_size().is_some_and(|n| n <= DOWN_CLOSURE_CHECK_LIMIT);
    let mut e = Enumerator::new(space.clone(), strategy).with_trace();
    let mut closure = if check_closure { down_closure_size(space, e.frontier()) } else { 0 };
    let mut events = Vec::new();
    loop {
        let calls_before = e.stats().total_calls;
        let event = e.step(oracle).map_err(|err| format!("oracle error: {err}"))?;
        if event == Event::Done {
            break;
        }
        events.push(event);

        let frontier = e.frontier();
        let front = e.front();
        if frontier.iter().any(|p| front.contains(p)) {
            return Err(format!("frontier {frontier:?} and front {front:?} intersect"));
        }
        let union: PointSet = frontier.iter().chain(front.iter()).cloned().collect();
        if !is_antichain(&union) {
            return Err(format!("frontier {frontier:?} with front {front:?} is not an anti-chain"));
        }
        // steps that only hand out a queued event run no iteration
        if check_closure && e.stats().total_calls > calls_before {
            let now = down_closure_size(space, frontier);
            if now >= closure {
                return Err(format!("down-closure did not shrink: {closure} -> {now}"));
            }
            closure = now;
        }
    }
    let result = e.into_result();
    let trace = result.stats.trace.as_deref().unwrap_or_default();
    if let Some((i, j)) = find_redundant_positive(trace) {
        return Err(format!("query {j} at {} lies above feasible query {i} at {}", trace[j].point, trace[i].point));
    }
    if result.stats.total_calls != trace.len() as u64
        || result.stats.total_calls != result.stats.true_calls + result.stats.false_calls
    {
        return Err("stats totals disagree with the trace".into());
    }
    Ok((result, events))
}

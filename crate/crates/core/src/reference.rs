//! Independent checks for the enumerator: exhaustive front computation,
//! seeded random monotone instances, the call-bound formula and a few
//! brute-force trace/invariant helpers used by the test suites.

use core::fmt;

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{minimal_elements, Point, PointSet, SearchSpace};
use crate::oracle::{ConeUnionOracle, FeasibilityOracle, OracleError, TraceEntry};

/// Largest grid [`brute_force_fronts`] will scan.
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReferenceError {
    /// The grid has more than `limit` points (`points` is `None` when the
    /// count does not even fit in a `u64`).
    GridTooLarge {
        points: Option<u64>,
        limit: u64,
    },
    Oracle(OracleError),
}

impl fmt::Display for ReferenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceError::GridTooLarge { points: Some(n), limit } => {
                write!(f, "grid has {n} points, brute force is limited to {limit}")
            }
            ReferenceError::GridTooLarge { points: None, limit } => {
                write!(f, "grid is too large to count, brute force is limited to {limit} points")
            }
            ReferenceError::Oracle(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for ReferenceError {}

impl From<OracleError> for ReferenceError {
    fn from(e: OracleError) -> Self {
        ReferenceError::Oracle(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceResult {
    /// Minimal feasible points.
    pub front: PointSet,
    /// Maximal infeasible points.
    pub co_front: PointSet,
    pub grid_size: u64,
}

/// Evaluates `oracle` once on every grid point and reads both fronts off
/// the table.
///
/// `x` is on the front iff it is feasible and no lower neighbour `x − e_i`
/// is; on the co-front iff it is infeasible and every upper neighbour
/// `x + e_i` inside the grid is feasible. For a monotone oracle this is
/// equivalent to comparing against all smaller (greater) points.
pub fn brute_force_fronts<O: FeasibilityOracle + ?Sized>(
    space: &SearchSpace,
    oracle: &mut O,
) -> Result<BruteForceResult, ReferenceError> {
    let grid_size = match space.grid_size() {
        Some(n) if n <= BRUTE_FORCE_LIMIT => n,
        points => return Err(ReferenceError::GridTooLarge { points, limit: BRUTE_FORCE_LIMIT }),
    };
    let table = space.points().map(|p| oracle.evaluate(&p)).collect::<Result<Vec<bool>, _>>()?;
    let feasible = |p: &Point| table[space.index_of(p)];

    let mut front = PointSet::new();
    let mut co_front = PointSet::new();
    for p in space.points() {
        let dims = 0..space.arity();
        if feasible(&p) {
            let lowest = dims.filter(|&i| p.coords()[i] > 0).all(|i| !feasible(&p.with_coord(i, p.coords()[i] - 1)));
            if lowest {
                front.insert(p);
            }
        } else {
            let highest = dims
                .filter(|&i| p.coords()[i] < space.bounds()[i])
                .all(|i| feasible(&p.with_coord(i, p.coords()[i] + 1)));
            if highest {
                co_front.insert(p);
            }
        }
    }
    Ok(BruteForceResult { front, co_front, grid_size })
}

/// Parameters of a seeded random instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomInstanceSpec {
    pub space: SearchSpace,
    pub target_front_size: usize,
    pub seed: u64,
}

/// A cone-union oracle whose Pareto front has between 1 and
/// `target_front_size` points (none when the target is 0).
///
/// Draws `target_front_size` uniform grid points from a ChaCha8 stream
/// seeded with `seed` and keeps their minimal elements, so the generators
/// are exactly the Pareto front of the returned oracle.
pub fn random_monotone_instance(spec: &RandomInstanceSpec) -> ConeUnionOracle {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut generators = PointSet::new();
    while spec.target_front_size > 0 && generators.is_empty() {
        let draws: PointSet = (0..spec.target_front_size).map(|_| random_point(&mut rng, &spec.space)).collect();
        generators = minimal_elements(&draws);
    }
    ConeUnionOracle::new(spec.space.clone(), generators).expect("generated points lie in the space")
}

pub(crate) fn random_point<R: Rng>(rng: &mut R, space: &SearchSpace) -> Point {
    space.bounds().iter().map(|&n| rng.random_range(0..=n)).collect::<Vec<u64>>().into()
}

/// `⌈log₂ d⌉`, with `⌈log₂ 1⌉ = 0`.
pub fn ceil_log2(d: u128) -> u32 {
    if d <= 1 {
        0
    } else {
        128 - (d - 1).leading_zeros()
    }
}

/// The oracle-call bound `p · (Σ_i ⌈log₂ D_i⌉ + 1) + ψ` with `D_i = n_i + 1`.
pub fn bound_value(space: &SearchSpace, p: u64, psi: u64) -> u64 {
    let per_point: u64 = space.domain_sizes().map(|d| u64::from(ceil_log2(d))).sum::<u64>() + 1;
    p.saturating_mul(per_point).saturating_add(psi)
}

/// Number of grid points lying below some member of `set`, by scanning the
/// whole grid.
pub fn down_closure_size(space: &SearchSpace, set: &PointSet) -> u64 {
    space.points().filter(|p| set.has_above(p)).count() as u64
}

/// First pair `(i, j)`, `i < j`, where query `j` lies above query `i` that
/// was answered `true`.
pub fn find_redundant_positive(trace: &[TraceEntry]) -> Option<(usize, usize)> {
    (0..trace.len())
        .find_map(|j| (0..j).find(|&i| trace[i].feasible && trace[i].point.leq(&trace[j].point)).map(|i| (i, j)))
}

/// First pair `(i, j)`, `i < j`, where query `j` lies below query `i` that
/// was answered `false`.
pub fn find_redundant_negative(trace: &[TraceEntry]) -> Option<(usize, usize)> {
    (0..trace.len())
        .find_map(|j| (0..j).find(|&i| !trace[i].feasible && trace[j].point.leq(&trace[i].point)).map(|i| (i, j)))
}

/// Exhaustively looks for a feasible point with an infeasible upper
/// neighbour. Returns that `(feasible, infeasible)` pair if one exists.
pub fn find_monotonicity_violation<O: FeasibilityOracle + ?Sized>(
    space: &SearchSpace,
    oracle: &mut O,
) -> Result<Option<(Point, Point)>, ReferenceError> {
    match space.grid_size() {
        Some(n) if n <= BRUTE_FORCE_LIMIT => {}
        points => return Err(ReferenceError::GridTooLarge { points, limit: BRUTE_FORCE_LIMIT }),
    }
    let table = space.points().map(|p| oracle.evaluate(&p)).collect::<Result<Vec<bool>, _>>()?;
    for p in space.points() {
        if !table[space.index_of(&p)] {
            continue;
        }
        for i in 0..space.arity() {
            if p.coords()[i] < space.bounds()[i] {
                let q = p.with_coord(i, p.coords()[i] + 1);
                if !table[space.index_of(&q)] {
                    return Ok(Some((p, q)));
                }
            }
        }
    }
    Ok(None)
}

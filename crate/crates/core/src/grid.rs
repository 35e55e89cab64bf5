//! Grid geometry: points, per-dimension search spaces, the component-wise
//! order `≤` and anti-chain operations.

use alloc::collections::btree_set::{self, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

/// Errors raised when points and spaces do not fit together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridError {
    /// A search space needs at least one dimension.
    NoDimensions,
    /// Two points, or a point and a space, disagree on the number of
    /// coordinates.
    ArityMismatch { expected: usize, found: usize },
    /// A coordinate exceeds the inclusive bound of its dimension.
    OutOfBounds { point: Point, bounds: Vec<u64> },
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::NoDimensions => write!(f, "search space must have at least one dimension"),
            GridError::ArityMismatch { expected, found } => {
                write!(f, "expected {expected} coordinates, found {found}")
            }
            GridError::OutOfBounds { point, bounds } => {
                write!(f, "point {point} lies outside the grid with bounds {}", Point(bounds.clone()))
            }
        }
    }
}

impl core::error::Error for GridError {}

/// A grid point: one non-negative coordinate per objective.
///
/// The derived `Ord` is lexicographic and is only used to give sets a
/// canonical iteration order. The dominance order is [`Point::leq`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(Vec<u64>);

impl Point {
    pub fn new(coords: Vec<u64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn into_coords(self) -> Vec<u64> {
        self.0
    }

    /// Component-wise `self ≤ other`.
    ///
    /// Panics if the arities differ; use [`Point::try_leq`] when that is not
    /// already guaranteed.
    pub fn leq(&self, other: &Point) -> bool {
        assert_eq!(self.arity(), other.arity(), "comparing points of different arity");
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn try_leq(&self, other: &Point) -> Result<bool, GridError> {
        if self.arity() != other.arity() {
            return Err(GridError::ArityMismatch { expected: self.arity(), found: other.arity() });
        }
        Ok(self.leq(other))
    }

    /// `self ≤ other` and `self ≠ other`.
    pub fn strictly_below(&self, other: &Point) -> bool {
        self.leq(other) && self != other
    }

    pub fn comparable(&self, other: &Point) -> bool {
        self.leq(other) || other.leq(self)
    }

    /// Copy of `self` with coordinate `dim` replaced.
    pub fn with_coord(&self, dim: usize, value: u64) -> Point {
        let mut coords = self.0.clone();
        coords[dim] = value;
        Point(coords)
    }

    pub(crate) fn set_coord(&mut self, dim: usize, value: u64) {
        self.0[dim] = value;
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Vec<u64>> for Point {
    fn from(coords: Vec<u64>) -> Self {
        Point(coords)
    }
}

impl<const K: usize> From<[u64; K]> for Point {
    fn from(coords: [u64; K]) -> Self {
        Point(coords.to_vec())
    }
}

impl From<&[u64]> for Point {
    fn from(coords: &[u64]) -> Self {
        Point(coords.to_vec())
    }
}

/// The grid `{0..=n_1} × … × {0..=n_k}` given by inclusive per-dimension
/// maxima.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SearchSpace {
    bounds: Vec<u64>,
}

impl SearchSpace {
    pub fn new(bounds: Vec<u64>) -> Result<Self, GridError> {
        if bounds.is_empty() {
            return Err(GridError::NoDimensions);
        }
        Ok(SearchSpace { bounds })
    }

    /// `k` dimensions with the same inclusive bound `n`.
    pub fn uniform(k: usize, n: u64) -> Result<Self, GridError> {
        SearchSpace::new(alloc::vec![n; k])
    }

    pub fn bounds(&self) -> &[u64] {
        &self.bounds
    }

    pub fn arity(&self) -> usize {
        self.bounds.len()
    }

    /// Number of values `n_i + 1` in each dimension.
    pub fn domain_sizes(&self) -> impl Iterator<Item = u128> + '_ {
        self.bounds.iter().map(|&n| u128::from(n) + 1)
    }

    /// Total number of grid points, or `None` if it does not fit in a `u64`.
    pub fn grid_size(&self) -> Option<u64> {
        self.domain_sizes().try_fold(1u128, |acc, d| acc.checked_mul(d)).and_then(|n| u64::try_from(n).ok())
    }

    /// The greatest point `(n_1, …, n_k)`.
    pub fn top(&self) -> Point {
        Point(self.bounds.clone())
    }

    pub fn origin(&self) -> Point {
        Point(alloc::vec![0; self.arity()])
    }

    pub fn contains(&self, point: &Point) -> bool {
        self.check(point).is_ok()
    }

    pub fn check(&self, point: &Point) -> Result<(), GridError> {
        if point.arity() != self.arity() {
            return Err(GridError::ArityMismatch { expected: self.arity(), found: point.arity() });
        }
        if point.coords().iter().zip(&self.bounds).any(|(c, n)| c > n) {
            return Err(GridError::OutOfBounds { point: point.clone(), bounds: self.bounds.clone() });
        }
        Ok(())
    }

    /// All grid points in lexicographic order.
    pub fn points(&self) -> GridPoints<'_> {
        GridPoints { space: self, next: Some(self.origin()) }
    }

    /// Position of `point` in the lexicographic enumeration of [`SearchSpace::points`].
    ///
    /// Only meaningful when the grid size fits in a `usize`.
    pub fn index_of(&self, point: &Point) -> usize {
        point.coords().iter().zip(&self.bounds).fold(0usize, |acc, (&c, &n)| acc * (n as usize + 1) + c as usize)
    }
}

/// Iterator over every point of a [`SearchSpace`], last dimension fastest.
#[derive(Debug, Clone)]
pub struct GridPoints<'a> {
    space: &'a SearchSpace,
    next: Option<Point>,
}

impl Iterator for GridPoints<'_> {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for dim in (0..succ.arity()).rev() {
            if succ.0[dim] < self.space.bounds[dim] {
                succ.0[dim] += 1;
                self.next = Some(succ);
                break;
            }
            succ.0[dim] = 0;
        }
        Some(current)
    }
}

/// A finite set of points, iterated in lexicographic order.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct PointSet(BTreeSet<Point>);

impl PointSet {
    pub fn new() -> Self {
        PointSet(BTreeSet::new())
    }

    pub fn singleton(point: Point) -> Self {
        let mut set = PointSet::new();
        set.insert(point);
        set
    }

    pub fn insert(&mut self, point: Point) -> bool {
        self.0.insert(point)
    }

    pub fn remove(&mut self, point: &Point) -> bool {
        self.0.remove(point)
    }

    pub fn contains(&self, point: &Point) -> bool {
        self.0.contains(point)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Point> {
        self.0.iter()
    }

    /// Lexicographically smallest member.
    pub fn first(&self) -> Option<&Point> {
        self.0.first()
    }

    /// Lexicographically greatest member.
    pub fn last(&self) -> Option<&Point> {
        self.0.last()
    }

    /// Whether some member `m` satisfies `point ≤ m`.
    pub fn has_above(&self, point: &Point) -> bool {
        self.0.iter().any(|m| point.leq(m))
    }

    /// Whether some member `m` satisfies `m ≤ point`.
    pub fn has_below(&self, point: &Point) -> bool {
        self.0.iter().any(|m| m.leq(point))
    }

    pub fn to_vec(&self) -> Vec<Point> {
        self.0.iter().cloned().collect()
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<Point> for PointSet {
    fn from_iter<I: IntoIterator<Item = Point>>(iter: I) -> Self {
        PointSet(iter.into_iter().collect())
    }
}

impl Extend<Point> for PointSet {
    fn extend<I: IntoIterator<Item = Point>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl IntoIterator for PointSet {
    type Item = Point;
    type IntoIter = btree_set::IntoIter<Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = btree_set::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// True iff no two distinct members are comparable.
pub fn is_antichain(set: &PointSet) -> bool {
    let points: Vec<&Point> = set.iter().collect();
    points.iter().enumerate().all(|(i, a)| points[i + 1..].iter().all(|b| !a.comparable(b)))
}

/// The `≤`-maximal members of `set`: every `x` for which no other member
/// `y` satisfies `x ≤ y`. Quadratic pairwise scan.
pub fn maximal_elements(set: &PointSet) -> PointSet {
    set.iter().filter(|x| !set.iter().any(|y| x.strictly_below(y))).cloned().collect()
}

/// The `≤`-minimal members of `set`.
pub fn minimal_elements(set: &PointSet) -> PointSet {
    set.iter().filter(|x| !set.iter().any(|y| y.strictly_below(x))).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn set<const K: usize>(points: &[[u64; K]]) -> PointSet {
        points.iter().map(|&p| Point::from(p)).collect()
    }

    #[test]
    fn leq_matches_example_pairs() {
        assert!(Point::from([1, 2, 2]).leq(&Point::from([3, 3, 3])));
        let a = Point::from([0, 3, 3]);
        let b = Point::from([2, 1, 1]);
        assert!(!a.leq(&b));
        assert!(!b.leq(&a));
        assert!(!a.comparable(&b));
        assert!(a.leq(&a));
    }

    #[test]
    fn try_leq_rejects_arity_mismatch() {
        let err = Point::from([1, 2]).try_leq(&Point::from([1, 2, 3])).unwrap_err();
        assert_eq!(err, GridError::ArityMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn antichain_checks() {
        assert!(is_antichain(&set(&[[0, 3, 3], [3, 1, 3], [3, 3, 1]])));
        assert!(is_antichain(&PointSet::new()));
        assert!(is_antichain(&set(&[[4, 4]])));
        assert!(!is_antichain(&set(&[[3, 0, 1], [3, 0, 3]])));
    }

    #[test]
    fn maximal_elements_prunes_example_set() {
        let s = set(&[[0, 3, 3], [1, 1, 3], [3, 0, 3], [3, 1, 0], [1, 3, 1], [3, 0, 1], [3, 3, 0]]);
        let expected = set(&[[0, 3, 3], [1, 1, 3], [1, 3, 1], [3, 0, 3], [3, 3, 0]]);
        assert_eq!(maximal_elements(&s), expected);
    }

    #[test]
    fn maximal_elements_of_antichain_and_chain() {
        let anti = set(&[[0, 3, 3], [3, 1, 3], [3, 3, 1]]);
        assert_eq!(maximal_elements(&anti), anti);
        assert_eq!(maximal_elements(&set(&[[0, 0], [1, 1], [2, 2]])), set(&[[2, 2]]));
        assert_eq!(minimal_elements(&set(&[[0, 0], [1, 1], [2, 2]])), set(&[[0, 0]]));
    }

    #[test]
    fn space_construction_and_membership() {
        assert_eq!(SearchSpace::new(vec![]), Err(GridError::NoDimensions));
        let space = SearchSpace::new(vec![3, 0, 2]).unwrap();
        assert_eq!(space.grid_size(), Some(12));
        assert_eq!(space.top(), Point::from([3, 0, 2]));
        assert!(space.contains(&Point::from([1, 0, 2])));
        assert!(matches!(space.check(&Point::from([1, 1, 2])), Err(GridError::OutOfBounds { .. })));
        assert!(matches!(space.check(&Point::from([1, 0])), Err(GridError::ArityMismatch { .. })));
        assert_eq!(SearchSpace::uniform(2, u64::MAX).unwrap().grid_size(), None);
    }

    #[test]
    fn grid_points_enumerate_in_index_order() {
        let space = SearchSpace::new(vec![2, 1, 3]).unwrap();
        let points: Vec<Point> = space.points().collect();
        assert_eq!(points.len(), 24);
        for (i, p) in points.iter().enumerate() {
            assert_eq!(space.index_of(p), i);
        }
        assert!(points.windows(2).all(|w| w[0] < w[1]));
    }
}

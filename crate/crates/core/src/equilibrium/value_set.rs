use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Debug;

use num_traits::Zero;

use crate::rational::{dist2, Rational};

/// Scalar type of a [`ValueSet`]: exact rationals for discrete games, `f64`
/// for PDE output.
pub trait Coord: Clone + Debug + PartialEq + PartialOrd {
    fn zero_coord() -> Self;
    /// Whether the Euclidean distance between `a` and `b` is below `eps`.
    fn within(a: &[Self], b: &[Self], eps: &Self) -> bool;
}

impl Coord for Rational {
    fn zero_coord() -> Self {
        Zero::zero()
    }

    fn within(a: &[Self], b: &[Self], eps: &Self) -> bool {
        dist2(a, b) < eps * eps
    }
}

impl Coord for f64 {
    fn zero_coord() -> Self {
        0.0
    }

    fn within(a: &[Self], b: &[Self], eps: &Self) -> bool {
        let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        libm::sqrt(d2) < *eps
    }
}

fn lex<T: PartialOrd>(a: &[T], b: &[T]) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// A finite set of payoff vectors, optionally inflated by open balls of
/// radius `epsilon`.
///
/// Points are kept sorted lexicographically and free of duplicates, so two
/// sets with the same points compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSet<T: Coord = Rational> {
    points: Vec<Vec<T>>,
    epsilon: T,
}

impl<T: Coord> Default for ValueSet<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Coord> ValueSet<T> {
    pub fn new() -> Self {
        Self {
            points: Vec::new(),
            epsilon: T::zero_coord(),
        }
    }

    pub fn from_points(points: impl IntoIterator<Item = Vec<T>>) -> Self {
        let mut set = Self::new();
        set.extend(points);
        set
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn epsilon(&self) -> &T {
        &self.epsilon
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec<T>> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Adds a point; returns false if it was already present.
    pub fn insert(&mut self, point: Vec<T>) -> bool {
        match self.points.binary_search_by(|p| lex(p, &point)) {
            Ok(_) => false,
            Err(pos) => {
                self.points.insert(pos, point);
                true
            }
        }
    }

    pub fn extend(&mut self, points: impl IntoIterator<Item = Vec<T>>) {
        for p in points {
            self.insert(p);
        }
    }

    /// Exact point membership, ignoring the inflation radius.
    pub fn has_point(&self, y: &[T]) -> bool {
        self.points.binary_search_by(|p| lex(p, y)).is_ok()
    }

    /// Membership in the inflated set: some point lies strictly within
    /// `epsilon` of `y`, or `y` is a point when `epsilon` is zero.
    pub fn contains(&self, y: &[T]) -> bool {
        if self.epsilon == T::zero_coord() {
            self.has_point(y)
        } else {
            self.points.iter().any(|p| T::within(p, y, &self.epsilon))
        }
    }

    /// Point-set inclusion (radii ignored).
    pub fn is_subset(&self, other: &Self) -> bool {
        self.points.iter().all(|p| other.has_point(p))
    }

    /// Points of `self` missing from `other`.
    pub fn difference(&self, other: &Self) -> Vec<Vec<T>> {
        self.points
            .iter()
            .filter(|p| !other.has_point(p))
            .cloned()
            .collect()
    }

    /// Union of the points; keeps the larger radius.
    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.extend(other.points.iter().cloned());
        if other.epsilon > out.epsilon {
            out.epsilon = other.epsilon.clone();
        }
        out
    }
}

/// `a <= b` componentwise with at least one strict inequality.
pub fn dominates<T: PartialOrd>(a: &[T], b: &[T]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// Keeps the points not dominated by another point of the set.
pub fn pareto_filter<T: Coord>(vs: &ValueSet<T>) -> ValueSet<T> {
    let kept = vs
        .points()
        .iter()
        .filter(|y| !vs.points().iter().any(|other| dominates(other, y)))
        .cloned();
    ValueSet::from_points(kept).with_epsilon(vs.epsilon().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, point, ratio};

    #[test]
    fn dedup_and_order() {
        let vs = ValueSet::from_points([point(&[(1, 1), (0, 1)]), point(&[(0, 1), (1, 1)]), point(&[(1, 1), (0, 1)])]);
        assert_eq!(vs.len(), 2);
        assert_eq!(vs.points()[0], point(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn inflated_membership_is_strict() {
        let vs = ValueSet::from_points([vec![int(0), int(0)]]).with_epsilon(ratio(1, 2));
        assert!(vs.contains(&[ratio(1, 4), ratio(1, 4)]));
        assert!(!vs.contains(&[ratio(1, 2), int(0)]));
        let exact = ValueSet::from_points([vec![int(0), int(0)]]);
        assert!(!exact.contains(&[ratio(1, 100), int(0)]));
    }

    #[test]
    fn pareto_examples() {
        let pts = |v: &[(i128, i128)]| ValueSet::from_points(v.iter().map(|&(a, b)| vec![int(a), int(b)]));
        assert_eq!(pareto_filter(&pts(&[(0, 1), (1, 0)])), pts(&[(0, 1), (1, 0)]));
        assert_eq!(pareto_filter(&pts(&[(2, 2), (3, 3)])), pts(&[(2, 2)]));
        assert_eq!(pareto_filter(&pts(&[(1, 1)])), pts(&[(1, 1)]));
        assert_eq!(pareto_filter(&pts(&[(1, 2), (1, 3), (0, 5)])), pts(&[(0, 5), (1, 2)]));
    }

    #[test]
    fn float_sets() {
        let vs: ValueSet<f64> = ValueSet::from_points([vec![0.5, 1.0], vec![0.5, 1.0]]).with_epsilon(0.1);
        assert_eq!(vs.len(), 1);
        assert!(vs.contains(&[0.55, 1.0]));
    }
}

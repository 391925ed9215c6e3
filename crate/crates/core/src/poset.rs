//! Weighted finite totally ordered posets, suspended at infinity, and their
//! translation monoid.
//!
//! A poset is given by strictly increasing coordinates `x_1 < ... < x_n`
//! together with a weight `b > 0` on the edge from `x_n` to the suspension
//! point. The metric is the weighted path metric on the Hasse quiver, so
//! finite points sit at their coordinates and the suspension point sits at
//! `x_n + b`.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

/// A vertex of the suspended poset.
///
/// The derived order is the poset order: finite points by index, then the
/// suspension point on top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PosetPoint {
    Finite(usize),
    Infinity,
}

impl PosetPoint {
    pub fn finite(self) -> Option<usize> {
        match self {
            PosetPoint::Finite(i) => Some(i),
            PosetPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == PosetPoint::Infinity
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedPoset {
    points: Vec<Rational>,
    weight: Rational,
    /// Metric positions of every vertex, the suspension point last.
    positions: Vec<Rational>,
}

impl WeightedPoset {
    pub fn new(points: Vec<Rational>, weight: Rational) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Validation("poset needs at least one point".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Validation(format!(
                "points must be strictly increasing ({} then {})",
                format_rational(&w[0]),
                format_rational(&w[1])
            )));
        }
        if !weight.is_positive() {
            return Err(Error::Validation("suspension weight b must be positive".into()));
        }
        let mut positions = points.clone();
        positions.push(points.last().unwrap() + &weight);
        Ok(Self {
            points,
            weight,
            positions,
        })
    }

    /// Builds the poset with the default suspension weight `2 (max - min) + 1`.
    pub fn with_default_weight(points: Vec<Rational>) -> Result<Self> {
        let weight = match (points.first(), points.last()) {
            (Some(lo), Some(hi)) => Self::default_weight(lo, hi),
            _ => int(1),
        };
        Self::new(points, weight)
    }

    pub fn default_weight(min: &Rational, max: &Rational) -> Rational {
        (max - min) * int(2) + int(1)
    }

    /// Number of finite points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn coordinate(&self, p: PosetPoint) -> Option<&Rational> {
        p.finite().map(|i| &self.points[i])
    }

    pub fn index_of(&self, x: &Rational) -> Option<usize> {
        self.points.binary_search(x).ok()
    }

    /// Every vertex of the suspended poset in increasing order.
    pub fn vertices(&self) -> impl Iterator<Item = PosetPoint> + '_ {
        (0..self.len())
            .map(PosetPoint::Finite)
            .chain(std::iter::once(PosetPoint::Infinity))
    }

    pub(crate) fn slot(&self, p: PosetPoint) -> usize {
        match p {
            PosetPoint::Finite(i) => i,
            PosetPoint::Infinity => self.len(),
        }
    }

    pub(crate) fn vertex(&self, slot: usize) -> PosetPoint {
        if slot >= self.len() {
            PosetPoint::Infinity
        } else {
            PosetPoint::Finite(slot)
        }
    }

    pub(crate) fn position(&self, p: PosetPoint) -> &Rational {
        &self.positions[self.slot(p)]
    }

    /// Weighted path distance on the Hasse quiver of the suspended poset.
    pub fn distance(&self, p: PosetPoint, q: PosetPoint) -> Rational {
        (self.position(p) - self.position(q)).abs()
    }

    /// Next vertex up; the successor of `x_n` is the suspension point.
    pub fn successor(&self, p: PosetPoint) -> PosetPoint {
        match p {
            PosetPoint::Finite(i) => self.vertex(i + 1),
            PosetPoint::Infinity => PosetPoint::Infinity,
        }
    }

    pub fn predecessor(&self, p: PosetPoint) -> Option<PosetPoint> {
        match self.slot(p) {
            0 => None,
            s => Some(PosetPoint::Finite(s - 1)),
        }
    }

    /// Edge weights `a_i = x_{i+1} - x_i`.
    pub fn gaps(&self) -> Vec<Rational> {
        self.points.windows(2).map(|w| &w[1] - &w[0]).collect()
    }

    /// All distances `d(p, q)` for `p <= q` in the suspended poset, sorted and
    /// deduplicated. Every height of a translation lies in this set.
    pub fn candidate_heights(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.positions.len() * (self.positions.len() + 1) / 2);
        for (i, a) in self.positions.iter().enumerate() {
            for b in &self.positions[i..] {
                out.push(b - a);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// The unique maximal translation of height at most `eps`: each vertex
    /// goes to the highest vertex within distance `eps` above it.
    pub fn maximal_translation(&self, eps: &Rational) -> Translation {
        let n = self.positions.len();
        let mut image = Vec::with_capacity(n);
        let mut reach = 0;
        for p in 0..n {
            reach = reach.max(p);
            while reach + 1 < n && &self.positions[reach + 1] - &self.positions[p] <= *eps {
                reach += 1;
            }
            image.push(self.vertex(reach));
        }
        Translation { image }
    }

    /// `max_p d(p, Λp)`.
    pub fn height(&self, t: &Translation) -> Rational {
        self.vertices()
            .map(|p| self.distance(p, t.apply(p)))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Every translation of the suspended poset. The count is a Catalan
    /// number, so this is only meant for small posets (test oracles).
    pub fn all_translations(&self) -> Vec<Translation> {
        fn extend(
            poset: &WeightedPoset,
            current: &mut Vec<PosetPoint>,
            out: &mut Vec<Translation>,
        ) {
            let n = poset.len();
            let p = current.len();
            if p == n {
                let mut image = current.clone();
                image.push(PosetPoint::Infinity);
                out.push(Translation { image });
                return;
            }
            let floor = current.last().map_or(p, |q| poset.slot(*q).max(p));
            for s in floor..=n {
                current.push(poset.vertex(s));
                extend(poset, current, out);
                current.pop();
            }
        }
        let mut out = Vec::new();
        extend(self, &mut Vec::with_capacity(self.len()), &mut out);
        out
    }
}

impl fmt::Display for WeightedPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(x))?;
        }
        write!(f, "; b = {}}}", format_rational(&self.weight))
    }
}

/// A monotone, inflationary self-map of the suspended poset fixing the
/// suspension point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Translation {
    image: Vec<PosetPoint>,
}

impl Translation {
    pub fn identity(poset: &WeightedPoset) -> Self {
        Self {
            image: poset.vertices().collect(),
        }
    }

    /// `image[i]` is the image of the `i`-th finite point; the suspension
    /// point is fixed and must not be listed.
    pub fn new(poset: &WeightedPoset, image: Vec<PosetPoint>) -> Result<Self> {
        if image.len() != poset.len() {
            return Err(Error::ShapeMismatch(format!(
                "translation lists {} images for {} points",
                image.len(),
                poset.len()
            )));
        }
        for (i, q) in image.iter().enumerate() {
            if let PosetPoint::Finite(j) = *q {
                if j >= poset.len() {
                    return Err(Error::Validation(format!("image index {j} out of range")));
                }
            }
            if *q < PosetPoint::Finite(i) {
                return Err(Error::Validation(format!("translation moves point {i} down")));
            }
            if i > 0 && *q < image[i - 1] {
                return Err(Error::Validation("translation is not monotone".into()));
            }
        }
        let mut image = image;
        image.push(PosetPoint::Infinity);
        Ok(Self { image })
    }

    pub fn apply(&self, p: PosetPoint) -> PosetPoint {
        match p {
            PosetPoint::Finite(i) => self.image[i],
            PosetPoint::Infinity => PosetPoint::Infinity,
        }
    }

    /// Number of finite points of the underlying poset.
    pub fn len(&self) -> usize {
        self.image.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Images of the finite points, followed by the fixed suspension point.
    pub fn images(&self) -> &[PosetPoint] {
        &self.image
    }

    /// `self ∘ other`, i.e. `p ↦ self(other(p))`.
    pub fn compose(&self, other: &Translation) -> Translation {
        assert_eq!(self.image.len(), other.image.len(), "translations on different posets");
        Translation {
            image: other.image.iter().map(|q| self.apply(*q)).collect(),
        }
    }

    pub fn square(&self) -> Translation {
        self.compose(self)
    }

    /// Pointwise order `Λp <= Γp`.
    pub fn leq(&self, other: &Translation) -> bool {
        self.image.iter().zip(&other.image).all(|(a, b)| a <= b)
    }

    pub fn is_identity(&self) -> bool {
        self.image
            .iter()
            .enumerate()
            .all(|(i, q)| *q == PosetPoint::Finite(i) || (i + 1 == self.image.len() && q.is_infinite()))
    }
}

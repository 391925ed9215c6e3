//! Finite point clouds, the scales at which their Vietoris–Rips complex
//! changes, and their degree-zero barcodes.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::refinement::{ContinuousBar, ContinuousBarcode};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    LInfinity,
    L1,
    /// Squared Euclidean distance. It is a monotone reparameterization of
    /// the Euclidean scale, not a metric, so it is opt-in.
    SquaredEuclidean,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointCloud {
    points: Vec<Vec<Rational>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<Rational>>) -> Result<Self> {
        let dim = points
            .first()
            .ok_or_else(|| Error::Validation("point cloud is empty".into()))?
            .len();
        if dim == 0 {
            return Err(Error::Validation("points need at least one coordinate".into()));
        }
        if let Some(k) = points.iter().position(|p| p.len() != dim) {
            return Err(Error::Validation(format!(
                "point {} has {} coordinates, expected {dim}",
                k + 1,
                points[k].len()
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    pub fn distance(&self, i: usize, j: usize, metric: Metric) -> Rational {
        let diffs = self.points[i].iter().zip(&self.points[j]).map(|(a, b)| (a - b).abs());
        match metric {
            Metric::LInfinity => diffs.max().unwrap_or_else(Rational::zero),
            Metric::L1 => diffs.sum(),
            Metric::SquaredEuclidean => diffs.map(|d| &d * &d).sum(),
        }
    }
}

/// Distinct distances between points with distinct indices, ascending.
pub fn jump_discontinuities(cloud: &PointCloud, metric: Metric) -> Vec<Rational> {
    let set: BTreeSet<Rational> = (0..cloud.len())
        .flat_map(|i| (i + 1..cloud.len()).map(move |j| (i, j)))
        .map(|(i, j)| cloud.distance(i, j, metric))
        .collect();
    set.into_iter().collect()
}

pub fn union_jump_sets<'a, I: IntoIterator<Item = &'a [Rational]>>(sets: I) -> Vec<Rational> {
    let set: BTreeSet<Rational> = sets.into_iter().flatten().cloned().collect();
    set.into_iter().collect()
}

/// Degree-zero barcode of the Vietoris–Rips filtration by single linkage:
/// one `[0, d)` per merge at scale `d > 0`, and one `[0, ∞)`.
pub fn h0_barcode(cloud: &PointCloud, metric: Metric) -> ContinuousBarcode {
    let n = cloud.len();
    let mut edges: Vec<(Rational, usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (cloud.distance(i, j, metric), i, j))
        .collect();
    edges.sort();
    let mut components = UnionFind::<usize>::new(n);
    let mut deaths: Vec<Rational> = Vec::with_capacity(n.saturating_sub(1));
    for (d, i, j) in edges {
        if components.union(i, j) && d.is_positive() {
            deaths.push(d);
        }
    }
    let mut out = ContinuousBarcode::new();
    for group in deaths.chunk_by(|a, b| a == b) {
        let bar = ContinuousBar::finite(Rational::zero(), group[0].clone()).expect("positive death");
        out.push(bar, group.len());
    }
    if n > 0 {
        out.push(ContinuousBar::new(Rational::zero(), None).expect("infinite bar"), 1);
    }
    out
}

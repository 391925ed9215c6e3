//! Moving between posets: restriction of continuous barcodes, inflation
//! along refinements, the shift refinement, regularity, and the limit of
//! discrete distances as the refinement gets finer.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Signed;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::{act, Barcode, Interval};
use crate::linalg::{Matrix, PrimeField};
use crate::matching::{bottleneck_distance, induced_matching_triangle, matching_height, BottleneckCosts, MatchingRecord};
use crate::poset::{PosetPoint, Translation, WeightedPoset};
use crate::quiver::{act_rep, morphism_from_generators, Rep, RepMorphism};
use crate::rational::{format_rational, int, Rational};

/// Default bound on the size of a shift refinement.
pub const SHIFT_LIMIT: usize = 10_000;

/// A bar `[r, R)` of a persistence module over the real line; `death` is
/// `None` for `R = ∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContinuousBar {
    birth: Rational,
    death: Option<Rational>,
}

impl ContinuousBar {
    pub fn new(birth: Rational, death: Option<Rational>) -> Result<Self> {
        if let Some(d) = &death {
            if *d <= birth {
                return Err(Error::Validation(format!(
                    "bar [{}, {}) is empty",
                    format_rational(&birth),
                    format_rational(d)
                )));
            }
        }
        Ok(Self { birth, death })
    }

    pub fn finite(birth: Rational, death: Rational) -> Result<Self> {
        Self::new(birth, Some(death))
    }

    pub fn birth(&self) -> &Rational {
        &self.birth
    }

    pub fn death(&self) -> Option<&Rational> {
        self.death.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.death.is_some()
    }

    fn contains(&self, x: &Rational) -> bool {
        self.birth <= *x && self.death.as_ref().is_none_or(|d| x < d)
    }

    /// `(R - r) / 2`.
    pub fn half_length(&self) -> Result<Rational> {
        let d = self.death.as_ref().ok_or(Error::InfiniteBar)?;
        Ok((d - &self.birth) / int(2))
    }
}

impl fmt::Display for ContinuousBar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.death {
            Some(d) => write!(f, "[{}, {})", format_rational(&self.birth), format_rational(d)),
            None => write!(f, "[{}, inf)", format_rational(&self.birth)),
        }
    }
}

/// Bars over the real line with multiplicities, in input order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContinuousBarcode {
    bars: Vec<(ContinuousBar, usize)>,
}

impl ContinuousBarcode {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bar: ContinuousBar, multiplicity: usize) {
        if multiplicity > 0 {
            self.bars.push((bar, multiplicity));
        }
    }

    pub fn entries(&self) -> &[(ContinuousBar, usize)] {
        &self.bars
    }

    pub fn expanded(&self) -> Vec<ContinuousBar> {
        self.bars
            .iter()
            .flat_map(|(b, m)| std::iter::repeat_n(b.clone(), *m))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bars.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Splits off bars with infinite death, returning the finite part and
    /// the number of infinite bars.
    pub fn split_infinite(&self) -> (ContinuousBarcode, usize) {
        let mut finite = ContinuousBarcode::new();
        let mut infinite = 0;
        for (b, m) in &self.bars {
            if b.is_finite() {
                finite.push(b.clone(), *m);
            } else {
                infinite += m;
            }
        }
        (finite, infinite)
    }
}

impl FromIterator<(ContinuousBar, usize)> for ContinuousBarcode {
    fn from_iter<T: IntoIterator<Item = (ContinuousBar, usize)>>(iter: T) -> Self {
        let mut out = ContinuousBarcode::new();
        for (b, m) in iter {
            out.push(b, m);
        }
        out
    }
}

/// `δ^X`: each bar `[r, R)` becomes the interval spanning `X ∩ [r, R)`.
pub fn restrict_delta(poset: &WeightedPoset, barcode: &ContinuousBarcode) -> Barcode {
    barcode
        .entries()
        .iter()
        .filter_map(|(bar, m)| {
            let inside: Vec<usize> = (0..poset.len()).filter(|&i| bar.contains(&poset.points()[i])).collect();
            Some((Interval::span(*inside.first()?, *inside.last()?), *m))
        })
        .collect()
}

/// Index in `y` of every point of `x`.
pub fn embedding(x: &WeightedPoset, y: &WeightedPoset) -> Result<Vec<usize>> {
    x.points().iter().map(|p| y.index_of(p).ok_or(Error::NotASubset)).collect()
}

/// For every point of `y`, the largest point of `x` not above it.
fn floor_map(x: &WeightedPoset, y: &WeightedPoset) -> Vec<Option<usize>> {
    y.points()
        .iter()
        .map(|p| x.points().partition_point(|q| q <= p).checked_sub(1))
        .collect()
}

fn inflate_bar(x: &WeightedPoset, y: &WeightedPoset, embed: &[usize], bar: Interval) -> Interval {
    let hi = match x.points().get(bar.hi() + 1) {
        Some(next) => y.points().partition_point(|q| q < next) - 1,
        None => y.len() - 1,
    };
    Interval::span(embed[bar.lo()], hi)
}

/// `j(X, Y)` on barcodes: `[a, b] ↦ [a, max(Y ∩ [b, b⁺))]`.
pub fn inflate_module(x: &WeightedPoset, y: &WeightedPoset, barcode: &Barcode) -> Result<Barcode> {
    let embed = embedding(x, y)?;
    barcode.check(x)?;
    Ok(barcode
        .entries()
        .iter()
        .map(|&(b, m)| (inflate_bar(x, y, &embed, b), m))
        .collect())
}

/// `Λ̄(y) = max(y, Λ(x_y))` with `x_y` the largest point of `X` below `y`.
pub fn inflate_translation(x: &WeightedPoset, y: &WeightedPoset, t: &Translation) -> Result<Translation> {
    let embed = embedding(x, y)?;
    if t.len() != x.len() {
        return Err(Error::ShapeMismatch("translation does not live on X".into()));
    }
    let image = floor_map(x, y)
        .into_iter()
        .enumerate()
        .map(|(j, below)| match below.map(|i| t.apply(PosetPoint::Finite(i))) {
            None => PosetPoint::Finite(j),
            Some(PosetPoint::Infinity) => PosetPoint::Infinity,
            Some(PosetPoint::Finite(k)) => PosetPoint::Finite(embed[k].max(j)),
        })
        .collect();
    Translation::new(y, image)
}

/// `j(X, Y)` on representations: vertex `y` carries the space at `x_y`.
pub fn inflate_rep(x: &WeightedPoset, y: &WeightedPoset, rep: &Rep) -> Result<Rep> {
    embedding(x, y)?;
    if rep.vertices() != x.len() {
        return Err(Error::ShapeMismatch("representation does not live on X".into()));
    }
    let below = floor_map(x, y);
    let dims = below.iter().map(|b| b.map_or(0, |i| rep.dims()[i])).collect();
    let maps = below
        .windows(2)
        .map(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => rep.structure_map(a, b),
            (None, b) => Matrix::zeros(b.map_or(0, |b| rep.dims()[b]), 0),
            (Some(_), None) => unreachable!("floor map is monotone"),
        })
        .collect();
    Rep::new(rep.field(), dims, maps)
}

/// `j(X, Y)` on morphisms: the component at `y` is the one at `x_y`.
pub fn inflate_morphism(x: &WeightedPoset, y: &WeightedPoset, f: &RepMorphism) -> Result<RepMorphism> {
    let source = inflate_rep(x, y, f.source())?;
    let target = inflate_rep(x, y, f.target())?;
    let components = floor_map(x, y)
        .into_iter()
        .map(|b| match b {
            Some(i) => f.components()[i].clone(),
            None => Matrix::zeros(0, 0),
        })
        .collect();
    RepMorphism::new(source, target, components)
}

/// `N₁`: the distinct positive distances between points.
pub fn pairwise_distances(points: &[Rational]) -> Vec<Rational> {
    let set: BTreeSet<Rational> = points
        .iter()
        .enumerate()
        .flat_map(|(i, a)| points[i + 1..].iter().map(move |b| (b - a).abs()))
        .collect();
    set.into_iter().collect()
}

/// `Y = X ∪ {x − ε : x ∈ X, ε ∈ N₁}`.
fn shift_seed(points: &[Rational], distances: &[Rational]) -> BTreeSet<Rational> {
    let mut y: BTreeSet<Rational> = points.iter().cloned().collect();
    for x in points {
        for e in distances {
            y.insert(x - e);
        }
    }
    y
}

/// The shift refinement `Sh(X)`, sorted ascending.
pub fn shift_refinement(points: &[Rational]) -> Result<Vec<Rational>> {
    shift_refinement_with_limit(points, SHIFT_LIMIT)
}

pub fn shift_refinement_with_limit(points: &[Rational], limit: usize) -> Result<Vec<Rational>> {
    let distances = pairwise_distances(points);
    let seed = shift_seed(points, &distances);
    if seed.len() > limit {
        return Err(Error::RefinementTooLarge { limit });
    }
    let mut z = seed.clone();
    for y in seed.iter().rev() {
        let Some(below) = z.range(..y).next_back().cloned() else {
            continue;
        };
        for e in &distances {
            z.insert(&below - e);
        }
        if z.len() > limit {
            return Err(Error::RefinementTooLarge { limit });
        }
    }
    Ok(z.into_iter().collect())
}

/// Whether `q⁻¹ − ε ∈ Sh` for every `q ∈ Y` with a predecessor in `Sh` and
/// every `ε ∈ N₁`.
pub fn shift_property_holds(points: &[Rational], refinement: &[Rational]) -> bool {
    let distances = pairwise_distances(points);
    let sh: BTreeSet<Rational> = refinement.iter().cloned().collect();
    shift_seed(points, &distances).iter().all(|q| {
        let Some(prev) = sh.range(..q).next_back() else {
            return true;
        };
        distances.iter().all(|e| sh.contains(&(prev - e)))
    })
}

/// `P_{Sh(X)}`; the suspension point stays where it is on `P_X`.
pub fn shift_poset(x: &WeightedPoset) -> Result<WeightedPoset> {
    WeightedPoset::new(shift_refinement(x.points())?, x.weight().clone())
}

/// Bottleneck distance over `P_{Sh(X)}` between the inflations of two
/// barcodes on `P_X`.
pub fn shifted_distance(x: &WeightedPoset, left: &Barcode, right: &Barcode) -> Result<Rational> {
    let sh = shift_poset(x)?;
    shifted_distance_on(x, &sh, left, right)
}

fn shifted_distance_on(x: &WeightedPoset, sh: &WeightedPoset, left: &Barcode, right: &Barcode) -> Result<Rational> {
    let l = inflate_module(x, sh, left)?;
    let r = inflate_module(x, sh, right)?;
    Ok(bottleneck_distance(sh, &l, &r).0)
}

/// A pair `x_i < x_l` (0-based) at which the regularity conditions fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegularityWitness {
    pub i: usize,
    pub l: usize,
    /// `Λ(x_{i−1}) > x_{i−1}`; false when `x_i` is the first point.
    pub condition_c: bool,
}

impl fmt::Display for RegularityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i={} l={}", self.i + 1, self.l + 1)
    }
}

/// Every pair at which `X` fails to be regular, in order of `(i, l)`.
/// Conditions that refer to points past the end of `X` count as satisfied.
pub fn irregular_witnesses(poset: &WeightedPoset) -> Vec<RegularityWitness> {
    let x = poset.points();
    let n = x.len();
    let mut out = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let gap = &x[i + 1] - &x[i];
        for l in i + 1..n {
            if l + 2 >= n || &x[l + 2] - &x[l] > gap {
                continue;
            }
            let eps = &x[l] - &x[i];
            let t = (2..n - l).take_while(|&t| &x[l + t] - &x[l] <= gap).last().expect("t >= 2");
            let lam = poset.maximal_translation(&eps);
            let ii = match lam.apply(PosetPoint::Finite(l + 1)) {
                PosetPoint::Infinity => true,
                PosetPoint::Finite(k) => k + 1 >= n || x[k + 1] > &x[l + t] + &eps,
            };
            if ii {
                continue;
            }
            let condition_c = i >= 1 && lam.apply(PosetPoint::Finite(i - 1)) > PosetPoint::Finite(i - 1);
            out.push(RegularityWitness { i, l, condition_c });
        }
    }
    out
}

/// The first irregularity, or `None` when `X` is regular.
pub fn first_irregularity(poset: &WeightedPoset) -> Option<RegularityWitness> {
    irregular_witnesses(poset).into_iter().next()
}

pub fn is_regular(poset: &WeightedPoset) -> bool {
    first_irregularity(poset).is_none()
}

/// An interleaving between `A` and `C ⊕ D` whose induced matching is
/// taller than the interleaving.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub a: Interval,
    pub c: Interval,
    pub d: Interval,
    pub eps: Rational,
    pub translation: Translation,
    pub i: Rep,
    pub m: Rep,
    pub phi: RepMorphism,
    pub psi: RepMorphism,
    /// Induced matching of the triangle starting at `A`, indexed by `[A]`
    /// and `[C, D]`.
    pub matching: MatchingRecord,
    pub matching_height: Rational,
}

/// Builds `A = [x_i, Λx_{l+1}]`, `C = [x_i, x_l]`, `D = [x_l, x_{l+t'}]`
/// with `φ = Φ_{A,DΛ}`, `ψ = Φ_{D,AΛ}` and checks the claims about them.
pub fn counterexample_from_irregularity(poset: &WeightedPoset, w: RegularityWitness) -> Result<Counterexample> {
    let invalid = |msg: &str| Error::InvalidWitness(format!("{w}: {msg}"));
    let x = poset.points();
    let n = x.len();
    if !(w.i < w.l && w.l + 2 < n) {
        return Err(invalid("indices out of range"));
    }
    if !irregular_witnesses(poset).contains(&w) {
        return Err(invalid("X is regular there"));
    }
    if !w.condition_c {
        return Err(invalid("condition (c) fails"));
    }
    let (i, l) = (w.i, w.l);
    let eps = &x[l] - &x[i];
    let lam = poset.maximal_translation(&eps);
    let gap = &x[i + 1] - &x[i];
    let t = (2..n - l).take_while(|&t| &x[l + t] - &x[l] <= gap).last().expect("t >= 2");
    let target = lam.apply(PosetPoint::Finite(l + 1));
    let top = target.finite().ok_or_else(|| invalid("Λ(x_{l+1}) is the suspension point"))?;
    let t_prime = (1..t).rfind(|&s| lam.apply(PosetPoint::Finite(l + s)) == target)
        .ok_or_else(|| invalid("no admissible t'"))?;

    let a = Interval::span(i, top);
    let c = Interval::span(i, l);
    let d = Interval::span(l, l + t_prime);
    let field = PrimeField::TWO;
    let ib = [a];
    let mb = [c, d];
    let rep_i = Rep::from_bars(field, n, &ib);
    let rep_m = Rep::from_bars(field, n, &mb);
    let a_t: Vec<Interval> = ib.iter().filter_map(|&b| act(poset, b, &lam)).collect();
    let m_t: Vec<Interval> = mb.iter().filter_map(|&b| act(poset, b, &lam)).collect();
    let d_t = m_t
        .iter()
        .position(|&b| Some(b) == act(poset, d, &lam))
        .ok_or_else(|| invalid("D vanishes under Λ"))?;
    if a_t.is_empty() {
        return Err(invalid("A vanishes under Λ"));
    }
    let phi = morphism_from_generators(&rep_i, &act_rep(&rep_m, &lam)?, &ib, &m_t, &[(0, d_t, 1)])
        .map_err(|_| invalid("Φ_{A,DΛ} is zero"))?;
    let psi = morphism_from_generators(&rep_m, &act_rep(&rep_i, &lam)?, &mb, &a_t, &[(1, 0, 1)])
        .map_err(|_| invalid("Φ_{D,AΛ} is zero"))?;
    let matching = induced_matching_triangle(poset, &rep_i, &rep_m, &phi, &psi, &lam)?;
    let height = matching_height(poset, &matching, &ib, &mb);
    if height <= eps {
        return Err(invalid("induced matching is not taller than the interleaving"));
    }
    Ok(Counterexample {
        a,
        c,
        d,
        eps,
        translation: lam,
        i: rep_i,
        m: rep_m,
        phi,
        psi,
        matching,
        matching_height: height,
    })
}

/// Bottleneck distance between barcodes over the real line, with pair cost
/// `min(max(W(σ), W(τ)), max(|r − s|, |R − S|))` and unmatched cost
/// `W(σ) = (R − r)/2`.
pub fn classical_distance(left: &ContinuousBarcode, right: &ContinuousBarcode) -> Result<Rational> {
    let l = left.expanded();
    let r = right.expanded();
    let wl = l.iter().map(ContinuousBar::half_length).collect::<Result<Vec<_>>>()?;
    let wr = r.iter().map(ContinuousBar::half_length).collect::<Result<Vec<_>>>()?;
    let pair = l
        .iter()
        .zip(&wl)
        .map(|(a, wa)| {
            r.iter()
                .zip(&wr)
                .map(|(b, wb)| {
                    let ends = (a.birth() - b.birth())
                        .abs()
                        .max((a.death().unwrap() - b.death().unwrap()).abs());
                    wa.clone().max(wb.clone()).min(ends)
                })
                .collect()
        })
        .collect();
    let costs = BottleneckCosts {
        left: wl,
        right: wr,
        pair,
    };
    Ok(costs.solve().0)
}

/// An increasing chain of finite refinements of a base set `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementSchedule {
    base: Vec<Rational>,
    steps: Vec<Vec<Rational>>,
}

impl RefinementSchedule {
    pub fn new(base: Vec<Rational>, steps: Vec<Vec<Rational>>) -> Result<Self> {
        let sorted = |v: &[Rational]| v.windows(2).all(|w| w[0] < w[1]);
        if base.is_empty() || !sorted(&base) || !steps.iter().all(|s| sorted(s)) {
            return Err(Error::Validation("refinement steps must be nonempty sorted sets".into()));
        }
        let mut prev: &[Rational] = &base;
        for s in &steps {
            if !prev.iter().all(|p| s.binary_search(p).is_ok()) {
                return Err(Error::NotASubset);
            }
            prev = s;
        }
        Ok(Self { base, steps })
    }

    /// `L`, then `L` with the midpoint of every pair of its points, then
    /// `halvings − 1` rounds inserting the midpoint of every gap.
    pub fn halving(base: Vec<Rational>, halvings: usize) -> Result<Self> {
        let base: Vec<Rational> = base.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let mut steps = vec![base.clone()];
        if halvings >= 1 {
            let mut first: BTreeSet<Rational> = base.iter().cloned().collect();
            for (i, a) in base.iter().enumerate() {
                for b in &base[i + 1..] {
                    first.insert((a + b) / int(2));
                }
            }
            steps.push(first.into_iter().collect());
        }
        for _ in 1..halvings {
            let prev = steps.last().unwrap();
            let mut next: BTreeSet<Rational> = prev.iter().cloned().collect();
            for w in prev.windows(2) {
                next.insert((&w[0] + &w[1]) / int(2));
            }
            steps.push(next.into_iter().collect());
        }
        Self::new(base, steps)
    }

    pub fn base(&self) -> &[Rational] {
        &self.base
    }

    pub fn steps(&self) -> &[Vec<Rational>] {
        &self.steps
    }
}

/// Largest gap between consecutive points.
pub fn mesh(points: &[Rational]) -> Rational {
    points
        .windows(2)
        .map(|w| &w[1] - &w[0])
        .max()
        .unwrap_or_else(|| int(0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitRow {
    pub step: usize,
    pub size: usize,
    pub mesh: Rational,
    /// `None` when `Sh(X)` outgrows the size guard.
    pub lower: Option<Rational>,
    pub upper: Rational,
    pub classical: Rational,
}

/// For every step `X`: the shifted distance (lower) and the bottleneck
/// distance over `P_X` (upper) of the restrictions, next to the classical
/// distance.
pub fn limit_experiment(
    left: &ContinuousBarcode,
    right: &ContinuousBarcode,
    schedule: &RefinementSchedule,
    weight: &Rational,
) -> Result<Vec<LimitRow>> {
    for (bar, _) in left.entries().iter().chain(right.entries()) {
        let death = bar.death().ok_or(Error::InfiniteBar)?;
        for e in [bar.birth(), death] {
            if schedule.base.binary_search(e).is_err() {
                return Err(Error::EndpointNotInL(format_rational(e)));
            }
        }
    }
    let classical = classical_distance(left, right)?;
    schedule
        .steps
        .par_iter()
        .enumerate()
        .map(|(step, points)| {
            let x = WeightedPoset::new(points.clone(), weight.clone())?;
            let bl = restrict_delta(&x, left);
            let br = restrict_delta(&x, right);
            let upper = bottleneck_distance(&x, &bl, &br).0;
            let lower = match shift_poset(&x) {
                Ok(sh) => Some(shifted_distance_on(&x, &sh, &bl, &br)?),
                Err(Error::RefinementTooLarge { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(LimitRow {
                step,
                size: points.len(),
                mesh: mesh(points),
                lower,
                upper,
                classical: classical.clone(),
            })
        })
        .collect()
}

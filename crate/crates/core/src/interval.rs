//! Convex (interval) modules, barcodes, and the closed forms that govern
//! them: Hom dimensions, the translation action, widths, trims and the
//! pairwise interleaving distance.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::poset::{PosetPoint, Translation, WeightedPoset};
use crate::rational::Rational;

/// The convex module supported on `[x_lo, x_hi]`, stored by point index.
///
/// A zero module is never an `Interval`; operations that can annihilate a
/// module return `Option<Interval>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    lo: usize,
    hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(Error::Validation(format!("interval [{lo}, {hi}] is empty")));
        }
        Ok(Self { lo, hi })
    }

    pub(crate) fn span(lo: usize, hi: usize) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn lo(self) -> usize {
        self.lo
    }

    pub fn hi(self) -> usize {
        self.hi
    }

    pub fn contains(self, i: usize) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn check(self, poset: &WeightedPoset) -> Result<Self> {
        if self.hi >= poset.len() {
            return Err(Error::Validation(format!(
                "interval [{}, {}] exceeds a poset of {} points",
                self.lo,
                self.hi,
                poset.len()
            )));
        }
        Ok(self)
    }

    fn contains_point(self, p: PosetPoint) -> bool {
        p.finite().is_some_and(|i| self.contains(i))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A multiset of intervals.
///
/// Stored merged and sorted; [`Barcode::expanded`] lists every copy in that
/// canonical order, which is the indexing used by matchings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Barcode {
    bars: Vec<(Interval, usize)>,
}

impl Barcode {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bars<I: IntoIterator<Item = Interval>>(bars: I) -> Self {
        bars.into_iter().map(|b| (b, 1)).collect()
    }

    pub fn insert(&mut self, bar: Interval, multiplicity: usize) {
        if multiplicity == 0 {
            return;
        }
        match self.bars.binary_search_by_key(&bar, |(b, _)| *b) {
            Ok(i) => self.bars[i].1 += multiplicity,
            Err(i) => self.bars.insert(i, (bar, multiplicity)),
        }
    }

    /// Distinct bars with multiplicities, sorted.
    pub fn entries(&self) -> &[(Interval, usize)] {
        &self.bars
    }

    pub fn expanded(&self) -> Vec<Interval> {
        self.bars
            .iter()
            .flat_map(|&(b, m)| std::iter::repeat_n(b, m))
            .collect()
    }

    /// Total number of bars counted with multiplicity.
    pub fn len(&self) -> usize {
        self.bars.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn check(&self, poset: &WeightedPoset) -> Result<()> {
        self.bars.iter().try_for_each(|(b, _)| b.check(poset).map(|_| ()))
    }
}

impl FromIterator<(Interval, usize)> for Barcode {
    fn from_iter<T: IntoIterator<Item = (Interval, usize)>>(iter: T) -> Self {
        let mut merged = BTreeMap::new();
        for (bar, m) in iter {
            if m > 0 {
                *merged.entry(bar).or_insert(0) += m;
            }
        }
        Self {
            bars: merged.into_iter().collect(),
        }
    }
}

/// `dim Hom(I, J)`, which is 1 exactly when `lo(J) <= lo(I) <= hi(J) <= hi(I)`.
pub fn hom_dim(source: Interval, target: Interval) -> u8 {
    u8::from(target.lo <= source.lo && source.lo <= target.hi && target.hi <= source.hi)
}

/// The canonical generator of `Hom(source, target)`: the characteristic
/// function of its carrier `[lo(source), hi(target)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorDescriptor {
    pub source: Interval,
    pub target: Interval,
    pub carrier: Option<Interval>,
}

pub fn generator(source: Interval, target: Interval) -> GeneratorDescriptor {
    let carrier = (hom_dim(source, target) == 1).then_some(Interval {
        lo: source.lo,
        hi: target.hi,
    });
    GeneratorDescriptor {
        source,
        target,
        carrier,
    }
}

/// `I · Λ`, supported on `{p : Λp ∈ I}`.
pub fn act(poset: &WeightedPoset, bar: Interval, t: &Translation) -> Option<Interval> {
    let mut lo = None;
    let mut hi = None;
    for i in 0..poset.len() {
        if bar.contains_point(t.apply(PosetPoint::Finite(i))) {
            lo.get_or_insert(i);
            hi = Some(i);
        }
    }
    Some(Interval { lo: lo?, hi: hi? })
}

/// Summand-wise action, dropping the bars that vanish.
pub fn act_barcode(poset: &WeightedPoset, barcode: &Barcode, t: &Translation) -> Barcode {
    barcode
        .entries()
        .iter()
        .filter_map(|&(b, m)| act(poset, b, t).map(|s| (s, m)))
        .collect()
}

/// Width of a convex module: the least `ε` with `Hom(I, I Λ_ε²) = 0`.
///
/// `Λ_ε²(lo) > hi` holds exactly when some vertex `q` between `lo` and the
/// successor of `hi` is within `ε` of both, so the width is the smallest
/// two-hop detour `max(d(lo, q), d(q, hi⁺))`.
pub fn width(poset: &WeightedPoset, bar: Interval) -> Rational {
    let start = PosetPoint::Finite(bar.lo);
    let exit = poset.successor(PosetPoint::Finite(bar.hi));
    (bar.lo..=poset.slot(exit))
        .map(|s| {
            let q = poset.vertex(s);
            poset.distance(start, q).max(poset.distance(q, exit))
        })
        .min()
        .expect("interval is nonempty")
}

/// Width variants computed straight from their definitions. These scan
/// every translation and are intended as oracles on small posets.
pub mod variants {
    use super::*;

    /// All translations of a poset with their heights.
    pub struct TranslationCatalog {
        pub translations: Vec<Translation>,
        pub heights: Vec<Rational>,
    }

    impl TranslationCatalog {
        pub fn new(poset: &WeightedPoset) -> Self {
            let translations = poset.all_translations();
            let heights = translations.iter().map(|t| poset.height(t)).collect();
            Self {
                translations,
                heights,
            }
        }
    }

    fn kills(poset: &WeightedPoset, bar: Interval, t: &Translation) -> bool {
        act(poset, bar, t).map_or(0, |j| hom_dim(bar, j)) == 0
    }

    /// `min{ε : Hom(I, I Λ_ε²) = 0}` over the candidate heights.
    pub fn width_maximal(poset: &WeightedPoset, bar: Interval) -> Rational {
        poset
            .candidate_heights()
            .into_iter()
            .find(|eps| kills(poset, bar, &poset.maximal_translation(eps).square()))
            .expect("the largest candidate height sends everything to the suspension point")
    }

    /// `min{h(Λ) : Hom(I, I Λ²) = 0}` over all translations.
    pub fn width_square(poset: &WeightedPoset, bar: Interval, catalog: &TranslationCatalog) -> Rational {
        catalog
            .translations
            .iter()
            .zip(&catalog.heights)
            .filter(|(t, _)| kills(poset, bar, &t.square()))
            .map(|(_, h)| h.clone())
            .min()
            .expect("the top translation kills every interval")
    }

    /// `min{max(h(Λ), h(Γ)) : Hom(I, I·(Λ∘Γ)) = 0}` over all pairs.
    ///
    /// `Hom(I, I·T)` vanishes exactly when `lo ∉ I·T`, i.e. `T(lo) > hi`, so
    /// a pair only interacts through the vertex `q = Γ(lo)`: minimise the
    /// height of `Γ` reaching `q` and of `Λ` pushing `q` past `hi`
    /// separately, then combine over `q`.
    pub fn width_pair(poset: &WeightedPoset, bar: Interval, catalog: &TranslationCatalog) -> Rational {
        let slots = poset.len() + 1;
        let start = PosetPoint::Finite(bar.lo);
        let exits = |q: PosetPoint| q > PosetPoint::Finite(bar.hi);
        let mut reach: Vec<Option<&Rational>> = vec![None; slots];
        let mut push: Vec<Option<&Rational>> = vec![None; slots];
        for (t, h) in catalog.translations.iter().zip(&catalog.heights) {
            let mid = poset.slot(t.apply(start));
            if reach[mid].is_none_or(|m| h < m) {
                reach[mid] = Some(h);
            }
            for (s, best) in push.iter_mut().enumerate() {
                if exits(t.apply(poset.vertex(s))) && best.is_none_or(|m| h < m) {
                    *best = Some(h);
                }
            }
        }
        reach
            .into_iter()
            .zip(push)
            .filter_map(|(a, b)| Some(a?.max(b?).clone()))
            .min()
            .expect("some pair kills the interval")
    }
}

/// Closed-form interleaving distance between two convex modules:
/// `min{ max(W(I), W(M)), max(d(u, z), d(U⁺, Z⁺)) }`.
pub fn pairwise_distance(poset: &WeightedPoset, a: Interval, b: Interval) -> Rational {
    let widths = width(poset, a).max(width(poset, b));
    let shift = endpoint_distance(poset, a, b);
    widths.min(shift)
}

/// `max(d(u, z), d(U⁺, Z⁺))`, the cost of matching the endpoints directly.
pub fn endpoint_distance(poset: &WeightedPoset, a: Interval, b: Interval) -> Rational {
    let lower = poset.distance(PosetPoint::Finite(a.lo), PosetPoint::Finite(b.lo));
    let upper = poset.distance(
        poset.successor(PosetPoint::Finite(a.hi)),
        poset.successor(PosetPoint::Finite(b.hi)),
    );
    lower.max(upper)
}

/// `I^{-Λ²}`: the image of the internal map `I → IΛ²`, `[u, U₀]` with `U₀`
/// maximal such that `Λ²U₀ <= hi`.
pub fn trim_quotient(poset: &WeightedPoset, bar: Interval, t: &Translation) -> Option<Interval> {
    let sq = t.square();
    let top = (bar.lo..=bar.hi)
        .take_while(|&i| bar.contains_point(sq.apply(PosetPoint::Finite(i))))
        .last()?;
    let _ = poset;
    Some(Interval {
        lo: bar.lo,
        hi: top,
    })
}

/// `M^{+Λ²}Λ`: the part of `M` above `Λ²(lo)`, pulled back along `Λ`. Its
/// lower endpoint is the least `v₀` with `Λv₀ >= Λ²(lo)` and its upper
/// endpoint is that of `MΛ`.
pub fn trim_submodule(poset: &WeightedPoset, bar: Interval, t: &Translation) -> Option<Interval> {
    let start = t.square().apply(PosetPoint::Finite(bar.lo)).finite()?;
    if start > bar.hi {
        return None;
    }
    act(poset, Interval { lo: start, hi: bar.hi }, t)
}

/// Successor of a finite point in the suspended poset.
pub fn successor(poset: &WeightedPoset, q: PosetPoint) -> PosetPoint {
    poset.successor(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn sample() -> WeightedPoset {
        WeightedPoset::new([0, 1, 3, 4, 5, 7].map(int).to_vec(), int(10)).unwrap()
    }

    /// Interval by coordinates on the sample poset.
    fn iv(p: &WeightedPoset, lo: i64, hi: i64) -> Interval {
        Interval::new(p.index_of(&int(lo)).unwrap(), p.index_of(&int(hi)).unwrap()).unwrap()
    }

    #[test]
    fn hom_examples() {
        let p = sample();
        assert_eq!(hom_dim(iv(&p, 3, 4), iv(&p, 0, 4)), 1);
        assert_eq!(hom_dim(iv(&p, 1, 3), iv(&p, 0, 4)), 0);
        assert_eq!(hom_dim(iv(&p, 1, 3), iv(&p, 1, 3)), 1);
    }

    #[test]
    fn generator_examples() {
        let p = sample();
        assert_eq!(generator(iv(&p, 3, 4), iv(&p, 0, 4)).carrier, Some(iv(&p, 3, 4)));
        assert_eq!(generator(iv(&p, 1, 3), iv(&p, 0, 4)).carrier, None);
        let i = iv(&p, 1, 5);
        assert_eq!(generator(i, i).carrier, Some(i));
    }

    #[test]
    fn act_examples() {
        let p = sample();
        let l2 = p.maximal_translation(&int(2));
        assert_eq!(act(&p, iv(&p, 1, 5), &l2), Some(iv(&p, 0, 4)));
        assert_eq!(act(&p, iv(&p, 3, 4), &l2), Some(iv(&p, 1, 1)));
        let i = iv(&p, 3, 5);
        assert_eq!(act(&p, i, &Translation::identity(&p)), Some(i));
        // everything above 5 leaves the poset under a huge translation
        let top = p.maximal_translation(&int(100));
        assert_eq!(act(&p, iv(&p, 0, 7), &top), None);
    }

    #[test]
    fn act_barcode_examples() {
        let p = sample();
        let l2 = p.maximal_translation(&int(2));
        let b = Barcode::from_bars([iv(&p, 1, 5), iv(&p, 3, 4)]);
        assert_eq!(
            act_barcode(&p, &b, &l2),
            Barcode::from_bars([iv(&p, 0, 4), iv(&p, 1, 1)])
        );
        assert!(act_barcode(&p, &Barcode::new(), &l2).is_empty());
        assert_eq!(act_barcode(&p, &b, &Translation::identity(&p)), b);
    }

    #[test]
    fn width_examples() {
        let p = sample();
        assert_eq!(width(&p, iv(&p, 1, 5)), int(3));
        assert_eq!(width(&p, iv(&p, 3, 4)), int(1));
        assert_eq!(width(&p, iv(&p, 1, 3)), int(2));
        // a bar touching the top point exits through the suspension edge
        assert_eq!(width(&p, iv(&p, 7, 7)), int(10));
    }

    #[test]
    fn successor_examples() {
        let p = WeightedPoset::new([0, 1, 3].map(int).to_vec(), int(1)).unwrap();
        assert_eq!(successor(&p, PosetPoint::Finite(1)), PosetPoint::Finite(2));
        assert_eq!(successor(&p, PosetPoint::Finite(2)), PosetPoint::Infinity);
        let q = sample();
        assert_eq!(successor(&q, PosetPoint::Finite(4)), PosetPoint::Finite(5));
    }

    #[test]
    fn pairwise_examples() {
        let p = sample();
        assert_eq!(pairwise_distance(&p, iv(&p, 1, 5), iv(&p, 3, 4)), int(2));
        assert_eq!(pairwise_distance(&p, iv(&p, 1, 5), iv(&p, 1, 3)), int(3));
        assert_eq!(pairwise_distance(&p, iv(&p, 4, 5), iv(&p, 4, 5)), int(0));
    }

    #[test]
    fn trim_examples() {
        let p = sample();
        let l2 = p.maximal_translation(&int(2));
        let id = Translation::identity(&p);
        assert_eq!(trim_quotient(&p, iv(&p, 1, 5), &l2), Some(iv(&p, 1, 1)));
        assert_eq!(trim_quotient(&p, iv(&p, 3, 4), &l2), None);
        assert_eq!(trim_quotient(&p, iv(&p, 1, 4), &id), Some(iv(&p, 1, 4)));

        // Λ₂²(1) = 5, so M^{+Λ²} = [5, 5] and its pullback is {p : Λ₂p = 5} = [3, 4]
        assert_eq!(trim_submodule(&p, iv(&p, 1, 5), &l2), Some(iv(&p, 3, 4)));
        assert_eq!(trim_submodule(&p, iv(&p, 3, 4), &l2), None);
        assert_eq!(trim_submodule(&p, iv(&p, 1, 4), &id), Some(iv(&p, 1, 4)));
    }

    #[test]
    fn barcode_multiset() {
        let p = sample();
        let mut b = Barcode::new();
        b.insert(iv(&p, 1, 5), 2);
        b.insert(iv(&p, 0, 1), 1);
        b.insert(iv(&p, 1, 5), 1);
        assert_eq!(b.len(), 4);
        assert_eq!(b.entries(), &[(iv(&p, 0, 1), 1), (iv(&p, 1, 5), 3)]);
        assert_eq!(b.expanded().len(), 4);
        assert!(Interval::new(3, 2).is_err());
    }
}

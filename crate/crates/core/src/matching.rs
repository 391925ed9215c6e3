//! ε-matchings between barcodes, the bottleneck distance, and matchings
//! induced by interleaving triangles.

use std::cmp::Reverse;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::interval::{act, pairwise_distance, width, Barcode, Interval};
use crate::poset::{Translation, WeightedPoset};
use crate::quiver::{decompose, image, is_interleaving, Rep, RepMorphism};
use crate::rational::{format_rational, Rational};

/// A partial bijection between two indexed (expanded) barcodes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchingRecord {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_left: Vec<usize>,
    pub unmatched_right: Vec<usize>,
}

impl MatchingRecord {
    /// Completes `pairs` with the unmatched indices of lists of the given sizes.
    pub fn from_pairs(mut pairs: Vec<(usize, usize)>, left: usize, right: usize) -> Self {
        pairs.sort_unstable();
        let mut used_l = vec![false; left];
        let mut used_r = vec![false; right];
        for &(a, b) in &pairs {
            used_l[a] = true;
            used_r[b] = true;
        }
        Self {
            pairs,
            unmatched_left: (0..left).filter(|&a| !used_l[a]).collect(),
            unmatched_right: (0..right).filter(|&b| !used_r[b]).collect(),
        }
    }

    pub fn identity(size: usize) -> Self {
        Self::from_pairs((0..size).map(|i| (i, i)).collect(), size, size)
    }

    /// Checks that every index of both lists appears exactly once.
    pub fn is_valid(&self, left: usize, right: usize) -> bool {
        let mut seen_l = vec![0u8; left];
        let mut seen_r = vec![0u8; right];
        let l = self.pairs.iter().map(|p| p.0).chain(self.unmatched_left.iter().copied());
        let r = self.pairs.iter().map(|p| p.1).chain(self.unmatched_right.iter().copied());
        for a in l {
            match seen_l.get_mut(a) {
                Some(s) => *s += 1,
                None => return false,
            }
        }
        for b in r {
            match seen_r.get_mut(b) {
                Some(s) => *s += 1,
                None => return false,
            }
        }
        seen_l.iter().chain(&seen_r).all(|&s| s == 1)
    }

    /// `other ∘ self`, matching left of `self` to right of `other`.
    pub fn then(&self, other: &MatchingRecord, left: usize, right: usize) -> MatchingRecord {
        let pairs = self
            .pairs
            .iter()
            .filter_map(|&(a, m)| other.pairs.iter().find(|p| p.0 == m).map(|&(_, b)| (a, b)))
            .collect();
        MatchingRecord::from_pairs(pairs, left, right)
    }
}

/// The least `ε` for which `m` is an ε-matching.
pub fn matching_height(poset: &WeightedPoset, m: &MatchingRecord, left: &[Interval], right: &[Interval]) -> Rational {
    let zero = Rational::from_integer(0.into());
    let pairs = m.pairs.iter().map(|&(a, b)| pairwise_distance(poset, left[a], right[b]));
    let lonely_l = m.unmatched_left.iter().map(|&a| width(poset, left[a]));
    let lonely_r = m.unmatched_right.iter().map(|&b| width(poset, right[b]));
    pairs.chain(lonely_l).chain(lonely_r).fold(zero, |acc, x| acc.max(x))
}

pub fn is_eps_matching(
    poset: &WeightedPoset,
    m: &MatchingRecord,
    left: &[Interval],
    right: &[Interval],
    eps: &Rational,
) -> bool {
    m.is_valid(left.len(), right.len()) && matching_height(poset, m, left, right) <= *eps
}

/// Costs for a bottleneck problem: a cost for leaving each bar unmatched
/// and a cost for each pair.
pub struct BottleneckCosts {
    pub left: Vec<Rational>,
    pub right: Vec<Rational>,
    /// `pair[a][b]`
    pub pair: Vec<Vec<Rational>>,
}

impl BottleneckCosts {
    fn candidates(&self) -> Vec<Rational> {
        let mut all: Vec<Rational> = self
            .left
            .iter()
            .chain(&self.right)
            .chain(self.pair.iter().flatten())
            .cloned()
            .collect();
        all.push(Rational::from_integer(0.into()));
        all.sort();
        all.dedup();
        all
    }

    /// A perfect matching of the graph augmented with one diagonal copy per
    /// bar, if one exists using only edges of cost at most `eps`.
    fn feasible(&self, eps: &Rational) -> Option<MatchingRecord> {
        let (n, m) = (self.left.len(), self.right.len());
        // Left side: 0..n are left bars, n..n+m are diagonal copies of right bars.
        // Right side: 0..m are right bars, m..m+n are diagonal copies of left bars.
        let adjacency: Vec<Vec<usize>> = (0..n + m)
            .map(|u| {
                if u < n {
                    let mut out: Vec<usize> = (0..m).filter(|&b| self.pair[u][b] <= *eps).collect();
                    if self.left[u] <= *eps {
                        out.push(m + u);
                    }
                    out
                } else {
                    let b = u - n;
                    let mut out = Vec::new();
                    if self.right[b] <= *eps {
                        out.push(b);
                    }
                    out.extend(m..m + n);
                    out
                }
            })
            .collect();
        let mate = perfect_matching(&adjacency, n + m)?;
        let pairs = (0..n).filter(|&a| mate[a] < m).map(|a| (a, mate[a])).collect();
        Some(MatchingRecord::from_pairs(pairs, n, m))
    }

    /// Minimal bottleneck value with a witness matching.
    pub fn solve(&self) -> (Rational, MatchingRecord) {
        let candidates = self.candidates();
        // Feasibility is monotone in ε, so binary search the sorted candidates.
        let (mut lo, mut hi) = (0usize, candidates.len() - 1);
        let mut best = self
            .feasible(&candidates[hi])
            .expect("leaving every bar unmatched is feasible at the largest cost");
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.feasible(&candidates[mid]) {
                Some(m) => {
                    best = m;
                    hi = mid;
                }
                None => lo = mid + 1,
            }
        }
        (candidates[hi].clone(), best)
    }

    /// Bottleneck cost of a given matching.
    pub fn height(&self, m: &MatchingRecord) -> Rational {
        let zero = Rational::from_integer(0.into());
        m.pairs
            .iter()
            .map(|&(a, b)| &self.pair[a][b])
            .chain(m.unmatched_left.iter().map(|&a| &self.left[a]))
            .chain(m.unmatched_right.iter().map(|&b| &self.right[b]))
            .fold(zero, |acc, x| acc.max(x.clone()))
    }
}

/// Kuhn's augmenting-path algorithm; `adjacency[u]` lists the right
/// vertices of left vertex `u`. Returns the right mate of every left vertex
/// if the matching is perfect.
fn perfect_matching(adjacency: &[Vec<usize>], right: usize) -> Option<Vec<usize>> {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none_or(|w| augment(w, adj, seen, owner)) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; right];
    for u in 0..adjacency.len() {
        let mut seen = vec![false; right];
        if !augment(u, adjacency, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut mate = vec![usize::MAX; adjacency.len()];
    for (v, u) in owner.iter().enumerate() {
        if let Some(u) = u {
            mate[*u] = v;
        }
    }
    Some(mate)
}

/// Bottleneck distance between two barcodes on the same poset, with a
/// witness over their expanded lists.
pub fn bottleneck_distance(poset: &WeightedPoset, left: &Barcode, right: &Barcode) -> (Rational, MatchingRecord) {
    bottleneck_between(poset, &left.expanded(), &right.expanded())
}

pub fn bottleneck_between(poset: &WeightedPoset, left: &[Interval], right: &[Interval]) -> (Rational, MatchingRecord) {
    let costs = BottleneckCosts {
        left: left.iter().map(|&b| width(poset, b)).collect(),
        right: right.iter().map(|&b| width(poset, b)).collect(),
        pair: left
            .iter()
            .map(|&a| right.iter().map(|&b| pairwise_distance(poset, a, b)).collect())
            .collect(),
    };
    costs.solve()
}

/// Bars sharing an endpoint, in the order used by canonical injections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedGroup {
    pub endpoint: usize,
    /// `(bar, index into the input list)`
    pub members: Vec<(Interval, usize)>,
}

/// Bars with lower endpoint `x`, by reverse inclusion (descending upper
/// endpoint), isomorphic copies by input position.
pub fn enumerate_lower(bars: &[Interval], x: usize) -> EnumeratedGroup {
    let ranks: Vec<usize> = (0..bars.len()).collect();
    group_lower(bars, &ranks, x)
}

/// Bars with upper endpoint `y`, by reverse inclusion (ascending lower
/// endpoint), isomorphic copies by input position.
pub fn enumerate_upper(bars: &[Interval], y: usize) -> EnumeratedGroup {
    let ranks: Vec<usize> = (0..bars.len()).collect();
    group_upper(bars, &ranks, y)
}

fn group_lower(bars: &[Interval], ranks: &[usize], x: usize) -> EnumeratedGroup {
    let mut members: Vec<(Interval, usize)> = (0..bars.len())
        .filter(|&k| bars[k].lo() == x)
        .map(|k| (bars[k], k))
        .collect();
    members.sort_by_key(|&(b, k)| (Reverse(b.hi()), ranks[k], k));
    EnumeratedGroup { endpoint: x, members }
}

fn group_upper(bars: &[Interval], ranks: &[usize], y: usize) -> EnumeratedGroup {
    let mut members: Vec<(Interval, usize)> = (0..bars.len())
        .filter(|&k| bars[k].hi() == y)
        .map(|k| (bars[k], k))
        .collect();
    members.sort_by_key(|&(b, k)| (b.lo(), ranks[k], k));
    EnumeratedGroup { endpoint: y, members }
}

fn endpoints(bars: &[Interval], key: fn(Interval) -> usize) -> Vec<usize> {
    let mut out: Vec<usize> = bars.iter().map(|&b| key(b)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Disjoint union of canonical injections from `small`'s groups into
/// `large`'s groups. Pairs are `(small index, large index)`.
fn canonical_injections(
    poset: &WeightedPoset,
    small: (&[Interval], &[usize]),
    large: (&[Interval], &[usize]),
    by_lower: bool,
) -> Result<MatchingRecord> {
    let group = if by_lower { group_lower } else { group_upper };
    let key: fn(Interval) -> usize = if by_lower { Interval::lo } else { Interval::hi };
    let mut pairs = Vec::new();
    for e in endpoints(small.0, key) {
        let s = group(small.0, small.1, e);
        let l = group(large.0, large.1, e);
        if s.members.len() > l.members.len() {
            return Err(Error::GroupSizeViolation {
                endpoint: format_rational(&poset.points()[e]),
                image: s.members.len(),
                available: l.members.len(),
            });
        }
        pairs.extend(s.members.iter().zip(&l.members).map(|(a, b)| (a.1, b.1)));
    }
    Ok(MatchingRecord::from_pairs(pairs, small.0.len(), large.0.len()))
}

/// Matching induced by a surjection `source ↠ image`, grouped by lower
/// endpoint. Pairs are `(image index, source index)`.
pub fn induced_matching_onto(poset: &WeightedPoset, source: &[Interval], image: &[Interval]) -> Result<MatchingRecord> {
    let rs: Vec<usize> = (0..source.len()).collect();
    let ri: Vec<usize> = (0..image.len()).collect();
    canonical_injections(poset, (image, &ri), (source, &rs), true)
}

/// Matching induced by an injection `sub ↪ target`, grouped by upper
/// endpoint. Pairs are `(sub index, target index)`.
pub fn induced_matching_into(poset: &WeightedPoset, sub: &[Interval], target: &[Interval]) -> Result<MatchingRecord> {
    let rs: Vec<usize> = (0..sub.len()).collect();
    let rt: Vec<usize> = (0..target.len()).collect();
    canonical_injections(poset, (sub, &rs), (target, &rt), false)
}

/// For each bar of `B·Λ` (listed in order of the surviving bars of `bars`),
/// the index of the bar of `bars` it came from.
pub fn barcode_shift_map(poset: &WeightedPoset, bars: &[Interval], t: &Translation) -> Vec<(Interval, usize)> {
    bars.iter()
        .enumerate()
        .filter_map(|(k, &b)| act(poset, b, t).map(|s| (s, k)))
        .collect()
}

/// The matching `B(I) → B(M)` induced by the triangle starting at `I`.
///
/// Barcodes are the expanded decompositions of `i` and `m`; pair indices
/// refer to those lists. Isomorphic image bars are ordered by the source
/// bars they come from; isomorphic bars of `MΛ` are ordered with the wider
/// bar of `M` first.
pub fn induced_matching_triangle(
    poset: &WeightedPoset,
    i: &Rep,
    m: &Rep,
    phi: &RepMorphism,
    psi: &RepMorphism,
    t: &Translation,
) -> Result<MatchingRecord> {
    if !is_interleaving(i, m, phi, psi, t)? {
        return Err(Error::Validation("the morphisms do not form an interleaving".into()));
    }
    let i_bars = decompose(i).expanded();
    let m_bars = decompose(m).expanded();
    let im_bars = decompose(&image(phi).0).expanded();

    // Surjection I ↠ im φ: image copies inherit the rank of their source bar.
    let onto = induced_matching_onto(poset, &i_bars, &im_bars)?;
    let mut inherited = vec![usize::MAX; im_bars.len()];
    for &(k, s) in &onto.pairs {
        inherited[k] = s;
    }

    // Injection im φ ↪ MΛ.
    let shifted = barcode_shift_map(poset, &m_bars, t);
    let shifted_bars: Vec<Interval> = shifted.iter().map(|s| s.0).collect();
    let mut order: Vec<usize> = (0..shifted.len()).collect();
    order.sort_by(|&a, &b| {
        let (ma, mb) = (m_bars[shifted[a].1], m_bars[shifted[b].1]);
        width(poset, mb)
            .cmp(&width(poset, ma))
            .then(ma.lo().cmp(&mb.lo()))
            .then(mb.hi().cmp(&ma.hi()))
            .then(shifted[a].1.cmp(&shifted[b].1))
    });
    let mut shifted_rank = vec![0; shifted.len()];
    for (r, &k) in order.iter().enumerate() {
        shifted_rank[k] = r;
    }
    let into = canonical_injections(poset, (&im_bars, &inherited), (&shifted_bars, &shifted_rank), false)?;

    let pairs = onto
        .pairs
        .iter()
        .filter_map(|&(k, s)| {
            into.pairs
                .iter()
                .find(|p| p.0 == k)
                .map(|&(_, j)| (s, shifted[j].1))
        })
        .collect();
    Ok(MatchingRecord::from_pairs(pairs, i_bars.len(), m_bars.len()))
}

fn coords(poset: &WeightedPoset, b: Interval) -> String {
    format!(
        "{},{}",
        format_rational(&poset.points()[b.lo()]),
        format_rational(&poset.points()[b.hi()])
    )
}

/// Text report: `MATCH` lines, `UNMATCHED-LEFT`/`UNMATCHED-RIGHT` lines,
/// then `HEIGHT`.
pub fn format_matching_report(
    poset: &WeightedPoset,
    m: &MatchingRecord,
    left: &[Interval],
    right: &[Interval],
) -> String {
    let mut out = String::new();
    for &(a, b) in &m.pairs {
        let d = pairwise_distance(poset, left[a], right[b]);
        let _ = writeln!(
            out,
            "MATCH {} {} dist={}",
            coords(poset, left[a]),
            coords(poset, right[b]),
            format_rational(&d)
        );
    }
    for &a in &m.unmatched_left {
        let w = width(poset, left[a]);
        let _ = writeln!(out, "UNMATCHED-LEFT {} width={}", coords(poset, left[a]), format_rational(&w));
    }
    for &b in &m.unmatched_right {
        let w = width(poset, right[b]);
        let _ = writeln!(out, "UNMATCHED-RIGHT {} width={}", coords(poset, right[b]), format_rational(&w));
    }
    let h = matching_height(poset, m, left, right);
    let _ = writeln!(out, "HEIGHT {}", format_rational(&h));
    out
}

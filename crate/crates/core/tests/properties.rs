mod common;

use interleave::cloud::{h0_barcode, jump_discontinuities, Metric, PointCloud};
use interleave::interval::{
    act, generator, hom_dim, pairwise_distance, trim_quotient, trim_submodule, width, GeneratorDescriptor,
};
use interleave::io;
use interleave::linalg::PrimeField;
use interleave::matching::{barcode_shift_map, bottleneck_between, matching_height, MatchingRecord};
use interleave::quiver::{
    act_rep, decompose, generator_morphism, image, interleaving_distance_bruteforce, internal_map, is_interleaving, Rep,
};
use interleave::rational::{int, ratio};
use interleave::refinement::{embedding, inflate_translation, ContinuousBar, ContinuousBarcode};
use interleave::{Barcode, Error, Interval, PosetPoint, Rational, WeightedPoset};
use proptest::prelude::*;

fn gap_value(k: u8) -> Rational {
    [ratio(1, 2), int(1), ratio(3, 2), int(2), int(3)][k as usize % 5].clone()
}

fn poset_strategy(max_len: usize) -> impl Strategy<Value = WeightedPoset> {
    (
        -3i64..=3,
        prop::collection::vec(any::<u8>(), 0..max_len),
        1i64..=16,
    )
        .prop_map(|(start, gaps, b)| {
            let mut x = int(start);
            let mut points = vec![x.clone()];
            for g in gaps {
                x += gap_value(g);
                points.push(x.clone());
            }
            WeightedPoset::new(points, ratio(b, 2)).unwrap()
        })
}

fn interval_in(n: usize, a: usize, b: usize) -> Interval {
    let (a, b) = (a % n, b % n);
    Interval::new(a.min(b), a.max(b)).unwrap()
}

fn bars_strategy(max_bars: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0usize..64, 0usize..64), 0..=max_bars)
}

fn to_bars(n: usize, raw: &[(usize, usize)]) -> Vec<Interval> {
    let b = Barcode::from_bars(raw.iter().map(|&(a, c)| interval_in(n, a, c)));
    b.expanded()
}

/// Every partial injection from `0..l` into `0..r`.
fn all_matchings(l: usize, r: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(a: usize, l: usize, r: usize, used: &mut Vec<bool>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if a == l {
            out.push(cur.clone());
            return;
        }
        go(a + 1, l, r, used, cur, out);
        for b in 0..r {
            if !used[b] {
                used[b] = true;
                cur.push((a, b));
                go(a + 1, l, r, used, cur, out);
                cur.pop();
                used[b] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, l, r, &mut vec![false; r], &mut Vec::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maximal_translation_dominates(poset in poset_strategy(5), k in 0usize..64) {
        let heights = poset.candidate_heights();
        let eps = &heights[k % heights.len()];
        let top = poset.maximal_translation(eps);
        prop_assert_eq!(&poset.height(&top), eps);
        for t in poset.all_translations() {
            if &poset.height(&t) <= eps {
                prop_assert!(t.leq(&top));
            }
        }
    }

    #[test]
    fn maximal_translations_are_monotone_and_idempotent(poset in poset_strategy(7), a in 0u32..40, b in 0u32..40) {
        let (ea, eb) = (ratio(a.min(b) as i64, 2), ratio(a.max(b) as i64, 2));
        let (ta, tb) = (poset.maximal_translation(&ea), poset.maximal_translation(&eb));
        prop_assert!(ta.leq(&tb));
        prop_assert_eq!(poset.maximal_translation(&poset.height(&ta)), ta.clone());
        prop_assert!(poset.height(&ta.compose(&tb)) <= poset.height(&ta) + poset.height(&tb));
    }

    #[test]
    fn metric_is_a_metric(poset in poset_strategy(7)) {
        let v: Vec<PosetPoint> = poset.vertices().collect();
        for &p in &v {
            prop_assert_eq!(poset.distance(p, p), int(0));
            for &q in &v {
                prop_assert_eq!(poset.distance(p, q), poset.distance(q, p));
                for &r in &v {
                    prop_assert!(poset.distance(p, r) <= poset.distance(p, q) + poset.distance(q, r));
                }
            }
        }
    }

    #[test]
    fn action_is_contravariant(poset in poset_strategy(5), a in 0usize..64, b in 0usize..64) {
        let ts = poset.all_translations();
        let n = poset.len();
        let (l, g) = (&ts[a % ts.len()], &ts[b % ts.len()]);
        for bar in common::all_intervals(n) {
            let lhs = act(&poset, bar, l).and_then(|j| act(&poset, j, g));
            prop_assert_eq!(lhs, act(&poset, bar, &l.compose(g)));
        }
    }

    #[test]
    fn width_unrolls_to_hom_vanishing(poset in poset_strategy(7)) {
        for eps in poset.candidate_heights() {
            let t = poset.maximal_translation(&eps);
            for bar in common::all_intervals(poset.len()) {
                let dies = act(&poset, bar, &t.square()).map_or(0, |j| hom_dim(bar, j)) == 0;
                prop_assert_eq!(dies, width(&poset, bar) <= poset.height(&t));
            }
        }
    }

    #[test]
    fn pairwise_distance_is_a_pseudometric(poset in poset_strategy(6)) {
        let bars = common::all_intervals(poset.len());
        for &a in &bars {
            prop_assert_eq!(pairwise_distance(&poset, a, a), int(0));
            for &b in &bars {
                let ab = pairwise_distance(&poset, a, b);
                prop_assert_eq!(&ab, &pairwise_distance(&poset, b, a));
                for &c in &bars {
                    prop_assert!(pairwise_distance(&poset, a, c) <= &ab + pairwise_distance(&poset, b, c));
                }
            }
        }
    }

    #[test]
    fn nonzero_generators_interleave(poset in poset_strategy(6), a in (0usize..64, 0usize..64), b in (0usize..64, 0usize..64)) {
        let n = poset.len();
        let (i, m) = (interval_in(n, a.0, a.1), interval_in(n, b.0, b.1));
        let field = PrimeField::TWO;
        for eps in poset.candidate_heights() {
            let t = poset.maximal_translation(&eps);
            let (Some(it), Some(mt)) = (act(&poset, i, &t), act(&poset, m, &t)) else { continue };
            let (ri, rm) = (Rep::from_bars(field, n, &[i]), Rep::from_bars(field, n, &[m]));
            let phi = generator_morphism(&ri, &Rep::from_bars(field, n, &[mt]), &[i], &[mt], 0, 0);
            let psi = generator_morphism(&rm, &Rep::from_bars(field, n, &[it]), &[m], &[it], 0, 0);
            if let (Some(phi), Some(psi)) = (phi, psi) {
                prop_assert!(is_interleaving(&ri, &rm, &phi, &psi, &t).unwrap());
            }
        }
    }

    #[test]
    fn generator_carrier_matches_hom(poset in poset_strategy(6), a in (0usize..64, 0usize..64), b in (0usize..64, 0usize..64)) {
        let n = poset.len();
        let (i, j) = (interval_in(n, a.0, a.1), interval_in(n, b.0, b.1));
        let GeneratorDescriptor { carrier, .. } = generator(i, j);
        prop_assert_eq!(carrier.is_some(), hom_dim(i, j) == 1);
        if let Some(c) = carrier {
            prop_assert_eq!((c.lo(), c.hi()), (i.lo(), j.hi()));
        }
    }

    #[test]
    fn trims_match_images(poset in poset_strategy(6), k in 0usize..64) {
        let heights = poset.candidate_heights();
        let t = poset.maximal_translation(&heights[k % heights.len()]);
        let field = PrimeField::TWO;
        for bar in common::all_intervals(poset.len()) {
            let rep = Rep::from_bars(field, poset.len(), &[bar]);
            let f = internal_map(&rep, &t, &t).unwrap();
            let quotient: Vec<Interval> = decompose(&image(&f).0).expanded();
            prop_assert_eq!(quotient, trim_quotient(&poset, bar, &t).into_iter().collect::<Vec<_>>());
            let above = t.square().apply(PosetPoint::Finite(bar.lo())).finite().filter(|&s| s <= bar.hi());
            let expected: Vec<Interval> = match above {
                Some(s) => {
                    let part = Rep::from_bars(field, poset.len(), &[Interval::new(s, bar.hi()).unwrap()]);
                    decompose(&act_rep(&part, &t).unwrap()).expanded()
                }
                None => Vec::new(),
            };
            let sub = trim_submodule(&poset, bar, &t);
            prop_assert_eq!(sub.into_iter().collect::<Vec<_>>(), expected);
            if let Some(s) = sub {
                let whole = act(&poset, bar, &t).unwrap();
                prop_assert!(whole.lo() <= s.lo() && s.hi() == whole.hi());
            }
        }
    }

    #[test]
    fn bottleneck_is_the_best_matching(poset in poset_strategy(6), l in bars_strategy(4), r in bars_strategy(4)) {
        let n = poset.len();
        let (lb, rb) = (to_bars(n, &l), to_bars(n, &r));
        let (d, m) = bottleneck_between(&poset, &lb, &rb);
        prop_assert!(m.is_valid(lb.len(), rb.len()));
        prop_assert_eq!(&matching_height(&poset, &m, &lb, &rb), &d);
        let best = all_matchings(lb.len(), rb.len())
            .into_iter()
            .map(|p| matching_height(&poset, &MatchingRecord::from_pairs(p, lb.len(), rb.len()), &lb, &rb))
            .min()
            .unwrap();
        prop_assert_eq!(&best, &d);
        prop_assert_eq!(bottleneck_between(&poset, &rb, &lb).0, d);
    }

    #[test]
    fn interleaving_never_exceeds_bottleneck(poset in poset_strategy(4), l in bars_strategy(2), r in bars_strategy(2)) {
        let n = poset.len();
        let (lb, rb) = (to_bars(n, &l), to_bars(n, &r));
        let field = PrimeField::TWO;
        let (i, m) = (Rep::from_bars(field, n, &lb), Rep::from_bars(field, n, &rb));
        match interleaving_distance_bruteforce(&poset, &i, &m, 1 << 12) {
            Ok(d) => prop_assert!(d <= bottleneck_between(&poset, &lb, &rb).0),
            Err(Error::CapExceeded { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn shift_map_recovers_sources(poset in poset_strategy(6), raw in bars_strategy(5), k in 0usize..64) {
        let bars = to_bars(poset.len(), &raw);
        let heights = poset.candidate_heights();
        let t = poset.maximal_translation(&heights[k % heights.len()]);
        let shifted = barcode_shift_map(&poset, &bars, &t);
        let survivors: Vec<usize> = (0..bars.len()).filter(|&j| act(&poset, bars[j], &t).is_some()).collect();
        let mut sources: Vec<usize> = shifted.iter().map(|s| s.1).collect();
        sources.sort_unstable();
        prop_assert_eq!(sources, survivors);
        for (acted, j) in shifted {
            prop_assert_eq!(Some(acted), act(&poset, bars[j], &t));
        }
    }

    #[test]
    fn inflated_translations_extend(poset in poset_strategy(5), extra in prop::collection::vec(0usize..64, 1..4), k in 0usize..64) {
        let x = poset;
        let mut pts: Vec<Rational> = x.points().to_vec();
        for e in extra {
            let i = e % pts.len();
            let new = match pts.get(i + 1) {
                Some(next) => (&pts[i] + next) / int(2),
                None => &pts[0] - int(1),
            };
            pts.push(new);
            pts.sort();
            pts.dedup();
        }
        let y = WeightedPoset::new(pts, x.weight().clone()).unwrap();
        let embed = embedding(&x, &y).unwrap();
        let heights = x.candidate_heights();
        let t = x.maximal_translation(&heights[k % heights.len()]);
        let bar = inflate_translation(&x, &y, &t).unwrap();
        prop_assert_eq!(y.height(&bar), x.height(&t));
        for (i, &j) in embed.iter().enumerate() {
            let expected = match t.apply(PosetPoint::Finite(i)) {
                PosetPoint::Finite(k) => PosetPoint::Finite(embed[k]),
                PosetPoint::Infinity => PosetPoint::Infinity,
            };
            prop_assert_eq!(bar.apply(PosetPoint::Finite(j)), expected);
        }
        let v: Vec<PosetPoint> = y.vertices().collect();
        for w in v.windows(2) {
            prop_assert!(bar.apply(w[0]) <= bar.apply(w[1]));
        }
        for &p in &v {
            prop_assert!(bar.apply(p) >= p);
        }
    }

    #[test]
    fn h0_deaths_are_jumps(raw in prop::collection::vec(prop::collection::vec(-20i64..20, 2), 1..9), metric in 0u8..3) {
        let cloud = PointCloud::new(raw.into_iter().map(|p| p.into_iter().map(|c| ratio(c, 2)).collect()).collect()).unwrap();
        let metric = [Metric::LInfinity, Metric::L1, Metric::SquaredEuclidean][metric as usize];
        let jumps = jump_discontinuities(&cloud, metric);
        let h0 = h0_barcode(&cloud, metric);
        let total: usize = h0.entries().iter().map(|e| e.1).sum();
        prop_assert!(total >= 1 && total <= cloud.len());
        for (bar, _) in h0.entries() {
            if let Some(d) = bar.death() {
                prop_assert!(jumps.contains(d));
            }
        }
    }

    #[test]
    fn formats_round_trip(poset in poset_strategy(8), raw in bars_strategy(6), cont in prop::collection::vec((-20i64..20, 1i64..20, any::<bool>(), 1usize..4), 0..6)) {
        prop_assert_eq!(&io::parse_poset(&io::format_poset(&poset)).unwrap(), &poset);
        let barcode = Barcode::from_bars(to_bars(poset.len(), &raw));
        prop_assert_eq!(io::parse_barcode(&io::format_barcode(&poset, &barcode), &poset).unwrap(), barcode);
        let mut c = ContinuousBarcode::new();
        for (r, len, infinite, m) in cont {
            let death = (!infinite).then(|| ratio(r + len, 4));
            c.push(ContinuousBar::new(ratio(r, 4), death).unwrap(), m);
        }
        prop_assert_eq!(io::parse_continuous(&io::format_continuous(&c)).unwrap(), c);
    }

    #[test]
    fn parsers_never_panic(text in "(?s).{0,200}") {
        let poset = WeightedPoset::new(vec![int(0), int(1)], int(1)).unwrap();
        let _ = io::parse_poset(&text);
        let _ = io::parse_barcode(&text, &poset);
        let _ = io::parse_continuous(&text);
        let _ = io::parse_cloud(&text);
        let _ = interleave::rational::parse_rational(&text);
    }

    #[test]
    fn decompose_ignores_bar_order(poset in poset_strategy(7), raw in bars_strategy(6)) {
        let n = poset.len();
        let mut bars: Vec<Interval> = raw.iter().map(|&(a, b)| interval_in(n, a, b)).collect();
        let sorted = Barcode::from_bars(bars.iter().copied());
        bars.reverse();
        let rep = Rep::from_bars(PrimeField::new(3).unwrap(), n, &bars);
        prop_assert_eq!(decompose(&rep), sorted);
    }
}

#![allow(dead_code)]

use interleave::interval::{act, pairwise_distance, width};
use interleave::linalg::PrimeField;
use interleave::matching::bottleneck_between;
use interleave::quiver::{generator_morphism, is_interleaving, morphism_from_generators, Rep, RepMorphism};
use interleave::rational::{int, ratio};
use interleave::{Barcode, Interval, Rational, Translation, WeightedPoset};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Gaps drawn from a small set so that equal distances are common.
pub fn random_gap(rng: &mut ChaCha8Rng) -> Rational {
    [ratio(1, 2), int(1), int(1), ratio(3, 2), int(2), int(3)]
        .choose(rng)
        .unwrap()
        .clone()
}

pub fn random_weight(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(1..=16), 2)
}

pub fn random_poset(rng: &mut ChaCha8Rng, max_len: usize) -> WeightedPoset {
    let n = rng.gen_range(1..=max_len);
    poset_with_len(rng, n)
}

pub fn poset_with_len(rng: &mut ChaCha8Rng, n: usize) -> WeightedPoset {
    let mut x = int(rng.gen_range(-3..=3));
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        points.push(x.clone());
        x += random_gap(rng);
    }
    WeightedPoset::new(points, random_weight(rng)).unwrap()
}

/// Distinct integers in `0..=span`, at most `max_len` of them.
pub fn random_integer_set(rng: &mut ChaCha8Rng, max_len: usize, span: i64) -> Vec<Rational> {
    let n = rng.gen_range(1..=max_len);
    let mut pool: Vec<i64> = (0..=span).collect();
    pool.shuffle(rng);
    let mut picked: Vec<i64> = pool.into_iter().take(n).collect();
    picked.sort_unstable();
    picked.into_iter().map(int).collect()
}

pub fn all_intervals(n: usize) -> Vec<Interval> {
    (0..n)
        .flat_map(|lo| (lo..n).map(move |hi| Interval::new(lo, hi).unwrap()))
        .collect()
}

pub fn random_interval(rng: &mut ChaCha8Rng, n: usize) -> Interval {
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(0..n);
    Interval::new(a.min(b), a.max(b)).unwrap()
}

pub fn random_barcode(rng: &mut ChaCha8Rng, n: usize, max_bars: usize) -> Barcode {
    let k = rng.gen_range(0..=max_bars);
    let mut out = Barcode::new();
    for _ in 0..k {
        out.insert(random_interval(rng, n), rng.gen_range(1..=2));
    }
    out
}

/// A `(Λ_ε, Λ_ε)`-interleaving between block representations of `i_bars`
/// and `m_bars`.
pub struct Interleaving {
    pub eps: Rational,
    pub translation: Translation,
    pub i: Rep,
    pub m: Rep,
    pub phi: RepMorphism,
    pub psi: RepMorphism,
    /// Generators added on top of the diagonal interleaving.
    pub perturbations: usize,
}

fn pair_interleaves(poset: &WeightedPoset, a: Interval, b: Interval, t: &Translation) -> bool {
    let n = poset.len();
    let field = PrimeField::TWO;
    let (Some(at), Some(bt)) = (act(poset, a, t), act(poset, b, t)) else {
        return false;
    };
    let ri = Rep::from_bars(field, n, &[a]);
    let rm = Rep::from_bars(field, n, &[b]);
    let (Some(phi), Some(psi)) = (
        generator_morphism(&ri, &Rep::from_bars(field, n, &[bt]), &[a], &[bt], 0, 0),
        generator_morphism(&rm, &Rep::from_bars(field, n, &[at]), &[b], &[at], 0, 0),
    ) else {
        return false;
    };
    is_interleaving(&ri, &rm, &phi, &psi, t).unwrap()
}

fn acted_positions(poset: &WeightedPoset, bars: &[Interval], t: &Translation) -> (Vec<Interval>, Vec<Option<usize>>) {
    let mut acted = Vec::new();
    let mut position = Vec::with_capacity(bars.len());
    for &b in bars {
        position.push(act(poset, b, t).map(|a| {
            acted.push(a);
            acted.len() - 1
        }));
    }
    (acted, position)
}

/// Builds a diagonal interleaving from an ε-matching, then adds random
/// generators while the result stays an interleaving. `eps` must be at least
/// the bottleneck distance and the bars must be sorted as by `Barcode`.
pub fn random_interleaving(
    rng: &mut ChaCha8Rng,
    poset: &WeightedPoset,
    i_bars: &[Interval],
    m_bars: &[Interval],
    eps: &Rational,
    attempts: usize,
) -> Result<Interleaving, String> {
    let n = poset.len();
    let field = PrimeField::TWO;
    let t = poset.maximal_translation(eps);
    let (d, matching) = bottleneck_between(poset, i_bars, m_bars);
    if &d > eps {
        return Err(format!("ε = {eps} is below the bottleneck distance {d}"));
    }
    let (i_acted, i_pos) = acted_positions(poset, i_bars, &t);
    let (m_acted, m_pos) = acted_positions(poset, m_bars, &t);
    let mut phi_gens = Vec::new();
    let mut psi_gens = Vec::new();
    for &(a, b) in &matching.pairs {
        let (ia, mb) = (i_bars[a], m_bars[b]);
        let direct = pair_interleaves(poset, ia, mb, &t);
        let vanish = width(poset, ia).max(width(poset, mb)) <= *eps;
        if !direct && !vanish {
            return Err(format!(
                "matched pair at distance {} is not interleaved at ε = {eps}",
                pairwise_distance(poset, ia, mb)
            ));
        }
        if direct && (!vanish || rng.gen_bool(0.75)) {
            phi_gens.push((a, m_pos[b].unwrap(), 1));
            psi_gens.push((b, i_pos[a].unwrap(), 1));
        }
    }
    let i = Rep::from_bars(field, n, i_bars);
    let m = Rep::from_bars(field, n, m_bars);
    let i_t = Rep::from_bars(field, n, &i_acted);
    let m_t = Rep::from_bars(field, n, &m_acted);
    let mut phi = morphism_from_generators(&i, &m_t, i_bars, &m_acted, &phi_gens).map_err(|e| e.to_string())?;
    let mut psi = morphism_from_generators(&m, &i_t, m_bars, &i_acted, &psi_gens).map_err(|e| e.to_string())?;
    if !is_interleaving(&i, &m, &phi, &psi, &t).map_err(|e| e.to_string())? {
        return Err("diagonal morphisms from an ε-matching do not interleave".into());
    }
    let mut perturbations = 0;
    for _ in 0..attempts {
        let on_phi = rng.gen_bool(0.5);
        let (src, dst, src_bars, dst_bars) = if on_phi {
            (&i, &m_t, i_bars, &m_acted)
        } else {
            (&m, &i_t, m_bars, &i_acted)
        };
        if src_bars.is_empty() || dst_bars.is_empty() {
            continue;
        }
        let a = rng.gen_range(0..src_bars.len());
        let b = rng.gen_range(0..dst_bars.len());
        let Some(g) = generator_morphism(src, dst, src_bars, dst_bars, a, b) else {
            continue;
        };
        let (cand_phi, cand_psi) = if on_phi {
            (phi.add(&g).unwrap(), psi.clone())
        } else {
            (phi.clone(), psi.add(&g).unwrap())
        };
        if is_interleaving(&i, &m, &cand_phi, &cand_psi, &t).unwrap() {
            phi = cand_phi;
            psi = cand_psi;
            perturbations += 1;
        }
    }
    Ok(Interleaving {
        eps: eps.clone(),
        translation: t,
        i,
        m,
        phi,
        psi,
        perturbations,
    })
}

/// The candidate heights of `poset` that are at least `floor`, smallest first.
pub fn heights_from(poset: &WeightedPoset, floor: &Rational) -> Vec<Rational> {
    poset.candidate_heights().into_iter().filter(|h| h >= floor).collect()
}

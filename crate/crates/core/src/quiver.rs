//! Representations of the equioriented `A_n` quiver over a prime field.
//!
//! Vertex `i` is the `i`-th point of the poset; the point at infinity always
//! carries the zero space and is not stored.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::{act, hom_dim, Barcode, Interval};
use crate::linalg::{Matrix, PrimeField};
use crate::poset::{PosetPoint, Translation, WeightedPoset};
use crate::rational::Rational;

/// Default bound on the number of `(φ, ψ)` candidates the brute-force
/// oracle will enumerate.
pub const DEFAULT_CAP: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rep {
    field: PrimeField,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
}

impl Rep {
    /// `maps[i]` is the `dims[i+1] × dims[i]` matrix of the arrow `i → i+1`.
    pub fn new(field: PrimeField, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self> {
        if maps.len() != dims.len().saturating_sub(1) {
            return Err(Error::ShapeMismatch(format!(
                "{} vertices need {} arrow maps, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                maps.len()
            )));
        }
        for (i, m) in maps.iter().enumerate() {
            if (m.rows(), m.cols()) != (dims[i + 1], dims[i]) {
                return Err(Error::ShapeMismatch(format!(
                    "arrow {i} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    dims[i + 1],
                    dims[i]
                )));
            }
        }
        Ok(Self { field, dims, maps })
    }

    pub fn zero(field: PrimeField, vertices: usize) -> Self {
        Self::from_bars(field, vertices, &[])
    }

    /// Block representation with one identity chain per bar. The basis at a
    /// vertex lists the bars containing it, in the given order.
    pub fn from_bars(field: PrimeField, vertices: usize, bars: &[Interval]) -> Self {
        let dims: Vec<usize> = (0..vertices)
            .map(|v| bars.iter().filter(|b| b.contains(v)).count())
            .collect();
        let maps = (0..vertices.saturating_sub(1))
            .map(|v| {
                let mut m = Matrix::zeros(dims[v + 1], dims[v]);
                for k in 0..bars.len() {
                    if bars[k].contains(v) && bars[k].contains(v + 1) {
                        m.set(block_index(bars, k, v + 1), block_index(bars, k, v), 1);
                    }
                }
                m
            })
            .collect();
        Self { field, dims, maps }
    }

    pub fn from_barcode(field: PrimeField, poset: &WeightedPoset, barcode: &Barcode) -> Result<Self> {
        barcode.check(poset)?;
        Ok(Self::from_bars(field, poset.len(), &barcode.expanded()))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn vertices(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `R(i ≤ j)`.
    pub fn structure_map(&self, i: usize, j: usize) -> Matrix {
        assert!(i <= j && j < self.vertices());
        (i..j).fold(Matrix::identity(self.dims[i]), |acc, v| {
            self.maps[v].mul(self.field, &acc)
        })
    }

    fn structure_map_to(&self, i: usize, q: PosetPoint) -> Matrix {
        match q {
            PosetPoint::Finite(j) => self.structure_map(i, j),
            PosetPoint::Infinity => Matrix::zeros(0, self.dims[i]),
        }
    }

    fn dim_at(&self, q: PosetPoint) -> usize {
        q.finite().map_or(0, |j| self.dims[j])
    }
}

/// Position of bar `k`'s basis vector at vertex `v` in a block representation.
fn block_index(bars: &[Interval], k: usize, v: usize) -> usize {
    bars[..k].iter().filter(|b| b.contains(v)).count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepMorphism {
    source: Rep,
    target: Rep,
    components: Vec<Matrix>,
}

impl RepMorphism {
    /// Validates shapes and that every square over an arrow commutes.
    pub fn new(source: Rep, target: Rep, components: Vec<Matrix>) -> Result<Self> {
        if source.vertices() != target.vertices() || components.len() != source.vertices() {
            return Err(Error::ShapeMismatch("vertex counts differ".into()));
        }
        if source.field != target.field {
            return Err(Error::ShapeMismatch("fields differ".into()));
        }
        for (v, c) in components.iter().enumerate() {
            if (c.rows(), c.cols()) != (target.dims[v], source.dims[v]) {
                return Err(Error::ShapeMismatch(format!("component {v} has the wrong shape")));
            }
        }
        let f = source.field;
        for v in 0..source.vertices().saturating_sub(1) {
            let left = target.maps[v].mul(f, &components[v]);
            let right = components[v + 1].mul(f, &source.maps[v]);
            if left != right {
                return Err(Error::Validation(format!("square over arrow {v} does not commute")));
            }
        }
        Ok(Self {
            source,
            target,
            components,
        })
    }

    pub fn zero(source: Rep, target: Rep) -> Self {
        let components = source
            .dims
            .iter()
            .zip(&target.dims)
            .map(|(&s, &t)| Matrix::zeros(t, s))
            .collect();
        Self {
            source,
            target,
            components,
        }
    }

    pub fn identity(rep: Rep) -> Self {
        let components = rep.dims.iter().map(|&d| Matrix::identity(d)).collect();
        Self {
            source: rep.clone(),
            target: rep,
            components,
        }
    }

    pub fn source(&self) -> &Rep {
        &self.source
    }

    pub fn target(&self) -> &Rep {
        &self.target
    }

    pub fn components(&self) -> &[Matrix] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Matrix::is_zero)
    }

    pub fn rank_at(&self, v: usize) -> usize {
        self.components[v].rank(self.source.field)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &RepMorphism) -> Result<RepMorphism> {
        if first.target != self.source {
            return Err(Error::ShapeMismatch("composition of unrelated morphisms".into()));
        }
        let f = self.source.field;
        Ok(RepMorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            components: self
                .components
                .iter()
                .zip(&first.components)
                .map(|(a, b)| a.mul(f, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &RepMorphism) -> Result<RepMorphism> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ShapeMismatch("sum of morphisms between different reps".into()));
        }
        let f = self.source.field;
        Ok(RepMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(f, b))
                .collect(),
        })
    }

    pub fn scale(&self, k: u32) -> RepMorphism {
        let f = self.source.field;
        RepMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            components: self.components.iter().map(|c| c.scale(f, k)).collect(),
        }
    }
}

/// Barcode of `rep`, from the ranks of its structure maps:
/// `#[i, j] = r(i,j) − r(i−1,j) − r(i,j+1) + r(i−1,j+1)`.
pub fn decompose(rep: &Rep) -> Barcode {
    let n = rep.vertices();
    let mut rank = vec![vec![0usize; n]; n];
    for (i, row) in rank.iter_mut().enumerate() {
        let mut acc = Matrix::identity(rep.dims[i]);
        row[i] = rep.dims[i];
        for (j, cell) in row.iter_mut().enumerate().skip(i + 1) {
            acc = rep.maps[j - 1].mul(rep.field, &acc);
            *cell = acc.rank(rep.field);
        }
    }
    let r = |i: Option<usize>, j: usize| -> i64 {
        match i {
            Some(i) if j < n => rank[i][j] as i64,
            _ => 0,
        }
    };
    let mut barcode = Barcode::new();
    for i in 0..n {
        for j in i..n {
            let m = r(Some(i), j) - r(i.checked_sub(1), j) - r(Some(i), j + 1)
                + r(i.checked_sub(1), j + 1);
            debug_assert!(m >= 0);
            barcode.insert(Interval::span(i, j), m as usize);
        }
    }
    barcode
}

/// Vertex-wise kernel with its inclusion into the source.
pub fn kernel(f: &RepMorphism) -> (Rep, RepMorphism) {
    let field = f.source.field;
    let bases: Vec<Matrix> = f.components.iter().map(|c| c.kernel_basis(field)).collect();
    subrep(&f.source, bases)
}

/// Vertex-wise image with its inclusion into the target.
pub fn image(f: &RepMorphism) -> (Rep, RepMorphism) {
    let field = f.source.field;
    let bases: Vec<Matrix> = f.components.iter().map(|c| c.column_space_basis(field)).collect();
    subrep(&f.target, bases)
}

/// `f = inclusion ∘ surjection` through the image.
pub fn image_factorization(f: &RepMorphism) -> (RepMorphism, RepMorphism) {
    let field = f.source.field;
    let (im, inclusion) = image(f);
    let components = f
        .components
        .iter()
        .zip(&inclusion.components)
        .map(|(c, b)| b.solve(field, c).expect("image contains every value"))
        .collect();
    let surjection = RepMorphism {
        source: f.source.clone(),
        target: im,
        components,
    };
    (surjection, inclusion)
}

/// Vertex-wise cokernel with the projection from the target.
pub fn cokernel(f: &RepMorphism) -> (Rep, RepMorphism) {
    let field = f.source.field;
    let (_, inclusion) = image(f);
    let parts: Vec<(Matrix, Matrix)> = inclusion
        .components
        .iter()
        .map(|b| b.quotient_by(field))
        .collect();
    let target = &f.target;
    let dims = parts.iter().map(|(q, _)| q.rows()).collect();
    let maps = (0..target.vertices().saturating_sub(1))
        .map(|v| parts[v + 1].0.mul(field, &target.maps[v].mul(field, &parts[v].1)))
        .collect();
    let quotient = Rep {
        field,
        dims,
        maps,
    };
    let projection = RepMorphism {
        source: target.clone(),
        target: quotient.clone(),
        components: parts.into_iter().map(|(q, _)| q).collect(),
    };
    (quotient, projection)
}

/// The subrepresentation of `ambient` spanned by independent columns
/// `bases[v]`, assumed closed under the arrow maps.
fn subrep(ambient: &Rep, bases: Vec<Matrix>) -> (Rep, RepMorphism) {
    let field = ambient.field;
    let dims = bases.iter().map(Matrix::cols).collect();
    let maps = (0..ambient.vertices().saturating_sub(1))
        .map(|v| {
            let pushed = ambient.maps[v].mul(field, &bases[v]);
            bases[v + 1]
                .solve(field, &pushed)
                .expect("subspaces are closed under the arrows")
        })
        .collect();
    let sub = Rep { field, dims, maps };
    let inclusion = RepMorphism {
        source: sub.clone(),
        target: ambient.clone(),
        components: bases,
    };
    (sub, inclusion)
}

fn check_translation(rep: &Rep, t: &Translation) -> Result<()> {
    if t.len() != rep.vertices() {
        return Err(Error::ShapeMismatch(format!(
            "translation on {} points applied to a representation on {}",
            t.len(),
            rep.vertices()
        )));
    }
    Ok(())
}

/// `R · Λ`, with `(R · Λ)(p) = R(Λp)`.
pub fn act_rep(rep: &Rep, t: &Translation) -> Result<Rep> {
    check_translation(rep, t)?;
    let n = rep.vertices();
    let image = |v: usize| t.apply(PosetPoint::Finite(v));
    let dims = (0..n).map(|v| rep.dim_at(image(v))).collect();
    let maps = (0..n.saturating_sub(1))
        .map(|v| match image(v) {
            PosetPoint::Finite(a) => rep.structure_map_to(a, image(v + 1)),
            PosetPoint::Infinity => Matrix::zeros(0, 0),
        })
        .collect();
    Ok(Rep {
        field: rep.field,
        dims,
        maps,
    })
}

pub fn act_morphism(f: &RepMorphism, t: &Translation) -> Result<RepMorphism> {
    let source = act_rep(&f.source, t)?;
    let target = act_rep(&f.target, t)?;
    let components = (0..f.source.vertices())
        .map(|v| match t.apply(PosetPoint::Finite(v)) {
            PosetPoint::Finite(a) => f.components[a].clone(),
            PosetPoint::Infinity => Matrix::zeros(0, 0),
        })
        .collect();
    Ok(RepMorphism {
        source,
        target,
        components,
    })
}

/// The canonical morphism `R → R · (ΛΓ)`, given at `p` by `R(p ≤ ΛΓp)`.
pub fn internal_map(rep: &Rep, lambda: &Translation, gamma: &Translation) -> Result<RepMorphism> {
    check_translation(rep, lambda)?;
    check_translation(rep, gamma)?;
    let t = lambda.compose(gamma);
    let target = act_rep(rep, &t)?;
    let components = (0..rep.vertices())
        .map(|v| rep.structure_map_to(v, t.apply(PosetPoint::Finite(v))))
        .collect();
    Ok(RepMorphism {
        source: rep.clone(),
        target,
        components,
    })
}

/// Whether `φ: I → MΛ` and `ψ: M → IΛ` form a `(Λ, Λ)`-interleaving.
pub fn is_interleaving(
    i: &Rep,
    m: &Rep,
    phi: &RepMorphism,
    psi: &RepMorphism,
    t: &Translation,
) -> Result<bool> {
    let m_t = act_rep(m, t)?;
    let i_t = act_rep(i, t)?;
    if &phi.source != i || phi.target != m_t || &psi.source != m || psi.target != i_t {
        return Err(Error::ShapeMismatch(
            "interleaving morphisms do not match the given modules".into(),
        ));
    }
    let left = act_morphism(psi, t)?.compose(phi)?;
    let right = act_morphism(phi, t)?.compose(psi)?;
    Ok(left == internal_map(i, t, t)? && right == internal_map(m, t, t)?)
}

/// The generator `Φ_{a,b}` between block representations, or `None` when
/// `Hom(a, b) = 0`. `source_bars[a]` and `target_bars[b]` index the block
/// bases of `source` and `target`.
pub fn generator_morphism(
    source: &Rep,
    target: &Rep,
    source_bars: &[Interval],
    target_bars: &[Interval],
    a: usize,
    b: usize,
) -> Option<RepMorphism> {
    let (sa, tb) = (source_bars[a], target_bars[b]);
    if hom_dim(sa, tb) == 0 {
        return None;
    }
    let mut f = RepMorphism::zero(source.clone(), target.clone());
    for v in sa.lo()..=tb.hi() {
        f.components[v].set(block_index(target_bars, b, v), block_index(source_bars, a, v), 1);
    }
    Some(f)
}

/// `Σ c · Φ_{a,b}` over the given `(a, b, c)` triples.
pub fn morphism_from_generators(
    source: &Rep,
    target: &Rep,
    source_bars: &[Interval],
    target_bars: &[Interval],
    coefficients: &[(usize, usize, u32)],
) -> Result<RepMorphism> {
    let mut total = RepMorphism::zero(source.clone(), target.clone());
    for &(a, b, c) in coefficients {
        let g = generator_morphism(source, target, source_bars, target_bars, a, b)
            .ok_or_else(|| Error::Validation(format!("Hom between bars {a} and {b} is zero")))?;
        total = total.add(&g.scale(c))?;
    }
    Ok(total)
}

/// The generators of `Hom(rep(from), rep(onto) · Λ)` as component lists.
fn generator_basis(
    field: PrimeField,
    n: usize,
    from: &[Interval],
    onto_acted: &[Interval],
) -> Vec<Vec<Matrix>> {
    let s = Rep::from_bars(field, n, from);
    let t = Rep::from_bars(field, n, onto_acted);
    let mut out = Vec::new();
    for a in 0..from.len() {
        for b in 0..onto_acted.len() {
            if let Some(g) = generator_morphism(&s, &t, from, onto_acted, a, b) {
                out.push(g.components);
            }
        }
    }
    out
}

fn combine(field: PrimeField, template: &[Matrix], basis: &[Vec<Matrix>], coeffs: &[u32]) -> Vec<Matrix> {
    let mut out = template.to_vec();
    for (g, &c) in basis.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        for (o, m) in out.iter_mut().zip(g) {
            *o = o.add(field, &m.scale(field, c));
        }
    }
    out
}

/// Decides whether `I` and `M` are `(Λ_ε, Λ_ε)`-interleaved by enumerating
/// every pair of morphisms written in the generator basis.
pub fn interleaving_exists_bruteforce(
    poset: &WeightedPoset,
    i: &Rep,
    m: &Rep,
    eps: &Rational,
    cap: u128,
) -> Result<bool> {
    if i.vertices() != poset.len() || m.vertices() != poset.len() || i.field != m.field {
        return Err(Error::ShapeMismatch("representations do not live on the poset".into()));
    }
    let field = i.field;
    let n = poset.len();
    let t = poset.maximal_translation(eps);
    let i_bars = decompose(i).expanded();
    let m_bars = decompose(m).expanded();
    let i_acted: Vec<Interval> = i_bars.iter().filter_map(|&b| act(poset, b, &t)).collect();
    let m_acted: Vec<Interval> = m_bars.iter().filter_map(|&b| act(poset, b, &t)).collect();

    let phi_basis = generator_basis(field, n, &i_bars, &m_acted);
    let psi_basis = generator_basis(field, n, &m_bars, &i_acted);
    let gens = phi_basis.len() + psi_basis.len();
    let p = field.characteristic() as u128;
    let needed = (0..gens).try_fold(1u128, |acc, _| acc.checked_mul(p));
    let needed = match needed {
        Some(k) if k <= cap => k,
        Some(k) => return Err(Error::CapExceeded { needed: k, cap }),
        None => return Err(Error::CapExceeded { needed: u128::MAX, cap }),
    };

    let i_rep = Rep::from_bars(field, n, &i_bars);
    let m_rep = Rep::from_bars(field, n, &m_bars);
    let phi_zero = RepMorphism::zero(i_rep.clone(), Rep::from_bars(field, n, &m_acted));
    let psi_zero = RepMorphism::zero(m_rep.clone(), Rep::from_bars(field, n, &i_acted));
    let target_i = internal_map(&i_rep, &t, &t)?;
    let target_m = internal_map(&m_rep, &t, &t)?;

    let found = (0..needed as u64).into_par_iter().any(|k| {
        let mut digits = Vec::with_capacity(gens);
        let mut rest = k as u128;
        for _ in 0..gens {
            digits.push((rest % p) as u32);
            rest /= p;
        }
        let (dphi, dpsi) = digits.split_at(phi_basis.len());
        let phi = RepMorphism {
            components: combine(field, &phi_zero.components, &phi_basis, dphi),
            ..phi_zero.clone()
        };
        let psi = RepMorphism {
            components: combine(field, &psi_zero.components, &psi_basis, dpsi),
            ..psi_zero.clone()
        };
        let left = act_morphism(&psi, &t).and_then(|x| x.compose(&phi));
        let right = act_morphism(&phi, &t).and_then(|x| x.compose(&psi));
        matches!((left, right), (Ok(l), Ok(r)) if l == target_i && r == target_m)
    });
    Ok(found)
}

/// Least candidate height at which the brute-force oracle finds an
/// interleaving.
pub fn interleaving_distance_bruteforce(
    poset: &WeightedPoset,
    i: &Rep,
    m: &Rep,
    cap: u128,
) -> Result<Rational> {
    for eps in poset.candidate_heights() {
        if interleaving_exists_bruteforce(poset, i, m, &eps, cap)? {
            return Ok(eps);
        }
    }
    unreachable!("the largest candidate height kills every internal map")
}

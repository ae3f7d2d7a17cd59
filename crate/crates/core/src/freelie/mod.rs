//! The free Lie algebra `L(H)` over `Z` in Lyndon coordinates.
//!
//! Elements are stored as integer combinations of Lyndon words, each word
//! standing for its standard (right) bracketing. The PBW embedding into the
//! tensor algebra is triangular in this basis: the expansion of a Lyndon
//! word `w` is `w` plus lexicographically larger words, which is what makes
//! [`lie_project`] an exact integer back-substitution.

mod derivation;
mod tensor;
mod wedge;

pub use derivation::{inner_derivation, omega, pp, pp1, pp_of_bracket, GradedDerivation};
pub use tensor::{left_normed_expansion, HomTensor, Monomial};
pub use wedge::{rho_truncate, Wedge, WedgeTensor};

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::{Error, Result};
use tensor::add_term;

/// Rank of `H` and, optionally, a symplectic structure. In the symplectic
/// case the basis order is `a_1..a_g, b_1..b_g`, so `a_i = e_i` and
/// `b_i = e_{g+i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisContext {
    rank: usize,
    genus: Option<usize>,
}

impl BasisContext {
    pub fn plain(rank: usize) -> Self {
        BasisContext { rank, genus: None }
    }

    pub fn symplectic(genus: usize) -> Self {
        BasisContext { rank: 2 * genus, genus: Some(genus) }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn genus(&self) -> Option<usize> {
        self.genus
    }

    pub fn is_symplectic(&self) -> bool {
        self.genus.is_some()
    }

    /// Index of `a_i`.
    pub fn a(&self, i: usize) -> u16 {
        i as u16
    }

    /// Index of `b_i`; only meaningful for symplectic contexts.
    pub fn b(&self, i: usize) -> u16 {
        (self.genus.unwrap_or(0) + i) as u16
    }

    /// Algebraic intersection pairing on basis vectors:
    /// `î(a_i, b_j) = δ_ij = -î(b_j, a_i)`, zero on `a`/`a` and `b`/`b`.
    pub fn pairing(&self, x: u16, y: u16) -> Result<i64> {
        let g = self.genus.ok_or(Error::NoSymplecticStructure)? as u16;
        let (x_is_a, y_is_a) = (x <= g, y <= g);
        let (xi, yi) = (if x_is_a { x } else { x - g }, if y_is_a { y } else { y - g });
        Ok(match (x_is_a, y_is_a) {
            (true, false) if xi == yi => 1,
            (false, true) if xi == yi => -1,
            _ => 0,
        })
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.rank {
            return Err(Error::IndexOutOfRange { index: i, rank: self.rank });
        }
        Ok(())
    }
}

/// A bracket expression in the basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bracket {
    Leaf(u16),
    Node(Box<Bracket>, Box<Bracket>),
}

impl Bracket {
    pub fn node(l: Bracket, r: Bracket) -> Self {
        Bracket::Node(Box::new(l), Box::new(r))
    }

    pub fn degree(&self) -> usize {
        match self {
            Bracket::Leaf(_) => 1,
            Bracket::Node(l, r) => l.degree() + r.degree(),
        }
    }

    /// The PBW expansion `[u, v] ↦ uv - vu`.
    pub fn expand(&self) -> BTreeMap<Monomial, BigInt> {
        match self {
            Bracket::Leaf(i) => {
                let mut m = BTreeMap::new();
                m.insert(alloc::vec![*i], BigInt::one());
                m
            }
            Bracket::Node(l, r) => {
                let (a, b) = (l.expand(), r.expand());
                let mut out = BTreeMap::new();
                for (x, cx) in &a {
                    for (y, cy) in &b {
                        let mut xy = x.clone();
                        xy.extend_from_slice(y);
                        add_term(&mut out, xy, cx * cy);
                        let mut yx = y.clone();
                        yx.extend_from_slice(x);
                        add_term(&mut out, yx, -(cx * cy));
                    }
                }
                out
            }
        }
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bracket::Leaf(i) => write!(f, "{}", i),
            Bracket::Node(l, r) => write!(f, "[{},{}]", l, r),
        }
    }
}

/// A word is Lyndon iff it is strictly smaller than each of its proper
/// suffixes (equivalently, than each proper rotation).
pub fn is_lyndon(w: &[u16]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// Standard factorization `w = uv` where `v` is the longest proper Lyndon
/// suffix. `None` for single letters.
pub fn standard_factorization(w: &[u16]) -> Option<(&[u16], &[u16])> {
    (1..w.len()).find(|&i| is_lyndon(&w[i..])).map(|i| w.split_at(i))
}

/// Standard bracketing of a Lyndon word.
pub fn lyndon_bracket(w: &[u16]) -> Bracket {
    match standard_factorization(w) {
        None => Bracket::Leaf(w[0]),
        Some((u, v)) => Bracket::node(lyndon_bracket(u), lyndon_bracket(v)),
    }
}

/// Number of Lyndon words of length `k` over `n` letters, by the necklace
/// formula `(1/k) Σ_{d|k} μ(d) n^{k/d}`; this is the rank of `L_k(Z^n)`.
pub fn witt_dimension(n: usize, k: usize) -> usize {
    if k == 0 {
        return 0;
    }
    let mobius = |d: usize| -> i128 {
        let (mut d, mut result, mut p) = (d, 1i128, 2);
        while p * p <= d {
            if d % p == 0 {
                d /= p;
                if d % p == 0 {
                    return 0;
                }
                result = -result;
            }
            p += 1;
        }
        if d > 1 {
            -result
        } else {
            result
        }
    };
    let s: i128 = (1..=k).filter(|d| k.is_multiple_of(*d)).map(|d| mobius(d) * (n as i128).pow((k / d) as u32)).sum();
    (s / k as i128) as usize
}

/// Whether the PBW images of the degree-`k` Lyndon basis are linearly
/// independent in `H^{⊗k}`. Full rank modulo the prime `2^61 - 1` implies
/// full rank over `Q`.
pub fn pbw_images_independent(n: usize, k: usize) -> Result<bool> {
    let words = lyndon_words(n, k);
    let mut cache = PbwCache::default();
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    let mut rows: Vec<Vec<(usize, BigInt)>> = Vec::with_capacity(words.len());
    for w in &words {
        let e = cache.get(w);
        let mut row = Vec::with_capacity(e.len());
        for (m, c) in e {
            let next = index.len();
            row.push((*index.entry(m.clone()).or_insert(next), c.clone()));
        }
        rows.push(row);
    }
    let dim = index.len();
    let dense: Vec<Vec<BigInt>> = rows
        .into_iter()
        .map(|r| {
            let mut v = alloc::vec![BigInt::zero(); dim];
            for (i, c) in r {
                v[i] = c;
            }
            v
        })
        .collect();
    let (rank, _) = crate::congruence::rank_mod_p(&dense, 1_000_000_007)?;
    Ok(rank == words.len())
}

/// A random integer combination of Lyndon words of degree `d` over the
/// letters `letters` (sorted, distinct), with coefficients in `-3..=3`.
pub fn random_lie_element<R: rand::Rng + ?Sized>(ctx: &BasisContext, letters: &[u16], d: usize, rng: &mut R) -> Result<LieElement> {
    let words = lyndon_words(letters.len(), d);
    let mut coords = Vec::new();
    for w in words {
        let c: i64 = rng.gen_range(-3..=3);
        if c != 0 {
            coords.push((w.iter().map(|&x| letters[x as usize - 1]).collect::<Monomial>(), BigInt::from(c)));
        }
    }
    LieElement::from_coords(ctx.clone(), d, coords)
}

/// Lyndon words of length exactly `k` over `1..=n`, in lexicographic order
/// (Duval's generation algorithm).
pub fn lyndon_words(n: usize, k: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    if n == 0 || k == 0 {
        return out;
    }
    let top = n as u16;
    let mut w: Vec<u16> = alloc::vec![1];
    loop {
        if w.len() == k {
            out.push(w.clone());
        }
        let m = w.len();
        while w.len() < k {
            let x = w[w.len() - m];
            w.push(x);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out
}

/// Bracketed Lyndon basis of `L_k(H)`.
pub fn lyndon_basis(ctx: &BasisContext, k: usize) -> Vec<Bracket> {
    lyndon_words(ctx.rank(), k).iter().map(|w| lyndon_bracket(w)).collect()
}

/// Caches PBW expansions of Lyndon words.
#[derive(Default)]
pub(crate) struct PbwCache {
    map: BTreeMap<Monomial, BTreeMap<Monomial, BigInt>>,
}

impl PbwCache {
    pub(crate) fn get(&mut self, w: &[u16]) -> &BTreeMap<Monomial, BigInt> {
        if !self.map.contains_key(w) {
            let e = match standard_factorization(w) {
                None => {
                    let mut m = BTreeMap::new();
                    m.insert(w.to_vec(), BigInt::one());
                    m
                }
                Some((u, v)) => {
                    let a = self.get(u).clone();
                    let b = self.get(v).clone();
                    let mut out = BTreeMap::new();
                    for (x, cx) in &a {
                        for (y, cy) in &b {
                            let mut xy = x.clone();
                            xy.extend_from_slice(y);
                            add_term(&mut out, xy, cx * cy);
                            let mut yx = y.clone();
                            yx.extend_from_slice(x);
                            add_term(&mut out, yx, -(cx * cy));
                        }
                    }
                    out
                }
            };
            self.map.insert(w.to_vec(), e);
        }
        &self.map[w]
    }
}

/// A homogeneous element of `L_k(H)` in Lyndon coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieElement {
    ctx: BasisContext,
    degree: usize,
    coords: BTreeMap<Monomial, BigInt>,
}

impl LieElement {
    pub fn zero(ctx: BasisContext, degree: usize) -> Self {
        LieElement { ctx, degree, coords: BTreeMap::new() }
    }

    /// The basis vector `e_i` in degree 1.
    pub fn generator(ctx: &BasisContext, i: usize) -> Result<Self> {
        ctx.check_index(i)?;
        let mut e = Self::zero(ctx.clone(), 1);
        e.coords.insert(alloc::vec![i as u16], BigInt::one());
        Ok(e)
    }

    /// A single Lyndon basis element with the given coefficient.
    pub fn basis(ctx: &BasisContext, word: &[u16], coeff: BigInt) -> Result<Self> {
        Self::from_coords(ctx.clone(), word.len(), [(word.to_vec(), coeff)])
    }

    pub fn from_coords<I>(ctx: BasisContext, degree: usize, coords: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut e = Self::zero(ctx, degree);
        for (w, c) in coords {
            if w.len() != degree || !is_lyndon(&w) {
                return Err(Error::NotLieElement(format!("{:?} is not a Lyndon word of length {}", w, degree)));
            }
            for &i in &w {
                e.ctx.check_index(i as usize)?;
            }
            add_term(&mut e.coords, w, c);
        }
        Ok(e)
    }

    pub fn context(&self) -> &BasisContext {
        &self.ctx
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coords(&self) -> &BTreeMap<Monomial, BigInt> {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    fn compatible(&self, other: &LieElement) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::InvalidDegree { degree: other.degree, reason: "degrees differ" });
        }
        Ok(())
    }

    pub fn add(&self, other: &LieElement) -> Result<LieElement> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coords {
            add_term(&mut out.coords, w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LieElement) -> Result<LieElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LieElement {
        self.scale(&-BigInt::one())
    }

    pub fn scale(&self, s: &BigInt) -> LieElement {
        let mut out = Self::zero(self.ctx.clone(), self.degree);
        if !s.is_zero() {
            out.coords = self.coords.iter().map(|(w, c)| (w.clone(), c * s)).collect();
        }
        out
    }

    pub(crate) fn add_assign_scaled(&mut self, other: &LieElement, s: &BigInt) {
        for (w, c) in &other.coords {
            add_term(&mut self.coords, w.clone(), c * s);
        }
    }

    /// The PBW image in `T(H)`.
    pub fn pbw_embed(&self) -> HomTensor {
        let mut cache = PbwCache::default();
        self.pbw_with(&mut cache)
    }

    pub(crate) fn pbw_with(&self, cache: &mut PbwCache) -> HomTensor {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.coords {
            for (m, cm) in cache.get(w) {
                add_term(&mut terms, m.clone(), c * cm);
            }
        }
        HomTensor::from_map(self.ctx.clone(), self.degree, terms)
    }

    /// `[self, other]`.
    pub fn bracket(&self, other: &LieElement) -> Result<LieElement> {
        let mut cache = PbwCache::default();
        self.bracket_with(other, &mut cache)
    }

    pub(crate) fn bracket_with(&self, other: &LieElement, cache: &mut PbwCache) -> Result<LieElement> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ctx.clone(), self.degree + other.degree));
        }
        let t = self.pbw_with(cache).commutator(&other.pbw_with(cache))?;
        triangular_solve(t, cache)
    }

    /// Evaluates an arbitrary bracket expression.
    pub fn from_bracket(ctx: &BasisContext, b: &Bracket) -> Result<LieElement> {
        match b {
            Bracket::Leaf(i) => Self::generator(ctx, *i as usize),
            Bracket::Node(l, r) => Self::from_bracket(ctx, l)?.bracket(&Self::from_bracket(ctx, r)?),
        }
    }

    /// Terms as `(bracketing, coefficient)` pairs.
    pub fn brackets(&self) -> impl Iterator<Item = (Bracket, &BigInt)> {
        self.coords.iter().map(|(w, c)| (lyndon_bracket(w), c))
    }

    /// True when every Lyndon word only uses indices in `indices`.
    pub fn supported_on(&self, indices: &[u16]) -> bool {
        self.coords.keys().all(|w| w.iter().all(|i| indices.contains(i)))
    }
}

/// Left-normed bracket `[..[[e_{i1}, e_{i2}], e_{i3}], ..., e_{ik}]`.
pub fn left_normed(ctx: &BasisContext, indices: &[usize]) -> Result<LieElement> {
    let (&first, rest) = indices
        .split_first()
        .ok_or(Error::InvalidDegree { degree: 0, reason: "left-normed bracket needs k >= 1" })?;
    let mut cache = PbwCache::default();
    let mut acc = LieElement::generator(ctx, first)?;
    for &i in rest {
        acc = acc.bracket_with(&LieElement::generator(ctx, i)?, &mut cache)?;
    }
    Ok(acc)
}

/// Inverse of the PBW embedding on its image.
///
/// The Dynkin criterion `D(t) = m t` is checked first; the coordinates are
/// then recovered by peeling off the smallest monomial, which must be a
/// Lyndon word, one word at a time.
pub fn lie_project(t: &HomTensor) -> Result<LieElement> {
    let m = t.degree();
    if m == 0 {
        return if t.is_zero() {
            Ok(LieElement::zero(t.context().clone(), 0))
        } else {
            Err(Error::NotLieElement("nonzero scalar".into()))
        };
    }
    if t.dynkin() != t.scale(&BigInt::from(m)) {
        return Err(Error::NotLieElement("Dynkin criterion D(t) = m t fails".into()));
    }
    let mut cache = PbwCache::default();
    triangular_solve(t.clone(), &mut cache)
}

fn triangular_solve(mut t: HomTensor, cache: &mut PbwCache) -> Result<LieElement> {
    let mut out = LieElement::zero(t.context().clone(), t.degree());
    while let Some((w, c)) = t.terms().iter().next().map(|(w, c)| (w.clone(), c.clone())) {
        if !is_lyndon(&w) {
            return Err(Error::NotLieElement(format!("leading monomial {:?} is not a Lyndon word", w)));
        }
        let p = HomTensor::from_map(t.context().clone(), t.degree(), cache.get(&w).clone());
        t.add_assign_scaled(&p, &-c.clone());
        add_term(&mut out.coords, w, c);
    }
    Ok(out)
}

/// One term per line, `coeff * [i,[j,k]]`; zero prints as `0`.
impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return f.write_str("0");
        }
        for (pos, (b, c)) in self.brackets().enumerate() {
            if pos > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{} * {}", c, b)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn mobius(n: usize) -> i64 {
        let (mut n, mut result, mut p) = (n, 1i64, 2);
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                result = -result;
            }
            p += 1;
        }
        if n > 1 {
            result = -result;
        }
        result
    }

    /// Necklace formula `(1/k) Σ_{d|k} μ(d) n^{k/d}`.
    fn necklace(n: usize, k: usize) -> usize {
        let s: i64 = (1..=k).filter(|d| k.is_multiple_of(*d)).map(|d| mobius(d) * (n as i64).pow((k / d) as u32)).sum();
        (s / k as i64) as usize
    }

    /// Lyndon check by comparing with every proper rotation.
    fn lyndon_by_rotation(w: &[u16]) -> bool {
        (1..w.len()).all(|r| {
            let mut rot = w[r..].to_vec();
            rot.extend_from_slice(&w[..r]);
            w < rot.as_slice()
        })
    }

    #[test]
    fn lyndon_counts_match_necklace_formula() {
        for n in 1..=4 {
            for k in 1..=8 {
                let words = lyndon_words(n, k);
                assert_eq!(words.len(), necklace(n, k), "n={n} k={k}");
                assert_eq!(witt_dimension(n, k), necklace(n, k));
                assert!(words.iter().all(|w| lyndon_by_rotation(w) && is_lyndon(w)));
            }
        }
    }

    #[test]
    fn random_elements_stay_on_letters() {
        use rand::SeedableRng;
        let ctx = BasisContext::symplectic(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for d in 1..=4 {
            let x = random_lie_element(&ctx, &[1, 2, 3], d, &mut rng).unwrap();
            assert!(x.supported_on(&[1, 2, 3]));
            assert_eq!(x.degree(), d);
        }
    }

    #[test]
    fn lyndon_basis_examples() {
        let c2 = BasisContext::plain(2);
        let b: Vec<_> = lyndon_basis(&c2, 2).iter().map(|b| b.to_string()).collect();
        assert_eq!(b, ["[1,2]"]);
        let b: Vec<_> = lyndon_basis(&c2, 3).iter().map(|b| b.to_string()).collect();
        assert_eq!(b, ["[1,[1,2]]", "[[1,2],2]"]);
        let b: Vec<_> = lyndon_basis(&BasisContext::plain(3), 1).iter().map(|b| b.to_string()).collect();
        assert_eq!(b, ["1", "2", "3"]);
    }

    #[test]
    fn pbw_examples() {
        let ctx = BasisContext::plain(3);
        let e12 = left_normed(&ctx, &[1, 2]).unwrap();
        let t = e12.pbw_embed();
        assert_eq!(t.coefficient(&[1, 2]), BigInt::from(1));
        assert_eq!(t.coefficient(&[2, 1]), BigInt::from(-1));
        assert_eq!(t.len(), 2);
        assert!(LieElement::zero(ctx.clone(), 3).pbw_embed().is_zero());
        assert_eq!(lie_project(&t).unwrap(), e12);
        let sym = HomTensor::from_terms(
            ctx.clone(),
            2,
            [(alloc::vec![1, 2], BigInt::one()), (alloc::vec![2, 1], BigInt::one())],
        )
        .unwrap();
        assert!(matches!(lie_project(&sym), Err(Error::NotLieElement(_))));
    }

    #[test]
    fn left_normed_expansion_sizes() {
        for k in 1..=7 {
            let ctx = BasisContext::plain(k + 1);
            let idx: Vec<usize> = (1..=k).collect();
            let t = left_normed(&ctx, &idx).unwrap().pbw_embed();
            assert_eq!(t.len(), 1 << (k - 1));
            assert!(t.terms().values().all(|c| c == &BigInt::one() || c == &-BigInt::one()));
            // only the identity permutation starts with e_1
            let lam_next = left_normed(&ctx, &(1..=k + 1).collect::<Vec<_>>()).unwrap().pbw_embed();
            let starting: Vec<_> = lam_next.terms().iter().filter(|(m, _)| m[0] == 1).collect();
            assert_eq!(starting.len(), 1);
            let ident: Vec<u16> = (1..=(k + 1) as u16).collect();
            assert_eq!(starting[0], (&ident, &BigInt::one()));
        }
    }

    #[test]
    fn bracket_examples() {
        let ctx = BasisContext::plain(3);
        let e = |i| LieElement::generator(&ctx, i).unwrap();
        let e12 = e(1).bracket(&e(2)).unwrap();
        assert_eq!(e12.to_string(), "1 * [1,2]");
        assert!(e12.bracket(&e12).unwrap().is_zero());
        // [e2, e1] = -[e1, e2]
        assert_eq!(e(2).bracket(&e(1)).unwrap(), e12.neg());
        let jac = e(1)
            .bracket(&e(2).bracket(&e(3)).unwrap())
            .unwrap()
            .add(&e(2).bracket(&e(3).bracket(&e(1)).unwrap()).unwrap())
            .unwrap()
            .add(&e(3).bracket(&e(1).bracket(&e(2)).unwrap()).unwrap())
            .unwrap();
        assert!(jac.is_zero());
        let ctx4 = BasisContext::plain(4);
        assert!(e(1).bracket(&LieElement::generator(&ctx4, 1).unwrap()).is_err());
    }

    #[test]
    fn pbw_expansions_unitriangular() {
        // The Lyndon word is the smallest monomial of its own expansion with
        // coefficient 1, so the expansions are unitriangular. Check it and the
        // full integer rank via Smith form for small cases.
        use crate::matrix::IntMatrix;
        use crate::snf::snf;
        for n in 1..=3 {
            for k in 1..=6 {
                let words = lyndon_words(n, k);
                let mut cache = PbwCache::default();
                let mut monos: BTreeMap<Monomial, usize> = BTreeMap::new();
                let exps: Vec<_> = words.iter().map(|w| cache.get(w).clone()).collect();
                for (w, e) in words.iter().zip(&exps) {
                    let (first, c) = e.iter().next().unwrap();
                    assert_eq!((first, c), (w, &BigInt::one()));
                    for m in e.keys() {
                        let next = monos.len();
                        monos.entry(m.clone()).or_insert(next);
                    }
                }
                let mut mat = IntMatrix::zeros(monos.len(), words.len());
                for (j, e) in exps.iter().enumerate() {
                    for (m, c) in e {
                        mat.set(monos[m], j, c.clone());
                    }
                }
                let s = snf(&mat);
                assert_eq!(s.rank, words.len(), "n={n} k={k}");
                assert!(s.diagonal().iter().all(|d| d.is_one()));
                assert!(super::pbw_images_independent(n, k).unwrap());
            }
        }
    }

    fn arb_lie(ctx: BasisContext, degree: usize) -> impl Strategy<Value = LieElement> {
        let words = lyndon_words(ctx.rank(), degree);
        let len = words.len();
        prop::collection::vec(-3i64..=3, len).prop_map(move |cs| {
            LieElement::from_coords(
                ctx.clone(),
                degree,
                words.iter().cloned().zip(cs.into_iter().map(BigInt::from)),
            )
            .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn project_round_trip(l in (1usize..=5).prop_flat_map(|d| arb_lie(BasisContext::plain(3), d))) {
            let t = l.pbw_embed();
            prop_assert_eq!(t.dynkin(), t.scale(&BigInt::from(l.degree())));
            prop_assert_eq!(lie_project(&t).unwrap(), l);
        }

        #[test]
        fn antisymmetry_and_jacobi(
            a in arb_lie(BasisContext::plain(3), 1),
            b in arb_lie(BasisContext::plain(3), 2),
            c in arb_lie(BasisContext::plain(3), 2),
        ) {
            prop_assert_eq!(a.bracket(&b).unwrap(), b.bracket(&a).unwrap().neg());
            let j = a.bracket(&b.bracket(&c).unwrap()).unwrap()
                .add(&b.bracket(&c.bracket(&a).unwrap()).unwrap()).unwrap()
                .add(&c.bracket(&a.bracket(&b).unwrap()).unwrap()).unwrap();
            prop_assert!(j.is_zero());
        }
    }
}

//! Truncated Magnus expansions `x_i ↦ 1 + X_i` in the noncommutative power
//! series ring over `Z` or `Z/p`.
//!
//! The lowest nonconstant degree of `M(w) - 1` over `Z` is the lower
//! central series weight of `w` (Magnus), and over `Z/p` it is the
//! Zassenhaus (dimension subgroup) weight (Jennings–Zassenhaus). Both
//! theorems are external; the consistency contracts are tested here.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::freelie::{BasisContext, HomTensor, Monomial};
use crate::words::FreeWord;
use crate::{Error, Result};

/// Lowest nonconstant degree of an expansion, or a lower bound when the
/// expansion is trivial up to the cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiltrationWeight {
    Exact(usize),
    AtLeast(usize),
}

impl FiltrationWeight {
    /// The guaranteed lower bound.
    pub fn bound(self) -> usize {
        match self {
            FiltrationWeight::Exact(k) | FiltrationWeight::AtLeast(k) => k,
        }
    }

    pub fn at_least(self, k: usize) -> bool {
        self.bound() >= k
    }
}

impl fmt::Display for FiltrationWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiltrationWeight::Exact(k) => write!(f, "{}", k),
            FiltrationWeight::AtLeast(k) => write!(f, ">={}", k),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// A noncommutative power series truncated above total degree `cap`, with
/// coefficients in `Z` (`modulus == 0`) or `Z/p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    rank: usize,
    cap: usize,
    modulus: u64,
    terms: BTreeMap<Monomial, BigInt>,
}

impl TruncatedSeries {
    pub fn one(rank: usize, cap: usize, modulus: u64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), BigInt::one());
        TruncatedSeries { rank, cap, modulus, terms }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigInt> {
        &self.terms
    }

    pub fn coefficient(&self, m: &[u16]) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    fn normalize(&self, c: BigInt) -> BigInt {
        if self.modulus == 0 {
            c
        } else {
            c.mod_floor(&BigInt::from(self.modulus))
        }
    }

    fn accumulate(&self, terms: &mut BTreeMap<Monomial, BigInt>, key: Monomial, c: BigInt) {
        let e = terms.entry(key.clone()).or_insert_with(BigInt::zero);
        *e += c;
        let v = self.normalize(core::mem::take(e));
        if v.is_zero() {
            terms.remove(&key);
        } else {
            terms.insert(key, v);
        }
    }

    fn check(&self, other: &TruncatedSeries) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { left: self.rank, right: other.rank });
        }
        if self.cap != other.cap || self.modulus != other.modulus {
            return Err(Error::InvalidParameter("series differ in cap or modulus".into()));
        }
        Ok(())
    }

    /// Truncated product.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check(other)?;
        let mut terms = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.len() + b.len() > self.cap {
                    continue;
                }
                let mut key = a.clone();
                key.extend_from_slice(b);
                self.accumulate(&mut terms, key, ca * cb);
            }
        }
        Ok(TruncatedSeries { terms, ..self.clone() })
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            self.accumulate(&mut terms, m.clone(), -c);
        }
        Ok(TruncatedSeries { terms, ..self.clone() })
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coefficient(&[]).is_one()
    }

    /// Least degree `d >= 1` carrying a nonzero term.
    pub fn weight(&self) -> FiltrationWeight {
        self.terms
            .keys()
            .map(Vec::len)
            .filter(|&d| d >= 1)
            .min()
            .map_or(FiltrationWeight::AtLeast(self.cap + 1), FiltrationWeight::Exact)
    }

    /// Homogeneous degree-`d` component as a tensor.
    pub fn degree_part(&self, d: usize) -> HomTensor {
        let terms = self.terms.iter().filter(|(m, _)| m.len() == d).map(|(m, c)| (m.clone(), c.clone()));
        HomTensor::from_terms(BasisContext::plain(self.rank), d, terms).expect("homogeneous by construction")
    }
}

/// Sorted lines `coefficient * X_{i1}...X_{im}`; the constant term prints as
/// `coefficient * 1`.
impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        for (pos, m) in keys.into_iter().enumerate() {
            if pos > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{} * ", self.terms[m])?;
            if m.is_empty() {
                f.write_str("1")?;
            }
            for i in m {
                write!(f, "X{}", i)?;
            }
        }
        Ok(())
    }
}

/// Coefficient arithmetic for the dense expansion kernel. Operations return
/// `None` on overflow, which sends the caller to the big-integer path.
trait Coeffs {
    type C: Clone;
    fn zero(&self) -> Self::C;
    fn one(&self) -> Self::C;
    fn add(&self, a: &Self::C, b: &Self::C) -> Option<Self::C>;
    fn sub(&self, a: &Self::C, b: &Self::C) -> Option<Self::C>;
    fn is_zero(&self, a: &Self::C) -> bool;
    fn lift(&self, a: &Self::C) -> BigInt;
}

struct Checked;
impl Coeffs for Checked {
    type C = i64;
    fn zero(&self) -> i64 {
        0
    }
    fn one(&self) -> i64 {
        1
    }
    fn add(&self, a: &i64, b: &i64) -> Option<i64> {
        a.checked_add(*b)
    }
    fn sub(&self, a: &i64, b: &i64) -> Option<i64> {
        a.checked_sub(*b)
    }
    fn is_zero(&self, a: &i64) -> bool {
        *a == 0
    }
    fn lift(&self, a: &i64) -> BigInt {
        BigInt::from(*a)
    }
}

struct Big;
impl Coeffs for Big {
    type C = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(a + b)
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(a - b)
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn lift(&self, a: &BigInt) -> BigInt {
        a.clone()
    }
}

struct ModP(u64);
impl Coeffs for ModP {
    type C = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.0
    }
    fn add(&self, a: &u64, b: &u64) -> Option<u64> {
        Some(((*a as u128 + *b as u128) % self.0 as u128) as u64)
    }
    fn sub(&self, a: &u64, b: &u64) -> Option<u64> {
        Some(((*a as u128 + self.0 as u128 - *b as u128) % self.0 as u128) as u64)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn lift(&self, a: &u64) -> BigInt {
        BigInt::from(*a)
    }
}

/// Dense expansion over the support alphabet of the word. Block `d` holds
/// the degree-`d` coefficients indexed in base `n` (first letter most
/// significant).
fn expand_dense<R: Coeffs>(ring: &R, letters: &[(usize, bool)], n: usize, cap: usize) -> Option<Vec<Vec<R::C>>> {
    let mut blocks: Vec<Vec<R::C>> = (0..=cap).map(|d| alloc::vec![ring.zero(); n.pow(d as u32)]).collect();
    blocks[0][0] = ring.one();
    for &(a, inverse) in letters {
        if inverse {
            // S (1 + X_a)^{-1}: S'_d = S_d - S'_{d-1} X_a, ascending in d
            for d in 1..=cap {
                let (lo, hi) = blocks.split_at_mut(d);
                let prev = &lo[d - 1];
                let cur = &mut hi[0];
                for (w, c) in prev.iter().enumerate() {
                    if ring.is_zero(c) {
                        continue;
                    }
                    let slot = &mut cur[w * n + a];
                    *slot = ring.sub(slot, c)?;
                }
            }
        } else {
            // S (1 + X_a): descending in d so lower blocks are still old
            for d in (1..=cap).rev() {
                let (lo, hi) = blocks.split_at_mut(d);
                let prev = &lo[d - 1];
                let cur = &mut hi[0];
                for (w, c) in prev.iter().enumerate() {
                    if ring.is_zero(c) {
                        continue;
                    }
                    let slot = &mut cur[w * n + a];
                    *slot = ring.add(slot, c)?;
                }
            }
        }
    }
    Some(blocks)
}

fn collect_dense<R: Coeffs>(ring: &R, blocks: &[Vec<R::C>], alphabet: &[u16]) -> BTreeMap<Monomial, BigInt> {
    let n = alphabet.len();
    let mut terms = BTreeMap::new();
    for (d, block) in blocks.iter().enumerate() {
        for (idx, c) in block.iter().enumerate() {
            if ring.is_zero(c) {
                continue;
            }
            let mut key = alloc::vec![0u16; d];
            let mut rest = idx;
            for slot in key.iter_mut().rev() {
                *slot = alphabet[rest % n.max(1)];
                rest /= n.max(1);
            }
            terms.insert(key, ring.lift(c));
        }
    }
    terms
}

/// Magnus expansion of `w` truncated above degree `cap`.
pub fn expand(w: &FreeWord, cap: usize, modulus: u64) -> Result<TruncatedSeries> {
    if cap == 0 {
        return Err(Error::InvalidParameter("degree cap must be at least 1".into()));
    }
    if modulus != 0 && !is_prime(modulus) {
        return Err(Error::NotPrime(modulus));
    }
    let alphabet: Vec<u16> = w.support().into_iter().map(|i| i as u16).collect();
    let n = alphabet.len();
    let letters: Vec<(usize, bool)> = w
        .letters()
        .iter()
        .map(|l| (alphabet.binary_search(&(l.index() as u16)).expect("in support"), l.is_inverse()))
        .collect();
    let terms = if n == 0 {
        let mut t = BTreeMap::new();
        t.insert(Vec::new(), BigInt::one());
        t
    } else if modulus == 0 {
        match expand_dense(&Checked, &letters, n, cap) {
            Some(b) => collect_dense(&Checked, &b, &alphabet),
            None => {
                let b = expand_dense(&Big, &letters, n, cap).expect("big integers do not overflow");
                collect_dense(&Big, &b, &alphabet)
            }
        }
    } else {
        let ring = ModP(modulus);
        let b = expand_dense(&ring, &letters, n, cap).expect("modular arithmetic does not overflow");
        collect_dense(&ring, &b, &alphabet)
    };
    Ok(TruncatedSeries { rank: w.rank(), cap, modulus, terms })
}

/// Lower central series weight: `w ∈ γ_k` iff the result is at least `k`.
pub fn lcs_weight(w: &FreeWord, cap: usize) -> Result<FiltrationWeight> {
    Ok(expand(w, cap, 0)?.weight())
}

/// Zassenhaus weight: `w ∈ γ_k^Z` iff the result is at least `k`.
pub fn zassenhaus_weight(w: &FreeWord, p: u64, cap: usize) -> Result<FiltrationWeight> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(expand(w, cap, p)?.weight())
}

/// Leading homogeneous part of `M(w) - 1`, which is the PBW image of the
/// class of `w` in `gr_k(F_n) ≅ L_k(H)`.
pub fn leading_part(w: &FreeWord, cap: usize) -> Result<HomTensor> {
    let s = expand(w, cap, 0)?;
    match s.weight() {
        FiltrationWeight::Exact(k) => Ok(s.degree_part(k)),
        FiltrationWeight::AtLeast(_) => Err(Error::WeightExceedsCap { cap }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freelie::{lie_project, left_normed};
    use crate::words::Letter;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn x(rank: usize, i: usize) -> FreeWord {
        FreeWord::generator(rank, i).unwrap()
    }

    /// Independent oracle: multiply letter series one by one with the
    /// sparse truncated product.
    fn naive_expand(w: &FreeWord, cap: usize, modulus: u64) -> TruncatedSeries {
        let mut acc = TruncatedSeries::one(w.rank(), cap, modulus);
        for l in w.letters() {
            let mut s = TruncatedSeries::one(w.rank(), cap, modulus);
            let i = l.index() as u16;
            let mut terms = BTreeMap::new();
            terms.insert(Vec::new(), BigInt::one());
            for d in 1..=cap {
                let c = if l.is_inverse() && d % 2 == 1 { -BigInt::one() } else { BigInt::one() };
                if !l.is_inverse() && d > 1 {
                    break;
                }
                s.accumulate(&mut terms, alloc::vec![i; d], c);
            }
            s.terms = terms;
            acc = acc.mul(&s).unwrap();
        }
        acc
    }

    #[test]
    fn expand_examples() {
        assert_eq!(expand(&x(2, 1), 3, 0).unwrap().to_string(), "1 * 1\n1 * X1");
        assert_eq!(expand(&x(2, 1).invert(), 2, 0).unwrap().to_string(), "1 * 1\n-1 * X1\n1 * X1X1");
        let c = x(2, 1).commutator(&x(2, 2)).unwrap();
        let s = expand(&c, 2, 0).unwrap();
        let d2 = s.degree_part(2);
        assert_eq!(d2.to_string(), "1 * e1⊗e2\n-1 * e2⊗e1");
        assert_eq!(s, naive_expand(&c, 2, 0));
        assert!(expand(&x(2, 1), 2, 4).is_err());
    }

    #[test]
    fn weight_examples() {
        let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
        assert_eq!(lcs_weight(&x1, 4).unwrap(), FiltrationWeight::Exact(1));
        let c12 = x1.commutator(&x2).unwrap();
        assert_eq!(lcs_weight(&c12, 4).unwrap(), FiltrationWeight::Exact(2));
        let c123 = c12.commutator(&x3).unwrap();
        assert_eq!(lcs_weight(&c123, 4).unwrap(), FiltrationWeight::Exact(3));
        assert_eq!(lcs_weight(&FreeWord::identity(3), 4).unwrap(), FiltrationWeight::AtLeast(5));
        assert_eq!(zassenhaus_weight(&x1.pow(2), 2, 4).unwrap(), FiltrationWeight::Exact(2));
        for p in [2u64, 3, 5] {
            assert_eq!(zassenhaus_weight(&x1.pow(p as i64), p, 6).unwrap(), FiltrationWeight::Exact(p as usize));
            assert_eq!(zassenhaus_weight(&c12, p, 4).unwrap(), FiltrationWeight::Exact(2));
        }
        assert_eq!(zassenhaus_weight(&x1, 4, 3), Err(Error::NotPrime(4)));
    }

    #[test]
    fn leading_part_examples() {
        let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
        let lp = leading_part(&x1.commutator(&x2).unwrap(), 3).unwrap();
        assert_eq!(lp.to_string(), "1 * e1⊗e2\n-1 * e2⊗e1");
        let lp = leading_part(&x1.pow(3), 3).unwrap();
        assert_eq!(lp.to_string(), "3 * e1");
        let c123 = x1.commutator(&x2).unwrap().commutator(&x3).unwrap();
        let lp = leading_part(&c123, 4).unwrap();
        let ctx = BasisContext::plain(3);
        assert_eq!(lp, left_normed(&ctx, &[1, 2, 3]).unwrap().pbw_embed());
        assert_eq!(leading_part(&FreeWord::identity(3), 3), Err(Error::WeightExceedsCap { cap: 3 }));
    }

    #[test]
    fn inverse_letters_long_word() {
        // x1^-5 at cap 6 over Z: alternating binomial coefficients
        let s = expand(&x(1, 1).pow(-5), 6, 0).unwrap();
        let expected = [1i64, -5, 15, -35, 70, -126, 210];
        for (d, e) in expected.iter().enumerate() {
            assert_eq!(s.coefficient(&alloc::vec![1u16; d]), BigInt::from(*e));
        }
    }

    fn arb_word(rank: usize, max_len: usize) -> impl Strategy<Value = FreeWord> {
        prop::collection::vec((1..=rank, any::<bool>()), 0..max_len).prop_map(move |v| {
            FreeWord::reduce(v.into_iter().map(|(i, s)| Letter::new(i, s)), rank).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn multiplicative(u in arb_word(3, 10), v in arb_word(3, 10)) {
            let lhs = expand(&u.multiply(&v).unwrap(), 4, 0).unwrap();
            let rhs = expand(&u, 4, 0).unwrap().mul(&expand(&v, 4, 0).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn dense_matches_naive(u in arb_word(3, 12), p in prop::sample::select(alloc::vec![0u64, 2, 3, 5])) {
            prop_assert_eq!(expand(&u, 4, p).unwrap(), naive_expand(&u, 4, p));
        }

        #[test]
        fn inverse_expansion(u in arb_word(3, 10)) {
            let prod = expand(&u.invert(), 4, 0).unwrap().mul(&expand(&u, 4, 0).unwrap()).unwrap();
            prop_assert!(prod.is_one());
        }

        #[test]
        fn commutator_weight_adds(u in arb_word(3, 6), v in arb_word(3, 6)) {
            let cap = 6;
            let (wu, wv) = (lcs_weight(&u, cap).unwrap(), lcs_weight(&v, cap).unwrap());
            let wc = lcs_weight(&u.commutator(&v).unwrap(), cap).unwrap();
            prop_assert!(wc.bound() >= (wu.bound() + wv.bound()).min(cap + 1));
        }

        #[test]
        fn leading_parts_are_lie_elements(u in arb_word(3, 6), v in arb_word(3, 6)) {
            let w = u.commutator(&v).unwrap();
            if let Ok(lp) = leading_part(&w, 5) {
                let m = lp.degree();
                prop_assert_eq!(lp.dynkin(), lp.scale(&BigInt::from(m)));
                prop_assert!(lie_project(&lp).is_ok());
            }
        }

        #[test]
        fn leading_parts_add_in_equal_weight(a in arb_word(3, 4), b in arb_word(3, 4), c in arb_word(3, 4), d in arb_word(3, 4)) {
            let u = a.commutator(&b).unwrap();
            let v = c.commutator(&d).unwrap();
            let cap = 5;
            if let (Ok(lu), Ok(lv)) = (leading_part(&u, cap), leading_part(&v, cap)) {
                if lu.degree() == lv.degree() {
                    let sum = lu.add(&lv).unwrap();
                    let prod = u.multiply(&v).unwrap();
                    if !sum.is_zero() {
                        prop_assert_eq!(leading_part(&prod, cap).unwrap(), sum);
                    } else {
                        prop_assert!(lcs_weight(&prod, cap).unwrap().bound() > lu.degree());
                    }
                }
            }
        }

        #[test]
        fn zassenhaus_power_contract(u in arb_word(3, 5), j in 1u32..=2, p in prop::sample::select(alloc::vec![2u64, 3])) {
            // u of lcs weight i: u^{p^j} has Zassenhaus weight >= i p^j
            let cap = 6;
            let i = lcs_weight(&u, cap).unwrap().bound();
            let e = p.pow(j) as i64;
            let target = (i * e as usize).min(cap + 1);
            let z = zassenhaus_weight(&u.pow(e), p, cap).unwrap();
            prop_assert!(z.bound() >= target);
        }
    }
}

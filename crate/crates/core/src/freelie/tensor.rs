use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::BasisContext;
use crate::{Error, Result};

/// A word in the basis indices, 1-based. Used both for monomials of the
/// tensor algebra and for Lyndon words.
pub type Monomial = Vec<u16>;

pub(crate) fn add_term(terms: &mut BTreeMap<Monomial, BigInt>, key: Monomial, c: BigInt) {
    if c.is_zero() {
        return;
    }
    use alloc::collections::btree_map::Entry;
    match terms.entry(key) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// A homogeneous element of the tensor algebra `T(H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomTensor {
    ctx: BasisContext,
    degree: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl HomTensor {
    pub fn zero(ctx: BasisContext, degree: usize) -> Self {
        HomTensor { ctx, degree, terms: BTreeMap::new() }
    }

    pub fn monomial(ctx: BasisContext, word: Monomial, coeff: BigInt) -> Result<Self> {
        for &i in &word {
            if i == 0 || i as usize > ctx.rank() {
                return Err(Error::IndexOutOfRange { index: i as usize, rank: ctx.rank() });
            }
        }
        let mut t = Self::zero(ctx, word.len());
        add_term(&mut t.terms, word, coeff);
        Ok(t)
    }

    /// Builds a tensor from `(monomial, coefficient)` pairs; all monomials
    /// must have length `degree`.
    pub fn from_terms<I>(ctx: BasisContext, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut t = Self::zero(ctx, degree);
        for (m, c) in terms {
            if m.len() != degree {
                return Err(Error::InvalidDegree { degree: m.len(), reason: "tensor is not homogeneous" });
            }
            if let Some(&i) = m.iter().find(|&&i| i == 0 || i as usize > t.ctx.rank()) {
                return Err(Error::IndexOutOfRange { index: i as usize, rank: t.ctx.rank() });
            }
            add_term(&mut t.terms, m, c);
        }
        Ok(t)
    }

    pub(crate) fn from_map(ctx: BasisContext, degree: usize, terms: BTreeMap<Monomial, BigInt>) -> Self {
        HomTensor { ctx, degree, terms }
    }

    pub fn context(&self) -> &BasisContext {
        &self.ctx
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigInt> {
        &self.terms
    }

    pub fn coefficient(&self, m: &[u16]) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn compatible(&self, other: &HomTensor) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::InvalidDegree { degree: other.degree, reason: "degrees differ" });
        }
        Ok(())
    }

    pub fn add(&self, other: &HomTensor) -> Result<HomTensor> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            add_term(&mut out.terms, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HomTensor) -> Result<HomTensor> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> HomTensor {
        self.scale(&-BigInt::one())
    }

    pub fn scale(&self, s: &BigInt) -> HomTensor {
        let mut out = Self::zero(self.ctx.clone(), self.degree);
        if !s.is_zero() {
            out.terms = self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect();
        }
        out
    }

    pub(crate) fn add_assign_scaled(&mut self, other: &HomTensor, s: &BigInt) {
        for (m, c) in &other.terms {
            add_term(&mut self.terms, m.clone(), c * s);
        }
    }

    /// Concatenation product in `T(H)`.
    pub fn mul(&self, other: &HomTensor) -> Result<HomTensor> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        let mut terms = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut key = a.clone();
                key.extend_from_slice(b);
                add_term(&mut terms, key, ca * cb);
            }
        }
        Ok(HomTensor { ctx: self.ctx.clone(), degree: self.degree + other.degree, terms })
    }

    /// `ab - ba`.
    pub fn commutator(&self, other: &HomTensor) -> Result<HomTensor> {
        let mut ab = self.mul(other)?;
        let ba = other.mul(self)?;
        ab.add_assign_scaled(&ba, &-BigInt::one());
        Ok(ab)
    }

    /// Dynkin operator: each monomial `X_{i1}...X_{im}` is replaced by the
    /// expansion of the left-normed bracket `[..[X_{i1}, X_{i2}], ..., X_{im}]`.
    /// A homogeneous tensor of degree `m` is a Lie element iff `D(t) = m t`.
    pub fn dynkin(&self) -> HomTensor {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            for (expanded, sign) in left_normed_expansion(m) {
                add_term(&mut terms, expanded, c * BigInt::from(sign));
            }
        }
        HomTensor { ctx: self.ctx.clone(), degree: self.degree, terms }
    }

    /// Applies the dual functional `e_i^*` to the first tensor factor.
    pub fn contract_first(&self, i: u16) -> HomTensor {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.first() == Some(&i) {
                add_term(&mut terms, m[1..].to_vec(), c.clone());
            }
        }
        HomTensor { ctx: self.ctx.clone(), degree: self.degree.saturating_sub(1), terms }
    }

    /// Keeps only monomials whose letters all lie in `indices`.
    pub fn restrict(&self, indices: &[u16]) -> HomTensor {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.iter().all(|i| indices.contains(i)))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        HomTensor { ctx: self.ctx.clone(), degree: self.degree, terms }
    }
}

/// Monomials of the left-normed bracket of the letters of `word`, with signs.
/// There are `2^(len-1)` of them and they are pairwise distinct as
/// positional expansions (though letters may coincide).
pub fn left_normed_expansion(word: &[u16]) -> Vec<(Monomial, i64)> {
    let Some((&first, rest)) = word.split_first() else {
        return alloc::vec![(Vec::new(), 1)];
    };
    let mut acc: Vec<(Monomial, i64)> = alloc::vec![(alloc::vec![first], 1)];
    for &x in rest {
        let mut next = Vec::with_capacity(acc.len() * 2);
        for (m, s) in &acc {
            let mut right = m.clone();
            right.push(x);
            next.push((right, *s));
            let mut left = alloc::vec![x];
            left.extend_from_slice(m);
            next.push((left, -*s));
        }
        acc = next;
    }
    acc
}

impl fmt::Display for HomTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (pos, (m, c)) in self.terms.iter().enumerate() {
            if pos > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{} *", c)?;
            if m.is_empty() {
                f.write_str(" 1")?;
            }
            for (k, i) in m.iter().enumerate() {
                f.write_str(if k == 0 { " " } else { "⊗" })?;
                write!(f, "e{}", i)?;
            }
        }
        Ok(())
    }
}

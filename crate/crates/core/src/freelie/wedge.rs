use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{BasisContext, LieElement};
use crate::{Error, Result};

/// Sorts `idx` in place and returns the permutation sign, or `None` when
/// an index repeats (the wedge vanishes).
fn sort_with_sign(idx: &mut [u16]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

fn add<K: Ord>(terms: &mut BTreeMap<K, BigInt>, key: K, c: BigInt) {
    use alloc::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
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

/// An element of `Λ^k H`, keyed by strictly increasing index tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wedge {
    k: usize,
    terms: BTreeMap<Vec<u16>, BigInt>,
}

impl Wedge {
    pub fn zero(k: usize) -> Self {
        Wedge { k, terms: BTreeMap::new() }
    }

    /// `e_{i1} ∧ ... ∧ e_{ik}`, normalized to increasing order.
    pub fn basis(indices: &[u16]) -> Self {
        let mut w = Self::zero(indices.len());
        let mut idx = indices.to_vec();
        if let Some(s) = sort_with_sign(&mut idx) {
            w.terms.insert(idx, BigInt::from(s));
        }
        w
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u16>, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for Wedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (pos, (idx, c)) in self.terms.iter().enumerate() {
            if pos > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{} * ", c)?;
            write_wedge(f, idx)?;
        }
        Ok(())
    }
}

fn write_wedge(f: &mut fmt::Formatter<'_>, idx: &[u16]) -> fmt::Result {
    if idx.is_empty() {
        return f.write_str("1");
    }
    for (k, j) in idx.iter().enumerate() {
        if k > 0 {
            f.write_str("∧")?;
        }
        write!(f, "e{}", j)?;
    }
    Ok(())
}

/// An element of `H ⊗ Λ^k H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeTensor {
    ctx: BasisContext,
    k: usize,
    terms: BTreeMap<(u16, Vec<u16>), BigInt>,
}

impl WedgeTensor {
    pub fn zero(ctx: BasisContext, k: usize) -> Self {
        WedgeTensor { ctx, k, terms: BTreeMap::new() }
    }

    pub fn context(&self) -> &BasisContext {
        &self.ctx
    }

    pub fn wedge_degree(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &BTreeMap<(u16, Vec<u16>), BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * e_i ⊗ (e_{j1} ∧ ... ∧ e_{jk})`, normalizing the wedge.
    pub fn add_term(&mut self, i: u16, wedge: &[u16], c: BigInt) {
        let mut idx = wedge.to_vec();
        if let Some(s) = sort_with_sign(&mut idx) {
            add(&mut self.terms, (i, idx), c * BigInt::from(s));
        }
    }

    pub fn add(&self, other: &WedgeTensor) -> Result<WedgeTensor> {
        if self.ctx != other.ctx || self.k != other.k {
            return Err(Error::ContextMismatch);
        }
        let mut out = self.clone();
        for (key, c) in &other.terms {
            add(&mut out.terms, key.clone(), c.clone());
        }
        Ok(out)
    }

    /// `(e_i^* ⊗ id)`: the `Λ^k H` component paired with `e_i`.
    pub fn contract_first(&self, i: u16) -> Wedge {
        let mut w = Wedge::zero(self.k);
        for ((first, idx), c) in &self.terms {
            if *first == i {
                add(&mut w.terms, idx.clone(), c.clone());
            }
        }
        w
    }
}

/// One term per line: `coeff * e<i> ^ e<j1>∧...∧e<jk>`.
impl fmt::Display for WedgeTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (pos, ((i, idx), c)) in self.terms.iter().enumerate() {
            if pos > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{} * e{} ^ ", c, i)?;
            write_wedge(f, idx)?;
        }
        Ok(())
    }
}

/// `ρ: L_{k+1}(H) → H^{⊗(k+1)} → H ⊗ Λ^k H`: PBW-embed, keep the first
/// tensor factor and antisymmetrize the remaining `k`.
pub fn rho_truncate(l: &LieElement) -> Result<WedgeTensor> {
    if l.degree() < 2 {
        return Err(Error::InvalidDegree { degree: l.degree(), reason: "rho needs degree >= 2" });
    }
    let mut out = WedgeTensor::zero(l.context().clone(), l.degree() - 1);
    for (m, c) in l.pbw_embed().terms() {
        out.add_term(m[0], &m[1..], c.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freelie::left_normed;
    use alloc::string::ToString;
    use num_traits::One;

    #[test]
    fn rho_in_degree_two_is_the_tensor() {
        let ctx = BasisContext::plain(2);
        let r = rho_truncate(&left_normed(&ctx, &[1, 2]).unwrap()).unwrap();
        assert_eq!(r.to_string(), "1 * e1 ^ e2\n-1 * e2 ^ e1");
        assert!(rho_truncate(&LieElement::generator(&ctx, 1).unwrap()).is_err());
    }

    #[test]
    fn lambda_certificate_up_to_six() {
        for k in 1..=6usize {
            let ctx = BasisContext::plain(k + 1);
            let idx: Vec<usize> = (1..=k + 1).collect();
            let r = rho_truncate(&left_normed(&ctx, &idx).unwrap()).unwrap();
            let w = r.contract_first(1);
            let expect: Vec<u16> = (2..=(k + 1) as u16).collect();
            assert_eq!(w, Wedge::basis(&expect), "k={k}");
            assert_eq!(w.terms()[&expect], BigInt::one());
        }
    }

    #[test]
    fn rho_is_linear() {
        // ρ([[e1,e2],e1]) directly vs ρ of the sum written out by brackets
        let ctx = BasisContext::plain(2);
        let e1 = LieElement::generator(&ctx, 1).unwrap();
        let e2 = LieElement::generator(&ctx, 2).unwrap();
        let x = e1.bracket(&e2).unwrap().bracket(&e1).unwrap();
        let direct = rho_truncate(&x).unwrap();
        // [[e1,e2],e1] = -[e1,[e1,e2]]
        let y = e1.bracket(&e1.bracket(&e2).unwrap()).unwrap();
        let via = rho_truncate(&y).unwrap();
        let mut neg = WedgeTensor::zero(ctx, 2);
        for ((i, idx), c) in via.terms() {
            neg.add_term(*i, idx, -c);
        }
        assert_eq!(direct, neg);
        // e1 ⊗ (e1∧e2) terms survive: ρ is nonzero here
        assert!(!direct.is_zero());
    }

    #[test]
    fn wedge_normalization() {
        assert_eq!(Wedge::basis(&[3, 1, 2]).terms()[&alloc::vec![1, 2, 3]], BigInt::one());
        assert_eq!(Wedge::basis(&[2, 1]).terms()[&alloc::vec![1, 2]], -BigInt::one());
        assert!(Wedge::basis(&[2, 2]).is_zero());
    }
}

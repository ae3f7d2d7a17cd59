use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::tensor::add_term;
use super::{standard_factorization, triangular_solve, BasisContext, Bracket, HomTensor, LieElement, Monomial, PbwCache};
use crate::{Error, Result};

/// A degree-`k` derivation of `L(H)`, stored by the images of the basis
/// vectors `e_1..e_n`, each in `L_{k+1}(H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDerivation {
    ctx: BasisContext,
    degree: usize,
    images: Vec<LieElement>,
}

impl GradedDerivation {
    pub fn zero(ctx: BasisContext, degree: usize) -> Self {
        let images = (0..ctx.rank()).map(|_| LieElement::zero(ctx.clone(), degree + 1)).collect();
        GradedDerivation { ctx, degree, images }
    }

    pub fn new(ctx: BasisContext, degree: usize, images: Vec<LieElement>) -> Result<Self> {
        if images.len() != ctx.rank() {
            return Err(Error::DimensionMismatch { expected: ctx.rank(), found: images.len() });
        }
        for im in &images {
            if im.context() != &ctx {
                return Err(Error::ContextMismatch);
            }
            if im.degree() != degree + 1 {
                return Err(Error::InvalidDegree { degree: im.degree(), reason: "image degree must be k+1" });
            }
        }
        Ok(GradedDerivation { ctx, degree, images })
    }

    pub fn context(&self) -> &BasisContext {
        &self.ctx
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn images(&self) -> &[LieElement] {
        &self.images
    }

    /// Image of `e_i` (1-based).
    pub fn image(&self, i: usize) -> &LieElement {
        &self.images[i - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(LieElement::is_zero)
    }

    pub fn add(&self, other: &GradedDerivation) -> Result<GradedDerivation> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        let images = self.images.iter().zip(&other.images).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(GradedDerivation { ctx: self.ctx.clone(), degree: self.degree, images })
    }

    pub fn scale(&self, s: &BigInt) -> GradedDerivation {
        let images = self.images.iter().map(|a| a.scale(s)).collect();
        GradedDerivation { ctx: self.ctx.clone(), degree: self.degree, images }
    }

    pub fn sub(&self, other: &GradedDerivation) -> Result<GradedDerivation> {
        self.add(&other.scale(&-BigInt::one()))
    }

    /// Extends the derivation to all of `L(H)` by the Leibniz rule, applied
    /// to the PBW image in `T(H)`: `d(x_1..x_m) = Σ_j x_1..d(x_j)..x_m`.
    pub fn apply(&self, l: &LieElement) -> Result<LieElement> {
        let mut cache = PbwCache::default();
        let imgs = self.image_tensors(&mut cache);
        self.apply_with(l, &imgs, &mut cache)
    }

    fn image_tensors(&self, cache: &mut PbwCache) -> Vec<Terms> {
        self.images.iter().map(|im| im.pbw_with(cache).terms().clone()).collect()
    }

    fn apply_with(&self, l: &LieElement, imgs: &[Terms], cache: &mut PbwCache) -> Result<LieElement> {
        if l.context() != &self.ctx {
            return Err(Error::ContextMismatch);
        }
        let out = leibniz(imgs, l.pbw_with(cache).terms());
        triangular_solve(HomTensor::from_map(self.ctx.clone(), l.degree() + self.degree, out), cache)
    }

    /// `[d1, d2]: h ↦ d1(d2(h)) - d2(d1(h))`.
    pub fn bracket(&self, other: &GradedDerivation) -> Result<GradedDerivation> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        let mut cache = PbwCache::default();
        let (s_imgs, o_imgs) = (self.image_tensors(&mut cache), other.image_tensors(&mut cache));
        let mut images = Vec::with_capacity(self.ctx.rank());
        for i in 0..self.ctx.rank() {
            let a = self.apply_with(&other.images[i], &s_imgs, &mut cache)?;
            let b = other.apply_with(&self.images[i], &o_imgs, &mut cache)?;
            images.push(a.sub(&b)?);
        }
        Ok(GradedDerivation { ctx: self.ctx.clone(), degree: self.degree + other.degree, images })
    }
}

impl fmt::Display for GradedDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, im) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "e{} ->", i + 1)?;
            if im.is_zero() {
                f.write_str(" 0")?;
            } else {
                for (b, c) in im.brackets() {
                    write!(f, " {}{} * {}", if c.sign() == num_bigint::Sign::Minus { "" } else { "+" }, c, b)?;
                }
            }
        }
        Ok(())
    }
}

/// `η_λ: h ↦ [λ, h]`.
pub fn inner_derivation(l: &LieElement) -> Result<GradedDerivation> {
    let ctx = l.context().clone();
    let mut cache = PbwCache::default();
    let images = (1..=ctx.rank())
        .map(|i| l.bracket_with(&LieElement::generator(&ctx, i)?, &mut cache))
        .collect::<Result<Vec<_>>>()?;
    Ok(GradedDerivation { degree: l.degree(), ctx, images })
}

/// `ω = Σ_i [a_i, b_i]`.
pub fn omega(ctx: &BasisContext) -> Result<LieElement> {
    let g = ctx.genus().ok_or(Error::NoSymplecticStructure)?;
    LieElement::from_coords(ctx.clone(), 2, (1..=g).map(|i| (alloc::vec![ctx.a(i), ctx.b(i)], BigInt::one())))
}

/// `PP_1(x): h ↦ [x, h] + î(h, x) ω` for `x` of degree 1.
pub fn pp1(x: &LieElement) -> Result<GradedDerivation> {
    let ctx = x.context().clone();
    let om = omega(&ctx)?;
    if x.degree() != 1 {
        return Err(Error::InvalidDegree { degree: x.degree(), reason: "PP_1 takes a degree-1 element" });
    }
    let mut images = Vec::with_capacity(ctx.rank());
    for h in 1..=ctx.rank() {
        let eh = LieElement::generator(&ctx, h)?;
        let mut pairing = BigInt::zero();
        for (w, c) in x.coords() {
            pairing += c * BigInt::from(ctx.pairing(h as u16, w[0])?);
        }
        let mut img = x.bracket(&eh)?;
        img.add_assign_scaled(&om, &pairing);
        images.push(img);
    }
    Ok(GradedDerivation { ctx, degree: 1, images })
}

type Terms = BTreeMap<Monomial, BigInt>;

/// `d(x_1..x_m) = Σ_j x_1..d(x_j)..x_m` on a tensor, for `d` given by the
/// tensor images of the generators.
fn leibniz(imgs: &[Terms], t: &Terms) -> Terms {
    let mut out = Terms::new();
    for (m, c) in t {
        for (j, &x) in m.iter().enumerate() {
            for (im, ci) in &imgs[x as usize - 1] {
                let mut w = Vec::with_capacity(m.len() + im.len() - 1);
                w.extend_from_slice(&m[..j]);
                w.extend_from_slice(im);
                w.extend_from_slice(&m[j + 1..]);
                add_term(&mut out, w, c * ci);
            }
        }
    }
    out
}

/// The Lie algebra map `PP: L(H) → Der(L(H))` extending [`pp1`], evaluated
/// along the standard bracketing of each Lyndon word of `μ`. Intermediate
/// derivations are kept as tensor images; Lyndon coordinates are recovered
/// once at the end.
pub fn pp(mu: &LieElement) -> Result<GradedDerivation> {
    let ctx = mu.context().clone();
    if !ctx.is_symplectic() {
        return Err(Error::NoSymplecticStructure);
    }
    let mut cache = PbwCache::default();
    let mut memo: BTreeMap<Monomial, Vec<Terms>> = BTreeMap::new();
    let mut sum: Vec<Terms> = alloc::vec![Terms::new(); ctx.rank()];
    for (w, c) in mu.coords() {
        let d = pp_word(&ctx, w, &mut memo, &mut cache)?;
        for (acc, im) in sum.iter_mut().zip(d) {
            for (m, x) in im {
                add_term(acc, m, x * c);
            }
        }
    }
    let images = sum
        .into_iter()
        .map(|t| triangular_solve(HomTensor::from_map(ctx.clone(), mu.degree() + 1, t), &mut cache))
        .collect::<Result<Vec<_>>>()?;
    GradedDerivation::new(ctx, mu.degree(), images)
}

fn pp_word(ctx: &BasisContext, w: &[u16], memo: &mut BTreeMap<Monomial, Vec<Terms>>, cache: &mut PbwCache) -> Result<Vec<Terms>> {
    if let Some(d) = memo.get(w) {
        return Ok(d.clone());
    }
    let d = match standard_factorization(w) {
        None => pp1(&LieElement::generator(ctx, w[0] as usize)?)?.image_tensors(cache),
        Some((u, v)) => {
            let a = pp_word(ctx, u, memo, cache)?;
            let b = pp_word(ctx, v, memo, cache)?;
            (0..ctx.rank())
                .map(|i| {
                    let mut x = leibniz(&a, &b[i]);
                    for (m, c) in leibniz(&b, &a[i]) {
                        add_term(&mut x, m, -c);
                    }
                    x
                })
                .collect()
        }
    };
    memo.insert(w.to_vec(), d.clone());
    Ok(d)
}

/// `PP` evaluated along an arbitrary bracket expression. Agreement with
/// [`pp`] on the evaluated element is the well-definedness check.
pub fn pp_of_bracket(ctx: &BasisContext, b: &Bracket) -> Result<GradedDerivation> {
    match b {
        Bracket::Leaf(i) => pp1(&LieElement::generator(ctx, *i as usize)?),
        Bracket::Node(l, r) => pp_of_bracket(ctx, l)?.bracket(&pp_of_bracket(ctx, r)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freelie::{left_normed, lyndon_words};
    use proptest::prelude::*;

    fn gens(ctx: &BasisContext) -> Vec<LieElement> {
        (1..=ctx.rank()).map(|i| LieElement::generator(ctx, i).unwrap()).collect()
    }

    #[test]
    fn inner_derivation_examples() {
        let ctx = BasisContext::plain(3);
        let e = gens(&ctx);
        let d = inner_derivation(&e[0]).unwrap();
        assert!(d.image(1).is_zero());
        assert_eq!(d.image(2), &e[0].bracket(&e[1]).unwrap());
        let z = inner_derivation(&LieElement::zero(ctx.clone(), 2)).unwrap();
        assert!(z.is_zero());
        let ctx5 = BasisContext::plain(5);
        let lam = left_normed(&ctx5, &[1, 2, 3, 4]).unwrap();
        let d = inner_derivation(&lam).unwrap();
        assert_eq!(d.image(5), &lam.bracket(&LieElement::generator(&ctx5, 5).unwrap()).unwrap());
    }

    #[test]
    fn apply_examples() {
        let ctx = BasisContext::plain(3);
        let e = gens(&ctx);
        let d = inner_derivation(&e[2].bracket(&e[0]).unwrap()).unwrap();
        assert_eq!(d.apply(&e[1]).unwrap(), d.image(2).clone());
        // Leibniz on [e1, e2]
        let e12 = e[0].bracket(&e[1]).unwrap();
        let lhs = d.apply(&e12).unwrap();
        let rhs = d.image(1).bracket(&e[1]).unwrap().add(&e[0].bracket(d.image(2)).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn omega_and_pp1_examples() {
        let c1 = BasisContext::symplectic(1);
        assert_eq!(omega(&c1).unwrap(), LieElement::basis(&c1, &[1, 2], BigInt::one()).unwrap());
        let c2 = BasisContext::symplectic(2);
        let om = omega(&c2).unwrap();
        assert_eq!(om.coords().len(), 2);
        assert_eq!(om.pbw_embed().len(), 4);
        assert!(omega(&BasisContext::plain(4)).is_err());

        let a1 = LieElement::generator(&c2, 1).unwrap();
        let a2 = LieElement::generator(&c2, 2).unwrap();
        let b1 = LieElement::generator(&c2, 3).unwrap();
        let p = pp1(&a1).unwrap();
        assert_eq!(p.image(2), &a1.bracket(&a2).unwrap());
        assert_eq!(p.image(3), &a1.bracket(&b1).unwrap().sub(&om).unwrap());
        assert!(pp1(&LieElement::zero(c2.clone(), 1)).unwrap().is_zero());
        assert!(pp1(&a1.bracket(&a2).unwrap()).is_err());
    }

    #[test]
    fn pp_on_isotropic_span_is_bracket() {
        for g in 2..=4usize {
            let ctx = BasisContext::symplectic(g);
            let iso: Vec<u16> = (1..=g as u16).collect();
            for d1 in 1..=3 {
                for d2 in 1..=(4 - d1).max(1) {
                    for w1 in lyndon_words(g, d1) {
                        let mu1 = LieElement::basis(&ctx, &w1, BigInt::one()).unwrap();
                        let p = pp(&mu1).unwrap();
                        for w2 in lyndon_words(g, d2) {
                            let mu2 = LieElement::basis(&ctx, &w2, BigInt::one()).unwrap();
                            assert!(mu2.supported_on(&iso));
                            assert_eq!(p.apply(&mu2).unwrap(), mu1.bracket(&mu2).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pp_lambda_certificate_symplectic() {
        for k in 1..=3usize {
            let g = k + 1;
            let ctx = BasisContext::symplectic(g);
            let idx: Vec<usize> = (1..=k).collect();
            let lam = left_normed(&ctx, &idx).unwrap();
            let ak1 = LieElement::generator(&ctx, k + 1).unwrap();
            let v = pp(&lam).unwrap().apply(&ak1).unwrap();
            assert_eq!(v, lam.bracket(&ak1).unwrap());
            assert!(!crate::freelie::rho_truncate(&v).unwrap().is_zero());
        }
    }

    #[test]
    fn pp_independent_of_bracketing() {
        let ctx = BasisContext::symplectic(2);
        // [[b1, a2], a1] and [b1, [a2, a1]] are evaluated two ways each
        let t1 = Bracket::node(Bracket::node(Bracket::Leaf(3), Bracket::Leaf(2)), Bracket::Leaf(1));
        let t2 = Bracket::node(Bracket::Leaf(3), Bracket::node(Bracket::Leaf(2), Bracket::Leaf(1)));
        for t in [t1, t2] {
            let mu = LieElement::from_bracket(&ctx, &t).unwrap();
            assert_eq!(pp_of_bracket(&ctx, &t).unwrap(), pp(&mu).unwrap());
        }
    }

    fn arb_deg1(ctx: BasisContext) -> impl Strategy<Value = LieElement> {
        let n = ctx.rank();
        prop::collection::vec(-2i64..=2, n).prop_map(move |cs| {
            LieElement::from_coords(
                ctx.clone(),
                1,
                cs.into_iter().enumerate().map(|(i, c)| (alloc::vec![(i + 1) as u16], BigInt::from(c))),
            )
            .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ad_is_lie_homomorphism(u in arb_deg1(BasisContext::plain(3)), v in arb_deg1(BasisContext::plain(3)), w in arb_deg1(BasisContext::plain(3))) {
            let uv = u.bracket(&v).unwrap();
            let du = inner_derivation(&u).unwrap();
            let duv = inner_derivation(&uv).unwrap();
            let dv = inner_derivation(&v).unwrap();
            prop_assert_eq!(du.bracket(&dv).unwrap(), duv.clone());
            prop_assert!(du.bracket(&du).unwrap().is_zero());
            prop_assert_eq!(duv.bracket(&du).unwrap(), du.bracket(&duv).unwrap().scale(&-BigInt::one()));
            // derivation_apply(ad_u, w) = [u, w]
            prop_assert_eq!(du.apply(&w).unwrap(), u.bracket(&w).unwrap());
        }

        #[test]
        fn derivation_bracket_obeys_leibniz(u in arb_deg1(BasisContext::symplectic(2)), v in arb_deg1(BasisContext::symplectic(2)), x in arb_deg1(BasisContext::symplectic(2)), y in arb_deg1(BasisContext::symplectic(2))) {
            let d = pp1(&u).unwrap().bracket(&pp1(&v).unwrap()).unwrap();
            let xy = x.bracket(&y).unwrap();
            let lhs = d.apply(&xy).unwrap();
            let rhs = d.apply(&x).unwrap().bracket(&y).unwrap().add(&x.bracket(&d.apply(&y).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}

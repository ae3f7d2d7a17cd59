//! Johnson filtrations of `Aut(F_n)`, the homomorphisms `τ_k` and
//! `τ̂_k = ρ ∘ τ_k`, the named generators, and the lower-bound certificates.
//!
//! Conventions: `[a, b] = a^-1 b^-1 a b`, products in `Aut(F_n)` compose
//! right to left, and conjugation by `w` is the inner automorphism
//! `x ↦ w x w^-1`, so that `τ_k(conj w) = η_λ` with `λ` the class of `w`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;

use crate::freelie::{
    inner_derivation, left_normed, lie_project, pp, rho_truncate, BasisContext, GradedDerivation, HomTensor,
    LieElement, Wedge, WedgeTensor,
};
use crate::magnus::{expand, lcs_weight, zassenhaus_weight, FiltrationWeight};
use crate::words::{Endomorphism, FreeWord};
use crate::{Error, Result};

/// The named generators.
///
/// `C(i, j)`: `x_i ↦ x_j^-1 x_i x_j`. `M(i, j, k)`: `x_i ↦ x_i [x_j, x_k]`.
/// `E(i, j, r)`: `x_j ↦ x_j x_i^r`. `B(i, r)`: with `c = x_i x_{i+1}^-1`,
/// `x_i ↦ x_i c^r` and `x_{i+1} ↦ x_{i+1} c^r`. `N1`: `x_1 ↦ x_1^-1`.
/// The last three lift the level-`r` matrices `E_ij(r)`, `B_i(r)`, `N_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorSpec {
    C(usize, usize),
    M(usize, usize, usize),
    E(usize, usize, i64),
    B(usize, i64),
    N1,
}

impl GeneratorSpec {
    fn validate(&self, n: usize) -> Result<()> {
        let in_range = |i: usize| (1..=n).contains(&i);
        let ok = match *self {
            GeneratorSpec::C(i, j) | GeneratorSpec::E(i, j, _) => in_range(i) && in_range(j) && i != j,
            GeneratorSpec::M(i, j, k) => in_range(i) && in_range(j) && in_range(k) && i != j && j != k && i != k,
            GeneratorSpec::B(i, _) => i >= 1 && i < n,
            GeneratorSpec::N1 => n >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidGenerator(format!("{} in rank {}", self, n)))
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::C(i, j) => write!(f, "c({},{})", i, j),
            GeneratorSpec::M(i, j, k) => write!(f, "m({},{},{})", i, j, k),
            GeneratorSpec::E(i, j, r) => write!(f, "E({},{},{})", i, j, r),
            GeneratorSpec::B(i, r) => write!(f, "B({},{})", i, r),
            GeneratorSpec::N1 => f.write_str("N1"),
        }
    }
}

/// Parses the `Display` form, e.g. `c(1,2)`, `m(1,2,3)`, `E(1,2,5)`,
/// `B(1,3)`, `N1`.
impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "N1" {
            return Ok(GeneratorSpec::N1);
        }
        let bad = || Error::InvalidGenerator(String::from(s));
        let open = s.find('(').ok_or_else(bad)?;
        let body = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let args: Vec<i64> =
            body.split(',').map(|a| a.trim().parse::<i64>()).collect::<core::result::Result<_, _>>().map_err(|_| bad())?;
        let idx = |v: i64| usize::try_from(v).map_err(|_| bad());
        match (&s[..open], args.as_slice()) {
            ("c", &[i, j]) => Ok(GeneratorSpec::C(idx(i)?, idx(j)?)),
            ("m", &[i, j, k]) => Ok(GeneratorSpec::M(idx(i)?, idx(j)?, idx(k)?)),
            ("E", &[i, j, r]) => Ok(GeneratorSpec::E(idx(i)?, idx(j)?, r)),
            ("B", &[i, r]) => Ok(GeneratorSpec::B(idx(i)?, r)),
            _ => Err(bad()),
        }
    }
}

/// Builds the automorphism of `F_n` named by `spec`, with its inverse
/// attached and verified.
pub fn make_generator(spec: GeneratorSpec, n: usize) -> Result<Endomorphism> {
    spec.validate(n)?;
    let x = |i: usize| FreeWord::generator(n, i);
    let mut images: Vec<FreeWord> = (1..=n).map(x).collect::<Result<_>>()?;
    let mut inverse = images.clone();
    match spec {
        GeneratorSpec::C(i, j) => {
            images[i - 1] = x(i)?.conjugate(&x(j)?)?;
            inverse[i - 1] = x(i)?.conjugate(&x(j)?.invert())?;
        }
        GeneratorSpec::M(i, j, k) => {
            let c = x(j)?.commutator(&x(k)?)?;
            images[i - 1] = x(i)?.multiply(&c)?;
            inverse[i - 1] = x(i)?.multiply(&c.invert())?;
        }
        GeneratorSpec::E(i, j, r) => {
            images[j - 1] = x(j)?.multiply(&x(i)?.pow(r))?;
            inverse[j - 1] = x(j)?.multiply(&x(i)?.pow(-r))?;
        }
        GeneratorSpec::B(i, r) => {
            let c = x(i)?.multiply(&x(i + 1)?.invert())?;
            for t in [i, i + 1] {
                images[t - 1] = x(t)?.multiply(&c.pow(r))?;
                inverse[t - 1] = x(t)?.multiply(&c.pow(-r))?;
            }
        }
        GeneratorSpec::N1 => {
            images[0] = x(1)?.invert();
            inverse[0] = x(1)?.invert();
        }
    }
    Endomorphism::with_inverse(n, images, inverse)
}

/// `φ(x_i) x_i^-1`.
fn displacement(phi: &Endomorphism, i: usize) -> Result<FreeWord> {
    phi.image(i).multiply(&FreeWord::generator(phi.rank(), i)?.invert())
}

fn weight_from_displacements<F>(phi: &Endomorphism, cap: usize, weight: F) -> Result<FiltrationWeight>
where
    F: Fn(&FreeWord) -> Result<FiltrationWeight>,
{
    if !phi.is_automorphism() {
        return Err(Error::MissingInverse);
    }
    let mut least: Option<usize> = None;
    for i in 1..=phi.rank() {
        if let FiltrationWeight::Exact(m) = weight(&displacement(phi, i)?)? {
            least = Some(least.map_or(m - 1, |l| l.min(m - 1)));
        }
    }
    Ok(least.map_or(FiltrationWeight::AtLeast(cap), FiltrationWeight::Exact))
}

/// Largest `k` with `φ ∈ IA_n(k)`, i.e. `φ(x_i) x_i^-1 ∈ γ_{k+1}` for all
/// `i`, or `AtLeast(cap)` when every displacement is trivial through degree
/// `cap`. Automorphisms acting nontrivially on `H` get `Exact(0)`.
pub fn ia_weight(phi: &Endomorphism, cap: usize) -> Result<FiltrationWeight> {
    weight_from_displacements(phi, cap, |w| lcs_weight(w, cap))
}

/// As [`ia_weight`] for the Zassenhaus mod-`p` filtration.
pub fn ia_weight_zassenhaus(phi: &Endomorphism, p: u64, cap: usize) -> Result<FiltrationWeight> {
    weight_from_displacements(phi, cap, |w| zassenhaus_weight(w, p, cap))
}

/// `τ_k(φ)`, stored both as a derivation of degree `k` (Lyndon coordinates)
/// and as the tensor images of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JohnsonValue {
    k: usize,
    derivation: GradedDerivation,
    tensor_form: Vec<HomTensor>,
}

impl JohnsonValue {
    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn derivation(&self) -> &GradedDerivation {
        &self.derivation
    }

    pub fn tensor_form(&self) -> &[HomTensor] {
        &self.tensor_form
    }

    pub fn is_zero(&self) -> bool {
        self.tensor_form.iter().all(HomTensor::is_zero)
    }

    /// `ρ` applied to each component, the value of `τ̂_k`.
    pub fn hat(&self) -> Result<Vec<WedgeTensor>> {
        self.derivation.images().iter().map(rho_truncate).collect()
    }

    pub fn add(&self, other: &JohnsonValue) -> Result<JohnsonValue> {
        if self.k != other.k {
            return Err(Error::InvalidDegree { degree: other.k, reason: "Johnson values of different degree" });
        }
        let tensor_form =
            self.tensor_form.iter().zip(&other.tensor_form).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(JohnsonValue { k: self.k, derivation: self.derivation.add(&other.derivation)?, tensor_form })
    }

    /// Equality with a derivation, compared in tensor form.
    pub fn matches(&self, d: &GradedDerivation) -> bool {
        d.degree() == self.k
            && d.images().len() == self.tensor_form.len()
            && d.images().iter().zip(&self.tensor_form).all(|(l, t)| &l.pbw_embed() == t)
    }
}

impl fmt::Display for JohnsonValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.derivation)
    }
}

/// Degree-`(k+1)` part of `M(φ(x_i) x_i^-1)`, after checking that the
/// lower degrees vanish.
fn tau_tensor(phi: &Endomorphism, k: usize, i: usize, cap: usize) -> Result<HomTensor> {
    let s = expand(&displacement(phi, i)?, cap, 0)?;
    if let FiltrationWeight::Exact(m) = s.weight() {
        if m <= k {
            return Err(Error::NotInFiltration { required: k, actual: m - 1 });
        }
    }
    Ok(s.degree_part(k + 1))
}

/// `τ_k(φ)` with the default degree cap `k + 2`.
pub fn tau(phi: &Endomorphism, k: usize) -> Result<JohnsonValue> {
    tau_with_cap(phi, k, k + 2)
}

/// `τ_k(φ): [x_i] ↦ [φ(x_i) x_i^-1] ∈ L_{k+1}(H)`. Fails with
/// `NotInFiltration` unless `φ ∈ IA_n(k)`.
pub fn tau_with_cap(phi: &Endomorphism, k: usize, cap: usize) -> Result<JohnsonValue> {
    if k == 0 {
        return Err(Error::InvalidDegree { degree: 0, reason: "tau_k needs k >= 1" });
    }
    if cap <= k {
        return Err(Error::InvalidParameter(format!("degree cap {} must exceed k = {}", cap, k)));
    }
    let ctx = BasisContext::plain(phi.rank());
    let tensor_form: Vec<HomTensor> =
        (1..=phi.rank()).map(|i| tau_tensor(phi, k, i, cap)).collect::<Result<_>>()?;
    let images = tensor_form.iter().map(lie_project).collect::<Result<Vec<_>>>()?;
    let derivation = GradedDerivation::new(ctx, k, images)?;
    Ok(JohnsonValue { k, derivation, tensor_form })
}

/// The single component `τ_k(φ)(e_i)`, computed without touching the other
/// generators. Only checks the filtration condition on `x_i`.
pub fn tau_component(phi: &Endomorphism, k: usize, i: usize) -> Result<LieElement> {
    if i == 0 || i > phi.rank() {
        return Err(Error::IndexOutOfRange { index: i, rank: phi.rank() });
    }
    lie_project(&tau_tensor(phi, k, i, k + 1)?)
}

/// `τ̂_k(φ) = ρ ∘ τ_k(φ)`, one `H ⊗ Λ^k H` element per generator.
pub fn tau_hat(phi: &Endomorphism, k: usize) -> Result<Vec<WedgeTensor>> {
    tau(phi, k)?.hat()
}

fn random_generator<R: Rng + ?Sized>(indices: &[usize], n: usize, rng: &mut R) -> Result<Endomorphism> {
    let pick = |rng: &mut R, avoid: &[usize]| loop {
        let i = indices[rng.gen_range(0..indices.len())];
        if !avoid.contains(&i) {
            break i;
        }
    };
    let use_m = indices.len() >= 3 && rng.gen_bool(0.5);
    let i = pick(rng, &[]);
    let j = pick(rng, &[i]);
    let spec = if use_m { GeneratorSpec::M(i, j, pick(rng, &[i, j])) } else { GeneratorSpec::C(i, j) };
    let g = make_generator(spec, n)?;
    if rng.gen_bool(0.5) {
        g.inverse()
    } else {
        Ok(g)
    }
}

/// A `(k-1)`-fold iterated commutator of `k` random Magnus generators
/// `c_ij^{±1}`, `m_ijk^{±1}` with all indices in `indices`, bracketed as a
/// balanced tree: `[u, v]` with `u, v` built from `k - ⌊k/2⌋` and `⌊k/2⌋`
/// generators. The result lies in `IA_n(k)` and fixes every `x_j` with
/// `j ∉ indices`.
///
/// Left-normed brackets square the image length at every level; at `k = 4`
/// they reach millions of letters, the balanced tree stays near `10^4`.
/// With two indices only `c_ij` occur, words stay short, and the balanced
/// factors commute, so those samples are left-normed instead.
pub fn ia_commutator_sampler<R: Rng + ?Sized>(
    n: usize,
    indices: &[usize],
    k: usize,
    rng: &mut R,
) -> Result<Endomorphism> {
    let mut idx: Vec<usize> = indices.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if idx.len() < 2 {
        return Err(Error::InvalidParameter("need at least two indices to form IA generators".into()));
    }
    if let Some(&bad) = idx.iter().find(|&&i| i == 0 || i > n) {
        return Err(Error::IndexOutOfRange { index: bad, rank: n });
    }
    if k == 0 {
        return Err(Error::InvalidDegree { degree: 0, reason: "IA_n(k) needs k >= 1" });
    }
    balanced_commutator(&idx, n, k, rng)
}

fn balanced_commutator<R: Rng + ?Sized>(idx: &[usize], n: usize, k: usize, rng: &mut R) -> Result<Endomorphism> {
    if k == 1 {
        return random_generator(idx, n, rng);
    }
    let right = if idx.len() == 2 { 1 } else { k / 2 };
    let u = balanced_commutator(idx, n, k - right, rng)?;
    let v = balanced_commutator(idx, n, right, rng)?;
    u.commutator(&v)
}

/// Left-normed group commutator `[..[[x_1, x_2], x_3], ..., x_k]` in `F_n`.
pub fn left_normed_word(n: usize, k: usize) -> Result<FreeWord> {
    let mut w = FreeWord::generator(n, 1)?;
    for i in 2..=k {
        w = w.commutator(&FreeWord::generator(n, i)?)?;
    }
    Ok(w)
}

/// Record of one certificate run; every intermediate object is kept so
/// that a failing check can be reproduced.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub n: usize,
    pub k: usize,
    pub symplectic: bool,
    pub word: Option<FreeWord>,
    pub lambda: LieElement,
    pub image: LieElement,
    pub rho: WedgeTensor,
    pub contraction: Wedge,
    pub expected: Wedge,
    pub checks: Vec<(String, bool)>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

/// Builds `w_λ = [..[x_1, x_2], .., x_k]`, `φ = conj(w_λ)` and checks
///
/// * the class of `w_λ` is `λ = [..[e_1, e_2], .., e_k]`,
/// * `τ_k(φ)(e_{k+1}) = [λ, a_{k+1}]`,
/// * `τ̂_k(φ)(e_{k+1}) = ρ([λ, a_{k+1}]) ≠ 0`,
/// * `(a_1^* ⊗ id) ρ([λ, a_{k+1}]) = a_2 ∧ ... ∧ a_{k+1}`.
pub fn certificate_lower_bound(n: usize, k: usize) -> Result<Certificate> {
    if k == 0 || n <= k {
        return Err(Error::InvalidParameter(format!("need n > k >= 1, got n = {}, k = {}", n, k)));
    }
    let ctx = BasisContext::plain(n);
    let word = left_normed_word(n, k)?;
    let lambda = left_normed(&ctx, &(1..=k).collect::<Vec<_>>())?;
    let target = LieElement::generator(&ctx, k + 1)?;
    let bracket = lambda.bracket(&target)?;
    let mut checks = Vec::new();

    let class = crate::magnus::leading_part(&word, k)?;
    checks.push((String::from("class_of_word_is_lambda"), class == lambda.pbw_embed()));

    let phi = Endomorphism::inner(&word)?;
    let image = tau_component(&phi, k, k + 1)?;
    checks.push((String::from("tau_equals_inner_bracket"), image == bracket));

    let rho = rho_truncate(&image)?;
    checks.push((String::from("tau_hat_equals_rho_bracket"), rho == rho_truncate(&bracket)?));
    checks.push((String::from("tau_hat_nonzero"), !rho.is_zero()));

    finish(n, k, false, Some(word), lambda, image, rho, checks)
}

/// Symplectic variant over `H = H_1(Σ_g)`: `λ = [..[a_1, a_2], .., a_k]`,
/// checks `PP(λ)(a_{k+1}) = [λ, a_{k+1}]`, `ρ` of it is nonzero, and the
/// same wedge contraction.
pub fn certificate_symplectic(g: usize, k: usize) -> Result<Certificate> {
    if k == 0 || g <= k {
        return Err(Error::InvalidParameter(format!("need g > k >= 1, got g = {}, k = {}", g, k)));
    }
    let ctx = BasisContext::symplectic(g);
    let a: Vec<usize> = (1..=k).map(|i| ctx.a(i) as usize).collect();
    let lambda = left_normed(&ctx, &a)?;
    let target = LieElement::generator(&ctx, ctx.a(k + 1) as usize)?;
    let bracket = lambda.bracket(&target)?;
    let image = pp(&lambda)?.image(ctx.a(k + 1) as usize).clone();
    let mut checks = Vec::new();
    checks.push((String::from("pp_equals_inner_bracket"), image == bracket));
    let rho = rho_truncate(&image)?;
    checks.push((String::from("rho_nonzero"), !rho.is_zero()));
    finish(2 * g, k, true, None, lambda, image, rho, checks)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    n: usize,
    k: usize,
    symplectic: bool,
    word: Option<FreeWord>,
    lambda: LieElement,
    image: LieElement,
    rho: WedgeTensor,
    mut checks: Vec<(String, bool)>,
) -> Result<Certificate> {
    let contraction = rho.contract_first(1);
    let expected = Wedge::basis(&(2..=(k + 1) as u16).collect::<Vec<_>>());
    let coeff_one = contraction.terms().values().all(BigInt::is_one);
    checks.push((String::from("contraction_is_wedge"), contraction == expected && coeff_one));
    Ok(Certificate { n, k, symplectic, word, lambda, image, rho, contraction, expected, checks })
}

/// `τ_k` of an inner automorphism against the inner derivation of the
/// class of `w ∈ γ_k`.
pub fn inner_consistency(w: &FreeWord, k: usize) -> Result<bool> {
    let ctx = BasisContext::plain(w.rank());
    let class = match crate::magnus::leading_part(w, k) {
        Ok(t) if t.degree() == k => lie_project(&t)?,
        Ok(t) => return Err(Error::NotInFiltration { required: k, actual: t.degree() }),
        Err(Error::WeightExceedsCap { .. }) => LieElement::zero(ctx, k),
        Err(e) => return Err(e),
    };
    Ok(tau(&Endomorphism::inner(w)?, k)?.matches(&inner_derivation(&class)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x(n: usize, i: usize) -> FreeWord {
        FreeWord::generator(n, i).unwrap()
    }

    #[test]
    fn generator_examples() {
        let c = make_generator(GeneratorSpec::C(1, 2), 3).unwrap();
        assert_eq!(c.image(1).to_string(), "x2^-1 x1 x2");
        assert_eq!(c.image(2).to_string(), "x2");
        let e = make_generator(GeneratorSpec::E(1, 2, 3), 3).unwrap();
        assert_eq!(e.image(2).to_string(), "x2 x1 x1 x1");
        let nn = make_generator(GeneratorSpec::N1, 3).unwrap();
        assert_eq!(nn.image(1).to_string(), "x1^-1");
        let m = make_generator(GeneratorSpec::M(1, 2, 3), 3).unwrap();
        assert_eq!(m.image(1).to_string(), "x1 x2^-1 x3^-1 x2 x3");
        let b = make_generator(GeneratorSpec::B(1, 2), 3).unwrap();
        assert_eq!(b.image(2).to_string(), "x2 x1 x2^-1 x1 x2^-1");
        assert!(make_generator(GeneratorSpec::C(1, 1), 3).is_err());
        assert!(make_generator(GeneratorSpec::M(1, 2, 2), 3).is_err());
        assert!(make_generator(GeneratorSpec::B(3, 2), 3).is_err());
        assert!(make_generator(GeneratorSpec::C(1, 4), 3).is_err());
    }

    #[test]
    fn spec_parsing_round_trips() {
        for s in ["c(1,2)", "m(3,1,2)", "E(2,1,-5)", "B(1,7)", "N1"] {
            assert_eq!(s.parse::<GeneratorSpec>().unwrap().to_string(), s);
        }
        assert!("q(1,2)".parse::<GeneratorSpec>().is_err());
        assert!("c(1)".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn ia_weight_examples() {
        let c = make_generator(GeneratorSpec::C(1, 2), 3).unwrap();
        assert_eq!(ia_weight(&c, 4).unwrap(), FiltrationWeight::Exact(1));
        assert_eq!(ia_weight(&Endomorphism::identity(3), 4).unwrap(), FiltrationWeight::AtLeast(4));
        let w = x(3, 1).commutator(&x(3, 2)).unwrap().commutator(&x(3, 3)).unwrap();
        assert_eq!(ia_weight(&Endomorphism::inner(&w).unwrap(), 5).unwrap(), FiltrationWeight::Exact(3));
        let e = make_generator(GeneratorSpec::E(1, 2, 1), 3).unwrap();
        assert_eq!(ia_weight(&e, 4).unwrap(), FiltrationWeight::Exact(0));
        assert_eq!(ia_weight(&Endomorphism::new(3, e.images().to_vec()).unwrap(), 4), Err(Error::MissingInverse));
    }

    #[test]
    fn zassenhaus_examples() {
        for p in [2u64, 3, 5] {
            let e = make_generator(GeneratorSpec::E(1, 2, p as i64), 3).unwrap();
            assert!(ia_weight_zassenhaus(&e, p, 4).unwrap().at_least(1));
            assert_eq!(ia_weight(&e, 4).unwrap(), FiltrationWeight::Exact(0));
            let c = make_generator(GeneratorSpec::C(1, 2), 3).unwrap();
            assert!(ia_weight_zassenhaus(&c, p, 4).unwrap().bound() >= ia_weight(&c, 4).unwrap().bound());
            assert_eq!(
                ia_weight_zassenhaus(&Endomorphism::identity(3), p, 4).unwrap(),
                FiltrationWeight::AtLeast(4)
            );
        }
    }

    #[test]
    fn tau_examples() {
        let c = make_generator(GeneratorSpec::C(1, 2), 3).unwrap();
        let t = tau(&c, 1).unwrap();
        assert_eq!(t.derivation().image(1).to_string(), "1 * [1,2]");
        assert!(t.derivation().image(2).is_zero() && t.derivation().image(3).is_zero());
        let m = make_generator(GeneratorSpec::M(1, 2, 3), 3).unwrap();
        let t = tau(&m, 1).unwrap();
        assert_eq!(t.derivation().image(1).to_string(), "1 * [2,3]");
        assert!(t.derivation().image(2).is_zero() && t.derivation().image(3).is_zero());
        assert!(matches!(tau(&c, 2), Err(Error::NotInFiltration { required: 2, actual: 1 })));
    }

    #[test]
    fn tau_hat_example() {
        let c = make_generator(GeneratorSpec::C(1, 2), 3).unwrap();
        let th = tau_hat(&c, 1).unwrap();
        assert_eq!(th[0].to_string(), "1 * e1 ^ e2\n-1 * e2 ^ e1");
        assert!(th[1].is_zero());
    }

    #[test]
    fn inner_automorphisms_give_inner_derivations() {
        for k in 1..=4 {
            let w = left_normed_word(k + 1, k).unwrap();
            assert!(inner_consistency(&w, k).unwrap(), "k={k}");
        }
    }

    #[test]
    fn certificates_pass() {
        for k in 1..=4 {
            let c = certificate_lower_bound(k + 1, k).unwrap();
            assert!(c.passed(), "{:?}", c.checks);
            let s = certificate_symplectic(k + 1, k).unwrap();
            assert!(s.passed(), "{:?}", s.checks);
        }
        let c = certificate_lower_bound(2, 1).unwrap();
        assert!(!c.rho.is_zero());
        assert!(certificate_lower_bound(3, 3).is_err());
    }

    #[test]
    fn sampler_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = ia_commutator_sampler(4, &[1, 2], 1, &mut rng).unwrap();
        assert!(g.is_supported_on(&[1, 2]));
        assert_eq!(ia_weight(&g, 3).unwrap(), FiltrationWeight::Exact(1));
        for k in 1..=3 {
            for _ in 0..5 {
                let phi = ia_commutator_sampler(5, &[1, 3, 4], k, &mut rng).unwrap();
                assert!(phi.is_supported_on(&[1, 3, 4]));
                assert!(ia_weight(&phi, k + 1).unwrap().at_least(k));
            }
        }
        assert!(ia_commutator_sampler(4, &[2], 2, &mut rng).is_err());
    }

    #[test]
    fn additivity_and_conjugation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 1..=3 {
            for _ in 0..4 {
                let phi = ia_commutator_sampler(4, &[1, 2, 3, 4], k, &mut rng).unwrap();
                let psi = ia_commutator_sampler(4, &[1, 2, 3, 4], k, &mut rng).unwrap();
                let sum = tau(&phi, k).unwrap().add(&tau(&psi, k).unwrap()).unwrap();
                assert_eq!(tau(&phi.compose(&psi).unwrap(), k).unwrap(), sum);
                let g = ia_commutator_sampler(4, &[1, 2, 3, 4], 1, &mut rng).unwrap();
                let conj = phi.conjugate_by(&g).unwrap();
                assert_eq!(tau(&conj, k).unwrap().tensor_form(), tau(&phi, k).unwrap().tensor_form());
            }
        }
    }

    #[test]
    fn kernel_in_both_directions() {
        // a commutator of commuting generators is trivial, so lies in every kernel
        let c12 = make_generator(GeneratorSpec::C(1, 2), 4).unwrap();
        let c34 = make_generator(GeneratorSpec::C(3, 4), 4).unwrap();
        let triv = c12.commutator(&c34).unwrap();
        assert!(tau(&triv, 2).unwrap().is_zero());
        assert!(ia_weight(&triv, 4).unwrap().at_least(3));
        let c13 = make_generator(GeneratorSpec::C(1, 3), 4).unwrap();
        let nontriv = c12.commutator(&c13).unwrap();
        assert!(!tau(&nontriv, 2).unwrap().is_zero());
        assert_eq!(ia_weight(&nontriv, 4).unwrap(), FiltrationWeight::Exact(2));
    }

    #[test]
    fn lifts_abelianize_to_level_matrices() {
        let e = make_generator(GeneratorSpec::E(1, 2, 3), 3).unwrap().abelianize();
        assert_eq!(e.to_string(), "1,3,0\n0,1,0\n0,0,1");
        let b = make_generator(GeneratorSpec::B(2, 7), 4).unwrap().abelianize();
        assert_eq!(b.to_string(), "1,0,0,0\n0,8,7,0\n0,-7,-6,0\n0,0,0,1");
    }
}

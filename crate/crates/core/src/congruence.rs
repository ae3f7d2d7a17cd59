//! Level-`p` congruence generators of `SL_n(Z)` and `Sp_2g(Z)`, membership
//! predicates, and the reduction `1 + pA ↦ A mod p` onto the symplectic Lie
//! algebra over `Z/p`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::johnson::{make_generator, GeneratorSpec};
use crate::magnus::is_prime;
use crate::matrix::IntMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlKind {
    E(usize, usize, i64),
    B(usize, i64),
    N1,
}

impl fmt::Display for SlKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlKind::E(i, j, r) => write!(f, "E({},{},{})", i, j, r),
            SlKind::B(i, r) => write!(f, "B({},{})", i, r),
            SlKind::N1 => f.write_str("N1"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpKind {
    X(usize, usize, i64),
    Y(usize, usize, i64),
    Z(usize, usize, i64),
    W(usize, i64),
    U1(i64),
}

impl fmt::Display for SpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpKind::X(i, j, r) => write!(f, "X({},{},{})", i, j, r),
            SpKind::Y(i, j, r) => write!(f, "Y({},{},{})", i, j, r),
            SpKind::Z(i, j, r) => write!(f, "Z({},{},{})", i, j, r),
            SpKind::W(i, r) => write!(f, "W({},{})", i, r),
            SpKind::U1(r) => write!(f, "U1({})", r),
        }
    }
}

fn bad(what: impl fmt::Display, dim: usize) -> Error {
    Error::InvalidGenerator(format!("{} in dimension {}", what, dim))
}

/// `ε_ij(r)` added at block offset `(r0, c0)`.
fn put(m: &mut IntMatrix, r0: usize, c0: usize, i: usize, j: usize, v: i64) {
    *m.get_mut(r0 + i - 1, c0 + j - 1) += BigInt::from(v);
}

/// `β_i(r)` (or its negative transpose) added at block offset `(o, o)`.
fn put_beta(m: &mut IntMatrix, o: usize, i: usize, r: i64, neg_transpose: bool) {
    let entries = [(i, i, r), (i, i + 1, r), (i + 1, i, -r), (i + 1, i + 1, -r)];
    for (a, b, v) in entries {
        if neg_transpose {
            put(m, o, o, b, a, -v);
        } else {
            put(m, o, o, a, b, v);
        }
    }
}

/// `E_ij(r) = 1 + ε_ij(r)`, `B_i(r) = 1 + β_i(r)`, `N_1 = diag(-1, 1, ..)`.
pub fn gen_sl(kind: SlKind, n: usize) -> Result<IntMatrix> {
    let mut m = IntMatrix::identity(n);
    match kind {
        SlKind::E(i, j, r) => {
            if i == j || i == 0 || j == 0 || i > n || j > n {
                return Err(bad(kind, n));
            }
            put(&mut m, 0, 0, i, j, r);
        }
        SlKind::B(i, r) => {
            if i == 0 || i >= n {
                return Err(bad(kind, n));
            }
            put_beta(&mut m, 0, i, r, false);
        }
        SlKind::N1 => {
            if n == 0 {
                return Err(bad(kind, n));
            }
            m.set(0, 0, -BigInt::one());
        }
    }
    Ok(m)
}

/// The `2g × 2g` block generators in the basis `a_1..a_g, b_1..b_g`.
pub fn gen_sp(kind: SpKind, g: usize) -> Result<IntMatrix> {
    let mut m = IntMatrix::identity(2 * g);
    let ok = |i: usize| (1..=g).contains(&i);
    let sym = |m: &mut IntMatrix, r0: usize, c0: usize, i: usize, j: usize, r: i64| {
        put(m, r0, c0, i, j, r);
        if i != j {
            put(m, r0, c0, j, i, r);
        }
    };
    match kind {
        SpKind::X(i, j, r) if ok(i) && ok(j) && i <= j => sym(&mut m, g, 0, i, j, r),
        SpKind::Y(i, j, r) if ok(i) && ok(j) && i <= j => sym(&mut m, 0, g, i, j, r),
        SpKind::Z(i, j, r) if ok(i) && ok(j) && i != j => {
            put(&mut m, 0, 0, i, j, r);
            put(&mut m, g, g, j, i, -r);
        }
        SpKind::W(i, r) if i >= 1 && i < g => {
            put_beta(&mut m, 0, i, r, false);
            put_beta(&mut m, g, i, r, true);
        }
        SpKind::U1(r) if g >= 1 => {
            put(&mut m, 0, 0, 1, 1, r);
            put(&mut m, 0, g, 1, 1, r);
            put(&mut m, g, 0, 1, 1, -r);
            put(&mut m, g, g, 1, 1, -r);
        }
        _ => return Err(bad(kind, 2 * g)),
    }
    Ok(m)
}

/// The level-`p` generating set `{E_ij(p)} ∪ {B_i(p)}` of `SL_n(Z, p)`.
pub fn sl_level_generators(n: usize, p: i64) -> Vec<SlKind> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                out.push(SlKind::E(i, j, p));
            }
        }
    }
    out.extend((1..n).map(|i| SlKind::B(i, p)));
    out
}

/// The `2g^2 + g` level-`p` generators of `Sp_2g(Z, p)`.
pub fn sp_level_generators(g: usize, p: i64) -> Vec<SpKind> {
    let mut out = Vec::new();
    for i in 1..=g {
        for j in i..=g {
            out.push(SpKind::X(i, j, p));
            out.push(SpKind::Y(i, j, p));
        }
    }
    for i in 1..=g {
        for j in 1..=g {
            if i != j {
                out.push(SpKind::Z(i, j, p));
            }
        }
    }
    out.extend((1..g).map(|i| SpKind::W(i, p)));
    out.push(SpKind::U1(p));
    out
}

/// `M ≡ 1 (mod p)`.
pub fn is_level(m: &IntMatrix, p: u64) -> bool {
    if !m.is_square() {
        return false;
    }
    let p = BigInt::from(p);
    m.sub(&IntMatrix::identity(m.rows())).map(|d| d.reduce_mod(&p).is_zero()).unwrap_or(false)
}

/// Genus and the form `J = [[0, 1_g], [-1_g, 0]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticContext {
    g: usize,
    j: IntMatrix,
}

impl SymplecticContext {
    pub fn new(g: usize) -> Self {
        let mut j = IntMatrix::zeros(2 * g, 2 * g);
        for i in 0..g {
            j.set(i, g + i, BigInt::one());
            j.set(g + i, i, -BigInt::one());
        }
        SymplecticContext { g, j }
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn form(&self) -> &IntMatrix {
        &self.j
    }

    fn check(&self, m: &IntMatrix) -> Result<()> {
        if m.rows() != 2 * self.g || m.cols() != 2 * self.g {
            return Err(Error::DimensionMismatch { expected: 2 * self.g, found: m.rows().max(m.cols()) });
        }
        Ok(())
    }
}

/// `M^T J M = J` exactly.
pub fn is_symplectic(m: &IntMatrix, ctx: &SymplecticContext) -> Result<bool> {
    ctx.check(m)?;
    Ok(m.transpose().mul(&ctx.j)?.mul(m)? == ctx.j)
}

/// `A mod p` (entries in `[0, p)`) for `M = 1 + pA`.
pub fn congruence_log(m: &IntMatrix, p: u64) -> Result<IntMatrix> {
    if !is_level(m, p) {
        return Err(Error::NotLevel { p });
    }
    let pb = BigInt::from(p);
    let a = m.sub(&IntMatrix::identity(m.rows()))?.div_exact(&pb).ok_or(Error::NotLevel { p })?;
    Ok(a.reduce_mod(&pb))
}

/// `A^T J + J A ≡ 0 (mod p)`.
pub fn in_sp_lie(a: &IntMatrix, ctx: &SymplecticContext, p: u64) -> Result<bool> {
    ctx.check(a)?;
    let s = a.transpose().mul(&ctx.j)?.add(&ctx.j.mul(a)?)?;
    Ok(s.reduce_mod(&BigInt::from(p)).is_zero())
}

/// Row-reduces `vectors` over `Z/p` in order; returns the rank and the
/// positions of vectors that depend on earlier ones.
pub fn rank_mod_p(vectors: &[Vec<BigInt>], p: u64) -> Result<(usize, Vec<usize>)> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pb = BigInt::from(p);
    // pivot column -> reduced row with a 1 there
    let mut basis: Vec<(usize, Vec<BigInt>)> = Vec::new();
    let mut dependent = Vec::new();
    for (pos, v) in vectors.iter().enumerate() {
        let mut v: Vec<BigInt> = v.iter().map(|x| x.mod_floor(&pb)).collect();
        for (col, row) in &basis {
            let f = v[*col].clone();
            if !f.is_zero() {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = (&*x - &f * r).mod_floor(&pb);
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => dependent.push(pos),
            Some(col) => {
                let inv = mod_inverse(&v[col], &pb);
                for x in v.iter_mut() {
                    *x = (&*x * &inv).mod_floor(&pb);
                }
                basis.push((col, v));
            }
        }
    }
    Ok((basis.len(), dependent))
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.extended_gcd(p);
    e.x.mod_floor(p)
}

/// Outcome of the rank check for `ρ: Sp_2g(Z, p) → sp_2g(Z/p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCertificate {
    pub g: usize,
    pub p: u64,
    pub generators: usize,
    pub rank: usize,
    pub expected: usize,
    pub dependent: Vec<String>,
    pub all_in_sp_lie: bool,
}

impl RankCertificate {
    pub fn passed(&self) -> bool {
        self.rank == self.expected && self.generators == self.expected && self.all_in_sp_lie
    }
}

/// Rank over `Z/p` of the reductions of the given level-`p` generators.
pub fn lie_rank_of(g: usize, p: u64, kinds: &[SpKind]) -> Result<RankCertificate> {
    let ctx = SymplecticContext::new(g);
    let mut vectors = Vec::with_capacity(kinds.len());
    let mut all_in = true;
    for &k in kinds {
        let a = congruence_log(&gen_sp(k, g)?, p)?;
        all_in &= in_sp_lie(&a, &ctx, p)?;
        vectors.push(a.to_rows().into_iter().flatten().collect());
    }
    let (rank, dep) = rank_mod_p(&vectors, p)?;
    Ok(RankCertificate {
        g,
        p,
        generators: kinds.len(),
        rank,
        expected: 2 * g * g + g,
        dependent: dep.into_iter().map(|i| format!("{}", kinds[i])).collect(),
        all_in_sp_lie: all_in,
    })
}

/// Rank of the full level-`p` generating set; equals `dim sp_2g = 2g^2 + g`
/// when the set maps onto a basis.
pub fn lie_rank_certificate(g: usize, p: u64) -> Result<RankCertificate> {
    if g < 1 {
        return Err(Error::InvalidParameter("genus must be at least 1".into()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    lie_rank_of(g, p, &sp_level_generators(g, p as i64))
}

/// Rank of `{E_ij(p)} ∪ {B_i(p)}` under `M ↦ (M - 1)/p mod p`, with the
/// generators that depend on earlier ones. Full rank is `n^2 - 1`.
pub fn sl_lie_rank(n: usize, p: u64) -> Result<(usize, Vec<String>)> {
    if n < 2 {
        return Err(Error::InvalidParameter("sl rank needs n >= 2".into()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let kinds = sl_level_generators(n, p as i64);
    let mut vectors = Vec::with_capacity(kinds.len());
    for &k in &kinds {
        let a = congruence_log(&gen_sl(k, n)?, p)?;
        vectors.push(a.to_rows().into_iter().flatten().collect());
    }
    let (rank, dep) = rank_mod_p(&vectors, p)?;
    Ok((rank, dep.into_iter().map(|i| format!("{}", kinds[i])).collect()))
}

/// One lifted automorphism against its matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftEntry {
    pub name: String,
    pub abelianization_matches: bool,
    /// Whether the lift acts trivially on `H_1(F_n; Z/p)`; `None` when not
    /// expected (the lift of `N_1` is only level 2).
    pub level: Option<bool>,
    pub determinant: BigInt,
}

impl LiftEntry {
    pub fn passed(&self) -> bool {
        self.abelianization_matches && self.level != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftReport {
    pub n: usize,
    pub p: u64,
    pub entries: Vec<LiftEntry>,
}

impl LiftReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(LiftEntry::passed)
    }
}

/// Abelianizes the automorphism lifts `Ẽ_ij(p)`, `B̃_i(p)`, `Ñ_1` and
/// compares them with `E_ij(p)`, `B_i(p)`, `N_1`.
pub fn sl_lift_check(n: usize, p: u64) -> Result<LiftReport> {
    if n < 2 {
        return Err(Error::InvalidParameter("lifts need n >= 2".into()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut kinds = sl_level_generators(n, p as i64);
    kinds.push(SlKind::N1);
    let mut entries = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let spec = match kind {
            SlKind::E(i, j, r) => GeneratorSpec::E(i, j, r),
            SlKind::B(i, r) => GeneratorSpec::B(i, r),
            SlKind::N1 => GeneratorSpec::N1,
        };
        let pi = make_generator(spec, n)?.abelianize();
        let m = gen_sl(kind, n)?;
        let level = match kind {
            SlKind::N1 if p != 2 => None,
            _ => Some(is_level(&pi, p)),
        };
        entries.push(LiftEntry {
            name: format!("{}", kind),
            abelianization_matches: pi == m,
            level,
            determinant: m.determinant()?,
        });
    }
    Ok(LiftReport { n, p, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sl_rank_is_full() {
        for n in 2..=5 {
            for p in [2u64, 3, 5] {
                assert_eq!(sl_lie_rank(n, p).unwrap(), (n * n - 1, Vec::new()));
            }
        }
        assert!(sl_lie_rank(3, 4).is_err());
    }

    #[test]
    fn displayed_b_matrix() {
        let b = gen_sl(SlKind::B(2, 7), 4).unwrap();
        assert_eq!(b, IntMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 8, 7, 0], &[0, -7, -6, 0], &[0, 0, 0, 1]]));
    }

    #[test]
    fn sl_determinants_and_levels() {
        assert_eq!(gen_sl(SlKind::N1, 3).unwrap().determinant().unwrap(), BigInt::from(-1));
        for n in 2..=5 {
            for p in [2i64, 3, 5] {
                for k in sl_level_generators(n, p) {
                    let m = gen_sl(k, n).unwrap();
                    assert_eq!(m.determinant().unwrap(), BigInt::one(), "{k}");
                    assert!(is_level(&m, p as u64));
                }
            }
        }
        assert!(is_level(&gen_sl(SlKind::N1, 3).unwrap(), 2));
        assert!(!is_level(&gen_sl(SlKind::N1, 3).unwrap(), 3));
        assert!(!is_level(&gen_sl(SlKind::E(1, 2, 1), 3).unwrap(), 2));
        assert!(is_level(&IntMatrix::identity(3), 7));
        assert!(gen_sl(SlKind::E(1, 1, 2), 3).is_err());
        assert!(gen_sl(SlKind::B(3, 2), 3).is_err());
    }

    #[test]
    fn sp_generators_are_symplectic_and_level() {
        for g in 1..=4 {
            let ctx = SymplecticContext::new(g);
            let j = ctx.form();
            assert_eq!(j.transpose(), j.neg());
            assert_eq!(j.mul(j).unwrap(), IntMatrix::identity(2 * g).neg());
            for p in [2i64, 3, 5] {
                let gens = sp_level_generators(g, p);
                assert_eq!(gens.len(), 2 * g * g + g);
                for k in gens {
                    let m = gen_sp(k, g).unwrap();
                    assert!(is_symplectic(&m, &ctx).unwrap(), "{k}");
                    assert!(is_level(&m, p as u64), "{k}");
                    assert!(in_sp_lie(&congruence_log(&m, p as u64).unwrap(), &ctx, p as u64).unwrap());
                }
            }
        }
    }

    #[test]
    fn sp_block_layout() {
        let x = gen_sp(SpKind::X(1, 2, 3), 2).unwrap();
        assert_eq!(x.to_string(), "1,0,0,0\n0,1,0,0\n0,3,1,0\n3,0,0,1");
        let u = gen_sp(SpKind::U1(2), 2).unwrap();
        assert_eq!(u.to_string(), "3,0,2,0\n0,1,0,0\n-2,0,-1,0\n0,0,0,1");
        assert!(gen_sp(SpKind::X(2, 1, 3), 2).is_err());
        assert!(gen_sp(SpKind::Z(1, 1, 3), 2).is_err());
        assert!(gen_sp(SpKind::W(2, 3), 2).is_err());
    }

    #[test]
    fn non_symplectic_detected() {
        let ctx = SymplecticContext::new(2);
        // a_1 ↦ a_1 + a_2 alone breaks the pairing with b_2
        let m = gen_sl(SlKind::E(2, 1, 1), 4).unwrap();
        assert!(!is_symplectic(&m, &ctx).unwrap());
        assert!(is_symplectic(&IntMatrix::identity(4), &ctx).unwrap());
        assert!(is_symplectic(&IntMatrix::identity(3), &ctx).is_err());
        let a = gen_sl(SlKind::E(2, 1, 1), 4).unwrap().sub(&IntMatrix::identity(4)).unwrap();
        assert!(!in_sp_lie(&a, &ctx, 3).unwrap());
        assert!(in_sp_lie(&IntMatrix::zeros(4, 4), &ctx, 3).unwrap());
    }

    #[test]
    fn log_examples() {
        assert!(congruence_log(&IntMatrix::identity(3), 5).unwrap().is_zero());
        let l = congruence_log(&gen_sl(SlKind::E(1, 2, 5), 3).unwrap(), 5).unwrap();
        assert_eq!(l, gen_sl(SlKind::E(1, 2, 1), 3).unwrap().sub(&IntMatrix::identity(3)).unwrap());
        assert_eq!(congruence_log(&gen_sl(SlKind::E(1, 2, 1), 3).unwrap(), 5), Err(Error::NotLevel { p: 5 }));
    }

    #[test]
    fn log_is_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [2u64, 3, 5] {
            let pool = sp_level_generators(3, p as i64);
            for _ in 0..50 {
                let a = gen_sp(pool[rng.gen_range(0..pool.len())], 3).unwrap();
                let b = gen_sp(pool[rng.gen_range(0..pool.len())], 3).unwrap();
                let lhs = congruence_log(&a.mul(&b).unwrap(), p).unwrap();
                let rhs = congruence_log(&a, p).unwrap().add(&congruence_log(&b, p).unwrap()).unwrap();
                assert_eq!(lhs, rhs.reduce_mod(&BigInt::from(p)));
            }
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(lie_rank_certificate(2, 2).unwrap().rank, 10);
        assert_eq!(lie_rank_certificate(3, 3).unwrap().rank, 21);
        for g in 2..=4 {
            for p in [2u64, 3, 5] {
                let c = lie_rank_certificate(g, p).unwrap();
                assert!(c.passed(), "{c:?}");
                assert!(c.dependent.is_empty());
            }
        }
    }

    #[test]
    fn dropping_w_and_u_loses_rank() {
        for p in [2u64, 3, 5] {
            let kinds: Vec<SpKind> = sp_level_generators(3, p as i64)
                .into_iter()
                .filter(|k| !matches!(k, SpKind::W(..) | SpKind::U1(_)))
                .collect();
            let c = lie_rank_of(3, p, &kinds).unwrap();
            assert!(c.rank < 21);
            assert_eq!(c.rank, 21 - 3);
        }
    }

    #[test]
    fn dependent_subset_reported() {
        let mut kinds = sp_level_generators(2, 3);
        kinds.push(SpKind::X(1, 1, 6));
        let c = lie_rank_of(2, 3, &kinds).unwrap();
        assert_eq!(c.rank, 10);
        assert_eq!(c.dependent, alloc::vec!["X(1,1,6)".to_string()]);
        assert!(!c.passed());
    }

    #[test]
    fn lifts_match() {
        for n in 3..=5 {
            for p in [2u64, 3, 5] {
                let r = sl_lift_check(n, p).unwrap();
                assert!(r.passed(), "{r:?}");
                assert_eq!(r.entries.len(), n * (n - 1) + (n - 1) + 1);
            }
        }
    }

    /// Random unimodular matrices from elementary moves and sign flips.
    #[test]
    fn gl_sl_dichotomy() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 3;
        for p in [3u64, 5, 7] {
            let pool = sl_level_generators(n, p as i64);
            let mut level_seen = 0;
            for _ in 0..200 {
                let mut m = IntMatrix::identity(n);
                for _ in 0..6 {
                    let k = pool[rng.gen_range(0..pool.len())];
                    m = m.mul(&gen_sl(k, n).unwrap()).unwrap();
                    if rng.gen_bool(0.3) {
                        m = m.mul(&gen_sl(SlKind::N1, n).unwrap()).unwrap();
                    }
                }
                let d = m.determinant().unwrap();
                assert!(d == BigInt::one() || d == -BigInt::one());
                if is_level(&m, p) {
                    level_seen += 1;
                    assert_eq!(d, BigInt::one());
                }
            }
            assert!(level_seen > 0);
        }
    }
}

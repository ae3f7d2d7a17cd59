//! Finitely presented FI-modules restricted to the subsets of `[N]`.
//!
//! A module is given by a presented abelian group `W_I` per subset, a map
//! per one-step inclusion `I ⊂ I ∪ {j}`, and the action of each adjacent
//! transposition of the sorted elements of `I`. Groups on subsets of equal
//! size must be presented identically, so order-preserving bijections act
//! as the identity; every other injection is derived as a permutation
//! action followed by a chain of one-step inclusions.
//!
//! For `|J| ≥ 1`, `ψ: ⊕_{|I| = |J|-1} W_I → W_J` and
//! `η: ⊕_{|K| = |J|-2} W_K → ⊕_{|I| = |J|-1} W_I` assemble the central
//! stabilization `Stab(W)_J = coker η` and its natural map to `W_J`.
//! `J = ∅` is never swept.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;

use crate::snf::{columns_in_span, AbelianInvariants};
use crate::sparse::{cokernel_invariants, SpMat};
use crate::{Error, Result};

/// A subset of `[N]` as a bit mask; element `i` is bit `i - 1`.
pub type Subset = u32;

/// Largest supported ambient size.
pub const MAX_N: usize = 16;

pub fn subset(elements: &[usize]) -> Result<Subset> {
    let mut s = 0;
    for &e in elements {
        if e == 0 || e > MAX_N {
            return Err(Error::IndexOutOfRange { index: e, rank: MAX_N });
        }
        s |= 1 << (e - 1);
    }
    Ok(s)
}

/// Sorted elements of `s`.
pub fn elements(s: Subset) -> Vec<usize> {
    (1..=MAX_N).filter(|&i| s & (1 << (i - 1)) != 0).collect()
}

pub fn size(s: Subset) -> usize {
    s.count_ones() as usize
}

/// `{1, ..., m}`.
pub fn initial(m: usize) -> Subset {
    ((1u64 << m) - 1) as Subset
}

/// Number of elements of `s` below `j`.
fn rank_of(s: Subset, j: usize) -> usize {
    size(s & ((1u32 << (j - 1)) - 1))
}

fn contains(s: Subset, j: usize) -> bool {
    s & (1 << (j - 1)) != 0
}

/// Subsets of `[n]` in mask order.
pub fn all_subsets(n: usize) -> impl Iterator<Item = Subset> {
    0..(1u32 << n)
}

/// Display form `{1,3,4}`.
pub fn format_subset(s: Subset) -> String {
    let e: Vec<String> = elements(s).iter().map(|i| format!("{}", i)).collect();
    format!("{{{}}}", e.join(","))
}

/// A finitely generated abelian group `Z^ngens / colspan(relations)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FGAbelian {
    ngens: usize,
    relations: SpMat,
}

impl FGAbelian {
    pub fn new(ngens: usize, relations: SpMat) -> Result<Self> {
        if relations.rows() != ngens {
            return Err(Error::DimensionMismatch { expected: ngens, found: relations.rows() });
        }
        Ok(FGAbelian { ngens, relations })
    }

    pub fn free(ngens: usize) -> Self {
        FGAbelian { ngens, relations: SpMat::zeros(ngens, 0) }
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &SpMat {
        &self.relations
    }

    pub fn invariants(&self) -> AbelianInvariants {
        cokernel_invariants(&self.relations)
    }

    pub fn direct_sum(parts: &[&FGAbelian]) -> FGAbelian {
        let rels: Vec<&SpMat> = parts.iter().map(|g| &g.relations).collect();
        let relations = SpMat::block_diag(&rels);
        FGAbelian { ngens: relations.rows(), relations }
    }

    /// Whether every column of `b` is zero in this group.
    pub fn kills(&self, b: &SpMat) -> bool {
        if b.is_zero() {
            return true;
        }
        if self.relations.nnz() == 0 {
            return false;
        }
        columns_in_span(&self.relations.to_dense(), &b.to_dense())
    }
}

/// A homomorphism given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbMap {
    pub source: FGAbelian,
    pub target: FGAbelian,
    pub matrix: SpMat,
}

impl AbMap {
    pub fn new(source: FGAbelian, target: FGAbelian, matrix: SpMat) -> Result<Self> {
        if matrix.rows() != target.ngens || matrix.cols() != source.ngens {
            return Err(Error::DimensionMismatch { expected: target.ngens * source.ngens, found: matrix.rows() * matrix.cols() });
        }
        Ok(AbMap { source, target, matrix })
    }

    /// Relators of the source map to zero in the target.
    pub fn is_well_defined(&self) -> bool {
        self.matrix.mul(&self.source.relations).map(|m| self.target.kills(&m)).unwrap_or(false)
    }

    pub fn is_surjective(&self) -> bool {
        surjective(&self.matrix, &self.target)
    }

    /// Agreement on every generator, modulo target relations.
    pub fn equals(&self, other: &AbMap) -> bool {
        self.matrix.sub(&other.matrix).map(|d| self.target.kills(&d)).unwrap_or(false)
    }
}

fn surjective(m: &SpMat, target: &FGAbelian) -> bool {
    SpMat::hstack(target.ngens, &[m, &target.relations]).map(|a| cokernel_invariants(&a).is_trivial()).unwrap_or(false)
}

/// One named verification outcome, with the first violation when it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

impl Check {
    fn new(name: &str) -> Self {
        Check { name: String::from(name), passed: true, detail: None }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok && self.passed {
            self.passed = false;
            self.detail = Some(detail());
        }
    }
}

/// An FI-module restricted to subsets of `[N]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FIModulePresentation {
    n: usize,
    groups: Vec<FGAbelian>,
    steps: BTreeMap<(Subset, usize), SpMat>,
    transpositions: BTreeMap<(Subset, usize), SpMat>,
}

impl FIModulePresentation {
    /// `steps[(I, j)]: W_I → W_{I+j}` for every `j ∉ I`;
    /// `transpositions[(I, s)]: W_I → W_I` for `1 ≤ s < |I|`, swapping the
    /// `s`-th and `(s+1)`-th smallest elements of `I`.
    pub fn new(
        n: usize,
        groups: BTreeMap<Subset, FGAbelian>,
        steps: BTreeMap<(Subset, usize), SpMat>,
        transpositions: BTreeMap<(Subset, usize), SpMat>,
    ) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::InvalidParameter(format!("N = {} exceeds {}", n, MAX_N)));
        }
        let missing = |what: String| Error::Presentation(format!("missing {}", what));
        let mut gs = Vec::with_capacity(1 << n);
        for s in all_subsets(n) {
            gs.push(groups.get(&s).cloned().ok_or_else(|| missing(format!("group {}", format_subset(s))))?);
        }
        if groups.keys().any(|&s| s >= (1 << n)) {
            return Err(Error::Presentation(format!("group outside [{}]", n)));
        }
        let expect_shape = |m: &SpMat, rows: usize, cols: usize, what: String| {
            if m.rows() != rows || m.cols() != cols {
                Err(Error::Presentation(format!("{} has shape {}x{}, expected {}x{}", what, m.rows(), m.cols(), rows, cols)))
            } else {
                Ok(())
            }
        };
        for s in all_subsets(n) {
            for j in 1..=n {
                if contains(s, j) {
                    continue;
                }
                let key = format!("step {} -> +{}", format_subset(s), j);
                let m = steps.get(&(s, j)).ok_or_else(|| missing(key.clone()))?;
                expect_shape(m, gs[(s | 1 << (j - 1)) as usize].ngens, gs[s as usize].ngens, key)?;
            }
            for t in 1..size(s) {
                let key = format!("transposition {}:{}", format_subset(s), t);
                let m = transpositions.get(&(s, t)).ok_or_else(|| missing(key.clone()))?;
                expect_shape(m, gs[s as usize].ngens, gs[s as usize].ngens, key)?;
            }
        }
        let expected_steps: usize = all_subsets(n).map(|s| n - size(s)).sum();
        let expected_transpositions: usize = all_subsets(n).map(|s| size(s).saturating_sub(1)).sum();
        if steps.len() != expected_steps || transpositions.len() != expected_transpositions {
            return Err(Error::Presentation(String::from("unexpected extra step or transposition entries")));
        }
        Ok(FIModulePresentation { n, groups: gs, steps, transpositions })
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn group(&self, s: Subset) -> &FGAbelian {
        &self.groups[s as usize]
    }

    pub fn step(&self, s: Subset, j: usize) -> &SpMat {
        &self.steps[&(s, j)]
    }

    pub fn transposition(&self, s: Subset, t: usize) -> &SpMat {
        &self.transpositions[&(s, t)]
    }

    pub fn steps(&self) -> &BTreeMap<(Subset, usize), SpMat> {
        &self.steps
    }

    pub fn transpositions(&self) -> &BTreeMap<(Subset, usize), SpMat> {
        &self.transpositions
    }

    /// Replaces one step map; shapes must agree.
    pub fn with_step(&self, s: Subset, j: usize, m: SpMat) -> Result<Self> {
        let old = self.steps.get(&(s, j)).ok_or_else(|| Error::Presentation(String::from("no such step")))?;
        if old.rows() != m.rows() || old.cols() != m.cols() {
            return Err(Error::DimensionMismatch { expected: old.rows() * old.cols(), found: m.rows() * m.cols() });
        }
        let mut out = self.clone();
        out.steps.insert((s, j), m);
        Ok(out)
    }

    /// Derived `W_I → W_J` for `I ⊆ J`, adding elements in increasing order.
    pub fn inclusion(&self, i: Subset, j: Subset) -> Result<SpMat> {
        if i & !j != 0 {
            return Err(Error::InvalidParameter(format!("{} is not inside {}", format_subset(i), format_subset(j))));
        }
        let mut acc = SpMat::identity(self.group(i).ngens);
        let mut cur = i;
        for e in elements(j & !i) {
            acc = self.step(cur, e).mul(&acc)?;
            cur |= 1 << (e - 1);
        }
        Ok(acc)
    }

    /// Action on `W_I` of the bijection sending the `t`-th smallest element
    /// of `I` to the `perm[t-1]`-th smallest.
    pub fn permutation_action(&self, s: Subset, perm: &[usize]) -> Result<SpMat> {
        let m = size(s);
        let mut seen = alloc::vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p == 0 || p > m || core::mem::replace(&mut seen[p - 1], true)) {
            return Err(Error::InvalidParameter(String::from("not a permutation of the positions")));
        }
        // bubble sort: a ∘ s_{u1} ∘ ... ∘ s_{ur} = id, so W = T_{ur} ... T_{u1}
        let mut a = perm.to_vec();
        let mut acc = SpMat::identity(self.group(s).ngens);
        let mut sorted = false;
        while !sorted {
            sorted = true;
            for t in 1..m {
                if a[t - 1] > a[t] {
                    a.swap(t - 1, t);
                    acc = self.transposition(s, t).mul(&acc)?;
                    sorted = false;
                }
            }
        }
        Ok(acc)
    }

    /// Derived map of the injection sending the sorted elements of `i` to
    /// `f` (elements of `j`).
    pub fn injection_map(&self, i: Subset, j: Subset, f: &[usize]) -> Result<SpMat> {
        let image = subset(f)?;
        if f.len() != size(i) || size(image) != f.len() || image & !j != 0 {
            return Err(Error::InvalidParameter(String::from("not an injection between the given subsets")));
        }
        let perm: Vec<usize> = f.iter().map(|&e| rank_of(image, e) + 1).collect();
        let w = self.permutation_action(image, &perm)?;
        self.inclusion(image, j)?.mul(&w)
    }

    fn eq_in(&self, target: Subset, a: &SpMat, b: &SpMat) -> bool {
        a.sub(b).map(|d| self.group(target).kills(&d)).unwrap_or(false)
    }
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// The first failed check and its violated relation.
    pub fn first_violation(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Bijection-free pattern of `(I, j)`: `I' = [m+1] \ {p+1}`, `j' = p+1`.
fn canonical_step(s: Subset, j: usize) -> (Subset, usize) {
    let p = rank_of(s, j);
    let m = size(s);
    (initial(m + 1) & !(1 << p), p + 1)
}

/// Checks the identity and composition laws on derived maps, relation
/// preservation, identical presentations in each size, and the
/// symmetric-group relations.
pub fn validate(m: &FIModulePresentation) -> Result<ValidationReport> {
    let n = m.n;
    let mut checks = Vec::new();

    let mut c = Check::new("presentations_equal_by_size");
    for s in all_subsets(n) {
        c.record(m.group(s) == m.group(initial(size(s))), || format_subset(s));
    }
    checks.push(c);

    let mut c = Check::new("maps_preserve_relations");
    for (&(s, j), st) in &m.steps {
        let t = s | 1 << (j - 1);
        c.record(m.group(t).kills(&st.mul(m.group(s).relations())?), || format!("step {} -> +{}", format_subset(s), j));
    }
    for (&(s, t), tr) in &m.transpositions {
        c.record(m.group(s).kills(&tr.mul(m.group(s).relations())?), || format!("transposition {}:{}", format_subset(s), t));
    }
    checks.push(c);

    let mut c = Check::new("steps_depend_on_position");
    for (&(s, j), st) in &m.steps {
        let (cs, cj) = canonical_step(s, j);
        c.record(m.eq_in(s | 1 << (j - 1), st, m.step(cs, cj)), || format!("step {} -> +{}", format_subset(s), j));
    }
    checks.push(c);

    let mut c = Check::new("transpositions_depend_on_size");
    for (&(s, t), tr) in &m.transpositions {
        c.record(m.eq_in(s, tr, m.transposition(initial(size(s)), t)), || format!("transposition {}:{}", format_subset(s), t));
    }
    checks.push(c);

    let mut inv = Check::new("transposition_involution");
    let mut braid = Check::new("braid_relation");
    let mut far = Check::new("far_commutation");
    for k in 2..=n {
        let s = initial(k);
        let id = SpMat::identity(m.group(s).ngens);
        for t in 1..k {
            let a = m.transposition(s, t);
            inv.record(m.eq_in(s, &a.mul(a)?, &id), || format!("s{} on {}", t, format_subset(s)));
            for u in t + 1..k {
                let b = m.transposition(s, u);
                if u == t + 1 {
                    let lhs = a.mul(b)?.mul(a)?;
                    let rhs = b.mul(a)?.mul(b)?;
                    braid.record(m.eq_in(s, &lhs, &rhs), || format!("s{} s{} on {}", t, u, format_subset(s)));
                } else {
                    far.record(m.eq_in(s, &a.mul(b)?, &b.mul(a)?), || format!("s{} s{} on {}", t, u, format_subset(s)));
                }
            }
        }
    }
    checks.extend([inv, braid, far]);

    let mut c = Check::new("identity_law");
    for s in all_subsets(n) {
        let id: Vec<usize> = (1..=size(s)).collect();
        c.record(m.permutation_action(s, &id)?.is_identity() && m.inclusion(s, s)?.is_identity(), || format_subset(s));
    }
    checks.push(c);

    let mut c = Check::new("steps_commute");
    for s in all_subsets(n) {
        for j in 1..=n {
            for k in j + 1..=n {
                if contains(s, j) || contains(s, k) {
                    continue;
                }
                let (sj, sk) = (s | 1 << (j - 1), s | 1 << (k - 1));
                let lhs = m.step(sj, k).mul(m.step(s, j))?;
                let rhs = m.step(sk, j).mul(m.step(s, k))?;
                c.record(m.eq_in(sj | sk, &lhs, &rhs), || format!("{} + {}, {}", format_subset(s), j, k));
            }
        }
    }
    checks.push(c);

    let mut c = Check::new("steps_equivariant");
    for (&(s, j), st) in &m.steps {
        let big = s | 1 << (j - 1);
        let el = elements(s);
        for t in 1..el.len() {
            let (pa, pb) = (rank_of(big, el[t - 1]) + 1, rank_of(big, el[t]) + 1);
            let mut perm: Vec<usize> = (1..=size(big)).collect();
            perm.swap(pa - 1, pb - 1);
            let lhs = st.mul(m.transposition(s, t))?;
            let rhs = m.permutation_action(big, &perm)?.mul(st)?;
            c.record(m.eq_in(big, &lhs, &rhs), || format!("step {} -> +{} with s{}", format_subset(s), j, t));
        }
    }
    checks.push(c);

    let mut c = Check::new("composition_on_triples");
    let mut incl: BTreeMap<(Subset, Subset), SpMat> = BTreeMap::new();
    let mut get = |a: Subset, b: Subset| -> Result<SpMat> {
        if let Some(x) = incl.get(&(a, b)) {
            return Ok(x.clone());
        }
        let x = m.inclusion(a, b)?;
        incl.insert((a, b), x.clone());
        Ok(x)
    };
    for k in all_subsets(n) {
        for j in all_subsets(n).filter(|&j| j & !k == 0 && j != k) {
            for i in all_subsets(n).filter(|&i| i & !j == 0 && i != j) {
                let lhs = get(j, k)?.mul(&get(i, j)?)?;
                let rhs = get(i, k)?;
                c.record(m.eq_in(k, &lhs, &rhs), || {
                    format!("{} in {} in {}", format_subset(i), format_subset(j), format_subset(k))
                });
            }
        }
    }
    checks.push(c);

    let mut c = Check::new("injection_composition");
    let k = initial(n);
    for m1 in 0..=n {
        for m2 in m1..=n {
            let j = initial(n) & !initial(n - m2);
            let je = elements(j);
            let ke = elements(k);
            for shift in 0..m2.max(1) {
                let f: Vec<usize> = (0..m1).map(|t| je[wrap(shift, t, m2)]).collect();
                let g: Vec<usize> = (0..m2).map(|t| ke[wrap(shift + 1, t, n)]).collect();
                let gf: Vec<usize> = f.iter().map(|e| g[je.iter().position(|x| x == e).expect("in J")]).collect();
                let i = initial(m1);
                let lhs = m.injection_map(j, k, &g)?.mul(&m.injection_map(i, j, &f)?)?;
                let rhs = m.injection_map(i, k, &gf)?;
                c.record(m.eq_in(k, &lhs, &rhs), || format!("|I|={} |J|={} shift {}", m1, m2, shift));
            }
        }
    }
    checks.push(c);

    Ok(ValidationReport { checks })
}

/// Index `t` of a deterministic injective reindexing of `0..len`: forward
/// rotation for even `shift`, reversed rotation for odd.
fn wrap(shift: usize, t: usize, len: usize) -> usize {
    if shift.is_multiple_of(2) {
        (shift + t) % len
    } else {
        (shift + len - t % len) % len
    }
}

/// Subsets `J \ {j}`, in increasing order of the missing element.
fn faces(j: Subset) -> Vec<(usize, Subset)> {
    elements(j).into_iter().map(|e| (e, j & !(1 << (e - 1)))).collect()
}

/// `ψ: ⊕_{I = J \ {j}} W_I → W_J`, blocks ordered by the missing element.
pub fn psi(m: &FIModulePresentation, j: Subset) -> Result<AbMap> {
    if j == 0 {
        return Err(Error::InvalidParameter(String::from("psi needs |J| >= 1")));
    }
    let fs = faces(j);
    let parts: Vec<&FGAbelian> = fs.iter().map(|(_, i)| m.group(*i)).collect();
    let blocks: Vec<&SpMat> = fs.iter().map(|(e, i)| m.step(*i, *e)).collect();
    let matrix = SpMat::hstack(m.group(j).ngens, &blocks)?;
    AbMap::new(FGAbelian::direct_sum(&parts), m.group(j).clone(), matrix)
}

/// `η: ⊕_{K = J \ {a, b}} W_K → ⊕_{I = J \ {j}} W_I`. For `a < b`, `x ∈ W_K`
/// goes to `W_K^{K+b}(x)` in the summand missing `a` and to
/// `-W_K^{K+a}(x)` in the summand missing `b`. `K` blocks are ordered by
/// `(a, b)` lexicographically.
pub fn eta(m: &FIModulePresentation, j: Subset) -> Result<AbMap> {
    let fs = faces(j);
    let parts: Vec<&FGAbelian> = fs.iter().map(|(_, i)| m.group(*i)).collect();
    let target = FGAbelian::direct_sum(&parts);
    let mut offsets = Vec::with_capacity(fs.len());
    let mut acc = 0;
    for p in &parts {
        offsets.push(acc);
        acc += p.ngens;
    }
    let el = elements(j);
    let mut sources = Vec::new();
    let mut blocks = Vec::new();
    for (x, &a) in el.iter().enumerate() {
        for (y, &b) in el.iter().enumerate().skip(x + 1) {
            let k = j & !(1 << (a - 1)) & !(1 << (b - 1));
            let plus = m.step(k, b).shifted(target.ngens, offsets[x]);
            let minus = m.step(k, a).neg().shifted(target.ngens, offsets[y]);
            blocks.push(plus.add(&minus)?);
            sources.push(m.group(k));
        }
    }
    let refs: Vec<&SpMat> = blocks.iter().collect();
    let matrix = SpMat::hstack(target.ngens, &refs)?;
    AbMap::new(FGAbelian::direct_sum(&sources), target, matrix)
}

/// `Stab(W)_J`, its natural map to `W_J`, and whether that map is an
/// isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabResult {
    pub j: Subset,
    pub stab: FGAbelian,
    pub nat_map: AbMap,
    pub stab_invariants: AbelianInvariants,
    pub target_invariants: AbelianInvariants,
    /// `ψ` respects the relations of each `W_I` and `ψ ∘ η = 0`.
    pub well_defined: bool,
    pub surjective: bool,
    pub iso: bool,
}

/// Central stabilization at `J`. The map is an isomorphism iff it is onto
/// and both groups have the same invariant factors, since finitely
/// generated abelian groups are Hopfian.
pub fn central_stabilization(m: &FIModulePresentation, j: Subset) -> Result<StabResult> {
    let p = psi(m, j)?;
    let e = eta(m, j)?;
    let relations = SpMat::hstack(p.source.ngens, &[p.source.relations(), &e.matrix])?;
    let stab = FGAbelian::new(p.source.ngens, relations)?;
    let well_defined = p.is_well_defined() && m.group(j).kills(&p.matrix.mul(&e.matrix)?);
    let nat_map = AbMap::new(stab.clone(), m.group(j).clone(), p.matrix)?;
    let surjective = nat_map.is_surjective();
    let stab_invariants = stab.invariants();
    let target_invariants = m.group(j).invariants();
    let iso = surjective && stab_invariants == target_invariants;
    Ok(StabResult { j, stab, nat_map, stab_invariants, target_invariants, well_defined, surjective, iso })
}

/// Whether `⊕_{I ⊆ J, |I| ≤ a} W_I → W_J` is onto. Only `|I| = a` is
/// needed when `|J| > a`, since smaller subsets factor through those.
pub fn generated_in_degree(m: &FIModulePresentation, j: Subset, a: usize) -> Result<bool> {
    if size(j) <= a {
        return Ok(true);
    }
    let mut blocks = Vec::new();
    for i in all_subsets(m.n).filter(|&i| i & !j == 0 && size(i) == a) {
        blocks.push(m.inclusion(i, j)?);
    }
    let refs: Vec<&SpMat> = blocks.iter().collect();
    Ok(surjective(&SpMat::hstack(m.group(j).ngens, &refs)?, m.group(j)))
}

/// Least `A` such that every `W_J` is generated by the images of the
/// `W_I` with `|I| ≤ A`. Always at most `N`.
pub fn generation_degree(m: &FIModulePresentation) -> Result<usize> {
    for a in 0..=m.n {
        let mut ok = true;
        for j in all_subsets(m.n) {
            if !generated_in_degree(m, j, a)? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(a);
        }
    }
    Ok(m.n)
}

/// Least `E` with the natural map an isomorphism for all `E < |J| ≤ N`,
/// from an iso table over nonempty `J`. `None` when it fails at `|J| = N`,
/// where the sweep gives no evidence of stability.
pub fn stability_start_of(n: usize, table: &[(Subset, bool)]) -> Option<usize> {
    let worst = table.iter().filter(|(_, iso)| !iso).map(|(j, _)| size(*j)).max();
    match worst {
        None => Some(0),
        Some(w) if w >= n => None,
        Some(w) => Some(w),
    }
}

/// Whether the natural map is an isomorphism, per `J`.
pub type IsoTable = Vec<(Subset, bool)>;

/// Iso table over all nonempty `J ⊆ [N]` and the resulting start.
pub fn stability_start(m: &FIModulePresentation) -> Result<(IsoTable, Option<usize>)> {
    let mut table = Vec::new();
    for j in all_subsets(m.n).filter(|&j| j != 0) {
        table.push((j, central_stabilization(m, j)?.iso));
    }
    let start = stability_start_of(m.n, &table);
    Ok((table, start))
}

/// Test fixtures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinKind {
    /// `W_I = Z`, all maps the identity.
    Constant,
    /// `W_I = Z^I`.
    Standard,
    /// `W_I = Λ^m Z^I`.
    Exterior(usize),
    /// `W_I = H ⊗ Λ^k H` with `H = Z^{2|I|}`, basis `a_i, b_i` for `i ∈ I`.
    TensorWedge(usize),
}

impl fmt::Display for BuiltinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinKind::Constant => f.write_str("constant"),
            BuiltinKind::Standard => f.write_str("standard"),
            BuiltinKind::Exterior(k) => write!(f, "exterior({})", k),
            BuiltinKind::TensorWedge(k) => write!(f, "tensor_wedge({})", k),
        }
    }
}

impl FromStr for BuiltinKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown builtin module {:?}", s));
        match s.trim() {
            "constant" => return Ok(BuiltinKind::Constant),
            "standard" => return Ok(BuiltinKind::Standard),
            _ => {}
        }
        let (name, arg) = s.trim().strip_suffix(')').and_then(|t| t.split_once('(')).ok_or_else(bad)?;
        let k: usize = arg.trim().parse().map_err(|_| bad())?;
        match name {
            "exterior" if k >= 1 => Ok(BuiltinKind::Exterior(k)),
            "tensor_wedge" => Ok(BuiltinKind::TensorWedge(k)),
            _ => Err(bad()),
        }
    }
}

/// Sorts in place and returns the sign, or `None` on a repeated entry.
fn sort_with_sign(v: &mut [u16]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Increasing `k`-subsets of `1..=n`.
fn increasing(n: usize, k: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            cur.push(x as u16);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(1, n, k, &mut cur, &mut out);
    out
}

impl BuiltinKind {
    fn basis(self, m: usize) -> Vec<Vec<u16>> {
        match self {
            BuiltinKind::Constant => alloc::vec![Vec::new()],
            BuiltinKind::Standard => (1..=m as u16).map(|t| alloc::vec![t]).collect(),
            BuiltinKind::Exterior(k) => increasing(m, k),
            BuiltinKind::TensorWedge(k) => {
                let wedges = increasing(2 * m, k);
                let mut out = Vec::new();
                for h in 1..=(2 * m) as u16 {
                    for w in &wedges {
                        let mut key = alloc::vec![h];
                        key.extend_from_slice(w);
                        out.push(key);
                    }
                }
                out
            }
        }
    }

    /// Image of a basis element under the position map `f: [m] → [m2]`.
    fn act(self, key: &[u16], f: &[usize], m: usize, m2: usize) -> Option<(Vec<u16>, i64)> {
        let pos = |x: u16| f[x as usize - 1] as u16;
        match self {
            BuiltinKind::Constant => Some((Vec::new(), 1)),
            BuiltinKind::Standard => Some((alloc::vec![pos(key[0])], 1)),
            BuiltinKind::Exterior(_) => {
                let mut v: Vec<u16> = key.iter().map(|&x| pos(x)).collect();
                let s = sort_with_sign(&mut v)?;
                Some((v, s))
            }
            BuiltinKind::TensorWedge(_) => {
                let h = |x: u16| if x as usize <= m { pos(x) } else { (m2 + f[x as usize - m - 1]) as u16 };
                let mut w: Vec<u16> = key[1..].iter().map(|&x| h(x)).collect();
                let s = sort_with_sign(&mut w)?;
                let mut out = alloc::vec![h(key[0])];
                out.extend(w);
                Some((out, s))
            }
        }
    }

    fn matrix(self, m: usize, m2: usize, f: &[usize]) -> Result<SpMat> {
        let src = self.basis(m);
        let tgt: BTreeMap<Vec<u16>, usize> = self.basis(m2).into_iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut entries = Vec::with_capacity(src.len());
        for (c, key) in src.iter().enumerate() {
            if let Some((img, s)) = self.act(key, f, m, m2) {
                entries.push((tgt[&img], c, BigInt::from(s)));
            }
        }
        SpMat::from_triplets(tgt.len(), src.len(), entries)
    }
}

/// Presentation of a builtin module on the subsets of `[N]`.
pub fn builtin(kind: BuiltinKind, n: usize) -> Result<FIModulePresentation> {
    if n > 8 {
        return Err(Error::InvalidParameter(format!("builtin modules support N <= 8, got {}", n)));
    }
    let mut groups = BTreeMap::new();
    let mut steps = BTreeMap::new();
    let mut transpositions = BTreeMap::new();
    let mut step_cache: BTreeMap<(usize, usize), SpMat> = BTreeMap::new();
    let mut swap_cache: BTreeMap<(usize, usize), SpMat> = BTreeMap::new();
    for s in all_subsets(n) {
        let m = size(s);
        groups.insert(s, FGAbelian::free(kind.basis(m).len()));
        for j in (1..=n).filter(|&j| !contains(s, j)) {
            let p = rank_of(s, j);
            if let Entry::Vacant(e) = step_cache.entry((m, p)) {
                let f: Vec<usize> = (1..=m).map(|t| if t <= p { t } else { t + 1 }).collect();
                e.insert(kind.matrix(m, m + 1, &f)?);
            }
            steps.insert((s, j), step_cache[&(m, p)].clone());
        }
        for t in 1..m {
            if let Entry::Vacant(e) = swap_cache.entry((m, t)) {
                let mut f: Vec<usize> = (1..=m).collect();
                f.swap(t - 1, t);
                e.insert(kind.matrix(m, m, &f)?);
            }
            transpositions.insert((s, t), swap_cache[&(m, t)].clone());
        }
    }
    FIModulePresentation::new(n, groups, steps, transpositions)
}

/// A morphism `Ψ: V → W` of FI-modules, one matrix per subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FIMorphism {
    components: Vec<SpMat>,
}

impl FIMorphism {
    pub fn new(v: &FIModulePresentation, w: &FIModulePresentation, components: Vec<SpMat>) -> Result<Self> {
        if v.n != w.n || components.len() != 1 << v.n {
            return Err(Error::DimensionMismatch { expected: 1 << v.n, found: components.len() });
        }
        for s in all_subsets(v.n) {
            let c = &components[s as usize];
            if c.rows() != w.group(s).ngens || c.cols() != v.group(s).ngens {
                return Err(Error::Presentation(format!("component at {} has the wrong shape", format_subset(s))));
            }
        }
        Ok(FIMorphism { components })
    }

    pub fn component(&self, s: Subset) -> &SpMat {
        &self.components[s as usize]
    }

    /// Relations, steps and transpositions are respected.
    pub fn check(&self, v: &FIModulePresentation, w: &FIModulePresentation) -> Result<Vec<Check>> {
        let mut rel = Check::new("morphism_preserves_relations");
        let mut st = Check::new("morphism_commutes_with_steps");
        let mut tr = Check::new("morphism_commutes_with_transpositions");
        for s in all_subsets(v.n) {
            let c = self.component(s);
            rel.record(w.group(s).kills(&c.mul(v.group(s).relations())?), || format_subset(s));
            for j in (1..=v.n).filter(|&j| !contains(s, j)) {
                let t = s | 1 << (j - 1);
                let lhs = self.component(t).mul(v.step(s, j))?;
                let rhs = w.step(s, j).mul(c)?;
                st.record(w.eq_in(t, &lhs, &rhs), || format!("{} -> +{}", format_subset(s), j));
            }
            for t in 1..size(s) {
                let lhs = c.mul(v.transposition(s, t))?;
                let rhs = w.transposition(s, t).mul(c)?;
                tr.record(w.eq_in(s, &lhs, &rhs), || format!("{}:{}", format_subset(s), t));
            }
        }
        Ok(alloc::vec![rel, st, tr])
    }

    /// The induced `Stab(V)_J → Stab(W)_J`, block diagonal over `J \ {j}`.
    pub fn stab_map(&self, j: Subset) -> SpMat {
        let blocks: Vec<&SpMat> = faces(j).into_iter().map(|(_, i)| self.component(i)).collect();
        SpMat::block_diag(&blocks)
    }

    /// The stab map is well defined and `nat_W ∘ Stab(Ψ) = Ψ_J ∘ nat_V`.
    pub fn stab_square_commutes(&self, v: &FIModulePresentation, w: &FIModulePresentation, j: Subset) -> Result<bool> {
        let sv = central_stabilization(v, j)?;
        let sw = central_stabilization(w, j)?;
        let sm = self.stab_map(j);
        let well_defined = sw.stab.kills(&sm.mul(sv.stab.relations())?);
        let lhs = sw.nat_map.matrix.mul(&sm)?;
        let rhs = self.component(j).mul(&sv.nat_map.matrix)?;
        Ok(well_defined && w.eq_in(j, &lhs, &rhs))
    }

    /// `Ψ_J` is an isomorphism.
    pub fn is_iso_at(&self, v: &FIModulePresentation, w: &FIModulePresentation, j: Subset) -> bool {
        surjective(self.component(j), w.group(j)) && v.group(j).invariants() == w.group(j).invariants()
    }
}

/// Hypotheses and conclusion of the isomorphism-extension argument: `V`
/// generated in degree `E`, `W` centrally stable from `E`, `Ψ_J` iso for
/// `|J| ≤ E`; conclusion `Ψ_J` iso for all `J ⊆ [N]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionReport {
    pub e: usize,
    pub hypotheses: Vec<Check>,
    pub conclusion: Check,
}

impl ExtensionReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|c| c.passed)
    }
}

pub fn isomorphism_extension(
    v: &FIModulePresentation,
    w: &FIModulePresentation,
    psi_map: &FIMorphism,
    e: usize,
) -> Result<ExtensionReport> {
    let mut hypotheses = psi_map.check(v, w)?;
    let mut gen = Check::new("source_generated_in_degree_e");
    let g = generation_degree(v)?;
    gen.record(g <= e, || format!("generation degree {}", g));
    hypotheses.push(gen);
    let mut stable = Check::new("target_stable_from_e");
    let (_, start) = stability_start(w)?;
    stable.record(start.is_some_and(|s| s <= e), || format!("stability start {:?}", start));
    hypotheses.push(stable);
    let mut low = Check::new("iso_up_to_e");
    for j in all_subsets(v.n).filter(|&j| size(j) <= e) {
        low.record(psi_map.is_iso_at(v, w, j), || format_subset(j));
    }
    hypotheses.push(low);
    let mut conclusion = Check::new("iso_everywhere");
    for j in all_subsets(v.n) {
        conclusion.record(psi_map.is_iso_at(v, w, j), || format_subset(j));
    }
    Ok(ExtensionReport { e, hypotheses, conclusion })
}

/// `V = W ⊕ W / {(x, -x)}` with the fold map `(x, y) ↦ x + y`, an
/// isomorphism `V → W` presented with twice the generators.
pub fn doubled_cover(w: &FIModulePresentation) -> Result<(FIModulePresentation, FIMorphism)> {
    let n = w.n;
    let mut groups = BTreeMap::new();
    let mut steps = BTreeMap::new();
    let mut trs = BTreeMap::new();
    let mut comps = Vec::with_capacity(1 << n);
    for s in all_subsets(n) {
        let g = w.group(s);
        let m = g.ngens;
        let id = SpMat::identity(m);
        let anti = SpMat::from_triplets(2 * m, m, (0..m).flat_map(|t| [(t, t, BigInt::from(1)), (m + t, t, BigInt::from(-1))]))?;
        let rel = SpMat::hstack(2 * m, &[&anti, &SpMat::block_diag(&[g.relations(), g.relations()])])?;
        groups.insert(s, FGAbelian::new(2 * m, rel)?);
        comps.push(SpMat::hstack(m, &[&id, &id])?);
        for j in (1..=n).filter(|&j| !contains(s, j)) {
            let st = w.step(s, j);
            steps.insert((s, j), SpMat::block_diag(&[st, st]));
        }
        for t in 1..size(s) {
            let tr = w.transposition(s, t);
            trs.insert((s, t), SpMat::block_diag(&[tr, tr]));
        }
    }
    let v = FIModulePresentation::new(n, groups, steps, trs)?;
    let psi_map = FIMorphism::new(&v, w, comps)?;
    Ok((v, psi_map))
}

/// The augmentation `standard → constant`, `e_i ↦ 1`. Natural, but not an
/// isomorphism in any size other than 1.
pub fn augmentation(n: usize) -> Result<(FIModulePresentation, FIModulePresentation, FIMorphism)> {
    let v = builtin(BuiltinKind::Standard, n)?;
    let w = builtin(BuiltinKind::Constant, n)?;
    let comps = all_subsets(n)
        .map(|s| SpMat::from_triplets(1, size(s), (0..size(s)).map(|t| (0, t, BigInt::from(1)))))
        .collect::<Result<Vec<_>>>()?;
    let f = FIMorphism::new(&v, &w, comps)?;
    Ok((v, w, f))
}

//! Reduced words in the free group `F_n = <x_1, ..., x_n>` and
//! endomorphisms given by generator images.
//!
//! Group commutators follow `[a, b] = a^-1 b^-1 a b` and conjugation
//! `a^b = b^-1 a b`. These signs propagate into every Johnson
//! homomorphism computed downstream.

use alloc::vec::Vec;
use core::fmt;

use crate::matrix::IntMatrix;
use crate::{Error, Result};

/// A generator `x_i` or its inverse. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    index: u32,
    inverse: bool,
}

impl Letter {
    pub fn new(index: usize, inverse: bool) -> Self {
        assert!(index >= 1, "generator indices are 1-based");
        Letter { index: index as u32, inverse }
    }

    pub fn pos(index: usize) -> Self {
        Self::new(index, false)
    }

    pub fn neg(index: usize) -> Self {
        Self::new(index, true)
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Self {
        Letter { index: self.index, inverse: !self.inverse }
    }

    fn cancels(self, other: Letter) -> bool {
        self.index == other.index && self.inverse != other.inverse
    }
}

/// A freely reduced word in `F_rank`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<Letter>,
}

fn push_reduced(stack: &mut Vec<Letter>, l: Letter) {
    match stack.last() {
        Some(&top) if top.cancels(l) => {
            stack.pop();
        }
        _ => stack.push(l),
    }
}

impl FreeWord {
    pub fn identity(rank: usize) -> Self {
        FreeWord { rank, letters: Vec::new() }
    }

    pub fn generator(rank: usize, index: usize) -> Result<Self> {
        Self::reduce([Letter::pos(index)], rank)
    }

    /// Freely reduces a raw letter sequence in a single stack pass.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I, rank: usize) -> Result<Self> {
        let mut stack = Vec::new();
        for l in letters {
            if l.index() > rank {
                return Err(Error::IndexOutOfRange { index: l.index(), rank });
            }
            push_reduced(&mut stack, l);
        }
        Ok(FreeWord { rank, letters: stack })
    }

    /// Parses `(index, sign)` pairs, sign being `+1` or `-1`.
    pub fn from_signed(pairs: &[(usize, i32)], rank: usize) -> Result<Self> {
        let mut letters = Vec::with_capacity(pairs.len());
        for &(i, s) in pairs {
            if i == 0 || i > rank {
                return Err(Error::IndexOutOfRange { index: i, rank });
            }
            letters.push(Letter::new(i, s < 0));
        }
        Self::reduce(letters, rank)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn check_rank(&self, other: &FreeWord) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { left: self.rank, right: other.rank });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &FreeWord) -> Result<FreeWord> {
        self.check_rank(other)?;
        let mut stack = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut stack, l);
        }
        Ok(FreeWord { rank: self.rank, letters: stack })
    }

    pub fn invert(&self) -> FreeWord {
        let letters = self.letters.iter().rev().map(|l| l.inv()).collect();
        FreeWord { rank: self.rank, letters }
    }

    /// `self^e`, negative exponents allowed.
    pub fn pow(&self, e: i64) -> FreeWord {
        let base = if e < 0 { self.invert() } else { self.clone() };
        let mut out = FreeWord::identity(self.rank);
        for _ in 0..e.unsigned_abs() {
            out = out.multiply(&base).expect("same rank");
        }
        out
    }

    /// `[self, other] = self^-1 other^-1 self other`.
    pub fn commutator(&self, other: &FreeWord) -> Result<FreeWord> {
        self.check_rank(other)?;
        let mut stack = Vec::with_capacity(2 * (self.len() + other.len()));
        let parts = [self.invert(), other.invert(), self.clone(), other.clone()];
        for part in &parts {
            for &l in &part.letters {
                push_reduced(&mut stack, l);
            }
        }
        Ok(FreeWord { rank: self.rank, letters: stack })
    }

    /// `self^by = by^-1 self by`.
    pub fn conjugate(&self, by: &FreeWord) -> Result<FreeWord> {
        by.invert().multiply(self)?.multiply(by)
    }

    /// Exponent sum of each generator, indexed from 0.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = alloc::vec![0i64; self.rank];
        for l in &self.letters {
            sums[l.index() - 1] += l.sign();
        }
        sums
    }

    /// Generators that occur in the word.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.letters.iter().map(|l| l.index()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

/// Word text grammar: `x2^-1 x1 x2`, the empty word is `1`.
impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (pos, l) in self.letters.iter().enumerate() {
            if pos > 0 {
                f.write_str(" ")?;
            }
            write!(f, "x{}", l.index())?;
            if l.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

/// An endomorphism of `F_rank` given by the images of the generators, with
/// optional caller-supplied inverse images that are checked on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    rank: usize,
    images: Vec<FreeWord>,
    inverse: Option<Vec<FreeWord>>,
}

fn substitute(rank: usize, images: &[FreeWord], w: &FreeWord) -> Result<FreeWord> {
    if w.rank != rank {
        return Err(Error::RankMismatch { left: rank, right: w.rank });
    }
    let mut stack = Vec::new();
    for &l in &w.letters {
        let img = &images[l.index() - 1];
        if l.inverse {
            for &m in img.letters.iter().rev() {
                push_reduced(&mut stack, m.inv());
            }
        } else {
            for &m in &img.letters {
                push_reduced(&mut stack, m);
            }
        }
    }
    Ok(FreeWord { rank, letters: stack })
}

impl Endomorphism {
    pub fn identity(rank: usize) -> Self {
        let images: Vec<FreeWord> =
            (1..=rank).map(|i| FreeWord::generator(rank, i).expect("in range")).collect();
        Endomorphism { rank, inverse: Some(images.clone()), images }
    }

    pub fn new(rank: usize, images: Vec<FreeWord>) -> Result<Self> {
        if images.len() != rank {
            return Err(Error::DimensionMismatch { expected: rank, found: images.len() });
        }
        for w in &images {
            if w.rank != rank {
                return Err(Error::RankMismatch { left: rank, right: w.rank });
            }
        }
        Ok(Endomorphism { rank, images, inverse: None })
    }

    /// Builds an automorphism, verifying that `inverse` composes to the
    /// identity on both sides.
    pub fn with_inverse(rank: usize, images: Vec<FreeWord>, inverse: Vec<FreeWord>) -> Result<Self> {
        let mut e = Self::new(rank, images)?;
        let inv = Self::new(rank, inverse)?;
        for i in 1..=rank {
            let x = FreeWord::generator(rank, i)?;
            let there_and_back = substitute(rank, &e.images, &substitute(rank, &inv.images, &x)?)?;
            let back_and_there = substitute(rank, &inv.images, &substitute(rank, &e.images, &x)?)?;
            if there_and_back != x || back_and_there != x {
                return Err(Error::InvalidInverse { generator: i });
            }
        }
        e.inverse = Some(inv.images);
        Ok(e)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    /// Image of `x_i` (1-based).
    pub fn image(&self, i: usize) -> &FreeWord {
        &self.images[i - 1]
    }

    pub fn inverse_images(&self) -> Option<&[FreeWord]> {
        self.inverse.as_deref()
    }

    pub fn is_automorphism(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn apply(&self, w: &FreeWord) -> Result<FreeWord> {
        substitute(self.rank, &self.images, w)
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`. Inverse data is composed
    /// in reverse order when both sides carry it.
    pub fn compose(&self, other: &Endomorphism) -> Result<Endomorphism> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { left: self.rank, right: other.rank });
        }
        let images = other
            .images
            .iter()
            .map(|w| substitute(self.rank, &self.images, w))
            .collect::<Result<Vec<_>>>()?;
        let inverse = match (&self.inverse, &other.inverse) {
            (Some(a), Some(b)) => Some(
                a.iter().map(|w| substitute(self.rank, b, w)).collect::<Result<Vec<_>>>()?,
            ),
            _ => None,
        };
        Ok(Endomorphism { rank: self.rank, images, inverse })
    }

    /// The inverse automorphism, when inverse data is attached.
    pub fn inverse(&self) -> Result<Endomorphism> {
        let inv = self.inverse.clone().ok_or(Error::MissingInverse)?;
        Ok(Endomorphism { rank: self.rank, images: inv, inverse: Some(self.images.clone()) })
    }

    /// Group commutator `[self, other] = self^-1 other^-1 self other` in
    /// `Aut(F_n)`, where the product `φψ` means `φ ∘ ψ`.
    pub fn commutator(&self, other: &Endomorphism) -> Result<Endomorphism> {
        self.inverse()?.compose(&other.inverse()?)?.compose(self)?.compose(other)
    }

    /// `self ∘ other ∘ self^-1`.
    pub fn conjugate_by(&self, other: &Endomorphism) -> Result<Endomorphism> {
        other.compose(self)?.compose(&other.inverse()?)
    }

    /// Inner automorphism `x ↦ w x w^-1`.
    pub fn inner(w: &FreeWord) -> Result<Endomorphism> {
        let rank = w.rank;
        let winv = w.invert();
        let mut images = Vec::with_capacity(rank);
        let mut inverse = Vec::with_capacity(rank);
        for i in 1..=rank {
            let x = FreeWord::generator(rank, i)?;
            images.push(w.multiply(&x)?.multiply(&winv)?);
            inverse.push(winv.multiply(&x)?.multiply(w)?);
        }
        Ok(Endomorphism { rank, images, inverse: Some(inverse) })
    }

    /// Column `i` is the exponent-sum vector of the image of `x_i`.
    pub fn abelianize(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rank, self.rank);
        for (col, img) in self.images.iter().enumerate() {
            for (row, s) in img.exponent_sums().into_iter().enumerate() {
                m.set(row, col, s.into());
            }
        }
        m
    }

    /// True when every generator outside `indices` is fixed and the images
    /// of generators inside only involve generators inside.
    pub fn is_supported_on(&self, indices: &[usize]) -> bool {
        (1..=self.rank).all(|i| {
            let img = self.image(i);
            if indices.contains(&i) {
                img.support().iter().all(|j| indices.contains(j))
            } else {
                img.len() == 1 && img.letters[0] == Letter::pos(i)
            }
        })
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.images.iter().enumerate() {
            writeln!(f, "x{} -> {}", i + 1, w)?;
        }
        if let Some(inv) = &self.inverse {
            writeln!(f, "# inverse")?;
            for (i, w) in inv.iter().enumerate() {
                writeln!(f, "x{} -> {}", i + 1, w)?;
            }
        }
        Ok(())
    }
}

//! Smith normal form over `Z`, and the lattice computations built on it:
//! integer solving, kernels, and cokernel invariant factors.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal, the nonzero
/// diagonal entries positive and forming a divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl Snf {
    /// The nonzero diagonal entries `d_1 | d_2 | ...`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }
}

fn smallest_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            let better = match &best {
                None => true,
                Some((_, b)) => &ax < b,
            };
            if better {
                let unit = ax.is_one();
                best = Some(((i, j), ax));
                if unit {
                    return best.map(|(p, _)| p);
                }
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Computes the Smith normal form of `a` together with the transforms.
pub fn snf(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = smallest_nonzero(&d, t) else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            // clear column t below the pivot
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -d.get(i, t).div_floor(d.get(t, t));
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            // clear row t right of the pivot
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -d.get(t, j).div_floor(d.get(t, t));
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !d.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a remainder is smaller than the pivot; move it into place
                let (pi, pj) = smallest_in_cross(&d, t);
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            // divisibility: the pivot must divide the remaining block
            let piv = d.get(t, t).clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&piv)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    Snf { u, d, v, rank: t }
}

fn smallest_in_cross(d: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut best_abs = d.get(t, t).abs();
    for i in t + 1..d.rows() {
        let x = d.get(i, t);
        if !x.is_zero() && x.abs() < best_abs {
            best_abs = x.abs();
            best = (i, t);
        }
    }
    for j in t + 1..d.cols() {
        let x = d.get(t, j);
        if !x.is_zero() && x.abs() < best_abs {
            best_abs = x.abs();
            best = (t, j);
        }
    }
    best
}

/// Solves `a * x = b` over the integers.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    if b.len() != a.rows() {
        return None;
    }
    if b.iter().all(Zero::is_zero) {
        return Some(alloc::vec![BigInt::zero(); a.cols()]);
    }
    if a.cols() == 0 {
        return None;
    }
    let s = snf(a);
    let ub = s.u.mul_vec(b).ok()?;
    let mut y = alloc::vec![BigInt::zero(); a.cols()];
    for (i, c) in ub.iter().enumerate() {
        if i < s.rank {
            let (q, r) = c.div_rem(s.d.get(i, i));
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c.is_zero() {
            return None;
        }
    }
    s.v.mul_vec(&y).ok()
}

/// Whether every column of `b` lies in the integer column span of `a`.
pub fn columns_in_span(a: &IntMatrix, b: &IntMatrix) -> bool {
    if b.is_zero() {
        return true;
    }
    if a.cols() == 0 || a.is_zero() {
        return false;
    }
    let s = snf(a);
    (0..b.cols()).all(|j| {
        let ub = s.u.mul_vec(&b.column(j)).expect("row counts agree");
        ub.iter().enumerate().all(|(i, c)| {
            if i < s.rank {
                c.is_multiple_of(s.d.get(i, i))
            } else {
                c.is_zero()
            }
        })
    })
}

/// A basis of the integer kernel of `a`, as the columns of the result.
pub fn kernel(a: &IntMatrix) -> IntMatrix {
    let s = snf(a);
    let n = a.cols();
    let mut k = IntMatrix::zeros(n, n - s.rank);
    for (c, j) in (s.rank..n).enumerate() {
        for i in 0..n {
            k.set(i, c, s.v.get(i, j).clone());
        }
    }
    k
}

/// Isomorphism type of a finitely generated abelian group
/// `Z^free_rank ⊕ Z/t_1 ⊕ ... ⊕ Z/t_r` with `1 < t_1 | t_2 | ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AbelianInvariants {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }
}

impl core::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut first = true;
        if self.free_rank > 0 {
            write!(f, "Z^{}", self.free_rank)?;
            first = false;
        }
        for t in &self.torsion {
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "Z/{}", t)?;
            first = false;
        }
        Ok(())
    }
}

/// Invariants of `Z^rows / colspan(a)` from a full Smith normal form.
pub fn cokernel_invariants_dense(a: &IntMatrix) -> AbelianInvariants {
    let s = snf(a);
    let torsion = s.diagonal().into_iter().filter(|d| !d.is_one()).collect();
    AbelianInvariants { torsion, free_rank: a.rows() - s.rank }
}

/// Invariants of `Z^rows / colspan(a)`, eliminating unit pivots sparsely
/// before the dense Smith form.
pub fn cokernel_invariants(a: &IntMatrix) -> AbelianInvariants {
    crate::sparse::cokernel_invariants(&crate::sparse::SpMat::from_dense(a))
}

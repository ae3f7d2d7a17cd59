//! Column-sparse integer matrices and sparse cokernel computations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;
use crate::snf::{cokernel_invariants_dense, AbelianInvariants};
use crate::{Error, Result};

/// An integer matrix stored by columns; each column is a list of
/// `(row, value)` pairs sorted by row with no zero values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpMat {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, BigInt)>>,
}

fn push_entry(col: &mut BTreeMap<usize, BigInt>, r: usize, v: BigInt) {
    if v.is_zero() {
        return;
    }
    let e = col.entry(r).or_insert_with(BigInt::zero);
    *e += v;
    if e.is_zero() {
        col.remove(&r);
    }
}

impl SpMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SpMat { rows, cols, columns: alloc::vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        SpMat { rows: n, cols: n, columns: (0..n).map(|i| alloc::vec![(i, BigInt::one())]).collect() }
    }

    /// Builds a matrix from `(row, col, value)` triplets; repeated positions
    /// are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut cs: Vec<BTreeMap<usize, BigInt>> = alloc::vec![BTreeMap::new(); cols];
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch { expected: rows.max(cols), found: r.max(c) + 1 });
            }
            push_entry(&mut cs[c], r, v);
        }
        Ok(Self::from_maps(rows, cs))
    }

    fn from_maps(rows: usize, cs: Vec<BTreeMap<usize, BigInt>>) -> Self {
        SpMat { rows, cols: cs.len(), columns: cs.into_iter().map(|m| m.into_iter().collect()).collect() }
    }

    pub fn from_dense(a: &IntMatrix) -> Self {
        let columns = (0..a.cols())
            .map(|j| (0..a.rows()).filter(|&i| !a.get(i, j).is_zero()).map(|i| (i, a.get(i, j).clone())).collect())
            .collect();
        SpMat { rows: a.rows(), cols: a.cols(), columns }
    }

    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.cols);
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                m.set(*i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[(usize, BigInt)] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.columns[j].binary_search_by_key(&i, |(r, _)| *r).map_or_else(|_| BigInt::zero(), |p| self.columns[j][p].1.clone())
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self.columns.iter().enumerate().all(|(j, c)| c.len() == 1 && c[0].0 == j && c[0].1.is_one())
    }

    /// `self * other`.
    pub fn mul(&self, other: &SpMat) -> Result<SpMat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let cs = other
            .columns
            .iter()
            .map(|col| {
                let mut acc = BTreeMap::new();
                for (k, b) in col {
                    for (i, a) in &self.columns[*k] {
                        push_entry(&mut acc, *i, a * b);
                    }
                }
                acc
            })
            .collect();
        Ok(Self::from_maps(self.rows, cs))
    }

    fn combine(&self, other: &SpMat, sign: i64) -> Result<SpMat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        let s = BigInt::from(sign);
        let cs = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut acc: BTreeMap<usize, BigInt> = a.iter().cloned().collect();
                for (i, v) in b {
                    push_entry(&mut acc, *i, v * &s);
                }
                acc
            })
            .collect();
        Ok(Self::from_maps(self.rows, cs))
    }

    pub fn add(&self, other: &SpMat) -> Result<SpMat> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &SpMat) -> Result<SpMat> {
        self.combine(other, -1)
    }

    pub fn neg(&self) -> SpMat {
        let mut out = self.clone();
        for col in &mut out.columns {
            for (_, v) in col.iter_mut() {
                *v = -&*v;
            }
        }
        out
    }

    /// Side-by-side concatenation; all blocks need `rows` rows.
    pub fn hstack(rows: usize, blocks: &[&SpMat]) -> Result<SpMat> {
        let mut columns = Vec::new();
        for b in blocks {
            if b.rows != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: b.rows });
            }
            columns.extend(b.columns.iter().cloned());
        }
        Ok(SpMat { rows, cols: columns.len(), columns })
    }

    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[&SpMat]) -> SpMat {
        let mut offset = 0;
        let mut columns = Vec::new();
        for b in blocks {
            for col in &b.columns {
                columns.push(col.iter().map(|(i, v)| (i + offset, v.clone())).collect());
            }
            offset += b.rows;
        }
        SpMat { rows: offset, cols: columns.len(), columns }
    }

    /// Copies `self` into rows `offset..offset + self.rows` of a taller
    /// matrix with `rows` rows.
    pub fn shifted(&self, rows: usize, offset: usize) -> SpMat {
        let columns = self.columns.iter().map(|c| c.iter().map(|(i, v)| (i + offset, v.clone())).collect()).collect();
        SpMat { rows, cols: self.cols, columns }
    }
}

/// Row-major CSV, as for dense matrices.
impl fmt::Display for SpMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dense())
    }
}

/// Invariants of `Z^rows / colspan(a)`.
///
/// Unit entries are eliminated first with Markowitz-style pivoting on a
/// row-indexed copy; only the residual block without unit entries goes
/// through dense Smith form. Presentations built from signed
/// permutation-like maps collapse almost entirely in the sparse phase.
pub fn cokernel_invariants(a: &SpMat) -> AbelianInvariants {
    let mut e = Eliminator::new(a);
    e.eliminate_units();
    let residual = e.residual();
    cokernel_invariants_dense(&residual)
}

struct Eliminator {
    rows: Vec<BTreeMap<usize, BigInt>>,
    cols: Vec<BTreeSet<usize>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
}

impl Eliminator {
    fn new(a: &SpMat) -> Self {
        let mut rows = alloc::vec![BTreeMap::new(); a.rows()];
        let mut cols = alloc::vec![BTreeSet::new(); a.cols()];
        for (j, col) in a.columns.iter().enumerate() {
            for (i, v) in col {
                rows[*i].insert(j, v.clone());
                cols[j].insert(*i);
            }
        }
        Eliminator { row_alive: alloc::vec![true; a.rows()], col_alive: alloc::vec![true; a.cols()], rows, cols }
    }

    /// Unit entry of row `r` with the sparsest column.
    fn pivot_in_row(&self, r: usize) -> Option<usize> {
        self.rows[r].iter().filter(|(_, v)| v.abs().is_one()).min_by_key(|(j, _)| self.cols[**j].len()).map(|(j, _)| *j)
    }

    fn eliminate_units(&mut self) {
        loop {
            let mut order: Vec<usize> = (0..self.rows.len()).filter(|&i| self.row_alive[i]).collect();
            order.sort_by_key(|&i| self.rows[i].len());
            let mut progress = false;
            for r in order {
                if !self.row_alive[r] {
                    continue;
                }
                if let Some(c) = self.pivot_in_row(r) {
                    self.pivot(r, c);
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let unit = self.rows[r][&c].clone();
        let pivot_row: Vec<(usize, BigInt)> = self.rows[r].iter().map(|(&j, x)| (j, x.clone())).collect();
        let others: Vec<usize> = self.cols[c].iter().copied().filter(|&i| i != r).collect();
        for i in others {
            let f = &self.rows[i][&c] * &unit;
            for (j, x) in &pivot_row {
                let entry = self.rows[i].entry(*j).or_insert_with(BigInt::zero);
                *entry -= &f * x;
                if entry.is_zero() {
                    self.rows[i].remove(j);
                    self.cols[*j].remove(&i);
                } else {
                    self.cols[*j].insert(i);
                }
            }
        }
        for (j, _) in &pivot_row {
            self.cols[*j].remove(&r);
        }
        self.rows[r].clear();
        self.row_alive[r] = false;
        self.col_alive[c] = false;
    }

    fn residual(&self) -> IntMatrix {
        let live_rows: Vec<usize> = (0..self.rows.len()).filter(|&i| self.row_alive[i]).collect();
        let live_cols: Vec<usize> =
            (0..self.cols.len()).filter(|&j| self.col_alive[j] && !self.cols[j].is_empty()).collect();
        let col_pos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(p, &j)| (j, p)).collect();
        let mut m = IntMatrix::zeros(live_rows.len(), live_cols.len());
        for (p, &i) in live_rows.iter().enumerate() {
            for (j, x) in &self.rows[i] {
                if let Some(&q) = col_pos.get(j) {
                    m.set(p, q, x.clone());
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_sparse(max: usize) -> impl Strategy<Value = IntMatrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::sample::select(alloc::vec![0i64, 0, 0, 1, -1, 2, 3]), r * c).prop_map(
                move |v| {
                    let rows = v.chunks(c).map(|ch| ch.iter().map(|&x| BigInt::from(x)).collect()).collect();
                    IntMatrix::from_rows(rows, c).unwrap()
                },
            )
        })
    }

    #[test]
    fn products_and_stacks() {
        let a = IntMatrix::from_i64(&[&[1, 2], &[0, -1], &[3, 0]]);
        let b = IntMatrix::from_i64(&[&[2, 0, 1], &[1, 1, 0]]);
        let (sa, sb) = (SpMat::from_dense(&a), SpMat::from_dense(&b));
        assert_eq!(sa.mul(&sb).unwrap().to_dense(), a.mul(&b).unwrap());
        assert_eq!(SpMat::hstack(3, &[&sa, &sa]).unwrap().to_dense(), a.hstack(&a).unwrap());
        assert_eq!(SpMat::block_diag(&[&sa, &sb]).to_dense(), IntMatrix::block_diag(&[a.clone(), b.clone()]));
        assert!(sa.sub(&sa).unwrap().is_zero());
        assert!(SpMat::identity(3).is_identity());
        assert_eq!(sa.get(2, 0), BigInt::from(3));
        assert!(SpMat::from_triplets(2, 2, [(0, 0, BigInt::one()), (0, 0, -BigInt::one())]).unwrap().is_zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn sparse_cokernel_matches_dense(a in arb_sparse(12)) {
            prop_assert_eq!(cokernel_invariants(&SpMat::from_dense(&a)), cokernel_invariants_dense(&a));
        }
    }
}

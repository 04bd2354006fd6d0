//! Dense exact linear algebra over the rationals: reduced row-echelon form,
//! rank, reduction modulo a row space, and null spaces.

use num_traits::{One, Zero};

use crate::rational::Q;

/// Reduced row-echelon form of a set of row vectors.
///
/// Rows are kept sorted by pivot column; every pivot is 1 and is the only
/// nonzero entry in its column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    ncols: usize,
    rows: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl Rref {
    pub fn empty(ncols: usize) -> Self {
        Self { ncols, rows: Vec::new(), pivots: Vec::new() }
    }

    /// Gauss-Jordan elimination: columns are scanned left to right and the
    /// first remaining row with a nonzero entry in the column becomes the pivot row.
    pub fn from_matrix(ncols: usize, mut rows: Vec<Vec<Q>>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), ncols, "row length mismatch");
        }
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..ncols {
            if next == rows.len() {
                break;
            }
            let Some(found) = (next..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(next, found);
            let inv = rows[next][col].recip();
            for x in rows[next].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
            let pivot_row = rows[next].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != next && !row[col].is_zero() {
                    let factor = row[col].clone();
                    axpy(row, &pivot_row, &-factor);
                }
            }
            pivots.push(col);
            next += 1;
        }
        rows.truncate(next);
        Self { ncols, rows, pivots }
    }

    /// Adds one row, keeping the form fully reduced. Returns `false` when the
    /// row was already in the span.
    pub fn insert(&mut self, mut row: Vec<Q>) -> bool {
        assert_eq!(row.len(), self.ncols, "row length mismatch");
        self.reduce_in_place(&mut row);
        let Some(col) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = row[col].recip();
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for existing in self.rows.iter_mut() {
            if !existing[col].is_zero() {
                let factor = existing[col].clone();
                axpy(existing, &row, &-factor);
            }
        }
        let at = self.pivots.partition_point(|&p| p < col);
        self.pivots.insert(at, col);
        self.rows.insert(at, row);
        true
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Subtracts the row space from `v` so that it vanishes on every pivot column.
    pub fn reduce_in_place(&self, v: &mut [Q]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let factor = v[p].clone();
                axpy(v, row, &-factor);
            }
        }
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let mut w = v.to_vec();
        self.reduce_in_place(&mut w);
        w.iter().all(Zero::is_zero)
    }

    /// Basis of `{x : row · x = 0 for every row}`, one vector per free column,
    /// in increasing free-column order.
    pub fn kernel_basis(&self) -> Vec<Vec<Q>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![Q::zero(); self.ncols];
                v[f] = Q::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if !row[f].is_zero() {
                        v[p] = -row[f].clone();
                    }
                }
                v
            })
            .collect()
    }
}

/// `y += a * x`
pub fn axpy(y: &mut [Q], x: &[Q], a: &Q) {
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += a * xi;
        }
    }
}

pub fn rank(ncols: usize, rows: Vec<Vec<Q>>) -> usize {
    Rref::from_matrix(ncols, rows).rank()
}

/// Null space of a matrix given by its rows.
pub fn kernel(ncols: usize, rows: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    Rref::from_matrix(ncols, rows).kernel_basis()
}

/// Matrix product `m * v` with `m` given by rows.
pub fn mat_vec(m: &[Vec<Q>], v: &[Q]) -> Vec<Q> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(Q::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

/// Whether two lists of vectors span the same subspace.
pub fn same_span(ncols: usize, a: &[Vec<Q>], b: &[Vec<Q>]) -> bool {
    Rref::from_matrix(ncols, a.to_vec()) == Rref::from_matrix(ncols, b.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn rref_small() {
        let r = Rref::from_matrix(3, m(&[&[2, 4, 6], &[1, 2, 4], &[3, 6, 10]]));
        assert_eq!(r.rank(), 2);
        assert_eq!(r.pivots(), &[0, 2]);
        assert_eq!(r.rows()[0], vec![q(1), q(2), q(0)]);
        assert_eq!(r.kernel_basis(), vec![vec![q(-2), q(1), q(0)]]);
    }

    #[test]
    fn zero_matrix_has_full_kernel() {
        let r = Rref::from_matrix(2, m(&[&[0, 0]]));
        assert_eq!(r.rank(), 0);
        assert_eq!(r.kernel_basis().len(), 2);
    }

    #[test]
    fn reduce_kills_row_space() {
        let r = Rref::from_matrix(3, m(&[&[1, 1, 0], &[0, 3, 1]]));
        let mut v = vec![q(2), q(5), q(1)];
        r.reduce_in_place(&mut v);
        assert_eq!(v, vec![q(0), q(0), frac(0, 1)]);
    }

    fn small_matrix() -> impl Strategy<Value = (usize, Vec<Vec<Q>>)> {
        (1usize..6).prop_flat_map(|n| {
            let row = proptest::collection::vec(-3i64..4, n);
            (Just(n), proptest::collection::vec(row, 0..7))
                .prop_map(|(n, rows)| (n, rows.into_iter().map(|r| r.into_iter().map(q).collect()).collect()))
        })
    }

    proptest! {
        #[test]
        fn incremental_matches_gauss_jordan((n, rows) in small_matrix()) {
            let gj = Rref::from_matrix(n, rows.clone());
            let mut inc = Rref::empty(n);
            for r in rows.iter().rev() {
                inc.insert(r.clone());
            }
            prop_assert_eq!(&gj, &inc);
        }

        #[test]
        fn kernel_vectors_are_annihilated((n, rows) in small_matrix()) {
            let ker = kernel(n, rows.clone());
            prop_assert_eq!(ker.len() + rank(n, rows.clone()), n);
            for v in &ker {
                prop_assert!(mat_vec(&rows, v).iter().all(Zero::is_zero));
            }
        }
    }
}

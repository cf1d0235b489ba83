//! Sparse row-major matrices over a [`Scalar`].
//!
//! Each row is stored as a list of `(column, value)` pairs sorted by column,
//! with no explicitly stored zeros. Products and Kronecker products follow
//! the row-major convention: in `kron(a, b)` the composite index of
//! `(i, k)` is `i * b.rows() + k` (left factor slow, right factor fast).

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Rows above this count are multiplied in parallel.
const PARALLEL_ROWS: usize = 256;

pub type SparseRow<S> = Vec<(usize, S)>;

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<SparseRow<S>>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, S::one())]).collect(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, S)>,
    {
        let mut data: Vec<SparseRow<S>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::IndexOutOfBounds {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            data[r].push((c, v));
        }
        for row in &mut data {
            normalize_row(row);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from dense rows. All rows must have the same length.
    pub fn from_dense(rows: Vec<Vec<S>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    op: "from_dense",
                    left: (nrows, ncols),
                    right: (1, row.len()),
                });
            }
            data.push(
                row.into_iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .collect(),
            );
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn row(&self, i: usize) -> &[(usize, S)] {
        &self.data[i]
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i]
            .binary_search_by_key(&j, |(c, _)| *c)
            .map(|pos| self.data[i][pos].1.clone())
            .unwrap_or_else(|_| S::zero())
    }

    /// Iterates over stored (nonzero) entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        self.data
            .iter()
            .map(|row| {
                let mut dense = vec![S::zero(); self.cols];
                for (j, v) in row {
                    dense[*j] = v.clone();
                }
                dense
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<S> {
        self.data
            .iter()
            .map(|row| row.iter().fold(S::zero(), |acc, (_, v)| acc + v.clone()))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op: "add",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut row: SparseRow<S> = a.iter().chain(b.iter()).cloned().collect();
                normalize_row(&mut row);
                row
            })
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.map(|v| S::zero() - v.clone()))
    }

    /// Applies `f` to every stored entry, dropping results that are zero.
    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        self.map_indexed(|_, _, v| f(v))
    }

    pub fn map_indexed(&self, f: impl Fn(usize, usize, &S) -> S) -> Self {
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .map(|(j, v)| (*j, f(i, *j, v)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Restricts to the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.cols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let data = rows
            .iter()
            .map(|&r| {
                let mut row: SparseRow<S> = self.data[r]
                    .iter()
                    .filter(|(c, _)| col_map[*c] != usize::MAX)
                    .map(|(c, v)| (col_map[*c], v.clone()))
                    .collect();
                row.sort_by_key(|(c, _)| *c);
                row
            })
            .collect();
        Self {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                op: "vec_mul",
                left: (1, x.len()),
                right: self.shape(),
            });
        }
        let mut out = vec![S::zero(); self.cols];
        for (xi, row) in x.iter().zip(&self.data) {
            if xi.is_zero() {
                continue;
            }
            for (j, v) in row {
                out[*j] = out[*j].clone() + xi.clone() * v.clone();
            }
        }
        Ok(out)
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "mat_mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mul_row = |row: &SparseRow<S>| -> SparseRow<S> {
            let mut acc: SparseRow<S> = Vec::new();
            for (k, a) in row {
                for (j, b) in &other.data[*k] {
                    acc.push((*j, a.clone() * b.clone()));
                }
            }
            normalize_row(&mut acc);
            acc
        };
        let data = if self.rows >= PARALLEL_ROWS {
            self.data.par_iter().map(mul_row).collect()
        } else {
            self.data.iter().map(mul_row).collect()
        };
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// `self^k` by repeated squaring; `k = 0` gives the identity.
    pub fn pow(&self, mut k: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Kronecker product with row-major index pairing.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = other.shape();
        let build_row = |i: usize, k: usize| -> SparseRow<S> {
            let mut row = Vec::with_capacity(self.data[i].len() * other.data[k].len());
            for (j, a) in &self.data[i] {
                for (l, b) in &other.data[k] {
                    let v = a.clone() * b.clone();
                    if !v.is_zero() {
                        row.push((j * q + l, v));
                    }
                }
            }
            row
        };
        let total_rows = self.rows * p;
        let data: Vec<SparseRow<S>> = if total_rows >= PARALLEL_ROWS {
            (0..total_rows)
                .into_par_iter()
                .map(|r| build_row(r / p, r % p))
                .collect()
        } else {
            (0..total_rows).map(|r| build_row(r / p, r % p)).collect()
        };
        Self {
            rows: total_rows,
            cols: self.cols * q,
            data,
        }
    }

    /// Solves `self * x = rhs` by Gaussian elimination with partial pivoting.
    ///
    /// Rationals pivot on the first nonzero entry; floats on the largest
    /// magnitude, treating pivots below the float tolerance as zero.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch {
                op: "solve_linear",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let n = self.rows;
        let m = rhs.cols;
        let mut a = self.to_dense();
        let mut b = rhs.to_dense();
        for col in 0..n {
            let pivot = match S::MODE {
                crate::scalar::ScalarMode::Exact => (col..n).find(|&r| !a[r][col].is_zero()),
                crate::scalar::ScalarMode::Float => (col..n)
                    .filter(|&r| !a[r][col].approx_eq(&S::zero()))
                    .max_by(|&x, &y| {
                        a[x][col]
                            .to_f64()
                            .abs()
                            .total_cmp(&a[y][col].to_f64().abs())
                            .then(y.cmp(&x))
                    }),
            };
            let Some(p) = pivot else {
                return Err(Error::Singular { column: col });
            };
            a.swap(col, p);
            b.swap(col, p);
            let inv = S::one() / a[col][col].clone();
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone() * inv.clone();
                for c in col..n {
                    if !a[col][c].is_zero() {
                        let delta = factor.clone() * a[col][c].clone();
                        a[r][c] = a[r][c].clone() - delta;
                    }
                }
                for c in 0..m {
                    if !b[col][c].is_zero() {
                        let delta = factor.clone() * b[col][c].clone();
                        b[r][c] = b[r][c].clone() - delta;
                    }
                }
            }
        }
        let x = b
            .into_iter()
            .enumerate()
            .map(|(r, row)| {
                let d = a[r][r].clone();
                row.into_iter().map(|v| v / d.clone()).collect()
            })
            .collect();
        Self::from_dense(x).map(|mut mat| {
            mat.cols = m;
            mat
        })
    }
}

/// Sorts by column, sums duplicates and drops zeros.
fn normalize_row<S: Scalar>(row: &mut SparseRow<S>) {
    row.sort_by_key(|(c, _)| *c);
    let mut merged: SparseRow<S> = Vec::with_capacity(row.len());
    for (c, v) in row.drain(..) {
        match merged.last_mut() {
            Some((last, acc)) if *last == c => *acc = acc.clone() + v,
            _ => merged.push((c, v)),
        }
    }
    merged.retain(|(_, v)| !v.is_zero());
    *row = merged;
}

/// Kronecker product; see [`Matrix::kron`].
pub fn kron<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    a.kron(b)
}

pub fn mat_mul<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Result<Matrix<S>> {
    a.mul(b)
}

pub fn mat_pow<S: Scalar>(m: &Matrix<S>, k: u64) -> Result<Matrix<S>> {
    m.pow(k)
}

pub fn solve_linear<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Result<Matrix<S>> {
    a.solve(b)
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for (i, row) in self.data.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|(j, v)| format!("{j}: {v:?}")).collect();
            writeln!(f, "  {i}: {{{}}}", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

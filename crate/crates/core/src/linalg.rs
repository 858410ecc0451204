//! Dense matrices over F_p with rank, kernel and incremental echelon forms.

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeContext};

type Fe = FieldElement;

/// Row-major dense matrix. Entries are always reduced residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    /// Builds a matrix from explicit rows; `cols` fixes the width when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<Fe>>, cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Shape(format!("row {i} has length {} (expected {cols})", r.len())));
            }
            data.extend(r);
        }
        Ok(Matrix { rows: n, cols, data })
    }

    pub fn from_u64_rows(f: &PrimeContext, rows: &[&[u64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let v = rows
            .iter()
            .map(|r| r.iter().map(|&x| f.from_u64(x)).collect())
            .collect();
        Matrix::from_rows(v, cols).expect("ragged rows")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Fe] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[Fe]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<Fe>> {
        self.iter_rows().map(|r| r.to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[Fe]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Shape(format!("row of length {} pushed onto {} columns", row.len(), self.cols)));
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::Shape(format!("cannot stack {} and {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix, f: &PrimeContext) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ot = other.transpose();
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                out.set(i, j, f.dot(self.row(i), ot.row(j)));
            }
        }
        Ok(out)
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[Fe], f: &PrimeContext) -> Vec<Fe> {
        debug_assert_eq!(v.len(), self.cols);
        self.iter_rows().map(|r| f.dot(r, v)).collect()
    }

    pub fn scale_row(&mut self, i: usize, c: Fe, f: &PrimeContext) {
        for x in self.row_mut(i) {
            *x = f.mul(*x, c);
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self, f: &PrimeContext) -> usize {
        let mut e = EchelonBasis::new(self.cols);
        for r in self.iter_rows() {
            e.insert(r, f);
            if e.rank() == self.cols {
                break;
            }
        }
        e.rank()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self, f: &PrimeContext) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(piv) = (lead..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(lead, piv);
            let inv = f.inv(m.get(lead, col)).expect("nonzero pivot");
            m.scale_row(lead, inv, f);
            let pivot_row = m.row(lead).to_vec();
            for i in 0..m.rows {
                if i == lead {
                    continue;
                }
                let c = m.get(i, col);
                if c.is_zero() {
                    continue;
                }
                let row = m.row_mut(i);
                for j in col..row.len() {
                    row[j] = f.sub(row[j], f.mul(c, pivot_row[j]));
                }
            }
            pivots.push(col);
            lead += 1;
        }
        m.data.truncate(lead * m.cols);
        m.rows = lead;
        (m, pivots)
    }

    /// A basis of the row space (the nonzero rows of the reduced echelon form).
    pub fn row_basis(&self, f: &PrimeContext) -> Matrix {
        self.rref(f).0
    }

    /// Rows spanning `{v : self * v = 0}`.
    pub fn kernel_basis(&self, f: &PrimeContext) -> Matrix {
        let (r, pivots) = self.rref(f);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut out = Matrix::zeros(0, self.cols);
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Fe::ZERO; self.cols];
            v[free] = Fe::ONE;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(r.get(i, free));
            }
            out.push_row(&v).expect("width");
        }
        out
    }
}

/// Dimension of the span of `rows` (all of the same length).
pub fn row_span_dim(rows: &[Vec<Fe>], f: &PrimeContext) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut e = EchelonBasis::new(first.len());
    for r in rows {
        e.insert(r, f);
    }
    e.rank()
}

/// Incrementally maintained echelon basis of a growing row space.
///
/// Each stored row has its pivot entry normalised to one and vanishes at the
/// pivots of every row stored before it, so a single forward pass reduces a
/// new vector.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    cols: usize,
    rows: Vec<Vec<Fe>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(cols: usize) -> Self {
        EchelonBasis { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the stored rows.
    pub fn reduce(&self, v: &[Fe], f: &PrimeContext) -> Vec<Fe> {
        debug_assert_eq!(v.len(), self.cols);
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = w[p];
            if c.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                if !row[j].is_zero() {
                    w[j] = f.sub(w[j], f.mul(c, row[j]));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Fe], f: &PrimeContext) -> bool {
        self.reduce(v, f).iter().all(|x| x.is_zero())
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &[Fe], f: &PrimeContext) -> bool {
        let mut w = self.reduce(v, f);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = f.inv(w[p]).expect("nonzero");
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_rows(self.rows.clone(), self.cols).expect("consistent width")
    }
}

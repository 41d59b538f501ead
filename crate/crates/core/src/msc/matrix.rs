//! Dense matrices over a [`FieldSpec`] with exact Gaussian elimination.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FieldValue};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    spec: FieldSpec,
    data: Vec<FieldValue>,
}

impl Matrix {
    /// Row-major constructor. Every entry must belong to `spec`.
    pub fn new(spec: FieldSpec, rows: usize, cols: usize, data: Vec<FieldValue>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| v.spec() != spec) {
            return Err(Error::MixedFields(spec, v.spec()));
        }
        Ok(Matrix { rows, cols, spec, data })
    }

    pub fn from_rows(spec: FieldSpec, rows: Vec<Vec<FieldValue>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Matrix::new(spec, r, c, rows.into_iter().flatten().collect())
    }

    /// Integer literal rows; panics on ragged input.
    pub fn from_ints(spec: FieldSpec, rows: &[&[i64]]) -> Self {
        let data = rows
            .iter()
            .map(|row| row.iter().map(|&v| FieldValue::from_int(spec, v)).collect())
            .collect();
        Matrix::from_rows(spec, data).expect("rectangular integer rows")
    }

    pub fn zeros(spec: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, spec, data: vec![FieldValue::zero(spec); rows * cols] }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zeros(spec, n, n);
        for i in 0..n {
            m.data[i * n + i] = FieldValue::one(spec);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldValue {
        &self.data[r * self.cols + c]
    }

    /// Panics if `v` belongs to another field.
    pub fn set(&mut self, r: usize, c: usize, v: FieldValue) {
        assert_eq!(v.spec(), self.spec, "entry from a different field");
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldValue] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[FieldValue] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldValue::is_zero)
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::MixedFields(self.spec, other.spec))
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.spec, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * other.cols + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&FieldValue, &FieldValue) -> FieldValue) -> Result<Matrix> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, spec: self.spec, data })
    }

    pub fn scale(&self, s: &FieldValue) -> Result<Matrix> {
        if s.spec() != self.spec {
            return Err(Error::MixedFields(self.spec, s.spec()));
        }
        let data = self.data.iter().map(|v| v * s).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, spec: self.spec, data })
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, spec: self.spec, data }
    }

    /// Kronecker product: block `(i, j)` is `self[i, j] · other`.
    pub fn kron(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Matrix::zeros(self.spec, rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * cols + j * other.cols + l] = a * other.get(k, l);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            for c in 0..self.cols {
                self.data.swap(p * self.cols + c, row * self.cols + c);
            }
            let inv = self.get(row, col).inv().expect("pivot is nonzero");
            for c in 0..self.cols {
                let idx = row * self.cols + c;
                self.data[idx] = &self.data[idx] * &inv;
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let f = self.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..self.cols {
                    let sub = &f * self.get(row, c);
                    let idx = r * self.cols + c;
                    self.data[idx] = &self.data[idx] - &sub;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().reduce().len()
    }

    pub fn determinant(&self) -> Result<FieldValue> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = FieldValue::one(self.spec);
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Ok(FieldValue::zero(self.spec));
            };
            if p != col {
                for c in 0..n {
                    m.data.swap(p * n + c, col * n + c);
                }
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det = &det * &pivot;
            let inv = pivot.inv()?;
            for r in col + 1..n {
                let f = m.get(r, col) * &inv;
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let sub = &f * m.get(col, c);
                    m.data[r * n + c] = &m.data[r * n + c] - &sub;
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan; `SingularBaseChange` if not invertible.
    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(self.spec, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.data[r * 2 * n + c] = self.get(r, c).clone();
            }
            aug.data[r * 2 * n + n + r] = FieldValue::one(self.spec);
        }
        let pivots = aug.reduce();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::SingularBaseChange);
        }
        let mut out = Matrix::zeros(self.spec, n, n);
        for r in 0..n {
            for c in 0..n {
                out.data[r * n + c] = aug.get(r, n + c).clone();
            }
        }
        Ok(out)
    }

    /// Solves `self · x = rhs`. Returns one solution and the dimension of the
    /// solution space, or `None` if the system is inconsistent.
    pub fn solve(&self, rhs: &[FieldValue]) -> Option<(Vec<FieldValue>, usize)> {
        assert_eq!(rhs.len(), self.rows, "right-hand side length");
        let cols = self.cols + 1;
        let mut aug = Matrix::zeros(self.spec, self.rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.data[r * cols + c] = self.get(r, c).clone();
            }
            aug.data[r * cols + self.cols] = rhs[r].clone();
        }
        let pivots = aug.reduce();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![FieldValue::zero(self.spec); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols).clone();
        }
        Some((x, self.cols - pivots.len()))
    }
}

/// Kronecker product of two matrices over the same field.
pub fn kron(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.kron(b)
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ",")?;
            }
            write!(f, "(")?;
            for (c, v) in self.row(r).iter().enumerate() {
                if c > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        write!(f, ")")
    }
}

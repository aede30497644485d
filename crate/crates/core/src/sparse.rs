//! Compressed sparse row matrices.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::LinearOperator;

/// Sparse matrix in compressed row form. Symmetric matrices store both
/// triangles; `symmetric` only records the intent.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

/// Accumulates entries row by row; duplicates are summed on [`CsrBuilder::build`].
#[derive(Debug, Clone)]
pub struct CsrBuilder {
    ncols: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl CsrBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        CsrBuilder { ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(j < self.ncols);
        self.rows[i].push((j, v));
    }

    /// Adds the dense block `block[r][c]` at rows `rows` and columns `cols`.
    pub fn add_block(&mut self, rows: &[usize], cols: &[usize], block: &[Vec<f64>]) {
        for (r, &i) in rows.iter().enumerate() {
            let row = &mut self.rows[i];
            for (c, &j) in cols.iter().enumerate() {
                let v = block[r][c];
                if v != 0.0 {
                    row.push((j, v));
                }
            }
        }
    }

    /// Adds a dense nalgebra block, skipping exact zeros.
    pub fn add_dense(&mut self, rows: &[usize], cols: &[usize], block: &DMatrix<f64>) {
        debug_assert_eq!(block.shape(), (rows.len(), cols.len()));
        for (r, &i) in rows.iter().enumerate() {
            let row = &mut self.rows[i];
            for (c, &j) in cols.iter().enumerate() {
                let v = block[(r, c)];
                if v != 0.0 {
                    row.push((j, v));
                }
            }
        }
    }

    pub fn build(self, symmetric: bool) -> CsrMatrix {
        let nrows = self.rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for mut row in self.rows {
            row.sort_by_key(|&(j, _)| j);
            let mut last: Option<usize> = None;
            for (j, v) in row {
                if last == Some(j) {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                    last = Some(j);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { nrows, ncols: self.ncols, row_ptr, col_idx, values, symmetric }
    }
}

impl CsrMatrix {
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `y = A x` for rectangular matrices.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.row_ptr[i]..self.row_ptr[i + 1];
            *yi = self.col_idx[r.clone()].iter().zip(&self.values[r]).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    /// `y = A^T x`.
    pub fn mul_transpose_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * xi;
            }
        }
    }

    /// Quadratic form `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec(x, &mut y);
        crate::operator::dot(x, &y)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut b = CsrBuilder::new(self.ncols, self.nrows);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                b.add(j, i, v);
            }
        }
        b.build(self.symmetric)
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut acc = vec![0.0; other.ncols];
        let mut mark = vec![usize::MAX; other.ncols];
        let mut touched = Vec::new();
        for i in 0..self.nrows {
            touched.clear();
            let (cols, vals) = self.row(i);
            for (&k, &a) in cols.iter().zip(vals) {
                let (ocols, ovals) = other.row(k);
                for (&j, &b) in ocols.iter().zip(ovals) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                col_idx.push(j);
                values.push(acc[j]);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { nrows: self.nrows, ncols: other.ncols, row_ptr, col_idx, values, symmetric: false }
    }

    pub fn with_symmetry(mut self, symmetric: bool) -> Self {
        self.symmetric = symmetric;
        self
    }

    /// Sub-matrix on the given rows and columns, as a dense matrix.
    pub fn dense_submatrix(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        let mut pos = std::collections::HashMap::with_capacity(cols.len());
        for (c, &j) in cols.iter().enumerate() {
            pos.insert(j, c);
        }
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for (r, &i) in rows.iter().enumerate() {
            let (cs, vs) = self.row(i);
            for (&j, &v) in cs.iter().zip(vs) {
                if let Some(&c) = pos.get(&j) {
                    m[(r, c)] = v;
                }
            }
        }
        m
    }

    /// Principal sub-matrix on `indices`, kept sparse.
    pub fn principal_submatrix(&self, indices: &[usize]) -> CsrMatrix {
        let mut pos = vec![usize::MAX; self.ncols];
        for (c, &j) in indices.iter().enumerate() {
            pos[j] = c;
        }
        let mut b = CsrBuilder::new(indices.len(), indices.len());
        for (r, &i) in indices.iter().enumerate() {
            let (cs, vs) = self.row(i);
            for (&j, &v) in cs.iter().zip(vs) {
                if pos[j] != usize::MAX {
                    b.add(r, pos[j], v);
                }
            }
        }
        b.build(self.symmetric)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cs, vs) = self.row(i);
            for (&j, &v) in cs.iter().zip(vs) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `max |A_ij - A_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            let (cs, vs) = self.row(i);
            for (&j, &v) in cs.iter().zip(vs) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Linear combination `a * self + b * other` of equally shaped matrices.
    pub fn add_scaled(&self, a: f64, other: &CsrMatrix, b: f64) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut builder = CsrBuilder::new(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cs, vs) = self.row(i);
            for (&j, &v) in cs.iter().zip(vs) {
                builder.add(i, j, a * v);
            }
            let (cs, vs) = other.row(i);
            for (&j, &v) in cs.iter().zip(vs) {
                builder.add(i, j, b * v);
            }
        }
        builder.build(self.symmetric && other.symmetric)
    }

    /// Writes the matrix in Matrix Market coordinate format (1-indexed).
    pub fn write_matrix_market(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for i in 0..self.nrows {
            let (cs, vs) = self.row(i);
            for (&j, &v) in cs.iter().zip(vs) {
                writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a coordinate Matrix Market file written by [`CsrMatrix::write_matrix_market`].
    pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines().filter(|l| !l.starts_with('%'));
        let bad = || Error::InvalidArgument("malformed matrix market file".into());
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(bad)?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if header.len() != 3 {
            return Err(bad());
        }
        let mut b = CsrBuilder::new(header[0], header[1]);
        for line in lines.take(header[2]) {
            let mut it = line.split_whitespace();
            let i: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            let j: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            let v: f64 = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            b.add(i - 1, j - 1, v);
        }
        Ok(b.build(false))
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec(x, y)
    }
}

/// Writes a vector as a single-column Matrix Market coordinate file.
pub fn write_vector_matrix_market(v: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} 1 {}", v.len(), v.len())?;
    for (i, x) in v.iter().enumerate() {
        writeln!(w, "{} 1 {:.17e}", i + 1, x)?;
    }
    w.flush()?;
    Ok(())
}

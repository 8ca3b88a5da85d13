//! Exact integer-backed matrices.
//!
//! [`DyadicMatrix`] stores every entry doubled, so the values `{0, ±1/2, ±1, ±2}`
//! are plain integers. Products of two such matrices land in quarters and are
//! held by [`ExactMatrix`].

use nalgebra::DMatrix;
use num_rational::Rational64;

use crate::error::{shape_err, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicMatrix {
    rows: usize,
    cols: usize,
    doubled: Vec<i64>,
}

impl DyadicMatrix {
    /// Row-major entries, each equal to twice the represented value.
    pub fn from_doubled(rows: usize, cols: usize, doubled: Vec<i64>) -> Result<Self> {
        if rows == 0 || cols == 0 || doubled.len() != rows * cols {
            return Err(shape_err(
                format!("{rows}x{cols} positive dimensions"),
                format!("{} entries", doubled.len()),
            ));
        }
        Ok(DyadicMatrix { rows, cols, doubled })
    }

    /// Builds from integer-valued rows (no halves).
    pub fn from_int_rows<const C: usize>(rows: &[[i64; C]]) -> Self {
        let doubled = rows.iter().flat_map(|r| r.iter().map(|v| v * 2)).collect();
        DyadicMatrix {
            rows: rows.len(),
            cols: C,
            doubled,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut doubled = vec![0; n * n];
        for i in 0..n {
            doubled[i * n + i] = 2;
        }
        DyadicMatrix {
            rows: n,
            cols: n,
            doubled,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DyadicMatrix {
            rows,
            cols,
            doubled: vec![0; rows * cols],
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn doubled_at(&self, i: usize, j: usize) -> i64 {
        self.doubled[i * self.cols + j]
    }

    #[inline]
    pub fn set_doubled(&mut self, i: usize, j: usize, v: i64) {
        self.doubled[i * self.cols + j] = v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.doubled_at(i, j) as f64 / 2.0
    }

    pub fn doubled_entries(&self) -> &[i64] {
        &self.doubled
    }

    pub fn doubled_rows(&self) -> Vec<Vec<i64>> {
        self.doubled.chunks(self.cols).map(<[i64]>::to_vec).collect()
    }

    /// True when every entry is one of `{0, ±1/2, ±1, ±2}`.
    pub fn entries_in_c(&self) -> bool {
        self.doubled.iter().all(|v| matches!(v, -4 | -2 | -1 | 0 | 1 | 2 | 4))
    }

    pub fn transpose(&self) -> Self {
        let mut out = DyadicMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set_doubled(j, i, self.doubled_at(i, j));
            }
        }
        out
    }

    /// Exact product, in quarter units.
    pub fn product(&self, rhs: &DyadicMatrix) -> Result<ExactMatrix> {
        if self.cols != rhs.rows {
            return Err(shape_err(
                format!("{} rows on the right", self.cols),
                format!("{}", rhs.rows),
            ));
        }
        let mut quarters = vec![0i64; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lhs = self.doubled_at(i, k);
                if lhs == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    quarters[i * rhs.cols + j] += lhs * rhs.doubled_at(k, j);
                }
            }
        }
        Ok(ExactMatrix {
            rows: self.rows,
            cols: rhs.cols,
            quarters,
        })
    }

    /// Product that must itself be dyadic (used for factor chains).
    pub fn mul(&self, rhs: &DyadicMatrix) -> Result<DyadicMatrix> {
        let p = self.product(rhs)?;
        p.to_dyadic()
            .ok_or_else(|| shape_err("dyadic product", "entries with quarter fractions"))
    }

    /// `2 * M * x` for an integer vector, exact.
    pub fn mul_vec_doubled(&self, x: &[i64]) -> Result<Vec<i64>> {
        if x.len() != self.cols {
            return Err(shape_err(format!("vector of {}", self.cols), format!("{}", x.len())));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.doubled_at(i, j) * x[j]).sum())
            .collect())
    }

    pub fn to_real(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    /// `blockdiag(self, self)`.
    pub fn block_diag2(&self) -> DyadicMatrix {
        let mut out = DyadicMatrix::zeros(2 * self.rows, 2 * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.doubled_at(i, j);
                out.set_doubled(i, j, v);
                out.set_doubled(i + self.rows, j + self.cols, v);
            }
        }
        out
    }

    /// Rows reordered so that output row `i` is input row `order[i]`.
    pub fn permute_rows(&self, order: &[usize]) -> DyadicMatrix {
        let mut out = DyadicMatrix::zeros(self.rows, self.cols);
        for (dst, &src) in order.iter().enumerate() {
            for j in 0..self.cols {
                out.set_doubled(dst, j, self.doubled_at(src, j));
            }
        }
        out
    }
}

/// Matrix with exact rational entries whose denominators divide 4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    quarters: Vec<i64>,
}

impl ExactMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn quarters_at(&self, i: usize, j: usize) -> i64 {
        self.quarters[i * self.cols + j]
    }

    pub fn get(&self, i: usize, j: usize) -> Rational64 {
        Rational64::new(self.quarters_at(i, j), 4)
    }

    pub fn diagonal(&self) -> Vec<Rational64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.quarters_at(i, j) == 0))
    }

    pub fn is_identity(&self) -> bool {
        self.is_diagonal() && (0..self.rows).all(|i| self.quarters_at(i, i) == 4)
    }

    pub fn to_dyadic(&self) -> Option<DyadicMatrix> {
        if self.quarters.iter().any(|q| q % 2 != 0) {
            return None;
        }
        Some(DyadicMatrix {
            rows: self.rows,
            cols: self.cols,
            doubled: self.quarters.iter().map(|q| q / 2).collect(),
        })
    }

    pub fn to_real(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.quarters_at(i, j) as f64 / 4.0)
    }
}

//! Dense real matrices sized for the small problems this crate deals with
//! (N, K up to about 8), with determinant and signed-cofactor kernels.
//!
//! Entries are indexed `(n, k)` with `n` the row and `k` the column, both
//! zero-based. Two matrices of the same shape are paired by the Frobenius
//! product `<x, y> = sum x[n][k] * y[n][k]`; gradients are always returned in
//! the shape of their argument so that this pairing is the duality pairing.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Wire form: `{"rows": N, "cols": K, "entries": [[...], ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for Matrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        if json.entries.len() != json.rows {
            return Err(Error::dim(format!(
                "declared {} rows, found {}",
                json.rows,
                json.entries.len()
            )));
        }
        if let Some(bad) = json.entries.iter().position(|r| r.len() != json.cols) {
            return Err(Error::dim(format!(
                "row {} has {} entries, expected {}",
                bad + 1,
                json.entries[bad].len(),
                json.cols
            )));
        }
        Matrix::new(json.rows, json.cols, json.entries.concat())
    }
}

impl From<Matrix> for MatrixJson {
    fn from(m: Matrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.chunks(m.cols).map(<[f64]>::to_vec).collect(),
        }
    }
}

impl Matrix {
    /// Builds a matrix from row-major entries. Rejects empty shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dim("matrix must have at least one row and one column"));
        }
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "non-finite entry {} at ({}, {})",
                data[i],
                i / cols + 1,
                i % cols + 1
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::dim("ragged rows"));
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    /// Internal constructor for results of arithmetic on valid matrices.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_raw(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        Matrix::diag(&vec![1.0; n])
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Matrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for n in 0..rows {
            for k in 0..cols {
                data.push(f(n, k));
            }
        }
        Matrix::from_raw(rows, cols, data)
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

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.data[n * self.cols + k]
    }

    pub fn set(&mut self, n: usize, k: usize, value: f64) {
        self.data[n * self.cols + k] = value;
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.data[n * self.cols..(n + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix::from_raw(self.rows, self.cols, self.data.iter().map(|v| f(*v)).collect())
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        self.map(|v| v * factor)
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::dim(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + factor * b))
    }

    pub(crate) fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect();
        Matrix::from_raw(self.rows, self.cols, data)
    }

    /// Frobenius pairing `sum x[n][k] * y[n][k]`.
    pub fn pairing(&self, other: &Matrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|l| self.get(i, l) * other.get(l, j)).sum()
        }))
    }

    /// Largest absolute entry (the infinity norm of the vectorized matrix).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// The submatrix keeping the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    /// Drops row `n` and column `k`.
    pub fn without(&self, n: usize, k: usize) -> Matrix {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| i != n).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != k).collect();
        self.select(&rows, &cols)
    }

    fn require_square(&self, what: &str) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::dim(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.rows)
    }

    /// Determinant: closed-form expansion up to 3x3, partial-pivot elimination above.
    pub fn det(&self) -> Result<f64> {
        self.require_square("det")?;
        Ok(det_unchecked(self))
    }

    /// Signed cofactor matrix `C[n][k] = (-1)^(n+k) det(self without row n, column k)`.
    ///
    /// `self * C^T = det(self) * I`; a 1x1 input yields `[1]`.
    pub fn cofactor_matrix(&self) -> Result<Matrix> {
        let n = self.require_square("cofactor matrix")?;
        let m = |i, j| self.get(i, j);
        Ok(match n {
            1 => Matrix::identity(1),
            2 => Matrix::from_raw(2, 2, vec![m(1, 1), -m(1, 0), -m(0, 1), m(0, 0)]),
            3 => Matrix::from_raw(
                3,
                3,
                vec![
                    m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1),
                    m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2),
                    m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0),
                    m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2),
                    m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0),
                    m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1),
                    m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1),
                    m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2),
                    m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
                ],
            ),
            _ => Matrix::from_fn(n, n, |i, j| {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                sign * det_unchecked(&self.without(i, j))
            }),
        })
    }

    /// `det(self + delta) - det(self)` without the cancellation of the naive
    /// difference, by multilinear expansion over the rows taken from `delta`.
    pub fn det_increment(&self, delta: &Matrix) -> Result<f64> {
        let n = self.require_square("det increment")?;
        self.check_same_shape(delta)?;
        let mut total = 0.0;
        let mut mixed = self.clone();
        for mask in 1u32..(1u32 << n) {
            for i in 0..n {
                let src = if mask & (1 << i) != 0 { delta } else { self };
                mixed.data[i * n..(i + 1) * n].copy_from_slice(src.row(i));
            }
            total += det_unchecked(&mixed);
        }
        Ok(total)
    }
}

pub(crate) fn det_unchecked(m: &Matrix) -> f64 {
    let a = |i, j| m.get(i, j);
    match m.rows {
        1 => a(0, 0),
        2 => a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0),
        3 => {
            a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
        }
        n => {
            let mut lu = m.data.clone();
            let mut det = 1.0;
            for col in 0..n {
                let pivot = (col..n)
                    .max_by(|&i, &j| lu[i * n + col].abs().total_cmp(&lu[j * n + col].abs()))
                    .unwrap_or(col);
                if lu[pivot * n + col] == 0.0 {
                    return 0.0;
                }
                if pivot != col {
                    for j in 0..n {
                        lu.swap(col * n + j, pivot * n + j);
                    }
                    det = -det;
                }
                let p = lu[col * n + col];
                det *= p;
                for i in col + 1..n {
                    let factor = lu[i * n + col] / p;
                    if factor != 0.0 {
                        for j in col + 1..n {
                            lu[i * n + j] -= factor * lu[col * n + j];
                        }
                    }
                }
            }
            det
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (n, k): (usize, usize)) -> &f64 {
        &self.data[n * self.cols + k]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in 0..self.rows {
            let row: Vec<String> = self.row(n).iter().map(|v| format!("{v:>12.6}")).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(Matrix::identity(3).det().unwrap(), 1.0);
        assert_eq!(Matrix::diag(&[2.0, 1.0]).det().unwrap(), 2.0);
        assert_eq!(m(&[&[3.0]]).det().unwrap(), 3.0);
        assert_eq!(Matrix::identity(5).det().unwrap(), 1.0);
    }

    #[test]
    fn det_rejects_rectangular() {
        assert!(matches!(Matrix::zeros(2, 3).det(), Err(Error::Dimension(_))));
        assert!(matches!(Matrix::zeros(2, 3).cofactor_matrix(), Err(Error::Dimension(_))));
    }

    #[test]
    fn det_pivoting_handles_zero_leading_entry() {
        let p = m(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        assert_eq!(p.det().unwrap(), 1.0);
        let singular = m(&[
            &[1.0, 2.0, 3.0, 4.0],
            &[2.0, 4.0, 6.0, 8.0],
            &[0.0, 1.0, 0.0, 1.0],
            &[1.0, 0.0, 1.0, 0.0],
        ]);
        assert_eq!(singular.det().unwrap(), 0.0);
    }

    #[test]
    fn cofactor_fixtures() {
        assert_eq!(
            Matrix::diag(&[2.0, 1.0]).cofactor_matrix().unwrap(),
            Matrix::diag(&[1.0, 2.0])
        );
        for n in 1..=5 {
            assert_eq!(Matrix::identity(n).cofactor_matrix().unwrap(), Matrix::identity(n));
        }
    }

    #[test]
    fn cofactor_generic_path_matches_closed_form() {
        let x = m(&[&[0.3, -1.2, 0.7], &[2.0, 0.1, -0.4], &[0.5, 0.9, 1.1]]);
        let closed = x.cofactor_matrix().unwrap();
        let generic = Matrix::from_fn(3, 3, |i, j| {
            let s = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            s * x.without(i, j).det().unwrap()
        });
        assert!(closed.sub(&generic).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn det_increment_matches_difference() {
        let x = m(&[&[1.0, 2.0, 0.5], &[0.0, 1.5, -1.0], &[2.0, 0.0, 1.0]]);
        let d = m(&[&[1e-3, 0.0, 2e-3], &[-1e-3, 1e-3, 0.0], &[0.0, 3e-3, -1e-3]]);
        let naive = x.add(&d).unwrap().det().unwrap() - x.det().unwrap();
        let inc = x.det_increment(&d).unwrap();
        assert!((naive - inc).abs() < 1e-14);
        // a step far below rounding of det itself still registers
        let tiny = d.scale(1e-12);
        let inc = x.det_increment(&tiny).unwrap();
        let first_order = x.cofactor_matrix().unwrap().pairing(&tiny).unwrap();
        assert!((inc - first_order).abs() <= 1e-10 * first_order.abs());
    }

    #[test]
    fn json_shape() {
        let x = m(&[&[1.0, 2.0], &[3.0, 4.5]]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":2,"entries":[[1.0,2.0],[3.0,4.5]]}"#);
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn json_rejects_bad_input() {
        for bad in [
            r#"{"rows":2,"cols":2,"entries":[[1.0,2.0]]}"#,
            r#"{"rows":1,"cols":2,"entries":[[1.0]]}"#,
            r#"{"rows":0,"cols":0,"entries":[]}"#,
            r#"{"rows":1,"cols":1,"entries":[[1.0]],"extra":1}"#,
        ] {
            assert!(serde_json::from_str::<Matrix>(bad).is_err(), "{bad}");
        }
        assert!(Matrix::new(1, 1, vec![f64::NAN]).is_err());
    }
}

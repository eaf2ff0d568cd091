//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use itertools::Itertools;
use matleg::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..=1.0))
}

/// Random square matrix with `|det|` at least `min_abs_det`.
pub fn random_invertible(rng: &mut impl Rng, n: usize, min_abs_det: f64) -> Matrix {
    loop {
        let m = random_matrix(rng, n, n);
        if leibniz_det(&m).abs() >= min_abs_det {
            return m;
        }
    }
}

/// Signed sum over all permutations.
pub fn leibniz_det(m: &Matrix) -> f64 {
    let n = m.rows();
    assert_eq!(n, m.cols());
    (0..n)
        .permutations(n)
        .map(|perm| {
            let inversions = (0..n)
                .tuple_combinations()
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            let sign = if inversions.is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * (0..n).map(|i| m.get(i, perm[i])).product::<f64>()
        })
        .sum()
}

/// Gaussian elimination with partial pivoting; backward stable where the
/// permutation sum cancels badly.
pub fn pivoted_det(m: &Matrix) -> f64 {
    let n = m.rows();
    assert_eq!(n, m.cols());
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        if p == 0.0 {
            return 0.0;
        }
        det *= p;
        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower {
            let factor = row[col] / p;
            for (v, &u) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *v -= factor * u;
            }
        }
    }
    det
}

pub fn submatrix(m: &Matrix, rows: &[usize], cols: &[usize]) -> Matrix {
    Matrix::from_fn(rows.len(), cols.len(), |i, j| m.get(rows[i], cols[j]))
}

pub fn oracle_minor(m: &Matrix, rows: &[usize], cols: &[usize]) -> f64 {
    leibniz_det(&submatrix(m, rows, cols))
}

/// `(-1)^(n+k)` times the Leibniz determinant with row `n`, column `k` removed.
pub fn oracle_cofactor(m: &Matrix, n: usize, k: usize) -> f64 {
    let rows: Vec<usize> = (0..m.rows()).filter(|&i| i != n).collect();
    let cols: Vec<usize> = (0..m.cols()).filter(|&j| j != k).collect();
    let sign = if (n + k).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * oracle_minor(m, &rows, &cols)
}

/// Central differences with step `h (1 + |x|)`.
pub fn fd_gradient(f: impl Fn(&Matrix) -> f64, x: &Matrix, h: f64) -> Matrix {
    Matrix::from_fn(x.rows(), x.cols(), |n, k| {
        let step = h * (1.0 + x.get(n, k).abs());
        let shifted = |delta: f64| {
            let mut y = x.clone();
            y.set(n, k, x.get(n, k) + delta);
            f(&y)
        };
        (shifted(step) - shifted(-step)) / (2.0 * step)
    })
}

/// `|a - b| / max(|b|, floor)`.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// `||a - b||_inf / (1 + ||b||_inf)`.
pub fn rel_matrix(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let gap = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max);
    gap / (1.0 + b.max_abs())
}

pub fn frobenius(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(u, v)| u * v).sum()
}

/// `|x^1 x x^2|` for the two columns of a 3 x 2 matrix.
pub fn cross_norm(x: &Matrix) -> f64 {
    let a = [x.get(0, 0), x.get(1, 0), x.get(2, 0)];
    let b = [x.get(0, 1), x.get(1, 1), x.get(2, 1)];
    let c = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    c.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// 3 x 3 matrix whose cofactor column sums are all positive.
pub fn positive_sum_cofactors(rng: &mut impl Rng) -> Matrix {
    loop {
        let m = random_matrix(rng, 3, 3);
        let sums_ok = (0..3).all(|k| (0..3).map(|n| oracle_cofactor(&m, n, k)).sum::<f64>() > 0.05);
        if sums_ok {
            return m;
        }
    }
}

/// 3 x 2 matrix whose three 2 x 2 minors are all positive.
pub fn positive_minors(rng: &mut impl Rng) -> Matrix {
    loop {
        let m = random_matrix(rng, 3, 2);
        let ok = (0..3).all(|skip| {
            let rows: Vec<usize> = (0..3).filter(|&r| r != skip).collect();
            oracle_minor(&m, &rows, &[0, 1]) > 0.05
        });
        if ok {
            return m;
        }
    }
}

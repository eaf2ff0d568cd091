//! k-minors of an N x K matrix: index-set enumeration, the full grid of
//! k x k subdeterminants, and their gradients.
//!
//! A minor is selected by a set of rows (drawn from the N rows) and a set of
//! columns (drawn from the K columns, one per linear form). Grids are laid out
//! in lexicographic order of the column set first, then the row set.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// A strictly increasing selection of `k` indices out of `0..ambient`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSet {
    ambient: usize,
    picks: Vec<usize>,
}

impl IndexSet {
    /// `picks` are zero-based and must be strictly increasing and below `ambient`.
    pub fn new(ambient: usize, picks: Vec<usize>) -> Result<Self> {
        if ambient == 0 {
            return Err(Error::domain("index set ambient size must be positive"));
        }
        if picks.is_empty() {
            return Err(Error::domain("index set must pick at least one index"));
        }
        if !picks.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain(format!("picks {picks:?} are not strictly increasing")));
        }
        if picks.last().is_some_and(|&last| last >= ambient) {
            return Err(Error::domain(format!("picks {picks:?} exceed ambient size {ambient}")));
        }
        Ok(IndexSet { ambient, picks })
    }

    /// All indices of `0..ambient`.
    pub fn full(ambient: usize) -> Self {
        IndexSet { ambient, picks: (0..ambient).collect() }
    }

    /// All indices of `0..ambient` except `skip`.
    pub fn all_but(ambient: usize, skip: usize) -> Result<Self> {
        IndexSet::new(ambient, (0..ambient).filter(|&i| i != skip).collect())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.picks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.picks.is_empty()
    }

    /// Zero-based picks.
    pub fn picks(&self) -> &[usize] {
        &self.picks
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.picks.iter().map(|i| i + 1).collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.picks.binary_search(&i).is_ok()
    }
}

impl fmt::Display for IndexSet {
    /// One-based, e.g. `{1,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_one_based().iter().join(","))
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Every k-subset of `0..ambient`, lexicographic in the picks.
pub fn enumerate_index_sets(ambient: usize, k: usize) -> Result<Vec<IndexSet>> {
    if k < 1 || k > ambient {
        return Err(Error::domain(format!("subset size {k} outside 1..={ambient}")));
    }
    Ok((0..ambient)
        .combinations(k)
        .map(|picks| IndexSet { ambient, picks })
        .collect())
}

/// All k-minors of a matrix. `values` has one row per column set and one
/// column per row set.
#[derive(Debug, Clone, PartialEq)]
pub struct CofactorGrid {
    order: usize,
    row_sets: Vec<IndexSet>,
    col_sets: Vec<IndexSet>,
    values: Matrix,
}

impl CofactorGrid {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn row_sets(&self) -> &[IndexSet] {
        &self.row_sets
    }

    pub fn col_sets(&self) -> &[IndexSet] {
        &self.col_sets
    }

    /// `c(K,k) x c(N,k)` matrix of minors.
    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn get(&self, col_set: usize, row_set: usize) -> f64 {
        self.values.get(col_set, row_set)
    }

    pub fn len(&self) -> usize {
        self.row_sets.len() * self.col_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(col_set, row_set, value)` in layout order.
    pub fn iter(&self) -> impl Iterator<Item = (&IndexSet, &IndexSet, f64)> + '_ {
        self.col_sets.iter().enumerate().flat_map(move |(c, cs)| {
            self.row_sets.iter().enumerate().map(move |(r, rs)| (cs, rs, self.values.get(c, r)))
        })
    }
}

/// The k x k subdeterminant on the given rows and columns.
pub fn minor(m: &Matrix, row_set: &IndexSet, col_set: &IndexSet) -> Result<f64> {
    check_sets(m, row_set, col_set)?;
    m.select(row_set.picks(), col_set.picks()).det()
}

pub fn delta_k(m: &Matrix, k: usize) -> Result<CofactorGrid> {
    let max_k = m.rows().min(m.cols());
    if k < 1 || k > max_k {
        return Err(Error::domain(format!("minor order {k} outside 1..={max_k}")));
    }
    let row_sets = enumerate_index_sets(m.rows(), k)?;
    let col_sets = enumerate_index_sets(m.cols(), k)?;
    let values = Matrix::from_fn(col_sets.len(), row_sets.len(), |c, r| {
        crate::linalg::det_unchecked(&m.select(row_sets[r].picks(), col_sets[c].picks()))
    });
    Ok(CofactorGrid { order: k, row_sets, col_sets, values })
}

fn check_sets(m: &Matrix, row_set: &IndexSet, col_set: &IndexSet) -> Result<()> {
    if row_set.len() != col_set.len() {
        return Err(Error::domain(format!(
            "row set {row_set} and column set {col_set} differ in size"
        )));
    }
    if row_set.ambient() != m.rows() || col_set.ambient() != m.cols() {
        return Err(Error::dim(format!(
            "index sets over {}x{} applied to a {}x{} matrix",
            row_set.ambient(),
            col_set.ambient(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Partial derivatives of one minor with respect to every entry of `m`.
///
/// Zero outside the selected rows and columns; inside, the signed cofactor of
/// the entry within the k x k submatrix.
pub fn minor_gradient(m: &Matrix, row_set: &IndexSet, col_set: &IndexSet) -> Result<Matrix> {
    check_sets(m, row_set, col_set)?;
    let cof = m.select(row_set.picks(), col_set.picks()).cofactor_matrix()?;
    let mut grad = Matrix::zeros(m.rows(), m.cols());
    for (i, &n) in row_set.picks().iter().enumerate() {
        for (j, &k) in col_set.picks().iter().enumerate() {
            grad.set(n, k, cof.get(i, j));
        }
    }
    Ok(grad)
}

/// `minor - (1/k) <x, grad minor>`, which vanishes because a k-minor is
/// homogeneous of degree k.
pub fn euler_residual(m: &Matrix, row_set: &IndexSet, col_set: &IndexSet) -> Result<f64> {
    let value = minor(m, row_set, col_set)?;
    let grad = minor_gradient(m, row_set, col_set)?;
    Ok(value - m.pairing(&grad)? / row_set.len() as f64)
}

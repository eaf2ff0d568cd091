//! Functions of the 2 x 2 cofactors of a 3 x 3 matrix, and of the three 2 x 2
//! minors of a 3 x 2 matrix (a pair of vectors in R^3).
//!
//! Both families have the shape `F = c * [sum_k b_k^alpha]^beta`:
//!
//! * `SumPower` (3 x 3 argument): `b_k = sum_n Delta[n][k]`, the column sums of
//!   the signed cofactor matrix `Delta = cof(x)`.
//! * `AreaPower` (3 x 2 argument): `b_n = Delta_n`, the minor on the two rows
//!   other than `n`. With `(alpha, beta) = (2, 1/2)` this is `|x^1 x x^2|`.
//!
//! Writing `Phi[n][k] = dF/dDelta[n][k]`, the partials have rank one, and the
//! cofactors `D` of the gradient `y = F'(x)` satisfy
//! `D[n][k] = Phi[n][k] * sum_ij Phi[i][j] Delta[i][j] = alpha*beta * Phi[n][k] * F`.
//! For `SumPower` this forces every column of `D` to be constant, which is the
//! image manifold on which the transform lives. The transform is
//! `F^L = c' [sum_k D_k^(alpha/(alpha-1))]^(beta(alpha-1)/(2 alpha beta - 1))`,
//! a family of the same shape with conjugate homogeneity degree.
//!
//! Negative bases are admitted only under even-integer `alpha`; everything else
//! is rejected instead of being continued into the complex plane.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::minors::{delta_k, minor, minor_gradient, IndexSet};

/// Relative tolerance for membership in the `SumPower` image manifold.
pub const MANIFOLD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CofactorKind {
    SumPower,
    AreaPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CofactorFamilyRepr", into = "CofactorFamilyRepr")]
pub struct CofactorFamily {
    kind: CofactorKind,
    alpha: f64,
    beta: f64,
    scale: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CofactorFamilyRepr {
    kind: CofactorKind,
    alpha: f64,
    beta: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    scale: f64,
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

impl TryFrom<CofactorFamilyRepr> for CofactorFamily {
    type Error = Error;

    fn try_from(r: CofactorFamilyRepr) -> Result<Self> {
        CofactorFamily::scaled(r.kind, r.alpha, r.beta, r.scale)
    }
}

impl From<CofactorFamily> for CofactorFamilyRepr {
    fn from(f: CofactorFamily) -> Self {
        CofactorFamilyRepr { kind: f.kind, alpha: f.alpha, beta: f.beta, scale: f.scale }
    }
}

fn is_even_integer(v: f64) -> bool {
    v.fract() == 0.0 && (v / 2.0).fract() == 0.0
}

/// `base^exp` over the reals: negative bases only with integer exponents.
fn real_pow(base: f64, exp: f64, what: &str) -> Result<f64> {
    if base >= 0.0 {
        Ok(base.powf(exp))
    } else if exp.fract() == 0.0 {
        Ok(base.powi(exp as i32))
    } else {
        Err(Error::domain(format!(
            "{what} = {base} is negative under fractional exponent {exp}"
        )))
    }
}

impl CofactorFamily {
    pub fn new(kind: CofactorKind, alpha: f64, beta: f64) -> Result<Self> {
        CofactorFamily::scaled(kind, alpha, beta, 1.0)
    }

    /// `scale * [sum b^alpha]^beta`; scales other than 1 arise as transforms.
    pub fn scaled(kind: CofactorKind, alpha: f64, beta: f64, scale: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Invalid("exponents must be finite".into()));
        }
        if alpha == 0.0 || alpha == 1.0 {
            return Err(Error::Invalid(format!("alpha = {alpha} must not be 0 or 1")));
        }
        let p = 2.0 * alpha * beta;
        if p == 0.0 || p == 1.0 {
            return Err(Error::Invalid(format!("2*alpha*beta = {p} must not be 0 or 1")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Invalid(format!("scale = {scale} must be positive")));
        }
        Ok(CofactorFamily { kind, alpha, beta, scale })
    }

    pub fn sum_power(alpha: f64, beta: f64) -> Result<Self> {
        CofactorFamily::new(CofactorKind::SumPower, alpha, beta)
    }

    pub fn area_power(alpha: f64, beta: f64) -> Result<Self> {
        CofactorFamily::new(CofactorKind::AreaPower, alpha, beta)
    }

    /// The self-dual area functional, `(alpha, beta) = (2, 1/2)`.
    pub fn area() -> Self {
        CofactorFamily { kind: CofactorKind::AreaPower, alpha: 2.0, beta: 0.5, scale: 1.0 }
    }

    pub fn kind(&self) -> CofactorKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Homogeneity degree of `F` in `x`: `2 alpha beta`.
    pub fn degree(&self) -> f64 {
        2.0 * self.alpha * self.beta
    }

    /// Homogeneity degree of `Phi` in the cofactors: `alpha beta`.
    pub fn cofactor_degree(&self) -> f64 {
        self.alpha * self.beta
    }

    /// Shape of the primal argument.
    pub fn shape(&self) -> (usize, usize) {
        match self.kind {
            CofactorKind::SumPower => (3, 3),
            CofactorKind::AreaPower => (3, 2),
        }
    }

    fn check_shape(&self, x: &Matrix) -> Result<()> {
        let (r, c) = self.shape();
        if x.shape() != (r, c) {
            return Err(Error::dim(format!(
                "{:?} expects {r}x{c} matrices, got {}x{}",
                self.kind,
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }

    /// The three quantities raised to `alpha`.
    pub fn bases(&self, x: &Matrix) -> Result<[f64; 3]> {
        self.check_shape(x)?;
        let mut out = [0.0; 3];
        match self.kind {
            CofactorKind::SumPower => {
                let cof = x.cofactor_matrix()?;
                for (k, b) in out.iter_mut().enumerate() {
                    *b = (0..3).map(|n| cof.get(n, k)).sum();
                }
            }
            CofactorKind::AreaPower => {
                let cols = IndexSet::full(2);
                for (n, b) in out.iter_mut().enumerate() {
                    *b = minor(x, &IndexSet::all_but(3, n)?, &cols)?;
                }
            }
        }
        Ok(out)
    }

    fn admissible_bases(&self, x: &Matrix) -> Result<[f64; 3]> {
        let bases = self.bases(x)?;
        if !is_even_integer(self.alpha) {
            if let Some(i) = bases.iter().position(|b| *b < 0.0) {
                return Err(Error::domain(format!(
                    "{} = {} is negative and alpha = {} is not an even integer",
                    self.base_name(i),
                    bases[i],
                    self.alpha
                )));
            }
        }
        Ok(bases)
    }

    fn base_name(&self, i: usize) -> String {
        match self.kind {
            CofactorKind::SumPower => format!("column sum {} of the cofactors", i + 1),
            CofactorKind::AreaPower => format!("minor Delta_{}", i + 1),
        }
    }

    fn inner_sum(&self, bases: &[f64; 3]) -> Result<f64> {
        bases
            .iter()
            .enumerate()
            .map(|(i, b)| real_pow(*b, self.alpha, &self.base_name(i)))
            .sum()
    }

    /// `F(x)`.
    pub fn eval(&self, x: &Matrix) -> Result<f64> {
        let bases = self.admissible_bases(x)?;
        let total = self.inner_sum(&bases)?;
        let value = self.scale * real_pow(total, self.beta, "sum of powers")?;
        if !value.is_finite() {
            return Err(Error::domain(format!("F is infinite (sum of powers = {total})")));
        }
        Ok(value)
    }

    /// `Phi[n][k] = dF/dDelta[n][k]`: 3 x 3 for `SumPower`, a 3 x 1 column for
    /// `AreaPower`.
    pub fn phi_partials(&self, x: &Matrix) -> Result<Matrix> {
        let bases = self.admissible_bases(x)?;
        let total = self.inner_sum(&bases)?;
        let outer = self.scale
            * self.alpha
            * self.beta
            * real_pow(total, self.beta - 1.0, "sum of powers")?;
        let mut per_base = [0.0; 3];
        for (i, b) in bases.iter().enumerate() {
            per_base[i] = outer * real_pow(*b, self.alpha - 1.0, &self.base_name(i))?;
        }
        if per_base.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularGradient(format!(
                "zero base under a negative power (bases {bases:?}, sum {total})"
            )));
        }
        Ok(match self.kind {
            CofactorKind::SumPower => Matrix::from_fn(3, 3, |_, k| per_base[k]),
            CofactorKind::AreaPower => Matrix::from_fn(3, 1, |n, _| per_base[n]),
        })
    }

    /// `F'(x)` by the chain rule through the minor gradients, same shape as `x`.
    pub fn grad(&self, x: &Matrix) -> Result<Matrix> {
        let partials = self.phi_partials(x)?;
        let mut grad = Matrix::zeros(x.rows(), x.cols());
        match self.kind {
            CofactorKind::SumPower => {
                for n in 0..3 {
                    for k in 0..3 {
                        let sign = if (n + k) % 2 == 0 { 1.0 } else { -1.0 };
                        let dminor = minor_gradient(
                            x,
                            &IndexSet::all_but(3, n)?,
                            &IndexSet::all_but(3, k)?,
                        )?;
                        grad = grad.axpy(sign * partials.get(n, k), &dminor)?;
                    }
                }
            }
            CofactorKind::AreaPower => {
                let cols = IndexSet::full(2);
                for n in 0..3 {
                    let dminor = minor_gradient(x, &IndexSet::all_but(3, n)?, &cols)?;
                    grad = grad.axpy(partials.get(n, 0), &dminor)?;
                }
            }
        }
        Ok(grad)
    }

    /// True when `F`, `F'` and the closed-form transform at `F'(x)` are all
    /// defined: every base must be positive unless both `alpha` and the dual
    /// exponent `alpha/(alpha-1)` are even integers (only `alpha = 2`).
    pub fn in_transform_domain(&self, x: &Matrix) -> bool {
        let Ok(bases) = self.bases(x) else { return false };
        let any_sign = is_even_integer(self.alpha) && is_even_integer(self.alpha / (self.alpha - 1.0));
        let bases_ok = if any_sign {
            bases.iter().any(|b| *b != 0.0)
        } else {
            bases.iter().all(|b| *b > 0.0)
        };
        bases_ok
            && self.eval(x).is_ok_and(f64::is_finite)
            && self.grad(x).is_ok_and(|g| g.is_finite())
    }

    /// Largest absolute 2 x 2 minor of the partials matrix `Phi[n][k]`; zero
    /// exactly when it has rank one.
    pub fn rank1_defect(&self, x: &Matrix) -> Result<f64> {
        Ok(matrix_rank1_defect(&self.phi_partials(x)?))
    }

    /// Cofactors of `y` expressed through the partials, using only the rank-one
    /// structure: `Phi[n][k] * sum_ij Phi[i][j] Delta[i][j]`.
    pub fn predicted_dual_cofactors(&self, x: &Matrix) -> Result<DualCofactorGrid> {
        let partials = self.phi_partials(x)?;
        let pairing: f64 = match self.kind {
            CofactorKind::SumPower => partials.pairing(&x.cofactor_matrix()?)?,
            CofactorKind::AreaPower => {
                let d = self.bases(x)?;
                (0..3).map(|n| partials.get(n, 0) * d[n]).sum()
            }
        };
        Ok(match self.kind {
            CofactorKind::SumPower => DualCofactorGrid::Full(partials.scale(pairing)),
            CofactorKind::AreaPower => {
                DualCofactorGrid::Area(std::array::from_fn(|n| partials.get(n, 0) * pairing))
            }
        })
    }

    /// Max relative error in `D[n][k] = alpha beta Phi[n][k] F(x)`, with `D` the
    /// cofactors of `y = F'(x)`.
    pub fn dual_relation_residual(&self, x: &Matrix) -> Result<f64> {
        let d = dual_cofactors(&self.grad(x)?)?;
        let factor = self.cofactor_degree() * self.eval(x)?;
        let predicted = self.phi_partials(x)?.scale(factor);
        relative_gap(&d.to_matrix(), &predicted)
    }

    /// Max relative error between the cofactors of `y = F'(x)` and
    /// [`CofactorFamily::predicted_dual_cofactors`].
    pub fn rank1_identity_residual(&self, x: &Matrix) -> Result<f64> {
        let d = dual_cofactors(&self.grad(x)?)?;
        relative_gap(&d.to_matrix(), &self.predicted_dual_cofactors(x)?.to_matrix())
    }

    /// `(r, s, c')` with `F^L = c' [sum D^r]^s`.
    fn dual_constants(&self) -> (f64, f64, f64) {
        let ab = self.alpha * self.beta;
        let p = 2.0 * ab;
        let r = self.alpha / (self.alpha - 1.0);
        let s = self.beta * (self.alpha - 1.0) / (p - 1.0);
        let c = (p - 1.0) * self.scale * (self.scale * ab).powf(-p / (p - 1.0));
        (r, s, c)
    }

    /// Closed-form `F^L(y)`. For `SumPower`, `y` must lie on the image manifold
    /// (constant columns of `cof(y)`); for `AreaPower`, `y` may be 3 x 2 or 2 x 3.
    pub fn legendre(&self, y: &Matrix) -> Result<f64> {
        let d = dual_cofactors(y)?;
        let values = match (self.kind, &d) {
            (CofactorKind::SumPower, DualCofactorGrid::Full(_)) => {
                let defect = d.manifold_defect();
                if defect > MANIFOLD_TOL {
                    return Err(Error::OffManifold { defect, tolerance: MANIFOLD_TOL });
                }
                d.common_values()
            }
            (CofactorKind::AreaPower, DualCofactorGrid::Area(v)) => *v,
            _ => {
                return Err(Error::dim(format!(
                    "{:?} transform does not accept a {}x{} argument",
                    self.kind,
                    y.rows(),
                    y.cols()
                )))
            }
        };
        let (r, s, c) = self.dual_constants();
        let total: f64 = values
            .iter()
            .enumerate()
            .map(|(i, v)| real_pow(*v, r, &format!("dual cofactor D_{}", i + 1)))
            .sum::<Result<f64>>()?;
        let value = c * real_pow(total, s, "sum of dual powers")?;
        if !value.is_finite() {
            return Err(Error::domain(format!("F^L is infinite (sum of dual powers = {total})")));
        }
        Ok(value)
    }

    /// The transform as a family of the same kind:
    /// `alpha' = alpha/(alpha-1)`, `beta' = beta(alpha-1)/(2 alpha beta - 1)`.
    ///
    /// For `SumPower` the family is written over column sums, which on the
    /// image manifold are three times the common column value.
    pub fn dual(&self) -> CofactorFamily {
        let (r, s, c) = self.dual_constants();
        let scale = match self.kind {
            CofactorKind::SumPower => c * 3f64.powf(-r * s),
            CofactorKind::AreaPower => c,
        };
        CofactorFamily { kind: self.kind, alpha: r, beta: s, scale }
    }
}

impl fmt::Display for CofactorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}(alpha={}, beta={}", self.kind, self.alpha, self.beta)?;
        if self.scale != 1.0 {
            write!(f, ", scale={}", self.scale)?;
        }
        write!(f, ")")
    }
}

/// `||a - b||_inf / ||b||_inf`, falling back to the absolute gap when `b = 0`.
fn relative_gap(a: &Matrix, b: &Matrix) -> Result<f64> {
    let gap = a.sub(b)?.max_abs();
    let norm = b.max_abs();
    Ok(if norm > 0.0 { gap / norm } else { gap })
}

/// Largest absolute 2 x 2 minor of `m` (zero for a single row or column).
pub fn matrix_rank1_defect(m: &Matrix) -> f64 {
    if m.rows() < 2 || m.cols() < 2 {
        return 0.0;
    }
    delta_k(m, 2).map(|g| g.values().max_abs()).unwrap_or(0.0)
}

/// Cofactors of a dual argument.
#[derive(Debug, Clone, PartialEq)]
pub enum DualCofactorGrid {
    /// Signed 2 x 2 cofactors `D[n][k]` of a 3 x 3 `y`.
    Full(Matrix),
    /// `D^n`, the minor of a 3 x 2 `y` on the rows other than `n`.
    Area([f64; 3]),
}

impl DualCofactorGrid {
    /// Max over columns of the spread `|D[n][k] - D[0][k]|`, relative to `max |D|`.
    /// Always zero for `Area`.
    pub fn manifold_defect(&self) -> f64 {
        match self {
            DualCofactorGrid::Full(d) => {
                let norm = d.max_abs();
                if norm == 0.0 {
                    return 0.0;
                }
                let spread = (0..3)
                    .flat_map(|k| (1..3).map(move |n| (d.get(n, k) - d.get(0, k)).abs()))
                    .fold(0.0, f64::max);
                spread / norm
            }
            DualCofactorGrid::Area(_) => 0.0,
        }
    }

    /// `D_k` (column means) for `Full`; `D^n` for `Area`.
    pub fn common_values(&self) -> [f64; 3] {
        match self {
            DualCofactorGrid::Full(d) => {
                std::array::from_fn(|k| (0..3).map(|n| d.get(n, k)).sum::<f64>() / 3.0)
            }
            DualCofactorGrid::Area(v) => *v,
        }
    }

    /// 3 x 3 for `Full`, a 3 x 1 column for `Area`.
    pub fn to_matrix(&self) -> Matrix {
        match self {
            DualCofactorGrid::Full(d) => d.clone(),
            DualCofactorGrid::Area(v) => Matrix::from_fn(3, 1, |n, _| v[n]),
        }
    }
}

/// Cofactors of `y`: all signed 2 x 2 cofactors of a 3 x 3 matrix, or the three
/// 2 x 2 minors of a pair of vectors in R^3 (given as 3 x 2, or transposed 2 x 3).
pub fn dual_cofactors(y: &Matrix) -> Result<DualCofactorGrid> {
    match y.shape() {
        (3, 3) => Ok(DualCofactorGrid::Full(y.cofactor_matrix()?)),
        (3, 2) => {
            let cols = IndexSet::full(2);
            let mut v = [0.0; 3];
            for (n, slot) in v.iter_mut().enumerate() {
                *slot = minor(y, &IndexSet::all_but(3, n)?, &cols)?;
            }
            Ok(DualCofactorGrid::Area(v))
        }
        (2, 3) => dual_cofactors(&y.transpose()),
        (r, c) => Err(Error::dim(format!(
            "dual cofactors need a 3x3, 3x2 or 2x3 matrix, got {r}x{c}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1e2() -> Matrix {
        Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()
    }

    fn cross_norm(x: &Matrix) -> f64 {
        let (a, b) = ([x[(0, 0)], x[(1, 0)], x[(2, 0)]], [x[(0, 1)], x[(1, 1)], x[(2, 1)]]);
        let c = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        c.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    #[test]
    fn area_fixture() {
        let area = CofactorFamily::area();
        assert_eq!(area.eval(&e1e2()).unwrap(), 1.0);
        assert_eq!(area.grad(&e1e2()).unwrap(), e1e2());
        assert_eq!(dual_cofactors(&e1e2()).unwrap(), DualCofactorGrid::Area([0.0, 0.0, 1.0]));
        assert_eq!(area.dual_relation_residual(&e1e2()).unwrap(), 0.0);
        assert_eq!(area.legendre(&e1e2()).unwrap(), 1.0);
    }

    #[test]
    fn area_is_cross_product_norm() {
        let x = Matrix::from_rows(&[vec![0.3, -1.0], vec![2.0, 0.5], vec![-0.7, 1.2]]).unwrap();
        let f = CofactorFamily::area().eval(&x).unwrap();
        assert!((f - cross_norm(&x)).abs() < 1e-14);
    }

    #[test]
    fn sum_power_identity() {
        let fam = CofactorFamily::sum_power(2.0, 1.0).unwrap();
        assert_eq!(fam.eval(&Matrix::identity(3)).unwrap(), 3.0);
        assert_eq!(fam.rank1_defect(&Matrix::identity(3)).unwrap(), 0.0);
        let d = dual_cofactors(&Matrix::identity(3)).unwrap();
        assert_eq!(d, DualCofactorGrid::Full(Matrix::identity(3)));
    }

    #[test]
    fn rank_two_witness_is_detected() {
        let phi = Matrix::diag(&[1.0, 1.0, 0.0]);
        assert_eq!(matrix_rank1_defect(&phi), 1.0);
        let rank_one = Matrix::from_fn(3, 3, |n, k| (n + 1) as f64 * (k as f64 - 0.5));
        assert!(matrix_rank1_defect(&rank_one) < 1e-15);
    }

    #[test]
    fn negative_base_rejected_for_odd_alpha() {
        let fam = CofactorFamily::area_power(3.0, 1.0).unwrap();
        let x = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let err = fam.eval(&x).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("Delta_3")), "{err}");
        // even alpha admits it
        assert!(CofactorFamily::area_power(2.0, 1.0).unwrap().eval(&x).is_ok());
    }

    #[test]
    fn singular_gradient_at_zero_base() {
        let fam = CofactorFamily::area();
        let zero = Matrix::zeros(3, 2);
        assert!(matches!(fam.grad(&zero), Err(Error::SingularGradient(_))));
    }

    #[test]
    fn off_manifold_rejected() {
        let fam = CofactorFamily::sum_power(2.0, 1.0).unwrap();
        let y = Matrix::diag(&[1.0, 2.0, 3.0]);
        assert!(matches!(fam.legendre(&y), Err(Error::OffManifold { .. })));
    }

    #[test]
    fn dual_cofactor_shapes() {
        let y = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 7.0]]).unwrap();
        assert_eq!(dual_cofactors(&y).unwrap(), dual_cofactors(&y.transpose()).unwrap());
        assert!(dual_cofactors(&Matrix::identity(2)).is_err());
    }

    #[test]
    fn family_validation() {
        assert!(CofactorFamily::sum_power(1.0, 1.0).is_err());
        assert!(CofactorFamily::sum_power(0.0, 1.0).is_err());
        assert!(CofactorFamily::sum_power(2.0, 0.25).is_err());
        assert!(CofactorFamily::sum_power(2.0, 0.0).is_err());
        assert!(CofactorFamily::scaled(CofactorKind::AreaPower, 2.0, 0.5, -1.0).is_err());
    }

    #[test]
    fn area_dual_parameters() {
        let d = CofactorFamily::area().dual();
        assert_eq!(d, CofactorFamily::area());
        let fam = CofactorFamily::sum_power(2.0, 1.0).unwrap();
        let dd = fam.dual().dual();
        assert!((dd.alpha() - 2.0).abs() < 1e-15);
        assert!((dd.beta() - 1.0).abs() < 1e-15);
        assert!((dd.scale() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn family_json() {
        let fam: CofactorFamily =
            serde_json::from_str(r#"{"kind":"areapower","alpha":2,"beta":0.5}"#).unwrap();
        assert_eq!(fam, CofactorFamily::area());
        assert_eq!(
            serde_json::to_string(&fam).unwrap(),
            r#"{"kind":"areapower","alpha":2.0,"beta":0.5}"#
        );
        assert!(serde_json::from_str::<CofactorFamily>(
            r#"{"kind":"sumpower","alpha":2,"beta":1,"gamma":3}"#
        )
        .is_err());
    }
}

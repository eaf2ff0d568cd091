//! Functions of the determinant, `F(x) = Phi(det x)` on square N x N matrices,
//! and their Legendre transforms.
//!
//! Three families are supported:
//!
//! | family    | `Phi(t)`              | `F^L(y)`                          |
//! |-----------|-----------------------|-----------------------------------|
//! | `DetPower`| `(N/p) |t|^(p/N)`     | `(N/q) |det y|^(q/N)`, `1/p+1/q=1`|
//! | `DetRoot` | `N |t|^(1/N)`         | `0` on `{|det y| = 1}`            |
//! | `LogDet`  | `ln|t| + c`           | `N - c + ln|det y|`               |
//!
//! The gradient is `F'(x) = Phi'(det x) * cof(x)` with `cof` the signed cofactor
//! matrix, so `det F'(x) = Phi'(t)^N t^(N-1)` with `t = det x`. When that map
//! `t -> t^(N-1) Phi'(t)^N` has an inverse `psi`, the transform is
//! `F^L(y) = N Phi'(psi(det y)) psi(det y) - Phi(psi(det y))`.
//!
//! Powers of `|t|` carry the sign of `t` explicitly: `Phi'(t) = |t|^(p/N-1) sgn t`,
//! and `psi(s) = |s|^(1/(p-1)) sgn s`, so every identity holds on both sign
//! branches of the determinant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Membership tolerance for the unit-determinant manifold `{|det y| = 1}`.
pub const ROOT_MANIFOLD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DetFamilyRepr", into = "DetFamilyRepr")]
pub enum DetFamily {
    /// `(N/p) |det x|^(p/N)`, `p` not 0 or 1.
    DetPower { n: usize, p: f64 },
    /// `N |det x|^(1/N)`, the `p = 1` member held separately.
    DetRoot { n: usize },
    /// `ln|det x| + shift`.
    LogDet { n: usize, shift: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum DetFamilyRepr {
    DetPower {
        n: usize,
        p: f64,
    },
    DetRoot {
        n: usize,
    },
    LogDet {
        n: usize,
        #[serde(default, skip_serializing_if = "is_zero")]
        shift: f64,
    },
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl TryFrom<DetFamilyRepr> for DetFamily {
    type Error = Error;

    fn try_from(repr: DetFamilyRepr) -> Result<Self> {
        match repr {
            DetFamilyRepr::DetPower { n, p } => DetFamily::power(n, p),
            DetFamilyRepr::DetRoot { n } => DetFamily::root(n),
            DetFamilyRepr::LogDet { n, shift } => DetFamily::log_shifted(n, shift),
        }
    }
}

impl From<DetFamily> for DetFamilyRepr {
    fn from(fam: DetFamily) -> Self {
        match fam {
            DetFamily::DetPower { n, p } => DetFamilyRepr::DetPower { n, p },
            DetFamily::DetRoot { n } => DetFamilyRepr::DetRoot { n },
            DetFamily::LogDet { n, shift } => DetFamilyRepr::LogDet { n, shift },
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Invalid(format!("matrix size must be at least 2, got {n}")));
    }
    Ok(())
}

/// `|t|^e * sgn(t)`.
pub(crate) fn signed_pow(t: f64, e: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.abs().powf(e).copysign(t)
    }
}

impl DetFamily {
    pub fn power(n: usize, p: f64) -> Result<Self> {
        check_n(n)?;
        if !p.is_finite() || p == 0.0 || p == 1.0 {
            return Err(Error::Invalid(format!("exponent p = {p} must be finite and not 0 or 1")));
        }
        Ok(DetFamily::DetPower { n, p })
    }

    pub fn root(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(DetFamily::DetRoot { n })
    }

    pub fn log(n: usize) -> Result<Self> {
        DetFamily::log_shifted(n, 0.0)
    }

    pub fn log_shifted(n: usize, shift: f64) -> Result<Self> {
        check_n(n)?;
        if !shift.is_finite() {
            return Err(Error::Invalid("log shift must be finite".into()));
        }
        Ok(DetFamily::LogDet { n, shift })
    }

    /// `ln|det| + N/2`, which is its own transform.
    pub fn self_dual_log(n: usize) -> Result<Self> {
        DetFamily::log_shifted(n, n as f64 / 2.0)
    }

    pub fn n(&self) -> usize {
        match *self {
            DetFamily::DetPower { n, .. } | DetFamily::DetRoot { n } | DetFamily::LogDet { n, .. } => n,
        }
    }

    /// Homogeneity degree of `F` in `x`, where it has one.
    pub fn degree(&self) -> Option<f64> {
        match *self {
            DetFamily::DetPower { p, .. } => Some(p),
            DetFamily::DetRoot { .. } => Some(1.0),
            DetFamily::LogDet { .. } => None,
        }
    }

    /// `Phi(t)`.
    pub fn phi(&self, t: f64) -> Result<f64> {
        let nf = self.n() as f64;
        match *self {
            DetFamily::DetPower { p, .. } => {
                if t == 0.0 && p < 0.0 {
                    return Err(Error::domain(format!("det = 0 is excluded for p = {p} < 0")));
                }
                Ok(nf / p * t.abs().powf(p / nf))
            }
            DetFamily::DetRoot { .. } => Ok(nf * t.abs().powf(1.0 / nf)),
            DetFamily::LogDet { shift, .. } => {
                if t == 0.0 {
                    return Err(Error::domain("ln|det| undefined at det = 0"));
                }
                Ok(t.abs().ln() + shift)
            }
        }
    }

    /// `Phi'(t)`; singular at `t = 0` for every family.
    pub fn phi_prime(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Err(Error::SingularGradient("Phi' is singular at det = 0".into()));
        }
        let nf = self.n() as f64;
        Ok(match *self {
            DetFamily::DetPower { p, .. } => signed_pow(t, p / nf - 1.0),
            DetFamily::DetRoot { .. } => signed_pow(t, 1.0 / nf - 1.0),
            DetFamily::LogDet { .. } => 1.0 / t,
        })
    }

    fn check_arg(&self, x: &Matrix) -> Result<f64> {
        if x.shape() != (self.n(), self.n()) {
            return Err(Error::dim(format!(
                "family expects {n}x{n} matrices, got {}x{}",
                x.rows(),
                x.cols(),
                n = self.n()
            )));
        }
        x.det()
    }

    /// `F(x) = Phi(det x)`.
    pub fn eval(&self, x: &Matrix) -> Result<f64> {
        let t = self.check_arg(x)?;
        self.phi(t)
    }

    /// `F(x)`, additionally requiring `det x` to lie in `window`.
    pub fn eval_within(&self, x: &Matrix, window: &DomainWindow) -> Result<f64> {
        let t = self.check_arg(x)?;
        if !window.contains(t) {
            return Err(Error::domain(format!("det x = {t} outside {window:?}")));
        }
        self.phi(t)
    }

    /// `F'(x) = Phi'(det x) cof(x)`, same shape as `x`.
    pub fn grad(&self, x: &Matrix) -> Result<Matrix> {
        let t = self.check_arg(x)?;
        let scale = self.phi_prime(t)?;
        Ok(x.cofactor_matrix()?.scale(scale))
    }

    /// `det F'(x) = Phi'(t)^N t^(N-1)`.
    pub fn det_of_gradient(&self, x: &Matrix) -> Result<f64> {
        let t = self.check_arg(x)?;
        let n = self.n() as i32;
        Ok(self.phi_prime(t)?.powi(n) * t.powi(n - 1))
    }

    /// Inverse of `t -> t^(N-1) Phi'(t)^N`.
    pub fn psi(&self, s: f64) -> Result<f64> {
        match *self {
            DetFamily::DetRoot { .. } => Err(Error::NotInvertible(
                "t^(N-1) Phi'(t)^N = sgn t is constant in |t| for the root family".into(),
            )),
            _ if s == 0.0 => Err(Error::domain("psi undefined at det y = 0")),
            DetFamily::DetPower { p, .. } => Ok(signed_pow(s, 1.0 / (p - 1.0))),
            DetFamily::LogDet { .. } => Ok(1.0 / s),
        }
    }

    fn check_dual_arg(&self, y: &Matrix) -> Result<f64> {
        let s = self.check_arg(y)?;
        if s == 0.0 {
            return Err(Error::domain("det y = 0 is outside the dual domain"));
        }
        Ok(s)
    }

    /// Closed-form Legendre transform `F^L(y)`.
    pub fn legendre(&self, y: &Matrix) -> Result<f64> {
        let s = self.check_dual_arg(y)?;
        let nf = self.n() as f64;
        match *self {
            DetFamily::DetPower { p, .. } => {
                let q = conjugate_exponent(p);
                Ok(nf / q * s.abs().powf(q / nf))
            }
            DetFamily::DetRoot { .. } => {
                let defect = (s.abs() - 1.0).abs();
                if defect > ROOT_MANIFOLD_TOL {
                    return Err(Error::OffManifold { defect, tolerance: ROOT_MANIFOLD_TOL });
                }
                Ok(0.0)
            }
            DetFamily::LogDet { shift, .. } => Ok(nf - shift + s.abs().ln()),
        }
    }

    /// `F^L(y)` from the general determinant formula
    /// `N Phi'(psi(det y)) psi(det y) - Phi(psi(det y))`; an independent route to
    /// [`DetFamily::legendre`].
    pub fn legendre_via_psi(&self, y: &Matrix) -> Result<f64> {
        let s = self.check_dual_arg(y)?;
        let t = self.psi(s)?;
        Ok(self.n() as f64 * self.phi_prime(t)? * t - self.phi(t)?)
    }

    pub fn dual(&self) -> DetDual {
        let n = self.n();
        match *self {
            DetFamily::DetPower { p, .. } => {
                DetDual::Family(DetFamily::DetPower { n, p: conjugate_exponent(p) })
            }
            DetFamily::LogDet { shift, .. } => {
                DetDual::Family(DetFamily::LogDet { n, shift: n as f64 - shift })
            }
            DetFamily::DetRoot { .. } => DetDual::ZeroOnManifold(ZeroOnManifold { n }),
        }
    }

    /// Gradient of the transform, `(F^L)'(y)`; the inverse map of `F'`.
    pub fn legendre_grad(&self, y: &Matrix) -> Result<Matrix> {
        match self.dual() {
            DetDual::Family(d) => d.grad(y),
            DetDual::ZeroOnManifold(_) => Err(Error::NotInvertible(
                "dual gradient undefined (constant on manifold)".into(),
            )),
        }
    }
}

/// `q = p / (p - 1)`, so that `1/p + 1/q = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

/// The transform of a determinant family: either another family, or the zero
/// function on `{|det y| = 1}` (the root family's transform).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DetDual {
    Family(DetFamily),
    ZeroOnManifold(ZeroOnManifold),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename = "zero-on-manifold")]
pub struct ZeroOnManifold {
    pub n: usize,
}

/// An open interval `lo < det x < hi`, optionally mirrored to `-hi < det x < -lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainWindow {
    lo: f64,
    hi: f64,
    symmetric: bool,
}

impl DomainWindow {
    pub fn new(lo: f64, hi: f64, symmetric: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::Invalid(format!("window ({lo}, {hi}) is empty")));
        }
        if symmetric && lo < 0.0 {
            return Err(Error::Invalid("a mirrored window must have lo >= 0".into()));
        }
        Ok(DomainWindow { lo, hi, symmetric })
    }

    /// A window valid for `fam`: it may contain `det = 0` only where the family
    /// is defined there (`DetPower` with `p/N >= 1`).
    pub fn for_family(fam: &DetFamily, lo: f64, hi: f64, symmetric: bool) -> Result<Self> {
        let window = DomainWindow::new(lo, hi, symmetric)?;
        let zero_ok = matches!(*fam, DetFamily::DetPower { n, p } if p / n as f64 >= 1.0);
        if !zero_ok && lo < 0.0 && hi > 0.0 {
            return Err(Error::Invalid(format!("window ({lo}, {hi}) straddles det = 0")));
        }
        Ok(window)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, t: f64) -> bool {
        let inside = |v: f64| self.lo < v && v < self.hi;
        inside(t) || (self.symmetric && inside(-t))
    }
}

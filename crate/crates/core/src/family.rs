//! A common interface over every function family with a closed-form
//! transform, so the verification engine can treat them uniformly.

use serde::{Deserialize, Deserializer, Serialize};

use crate::cofactor_transforms::{CofactorFamily, CofactorKind};
use crate::det_transforms::{DetDual, DetFamily};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// A function `F` together with its Legendre transform `F^L`.
pub trait LegendrePair: Sync {
    fn describe(&self) -> String;

    /// Shape of the primal argument.
    fn shape(&self) -> (usize, usize);

    fn eval(&self, x: &Matrix) -> Result<f64>;

    fn grad(&self, x: &Matrix) -> Result<Matrix>;

    fn legendre(&self, y: &Matrix) -> Result<f64>;

    /// `(F^L)'(y)`. Only meaningful when [`LegendrePair::dual_gradient_gap`] is `None`.
    fn legendre_grad(&self, y: &Matrix) -> Result<Matrix>;

    /// Why `(F^L)'` does not invert `F'` for this family, if it does not.
    fn dual_gradient_gap(&self) -> Option<&'static str> {
        None
    }

    /// `(F^L)^L(x)`, which should reproduce `F(x)`.
    fn involution_value(&self, x: &Matrix) -> Result<f64>;

    fn involution_gap(&self) -> Option<&'static str> {
        None
    }

    /// Relative change of the family parameters under two dualizations.
    fn parameter_involution_residual(&self) -> Option<f64>;

    /// The scale-carrying quantity rescaled into the sampling window (`|det x|`
    /// or the largest cofactor base), and its homogeneity degree in `x`.
    fn magnitude(&self, x: &Matrix) -> Result<f64>;

    fn magnitude_degree(&self) -> i32;

    /// True when the sign of `det x` is meaningful and can be mixed by sampling.
    fn signed(&self) -> bool {
        false
    }

    /// True when `x` lies in the open set where `F`, `F'` and the transform are
    /// all defined.
    fn admits(&self, x: &Matrix) -> bool;

    /// Scale-free distance of an admissible `x` from the domain boundary, in
    /// `[0, 1]`.
    fn conditioning(&self, _x: &Matrix) -> f64 {
        1.0
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

impl LegendrePair for DetFamily {
    fn describe(&self) -> String {
        format!("{self:?}")
    }

    fn shape(&self) -> (usize, usize) {
        (self.n(), self.n())
    }

    fn eval(&self, x: &Matrix) -> Result<f64> {
        DetFamily::eval(self, x)
    }

    fn grad(&self, x: &Matrix) -> Result<Matrix> {
        DetFamily::grad(self, x)
    }

    fn legendre(&self, y: &Matrix) -> Result<f64> {
        DetFamily::legendre(self, y)
    }

    fn legendre_grad(&self, y: &Matrix) -> Result<Matrix> {
        DetFamily::legendre_grad(self, y)
    }

    fn dual_gradient_gap(&self) -> Option<&'static str> {
        matches!(self, DetFamily::DetRoot { .. })
            .then_some("dual gradient undefined (constant on manifold)")
    }

    fn involution_value(&self, x: &Matrix) -> Result<f64> {
        match self.dual() {
            DetDual::Family(d) => d.legendre(x),
            DetDual::ZeroOnManifold(_) => Err(Error::NotInvertible(
                "transform is constant on its manifold".into(),
            )),
        }
    }

    fn involution_gap(&self) -> Option<&'static str> {
        matches!(self, DetFamily::DetRoot { .. })
            .then_some("transform is identically zero on {|det y| = 1}; F is not recoverable from it")
    }

    fn parameter_involution_residual(&self) -> Option<f64> {
        let DetDual::Family(d) = self.dual() else { return None };
        let DetDual::Family(dd) = d.dual() else { return None };
        match (*self, dd) {
            (DetFamily::DetPower { p, .. }, DetFamily::DetPower { p: back, .. }) => {
                Some(rel_diff(back, p))
            }
            (DetFamily::LogDet { shift, .. }, DetFamily::LogDet { shift: back, .. }) => {
                Some((back - shift).abs() / (1.0 + shift.abs()))
            }
            _ => None,
        }
    }

    fn magnitude(&self, x: &Matrix) -> Result<f64> {
        Ok(x.det()?.abs())
    }

    fn magnitude_degree(&self) -> i32 {
        self.n() as i32
    }

    fn signed(&self) -> bool {
        true
    }

    fn admits(&self, x: &Matrix) -> bool {
        x.shape() == self.shape()
            && x.det().is_ok_and(|d| d != 0.0 && d.is_finite())
            && DetFamily::eval(self, x).is_ok_and(f64::is_finite)
    }

    /// `|det x| / prod ||row||`: 1 for orthogonal rows, 0 for dependent ones.
    fn conditioning(&self, x: &Matrix) -> f64 {
        let prod: f64 = (0..x.rows())
            .map(|n| x.row(n).iter().map(|v| v * v).sum::<f64>().sqrt())
            .product();
        match x.det() {
            Ok(d) if prod > 0.0 => d.abs() / prod,
            _ => 0.0,
        }
    }
}

impl LegendrePair for CofactorFamily {
    fn describe(&self) -> String {
        self.to_string()
    }

    fn shape(&self) -> (usize, usize) {
        CofactorFamily::shape(self)
    }

    fn eval(&self, x: &Matrix) -> Result<f64> {
        CofactorFamily::eval(self, x)
    }

    fn grad(&self, x: &Matrix) -> Result<Matrix> {
        CofactorFamily::grad(self, x)
    }

    fn legendre(&self, y: &Matrix) -> Result<f64> {
        CofactorFamily::legendre(self, y)
    }

    fn legendre_grad(&self, y: &Matrix) -> Result<Matrix> {
        match self.kind() {
            CofactorKind::AreaPower => self.dual().grad(y),
            CofactorKind::SumPower => Err(Error::NotInvertible(
                self.dual_gradient_gap().unwrap_or_default().into(),
            )),
        }
    }

    fn dual_gradient_gap(&self) -> Option<&'static str> {
        (self.kind() == CofactorKind::SumPower).then_some(
            "F' is not injective; the transform's gradient exists only along the image manifold",
        )
    }

    fn involution_value(&self, x: &Matrix) -> Result<f64> {
        match self.kind() {
            CofactorKind::AreaPower => self.dual().legendre(x),
            // a generic x is off the transform's image manifold; compare the
            // dual-of-dual family instead
            CofactorKind::SumPower => self.dual().dual().eval(x),
        }
    }

    fn parameter_involution_residual(&self) -> Option<f64> {
        let back = self.dual().dual();
        Some(
            rel_diff(back.alpha(), self.alpha())
                .max(rel_diff(back.beta(), self.beta()))
                .max(rel_diff(back.scale(), self.scale())),
        )
    }

    fn magnitude(&self, x: &Matrix) -> Result<f64> {
        Ok(self.bases(x)?.iter().fold(0.0, |m, b| m.max(b.abs())))
    }

    fn magnitude_degree(&self) -> i32 {
        2
    }

    fn admits(&self, x: &Matrix) -> bool {
        self.in_transform_domain(x)
    }

    /// Smallest base over the largest, on both `x` and `F'(x)`, when bases must
    /// stay positive.
    fn conditioning(&self, x: &Matrix) -> f64 {
        if self.alpha() == 2.0 {
            return 1.0;
        }
        let ratio = |bases: [f64; 3]| {
            let max = bases.iter().fold(0.0_f64, |m, b| m.max(b.abs()));
            let min = bases.iter().fold(f64::INFINITY, |m, b| m.min(*b));
            if max > 0.0 { (min / max).max(0.0) } else { 0.0 }
        };
        let Ok(primal) = self.bases(x) else { return 0.0 };
        let Ok(dual) = self.grad(x).and_then(|y| self.dual().bases(&y)) else { return 0.0 };
        ratio(primal).min(ratio(dual))
    }
}

/// Any supported family, as read from a JSON descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Family {
    Det(DetFamily),
    Cofactor(CofactorFamily),
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = serde_json::Value::deserialize(de)?;
        let kind = value
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| D::Error::custom("family descriptor needs a string \"kind\""))?;
        match kind {
            "detpower" | "detroot" | "logdet" => {
                serde_json::from_value(value).map(Family::Det).map_err(D::Error::custom)
            }
            "sumpower" | "areapower" => {
                serde_json::from_value(value).map(Family::Cofactor).map_err(D::Error::custom)
            }
            other => Err(D::Error::custom(format!("unknown family kind {other:?}"))),
        }
    }
}

impl Family {
    fn inner(&self) -> &dyn LegendrePair {
        match self {
            Family::Det(f) => f,
            Family::Cofactor(f) => f,
        }
    }

    /// JSON descriptor of the transform.
    pub fn dual_descriptor(&self) -> String {
        match self {
            Family::Det(f) => serde_json::to_string(&f.dual()),
            Family::Cofactor(f) => serde_json::to_string(&f.dual()),
        }
        .expect("family descriptors serialize")
    }
}

impl From<DetFamily> for Family {
    fn from(f: DetFamily) -> Self {
        Family::Det(f)
    }
}

impl From<CofactorFamily> for Family {
    fn from(f: CofactorFamily) -> Self {
        Family::Cofactor(f)
    }
}

impl LegendrePair for Family {
    fn describe(&self) -> String {
        self.inner().describe()
    }
    fn shape(&self) -> (usize, usize) {
        self.inner().shape()
    }
    fn eval(&self, x: &Matrix) -> Result<f64> {
        self.inner().eval(x)
    }
    fn grad(&self, x: &Matrix) -> Result<Matrix> {
        self.inner().grad(x)
    }
    fn legendre(&self, y: &Matrix) -> Result<f64> {
        self.inner().legendre(y)
    }
    fn legendre_grad(&self, y: &Matrix) -> Result<Matrix> {
        self.inner().legendre_grad(y)
    }
    fn dual_gradient_gap(&self) -> Option<&'static str> {
        self.inner().dual_gradient_gap()
    }
    fn involution_value(&self, x: &Matrix) -> Result<f64> {
        self.inner().involution_value(x)
    }
    fn involution_gap(&self) -> Option<&'static str> {
        self.inner().involution_gap()
    }
    fn parameter_involution_residual(&self) -> Option<f64> {
        self.inner().parameter_involution_residual()
    }
    fn magnitude(&self, x: &Matrix) -> Result<f64> {
        self.inner().magnitude(x)
    }
    fn magnitude_degree(&self) -> i32 {
        self.inner().magnitude_degree()
    }
    fn signed(&self) -> bool {
        self.inner().signed()
    }
    fn admits(&self, x: &Matrix) -> bool {
        self.inner().admits(x)
    }
    fn conditioning(&self, x: &Matrix) -> f64 {
        self.inner().conditioning(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_dispatch() {
        let f: Family = serde_json::from_str(r#"{"kind":"logdet","n":3}"#).unwrap();
        assert_eq!(f, Family::Det(DetFamily::log(3).unwrap()));
        let f: Family = serde_json::from_str(r#"{"kind":"sumpower","alpha":3,"beta":0.5}"#).unwrap();
        assert_eq!(f.shape(), (3, 3));
        let err = serde_json::from_str::<Family>(r#"{"kind":"bogus"}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"));
        assert!(serde_json::from_str::<Family>(r#"{"n":3}"#).is_err());
    }

    #[test]
    fn dual_descriptors() {
        let f = Family::from(DetFamily::power(2, 4.0).unwrap());
        assert_eq!(
            f.dual_descriptor(),
            r#"{"kind":"detpower","n":2,"p":1.3333333333333333}"#
        );
        let area = Family::from(CofactorFamily::area());
        assert_eq!(area.dual_descriptor(), r#"{"kind":"areapower","alpha":2.0,"beta":0.5}"#);
    }
}

//! Central finite differences, the reference every analytic gradient is
//! checked against.

use crate::error::Result;
use crate::linalg::Matrix;

/// Default relative step: `h = 1e-6 * (1 + |x|)` per entry.
pub const DEFAULT_REL_STEP: f64 = 1e-6;

/// Central-difference gradient of `f` at `x` with per-entry step
/// `rel_step * (1 + |x[n][k]|)`.
pub fn central_gradient<F>(f: F, x: &Matrix, rel_step: f64) -> Result<Matrix>
where
    F: Fn(&Matrix) -> Result<f64>,
{
    let mut grad = Matrix::zeros(x.rows(), x.cols());
    let mut probe = x.clone();
    for n in 0..x.rows() {
        for k in 0..x.cols() {
            let base = x.get(n, k);
            let h = rel_step * (1.0 + base.abs());
            probe.set(n, k, base + h);
            let up = f(&probe)?;
            probe.set(n, k, base - h);
            let down = f(&probe)?;
            probe.set(n, k, base);
            grad.set(n, k, (up - down) / (2.0 * h));
        }
    }
    Ok(grad)
}

/// `||analytic - numeric||_inf / (1 + ||analytic||_inf)`.
pub fn gradient_error(analytic: &Matrix, numeric: &Matrix) -> Result<f64> {
    Ok(analytic.sub(numeric)?.max_abs() / (1.0 + analytic.max_abs()))
}

//! Critical points of `Phi(x) = 1/2 (Ax, x) - (f, x) - F(x)` with
//! `F(x) = (N/p) |det x|^(p/N)` and `A` positive definite on vectorized N x N
//! matrices.
//!
//! For `p < 2` the functional is coercive and is minimized directly. For
//! `p > 2` it is unbounded below, so the solver minimizes the dual functional
//!
//! ```text
//! Psi(y) = 1/2 (Ay, y) + (f, y) - G(Ay),   G = F^L = (N/q) |det|^(q/N),
//! ```
//!
//! which is coercive because `q = p/(p-1) < 2`, and maps its minimizer back via
//! `x = y + A^-1 f`. `grad Psi(y) = Ay + f - A G'(Ay)`.
//!
//! Both paths use the same descent loop: a Newton step from a finite-difference
//! Hessian of the analytic gradient when that Hessian is positive definite,
//! otherwise the negative gradient, each followed by an Armijo backtracking
//! search. Objective decreases are computed from the step directly (the
//! determinant through [`Matrix::det_increment`]), so the line search stays
//! meaningful when the gradient is already near the stopping tolerance.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::det_transforms::{conjugate_exponent, DetFamily};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Floor on `|det|` below which steps are shrunk.
pub const DEFAULT_DET_FLOOR: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Required gap between `Phi` at the witness point and at the critical point.
pub const WITNESS_MARGIN: f64 = 1.0;

const ARMIJO_SLOPE: f64 = 1e-4;
const SHRINK: f64 = 0.5;
const MIN_STEP: f64 = 1e-20;
const HESSIAN_REL_STEP: f64 = 1e-5;
const MAX_SADDLE_ESCAPES: usize = 8;
/// Eigenvalues below `-NEGATIVE_CURVATURE_REL * max|H|` count as negative curvature.
const NEGATIVE_CURVATURE_REL: f64 = 1e-6;

/// A symmetric positive-definite form on `R^(N^2)`, acting on matrices through
/// their row-major vectorization.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "FormJson", into = "FormJson")]
pub enum QuadraticForm {
    Scaled { a: f64 },
    Dense(DenseForm),
}

#[derive(Debug, Clone)]
pub struct DenseForm {
    matrix: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum FormJson {
    Scaled { a: f64 },
    Dense { entries: Vec<Vec<f64>> },
}

impl TryFrom<FormJson> for QuadraticForm {
    type Error = Error;

    fn try_from(json: FormJson) -> Result<Self> {
        match json {
            FormJson::Scaled { a } => QuadraticForm::scaled(a),
            FormJson::Dense { entries } => {
                let m = entries.len();
                if entries.iter().any(|r| r.len() != m) {
                    return Err(Error::dim("dense form entries must be square"));
                }
                QuadraticForm::dense(DMatrix::from_fn(m, m, |i, j| entries[i][j]))
            }
        }
    }
}

impl From<QuadraticForm> for FormJson {
    fn from(form: QuadraticForm) -> Self {
        match form {
            QuadraticForm::Scaled { a } => FormJson::Scaled { a },
            QuadraticForm::Dense(d) => FormJson::Dense {
                entries: d.matrix.row_iter().map(|r| r.iter().copied().collect()).collect(),
            },
        }
    }
}

impl QuadraticForm {
    pub fn identity() -> Self {
        QuadraticForm::Scaled { a: 1.0 }
    }

    pub fn scaled(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Invalid(format!("scaled form needs a > 0, got {a}")));
        }
        Ok(QuadraticForm::Scaled { a })
    }

    /// Dense form; rejects asymmetric or non-positive-definite matrices.
    pub fn dense(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::dim("dense form must be a non-empty square matrix"));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("dense form has non-finite entries".into()));
        }
        let scale = matrix.amax().max(f64::MIN_POSITIVE);
        if (&matrix - matrix.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Invalid("dense form is not symmetric".into()));
        }
        let chol = Cholesky::new(matrix.clone())
            .ok_or_else(|| Error::Invalid("dense form is not positive definite".into()))?;
        Ok(QuadraticForm::Dense(DenseForm { matrix, chol }))
    }

    /// Side length of the vectorized space, if fixed.
    pub fn dim(&self) -> Option<usize> {
        match self {
            QuadraticForm::Scaled { .. } => None,
            QuadraticForm::Dense(d) => Some(d.matrix.nrows()),
        }
    }

    pub fn apply(&self, x: &Matrix) -> Matrix {
        match self {
            QuadraticForm::Scaled { a } => x.scale(*a),
            QuadraticForm::Dense(d) => devectorize(&(&d.matrix * vectorize(x)), x),
        }
    }

    pub fn apply_inverse(&self, x: &Matrix) -> Matrix {
        match self {
            QuadraticForm::Scaled { a } => x.scale(1.0 / a),
            QuadraticForm::Dense(d) => devectorize(&d.chol.solve(&vectorize(x)), x),
        }
    }

    /// `(Ax, x)`.
    pub fn quad(&self, x: &Matrix) -> f64 {
        self.apply(x).pairing(x).expect("same shape")
    }
}

fn vectorize(x: &Matrix) -> DVector<f64> {
    DVector::from_column_slice(x.as_slice())
}

fn devectorize(v: &DVector<f64>, like: &Matrix) -> Matrix {
    Matrix::from_fn(like.rows(), like.cols(), |n, k| v[n * like.cols() + k])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ProblemJson", into = "ProblemJson")]
pub struct Problem {
    n: usize,
    p: f64,
    a: QuadraticForm,
    f: Matrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemJson {
    n: usize,
    p: f64,
    #[serde(rename = "A")]
    a: QuadraticForm,
    f: Matrix,
}

impl TryFrom<ProblemJson> for Problem {
    type Error = Error;

    fn try_from(json: ProblemJson) -> Result<Self> {
        Problem::new(json.n, json.p, json.a, json.f)
    }
}

impl From<Problem> for ProblemJson {
    fn from(prob: Problem) -> Self {
        ProblemJson { n: prob.n, p: prob.p, a: prob.a, f: prob.f }
    }
}

impl Problem {
    pub fn new(n: usize, p: f64, a: QuadraticForm, f: Matrix) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid(format!("N must be at least 2, got {n}")));
        }
        if !p.is_finite() || p == 0.0 || p == 1.0 || p == 2.0 {
            return Err(Error::Invalid(format!("p = {p} must be finite and not 0, 1 or 2")));
        }
        if f.shape() != (n, n) {
            return Err(Error::dim(format!("f must be {n}x{n}, got {}x{}", f.rows(), f.cols())));
        }
        if let Some(m) = a.dim() {
            if m != n * n {
                return Err(Error::dim(format!("dense form must be {0}x{0}, got {m}x{m}", n * n)));
            }
        }
        Ok(Problem { n, p, a, f })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.a
    }

    pub fn f(&self) -> &Matrix {
        &self.f
    }

    /// Dual exponent `q = p/(p-1)`.
    pub fn q(&self) -> f64 {
        conjugate_exponent(self.p)
    }

    fn family(&self) -> DetFamily {
        DetFamily::DetPower { n: self.n, p: self.p }
    }

    fn dual_family(&self) -> DetFamily {
        DetFamily::DetPower { n: self.n, p: self.q() }
    }

    fn check_shape(&self, x: &Matrix) -> Result<()> {
        if x.shape() != (self.n, self.n) {
            return Err(Error::dim(format!(
                "expected {n}x{n}, got {}x{}",
                x.rows(),
                x.cols(),
                n = self.n
            )));
        }
        Ok(())
    }

    /// `Phi(x) = 1/2 (Ax, x) - (N/p)|det x|^(p/N) - (f, x)`.
    pub fn primal_objective(&self, x: &Matrix) -> Result<f64> {
        self.check_shape(x)?;
        Ok(0.5 * self.a.quad(x) - self.family().eval(x)? - self.f.pairing(x)?)
    }

    /// `Ax - f - F'(x)`.
    pub fn primal_gradient(&self, x: &Matrix) -> Result<Matrix> {
        self.check_shape(x)?;
        let fp = power_grad(&self.family(), x)?;
        self.a.apply(x).sub(&self.f)?.sub(&fp)
    }

    /// `Psi(y) = 1/2 (Ay, y) + (f, y) - (N/q)|det(Ay)|^(q/N)`; requires `p > 2`.
    pub fn dual_objective(&self, y: &Matrix) -> Result<f64> {
        self.require_dual()?;
        self.check_shape(y)?;
        let ay = self.a.apply(y);
        Ok(0.5 * ay.pairing(y)? + self.f.pairing(y)? - self.dual_family().eval(&ay)?)
    }

    /// `Ay + f - A G'(Ay)`.
    pub fn dual_gradient(&self, y: &Matrix) -> Result<Matrix> {
        self.require_dual()?;
        self.check_shape(y)?;
        let ay = self.a.apply(y);
        let inner = self.a.apply(&self.dual_family().grad(&ay)?);
        ay.add(&self.f)?.sub(&inner)
    }

    /// `x = y + A^-1 f`.
    pub fn recover_primal(&self, y: &Matrix) -> Result<Matrix> {
        y.add(&self.a.apply_inverse(&self.f))
    }

    fn require_dual(&self) -> Result<()> {
        if self.p <= 2.0 {
            return Err(Error::Invalid(format!("the dual functional needs p > 2, got {}", self.p)));
        }
        Ok(())
    }
}

/// `F'(x)` for a power family, extended by 0 at `det x = 0` when `p > N`.
fn power_grad(fam: &DetFamily, x: &Matrix) -> Result<Matrix> {
    let DetFamily::DetPower { n, p } = *fam else { return fam.grad(x) };
    if x.det()? == 0.0 && p > n as f64 {
        return Ok(Matrix::zeros(n, n));
    }
    fam.grad(x)
}

/// `F(z + dz) - F(z)` for a power family, without cancellation when the
/// determinant keeps its sign.
fn power_increment(fam: &DetFamily, z: &Matrix, dz: &Matrix) -> Result<f64> {
    let DetFamily::DetPower { n, p } = *fam else {
        return Err(Error::Invalid("power family expected".into()));
    };
    let t = z.det()?;
    let delta = z.det_increment(dz)?;
    let ratio = delta / t;
    if t != 0.0 && ratio > -1.0 {
        let e = p / n as f64;
        Ok(fam.eval(z)? * (e * ratio.ln_1p()).exp_m1())
    } else {
        Ok(fam.phi(t + delta)? - fam.phi(t)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Gradient stopping tolerance; `None` means `1e-9 (1 + ||f||_inf)`.
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// Newton steps and negative-curvature escapes; plain gradient descent when false.
    pub newton: bool,
    pub det_floor: f64,
    /// Bound on the recovered primal residual for the dual path.
    pub transfer_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: None,
            max_iter: DEFAULT_MAX_ITER,
            newton: true,
            det_floor: DEFAULT_DET_FLOOR,
            transfer_tol: 1e-6,
        }
    }
}

impl SolverOptions {
    pub fn tolerance(&self, prob: &Problem) -> f64 {
        self.tol.unwrap_or(1e-9 * (1.0 + prob.f.max_abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolvePath {
    Primal,
    Dual,
}

/// A point along `t * direction` where `Phi` falls below its value at the
/// critical point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonminimalityWitness {
    pub direction: Matrix,
    pub step: f64,
    pub value: f64,
    pub critical_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub path: SolvePath,
    pub x_star: Matrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_star: Option<Matrix>,
    /// `||Ax - f - F'(x)||_inf` at `x_star`.
    pub primal_residual: f64,
    /// `||grad Psi||_inf` at `y_star`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_residual: Option<f64>,
    pub iterations: usize,
    pub newton_steps: usize,
    /// Steps taken along negative curvature after reaching a saddle.
    pub saddle_escapes: usize,
    /// Objective of the minimized functional per accepted iterate, anchored at
    /// the start value and accumulated from the computed decreases.
    pub objective_trace: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonminimality_witness: Option<NonminimalityWitness>,
    /// Bound that `primal_residual` is held to.
    pub tolerance: f64,
    pub success: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Dispatches on `p`: direct minimization for `p < 2`, dual for `p > 2`.
pub fn solve(prob: &Problem, opts: &SolverOptions) -> Result<SolveResult> {
    if prob.p < 2.0 {
        solve_coercive(prob, opts)
    } else {
        solve_dual(prob, opts)
    }
}

/// Minimizes `Phi` for `p < 2` from the identity.
pub fn solve_coercive(prob: &Problem, opts: &SolverOptions) -> Result<SolveResult> {
    if prob.p >= 2.0 {
        return Err(Error::Invalid(format!("direct minimization needs p < 2, got {}", prob.p)));
    }
    let tol = opts.tolerance(prob);
    let fam = prob.family();
    let guard_det = prob.p <= prob.n as f64;
    let objective = Objective {
        value: &|x| prob.primal_objective(x),
        grad: &|x| prob.primal_gradient(x),
        decrease: &|x, d| {
            let ad = prob.a.apply(d);
            let quad = ad.pairing(x)? + 0.5 * ad.pairing(d)?;
            Ok(quad - prob.f.pairing(d)? - power_increment(&fam, x, d)?)
        },
        admissible: &|x| !guard_det || x.det().is_ok_and(|t| t.abs() >= opts.det_floor),
    };
    let run = minimize(&objective, Matrix::identity(prob.n), tol, opts)?;
    let primal_residual = prob.primal_gradient(&run.point)?.max_abs();
    Ok(SolveResult {
        path: SolvePath::Primal,
        success: primal_residual <= tol,
        x_star: run.point,
        y_star: None,
        primal_residual,
        dual_residual: None,
        iterations: run.iterations,
        newton_steps: run.newton_steps,
        saddle_escapes: run.saddle_escapes,
        objective_trace: run.trace,
        nonminimality_witness: None,
        tolerance: tol,
        warnings: Vec::new(),
    })
}

/// Minimizes `Psi` for `p > 2`, recovers `x = y + A^-1 f`, and checks the
/// recovered point against the primal critical-point equation.
pub fn solve_dual(prob: &Problem, opts: &SolverOptions) -> Result<SolveResult> {
    prob.require_dual()?;
    let tol = opts.tolerance(prob);
    let dual = prob.dual_family();
    let objective = Objective {
        value: &|y| prob.dual_objective(y),
        grad: &|y| prob.dual_gradient(y),
        decrease: &|y, d| {
            let ad = prob.a.apply(d);
            let quad = ad.pairing(y)? + 0.5 * ad.pairing(d)?;
            Ok(quad + prob.f.pairing(d)? - power_increment(&dual, &prob.a.apply(y), &ad)?)
        },
        admissible: &|y| prob.a.apply(y).det().is_ok_and(|t| t.abs() >= opts.det_floor),
    };
    let mut start = Matrix::identity(prob.n);
    if !(objective.admissible)(&start) {
        start = prob.a.apply_inverse(&start);
    }
    let run = minimize(&objective, start, tol, opts)?;
    let y = run.point;
    let x = prob.recover_primal(&y)?;
    let primal_residual = prob.primal_gradient(&x)?.max_abs();
    let dual_residual = prob.dual_gradient(&y)?.max_abs();

    let mut warnings = Vec::new();
    let det_ay = prob.a.apply(&y).det()?;
    if det_ay.abs() < 2.0 * opts.det_floor {
        warnings.push(format!("degenerate solution: |det(Ay)| = {:e}", det_ay.abs()));
    }
    let witness = nonminimality_witness(prob, &x)?;
    if witness.is_none() {
        warnings.push("no nonminimality witness found along the identity ray".into());
    }
    Ok(SolveResult {
        path: SolvePath::Dual,
        success: primal_residual <= opts.transfer_tol,
        x_star: x,
        y_star: Some(y),
        primal_residual,
        dual_residual: Some(dual_residual),
        iterations: run.iterations,
        newton_steps: run.newton_steps,
        saddle_escapes: run.saddle_escapes,
        objective_trace: run.trace,
        nonminimality_witness: witness,
        tolerance: opts.transfer_tol,
        warnings,
    })
}

/// Scans `Phi(t I)` over `t = 1, 2, 4, ...` for a value at least
/// [`WITNESS_MARGIN`] below `Phi(x_star)`.
pub fn nonminimality_witness(prob: &Problem, x_star: &Matrix) -> Result<Option<NonminimalityWitness>> {
    let critical_value = prob.primal_objective(x_star)?;
    let direction = Matrix::identity(prob.n);
    let mut step = 1.0;
    for _ in 0..64 {
        let value = prob.primal_objective(&direction.scale(step))?;
        if value < critical_value - WITNESS_MARGIN {
            return Ok(Some(NonminimalityWitness { direction, step, value, critical_value }));
        }
        step *= 2.0;
    }
    Ok(None)
}

type Value<'a> = &'a (dyn Fn(&Matrix) -> Result<f64> + 'a);
type Grad<'a> = &'a (dyn Fn(&Matrix) -> Result<Matrix> + 'a);
type Decrease<'a> = &'a (dyn Fn(&Matrix, &Matrix) -> Result<f64> + 'a);
type Admissible<'a> = &'a (dyn Fn(&Matrix) -> bool + 'a);

struct Objective<'a> {
    value: Value<'a>,
    grad: Grad<'a>,
    /// `value(z + d) - value(z)`, computed without cancellation.
    decrease: Decrease<'a>,
    admissible: Admissible<'a>,
}

struct Run {
    point: Matrix,
    iterations: usize,
    newton_steps: usize,
    saddle_escapes: usize,
    trace: Vec<f64>,
}

fn minimize(obj: &Objective, start: Matrix, tol: f64, opts: &SolverOptions) -> Result<Run> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    if !(obj.admissible)(&start) {
        return Err(Error::domain("start point is below the determinant floor"));
    }
    let mut z = start;
    let mut g = (obj.grad)(&z)?;
    let mut trace = vec![(obj.value)(&z)?];
    let mut gd_step = 1.0;
    let mut newton_steps = 0;
    let mut saddle_escapes = 0;

    for iteration in 0..=opts.max_iter {
        let gnorm = g.max_abs();
        let mut accepted = None;
        if gnorm <= tol {
            if opts.newton && saddle_escapes < MAX_SADDLE_ESCAPES {
                accepted = escape_saddle(obj, &z, &g);
            }
            if accepted.is_none() {
                return Ok(Run { point: z, iterations: iteration, newton_steps, saddle_escapes, trace });
            }
            saddle_escapes += 1;
        }
        if iteration == opts.max_iter {
            break;
        }
        if accepted.is_none() && opts.newton {
            if let Some(d) = fd_hessian(obj, &z).and_then(|h| newton_direction(h, &z, &g)) {
                accepted = line_search(obj, &z, &g, &d, 1.0)?;
                newton_steps += usize::from(accepted.is_some());
            }
        }
        if accepted.is_none() {
            let d = g.scale(-1.0);
            accepted = line_search(obj, &z, &g, &d, gd_step)?;
            if let Some((_, alpha, _)) = &accepted {
                gd_step = (alpha * 2.0).min(1e6);
            }
        }
        let Some((next, _, decrease)) = accepted else {
            return Err(Error::NoConvergence { iterations: iteration, gradient_norm: gnorm, best: Box::new(z) });
        };
        z = next;
        g = (obj.grad)(&z)?;
        trace.push(trace.last().copied().unwrap_or(0.0) + decrease);
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, gradient_norm: g.max_abs(), best: Box::new(z) })
}

/// Armijo backtracking along `d`; returns the new point, the step and the
/// (negative) objective change.
fn line_search(
    obj: &Objective,
    z: &Matrix,
    g: &Matrix,
    d: &Matrix,
    initial: f64,
) -> Result<Option<(Matrix, f64, f64)>> {
    let slope = g.pairing(d)?;
    if slope.is_nan() || slope >= 0.0 {
        return Ok(None);
    }
    Ok(backtrack(obj, z, d, initial, |alpha| ARMIJO_SLOPE * alpha * slope))
}

/// Shrinks the step along `d` until the objective change is negative and below
/// `bound(alpha)`.
fn backtrack(
    obj: &Objective,
    z: &Matrix,
    d: &Matrix,
    initial: f64,
    bound: impl Fn(f64) -> f64,
) -> Option<(Matrix, f64, f64)> {
    let mut alpha = initial;
    while alpha >= MIN_STEP {
        let step = d.scale(alpha);
        if let Ok(next) = z.add(&step) {
            if (obj.admissible)(&next) {
                if let Ok(change) = (obj.decrease)(z, &step) {
                    if change.is_finite() && change < 0.0 && change <= bound(alpha) {
                        return Some((next, alpha, change));
                    }
                }
            }
        }
        alpha *= SHRINK;
    }
    None
}

/// At a stationary point with a clearly negative Hessian eigenvalue `lambda`,
/// a step along the unit eigenvector that decreases the objective by at least
/// `|lambda| alpha^2 / 4 * ARMIJO_SLOPE`.
fn escape_saddle(obj: &Objective, z: &Matrix, g: &Matrix) -> Option<(Matrix, f64, f64)> {
    let h = fd_hessian(obj, z)?;
    let scale = h.amax();
    let eig = h.symmetric_eigen();
    let (idx, &lambda) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
    if lambda.is_nan() || lambda >= -NEGATIVE_CURVATURE_REL * scale {
        return None;
    }
    let mut d = devectorize(&eig.eigenvectors.column(idx).into_owned(), z);
    if g.pairing(&d).ok()? > 0.0 {
        d = d.scale(-1.0);
    }
    let step = 1.0 + z.max_abs();
    backtrack(obj, z, &d, step, |alpha| 0.25 * ARMIJO_SLOPE * lambda * alpha * alpha)
}

/// Symmetrized central-difference Jacobian of the gradient on the row-major
/// vectorization of `z`.
fn fd_hessian(obj: &Objective, z: &Matrix) -> Option<DMatrix<f64>> {
    let m = z.rows() * z.cols();
    let mut h = DMatrix::<f64>::zeros(m, m);
    let mut probe = z.clone();
    for j in 0..m {
        let (n, k) = (j / z.cols(), j % z.cols());
        let base = z.get(n, k);
        let step = HESSIAN_REL_STEP * (1.0 + base.abs());
        probe.set(n, k, base + step);
        let up = (obj.grad)(&probe).ok()?;
        probe.set(n, k, base - step);
        let down = (obj.grad)(&probe).ok()?;
        probe.set(n, k, base);
        for (i, (u, d)) in up.as_slice().iter().zip(down.as_slice()).enumerate() {
            h[(i, j)] = (u - d) / (2.0 * step);
        }
    }
    let h = (&h + h.transpose()) * 0.5;
    h.iter().all(|v| v.is_finite()).then_some(h)
}

/// `-H^-1 g` when `H` is positive definite.
fn newton_direction(h: DMatrix<f64>, z: &Matrix, g: &Matrix) -> Option<Matrix> {
    let d = Cholesky::new(h)?.solve(&vectorize(g));
    if d.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(devectorize(&d, z).scale(-1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(p: f64, f: f64) -> Problem {
        Problem::new(2, p, QuadraticForm::identity(), Matrix::identity(2).scale(f)).unwrap()
    }

    #[test]
    fn objective_fixtures() {
        let prob = problem(4.0, 0.0);
        assert_eq!(prob.primal_objective(&Matrix::zeros(2, 2)).unwrap(), 0.0);
        let x = Matrix::diag(&[2.0, 1.0]);
        assert!((prob.primal_objective(&x).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(prob.dual_objective(&Matrix::zeros(2, 2)).unwrap(), 0.0);
    }

    #[test]
    fn problem_validation() {
        let f = Matrix::zeros(2, 2);
        assert!(Problem::new(2, 2.0, QuadraticForm::identity(), f.clone()).is_err());
        assert!(Problem::new(1, 4.0, QuadraticForm::identity(), f.clone()).is_err());
        assert!(Problem::new(3, 4.0, QuadraticForm::identity(), f.clone()).is_err());
        assert!(QuadraticForm::scaled(0.0).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(QuadraticForm::dense(asym).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(QuadraticForm::dense(indefinite).is_err());
    }

    #[test]
    fn increment_matches_direct_difference() {
        let fam = DetFamily::power(2, 1.5).unwrap();
        let z = Matrix::from_rows(&[vec![1.2, 0.3], vec![-0.4, 0.9]]).unwrap();
        let dz = Matrix::from_rows(&[vec![0.1, -0.2], vec![0.05, 0.3]]).unwrap();
        let direct = fam.eval(&z.add(&dz).unwrap()).unwrap() - fam.eval(&z).unwrap();
        assert!((power_increment(&fam, &z, &dz).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn dense_identity_matches_scaled() {
        let dense = QuadraticForm::dense(DMatrix::identity(4, 4) * 2.0).unwrap();
        let f = Matrix::identity(2).scale(0.1);
        let a = Problem::new(2, 4.0, dense, f.clone()).unwrap();
        let b = Problem::new(2, 4.0, QuadraticForm::scaled(2.0).unwrap(), f).unwrap();
        let y = Matrix::from_rows(&[vec![0.7, 0.1], vec![0.2, 0.8]]).unwrap();
        assert!((a.dual_objective(&y).unwrap() - b.dual_objective(&y).unwrap()).abs() < 1e-14);
        assert_eq!(a.recover_primal(&y).unwrap(), b.recover_primal(&y).unwrap());
    }

    #[test]
    fn problem_json_roundtrip() {
        let json = r#"{"n":2,"p":4.0,"A":{"kind":"scaled","a":1.0},"f":{"rows":2,"cols":2,"entries":[[0.1,0.0],[0.0,0.1]]}}"#;
        let prob: Problem = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&prob).unwrap(), json);
        let extra = json.replace("\"n\":2", "\"n\":2,\"extra\":1");
        assert!(serde_json::from_str::<Problem>(&extra).is_err());
    }
}

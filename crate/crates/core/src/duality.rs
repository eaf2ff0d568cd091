//! Numerical verification of a Legendre pair: seeded sampling, round-trip,
//! gradient-inversion, involution and finite-difference checks, aggregated
//! into a [`DualityReport`].
//!
//! Sample `i` comes from its own ChaCha stream (`seed`, stream `i`), and every
//! check writes one outcome per sample before reducing in index order, so a
//! report is bit-identical however many threads evaluated it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{central_gradient, gradient_error, DEFAULT_REL_STEP};
use crate::family::{Family, LegendrePair};
use crate::linalg::Matrix;

const MAX_ATTEMPTS: usize = 100;

/// Draws closer than this to the domain boundary (see
/// [`LegendrePair::conditioning`]) are redrawn rather than rescaled.
pub const MIN_CONDITIONING: f64 = 1e-3;

/// Steps used for the finite-difference step sweep.
pub const STEP_SWEEP: [f64; 3] = [1e-4, 1e-6, 1e-8];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub family: Family,
    pub count: usize,
    pub seed: u64,
    /// Window for `|det x|` (or the largest cofactor base) after rescaling.
    pub det_window: (f64, f64),
    /// Fraction of samples with negative determinant (determinant families only).
    pub sign_mix: f64,
}

impl SampleSpec {
    /// `det_window = (0.1, 10)`, `sign_mix = 0.5`.
    pub fn new(family: impl Into<Family>, count: usize, seed: u64) -> Self {
        SampleSpec { family: family.into(), count, seed, det_window: (0.1, 10.0), sign_mix: 0.5 }
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.det_window = (lo, hi);
        self
    }

    pub fn with_sign_mix(mut self, sign_mix: f64) -> Self {
        self.sign_mix = sign_mix;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.det_window;
        if self.count < 1 {
            return Err(Error::Invalid("sample count must be at least 1".into()));
        }
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::Invalid(format!("det window ({lo}, {hi}) must satisfy 0 < lo < hi")));
        }
        if !(0.0..=1.0).contains(&self.sign_mix) {
            return Err(Error::Invalid(format!("sign mix {} outside [0, 1]", self.sign_mix)));
        }
        Ok(())
    }
}

/// Draws `spec.count` admissible matrices, deterministic in `spec.seed`.
pub fn sample_matrices(spec: &SampleSpec) -> Result<Vec<Matrix>> {
    spec.validate()?;
    (0..spec.count).into_par_iter().map(|i| sample_one(spec, i)).collect()
}

fn sample_one(spec: &SampleSpec, index: usize) -> Result<Matrix> {
    let family = &spec.family;
    let (rows, cols) = family.shape();
    let (lo, hi) = spec.det_window;
    let degree = family.magnitude_degree();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);

    for _ in 0..MAX_ATTEMPTS {
        let draw = Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..=1.0));
        let target = (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp();
        let want_negative = rng.random::<f64>() < spec.sign_mix;

        if !family.admits(&draw) {
            continue;
        }
        if family.conditioning(&draw) < MIN_CONDITIONING {
            continue;
        }
        let Ok(magnitude) = family.magnitude(&draw) else { continue };
        if !(magnitude > 0.0 && magnitude.is_finite()) {
            continue;
        }
        let t = (target / magnitude).powf(1.0 / degree as f64);
        let mut x = draw.scale(t);
        if family.signed() {
            let negative = x.det()? < 0.0;
            if negative != want_negative {
                for k in 0..cols {
                    x.set(0, k, -x.get(0, k));
                }
            }
        }
        let m = family.magnitude(&x)?;
        let slack = 1e-12;
        if family.admits(&x) && m >= lo * (1.0 - slack) && m <= hi * (1.0 + slack) {
            return Ok(x);
        }
    }
    Err(Error::Sampling(format!(
        "sample {index}: no admissible draw for {} after {MAX_ATTEMPTS} attempts",
        family.describe()
    )))
}

/// Pass thresholds, one per check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub roundtrip: f64,
    pub gradient_inverse: f64,
    pub involution: f64,
    pub involution_parameters: f64,
    pub gradient_fd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            roundtrip: 1e-8,
            gradient_inverse: 1e-6,
            involution: 1e-10,
            involution_parameters: 1e-12,
            gradient_fd: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepError {
    pub step: f64,
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub max_residual: f64,
    pub mean_residual: f64,
    /// Index of the sample with the largest residual.
    pub worst_sample: Option<usize>,
    pub tolerance: f64,
    pub evaluated: usize,
    /// Samples outside the family's domain.
    pub skipped: usize,
    /// Samples inside the domain whose evaluation failed.
    pub errors: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
    /// Set when the check does not apply to the family at all.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub step_sweep: Vec<StepError>,
}

impl CheckEntry {
    fn not_applicable(name: &str, tolerance: f64, reason: &str) -> Self {
        CheckEntry {
            name: name.into(),
            max_residual: 0.0,
            mean_residual: 0.0,
            worst_sample: None,
            tolerance,
            evaluated: 0,
            skipped: 0,
            errors: 0,
            pass: true,
            first_error: None,
            skip_reason: Some(reason.into()),
            step_sweep: Vec::new(),
        }
    }

    pub fn is_skipped(&self) -> bool {
        self.skip_reason.is_some()
    }
}

enum Outcome {
    Value(f64),
    Skipped,
    Failed(String),
}

/// Evaluates `residual` on every admissible sample and reduces in index order.
pub fn run_check<P, F>(name: &str, pair: &P, samples: &[Matrix], tolerance: f64, residual: F) -> CheckEntry
where
    P: LegendrePair + ?Sized,
    F: Fn(&Matrix) -> Result<f64> + Sync,
{
    let outcomes: Vec<Outcome> = samples
        .par_iter()
        .map(|x| {
            if !pair.admits(x) {
                return Outcome::Skipped;
            }
            match residual(x) {
                Ok(r) if r.is_finite() => Outcome::Value(r),
                Ok(r) => Outcome::Failed(format!("non-finite residual {r}")),
                Err(e) => Outcome::Failed(e.to_string()),
            }
        })
        .collect();

    let mut entry = CheckEntry {
        name: name.into(),
        max_residual: 0.0,
        mean_residual: 0.0,
        worst_sample: None,
        tolerance,
        evaluated: 0,
        skipped: 0,
        errors: 0,
        pass: false,
        first_error: None,
        skip_reason: None,
        step_sweep: Vec::new(),
    };
    let mut sum = 0.0;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Outcome::Value(r) => {
                entry.evaluated += 1;
                sum += r;
                if entry.worst_sample.is_none() || r > entry.max_residual {
                    entry.max_residual = r;
                    entry.worst_sample = Some(i);
                }
            }
            Outcome::Skipped => entry.skipped += 1,
            Outcome::Failed(msg) => {
                entry.errors += 1;
                entry.first_error.get_or_insert(format!("sample {i}: {msg}"));
            }
        }
    }
    if entry.evaluated > 0 {
        entry.mean_residual = sum / entry.evaluated as f64;
    }
    entry.pass = entry.evaluated > 0 && entry.errors == 0 && entry.max_residual <= tolerance;
    entry
}

/// `|F^L(F'(x)) - (<x, F'(x)> - F(x))| / (1 + |F(x)|)`.
pub fn roundtrip_residual<P: LegendrePair + ?Sized>(pair: &P, x: &Matrix) -> Result<f64> {
    let f = pair.eval(x)?;
    let y = pair.grad(x)?;
    let expected = x.pairing(&y)? - f;
    Ok((pair.legendre(&y)? - expected).abs() / (1.0 + f.abs()))
}

/// `||(F^L)'(F'(x)) - x||_inf / (1 + ||x||_inf)`.
pub fn gradient_inverse_residual<P: LegendrePair + ?Sized>(pair: &P, x: &Matrix) -> Result<f64> {
    let back = pair.legendre_grad(&pair.grad(x)?)?;
    Ok(back.sub(x)?.max_abs() / (1.0 + x.max_abs()))
}

/// `|(F^L)^L(x) - F(x)| / (1 + |F(x)|)`.
pub fn involution_residual<P: LegendrePair + ?Sized>(pair: &P, x: &Matrix) -> Result<f64> {
    let f = pair.eval(x)?;
    Ok((pair.involution_value(x)? - f).abs() / (1.0 + f.abs()))
}

/// Finite-difference error of `F'` at `x`, and of `(F^L)'` at `F'(x)` when the
/// transform has a gradient.
pub fn gradient_fd_residual<P: LegendrePair + ?Sized>(pair: &P, x: &Matrix, rel_step: f64) -> Result<f64> {
    let g = pair.grad(x)?;
    let fd = central_gradient(|m| pair.eval(m), x, rel_step)?;
    let mut err = gradient_error(&g, &fd)?;
    if pair.dual_gradient_gap().is_none() {
        let dg = pair.legendre_grad(&g)?;
        let dfd = central_gradient(|m| pair.legendre(m), &g, rel_step)?;
        err = err.max(gradient_error(&dg, &dfd)?);
    }
    Ok(err)
}

pub fn check_roundtrip<P: LegendrePair + ?Sized>(pair: &P, samples: &[Matrix], tol: f64) -> CheckEntry {
    run_check("roundtrip", pair, samples, tol, |x| roundtrip_residual(pair, x))
}

pub fn check_gradient_inverse<P: LegendrePair + ?Sized>(pair: &P, samples: &[Matrix], tol: f64) -> CheckEntry {
    const NAME: &str = "gradient_inverse";
    match pair.dual_gradient_gap() {
        Some(reason) => CheckEntry::not_applicable(NAME, tol, reason),
        None => run_check(NAME, pair, samples, tol, |x| gradient_inverse_residual(pair, x)),
    }
}

pub fn check_involution<P: LegendrePair + ?Sized>(pair: &P, samples: &[Matrix], tol: f64) -> CheckEntry {
    const NAME: &str = "involution";
    match pair.involution_gap() {
        Some(reason) => CheckEntry::not_applicable(NAME, tol, reason),
        None => run_check(NAME, pair, samples, tol, |x| involution_residual(pair, x)),
    }
}

pub fn check_involution_parameters<P: LegendrePair + ?Sized>(pair: &P, tol: f64) -> CheckEntry {
    const NAME: &str = "involution_parameters";
    match pair.parameter_involution_residual() {
        None => CheckEntry::not_applicable(NAME, tol, "family has no parametric transform"),
        Some(r) => CheckEntry {
            name: NAME.into(),
            max_residual: r,
            mean_residual: r,
            worst_sample: None,
            tolerance: tol,
            evaluated: 1,
            skipped: 0,
            errors: 0,
            pass: r.is_finite() && r <= tol,
            first_error: None,
            skip_reason: None,
            step_sweep: Vec::new(),
        },
    }
}

/// Finite-difference check at the default step, plus the error at each step
/// of [`STEP_SWEEP`] (primal gradient only).
pub fn check_gradients_fd<P: LegendrePair + ?Sized>(pair: &P, samples: &[Matrix], tol: f64) -> CheckEntry {
    let mut entry = run_check("gradients_fd", pair, samples, tol, |x| {
        gradient_fd_residual(pair, x, DEFAULT_REL_STEP)
    });
    entry.step_sweep = STEP_SWEEP
        .iter()
        .map(|&step| {
            let sweep = run_check("sweep", pair, samples, f64::INFINITY, |x| {
                let g = pair.grad(x)?;
                gradient_error(&g, &central_gradient(|m| pair.eval(m), x, step)?)
            });
            StepError { step, max_error: sweep.max_residual }
        })
        .collect();
    entry
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub config: SampleSpec,
    pub tolerances: Tolerances,
    /// Number of samples with `det x < 0` (determinant families).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negative_samples: Option<usize>,
    pub checks: Vec<CheckEntry>,
    pub overall: bool,
}

impl DualityReport {
    pub fn check(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Samples per `spec` and runs every check.
pub fn verify(spec: &SampleSpec, tol: &Tolerances) -> Result<DualityReport> {
    let samples = sample_matrices(spec)?;
    Ok(verify_samples(spec, &samples, tol))
}

pub fn verify_samples(spec: &SampleSpec, samples: &[Matrix], tol: &Tolerances) -> DualityReport {
    let pair = &spec.family;
    let checks = vec![
        check_roundtrip(pair, samples, tol.roundtrip),
        check_gradient_inverse(pair, samples, tol.gradient_inverse),
        check_involution(pair, samples, tol.involution),
        check_involution_parameters(pair, tol.involution_parameters),
        check_gradients_fd(pair, samples, tol.gradient_fd),
    ];
    let negative_samples = pair
        .signed()
        .then(|| samples.iter().filter(|x| x.det().is_ok_and(|d| d < 0.0)).count());
    let overall = checks.iter().all(|c| c.pass);
    DualityReport { config: *spec, tolerances: *tol, negative_samples, checks, overall }
}

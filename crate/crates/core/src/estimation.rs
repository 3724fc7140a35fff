//! Empirical risk, its gradient, and the quasi-Newton fitting routine.
//!
//! The objective is in general non-convex (only the maximum-likelihood loss
//! with the logit link is convex), so `fit` runs a BFGS iteration with
//! Armijo backtracking from each of several initializers — by default the
//! zero vector, plus the maximum-likelihood estimate when fitting a
//! divergence loss — and keeps the lowest-risk outcome. Everything is
//! deterministic given the inputs and options.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::TruthModel;
use crate::error::{Error, Result};
use crate::links::Link;
use crate::losses::{self, LossSpec};
use crate::model::{self, Dataset, ParameterVector};
use crate::numeric::{dot, inf_norm};

const MAX_BACKTRACKS: u32 = 60;

/// Optimizer controls.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Infinity-norm threshold on the risk gradient.
    pub gradient_tolerance: f64,
    /// Relative decrease of the risk below which the iteration is declared
    /// converged.
    pub risk_relative_tolerance: f64,
    /// Starting points; `None` selects the default multi-start (zero vector,
    /// plus the maximum-likelihood fit when the loss is not `ml`).
    pub initializers: Option<Vec<ParameterVector>>,
    /// Backtracking shrink factor in (0, 1).
    pub line_search_shrink: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo_constant: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 500,
            gradient_tolerance: 1e-8,
            risk_relative_tolerance: 1e-10,
            initializers: None,
            line_search_shrink: 0.5,
            armijo_constant: 1e-4,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be >= 1".into()));
        }
        if !(self.gradient_tolerance > 0.0) || !(self.risk_relative_tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if !(self.line_search_shrink > 0.0 && self.line_search_shrink < 1.0) {
            return Err(Error::InvalidParameter(
                "line_search_shrink must lie in (0, 1)".into(),
            ));
        }
        if !(self.armijo_constant > 0.0 && self.armijo_constant < 1.0) {
            return Err(Error::InvalidParameter(
                "armijo_constant must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Terminal state of a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStatus {
    /// Gradient tolerance met, or the risk stopped decreasing relative to
    /// `risk_relative_tolerance` after at least one accepted step.
    Converged,
    /// Iteration or line-search budget exhausted before convergence.
    MaxIterations,
    /// No line-search step was ever accepted from the winning initializer.
    StalledAtInitial,
    /// The risk was non-finite at every initializer.
    NumericalFailure,
}

impl FitStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FitStatus::Converged => "converged",
            FitStatus::MaxIterations => "max_iterations",
            FitStatus::StalledAtInitial => "stalled_at_initial",
            FitStatus::NumericalFailure => "numerical_failure",
        }
    }

    /// Whether a Monte Carlo replicate with this status counts as a failure.
    pub fn is_failure(self) -> bool {
        !matches!(self, FitStatus::Converged)
    }
}

/// Result of a fit: the estimate and how it was reached.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub theta_hat: ParameterVector,
    pub final_risk: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub status: FitStatus,
    /// Index into the initializer list of the winning start.
    pub initializer_used: usize,
}

/// Empirical risk `(1/n)·Σ_i Ψ(Y_i, θᵀx̃_i)`.
pub fn empirical_risk(
    spec: LossSpec,
    link: Link,
    theta: &ParameterVector,
    data: &Dataset,
) -> Result<f64> {
    check_dims(theta, data)?;
    let mut acc = 0.0;
    for (x, y) in data.rows() {
        let z = model::linear_predictor(theta, x)?;
        acc += losses::loss(spec, link, y, z)?;
    }
    Ok(acc / data.n() as f64)
}

/// Gradient of the empirical risk: `(1/n)·Σ_i ψ(Y_i, θᵀx̃_i)·x̃_i`.
pub fn risk_gradient(
    spec: LossSpec,
    link: Link,
    theta: &ParameterVector,
    data: &Dataset,
) -> Result<Vec<f64>> {
    check_dims(theta, data)?;
    let mut grad = vec![0.0; theta.len()];
    for (x, y) in data.rows() {
        let z = model::linear_predictor(theta, x)?;
        let factor = losses::psi(spec, link, y, z)?;
        grad[0] += factor;
        for (g, v) in grad[1..].iter_mut().zip(x) {
            *g += factor * v;
        }
    }
    let inv = 1.0 / data.n() as f64;
    for g in &mut grad {
        *g *= inv;
    }
    Ok(grad)
}

fn check_dims(theta: &ParameterVector, data: &Dataset) -> Result<()> {
    if theta.len() != data.feature_dim() + 1 {
        return Err(Error::DimensionMismatch {
            theta_len: theta.len(),
            expected: data.feature_dim() + 1,
            feature_dim: data.feature_dim(),
        });
    }
    Ok(())
}

/// Predicted label: 1 iff `q(1|x; θ) ≥ threshold` (ties go to 1).
pub fn classify(link: Link, theta: &ParameterVector, x: &[f64], threshold: f64) -> Result<u8> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidParameter(format!(
            "classification threshold must lie in [0, 1], got {threshold}"
        )));
    }
    let q1 = model::conditional_prob(link, theta, x, 1)?;
    Ok(u8::from(q1 >= threshold))
}

/// Minimizes the empirical risk for the given loss family and link.
pub fn fit(spec: LossSpec, link: Link, data: &Dataset, options: &FitOptions) -> Result<FitResult> {
    spec.validate()?;
    options.validate()?;
    let dim = data.feature_dim() + 1;

    let initializers = match &options.initializers {
        Some(list) => {
            if list.is_empty() {
                return Err(Error::InvalidParameter(
                    "initializer list must be nonempty".into(),
                ));
            }
            for theta in list {
                check_dims(theta, data)?;
            }
            list.clone()
        }
        None => {
            let mut list = vec![ParameterVector::zeros(data.feature_dim())];
            if spec != LossSpec::Ml {
                let ml_opts = FitOptions {
                    initializers: Some(vec![ParameterVector::zeros(data.feature_dim())]),
                    ..options.clone()
                };
                let ml_fit = fit(LossSpec::Ml, link, data, &ml_opts)?;
                list.push(ml_fit.theta_hat);
            }
            list
        }
    };

    let mut objective = |theta: &[f64], grad: &mut [f64]| -> f64 {
        risk_and_gradient(spec, link, theta, data, grad)
    };

    let mut best: Option<FitResult> = None;
    for (idx, start) in initializers.iter().enumerate() {
        let run = minimize(&mut objective, start.values(), options);
        let candidate = FitResult {
            theta_hat: ParameterVector::new(run.x.clone())
                .unwrap_or_else(|_| ParameterVector::zeros(dim - 1)),
            final_risk: run.f,
            gradient_norm: run.grad_norm,
            iterations: run.iterations,
            status: run.status,
            initializer_used: idx,
        };
        let better = match &best {
            None => true,
            Some(b) => rank_risk(candidate.final_risk) < rank_risk(b.final_risk),
        };
        if better {
            best = Some(candidate);
        }
    }
    let mut result = best.expect("at least one initializer");
    // Non-finite risk everywhere means the model never evaluated.
    if !result.final_risk.is_finite() {
        result.status = FitStatus::NumericalFailure;
    }
    Ok(result)
}

fn rank_risk(r: f64) -> f64 {
    if r.is_finite() {
        r
    } else {
        f64::INFINITY
    }
}

/// Single-pass risk + gradient; returns `INFINITY` if any term fails to
/// evaluate (for example because θ has overflowed), which the line search
/// treats as a rejected point.
fn risk_and_gradient(
    spec: LossSpec,
    link: Link,
    theta: &[f64],
    data: &Dataset,
    grad: &mut [f64],
) -> f64 {
    grad.fill(0.0);
    let mut risk = 0.0;
    for (x, y) in data.rows() {
        let mut z = theta[0];
        for (c, v) in theta[1..].iter().zip(x) {
            z += c * v;
        }
        let (l, p) = match (losses::loss(spec, link, y, z), losses::psi(spec, link, y, z)) {
            (Ok(l), Ok(p)) => (l, p),
            _ => return f64::INFINITY,
        };
        risk += l;
        grad[0] += p;
        for (g, v) in grad[1..].iter_mut().zip(x) {
            *g += p * v;
        }
    }
    let inv = 1.0 / data.n() as f64;
    for g in grad.iter_mut() {
        *g *= inv;
    }
    risk * inv
}

struct RunOutcome {
    x: Vec<f64>,
    f: f64,
    grad_norm: f64,
    iterations: usize,
    status: FitStatus,
}

/// BFGS with Armijo backtracking on a black-box objective.
///
/// The accepted iterate sequence has strictly decreasing objective values;
/// a line search that cannot find measurable descent ends the run.
fn minimize<F>(objective: &mut F, init: &[f64], options: &FitOptions) -> RunOutcome
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = init.len();
    let mut x = init.to_vec();
    let mut grad = vec![0.0; n];
    let mut f = objective(&x, &mut grad);
    if !f.is_finite() {
        return RunOutcome {
            x,
            f: f64::INFINITY,
            grad_norm: f64::INFINITY,
            iterations: 0,
            status: FitStatus::NumericalFailure,
        };
    }

    // inverse Hessian approximation, row-major
    let mut h = identity(n);
    let mut p = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut grad_new = vec![0.0; n];
    let mut accepted_any = false;
    // consecutive sub-tolerance risk decreases before declaring a stall;
    // a single tiny decrease can just be a short line-search step
    let mut stalled_steps = 0usize;

    let mut iterations = 0;
    let mut status = FitStatus::MaxIterations;

    while iterations < options.max_iterations {
        iterations += 1;

        if inf_norm(&grad) <= options.gradient_tolerance {
            status = FitStatus::Converged;
            break;
        }

        mat_vec_neg(&h, &grad, &mut p);
        let mut gp = dot(&grad, &p);
        if gp >= 0.0 {
            // curvature model broke down: restart from steepest descent
            h = identity(n);
            for (pi, gi) in p.iter_mut().zip(&grad) {
                *pi = -gi;
            }
            gp = dot(&grad, &p);
            if gp >= 0.0 {
                // gradient is exactly zero
                status = FitStatus::Converged;
                break;
            }
        }

        let mut t = 1.0;
        let mut accepted = false;
        let mut f_new = f;
        for _ in 0..MAX_BACKTRACKS {
            for ((xn, xi), pi) in x_new.iter_mut().zip(&x).zip(&p) {
                *xn = xi + t * pi;
            }
            f_new = objective(&x_new, &mut grad_new);
            if f_new.is_finite()
                && f_new <= f + options.armijo_constant * t * gp
                && f_new < f
            {
                accepted = true;
                break;
            }
            t *= options.line_search_shrink;
        }

        if !accepted {
            status = if !accepted_any {
                FitStatus::StalledAtInitial
            } else if inf_norm(&grad) <= options.gradient_tolerance {
                FitStatus::Converged
            } else {
                FitStatus::MaxIterations
            };
            break;
        }
        accepted_any = true;
        debug_assert!(f_new < f, "accepted step must decrease the risk");

        let decrease = f - f_new;
        let mut s = vec![0.0; n];
        let mut yv = vec![0.0; n];
        for i in 0..n {
            s[i] = t * p[i];
            yv[i] = grad_new[i] - grad[i];
        }
        x.copy_from_slice(&x_new);
        f = f_new;
        grad.copy_from_slice(&grad_new);

        if inf_norm(&grad) <= options.gradient_tolerance {
            status = FitStatus::Converged;
            break;
        }
        if decrease <= options.risk_relative_tolerance * f.abs().max(1.0) {
            stalled_steps += 1;
            if stalled_steps >= 2 {
                status = FitStatus::Converged;
                break;
            }
        } else {
            stalled_steps = 0;
        }

        let sy = dot(&s, &yv);
        let s_norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        let y_norm = yv.iter().map(|v| v * v).sum::<f64>().sqrt();
        if sy > 1e-12 * s_norm * y_norm {
            bfgs_update(&mut h, &s, &yv, sy);
        }
    }

    RunOutcome {
        grad_norm: inf_norm(&grad),
        x,
        f,
        iterations,
        status,
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn mat_vec_neg(h: &[f64], g: &[f64], out: &mut [f64]) {
    let n = g.len();
    for i in 0..n {
        out[i] = -dot(&h[i * n..(i + 1) * n], g);
    }
}

/// Inverse-Hessian BFGS update
/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ` with ρ = 1/(sᵀy).
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let mut hy = vec![0.0; n];
    for i in 0..n {
        hy[i] = dot(&h[i * n..(i + 1) * n], y);
    }
    let yhy = dot(y, &hy);
    let beta = rho * rho * yhy + rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + beta * s[i] * s[j];
        }
    }
}

/// Approximates the pseudo-true parameter θ* solving `E[B(θ, X)] = 0` by
/// minimizing the y-analytic risk over `n_large` feature draws.
pub fn pseudo_true_parameter(
    spec: LossSpec,
    link: Link,
    truth: &TruthModel,
    n_large: usize,
    seed: u64,
) -> Result<ParameterVector> {
    spec.validate()?;
    if n_large == 0 {
        return Err(Error::InvalidParameter(
            "pseudo-true parameter needs n_large >= 1 draws".into(),
        ));
    }
    let dim = truth.feature_sampler.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(n_large * dim);
    let mut p1s = Vec::with_capacity(n_large);
    for _ in 0..n_large {
        let x = truth.feature_sampler.sample(&mut rng);
        p1s.push(truth.conditional.prob_one(&x)?);
        xs.extend_from_slice(&x);
    }

    let options = FitOptions::default();
    let (xs, p1s) = (&xs, &p1s);

    let zero = vec![0.0; dim + 1];
    let mut starts = vec![zero.clone()];
    if spec != LossSpec::Ml {
        let mut ml_obj = |theta: &[f64], grad: &mut [f64]| -> f64 {
            weighted_risk_and_gradient(LossSpec::Ml, link, theta, xs, p1s, dim, grad)
        };
        let ml_run = minimize(&mut ml_obj, &zero, &options);
        starts.push(ml_run.x);
    }

    let mut obj = |theta: &[f64], grad: &mut [f64]| -> f64 {
        weighted_risk_and_gradient(spec, link, theta, xs, p1s, dim, grad)
    };
    let mut best: Option<RunOutcome> = None;
    for start in &starts {
        let run = minimize(&mut obj, start, &options);
        let better = match &best {
            None => true,
            Some(b) => rank_risk(run.f) < rank_risk(b.f),
        };
        if better {
            best = Some(run);
        }
    }
    ParameterVector::new(best.expect("nonempty starts").x)
}

fn weighted_risk_and_gradient(
    spec: LossSpec,
    link: Link,
    theta: &[f64],
    xs: &[f64],
    p1s: &[f64],
    dim: usize,
    grad: &mut [f64],
) -> f64 {
    grad.fill(0.0);
    let mut risk = 0.0;
    for (x, &p1) in xs.chunks_exact(dim.max(1)).zip(p1s) {
        let mut z = theta[0];
        for (c, v) in theta[1..].iter().zip(x) {
            z += c * v;
        }
        let terms = (|| -> Result<(f64, f64)> {
            let l = p1 * losses::loss(spec, link, 1, z)?
                + (1.0 - p1) * losses::loss(spec, link, 0, z)?;
            let p = p1 * losses::psi(spec, link, 1, z)?
                + (1.0 - p1) * losses::psi(spec, link, 0, z)?;
            Ok((l, p))
        })();
        let (l, p) = match terms {
            Ok(v) => v,
            Err(_) => return f64::INFINITY,
        };
        risk += l;
        grad[0] += p;
        for (g, v) in grad[1..].iter_mut().zip(x) {
            *g += p * v;
        }
    }
    let inv = 1.0 / p1s.len() as f64;
    for g in grad.iter_mut() {
        *g *= inv;
    }
    risk * inv
}

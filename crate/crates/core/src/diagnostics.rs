//! Robustness diagnostics for contamination in the linear predictor.
//!
//! The central object is the contamination effect
//! `b(y, z, z′) = ψ(y, z)·(z′ − z)`: the directional derivative of the loss
//! under an ε-shift of the linear predictor toward z′. Whether `b` stays
//! bounded as |z| grows is the robustness criterion; [`boundedness_scan`]
//! classifies it on a finite grid. [`tail_limit_probe`] checks the tail
//! ratios `|z|·g/Ḡ^c` that drive the theory, and
//! [`expected_conditional_score`] / [`fisher_consistency_check`] verify that
//! the population estimating equation vanishes under correct specification.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::links::Link;
use crate::losses::{self, LossSpec};
use crate::model::{self, ParameterVector};

/// Outcome of a boundedness scan over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailClassification {
    Bounded,
    Diverging,
}

/// Grid evaluation of the contamination effect b(y, z, z′) in z.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundednessReport {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub max_abs: f64,
    pub argmax_z: f64,
    pub tail_classification: TailClassification,
}

/// Which tail ratio a probe evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    /// L₁: `|z|·g(z)/Ḡ(z)^c` — density against the upper-tail survival.
    Upper,
    /// L₂: `|z|·g(−z)/G(−z)^c` — density against the lower-tail CDF.
    Lower,
}

/// Classified limit of a tail ratio along an increasing grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailLimit {
    ToZero,
    ToInfinity,
    Inconclusive,
}

/// Contamination effect `b(y, z, z′) = ψ(y, z)·(z′ − z)`.
pub fn contamination_effect(
    spec: LossSpec,
    link: Link,
    y: u8,
    z: f64,
    z_prime: f64,
) -> Result<f64> {
    Error::check_finite("z_prime", z_prime)?;
    Ok(losses::psi(spec, link, y, z)? * (z_prime - z))
}

/// Evaluates b on a strictly increasing grid and classifies the tails.
///
/// The scan is `diverging` iff |b| at an outermost grid point exceeds twice
/// the maximum |b| over the inner half of the grid.
pub fn boundedness_scan(
    spec: LossSpec,
    link: Link,
    y: u8,
    z_prime: f64,
    grid: &[f64],
) -> Result<BoundednessReport> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("scan grid must be nonempty".into()));
    }
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "scan grid must be strictly increasing".into(),
            ));
        }
    }
    let mut values = Vec::with_capacity(grid.len());
    for &z in grid {
        values.push(contamination_effect(spec, link, y, z, z_prime)?);
    }

    let mut max_abs = 0.0f64;
    let mut argmax_z = grid[0];
    for (&z, &v) in grid.iter().zip(&values) {
        if v.abs() > max_abs {
            max_abs = v.abs();
            argmax_z = z;
        }
    }

    let n = grid.len();
    let lo = n / 4;
    let hi = ((3 * n) / 4).max(lo + 1).min(n);
    let inner_max = values[lo..hi].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diverging =
        values[0].abs() > 2.0 * inner_max || values[n - 1].abs() > 2.0 * inner_max;

    Ok(BoundednessReport {
        grid: grid.to_vec(),
        values,
        max_abs,
        argmax_z,
        tail_classification: if diverging {
            TailClassification::Diverging
        } else {
            TailClassification::Bounded
        },
    })
}

/// Probes `|z|·g(z)/Ḡ(z)^c` (upper) or `|z|·g(−z)/G(−z)^c` (lower) along an
/// increasing positive grid, in the log domain.
///
/// Classified `ToZero` when the sequence is eventually strictly decreasing
/// (settling by the midpoint of the grid) with last value below a tenth of
/// the first; `ToInfinity` symmetrically; `Inconclusive` otherwise.
pub fn tail_limit_probe(
    link: Link,
    c: f64,
    side: TailSide,
    z_grid: &[f64],
) -> Result<TailLimit> {
    if !(c > 0.0 && c <= 1.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tail exponent c must lie in (0, 1], got {c}"
        )));
    }
    if z_grid.len() < 3 {
        return Err(Error::InvalidParameter(
            "tail probe grid needs at least 3 points".into(),
        ));
    }
    for w in z_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "tail probe grid must be strictly increasing".into(),
            ));
        }
    }
    if z_grid[0] <= 0.0 {
        return Err(Error::InvalidParameter(
            "tail probe grid must be positive".into(),
        ));
    }
    if *z_grid.last().unwrap() < 20.0 {
        return Err(Error::InvalidParameter(
            "tail probe grid must reach z >= 20".into(),
        ));
    }

    let mut logs = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        // grouped as |z|·(g/Ḡ)·Ḡ^{1−c} so the hazard's exact cancellation
        // is preserved (ln g and ln Ḡ would absorb each other's terms for
        // the double-exponential link)
        let v = match side {
            TailSide::Upper => {
                z.ln() + link.hazard_upper(z)?.ln() + (1.0 - c) * link.log_sf(z)?
            }
            TailSide::Lower => {
                z.ln() + link.hazard_lower(-z)?.ln() + (1.0 - c) * link.log_cdf(-z)?
            }
        };
        logs.push(v);
    }

    let n = logs.len();
    let increasing = logs[n - 1] > logs[n - 2];
    // longest strictly monotone suffix in the terminal direction
    let mut start = n - 1;
    while start > 0 {
        let step_up = logs[start] > logs[start - 1];
        if step_up != increasing || logs[start] == logs[start - 1] {
            break;
        }
        start -= 1;
    }
    let settled = start <= n / 2;
    let ln10 = std::f64::consts::LN_10;
    if settled && !increasing && logs[n - 1] <= logs[0] - ln10 {
        Ok(TailLimit::ToZero)
    } else if settled && increasing && logs[n - 1] >= logs[0] + ln10 {
        Ok(TailLimit::ToInfinity)
    } else {
        Ok(TailLimit::Inconclusive)
    }
}

/// How the data-generating conditional probability p(y=1 | x) is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum TruthConditional {
    /// The regression model itself at a reference parameter (correct
    /// specification when it matches the fitted link).
    Model { link: Link, theta: ParameterVector },
    /// A constant conditional probability, independent of x.
    Constant(f64),
    /// Posterior class-1 probability of the two-Gaussian mixture with
    /// class-1 rate `r`, means `mu1`/`mu0` and class-0 covariance `s·I₂`.
    Binormal {
        r: f64,
        mu1: [f64; 2],
        mu0: [f64; 2],
        s: f64,
    },
}

impl TruthConditional {
    /// p(y = 1 | x).
    pub fn prob_one(&self, x: &[f64]) -> Result<f64> {
        match self {
            TruthConditional::Model { link, theta } => {
                model::conditional_prob(*link, theta, x, 1)
            }
            TruthConditional::Constant(p) => {
                if (0.0..=1.0).contains(p) {
                    Ok(*p)
                } else {
                    Err(Error::InvalidParameter(format!(
                        "constant conditional probability must lie in [0,1], got {p}"
                    )))
                }
            }
            TruthConditional::Binormal { r, mu1, mu0, s } => {
                if x.len() != 2 {
                    return Err(Error::InvalidData(format!(
                        "binormal truth expects 2 features, got {}",
                        x.len()
                    )));
                }
                let q1 = (x[0] - mu1[0]).powi(2) + (x[1] - mu1[1]).powi(2);
                let q0 = (x[0] - mu0[0]).powi(2) + (x[1] - mu0[1]).powi(2);
                // log posterior odds of class 1 for N(mu1, I) vs N(mu0, s I)
                let log_odds = (r / (1.0 - r)).ln() - 0.5 * q1 + q0 / (2.0 * s) + s.ln();
                Link::Logit.cdf(log_odds)
            }
        }
    }
}

/// Named feature distribution for sampling x.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSampler {
    /// i.i.d. Uniform[low, high] coordinates.
    UniformCube { low: f64, high: f64, dim: usize },
    /// i.i.d. standard normal coordinates.
    StandardNormal { dim: usize },
    /// The feature marginal of the binormal mixture: with probability `r`
    /// a N(mu1, I₂) draw, otherwise N(mu0, s·I₂).
    BinormalMixture {
        r: f64,
        mu1: [f64; 2],
        mu0: [f64; 2],
        s: f64,
    },
}

impl FeatureSampler {
    pub fn dim(&self) -> usize {
        match self {
            FeatureSampler::UniformCube { dim, .. } => *dim,
            FeatureSampler::StandardNormal { dim } => *dim,
            FeatureSampler::BinormalMixture { .. } => 2,
        }
    }

    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            FeatureSampler::UniformCube { low, high, dim } => {
                let u = Uniform::new(*low, *high).expect("valid uniform bounds");
                (0..*dim).map(|_| u.sample(rng)).collect()
            }
            FeatureSampler::StandardNormal { dim } => {
                let n = Normal::new(0.0, 1.0).expect("valid normal");
                (0..*dim).map(|_| n.sample(rng)).collect()
            }
            FeatureSampler::BinormalMixture { r, mu1, mu0, s } => {
                let n = Normal::new(0.0, 1.0).expect("valid normal");
                if rng.random::<f64>() < *r {
                    vec![mu1[0] + n.sample(rng), mu1[1] + n.sample(rng)]
                } else {
                    let sd = s.sqrt();
                    vec![mu0[0] + sd * n.sample(rng), mu0[1] + sd * n.sample(rng)]
                }
            }
        }
    }
}

/// A data-generating truth: conditional law of y plus a feature distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthModel {
    pub conditional: TruthConditional,
    pub feature_sampler: FeatureSampler,
}

/// Conditional expected score `B(θ, x) = Σ_y p(y|x)·ψ(y, θᵀx̃)·x̃` — the
/// exact two-term sum over y, no quadrature.
pub fn expected_conditional_score(
    spec: LossSpec,
    link: Link,
    theta: &ParameterVector,
    truth: &TruthModel,
    x: &[f64],
) -> Result<Vec<f64>> {
    let p1 = truth.conditional.prob_one(x)?;
    let g1 = losses::per_sample_gradient(spec, link, theta, x, 1)?;
    let g0 = losses::per_sample_gradient(spec, link, theta, x, 0)?;
    Ok(g1
        .iter()
        .zip(&g0)
        .map(|(a, b)| p1 * a + (1.0 - p1) * b)
        .collect())
}

/// Euclidean norm of the Monte Carlo average of `B(θ₀, X)` over n feature
/// draws.
///
/// Under correct specification each summand is identically zero (the
/// y-expectation is analytic), so the norm is ≈ 0 regardless of n; under
/// misspecification it estimates ‖E[B(θ, X)]‖.
pub fn fisher_consistency_check(
    spec: LossSpec,
    link: Link,
    theta0: &ParameterVector,
    truth: &TruthModel,
    n: usize,
    seed: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "fisher consistency check needs n >= 1 draws".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = vec![0.0; theta0.len()];
    for _ in 0..n {
        let x = truth.feature_sampler.sample(&mut rng);
        let b = expected_conditional_score(spec, link, theta0, truth, &x)?;
        for (a, v) in acc.iter_mut().zip(&b) {
            *a += v;
        }
    }
    let inv = 1.0 / n as f64;
    Ok(acc.iter().map(|v| (v * inv).powi(2)).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_rejects_bad_grids() {
        assert!(boundedness_scan(LossSpec::Ml, Link::Logit, 1, 0.0, &[]).is_err());
        assert!(boundedness_scan(LossSpec::Ml, Link::Logit, 1, 0.0, &[0.0, 0.0]).is_err());
        assert!(boundedness_scan(LossSpec::Ml, Link::Logit, 1, 0.0, &[1.0, -1.0]).is_err());
    }

    #[test]
    fn probe_rejects_bad_exponents_and_grids() {
        let grid: Vec<f64> = (0..30).map(|i| 5.0 + i as f64).collect();
        assert!(tail_limit_probe(Link::Probit, 0.0, TailSide::Upper, &grid).is_err());
        assert!(tail_limit_probe(Link::Probit, 1.5, TailSide::Upper, &grid).is_err());
        assert!(tail_limit_probe(Link::Probit, -0.5, TailSide::Upper, &grid).is_err());
        assert!(tail_limit_probe(Link::Probit, 0.5, TailSide::Upper, &[5.0, 6.0]).is_err());
        assert!(tail_limit_probe(Link::Probit, 0.5, TailSide::Upper, &[5.0, 6.0, 7.0]).is_err());
        assert!(
            tail_limit_probe(Link::Probit, 0.5, TailSide::Upper, &[-1.0, 10.0, 25.0]).is_err()
        );
    }

    #[test]
    fn constant_truth_validates_range() {
        let t = TruthConditional::Constant(1.5);
        assert!(t.prob_one(&[0.0]).is_err());
    }
}

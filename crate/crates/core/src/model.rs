//! The binary regression model: linear predictor, conditional probabilities,
//! escort (γ-tilted) probabilities, and per-observation score vectors.

use crate::error::{Error, Result};
use crate::links::Link;
use crate::numeric::log_sum_exp;

/// Model parameters θ ∈ ℝ^{d+1}; index 0 is the intercept.
///
/// Datasets never carry their own constant column: the intercept enters
/// through `x̃ = (1, xᵀ)ᵀ` when forming the linear predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    /// Wraps a coefficient vector; all entries must be finite and the
    /// vector nonempty (the intercept is always present).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "parameter vector must contain at least the intercept".into(),
            ));
        }
        for &v in &values {
            Error::check_finite("theta", v)?;
        }
        Ok(ParameterVector(values))
    }

    /// Zero vector for a model with `feature_dim` features (length d+1).
    pub fn zeros(feature_dim: usize) -> Self {
        ParameterVector(vec![0.0; feature_dim + 1])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Total length d+1 (never zero by construction).
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Number of features the vector expects (length minus the intercept).
    pub fn feature_dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn intercept(&self) -> f64 {
        self.0[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0[1..]
    }
}

/// A single observation: feature vector x ∈ ℝ^d and label y ∈ {0, 1}.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub features: Vec<f64>,
    pub label: u8,
}

impl Observation {
    pub fn new(features: Vec<f64>, label: u8) -> Result<Self> {
        for &v in &features {
            Error::check_finite("feature", v)?;
        }
        Error::check_label(label)?;
        Ok(Observation { features, label })
    }
}

/// An i.i.d. sample of observations with a common feature dimension.
///
/// Stored row-major in flat buffers; rows are accessed by index.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_dim: usize,
    features: Vec<f64>,
    labels: Vec<u8>,
}

impl Dataset {
    pub fn from_observations(observations: &[Observation]) -> Result<Self> {
        let first = observations
            .first()
            .ok_or_else(|| Error::InvalidData("dataset must contain at least one row".into()))?;
        let d = first.features.len();
        let mut features = Vec::with_capacity(observations.len() * d);
        let mut labels = Vec::with_capacity(observations.len());
        for (i, obs) in observations.iter().enumerate() {
            if obs.features.len() != d {
                return Err(Error::InvalidData(format!(
                    "row {i} has {} feature(s), expected {d}",
                    obs.features.len()
                )));
            }
            features.extend_from_slice(&obs.features);
            labels.push(obs.label);
        }
        Dataset::from_parts(d, features, labels)
    }

    /// Builds a dataset from flat row-major features and labels.
    pub fn from_parts(feature_dim: usize, features: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidData("dataset must contain at least one row".into()));
        }
        if features.len() != feature_dim * labels.len() {
            return Err(Error::InvalidData(format!(
                "feature buffer has length {}, expected {} ({} rows x {} features)",
                features.len(),
                feature_dim * labels.len(),
                labels.len(),
                feature_dim
            )));
        }
        for &v in &features {
            Error::check_finite("feature", v)?;
        }
        for &y in &labels {
            Error::check_label(y)?;
        }
        Ok(Dataset { feature_dim, features, labels })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn features_of(&self, i: usize) -> &[f64] {
        &self.features[i * self.feature_dim..(i + 1) * self.feature_dim]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Iterates over `(features, label)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (&[f64], u8)> + '_ {
        self.features
            .chunks_exact(self.feature_dim.max(1))
            .zip(self.labels.iter().copied())
    }

    /// Fraction of rows labelled 1.
    pub fn label_mean(&self) -> f64 {
        self.labels.iter().map(|&y| f64::from(y)).sum::<f64>() / self.n() as f64
    }
}

/// Linear predictor z = θ₀ + Σ_j θ_{j+1} x_j.
pub fn linear_predictor(theta: &ParameterVector, x: &[f64]) -> Result<f64> {
    if theta.len() != x.len() + 1 {
        return Err(Error::DimensionMismatch {
            theta_len: theta.len(),
            expected: x.len() + 1,
            feature_dim: x.len(),
        });
    }
    let mut z = theta.intercept();
    for (c, v) in theta.coefficients().iter().zip(x) {
        z += c * v;
    }
    Ok(z)
}

/// Conditional model probability `q(y|x; θ)`: `G(z)` for y = 1, `Ḡ(z)` for y = 0.
pub fn conditional_prob(link: Link, theta: &ParameterVector, x: &[f64], y: u8) -> Result<f64> {
    Error::check_label(y)?;
    let z = linear_predictor(theta, x)?;
    if y == 1 {
        link.cdf(z)
    } else {
        link.sf(z)
    }
}

/// Escort probability `q_γ(y|x; θ) = q(y)^{γ+1} / Σ_m q(m)^{γ+1}`,
/// evaluated in the log domain so negative γ stays stable when one class
/// probability is tiny.
pub fn escort_probability(
    link: Link,
    theta: &ParameterVector,
    x: &[f64],
    y: u8,
    gamma: f64,
) -> Result<f64> {
    Error::check_label(y)?;
    Error::check_finite("gamma", gamma)?;
    if gamma == -1.0 {
        return Err(Error::InvalidParameter(
            "gamma = -1 degenerates the escort normalizer; use the geometric-limit loss".into(),
        ));
    }
    let z = linear_predictor(theta, x)?;
    let (t1, t0) = escort_log_weights(link, z, gamma)?;
    let lse = log_sum_exp(t1, t0);
    Ok(if y == 1 { (t1 - lse).exp() } else { (t0 - lse).exp() })
}

pub(crate) fn escort_log_weights(link: Link, z: f64, gamma: f64) -> Result<(f64, f64)> {
    let u = gamma + 1.0;
    Ok((u * link.log_cdf(z)?, u * link.log_sf(z)?))
}

/// Score `S(y, x; θ) = ∇_θ log q(y|x; θ) = [y·g/G − (1−y)·g/Ḡ]·x̃`.
pub fn score(link: Link, theta: &ParameterVector, x: &[f64], y: u8) -> Result<Vec<f64>> {
    Error::check_label(y)?;
    let z = linear_predictor(theta, x)?;
    let factor = score_factor(link, z, y)?;
    Ok(times_xtilde(factor, x))
}

/// z-derivative of `log q(y|x; θ)`: `g/G` for y = 1, `−g/Ḡ` for y = 0.
pub(crate) fn score_factor(link: Link, z: f64, y: u8) -> Result<f64> {
    Ok(if y == 1 {
        link.hazard_lower(z)?
    } else {
        -link.hazard_upper(z)?
    })
}

/// Escort score `S_γ(y, x; θ) = ∇_θ log q_γ(y|x; θ)`.
///
/// At γ = 0 the escort equals the model and this takes the same code path
/// as [`score`].
pub fn escort_score(
    link: Link,
    theta: &ParameterVector,
    x: &[f64],
    y: u8,
    gamma: f64,
) -> Result<Vec<f64>> {
    Error::check_label(y)?;
    Error::check_finite("gamma", gamma)?;
    if gamma == 0.0 {
        return score(link, theta, x, y);
    }
    if gamma == -1.0 {
        return Err(Error::InvalidParameter(
            "gamma = -1 degenerates the escort normalizer; use the geometric-limit loss".into(),
        ));
    }
    let z = linear_predictor(theta, x)?;
    let factor = escort_score_factor(link, z, y, gamma)?;
    Ok(times_xtilde(factor, x))
}

/// z-derivative of `log q_γ(y)`:
/// `(γ+1)·(ℓ′(y) − Σ_m q_γ(m)·ℓ′(m))` with `ℓ′(m) = d log q(m)/dz`.
pub(crate) fn escort_score_factor(link: Link, z: f64, y: u8, gamma: f64) -> Result<f64> {
    let u = gamma + 1.0;
    let (t1, t0) = escort_log_weights(link, z, gamma)?;
    let lse = log_sum_exp(t1, t0);
    let w1 = (t1 - lse).exp();
    let w0 = (t0 - lse).exp();
    let hl = link.hazard_lower(z)?;
    let hu = link.hazard_upper(z)?;
    let own = if y == 1 { hl } else { -hu };
    Ok(u * (own - (w1 * hl - w0 * hu)))
}

pub(crate) fn times_xtilde(factor: f64, x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len() + 1);
    out.push(factor);
    out.extend(x.iter().map(|v| factor * v));
    out
}

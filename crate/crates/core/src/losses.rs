//! Per-sample losses Ψ(y, z) and their linear-predictor derivatives ψ(y, z).
//!
//! Three families share one interface:
//!
//! - `ml`: the negative log-loss −y·ln G(z) − (1−y)·ln Ḡ(z).
//! - `beta(β)`, β > 0: −(1/β)·q(y)^β + (1/(β+1))·Σ_m q(m)^{β+1}, the density
//!   power divergence loss.
//! - `gamma(γ)`, γ ∉ {0}: −(1/γ)·q_γ(y)^{γ/(γ+1)} built on the escort
//!   probability q_γ. Two special members get closed forms: γ = −2 is the
//!   squared error (y − G(z))² and γ → −1 is the geometric-limit loss
//!   (1/2)·√(q(1−y)/q(y)).
//!
//! Every probability power is evaluated through exp/log compositions of
//! `log_cdf`/`log_sf`, with no clamping, so the tails keep the behavior the
//! diagnostics module probes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::links::Link;
use crate::model::{self, ParameterVector};
use crate::numeric::log_sum_exp;

/// Loss-family selector with its tuning parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossSpec {
    /// Maximum likelihood (negative log-loss).
    Ml,
    /// Density power divergence loss with β > 0.
    Beta(f64),
    /// γ-divergence loss with γ ≠ 0; γ = −2 and γ = −1 dispatch to their
    /// closed forms. Request the γ → 0 limit via `Ml`.
    Gamma(f64),
}

/// Dispatch window around γ = −1 for the geometric-limit loss, sized so
/// that the f64 rounding of `-1.0 + 1e-8` still lands inside.
pub(crate) const GEOMETRIC_GAMMA_WINDOW: f64 = 1.01e-8;

impl LossSpec {
    /// Checks the family invariants: β > 0, γ ∉ {0}, parameters finite.
    pub fn validate(self) -> Result<()> {
        match self {
            LossSpec::Ml => Ok(()),
            LossSpec::Beta(b) => {
                if b.is_finite() && b > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "beta loss requires beta > 0, got {b}"
                    )))
                }
            }
            LossSpec::Gamma(g) => {
                if !g.is_finite() {
                    Err(Error::InvalidParameter(format!(
                        "gamma loss requires a finite gamma, got {g}"
                    )))
                } else if g == 0.0 {
                    Err(Error::InvalidParameter(
                        "gamma = 0 is the maximum-likelihood limit; use the ml loss".into(),
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossSpec::Ml => f.write_str("ml"),
            LossSpec::Beta(b) => write!(f, "beta:{b}"),
            LossSpec::Gamma(g) => write!(f, "gamma:{g}"),
        }
    }
}

impl FromStr for LossSpec {
    type Err = Error;

    /// Parses the CLI grammar: `ml`, `beta:<float>`, `gamma:<float>`.
    fn from_str(s: &str) -> Result<Self> {
        let spec = if s == "ml" {
            LossSpec::Ml
        } else if let Some(v) = s.strip_prefix("beta:") {
            LossSpec::Beta(v.parse::<f64>().map_err(|_| {
                Error::InvalidParameter(format!("malformed beta parameter in '{s}'"))
            })?)
        } else if let Some(v) = s.strip_prefix("gamma:") {
            LossSpec::Gamma(v.parse::<f64>().map_err(|_| {
                Error::InvalidParameter(format!("malformed gamma parameter in '{s}'"))
            })?)
        } else {
            return Err(Error::InvalidParameter(format!(
                "unknown loss '{s}' (expected ml, beta:<float> or gamma:<float>)"
            )));
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Per-sample loss Ψ(y, z). Finite for finite z within f64 range.
pub fn loss(spec: LossSpec, link: Link, y: u8, z: f64) -> Result<f64> {
    spec.validate()?;
    Error::check_label(y)?;
    Error::check_finite("z", z)?;
    match spec {
        LossSpec::Ml => Ok(if y == 1 { -link.log_cdf(z)? } else { -link.log_sf(z)? }),
        LossSpec::Beta(b) => {
            let lq1 = link.log_cdf(z)?;
            let lq0 = link.log_sf(z)?;
            let lqy = if y == 1 { lq1 } else { lq0 };
            Ok(-(b * lqy).exp() / b
                + (((b + 1.0) * lq1).exp() + ((b + 1.0) * lq0).exp()) / (b + 1.0))
        }
        LossSpec::Gamma(g) => gamma_loss(g, link, y, z),
    }
}

fn gamma_loss(g: f64, link: Link, y: u8, z: f64) -> Result<f64> {
    if g == -2.0 {
        // Squared-error closed form; identical gradients to beta(1).
        let p = link.cdf(z)?;
        let r = f64::from(y) - p;
        return Ok(r * r);
    }
    if (g + 1.0).abs() <= GEOMETRIC_GAMMA_WINDOW {
        // Geometric-limit loss (1/2)·(q(1−y)/q(y))^{1/2}.
        let lq1 = link.log_cdf(z)?;
        let lq0 = link.log_sf(z)?;
        let (own, other) = if y == 1 { (lq1, lq0) } else { (lq0, lq1) };
        return Ok(0.5 * (0.5 * (other - own)).exp());
    }
    let u = g + 1.0;
    let lq1 = link.log_cdf(z)?;
    let lq0 = link.log_sf(z)?;
    let lqy = if y == 1 { lq1 } else { lq0 };
    let lse = log_sum_exp(u * lq1, u * lq0);
    let log_escort_y = u * lqy - lse;
    Ok(-(g / u * log_escort_y).exp() / g)
}

/// Derivative ψ(y, z) = ∂Ψ(y, z)/∂z.
///
/// `per_sample_gradient` multiplies this scalar by x̃ to obtain the
/// θ-gradient of the per-sample loss.
pub fn psi(spec: LossSpec, link: Link, y: u8, z: f64) -> Result<f64> {
    spec.validate()?;
    Error::check_label(y)?;
    Error::check_finite("z", z)?;
    match spec {
        LossSpec::Ml => Ok(-model::score_factor(link, z, y)?),
        LossSpec::Beta(b) => {
            let lq1 = link.log_cdf(z)?;
            let lq0 = link.log_sf(z)?;
            let lqy = if y == 1 { lq1 } else { lq0 };
            let lg = link.log_pdf(z)?;
            let sign_y = if y == 1 { 1.0 } else { -1.0 };
            // −(2y−1)·g·q(y)^{β−1} + g·(G^β − Ḡ^β)
            Ok(-sign_y * (lg + (b - 1.0) * lqy).exp()
                + ((lg + b * lq1).exp() - (lg + b * lq0).exp()))
        }
        LossSpec::Gamma(g) => gamma_psi(g, link, y, z),
    }
}

fn gamma_psi(g: f64, link: Link, y: u8, z: f64) -> Result<f64> {
    if g == -2.0 {
        // d/dz (y − G)² = 2(G − y)·g
        let p = link.cdf(z)?;
        return Ok(2.0 * (p - f64::from(y)) * link.pdf(z)?);
    }
    if (g + 1.0).abs() <= GEOMETRIC_GAMMA_WINDOW {
        let lq1 = link.log_cdf(z)?;
        let lq0 = link.log_sf(z)?;
        let lg = link.log_pdf(z)?;
        return Ok(if y == 1 {
            -0.25 * (lg - 1.5 * lq1 - 0.5 * lq0).exp()
        } else {
            0.25 * (lg - 1.5 * lq0 - 0.5 * lq1).exp()
        });
    }
    // ψ_γ = −q_γ(y)^{γ/(γ+1)} · (ℓ′(y) − Σ_m q_γ(m)·ℓ′(m)); the (γ+1)
    // prefactors of the escort score and the loss cancel exactly.
    let u = g + 1.0;
    let (t1, t0) = model::escort_log_weights(link, z, g)?;
    let lse = log_sum_exp(t1, t0);
    let w1 = (t1 - lse).exp();
    let w0 = (t0 - lse).exp();
    let hl = link.hazard_lower(z)?;
    let hu = link.hazard_upper(z)?;
    let own = if y == 1 { hl } else { -hu };
    let centered = own - (w1 * hl - w0 * hu);
    let log_escort_y = if y == 1 { t1 - lse } else { t0 - lse };
    Ok(-(g / u * log_escort_y).exp() * centered)
}

/// θ-gradient of the per-sample loss: ψ(y, θᵀx̃)·x̃.
pub fn per_sample_gradient(
    spec: LossSpec,
    link: Link,
    theta: &ParameterVector,
    x: &[f64],
    y: u8,
) -> Result<Vec<f64>> {
    let z = model::linear_predictor(theta, x)?;
    let factor = psi(spec, link, y, z)?;
    Ok(model::times_xtilde(factor, x))
}

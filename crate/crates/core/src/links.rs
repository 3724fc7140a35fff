//! Candidate link functions and their stable tail evaluations.
//!
//! A link is a continuous CDF `G` on ℝ; the binary regression model sets
//! `P(Y = 1 | x) = G(z)` with `z = θᵀx̃`. Downstream code needs `G`, the
//! survival `Ḡ = 1 − G`, the density `g`, their logarithms, and the hazard
//! ratios `g/G` and `g/Ḡ` at linear predictors far into the tails, so every
//! evaluation here avoids premature underflow and cancellation:
//!
//! - logit: softplus identities; `g/G` and `g/Ḡ` collapse to `Ḡ` and `G`.
//! - probit: complementary error function up to |z| = 8, then a Mills-ratio
//!   continued fraction.
//! - cloglog (`G(z) = 1 − exp(−e^z)`): direct `expm1`/`log1p` compositions;
//!   `log Ḡ(z) = −e^z` and `g/Ḡ = e^z` are exact.
//! - cauchit (standard Cauchy): arctangent of the reciprocal beyond |z| = 1.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::{log1mexp, normal_mills_ratio, softplus};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_74;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Threshold beyond which the probit tail switches from `erfc` to the
/// Mills-ratio continued fraction.
const PROBIT_TAIL: f64 = 8.0;

/// A link function: the CDF of a continuous distribution supported on ℝ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    /// Standard logistic distribution.
    Logit,
    /// Standard normal distribution.
    Probit,
    /// Complementary log-log: `G(z) = 1 − exp(−exp(z))` (Gumbel-type, asymmetric).
    Cloglog,
    /// Standard Cauchy distribution: `G(z) = 1/2 + arctan(z)/π`.
    Cauchit,
}

impl Link {
    /// All supported links, in canonical order.
    pub const ALL: [Link; 4] = [Link::Logit, Link::Probit, Link::Cloglog, Link::Cauchit];

    /// CDF `G(z)`.
    ///
    /// Strictly increasing with limits 0 and 1; the value never underflows
    /// to 0 or rounds to 1 while the true value is still representable.
    pub fn cdf(self, z: f64) -> Result<f64> {
        Error::check_finite("z", z)?;
        Ok(match self {
            Link::Logit => sigmoid(z),
            Link::Probit => normal_cdf(z),
            Link::Cloglog => -(-z.exp()).exp_m1(),
            Link::Cauchit => cauchy_cdf(z),
        })
    }

    /// Survival function `Ḡ(z) = 1 − G(z)`, computed by a direct tail
    /// formula so the upper tail keeps full relative accuracy.
    pub fn sf(self, z: f64) -> Result<f64> {
        Error::check_finite("z", z)?;
        Ok(match self {
            Link::Logit => sigmoid(-z),
            Link::Probit => normal_cdf(-z),
            Link::Cloglog => (-z.exp()).exp(),
            Link::Cauchit => cauchy_cdf(-z),
        })
    }

    /// `ln G(z)`, finite and accurate far below the underflow point of `cdf`.
    pub fn log_cdf(self, z: f64) -> Result<f64> {
        Error::check_finite("z", z)?;
        Ok(match self {
            Link::Logit => -softplus(-z),
            Link::Probit => normal_log_cdf(z),
            Link::Cloglog => cloglog_log_cdf(z),
            Link::Cauchit => cauchy_log_cdf(z),
        })
    }

    /// `ln Ḡ(z)`.
    pub fn log_sf(self, z: f64) -> Result<f64> {
        Error::check_finite("z", z)?;
        Ok(match self {
            Link::Logit => -softplus(z),
            Link::Probit => normal_log_cdf(-z),
            Link::Cloglog => -z.exp(),
            Link::Cauchit => cauchy_log_cdf(-z),
        })
    }

    /// Density `g(z) = G′(z)`.
    pub fn pdf(self, z: f64) -> Result<f64> {
        Error::check_finite("z", z)?;
        Ok(match self {
            Link::Logit => {
                let e = (-z.abs()).exp();
                let d = 1.0 + e;
                e / (d * d)
            }
            Link::Probit => FRAC_1_SQRT_2PI * (-0.5 * z * z).exp(),
            Link::Cloglog => (z - z.exp()).exp(),
            Link::Cauchit => {
                let q = 1.0 + z * z;
                if q.is_finite() {
                    1.0 / (std::f64::consts::PI * q)
                } else {
                    0.0
                }
            }
        })
    }

    /// `ln g(z)`, representable even where `pdf` underflows.
    pub fn log_pdf(self, z: f64) -> Result<f64> {
        Error::check_finite("z", z)?;
        Ok(match self {
            Link::Logit => -softplus(z) - softplus(-z),
            Link::Probit => -0.5 * z * z - LN_SQRT_2PI,
            Link::Cloglog => z - z.exp(),
            Link::Cauchit => {
                let a = z.abs();
                if a > 1.0 {
                    -std::f64::consts::PI.ln() - 2.0 * a.ln() - (1.0 / (z * z)).ln_1p()
                } else {
                    -std::f64::consts::PI.ln() - (z * z).ln_1p()
                }
            }
        })
    }

    /// Lower hazard ratio `g(z)/G(z)`, cancellation-free in the lower tail.
    pub fn hazard_lower(self, z: f64) -> Result<f64> {
        Error::check_finite("z", z)?;
        Ok(match self {
            Link::Logit => sigmoid(-z),
            Link::Probit => {
                if z < -PROBIT_TAIL {
                    1.0 / normal_mills_ratio(-z)
                } else {
                    self.pdf(z)? / normal_cdf(z)
                }
            }
            Link::Cloglog => {
                // g/G = w·e^{−w}/(1 − e^{−w}) with w = e^z; → 1 as w → 0.
                let w = z.exp();
                if w == 0.0 {
                    1.0
                } else if w.is_finite() {
                    w * (-w).exp() / -(-w).exp_m1()
                } else {
                    0.0
                }
            }
            Link::Cauchit => cauchy_hazard_against_tail(-z),
        })
    }

    /// Upper hazard ratio `g(z)/Ḡ(z)`, cancellation-free in the upper tail.
    pub fn hazard_upper(self, z: f64) -> Result<f64> {
        Error::check_finite("z", z)?;
        Ok(match self {
            Link::Logit => sigmoid(z),
            Link::Probit => {
                if z > PROBIT_TAIL {
                    1.0 / normal_mills_ratio(z)
                } else {
                    self.pdf(z)? / normal_cdf(-z)
                }
            }
            Link::Cloglog => z.exp(),
            Link::Cauchit => cauchy_hazard_against_tail(z),
        })
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn normal_cdf(z: f64) -> f64 {
    if z < -PROBIT_TAIL {
        // φ(z)·R(−z); underflows only where the true value is subnormal-or-below.
        FRAC_1_SQRT_2PI * (-0.5 * z * z).exp() * normal_mills_ratio(-z)
    } else {
        0.5 * libm::erfc(-z / SQRT_2)
    }
}

fn normal_log_cdf(z: f64) -> f64 {
    if z < -PROBIT_TAIL {
        -0.5 * z * z - LN_SQRT_2PI + normal_mills_ratio(-z).ln()
    } else if z < 0.0 {
        (0.5 * libm::erfc(-z / SQRT_2)).ln()
    } else {
        // ln(1 − Φ(−z)) from the relatively-accurate tail value, so the
        // tiny negative result keeps full precision.
        (-normal_cdf(-z)).ln_1p()
    }
}

fn cloglog_log_cdf(z: f64) -> f64 {
    let w = z.exp();
    if w == 0.0 {
        // G(z) ≈ e^z below the underflow point of e^z itself.
        z
    } else {
        log1mexp(-w)
    }
}

fn cauchy_cdf(z: f64) -> f64 {
    if z < -1.0 {
        (-1.0 / z).atan() / std::f64::consts::PI
    } else {
        0.5 + z.atan() / std::f64::consts::PI
    }
}

fn cauchy_log_cdf(z: f64) -> f64 {
    if z > 0.0 {
        (-cauchy_cdf(-z)).ln_1p()
    } else {
        cauchy_cdf(z).ln()
    }
}

/// `g(z)/Ḡ(z)` for the Cauchy law, parameterized so that the same routine
/// serves both hazards via `hazard_lower(z) = hazard_upper(−z)`.
fn cauchy_hazard_against_tail(z: f64) -> f64 {
    if z > 1.0 {
        // Ḡ(z) = arctan(1/z)/π exactly for z > 0.
        let q = 1.0 + z * z;
        if q.is_finite() {
            1.0 / (q * (1.0 / z).atan())
        } else {
            1.0 / z
        }
    } else {
        let g = 1.0 / (std::f64::consts::PI * (1.0 + z * z));
        g / cauchy_cdf(-z)
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Link::Logit => "logit",
            Link::Probit => "probit",
            Link::Cloglog => "cloglog",
            Link::Cauchit => "cauchit",
        };
        f.write_str(name)
    }
}

impl FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logit" => Ok(Link::Logit),
            "probit" => Ok(Link::Probit),
            "cloglog" => Ok(Link::Cloglog),
            "cauchit" => Ok(Link::Cauchit),
            other => Err(Error::InvalidParameter(format!(
                "unknown link '{other}' (expected logit, probit, cloglog or cauchit)"
            ))),
        }
    }
}

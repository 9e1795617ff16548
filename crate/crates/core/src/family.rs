//! Working-model families with canonical link.

use crate::math::{ln, sigmoid, softplus};
use core::f64::consts::PI;

/// A working GLM family `exp{yθ − b(θ) + c(y, τ)}` with canonical link.
///
/// The Gaussian family is scaled by its dispersion `τ = σ²`; the Bernoulli
/// family has `τ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GlmFamily {
    Gaussian,
    BernoulliLogit,
}

impl GlmFamily {
    pub fn name(self) -> &'static str {
        match self {
            GlmFamily::Gaussian => "gaussian",
            GlmFamily::BernoulliLogit => "bernoulli_logit",
        }
    }

    /// Cumulant function `b(θ)`.
    #[inline]
    pub fn cumulant(self, theta: f64) -> f64 {
        match self {
            GlmFamily::Gaussian => 0.5 * theta * theta,
            GlmFamily::BernoulliLogit => softplus(theta),
        }
    }

    /// Mean function `μ(θ) = b′(θ)`.
    #[inline]
    pub fn mean(self, theta: f64) -> f64 {
        match self {
            GlmFamily::Gaussian => theta,
            GlmFamily::BernoulliLogit => sigmoid(theta),
        }
    }

    /// Variance function `b″(θ)`.
    #[inline]
    pub fn variance(self, theta: f64) -> f64 {
        match self {
            GlmFamily::Gaussian => 1.0,
            GlmFamily::BernoulliLogit => {
                let p = sigmoid(theta);
                p * (1.0 - p)
            }
        }
    }

    /// Normalising term `c(y, τ)` of a single observation.
    #[inline]
    pub fn log_normalizer(self, y: f64, dispersion: f64) -> f64 {
        match self {
            GlmFamily::Gaussian => -0.5 * ln(2.0 * PI * dispersion) - y * y / (2.0 * dispersion),
            GlmFamily::BernoulliLogit => 0.0,
        }
    }

    /// Whether the dispersion is estimated (profiled) rather than fixed at one.
    pub fn has_free_dispersion(self) -> bool {
        matches!(self, GlmFamily::Gaussian)
    }

    /// Whether working models of this family carry an intercept by default.
    /// The Gaussian working model is fitted through the origin.
    pub fn default_intercept(self) -> bool {
        matches!(self, GlmFamily::BernoulliLogit)
    }

    /// Checks that `y` lies in the support of the family.
    pub fn accepts_response(self, y: f64) -> bool {
        match self {
            GlmFamily::Gaussian => y.is_finite(),
            GlmFamily::BernoulliLogit => y == 0.0 || y == 1.0,
        }
    }

    /// Canonical link `θ = g(μ)`; used to seed intercepts.
    pub fn link(self, mu: f64) -> f64 {
        match self {
            GlmFamily::Gaussian => mu,
            GlmFamily::BernoulliLogit => ln(mu / (1.0 - mu)),
        }
    }
}

impl core::fmt::Display for GlmFamily {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for GlmFamily {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(GlmFamily::Gaussian),
            "bernoulli_logit" | "logistic" | "binomial" => Ok(GlmFamily::BernoulliLogit),
            _ => Err(crate::Error::InvalidConfig("unknown family")),
        }
    }
}

//! Ensemble parameters and temperature schedules.
//!
//! The ensemble is the law on ℝⁿ proportional to
//! `exp(−(α/2) Σ λᵢ²) Πᵢ<ⱼ |λᵢ − λⱼ|^β`. The high-temperature window of
//! interest is `log(n)/n ≪ β ≪ 1/log(n)` with `α = nβ/2`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How the scale α is derived from `(n, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaConvention {
    /// α = nβ/2.
    #[default]
    HalfNBeta,
    /// α = 1 + nβ/2, which makes the second moment of the spectrum tend to 1
    /// exactly rather than asymptotically.
    OnePlusHalfNBeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n: usize,
    pub beta: f64,
    pub alpha: f64,
}

/// Build parameters with the canonical scale α = nβ/2.
pub fn make_params(n: usize, beta: f64) -> Result<EnsembleParams> {
    EnsembleParams::with_convention(n, beta, AlphaConvention::HalfNBeta)
}

impl EnsembleParams {
    pub fn with_convention(n: usize, beta: f64, convention: AlphaConvention) -> Result<Self> {
        validate_n_beta(n, beta)?;
        let half = n as f64 * beta / 2.0;
        let alpha = match convention {
            AlphaConvention::HalfNBeta => half,
            AlphaConvention::OnePlusHalfNBeta => 1.0 + half,
        };
        Ok(EnsembleParams { n, beta, alpha })
    }

    /// Parameters with an explicitly chosen scale.
    pub fn with_alpha(n: usize, beta: f64, alpha: f64) -> Result<Self> {
        validate_n_beta(n, beta)?;
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid("alpha", format!("must be positive and finite, got {alpha}")));
        }
        Ok(EnsembleParams { n, beta, alpha })
    }

    pub fn validate(&self) -> Result<()> {
        Self::with_alpha(self.n, self.beta, self.alpha).map(|_| ())
    }

    /// Check the extra condition α − β/4 > 0 needed by the tail bound.
    pub fn require_perturbable(&self) -> Result<()> {
        if self.alpha - self.beta / 4.0 > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid(
                "alpha",
                format!("alpha - beta/4 must be positive (alpha={}, beta={})", self.alpha, self.beta),
            ))
        }
    }

    /// Speed of the largest-particle deviations, nβ.
    pub fn n_beta(&self) -> f64 {
        self.n as f64 * self.beta
    }

    /// Exact expectation of `(1/n) Σ λᵢ²` under the matrix model:
    /// `(1 + β(n−1)/2) / α`.
    pub fn expected_second_moment(&self) -> f64 {
        (1.0 + self.beta * (self.n as f64 - 1.0) / 2.0) / self.alpha
    }
}

fn validate_n_beta(n: usize, beta: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 particles, got {n}")));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid("beta", format!("must be positive and finite, got {beta}")));
    }
    Ok(())
}

/// Functional form of a temperature schedule β(n).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ScheduleRule {
    /// β = c / (log n)^p, p ≥ 1.
    InverseLogPower { c: f64, p: f64 },
    /// β = c · n^(−γ), 0 < γ < 1.
    PowerLaw { c: f64, gamma: f64 },
    /// β = c.
    Constant { c: f64 },
}

impl ScheduleRule {
    pub fn c(&self) -> f64 {
        match *self {
            ScheduleRule::InverseLogPower { c, .. } | ScheduleRule::PowerLaw { c, .. } | ScheduleRule::Constant { c } => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSchedule {
    pub name: String,
    pub rule: ScheduleRule,
}

impl RegimeSchedule {
    pub fn new(name: impl Into<String>, rule: ScheduleRule) -> Result<Self> {
        let check_c = |c: f64| {
            if c.is_finite() && c > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid("c", format!("schedule constant must be positive, got {c}")))
            }
        };
        match rule {
            ScheduleRule::InverseLogPower { c, p } => {
                check_c(c)?;
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(Error::invalid("p", format!("need p >= 1, got {p}")));
                }
            }
            ScheduleRule::PowerLaw { c, gamma } => {
                check_c(c)?;
                if !(gamma > 0.0 && gamma < 1.0) {
                    return Err(Error::invalid("gamma", format!("need 0 < gamma < 1, got {gamma}")));
                }
            }
            ScheduleRule::Constant { c } => check_c(c)?,
        }
        Ok(RegimeSchedule { name: name.into(), rule })
    }

    /// β = c/(log n)².
    pub fn inverse_log_squared(c: f64) -> Result<Self> {
        Self::new("invlogsq", ScheduleRule::InverseLogPower { c, p: 2.0 })
    }

    /// Look up a schedule by its CLI name: `invlogsq`, `invlog`, `invlog:<p>`,
    /// `power:<gamma>` or `const`.
    pub fn from_name(name: &str, c: f64) -> Result<Self> {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        let parse_arg = |a: Option<&str>, what: &'static str| -> Result<f64> {
            let a = a.ok_or_else(|| Error::invalid(what, format!("schedule `{name}` needs `:{what}`")))?;
            a.parse::<f64>()
                .map_err(|_| Error::invalid(what, format!("cannot parse `{a}`")))
        };
        let rule = match head {
            "invlogsq" => ScheduleRule::InverseLogPower { c, p: 2.0 },
            "invlog" => ScheduleRule::InverseLogPower {
                c,
                p: if arg.is_some() { parse_arg(arg, "p")? } else { 1.0 },
            },
            "power" => ScheduleRule::PowerLaw {
                c,
                gamma: parse_arg(arg, "gamma")?,
            },
            "const" => ScheduleRule::Constant { c },
            _ => return Err(Error::invalid("schedule", format!("unknown schedule `{name}`"))),
        };
        Self::new(name, rule)
    }

    pub fn beta(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self.rule {
            ScheduleRule::InverseLogPower { c, p } => c / nf.ln().powf(p),
            ScheduleRule::PowerLaw { c, gamma } => c * nf.powf(-gamma),
            ScheduleRule::Constant { c } => c,
        }
    }

    pub fn params(&self, n: usize) -> Result<EnsembleParams> {
        make_params(n, self.beta(n))
    }
}

/// Concrete-n diagnostics for the window `log(n)/n ≪ β ≪ 1/log(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    pub n_beta: f64,
    pub beta_log_n: f64,
    pub log_n_over_n_beta: f64,
    /// `nβ > log n` and `β log n < 1`.
    pub inside_window: bool,
}

pub fn regime_report(params: &EnsembleParams) -> RegimeReport {
    let log_n = (params.n as f64).ln();
    let n_beta = params.n_beta();
    let beta_log_n = params.beta * log_n;
    RegimeReport {
        n_beta,
        beta_log_n,
        log_n_over_n_beta: log_n / n_beta,
        inside_window: n_beta > log_n && beta_log_n < 1.0,
    }
}

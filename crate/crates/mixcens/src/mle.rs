//! Maximum-likelihood estimation.
//!
//! The rate parameter has the closed-form profile solution
//! `delta(gamma) = w / power_sum(gamma)`, which reduces the two-parameter
//! problem to a one-dimensional fixed point for the shape:
//!
//! ```text
//! gamma <- w / ( delta(gamma) * power_log_sum(gamma) - sum ln x_i )
//! ```
//!
//! iterated to convergence, with a damped fallback when the plain iteration
//! cycles. Asymptotic confidence intervals come from the analytic observed
//! information (negative Hessian) at the fitted parameters.

use serde::Serialize;
use statrs::distribution::ContinuousCDF;

use crate::censoring::CensoredSample;
use crate::dist::{order_stat_pdf, WeibullParams};
use crate::error::{Error, Result};
use crate::quad::integrate_zero_inf;

/// Controls for [`fit_mle`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MleConfig {
    /// Starting shape value for the fixed-point iteration.
    pub gamma_init: f64,
    /// Convergence tolerance on successive shape iterates.
    pub tol: f64,
    pub max_iter: usize,
    /// Confidence intervals are reported at level 1 - alpha_level.
    pub alpha_level: f64,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self { gamma_init: 1.0, tol: 1e-8, max_iter: 500, alpha_level: 0.05 }
    }
}

/// Result of a maximum-likelihood fit.
#[derive(Debug, Clone, Serialize)]
pub struct MleResult {
    pub params: WeibullParams,
    pub iterations: usize,
    pub converged: bool,
    pub loglik: f64,
    /// Negative Hessian of the log-likelihood at the fit, [[gg, gd], [gd, dd]].
    pub observed_info: [[f64; 2]; 2],
    pub se_gamma: f64,
    pub se_delta: f64,
    pub aci_gamma: (f64, f64),
    pub aci_delta: (f64, f64),
}

/// Standard normal quantile at 1 - alpha/2.
pub(crate) fn normal_quantile_two_sided(alpha: f64) -> f64 {
    let std_normal = statrs::distribution::Normal::new(0.0, 1.0).expect("unit normal");
    std_normal.inverse_cdf(1.0 - alpha / 2.0)
}

/// Score vector (d/d gamma, d/d delta) of the censored log-likelihood.
pub fn score(sample: &CensoredSample, p: &WeibullParams) -> (f64, f64) {
    let s = sample.sufficients(p.gamma());
    let w = s.count as f64;
    (
        w / p.gamma() + s.log_sum - p.delta() * s.power_log_sum,
        w / p.delta() - s.power_sum,
    )
}

/// Observed information: the negative Hessian of the log-likelihood,
/// from the analytic second derivatives.
pub fn observed_information(sample: &CensoredSample, p: &WeibullParams) -> [[f64; 2]; 2] {
    let s = sample.sufficients(p.gamma());
    let w = s.count as f64;
    let gg = w / (p.gamma() * p.gamma()) + p.delta() * s.power_log2_sum;
    let gd = s.power_log_sum;
    let dd = w / (p.delta() * p.delta());
    [[gg, gd], [gd, dd]]
}

fn invert_2x2(m: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !det.is_finite() || det <= 0.0 {
        return Err(Error::NonConvergence(format!(
            "observed information is not positive definite (det = {det})"
        )));
    }
    Ok([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

/// Fit (gamma, delta) by the profile fixed-point iteration.
///
/// Errors on fewer than two failures or all-equal failure times; reaching
/// `max_iter` is reported through the `converged` flag, not an error.
pub fn fit_mle(sample: &CensoredSample, config: &MleConfig) -> Result<MleResult> {
    if sample.r() < 2 {
        return Err(Error::Data(format!(
            "maximum-likelihood fit needs at least 2 observed failures, got {}",
            sample.r()
        )));
    }
    let failures = sample.failures();
    if failures[sample.r() - 1] == failures[0] {
        return Err(Error::Data(
            "all observed failures are equal; the shape parameter is unidentifiable".into(),
        ));
    }
    if !(config.gamma_init > 0.0) || !(config.tol > 0.0) {
        return Err(Error::InvalidParameter(
            "gamma_init and tol must be positive".into(),
        ));
    }
    if !(config.alpha_level > 0.0 && config.alpha_level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha_level must lie in (0,1), got {}",
            config.alpha_level
        )));
    }

    let profile_update = |gamma: f64| -> Result<f64> {
        let s = sample.sufficients(gamma);
        let w = s.count as f64;
        let delta = w / s.power_sum;
        let denom = delta * s.power_log_sum - s.log_sum;
        let next = w / denom;
        if !next.is_finite() || next <= 0.0 {
            return Err(Error::NonConvergence(format!(
                "profile iteration left the parameter space at gamma = {gamma}"
            )));
        }
        Ok(next)
    };

    let mut gamma = config.gamma_init;
    let mut converged = false;
    let mut iterations = 0;
    let mut damped = false;
    let mut alternations = 0u32;
    let mut last_increment = 0.0f64;
    for k in 1..=config.max_iter {
        iterations = k;
        let mapped = profile_update(gamma)?;
        let next = if damped { 0.5 * (gamma + mapped) } else { mapped };
        let increment = next - gamma;
        if !damped {
            if increment * last_increment < 0.0 {
                alternations += 1;
                if alternations >= 5 {
                    damped = true;
                }
            } else {
                alternations = 0;
            }
            last_increment = increment;
        }
        gamma = next;
        if increment.abs() < config.tol {
            converged = true;
            break;
        }
    }

    let s = sample.sufficients(gamma);
    let delta = s.count as f64 / s.power_sum;
    let params = WeibullParams::new(gamma, delta)?;
    let loglik = sample.log_likelihood(&params);
    let observed_info = observed_information(sample, &params);
    let cov = invert_2x2(observed_info)?;
    let se_gamma = cov[0][0].sqrt();
    let se_delta = cov[1][1].sqrt();
    let z = normal_quantile_two_sided(config.alpha_level);
    Ok(MleResult {
        params,
        iterations,
        converged,
        loglik,
        observed_info,
        se_gamma,
        se_delta,
        aci_gamma: (gamma - z * se_gamma, gamma + z * se_gamma),
        aci_delta: (delta - z * se_delta, delta + z * se_delta),
    })
}

/// Expected (Fisher) information accumulated over the first `r_limit`
/// order statistics of a sample of size n.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FisherInfo {
    pub i11: f64,
    pub i12: f64,
    pub i22: f64,
    pub r_limit: usize,
}

/// Fisher information entries
///
/// ```text
/// I11 = int (1/gamma + ln t)^2 sum_{i<=r} f_{i:n}(t) dt
/// I12 = (1/delta) int (1/gamma + ln t) sum_{i<=r} f_{i:n}(t) dt
/// I22 = (1/delta^2) int sum_{i<=r} f_{i:n}(t) dt
/// ```
///
/// each evaluated by adaptive quadrature to 1e-8.
pub fn fisher_information(n: usize, r_limit: usize, p: &WeibullParams) -> Result<FisherInfo> {
    if r_limit == 0 || r_limit > n {
        return Err(Error::Index(format!("r_limit {r_limit} outside 1..={n}")));
    }
    let density_sum = |t: f64| -> f64 {
        (1..=r_limit)
            .map(|i| order_stat_pdf(t, i, n, p).unwrap_or(0.0))
            .sum()
    };
    let tol = 1e-9;
    let i11 = integrate_zero_inf(
        |t| {
            let g = 1.0 / p.gamma() + t.ln();
            g * g * density_sum(t)
        },
        tol,
        tol,
    )?;
    let i12 = integrate_zero_inf(|t| (1.0 / p.gamma() + t.ln()) * density_sum(t), tol, tol)?
        / p.delta();
    let i22 = integrate_zero_inf(density_sum, tol, tol)? / (p.delta() * p.delta());
    Ok(FisherInfo { i11, i12, i22, r_limit })
}

/// [`fisher_information`] with the summation limit at the scheme's
/// guaranteed failure count m.
pub fn fisher_information_for_scheme(
    scheme: crate::censoring::CensoringScheme,
    p: &WeibullParams,
) -> Result<FisherInfo> {
    fisher_information(scheme.n(), scheme.m(), p)
}

//! Bayesian estimation under independent gamma priors.
//!
//! With priors gamma ~ Gamma(alpha1, beta1) and delta ~ Gamma(alpha2, beta2)
//! (shape-rate convention, zeros allowed as the improper limit), the joint
//! posterior factorizes so that
//!
//! - delta | gamma is exactly Gamma(alpha2 + w, beta2 + power_sum(gamma)),
//! - gamma | delta has no closed form and is updated with a random-walk
//!   Metropolis step on its log conditional,
//!
//! where w is the observed failure count and power_sum includes the censored
//! contribution (n - w) u^gamma. Alternating the two updates yields the
//! posterior chain; the first `burn_in` states are discarded.

use rand::{Rng, SeedableRng};
use rand_distr::Distribution;
use serde::Serialize;

use crate::censoring::CensoredSample;
use crate::error::{Error, Result};
use crate::mle::{fit_mle, MleConfig};
use crate::rng::DetRng;

/// Hyperparameters of the independent gamma priors (shape-rate).
///
/// `alpha1, beta1` parametrize the prior on the Weibull shape and
/// `alpha2, beta2` the prior on the rate. All zeros gives the standard
/// noninformative improper limit; the delta conditional stays proper
/// whenever at least one failure is observed.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PriorSpec {
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
}

impl PriorSpec {
    pub fn new(alpha1: f64, beta1: f64, alpha2: f64, beta2: f64) -> Result<Self> {
        for (name, v) in [
            ("alpha1", alpha1),
            ("beta1", beta1),
            ("alpha2", alpha2),
            ("beta2", beta2),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "hyperparameter {name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(Self { alpha1, beta1, alpha2, beta2 })
    }

    /// The all-zero (improper) prior.
    pub fn zeros() -> Self {
        Self { alpha1: 0.0, beta1: 0.0, alpha2: 0.0, beta2: 0.0 }
    }
}

/// Chain controls for [`run_mh_gibbs`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct McmcConfig {
    /// Total chain length N.
    pub chain_length: usize,
    /// Discarded initial states M (< N).
    pub burn_in: usize,
    /// Random-walk proposal standard deviation for the shape update.
    /// `None` selects 0.5 x the MLE standard error of the shape when the
    /// fit is available, else 1.0.
    pub proposal_sd: Option<f64>,
    pub seed: u64,
    /// Initial (gamma, delta); `None` starts at the MLE when it converges,
    /// else at (1, 1).
    pub init: Option<(f64, f64)>,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self { chain_length: 11_000, burn_in: 1_000, proposal_sd: None, seed: 0, init: None }
    }
}

/// Retained posterior draws.
#[derive(Debug, Clone, Serialize)]
pub struct PosteriorSample {
    gamma_chain: Vec<f64>,
    delta_chain: Vec<f64>,
    pub acceptance_rate: f64,
    /// Set when the acceptance rate falls outside [0.05, 0.95].
    pub acceptance_warning: bool,
}

impl PosteriorSample {
    pub fn gamma_chain(&self) -> &[f64] {
        &self.gamma_chain
    }

    pub fn delta_chain(&self) -> &[f64] {
        &self.delta_chain
    }

    pub fn len(&self) -> usize {
        self.gamma_chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma_chain.is_empty()
    }
}

/// Log conditional density of the shape given the rate, up to a constant:
///
/// ```text
/// (alpha1 + w - 1) ln(gamma) + (gamma - 1) sum ln x_i
///   - delta [ sum x_i^gamma + (n - w) u^gamma ] - beta1 gamma
/// ```
pub fn log_conditional_gamma(
    gamma: f64,
    delta: f64,
    sample: &CensoredSample,
    prior: &PriorSpec,
) -> f64 {
    if gamma <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let s = sample.sufficients(gamma);
    let w = s.count as f64;
    (prior.alpha1 + w - 1.0) * gamma.ln() + (gamma - 1.0) * s.log_sum
        - delta * s.power_sum
        - prior.beta1 * gamma
}

/// Exact Gibbs draw of the rate given the shape:
/// Gamma(alpha2 + w, beta2 + power_sum(gamma)), shape-rate convention.
pub fn sample_conditional_delta<R: Rng + ?Sized>(
    gamma: f64,
    sample: &CensoredSample,
    prior: &PriorSpec,
    rng: &mut R,
) -> Result<f64> {
    let s = sample.sufficients(gamma);
    let shape = prior.alpha2 + s.count as f64;
    let rate = prior.beta2 + s.power_sum;
    draw_gamma(shape, rate, rng)
}

fn draw_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite() && rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma draw requires positive shape and rate, got ({shape}, {rate})"
        )));
    }
    let dist = rand_distr::Gamma::new(shape, 1.0 / rate)
        .map_err(|e| Error::InvalidParameter(format!("gamma distribution: {e}")))?;
    Ok(dist.sample(rng))
}

/// Metropolis-Hastings within Gibbs.
///
/// Each iteration proposes a new shape from N(current, proposal_sd^2)
/// (non-positive proposals are rejected outright), accepts with the usual
/// ratio of conditional densities, then draws the rate exactly from its
/// gamma conditional. Deterministic for a given seed.
pub fn run_mh_gibbs(
    sample: &CensoredSample,
    prior: &PriorSpec,
    config: &McmcConfig,
) -> Result<PosteriorSample> {
    if config.burn_in >= config.chain_length {
        return Err(Error::InvalidParameter(format!(
            "burn-in {} must be smaller than the chain length {}",
            config.burn_in, config.chain_length
        )));
    }
    if let Some(sd) = config.proposal_sd {
        if !(sd.is_finite() && sd > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "proposal standard deviation must be finite and > 0, got {sd}"
            )));
        }
    }

    // Resolve the initial state and proposal scale, fitting the MLE once
    // if either is left to its default.
    let needs_fit = config.init.is_none() || config.proposal_sd.is_none();
    let fit = if needs_fit { fit_mle(sample, &MleConfig::default()).ok() } else { None };
    let (mut gamma, delta0) = config.init.unwrap_or_else(|| {
        fit.as_ref()
            .filter(|f| f.converged)
            .map(|f| (f.params.gamma(), f.params.delta()))
            .unwrap_or((1.0, 1.0))
    });
    if !(gamma > 0.0 && delta0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "initial state must be positive, got ({gamma}, {delta0})"
        )));
    }
    let proposal_sd = config.proposal_sd.unwrap_or_else(|| {
        fit.as_ref()
            .filter(|f| f.converged && f.se_gamma.is_finite() && f.se_gamma > 0.0)
            .map(|f| 0.5 * f.se_gamma)
            .unwrap_or(1.0)
    });

    check_gamma_conditional_integrable(sample, prior, delta0)?;

    let mut rng = DetRng::seed_from_u64(config.seed);
    let normal = rand_distr::Normal::new(0.0, proposal_sd)
        .map_err(|e| Error::InvalidParameter(format!("proposal distribution: {e}")))?;

    // The shape conditional splits as a(gamma) - delta * power_sum(gamma);
    // caching both pieces for the current state leaves one sufficient-
    // statistics evaluation per iteration.
    let w = sample.r() as f64;
    let stats = |g: f64| {
        let s = sample.sufficients(g);
        let a = (prior.alpha1 + w - 1.0) * g.ln() + (g - 1.0) * s.log_sum - prior.beta1 * g;
        (a, s.power_sum)
    };
    let (mut a_cur, mut q_cur) = stats(gamma);
    let mut delta = delta0;
    let retained = config.chain_length - config.burn_in;
    let mut gamma_chain = Vec::with_capacity(retained);
    let mut delta_chain = Vec::with_capacity(retained);
    let mut accepted = 0usize;

    for step in 0..config.chain_length {
        let proposal = gamma + normal.sample(&mut rng);
        if proposal > 0.0 {
            let (a_prop, q_prop) = stats(proposal);
            if rng.random::<f64>().ln() <= (a_prop - delta * q_prop) - (a_cur - delta * q_cur) {
                gamma = proposal;
                a_cur = a_prop;
                q_cur = q_prop;
                accepted += 1;
            }
        }
        delta = draw_gamma(prior.alpha2 + w, prior.beta2 + q_cur, &mut rng)?;
        if step >= config.burn_in {
            gamma_chain.push(gamma);
            delta_chain.push(delta);
        }
    }

    let acceptance_rate = accepted as f64 / config.chain_length as f64;
    Ok(PosteriorSample {
        gamma_chain,
        delta_chain,
        acceptance_rate,
        acceptance_warning: !(0.05..=0.95).contains(&acceptance_rate),
    })
}

/// Grid mass test: the shape conditional must decay at both ends of a wide
/// log-spaced grid, otherwise the improper prior has produced a divergent
/// conditional and sampling would be meaningless.
fn check_gamma_conditional_integrable(
    sample: &CensoredSample,
    prior: &PriorSpec,
    delta: f64,
) -> Result<()> {
    let grid: Vec<f64> = (0..=120)
        .map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 120.0))
        .collect();
    let values: Vec<f64> = grid
        .iter()
        .map(|g| log_conditional_gamma(*g, delta, sample, prior))
        .collect();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let first = values[0];
    let last = values[values.len() - 1];
    if !(max.is_finite() && first < max - 10.0 && last < max - 10.0) {
        return Err(Error::Data(
            "the conditional posterior of the shape parameter does not decay on [1e-3, 1e3]; \
             the prior is too weak for these data"
                .into(),
        ));
    }
    Ok(())
}

/// Loss functions for [`bias_and_risk`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Loss {
    SquaredError,
    /// LINEX loss e^{d(theta - est)} - d(theta - est) - 1 with parameter d.
    Linex(f64),
}

/// One LINEX point estimate pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinexEstimate {
    pub d: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Point and interval summaries of a posterior sample.
#[derive(Debug, Clone, Serialize)]
pub struct BayesEstimates {
    /// Posterior means (optimal under squared-error loss).
    pub se_gamma: f64,
    pub se_delta: f64,
    /// LINEX estimates -(1/d) ln E[e^{-d theta}] for each requested d.
    pub linex: Vec<LinexEstimate>,
    pub hpd_gamma: (f64, f64),
    pub hpd_delta: (f64, f64),
    pub alpha_level: f64,
}

/// Numerically stable -(1/d) ln( mean_i e^{-d x_i} ).
fn linex_point(chain: &[f64], d: f64) -> f64 {
    let max = chain.iter().map(|x| -d * x).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = chain.iter().map(|x| (-d * x - max).exp()).sum();
    -(max + (sum / chain.len() as f64).ln()) / d
}

/// Smallest interval containing ceil((1-alpha) * len) ordered draws.
/// Ties in width resolve to the lower left endpoint.
pub fn hpd_interval(chain: &[f64], alpha: f64) -> Result<(f64, f64)> {
    if chain.is_empty() {
        return Err(Error::Data("cannot form an HPD interval from an empty chain".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "interval level must lie in (0,1), got alpha = {alpha}"
        )));
    }
    let mut sorted = chain.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let window = (((1.0 - alpha) * k as f64).ceil() as usize).clamp(1, k);
    let mut best = (sorted[0], sorted[window - 1]);
    let mut best_width = best.1 - best.0;
    for j in 1..=(k - window) {
        let width = sorted[j + window - 1] - sorted[j];
        if width < best_width {
            best_width = width;
            best = (sorted[j], sorted[j + window - 1]);
        }
    }
    Ok(best)
}

/// Summarize a posterior sample: squared-error and LINEX point estimates
/// plus HPD intervals at level 1 - alpha_level.
pub fn bayes_estimates(
    post: &PosteriorSample,
    loss_params: &[f64],
    alpha_level: f64,
) -> Result<BayesEstimates> {
    if post.is_empty() {
        return Err(Error::Data("posterior sample is empty".into()));
    }
    if let Some(d) = loss_params.iter().find(|d| **d == 0.0 || !d.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "LINEX loss parameter must be finite and nonzero, got {d}; \
             use the squared-error estimate for d -> 0"
        )));
    }
    let k = post.len() as f64;
    let se_gamma = post.gamma_chain.iter().sum::<f64>() / k;
    let se_delta = post.delta_chain.iter().sum::<f64>() / k;
    let linex = loss_params
        .iter()
        .map(|&d| LinexEstimate {
            d,
            gamma: linex_point(&post.gamma_chain, d),
            delta: linex_point(&post.delta_chain, d),
        })
        .collect();
    Ok(BayesEstimates {
        se_gamma,
        se_delta,
        linex,
        hpd_gamma: hpd_interval(&post.gamma_chain, alpha_level)?,
        hpd_delta: hpd_interval(&post.delta_chain, alpha_level)?,
        alpha_level,
    })
}

/// Bias and risk of a set of replicated estimates against the truth.
///
/// Bias is mean(est - truth). Risk is the mean loss: squared error for
/// [`Loss::SquaredError`], e^{d(truth-est)} - d(truth-est) - 1 for LINEX.
pub fn bias_and_risk(estimates: &[f64], truth: f64, loss: Loss) -> (f64, f64) {
    assert!(!estimates.is_empty(), "bias_and_risk needs at least one estimate");
    let n = estimates.len() as f64;
    let bias = estimates.iter().map(|e| e - truth).sum::<f64>() / n;
    let risk = match loss {
        Loss::SquaredError => estimates.iter().map(|e| (e - truth).powi(2)).sum::<f64>() / n,
        Loss::Linex(d) => {
            estimates
                .iter()
                .map(|e| {
                    let g = d * (truth - e);
                    g.exp() - g - 1.0
                })
                .sum::<f64>()
                / n
        }
    };
    (bias, risk)
}

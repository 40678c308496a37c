//! Study configuration files: flat declarative TOML mirroring the
//! [`mixcens::study::StudyDesign`] fields. Unknown keys are rejected.

use serde::Deserialize;

use mixcens::bayes::PriorSpec;
use mixcens::mle::MleConfig;
use mixcens::study::{StudyDesign, StudyMcmcConfig};
use mixcens::{CensoringScheme, WeibullParams};

use crate::AppError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    gamma: f64,
    delta: f64,
    replications: usize,
    base_seed: u64,
    #[serde(default = "default_alpha")]
    alpha_level: f64,
    #[serde(default = "default_loss_params")]
    loss_params: Vec<f64>,
    #[serde(default = "default_true")]
    run_mle: bool,
    #[serde(default)]
    run_bayes: bool,
    #[serde(default)]
    run_coverage: bool,
    #[serde(default, rename = "scheme")]
    schemes: Vec<RawScheme>,
    #[serde(default)]
    mle: RawMle,
    #[serde(default)]
    prior: RawPrior,
    #[serde(default)]
    mcmc: RawMcmc,
}

fn default_alpha() -> f64 {
    0.05
}

fn default_loss_params() -> Vec<f64> {
    vec![-1.0, 1.0]
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    n: usize,
    m: usize,
    s: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMle {
    #[serde(default = "default_gamma_init")]
    gamma_init: f64,
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default = "default_max_iter")]
    max_iter: usize,
}

fn default_gamma_init() -> f64 {
    1.0
}

fn default_tol() -> f64 {
    1e-8
}

fn default_max_iter() -> usize {
    500
}

impl Default for RawMle {
    fn default() -> Self {
        Self { gamma_init: 1.0, tol: 1e-8, max_iter: 500 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrior {
    #[serde(default = "default_one")]
    alpha1: f64,
    #[serde(default = "default_one")]
    beta1: f64,
    #[serde(default = "default_one")]
    alpha2: f64,
    #[serde(default = "default_one")]
    beta2: f64,
}

fn default_one() -> f64 {
    1.0
}

impl Default for RawPrior {
    fn default() -> Self {
        Self { alpha1: 1.0, beta1: 1.0, alpha2: 1.0, beta2: 1.0 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMcmc {
    #[serde(default = "default_chain_length")]
    chain_length: usize,
    #[serde(default = "default_burn_in")]
    burn_in: usize,
    #[serde(default)]
    proposal_sd: Option<f64>,
}

fn default_chain_length() -> usize {
    3_000
}

fn default_burn_in() -> usize {
    500
}

impl Default for RawMcmc {
    fn default() -> Self {
        Self { chain_length: 3_000, burn_in: 500, proposal_sd: None }
    }
}

/// A validated study plus which tables to produce.
pub struct StudyPlan {
    pub design: StudyDesign,
    pub run_mle: bool,
    pub run_bayes: bool,
    pub run_coverage: bool,
}

pub fn load_study_designs(text: &str) -> Result<StudyPlan, AppError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| AppError::Usage(format!("invalid study config: {e}")))?;
    let truth = WeibullParams::new(raw.gamma, raw.delta).map_err(AppError::usage_from)?;
    let schemes = if raw.schemes.is_empty() {
        StudyDesign::default_schemes()
    } else {
        raw.schemes
            .iter()
            .map(|s| CensoringScheme::new(s.n, s.m, s.s))
            .collect::<mixcens::Result<Vec<_>>>()
            .map_err(AppError::usage_from)?
    };
    let design = StudyDesign {
        truth,
        schemes,
        replications: raw.replications,
        base_seed: raw.base_seed,
        mle: MleConfig {
            gamma_init: raw.mle.gamma_init,
            tol: raw.mle.tol,
            max_iter: raw.mle.max_iter,
            alpha_level: raw.alpha_level,
        },
        prior: PriorSpec::new(raw.prior.alpha1, raw.prior.beta1, raw.prior.alpha2, raw.prior.beta2)
            .map_err(AppError::usage_from)?,
        mcmc: StudyMcmcConfig {
            chain_length: raw.mcmc.chain_length,
            burn_in: raw.mcmc.burn_in,
            proposal_sd: raw.mcmc.proposal_sd,
        },
        loss_params: raw.loss_params,
        alpha_level: raw.alpha_level,
    };
    design.validate().map_err(AppError::usage_from)?;
    Ok(StudyPlan {
        design,
        run_mle: raw.run_mle,
        run_bayes: raw.run_bayes,
        run_coverage: raw.run_coverage,
    })
}

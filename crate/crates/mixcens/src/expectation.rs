//! Expected failure count and expected test duration.
//!
//! The termination time is `T* = min(x_{n:n}, x_{m:n} + s)`. Its survival
//! function follows from the joint distribution of the two order statistics:
//! for x > s, with u = x - s and F the lifetime CDF,
//!
//! ```text
//! P(T* >= x) = P(x_{m:n} >= u, x_{n:n} >= x)
//!            = sum_{a=0}^{m-1} C(n,a) F(u)^a [ (1-F(u))^{n-a} - (F(x)-F(u))^{n-a} ]
//! ```
//!
//! and for x <= s simply 1 - F(x)^n. Integrating this survival function
//! gives the exact expected duration; a seeded Monte Carlo estimator serves
//! as an independent cross-check. The naive approximation that multiplies
//! the two marginal survival functions (ignoring the dependence between
//! order statistics of the same sample) is also provided for comparison,
//! with the censor clock shifted either forward or backward.
//!
//! The expected number of observed failures uses the Markov property of
//! order statistics: conditional on x_{m:n} = t the remaining n - m
//! lifetimes are i.i.d. truncated at t, so
//!
//! ```text
//! E[K] = m + (n-m) * E[ (F(x_{m:n}+s) - F(x_{m:n})) / (1 - F(x_{m:n})) ]
//! ```
//!
//! a single one-dimensional integral against the density of x_{m:n}.

use rand::SeedableRng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::factorial::ln_binomial;

use crate::censoring::CensoringScheme;
use crate::dist::{order_stat_pdf, WeibullParams};
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_from};
use crate::rng::{replication_seed, DetRng};

/// How a [`DurationReport`] was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DurationMethod {
    Quadrature,
    MonteCarlo,
}

/// Expected failures and expected duration for one scheme.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DurationReport {
    pub expected_failures: f64,
    pub expected_duration: f64,
    pub method: DurationMethod,
    /// Standard error of the duration estimate (Monte Carlo only).
    pub mc_std_error: Option<f64>,
}

/// Which way the naive product approximation shifts the censor clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProductShift {
    /// Evaluate the m-th order-statistic survival at x + s.
    PlusS,
    /// Evaluate it at max(x - s, 0).
    MinusS,
}

/// The conditional expected failure count
/// `sum_{r=m}^{n} r C(n,r) F(t)^r (1-F(t))^{n-r}` for a termination time t.
///
/// Unlike the unconditional expectation this can fall below m for small t.
pub fn expected_failures_given_time(t: f64, scheme: CensoringScheme, p: &WeibullParams) -> f64 {
    let n = scheme.n();
    let f = p.cdf(t);
    if f <= 0.0 {
        return 0.0;
    }
    if f >= 1.0 {
        return n as f64;
    }
    let (lf, ls) = (f.ln(), (1.0 - f).ln());
    let mut total = 0.0;
    for r in scheme.m()..=n {
        let log_term =
            ln_binomial(n as u64, r as u64) + r as f64 * lf + (n - r) as f64 * ls;
        total += r as f64 * log_term.exp();
    }
    total
}

/// Exact survival function of the termination time.
fn duration_survival(x: f64, scheme: CensoringScheme, p: &WeibullParams) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let n = scheme.n();
    let fx = p.cdf(x);
    if x <= scheme.s() {
        return 1.0 - fx.powi(n as i32);
    }
    let fu = p.cdf(x - scheme.s());
    let su = 1.0 - fu;
    let gap = (fx - fu).max(0.0);
    let mut total = 0.0;
    for a in 0..scheme.m() {
        let weight = (ln_binomial(n as u64, a as u64) + a as f64 * fu.ln().max(-745.0)).exp();
        let weight = if a == 0 { 1.0 } else { weight };
        total += weight * (su.powi((n - a) as i32) - gap.powi((n - a) as i32));
    }
    total.clamp(0.0, 1.0)
}

/// Expected duration and expected failure count by adaptive quadrature.
pub fn expected_duration(scheme: CensoringScheme, p: &WeibullParams) -> Result<DurationReport> {
    let tol = 1e-10;
    let s = scheme.s();
    let head = if s > 0.0 {
        integrate(|x| duration_survival(x, scheme, p), 0.0, s, tol, tol)?
    } else {
        0.0
    };
    let tail = integrate_from(|x| duration_survival(x, scheme, p), s, tol, tol)?;
    let expected_failures = expected_failures_quadrature(scheme, p)?;
    Ok(DurationReport {
        expected_failures,
        expected_duration: head + tail,
        method: DurationMethod::Quadrature,
        mc_std_error: None,
    })
}

/// Unconditional E[K] by quadrature over the m-th order statistic.
fn expected_failures_quadrature(scheme: CensoringScheme, p: &WeibullParams) -> Result<f64> {
    let (n, m, s) = (scheme.n(), scheme.m(), scheme.s());
    if m == n || s == 0.0 {
        return Ok(m as f64);
    }
    let integrand = |t: f64| {
        // P(X <= t+s | X > t) = 1 - S(t+s)/S(t), computed without
        // cancellation in the deep tail
        let q = -(-p.delta() * ((t + s).powf(p.gamma()) - t.powf(p.gamma()))).exp_m1();
        order_stat_pdf(t, m, n, p).unwrap_or(0.0) * q
    };
    let mean_q = integrate_from(integrand, 0.0, 1e-10, 1e-10)?;
    Ok(m as f64 + (n - m) as f64 * mean_q)
}

/// The naive independent-product approximation
/// `int (1 - F_{n:n}(x)) (1 - F_{m:n}(x +/- s)) dx`, for comparison with the
/// exact value. Order statistics of one sample are positively associated,
/// so multiplying their marginal survivals underestimates the joint
/// survival and this approximation never exceeds the exact duration.
pub fn expected_duration_product_approx(
    scheme: CensoringScheme,
    p: &WeibullParams,
    shift: ProductShift,
) -> Result<f64> {
    let n = scheme.n() as i32;
    let m = scheme.m();
    let s = scheme.s();
    let survival_mn = |y: f64| -> f64 {
        if y <= 0.0 {
            return 1.0;
        }
        let f = p.cdf(y);
        let mut total = 0.0;
        for a in 0..m {
            let log_term = if a == 0 {
                0.0
            } else {
                ln_binomial(scheme.n() as u64, a as u64) + a as f64 * f.ln()
            };
            total += log_term.exp() * (1.0 - f).powi(n - a as i32);
        }
        total.clamp(0.0, 1.0)
    };
    let integrand = move |x: f64| {
        let arg = match shift {
            ProductShift::PlusS => x + s,
            ProductShift::MinusS => (x - s).max(0.0),
        };
        (1.0 - p.cdf(x).powi(n)) * survival_mn(arg)
    };
    integrate_from(integrand, 0.0, 1e-10, 1e-10)
}

/// Monte Carlo estimate of expected duration and expected failure count.
///
/// Deterministic for a given seed; per-replication sub-seeds make the result
/// independent of evaluation order.
pub fn expected_duration_mc(
    scheme: CensoringScheme,
    p: &WeibullParams,
    replications: usize,
    seed: u64,
) -> DurationReport {
    let (sum, sum_sq, fail_sum) = (0..replications as u64)
        .map(|rep| {
            let mut rng = DetRng::seed_from_u64(replication_seed(seed, 0, rep, 0));
            simulate_termination(scheme, p, &mut rng)
        })
        .fold((0.0, 0.0, 0.0f64), |(a, b, c), (t, k)| (a + t, b + t * t, c + k as f64));
    let reps = replications as f64;
    let mean = sum / reps;
    let var = (sum_sq / reps - mean * mean).max(0.0);
    DurationReport {
        expected_failures: fail_sum / reps,
        expected_duration: mean,
        method: DurationMethod::MonteCarlo,
        mc_std_error: Some((var / reps).sqrt()),
    }
}

/// One simulated test: returns (termination time, observed failures).
fn simulate_termination<R: rand::Rng + ?Sized>(
    scheme: CensoringScheme,
    p: &WeibullParams,
    rng: &mut R,
) -> (f64, usize) {
    let mut draws: Vec<f64> = (0..scheme.n()).map(|_| p.draw(rng)).collect();
    draws.sort_by(f64::total_cmp);
    let tstar = draws[scheme.n() - 1].min(draws[scheme.m() - 1] + scheme.s());
    let k = draws.partition_point(|x| *x <= tstar);
    (tstar, k)
}

/// Outcome of the scale-invariance checks: scaling every lifetime by alpha
/// (equivalently mapping the rate to delta / alpha^gamma) and the
/// supplementary time to alpha * s must leave the failure-count distribution
/// unchanged and multiply the expected duration by alpha.
#[derive(Debug, Clone, Serialize)]
pub struct ScaleCheckReport {
    pub alpha: f64,
    pub duration_base: f64,
    pub duration_scaled: f64,
    /// duration_scaled / duration_base, which should equal alpha.
    pub duration_ratio: f64,
    pub duration_ratio_error: f64,
    pub duration_pass: bool,
    /// Paired-seed chi-square statistic comparing the two failure-count
    /// histograms, its degrees of freedom and p-value.
    pub count_chi_square: f64,
    pub count_dof: usize,
    pub count_p_value: f64,
    pub count_pass: bool,
    pub mean_count_base: f64,
    pub mean_count_scaled: f64,
    /// |difference| of the mean counts divided by its paired standard error.
    pub mean_count_diff_in_se: f64,
    pub mean_count_pass: bool,
}

/// Verify both invariance properties for a given scale factor.
pub fn check_scale_invariance(
    scheme: CensoringScheme,
    p: &WeibullParams,
    alpha: f64,
    replications: usize,
    seed: u64,
) -> Result<ScaleCheckReport> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scale factor must be finite and > 0, got {alpha}"
        )));
    }
    let scaled_scheme = CensoringScheme::new(scheme.n(), scheme.m(), scheme.s() * alpha)?;
    let scaled_params = WeibullParams::new(p.gamma(), p.delta() / alpha.powf(p.gamma()))?;

    let duration_base = expected_duration(scheme, p)?.expected_duration;
    let duration_scaled = expected_duration(scaled_scheme, &scaled_params)?.expected_duration;
    let duration_ratio = duration_scaled / duration_base;
    let duration_ratio_error = (duration_ratio - alpha).abs();
    let duration_pass = duration_ratio_error < 1e-6 * alpha.max(1.0);

    // Paired-seed Monte Carlo: the same underlying uniforms drive both
    // configurations, so any systematic difference in the failure counts
    // indicates a broken transformation, not sampling noise.
    let n_bins = scheme.n() - scheme.m() + 1;
    let mut counts_base = vec![0u64; n_bins];
    let mut counts_scaled = vec![0u64; n_bins];
    let mut diff_sum = 0.0;
    let mut diff_sq = 0.0;
    for rep in 0..replications as u64 {
        let sub = replication_seed(seed, 1, rep, 0);
        let mut rng = DetRng::seed_from_u64(sub);
        let (_, k_base) = simulate_termination(scheme, p, &mut rng);
        let mut rng = DetRng::seed_from_u64(sub);
        let (_, k_scaled) = simulate_termination(scaled_scheme, &scaled_params, &mut rng);
        counts_base[k_base - scheme.m()] += 1;
        counts_scaled[k_scaled - scheme.m()] += 1;
        let d = k_scaled as f64 - k_base as f64;
        diff_sum += d;
        diff_sq += d * d;
    }
    let reps = replications as f64;
    let mean_base = counts_base
        .iter()
        .enumerate()
        .map(|(i, c)| (scheme.m() + i) as f64 * *c as f64)
        .sum::<f64>()
        / reps;
    let mean_scaled = counts_scaled
        .iter()
        .enumerate()
        .map(|(i, c)| (scheme.m() + i) as f64 * *c as f64)
        .sum::<f64>()
        / reps;
    let mean_diff = diff_sum / reps;
    let var_diff = (diff_sq / reps - mean_diff * mean_diff).max(0.0);
    let se_diff = (var_diff / reps).sqrt();
    let mean_count_diff_in_se = if se_diff > 0.0 {
        mean_diff.abs() / se_diff
    } else if mean_diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let mean_count_pass = mean_count_diff_in_se < 3.0;

    // Two-sample chi-square over bins where at least one histogram has mass.
    let mut chi = 0.0;
    let mut dof = 0usize;
    for (a, b) in counts_base.iter().zip(&counts_scaled) {
        let total = (a + b) as f64;
        if total > 0.0 {
            let d = *a as f64 - *b as f64;
            chi += d * d / total;
            dof += 1;
        }
    }
    let dof = dof.saturating_sub(1);
    let count_p_value = if dof == 0 {
        1.0
    } else {
        1.0 - ChiSquared::new(dof as f64).expect("dof > 0").cdf(chi)
    };
    let count_pass = count_p_value > 1e-3;

    Ok(ScaleCheckReport {
        alpha,
        duration_base,
        duration_scaled,
        duration_ratio,
        duration_ratio_error,
        duration_pass,
        count_chi_square: chi,
        count_dof: dof,
        count_p_value,
        count_pass,
        mean_count_base: mean_base,
        mean_count_scaled: mean_scaled,
        mean_count_diff_in_se,
        mean_count_pass,
    })
}

//! Lifetime distributions: the Weibull model used for inference plus the
//! Lindley and inverse Weibull comparators used in goodness-of-fit reports,
//! and order-statistic densities/CDFs for the Weibull.
//!
//! The Weibull is parametrized with shape `gamma` and rate-like `delta`:
//!
//! ```text
//! f(x) = gamma * delta * x^(gamma-1) * exp(-delta * x^gamma),    x > 0
//! F(x) = 1 - exp(-delta * x^gamma)
//! ```
//!
//! Densities are evaluated in log space so large `x^gamma` never overflows
//! before the final exponential.

use rand::{Rng, SeedableRng};
use serde::Serialize;
use statrs::function::factorial::ln_binomial;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::rng::DetRng;

/// ln(1 - e^{-z}) for z > 0, stable for both small and large z.
pub(crate) fn ln_one_minus_exp_neg(z: f64) -> f64 {
    if z <= 0.0 {
        f64::NEG_INFINITY
    } else if z < std::f64::consts::LN_2 {
        (-(-z).exp_m1()).ln()
    } else {
        (-(-z).exp()).ln_1p()
    }
}

/// Weibull shape/rate parameter pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeibullParams {
    gamma: f64,
    delta: f64,
}

impl WeibullParams {
    /// Construct validated parameters; both must be finite and positive.
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Weibull shape must be finite and > 0, got {gamma}"
            )));
        }
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Weibull rate must be finite and > 0, got {delta}"
            )));
        }
        Ok(Self { gamma, delta })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Log density at `x`; domain error for x <= 0.
    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("Weibull density requires x > 0, got {x}")));
        }
        let lx = x.ln();
        Ok(self.gamma.ln() + self.delta.ln() + (self.gamma - 1.0) * lx
            - self.delta * (self.gamma * lx).exp())
    }

    /// Density at `x`; domain error for x <= 0.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.log_pdf(x)?.exp())
    }

    /// Distribution function, extended with F(x) = 0 for x <= 0.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.delta * x.powf(self.gamma)).exp_m1()
        }
    }

    /// Survival function 1 - F(x).
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.delta * x.powf(self.gamma)).exp()
        }
    }

    /// Quantile function on (0, 1): inverse of `cdf`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0,1), got {u}")));
        }
        Ok((-(-u).ln_1p() / self.delta).powf(1.0 / self.gamma))
    }

    /// Hazard rate gamma * delta * t^(gamma-1).
    pub fn hazard(&self, t: f64) -> f64 {
        self.gamma * self.delta * t.powf(self.gamma - 1.0)
    }

    /// Distribution mean Gamma(1 + 1/gamma) / delta^(1/gamma).
    pub fn mean(&self) -> f64 {
        (ln_gamma(1.0 + 1.0 / self.gamma) - self.delta.ln() / self.gamma).exp()
    }

    /// One inverse-CDF draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // random::<f64>() lies in [0, 1); shift away from u = 0 so the
        // transform never produces a zero lifetime.
        loop {
            let u = rng.random::<f64>();
            if u > 0.0 {
                // survival^{-1}: x = (-ln u / delta)^{1/gamma}
                return ((-u.ln()) / self.delta).powf(1.0 / self.gamma);
            }
        }
    }

    /// `count` i.i.d. draws, deterministic for a given seed.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = DetRng::seed_from_u64(seed);
        (0..count).map(|_| self.draw(&mut rng)).collect()
    }
}

/// Log density of the i-th order statistic of n Weibull lifetimes:
///
/// ```text
/// f_{i:n}(t) = i * C(n,i) * gamma * delta * t^(gamma-1)
///              * exp(-delta t^gamma (n-i+1)) * (1 - exp(-delta t^gamma))^(i-1)
/// ```
pub fn order_stat_log_pdf(t: f64, i: usize, n: usize, p: &WeibullParams) -> Result<f64> {
    check_order_index(i, n)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("order statistic density requires t > 0, got {t}")));
    }
    let z = p.delta() * t.powf(p.gamma());
    let mut lp = (i as f64).ln()
        + ln_binomial(n as u64, i as u64)
        + p.gamma().ln()
        + p.delta().ln()
        + (p.gamma() - 1.0) * t.ln()
        - z * (n - i + 1) as f64;
    if i > 1 {
        lp += (i - 1) as f64 * ln_one_minus_exp_neg(z);
    }
    Ok(lp)
}

/// Density of the i-th order statistic; see [`order_stat_log_pdf`].
pub fn order_stat_pdf(t: f64, i: usize, n: usize, p: &WeibullParams) -> Result<f64> {
    Ok(order_stat_log_pdf(t, i, n, p)?.exp())
}

/// CDF of the i-th order statistic, the binomial tail
/// `sum_{j=i}^{n} C(n,j) F(x)^j (1-F(x))^(n-j)` evaluated in log space.
pub fn order_stat_cdf(x: f64, i: usize, n: usize, p: &WeibullParams) -> Result<f64> {
    check_order_index(i, n)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    let z = p.delta() * x.powf(p.gamma());
    let log_f = ln_one_minus_exp_neg(z);
    let log_s = -z;
    if log_f == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    // log-sum-exp over the tail terms
    let mut terms = Vec::with_capacity(n - i + 1);
    let mut max_term = f64::NEG_INFINITY;
    for j in i..=n {
        let t = ln_binomial(n as u64, j as u64) + j as f64 * log_f + (n - j) as f64 * log_s;
        max_term = max_term.max(t);
        terms.push(t);
    }
    if max_term == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let sum: f64 = terms.iter().map(|t| (t - max_term).exp()).sum();
    Ok((max_term + sum.ln()).exp().min(1.0))
}

fn check_order_index(i: usize, n: usize) -> Result<()> {
    if n == 0 || i == 0 || i > n {
        Err(Error::Index(format!("order statistic index {i} outside 1..={n}")))
    } else {
        Ok(())
    }
}

/// One-parameter Lindley distribution,
/// f(x) = theta^2/(1+theta) * (1+x) * exp(-theta x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LindleyParams {
    theta: f64,
}

impl LindleyParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Lindley parameter must be finite and > 0, got {theta}"
            )));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("Lindley density requires x > 0, got {x}")));
        }
        Ok(2.0 * self.theta.ln() - (1.0 + self.theta).ln() + x.ln_1p() - self.theta * x)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.log_pdf(x)?.exp())
    }

    /// F(x) = 1 - (1 + theta x / (1+theta)) e^{-theta x}.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            1.0 - (1.0 + self.theta * x / (1.0 + self.theta)) * (-self.theta * x).exp()
        }
    }
}

/// Inverse Weibull (Frechet-type), F(x) = exp(-delta x^{-gamma}).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseWeibullParams {
    gamma: f64,
    delta: f64,
}

impl InverseWeibullParams {
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 || !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "inverse Weibull parameters must be finite and > 0, got ({gamma}, {delta})"
            )));
        }
        Ok(Self { gamma, delta })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!(
                "inverse Weibull density requires x > 0, got {x}"
            )));
        }
        Ok(self.gamma.ln() + self.delta.ln() - (self.gamma + 1.0) * x.ln()
            - self.delta * x.powf(-self.gamma))
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.log_pdf(x)?.exp())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-self.delta * x.powf(-self.gamma)).exp()
        }
    }

    /// Quantile: x = (delta / (-ln u))^{1/gamma}.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0,1), got {u}")));
        }
        Ok((self.delta / (-u.ln())).powf(1.0 / self.gamma))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_zero_inf, integrate};
    use approx::assert_abs_diff_eq;

    fn wp(g: f64, d: f64) -> WeibullParams {
        WeibullParams::new(g, d).unwrap()
    }

    #[test]
    fn pdf_special_cases() {
        // exponential special case at x = 1
        assert_abs_diff_eq!(wp(1.0, 1.0).pdf(1.0).unwrap(), (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(wp(2.0, 1.0).pdf(1.0).unwrap(), 2.0 * (-1.0f64).exp(), epsilon = 1e-15);
        assert!(wp(1.0, 1.0).pdf(0.0).is_err());
        assert!(wp(1.0, 1.0).pdf(-1.0).is_err());
    }

    #[test]
    fn pdf_normalizes() {
        let p = wp(1.5, 2.0);
        let v = integrate_zero_inf(|x| p.pdf(x).unwrap_or(0.0), 1e-10, 0.0).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn cdf_values_and_limits() {
        assert_abs_diff_eq!(wp(1.0, 1.0).cdf(1.0), 1.0 - (-1.0f64).exp(), epsilon = 1e-15);
        assert_eq!(wp(1.0, 1.0).cdf(0.0), 0.0);
        assert_eq!(wp(1.0, 1.0).cdf(-2.0), 0.0);
        assert_abs_diff_eq!(wp(1.0, 1.0).cdf(1e6), 1.0, epsilon = 1e-15);
        // high-precision reference for (x=2, gamma=1.5, delta=2)
        assert_abs_diff_eq!(wp(1.5, 2.0).cdf(2.0), 0.996506510723, epsilon = 1e-9);
    }

    #[test]
    fn quantile_closed_forms_and_round_trip() {
        let p = wp(1.0, 1.0);
        assert_abs_diff_eq!(p.quantile(1.0 - (-1.0f64).exp()).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            wp(2.0, 1.0).quantile(0.5).unwrap(),
            0.832554611158,
            epsilon = 1e-10
        );
        let p = wp(1.5, 2.0);
        for k in 1..100 {
            let u = k as f64 / 100.0;
            assert_abs_diff_eq!(p.cdf(p.quantile(u).unwrap()), u, epsilon = 1e-12);
        }
        assert!(p.quantile(0.0).is_err());
        assert!(p.quantile(1.0).is_err());
    }

    #[test]
    fn hazard_matches_ratio() {
        let p = wp(1.0, 3.0);
        assert_abs_diff_eq!(p.hazard(0.3), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.hazard(7.0), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(wp(2.0, 1.0).hazard(2.0), 4.0, epsilon = 1e-12);
        let p = wp(1.7, 0.8);
        for k in 1..=20 {
            let t = k as f64 * 0.25;
            let ratio = p.pdf(t).unwrap() / p.survival(t);
            assert_abs_diff_eq!(p.hazard(t), ratio, epsilon = 1e-10);
        }
    }

    #[test]
    fn order_stat_pdf_reduces_to_pdf() {
        let p = wp(1.3, 0.9);
        for k in 1..=10 {
            let t = k as f64 * 0.4;
            assert_abs_diff_eq!(
                order_stat_pdf(t, 1, 1, &p).unwrap(),
                p.pdf(t).unwrap(),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn order_stat_pdf_normalizes() {
        let p = wp(1.0, 1.0);
        let v = integrate_zero_inf(|t| order_stat_pdf(t, 3, 5, &p).unwrap_or(0.0), 1e-10, 0.0)
            .unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn order_stat_index_errors() {
        let p = wp(1.0, 1.0);
        assert!(order_stat_pdf(1.0, 0, 5, &p).is_err());
        assert!(order_stat_pdf(1.0, 6, 5, &p).is_err());
        assert!(order_stat_cdf(1.0, 0, 5, &p).is_err());
    }

    #[test]
    fn order_stat_cdf_extremes() {
        let p = wp(1.5, 2.0);
        for k in 1..=8 {
            let x = k as f64 * 0.3;
            let f = p.cdf(x);
            assert_abs_diff_eq!(order_stat_cdf(x, 5, 5, &p).unwrap(), f.powi(5), epsilon = 1e-12);
            assert_abs_diff_eq!(
                order_stat_cdf(x, 1, 5, &p).unwrap(),
                1.0 - (1.0 - f).powi(5),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn order_stat_cdf_derivative_matches_pdf() {
        let p = wp(1.5, 2.0);
        let (i, n) = (3, 7);
        for k in 1..=8 {
            let x = k as f64 * 0.25;
            let h = 1e-5;
            let deriv = (order_stat_cdf(x + h, i, n, &p).unwrap()
                - order_stat_cdf(x - h, i, n, &p).unwrap())
                / (2.0 * h);
            assert_abs_diff_eq!(deriv, order_stat_pdf(x, i, n, &p).unwrap(), epsilon = 1e-6);
        }
    }

    #[test]
    fn order_stat_completeness() {
        // sum_i f_{i:n} = n * f
        let p = wp(1.5, 2.0);
        let n = 9;
        for k in 1..=8 {
            let t = k as f64 * 0.3;
            let total: f64 = (1..=n).map(|i| order_stat_pdf(t, i, n, &p).unwrap()).sum();
            assert_abs_diff_eq!(total, n as f64 * p.pdf(t).unwrap(), epsilon = 1e-8);
        }
    }

    #[test]
    fn order_stat_pdf_matches_monte_carlo() {
        // histogram of the 3rd order statistic of 5 exponentials
        let p = wp(1.0, 1.0);
        let mut rng = DetRng::seed_from_u64(11);
        let reps = 1_000_000usize;
        let edges: Vec<f64> = (0..=10).map(|k| k as f64 * 0.25).collect();
        let mut counts = vec![0usize; edges.len() - 1];
        for _ in 0..reps {
            let mut xs: Vec<f64> = (0..5).map(|_| p.draw(&mut rng)).collect();
            xs.sort_by(f64::total_cmp);
            let t = xs[2];
            for b in 0..counts.len() {
                if t >= edges[b] && t < edges[b + 1] {
                    counts[b] += 1;
                    break;
                }
            }
        }
        for b in 0..counts.len() {
            let prob = integrate(
                |t| order_stat_pdf(t, 3, 5, &p).unwrap_or(0.0),
                edges[b],
                edges[b + 1],
                1e-10,
                0.0,
            )
            .unwrap();
            let freq = counts[b] as f64 / reps as f64;
            let se = (prob * (1.0 - prob) / reps as f64).sqrt();
            assert!(
                (freq - prob).abs() < 4.0 * se + 1e-6,
                "bin {b}: freq {freq} vs prob {prob}"
            );
        }
    }

    #[test]
    fn sampling_is_deterministic_and_calibrated() {
        let p = wp(1.0, 1.0);
        assert_eq!(p.sample(100, 7), p.sample(100, 7));
        assert_ne!(p.sample(100, 7), p.sample(100, 8));

        let draws = p.sample(1_000_000, 123);
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert_abs_diff_eq!(mean, 1.0, epsilon = 5e-3);

        // KS distance of the empirical CDF against F
        let mut sorted = draws;
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mut dmax: f64 = 0.0;
        for (k, x) in sorted.iter().enumerate() {
            let f = p.cdf(*x);
            let hi = (k + 1) as f64 / n;
            let lo = k as f64 / n;
            dmax = dmax.max((f - hi).abs()).max((f - lo).abs());
        }
        assert!(dmax < 0.005, "KS distance {dmax}");
    }

    #[test]
    fn lindley_basics() {
        let p = LindleyParams::new(0.9096).unwrap();
        let v = integrate_zero_inf(|x| p.pdf(x).unwrap_or(0.0), 1e-10, 0.0).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(p.cdf(1e8), 1.0, epsilon = 1e-12);
        assert_eq!(p.cdf(0.0), 0.0);
        // CDF is the integral of the density
        let num = integrate(|x| p.pdf(x).unwrap_or(0.0), 0.0, 2.0, 1e-12, 0.0).unwrap();
        assert_abs_diff_eq!(num, p.cdf(2.0), epsilon = 1e-10);
        assert!(LindleyParams::new(0.0).is_err());
    }

    #[test]
    fn inverse_weibull_basics() {
        let p = InverseWeibullParams::new(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.cdf(1.0), (-1.0f64).exp(), epsilon = 1e-15);
        let p = InverseWeibullParams::new(1.6, 1.1).unwrap();
        let v = integrate_zero_inf(|x| p.pdf(x).unwrap_or(0.0), 1e-10, 0.0).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-8);
        for k in 1..10 {
            let u = k as f64 / 10.0;
            assert_abs_diff_eq!(p.cdf(p.quantile(u).unwrap()), u, epsilon = 1e-12);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(WeibullParams::new(0.0, 1.0).is_err());
        assert!(WeibullParams::new(1.0, -1.0).is_err());
        assert!(WeibullParams::new(f64::NAN, 1.0).is_err());
        assert!(InverseWeibullParams::new(1.0, 0.0).is_err());
    }
}

//! Goodness of fit: Kolmogorov-Smirnov test, information criteria, and
//! model-comparison reports for the Weibull, Lindley and inverse Weibull
//! fits on complete data, plus plot-point export (density/histogram, CDF,
//! PP and QQ panels) for external plotting.

use serde::Serialize;

use crate::censoring::{CensoredSample, CensoringScheme};
use crate::dist::{InverseWeibullParams, LindleyParams, WeibullParams};
use crate::error::{Error, Result};
use crate::mle::{fit_mle, MleConfig, MleResult};

/// The three candidate lifetime models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelKind {
    Weibull,
    Lindley,
    InverseWeibull,
}

/// A fitted model with evaluable CDF/quantile, for tests and plotting.
#[derive(Debug, Clone, Copy)]
pub enum FittedModel {
    Weibull(WeibullParams),
    Lindley(LindleyParams),
    InverseWeibull(InverseWeibullParams),
}

impl FittedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            FittedModel::Weibull(_) => ModelKind::Weibull,
            FittedModel::Lindley(_) => ModelKind::Lindley,
            FittedModel::InverseWeibull(_) => ModelKind::InverseWeibull,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            FittedModel::Weibull(p) => p.cdf(x),
            FittedModel::Lindley(p) => p.cdf(x),
            FittedModel::InverseWeibull(p) => p.cdf(x),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let r = match self {
            FittedModel::Weibull(p) => p.pdf(x),
            FittedModel::Lindley(p) => p.pdf(x),
            FittedModel::InverseWeibull(p) => p.pdf(x),
        };
        r.unwrap_or(0.0)
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        match self {
            FittedModel::Weibull(p) => p.quantile(u),
            FittedModel::InverseWeibull(p) => p.quantile(u),
            // the Lindley CDF has no closed inverse; bisect it
            FittedModel::Lindley(p) => {
                if !(u > 0.0 && u < 1.0) {
                    return Err(Error::Domain(format!(
                        "quantile level must lie in (0,1), got {u}"
                    )));
                }
                let mut hi = 1.0;
                while p.cdf(hi) < u {
                    hi *= 2.0;
                    if hi > 1e12 {
                        return Err(Error::NonConvergence("Lindley quantile bracket".into()));
                    }
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if p.cdf(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }

    pub fn estimates(&self) -> Vec<f64> {
        match self {
            FittedModel::Weibull(p) => vec![p.gamma(), p.delta()],
            FittedModel::Lindley(p) => vec![p.theta()],
            FittedModel::InverseWeibull(p) => vec![p.gamma(), p.delta()],
        }
    }
}

/// Model-fit summary for one candidate distribution.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub model: ModelKind,
    pub estimates: Vec<f64>,
    pub ks_stat: f64,
    pub p_value: f64,
    /// -2 x maximized log-likelihood (the deviance-style quantity the
    /// information criteria are built from).
    pub nll2: f64,
    pub aic: f64,
    pub aicc: f64,
    pub bic: f64,
    pub hqc: f64,
}

/// One-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
///
/// D is the maximum of |F(x_(i)) - i/n| and |F(x_(i)) - (i-1)/n| over the
/// sorted sample; the p-value evaluates the asymptotic Kolmogorov survival
/// function at sqrt(n) * D.
pub fn ks_test<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::Data("KS test needs at least one observation".into()));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x);
        d = d
            .max((f - (i + 1) as f64 / n).abs())
            .max((f - i as f64 / n).abs());
    }
    Ok((d, kolmogorov_pvalue(n.sqrt() * d)))
}

/// Asymptotic Kolmogorov survival function
/// `2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2)`, truncated once terms fall
/// below 1e-12, clamped to [0, 1].
pub fn kolmogorov_pvalue(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=1000 {
        let term = (-2.0 * (j * j) as f64 * t * t).exp();
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

///AIC / AICC / BIC / HQC from `nll2 = -2 log L`, parameter count k and
/// sample size n.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InformationCriteria {
    pub aic: f64,
    pub aicc: f64,
    pub bic: f64,
    pub hqc: f64,
}

pub fn information_criteria(nll2: f64, k: usize, n: usize) -> Result<InformationCriteria> {
    if n <= k + 1 {
        return Err(Error::Data(format!(
            "AICC needs n > k + 1, got n = {n}, k = {k}"
        )));
    }
    let kf = k as f64;
    let nf = n as f64;
    let aic = 2.0 * kf + nll2;
    Ok(InformationCriteria {
        aic,
        aicc: aic + 2.0 * kf * (kf + 1.0) / (nf - kf - 1.0),
        bic: kf * nf.ln() + nll2,
        hqc: 2.0 * kf * nf.ln().ln() + nll2,
    })
}

/// Closed-form Lindley maximum-likelihood estimate
/// `theta = [-(m-1) + sqrt((m-1)^2 + 8m)] / (2m)` with m the sample mean.
pub fn fit_lindley(data: &[f64]) -> Result<LindleyParams> {
    if data.is_empty() {
        return Err(Error::Data("cannot fit an empty sample".into()));
    }
    if let Some(bad) = data.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::Data(format!("observations must be finite and > 0, got {bad}")));
    }
    let mean = data.iter().sum::<f64>() / data.len() as f64;
    let theta = (-(mean - 1.0) + ((mean - 1.0).powi(2) + 8.0 * mean).sqrt()) / (2.0 * mean);
    LindleyParams::new(theta)
}

/// Inverse Weibull fit: the reciprocals 1/x of an inverse-Weibull sample are
/// Weibull with the same (gamma, delta), so the profile fixed-point fit on
/// the transformed data gives the inverse Weibull MLE directly.
pub fn fit_invweibull(data: &[f64], config: &MleConfig) -> Result<InverseWeibullParams> {
    if data.is_empty() {
        return Err(Error::Data("cannot fit an empty sample".into()));
    }
    if let Some(bad) = data.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::Data(format!("observations must be finite and > 0, got {bad}")));
    }
    let reciprocals: Vec<f64> = data.iter().map(|x| 1.0 / x).collect();
    let fit = fit_weibull_complete(&reciprocals, config)?;
    InverseWeibullParams::new(fit.params.gamma(), fit.params.delta())
}

/// Fit the Weibull to a complete (uncensored) sample.
pub fn fit_weibull_complete(data: &[f64], config: &MleConfig) -> Result<MleResult> {
    let scheme = CensoringScheme::new(data.len(), data.len(), 0.0)?;
    let sample = CensoredSample::apply(data, scheme)?;
    fit_mle(&sample, config)
}

fn log_likelihood_sum(data: &[f64], model: &FittedModel) -> Result<f64> {
    let mut total = 0.0;
    for &x in data {
        let lp = match model {
            FittedModel::Weibull(p) => p.log_pdf(x)?,
            FittedModel::Lindley(p) => p.log_pdf(x)?,
            FittedModel::InverseWeibull(p) => p.log_pdf(x)?,
        };
        total += lp;
    }
    Ok(total)
}

/// Fit one model to complete data and assemble its report row.
pub fn fit_report(data: &[f64], model: ModelKind, config: &MleConfig) -> Result<FitReport> {
    let fitted = match model {
        ModelKind::Weibull => FittedModel::Weibull(fit_weibull_complete(data, config)?.params),
        ModelKind::Lindley => FittedModel::Lindley(fit_lindley(data)?),
        ModelKind::InverseWeibull => {
            FittedModel::InverseWeibull(fit_invweibull(data, config)?)
        }
    };
    let (ks_stat, p_value) = ks_test(data, |x| fitted.cdf(x))?;
    let nll2 = -2.0 * log_likelihood_sum(data, &fitted)?;
    let k = fitted.estimates().len();
    let ic = information_criteria(nll2, k, data.len())?;
    Ok(FitReport {
        model,
        estimates: fitted.estimates(),
        ks_stat,
        p_value,
        nll2,
        aic: ic.aic,
        aicc: ic.aicc,
        bic: ic.bic,
        hqc: ic.hqc,
    })
}

/// Point sets for the four fit panels.
#[derive(Debug, Clone, Serialize)]
pub struct PlotData {
    /// (x, fitted density, histogram density of the bin containing x).
    pub density: Vec<(f64, f64, f64)>,
    /// (x, empirical CDF, fitted CDF) at the sorted observations.
    pub cdf: Vec<(f64, f64, f64)>,
    /// (fitted CDF at x_(i), plotting position i/(n+1)).
    pub pp: Vec<(f64, f64)>,
    /// (fitted quantile at i/(n+1), x_(i)).
    pub qq: Vec<(f64, f64)>,
}

/// Default plotting position i/(n+1).
fn plotting_position(i: usize, n: usize) -> f64 {
    (i + 1) as f64 / (n + 1) as f64
}

/// Build the plot point sets for a fitted model on complete data.
pub fn export_plot_data(data: &[f64], model: &FittedModel) -> Result<PlotData> {
    if data.is_empty() {
        return Err(Error::Data("cannot export plots for an empty sample".into()));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let (lo, hi) = (sorted[0], sorted[n - 1]);

    // density panel: fitted curve on a fine grid over [0, 1.1 * max],
    // histogram with Sturges bins, density-normalized
    let bins = ((n as f64).log2().ceil() as usize + 1).max(1);
    let bin_width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in &sorted {
        let idx = if bin_width > 0.0 {
            (((x - lo) / bin_width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    let grid_points = 200;
    let gmax = hi * 1.1;
    let density = (0..=grid_points)
        .map(|k| {
            let x = gmax * k as f64 / grid_points as f64;
            let hist = if bin_width > 0.0 && x >= lo && x <= hi {
                let idx = (((x - lo) / bin_width) as usize).min(bins - 1);
                counts[idx] as f64 / (n as f64 * bin_width)
            } else {
                0.0
            };
            (x, model.pdf(x), hist)
        })
        .collect();

    let cdf = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, (i + 1) as f64 / n as f64, model.cdf(x)))
        .collect();
    let pp = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (model.cdf(x), plotting_position(i, n)))
        .collect();
    let qq = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let q = model.quantile(plotting_position(i, n)).unwrap_or(f64::NAN);
            (q, x)
        })
        .collect();
    Ok(PlotData { density, cdf, pp, qq })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::PRECIPITATION;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ks_single_point() {
        let (d, _) = ks_test(&[1.0], |_| 0.5).unwrap();
        assert_abs_diff_eq!(d, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn ks_reference_values() {
        let p = WeibullParams::new(1.8089, 0.3155).unwrap();
        let (d, pv) = ks_test(&PRECIPITATION, |x| p.cdf(x)).unwrap();
        assert_abs_diff_eq!(d, 0.0689, epsilon = 5e-4);
        assert_abs_diff_eq!(pv, 0.9988, epsilon = 5e-3);
    }

    #[test]
    fn ks_under_true_model_is_small() {
        let p = WeibullParams::new(1.5, 2.0).unwrap();
        let data = p.sample(10_000, 77);
        let (d, pv) = ks_test(&data, |x| p.cdf(x)).unwrap();
        assert!(d < 0.02, "D = {d}");
        assert!(pv > 0.01);
    }

    #[test]
    fn ks_invariant_under_monotone_transforms() {
        let p = WeibullParams::new(1.5, 2.0).unwrap();
        let data = p.sample(200, 5);
        let (d1, _) = ks_test(&data, |x| p.cdf(x)).unwrap();
        // transform both data and model through ln
        let logs: Vec<f64> = data.iter().map(|x| x.ln()).collect();
        let (d2, _) = ks_test(&logs, |y| p.cdf(y.exp())).unwrap();
        assert_abs_diff_eq!(d1, d2, epsilon = 1e-12);
    }

    #[test]
    fn p_value_decreasing_in_d() {
        let mut last = 1.0;
        for k in 1..=20 {
            let t = k as f64 * 0.2;
            let p = kolmogorov_pvalue(t);
            assert!(p <= last + 1e-15);
            assert!((0.0..=1.0).contains(&p));
            last = p;
        }
    }

    #[test]
    fn information_criteria_reference_rows() {
        let ic = information_criteria(77.2866, 2, 30).unwrap();
        assert_abs_diff_eq!(ic.aic, 81.2866, epsilon = 1e-3);
        assert_abs_diff_eq!(ic.aicc, 81.7310, epsilon = 1e-3);
        assert_abs_diff_eq!(ic.bic, 84.0890, epsilon = 1e-3);
        assert_abs_diff_eq!(ic.hqc, 82.1831, epsilon = 1e-3);

        let ic = information_criteria(86.2875, 1, 30).unwrap();
        assert_abs_diff_eq!(ic.aic, 88.2875, epsilon = 1e-3);
        assert_abs_diff_eq!(ic.bic, 89.6886, epsilon = 1e-3);

        let ic = information_criteria(50.0, 0, 30).unwrap();
        assert_eq!(ic.aic, 50.0);
        assert_eq!(ic.aicc, 50.0);
        assert_eq!(ic.bic, 50.0);
        assert_eq!(ic.hqc, 50.0);

        assert!(information_criteria(10.0, 9, 10).is_err());
    }

    #[test]
    fn aicc_exceeds_aic_and_bic_ordering() {
        let ic = information_criteria(100.0, 2, 30).unwrap();
        assert!(ic.aicc > ic.aic);
        // ln(30) > 2, so BIC penalizes harder than AIC at equal nll2
        assert!(ic.bic > ic.aic);
    }

    #[test]
    fn lindley_reference_fit() {
        let fit = fit_lindley(&PRECIPITATION).unwrap();
        assert_abs_diff_eq!(fit.theta(), 0.9096, epsilon = 1e-3);
        // the closed form satisfies the score equation
        // d/dtheta log L = 2n/theta - n/(1+theta) - sum x_i = 0
        let n = PRECIPITATION.len() as f64;
        let sum: f64 = PRECIPITATION.iter().sum();
        let score = 2.0 * n / fit.theta() - n / (1.0 + fit.theta()) - sum;
        assert_abs_diff_eq!(score, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn invweibull_transformation_identity() {
        // fitting IW on x equals fitting Weibull on 1/x with the same
        // parameter values
        let cfg = MleConfig::default();
        let iw = fit_invweibull(&PRECIPITATION, &cfg).unwrap();
        let reciprocals: Vec<f64> = PRECIPITATION.iter().map(|x| 1.0 / x).collect();
        let wb = fit_weibull_complete(&reciprocals, &cfg).unwrap();
        assert_abs_diff_eq!(iw.gamma(), wb.params.gamma(), epsilon = 1e-12);
        assert_abs_diff_eq!(iw.delta(), wb.params.delta(), epsilon = 1e-12);
    }

    #[test]
    fn weibull_report_matches_reference_row() {
        let report = fit_report(&PRECIPITATION, ModelKind::Weibull, &MleConfig::default()).unwrap();
        assert_abs_diff_eq!(report.estimates[0], 1.8089, epsilon = 1e-3);
        assert_abs_diff_eq!(report.estimates[1], 0.3155, epsilon = 1e-3);
        assert_abs_diff_eq!(report.nll2, 77.2866, epsilon = 1e-3);
        assert_abs_diff_eq!(report.ks_stat, 0.0689, epsilon = 5e-4);
        assert_abs_diff_eq!(report.p_value, 0.9988, epsilon = 5e-3);
    }

    #[test]
    fn model_selection_prefers_weibull() {
        let cfg = MleConfig::default();
        let reports: Vec<FitReport> =
            [ModelKind::Weibull, ModelKind::Lindley, ModelKind::InverseWeibull]
                .iter()
                .map(|m| fit_report(&PRECIPITATION, *m, &cfg).unwrap())
                .collect();
        let best = reports
            .iter()
            .min_by(|a, b| a.aic.total_cmp(&b.aic))
            .unwrap();
        assert_eq!(best.model, ModelKind::Weibull);
    }

    #[test]
    fn plot_points_basic_geometry() {
        let cfg = MleConfig::default();
        let fit = fit_weibull_complete(&PRECIPITATION, &cfg).unwrap();
        let model = FittedModel::Weibull(fit.params);
        let plot = export_plot_data(&PRECIPITATION, &model).unwrap();
        assert!(plot
            .pp
            .iter()
            .all(|(a, b)| (0.0..=1.0).contains(a) && (0.0..=1.0).contains(b)));
        // PP deviations sit in the neighborhood of the KS statistic
        let (d, _) = ks_test(&PRECIPITATION, |x| model.cdf(x)).unwrap();
        let max_dev = plot
            .pp
            .iter()
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_dev <= d + 1.0 / (PRECIPITATION.len() as f64 + 1.0));
        // density panel integrates roughly to one over the grid
        let grid_step = plot.density[1].0 - plot.density[0].0;
        let mass: f64 = plot.density.iter().map(|(_, f, _)| f * grid_step).sum();
        assert!((mass - 1.0).abs() < 0.05, "density grid mass {mass}");
    }

    #[test]
    fn qq_of_exact_quantile_grid_is_diagonal() {
        let p = WeibullParams::new(1.5, 2.0).unwrap();
        let n = 40;
        let data: Vec<f64> = (0..n)
            .map(|i| p.quantile((i + 1) as f64 / (n + 1) as f64).unwrap())
            .collect();
        let plot = export_plot_data(&data, &FittedModel::Weibull(p)).unwrap();
        for (q, x) in plot.qq {
            assert_abs_diff_eq!(q, x, epsilon = 1e-10);
        }
    }
}

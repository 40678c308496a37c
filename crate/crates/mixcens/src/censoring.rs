//! The censoring rule and the censored-data log-likelihood.
//!
//! A life test on `n` units fixes a minimum failure count `m` and a
//! supplementary time `s` in advance. When the m-th failure occurs the test
//! keeps running for `s` more time units, so it terminates at
//! `min(x_{n:n}, x_{m:n} + s)`: at least `m` and at most `n` failures are
//! observed. With `s = 0` this is ordinary type-II censoring; with `m = n`
//! the full sample is always observed.

use serde::{Deserialize, Serialize};

use crate::dist::WeibullParams;
use crate::error::{Error, Result};

/// The design triple (n, m, s), fixed before the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CensoringScheme {
    n: usize,
    m: usize,
    s: f64,
}

impl CensoringScheme {
    pub fn new(n: usize, m: usize, s: f64) -> Result<Self> {
        if n == 0 || m == 0 || m > n {
            return Err(Error::InvalidParameter(format!(
                "scheme requires 1 <= m <= n, got n={n}, m={m}"
            )));
        }
        if !s.is_finite() || s < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "supplementary time must be finite and >= 0, got {s}"
            )));
        }
        Ok(Self { n, m, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

impl<'de> Deserialize<'de> for CensoringScheme {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            m: usize,
            s: f64,
        }
        let raw = Raw::deserialize(de)?;
        CensoringScheme::new(raw.n, raw.m, raw.s).map_err(serde::de::Error::custom)
    }
}

/// Which termination rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CensoringCase {
    /// All n units failed on or before x_{m:n} + s; the sample is complete.
    CaseI,
    /// The test stopped at u = x_{m:n} + s with the last n-r units censored.
    CaseII,
}

/// An observed, possibly censored sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensoredSample {
    scheme: CensoringScheme,
    case: CensoringCase,
    /// Censoring time x_{m:n} + s. Recorded in both cases; it only enters
    /// the likelihood in case II.
    u: f64,
    /// Observed failure times, nondecreasing, length r.
    failures: Vec<f64>,
}

/// Sufficient statistics of the censored log-likelihood at a given shape.
///
/// For shape value g:
///   power_sum       = sum x_i^g          (+ (n-r) u^g when censored)
///   power_log_sum   = sum x_i^g ln x_i   (+ (n-r) u^g ln u when censored)
///   power_log2_sum  = sum x_i^g ln^2 x_i (+ (n-r) u^g ln^2 u when censored)
///   log_sum         = sum ln x_i over the r observed failures
#[derive(Debug, Clone, Copy)]
pub struct Sufficients {
    pub count: usize,
    pub power_sum: f64,
    pub power_log_sum: f64,
    pub power_log2_sum: f64,
    pub log_sum: f64,
}

impl CensoredSample {
    /// Apply the censoring rule to a complete sample of exactly n lifetimes.
    ///
    /// The input need not be sorted; a sorted copy is taken. Ties with the
    /// censoring time count as observed failures.
    pub fn apply(complete: &[f64], scheme: CensoringScheme) -> Result<Self> {
        if complete.len() != scheme.n() {
            return Err(Error::Data(format!(
                "expected {} lifetimes for the scheme, got {}",
                scheme.n(),
                complete.len()
            )));
        }
        if let Some(bad) = complete.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Data(format!("lifetimes must be finite and > 0, got {bad}")));
        }
        let mut sorted = complete.to_vec();
        sorted.sort_by(f64::total_cmp);
        let u = sorted[scheme.m() - 1] + scheme.s();
        if sorted[scheme.n() - 1] <= u {
            Ok(Self { scheme, case: CensoringCase::CaseI, u, failures: sorted })
        } else {
            let r = sorted.partition_point(|x| *x <= u);
            sorted.truncate(r);
            Ok(Self { scheme, case: CensoringCase::CaseII, u, failures: sorted })
        }
    }

    /// Rebuild a sample from its serialized parts, re-checking every invariant.
    pub fn from_parts(
        scheme: CensoringScheme,
        case: CensoringCase,
        u: f64,
        failures: Vec<f64>,
    ) -> Result<Self> {
        let r = failures.len();
        if r < scheme.m() || r > scheme.n() {
            return Err(Error::Data(format!(
                "failure count {r} outside m..=n = {}..={}",
                scheme.m(),
                scheme.n()
            )));
        }
        if failures.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Data("failure times must be nondecreasing".into()));
        }
        if let Some(bad) = failures.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Data(format!("failure times must be finite and > 0, got {bad}")));
        }
        if !u.is_finite() || u <= 0.0 {
            return Err(Error::Data(format!("censoring time must be finite and > 0, got {u}")));
        }
        match case {
            CensoringCase::CaseI => {
                if r != scheme.n() {
                    return Err(Error::Data(format!(
                        "case I requires all {} failures, got {r}",
                        scheme.n()
                    )));
                }
            }
            CensoringCase::CaseII => {
                if failures.last().is_some_and(|last| *last > u) {
                    return Err(Error::Data(
                        "case II failures must not exceed the censoring time".into(),
                    ));
                }
            }
        }
        Ok(Self { scheme, case, u, failures })
    }

    pub fn scheme(&self) -> CensoringScheme {
        self.scheme
    }

    pub fn case(&self) -> CensoringCase {
        self.case
    }

    /// Number of observed failures.
    pub fn r(&self) -> usize {
        self.failures.len()
    }

    /// Censoring time x_{m:n} + s.
    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn failures(&self) -> &[f64] {
        &self.failures
    }

    fn censored_count(&self) -> usize {
        match self.case {
            CensoringCase::CaseI => 0,
            CensoringCase::CaseII => self.scheme.n() - self.failures.len(),
        }
    }

    /// Sufficient statistics at shape `gamma`; see [`Sufficients`].
    pub fn sufficients(&self, gamma: f64) -> Sufficients {
        let mut power_sum = 0.0;
        let mut power_log_sum = 0.0;
        let mut power_log2_sum = 0.0;
        let mut log_sum = 0.0;
        for &x in &self.failures {
            let lx = x.ln();
            let xg = (gamma * lx).exp();
            power_sum += xg;
            power_log_sum += xg * lx;
            power_log2_sum += xg * lx * lx;
            log_sum += lx;
        }
        let nc = self.censored_count();
        if nc > 0 {
            let lu = self.u.ln();
            let ug = nc as f64 * (gamma * lu).exp();
            power_sum += ug;
            power_log_sum += ug * lu;
            power_log2_sum += ug * lu * lu;
        }
        Sufficients {
            count: self.failures.len(),
            power_sum,
            power_log_sum,
            power_log2_sum,
            log_sum,
        }
    }

    /// Censored log-likelihood:
    ///
    /// ```text
    /// r ln(gamma) + r ln(delta) + (gamma-1) sum ln x_i
    ///   - delta [ sum x_i^gamma + (n-r) u^gamma ]
    /// ```
    ///
    /// (the censoring term vanishes in case I, where r = n).
    pub fn log_likelihood(&self, p: &WeibullParams) -> f64 {
        let s = self.sufficients(p.gamma());
        let w = s.count as f64;
        w * p.gamma().ln() + w * p.delta().ln() + (p.gamma() - 1.0) * s.log_sum
            - p.delta() * s.power_sum
    }
}

impl<'de> Deserialize<'de> for CensoredSample {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            scheme: CensoringScheme,
            case: CensoringCase,
            u: f64,
            failures: Vec<f64>,
        }
        let raw = Raw::deserialize(de)?;
        CensoredSample::from_parts(raw.scheme, raw.case, raw.u, raw.failures)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::PRECIPITATION;
    use approx::assert_abs_diff_eq;

    #[test]
    fn precipitation_scheme_20_1() {
        let scheme = CensoringScheme::new(30, 20, 1.0).unwrap();
        let sample = CensoredSample::apply(&PRECIPITATION, scheme).unwrap();
        assert_eq!(sample.case(), CensoringCase::CaseII);
        assert_eq!(sample.r(), 26);
        assert_abs_diff_eq!(sample.u(), 2.89, epsilon = 1e-12);
    }

    #[test]
    fn s_zero_recovers_type_two() {
        let scheme = CensoringScheme::new(30, 12, 0.0).unwrap();
        let sample = CensoredSample::apply(&PRECIPITATION, scheme).unwrap();
        assert_eq!(sample.r(), 12);
        let mut sorted = PRECIPITATION.to_vec();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(sample.u(), sorted[11]);
    }

    #[test]
    fn m_equals_n_is_always_complete() {
        let scheme = CensoringScheme::new(30, 30, 0.0).unwrap();
        let sample = CensoredSample::apply(&PRECIPITATION, scheme).unwrap();
        assert_eq!(sample.case(), CensoringCase::CaseI);
        assert_eq!(sample.r(), 30);
    }

    #[test]
    fn apply_is_permutation_invariant() {
        let scheme = CensoringScheme::new(30, 20, 1.0).unwrap();
        let a = CensoredSample::apply(&PRECIPITATION, scheme).unwrap();
        let mut reversed = PRECIPITATION.to_vec();
        reversed.reverse();
        let b = CensoredSample::apply(&reversed, scheme).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn apply_rejects_bad_input() {
        let scheme = CensoringScheme::new(5, 3, 0.5).unwrap();
        assert!(CensoredSample::apply(&[1.0, 2.0], scheme).is_err());
        assert!(CensoredSample::apply(&[1.0, 2.0, 3.0, 4.0, 0.0], scheme).is_err());
        assert!(CensoringScheme::new(5, 6, 0.5).is_err());
        assert!(CensoringScheme::new(5, 0, 0.5).is_err());
        assert!(CensoringScheme::new(5, 3, -0.1).is_err());
    }

    #[test]
    fn single_observation_log_likelihood() {
        let scheme = CensoringScheme::new(1, 1, 0.0).unwrap();
        let sample = CensoredSample::apply(&[1.0], scheme).unwrap();
        let p = WeibullParams::new(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(sample.log_likelihood(&p), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn log_likelihood_matches_pdf_composition() {
        // sum log pdf + (n-r) log survival(u), on random case II samples
        let p = WeibullParams::new(1.4, 0.7).unwrap();
        for rep in 0..20 {
            let data = WeibullParams::new(1.2, 1.0).unwrap().sample(25, 100 + rep);
            let scheme = CensoringScheme::new(25, 10, 0.2).unwrap();
            let sample = CensoredSample::apply(&data, scheme).unwrap();
            let direct: f64 = sample
                .failures()
                .iter()
                .map(|x| p.log_pdf(*x).unwrap())
                .sum::<f64>()
                + (scheme.n() - sample.r()) as f64 * p.survival(sample.u()).ln();
            assert_abs_diff_eq!(sample.log_likelihood(&p), direct, epsilon = 1e-10);
        }
    }

    #[test]
    fn sufficients_simple_cases() {
        let scheme = CensoringScheme::new(3, 3, 0.0).unwrap();
        let sample = CensoredSample::apply(&[1.0, 1.0, 1.0], scheme).unwrap();
        for g in [0.5, 1.0, 2.7] {
            let s = sample.sufficients(g);
            assert_eq!(s.count, 3);
            assert_abs_diff_eq!(s.power_sum, 3.0, epsilon = 1e-15);
            assert_abs_diff_eq!(s.power_log_sum, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(s.log_sum, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn sufficients_include_censoring_term() {
        // precipitation data, scheme (20, 1), gamma = 1:
        // power_sum = sum of the 26 observed values + 4 * 2.89
        let scheme = CensoringScheme::new(30, 20, 1.0).unwrap();
        let sample = CensoredSample::apply(&PRECIPITATION, scheme).unwrap();
        let s = sample.sufficients(1.0);
        assert_eq!(s.count, 26);
        assert_abs_diff_eq!(s.power_sum, 47.60, epsilon = 1e-10);
    }

    #[test]
    fn scale_equivariance() {
        let alpha = 2.5;
        let scheme = CensoringScheme::new(30, 18, 0.4).unwrap();
        let scaled_scheme = CensoringScheme::new(30, 18, 0.4 * alpha).unwrap();
        let base = CensoredSample::apply(&PRECIPITATION, scheme).unwrap();
        let scaled_data: Vec<f64> = PRECIPITATION.iter().map(|x| x * alpha).collect();
        let scaled = CensoredSample::apply(&scaled_data, scaled_scheme).unwrap();
        assert_eq!(base.r(), scaled.r());
        assert_eq!(base.case(), scaled.case());
        assert_abs_diff_eq!(scaled.u(), alpha * base.u(), epsilon = 1e-12);
        for (a, b) in base.failures().iter().zip(scaled.failures()) {
            assert_abs_diff_eq!(*b, alpha * a, epsilon = 1e-12);
        }
    }

    #[test]
    fn from_parts_validates() {
        let scheme = CensoringScheme::new(5, 2, 1.0).unwrap();
        assert!(CensoredSample::from_parts(
            scheme,
            CensoringCase::CaseII,
            2.0,
            vec![0.5, 1.0, 1.5]
        )
        .is_ok());
        // too few failures
        assert!(
            CensoredSample::from_parts(scheme, CensoringCase::CaseII, 2.0, vec![0.5]).is_err()
        );
        // failure beyond the censoring time
        assert!(CensoredSample::from_parts(
            scheme,
            CensoringCase::CaseII,
            2.0,
            vec![0.5, 2.5]
        )
        .is_err());
        // case I must be complete
        assert!(CensoredSample::from_parts(
            scheme,
            CensoringCase::CaseI,
            2.0,
            vec![0.5, 1.0, 1.5]
        )
        .is_err());
        // unsorted
        assert!(CensoredSample::from_parts(
            scheme,
            CensoringCase::CaseII,
            2.0,
            vec![1.0, 0.5]
        )
        .is_err());
    }
}

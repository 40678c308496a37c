//! Implementations of the six subcommands.

use std::fmt::Write as _;

use serde::Serialize;

use mixcens::bayes::{bayes_estimates, run_mh_gibbs, McmcConfig, PriorSpec};
use mixcens::expectation::{
    check_scale_invariance, expected_duration, expected_duration_mc,
    expected_duration_product_approx, DurationMethod, ProductShift,
};
use mixcens::gof::{export_plot_data, fit_report, FitReport, FittedModel, ModelKind};
use mixcens::mle::{fit_mle, MleConfig};
use mixcens::{CensoredSample, CensoringCase, CensoringScheme, WeibullParams};

use crate::args::{
    BayesArgs, CensorArgs, ExpectArgs, ExpectMethod, FitArgs, GofArgs, ProductShiftArg,
    SchemeInputArgs, SimulateArgs,
};
use crate::io::{read_data, resolve_seed, to_json, write_file, Provenance};
use crate::simconfig::load_study_designs;
use crate::AppError;

fn case_label(case: CensoringCase) -> &'static str {
    match case {
        CensoringCase::CaseI => "I",
        CensoringCase::CaseII => "II",
    }
}

#[derive(Debug, Clone, Serialize)]
struct SampleSummary {
    n: usize,
    m: usize,
    s: f64,
    r: usize,
    case: String,
    u: f64,
}

impl SampleSummary {
    fn of(sample: &CensoredSample) -> Self {
        Self {
            n: sample.scheme().n(),
            m: sample.scheme().m(),
            s: sample.scheme().s(),
            r: sample.r(),
            case: case_label(sample.case()).to_string(),
            u: sample.u(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Interval {
    lower: f64,
    upper: f64,
    level: f64,
    kind: String,
}

/// Load the sample for fit/bayes: either raw data plus scheme flags, or a
/// censored record written by `censor`. Raw data without --m/--s is treated
/// as complete (m = n, s = 0).
fn load_sample(data: &SchemeInputArgs) -> Result<CensoredSample, AppError> {
    if let Some(path) = &data.censored {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Data(format!("cannot read '{}': {e}", path.display())))?;
        let sample: CensoredSample = serde_json::from_str(&text)
            .map_err(|e| AppError::Data(format!("invalid censored record: {e}")))?;
        return Ok(sample);
    }
    let input = data.input.as_ref().expect("clap enforces input xor censored");
    let values = read_data(input, data.column)?;
    let (m, s) = match (data.m, data.s) {
        (Some(m), Some(s)) => (m, s),
        _ => (values.len(), 0.0),
    };
    let scheme = CensoringScheme::new(values.len(), m, s).map_err(AppError::usage_from)?;
    CensoredSample::apply(&values, scheme).map_err(AppError::from)
}

pub fn cmd_censor(args: &CensorArgs) -> Result<(), AppError> {
    let values = read_data(&args.input.input, args.input.column)?;
    let scheme =
        CensoringScheme::new(values.len(), args.m, args.s).map_err(AppError::usage_from)?;
    let sample = CensoredSample::apply(&values, scheme)?;
    write_file(&args.output, &to_json(&sample)?)?;
    println!(
        "censored sample: n={} m={} s={} -> r={} case={} u={:.6}",
        scheme.n(),
        scheme.m(),
        scheme.s(),
        sample.r(),
        case_label(sample.case()),
        sample.u()
    );
    println!("wrote {}", args.output.display());
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct MleReport {
    method: String,
    gamma: f64,
    delta: f64,
    interval_gamma: Interval,
    interval_delta: Interval,
    loglik: f64,
    iterations: usize,
    converged: bool,
    se_gamma: f64,
    se_delta: f64,
    sample: SampleSummary,
    provenance: Provenance,
}

pub fn cmd_fit(args: &FitArgs) -> Result<(), AppError> {
    let sample = load_sample(&args.data)?;
    let config = MleConfig {
        gamma_init: args.gamma_init,
        tol: args.tol,
        max_iter: args.max_iter,
        alpha_level: args.alpha,
    };
    let fit = fit_mle(&sample, &config)?;
    if !fit.converged {
        return Err(AppError::Numeric(format!(
            "fit did not converge within {} iterations",
            args.max_iter
        )));
    }
    let clip = |interval: (f64, f64)| -> (f64, f64) {
        if args.clip_intervals {
            (interval.0.max(0.0), interval.1)
        } else {
            interval
        }
    };
    let aci_gamma = clip(fit.aci_gamma);
    let aci_delta = clip(fit.aci_delta);
    let level = 1.0 - args.alpha;
    let report = MleReport {
        method: "mle".into(),
        gamma: fit.params.gamma(),
        delta: fit.params.delta(),
        interval_gamma: Interval {
            lower: aci_gamma.0,
            upper: aci_gamma.1,
            level,
            kind: "aci".into(),
        },
        interval_delta: Interval {
            lower: aci_delta.0,
            upper: aci_delta.1,
            level,
            kind: "aci".into(),
        },
        loglik: fit.loglik,
        iterations: fit.iterations,
        converged: fit.converged,
        se_gamma: fit.se_gamma,
        se_delta: fit.se_delta,
        sample: SampleSummary::of(&sample),
        provenance: Provenance::new(None, &(&config, SampleSummary::of(&sample))),
    };
    println!(
        "sample: n={} r={} case={} u={:.4}",
        report.sample.n, report.sample.r, report.sample.case, report.sample.u
    );
    println!("mle: gamma={:.4} delta={:.4}  loglik={:.4}", report.gamma, report.delta, fit.loglik);
    println!(
        "{:.0}% aci gamma: ({:.4}, {:.4})   delta: ({:.4}, {:.4})",
        level * 100.0,
        aci_gamma.0,
        aci_gamma.1,
        aci_delta.0,
        aci_delta.1
    );
    if let Some(path) = &args.output {
        write_file(path, &to_json(&report)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct LinexReportEntry {
    d: f64,
    gamma: f64,
    delta: f64,
}

#[derive(Debug, Clone, Serialize)]
struct BayesReport {
    method: String,
    gamma: f64,
    delta: f64,
    interval_gamma: Interval,
    interval_delta: Interval,
    linex: Vec<LinexReportEntry>,
    acceptance_rate: f64,
    acceptance_warning: bool,
    chain_length: usize,
    burn_in: usize,
    sample: SampleSummary,
    provenance: Provenance,
}

pub fn cmd_bayes(args: &BayesArgs) -> Result<(), AppError> {
    if let Some(d) = args.d.iter().find(|d| **d == 0.0) {
        return Err(AppError::Usage(format!(
            "LINEX loss parameter d = {d} is not defined; the squared-error estimate is the \
             d -> 0 limit, so drop 0 from --d"
        )));
    }
    let sample = load_sample(&args.data)?;
    let prior = PriorSpec::new(args.alpha1, args.beta1, args.alpha2, args.beta2)
        .map_err(AppError::usage_from)?;
    let seed = resolve_seed(args.seed)?;
    let config = McmcConfig {
        chain_length: args.chain_length,
        burn_in: args.burn_in,
        proposal_sd: args.proposal_sd,
        seed,
        init: None,
    };
    let post = run_mh_gibbs(&sample, &prior, &config)?;
    let est = bayes_estimates(&post, &args.d, args.alpha)?;
    if let Some(path) = &args.save_chains {
        let mut text = String::from("gamma,delta\n");
        for (g, d) in post.gamma_chain().iter().zip(post.delta_chain()) {
            let _ = writeln!(text, "{g},{d}");
        }
        write_file(path, &text)?;
    }
    let level = 1.0 - args.alpha;
    let report = BayesReport {
        method: "bayes".into(),
        gamma: est.se_gamma,
        delta: est.se_delta,
        interval_gamma: Interval {
            lower: est.hpd_gamma.0,
            upper: est.hpd_gamma.1,
            level,
            kind: "hpd".into(),
        },
        interval_delta: Interval {
            lower: est.hpd_delta.0,
            upper: est.hpd_delta.1,
            level,
            kind: "hpd".into(),
        },
        linex: est
            .linex
            .iter()
            .map(|l| LinexReportEntry { d: l.d, gamma: l.gamma, delta: l.delta })
            .collect(),
        acceptance_rate: post.acceptance_rate,
        acceptance_warning: post.acceptance_warning,
        chain_length: args.chain_length,
        burn_in: args.burn_in,
        sample: SampleSummary::of(&sample),
        provenance: Provenance::new(Some(seed), &(&prior, &config, SampleSummary::of(&sample))),
    };
    println!(
        "sample: n={} r={} case={} u={:.4}",
        report.sample.n, report.sample.r, report.sample.case, report.sample.u
    );
    println!(
        "bayes (se): gamma={:.4} delta={:.4}   acceptance={:.2}",
        est.se_gamma, est.se_delta, post.acceptance_rate
    );
    for l in &est.linex {
        println!("bayes (linex d={}): gamma={:.4} delta={:.4}", l.d, l.gamma, l.delta);
    }
    println!(
        "{:.0}% hpd gamma: ({:.4}, {:.4})   delta: ({:.4}, {:.4})",
        level * 100.0,
        est.hpd_gamma.0,
        est.hpd_gamma.1,
        est.hpd_delta.0,
        est.hpd_delta.1
    );
    if post.acceptance_warning {
        eprintln!(
            "warning: acceptance rate {:.3} outside [0.05, 0.95]; consider --proposal-sd",
            post.acceptance_rate
        );
    }
    if let Some(path) = &args.output {
        write_file(path, &to_json(&report)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct ExpectReport {
    n: usize,
    m: usize,
    s: f64,
    gamma: f64,
    delta: f64,
    method: String,
    expected_failures: f64,
    expected_duration: f64,
    mc_std_error: Option<f64>,
    product_approximation: Option<f64>,
    scale_check: Option<mixcens::expectation::ScaleCheckReport>,
    provenance: Provenance,
}

pub fn cmd_expect(args: &ExpectArgs) -> Result<(), AppError> {
    let scheme = CensoringScheme::new(args.n, args.m, args.s).map_err(AppError::usage_from)?;
    let params = WeibullParams::new(args.gamma, args.delta).map_err(AppError::usage_from)?;
    let seed = resolve_seed(args.seed)?;
    let report = match args.method {
        ExpectMethod::Quad => expected_duration(scheme, &params)?,
        ExpectMethod::Mc => {
            if args.replications == 0 {
                return Err(AppError::Usage("--replications must be at least 1".into()));
            }
            expected_duration_mc(scheme, &params, args.replications, seed)
        }
    };
    let product_approximation = match args.product_approx {
        None => None,
        Some(shift) => {
            let shift = match shift {
                ProductShiftArg::Plus => ProductShift::PlusS,
                ProductShiftArg::Minus => ProductShift::MinusS,
            };
            Some(expected_duration_product_approx(scheme, &params, shift)?)
        }
    };
    let scale_check = match args.alpha_scale {
        None => None,
        Some(alpha) => Some(check_scale_invariance(scheme, &params, alpha, 20_000, seed)?),
    };
    let method = match report.method {
        DurationMethod::Quadrature => "quadrature",
        DurationMethod::MonteCarlo => "monte-carlo",
    };
    let out = ExpectReport {
        n: args.n,
        m: args.m,
        s: args.s,
        gamma: args.gamma,
        delta: args.delta,
        method: method.into(),
        expected_failures: report.expected_failures,
        expected_duration: report.expected_duration,
        mc_std_error: report.mc_std_error,
        product_approximation,
        scale_check: scale_check.clone(),
        provenance: Provenance::new(
            Some(seed),
            &(args.n, args.m, args.s, args.gamma, args.delta, method),
        ),
    };
    println!(
        "scheme n={} m={} s={}  weibull(gamma={}, delta={})",
        args.n, args.m, args.s, args.gamma, args.delta
    );
    match report.mc_std_error {
        Some(se) => println!(
            "expected duration = {:.6} (mc se {:.2e}), expected failures = {:.4}  [{method}]",
            report.expected_duration, se, report.expected_failures
        ),
        None => println!(
            "expected duration = {:.6}, expected failures = {:.4}  [{method}]",
            report.expected_duration, report.expected_failures
        ),
    }
    if let Some(v) = product_approximation {
        println!("independent-product approximation = {v:.6}");
    }
    if let Some(check) = &scale_check {
        println!(
            "scale check at alpha={}: duration ratio = {:.6} (error {:.2e}, {})",
            check.alpha,
            check.duration_ratio,
            check.duration_ratio_error,
            if check.duration_pass { "pass" } else { "FAIL" }
        );
        println!(
            "  failure-count invariance: chi^2 = {:.4} (p = {:.4}, {}), mean diff {:.2} se ({})",
            check.count_chi_square,
            check.count_p_value,
            if check.count_pass { "pass" } else { "FAIL" },
            check.mean_count_diff_in_se,
            if check.mean_count_pass { "pass" } else { "FAIL" }
        );
    }
    if let Some(path) = &args.output {
        write_file(path, &to_json(&out)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct GofReport {
    rows: Vec<FitReport>,
    provenance: Provenance,
}

pub fn cmd_gof(args: &GofArgs) -> Result<(), AppError> {
    let values = read_data(&args.input.input, args.input.column)?;
    let config = MleConfig::default();
    let mut rows = Vec::new();
    for model in [ModelKind::Weibull, ModelKind::Lindley, ModelKind::InverseWeibull] {
        rows.push(fit_report(&values, model, &config)?);
    }
    println!(
        "{:<16} {:<22} {:>8} {:>8} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "model", "estimates", "ks", "p", "aic", "aicc", "bic", "hqc", "-2logL"
    );
    for row in &rows {
        let estimates = row
            .estimates
            .iter()
            .map(|e| format!("{e:.4}"))
            .collect::<Vec<_>>()
            .join(", ");
        println!(
            "{:<16} {:<22} {:>8.4} {:>8.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            format!("{:?}", row.model),
            estimates,
            row.ks_stat,
            row.p_value,
            row.aic,
            row.aicc,
            row.bic,
            row.hqc,
            row.nll2
        );
    }
    if let Some(dir) = &args.plot_dir {
        let weibull = match rows[0].model {
            ModelKind::Weibull => WeibullParams::new(rows[0].estimates[0], rows[0].estimates[1])
                .map_err(AppError::from)?,
            _ => unreachable!("Weibull row is first"),
        };
        let plot = export_plot_data(&values, &FittedModel::Weibull(weibull))?;
        let mut density = String::from("x,fitted_density,histogram_density\n");
        for (x, f, h) in &plot.density {
            let _ = writeln!(density, "{x},{f},{h}");
        }
        let mut cdf = String::from("x,empirical_cdf,fitted_cdf\n");
        for (x, e, f) in &plot.cdf {
            let _ = writeln!(cdf, "{x},{e},{f}");
        }
        let mut pp = String::from("fitted_probability,plotting_position\n");
        for (a, b) in &plot.pp {
            let _ = writeln!(pp, "{a},{b}");
        }
        let mut qq = String::from("fitted_quantile,observed\n");
        for (a, b) in &plot.qq {
            let _ = writeln!(qq, "{a},{b}");
        }
        for (name, contents) in
            [("density.csv", density), ("cdf.csv", cdf), ("pp.csv", pp), ("qq.csv", qq)]
        {
            write_file(&dir.join(name), &contents)?;
        }
        println!("wrote plot points to {}", dir.display());
    }
    if let Some(path) = &args.output {
        let report = GofReport {
            rows: rows.clone(),
            provenance: Provenance::new(None, &(&args.input.input, args.input.column)),
        };
        write_file(path, &to_json(&report)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), AppError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| AppError::Usage(format!("cannot read '{}': {e}", args.config.display())))?;
    let plan = load_study_designs(&text)?;
    std::fs::create_dir_all(&args.output_dir)
        .map_err(|e| AppError::Data(format!("cannot create '{}': {e}", args.output_dir.display())))?;

    #[derive(Serialize)]
    struct StudyBundle {
        design: mixcens::study::StudyDesign,
        mle: Option<mixcens::study::MleStudyResult>,
        bayes: Option<mixcens::study::BayesStudyResult>,
        coverage: Option<mixcens::study::CoverageTable>,
        provenance: Provenance,
    }

    let mut bundle = StudyBundle {
        provenance: Provenance::new(Some(plan.design.base_seed), &plan.design),
        design: plan.design,
        mle: None,
        bayes: None,
        coverage: None,
    };

    if plan.run_mle {
        let result = mixcens::study::run_mle_study(&bundle.design)?;
        write_file(&args.output_dir.join("mle.csv"), &result.to_csv())?;
        println!("mle study: {} schemes x {} replications", result.rows.len(), bundle.design.replications);
        bundle.mle = Some(result);
    }
    if plan.run_bayes {
        let result = mixcens::study::run_bayes_study(&bundle.design)?;
        write_file(&args.output_dir.join("bayes.csv"), &result.to_csv())?;
        println!("bayes study: {} schemes x {} replications", result.rows.len(), bundle.design.replications);
        bundle.bayes = Some(result);
    }
    if plan.run_coverage {
        let result = mixcens::study::coverage_table(&bundle.design)?;
        write_file(&args.output_dir.join("coverage.csv"), &result.to_csv())?;
        println!("coverage table: {} schemes", result.rows.len());
        bundle.coverage = Some(result);
    }
    write_file(&args.output_dir.join("study.json"), &to_json(&bundle)?)?;
    println!("wrote {}", args.output_dir.join("study.json").display());
    Ok(())
}

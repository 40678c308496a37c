//! Command-line argument definitions.

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mixcens",
    version,
    about = "Weibull lifetime analysis under a censoring rule that guarantees at least m \
             failures and then allows at most s further time units of observation",
    long_about = None
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply the censoring rule to a complete sample and write the censored record
    Censor(CensorArgs),
    /// Maximum-likelihood fit with asymptotic confidence intervals
    Fit(FitArgs),
    /// Posterior sampling with squared-error/LINEX estimates and HPD intervals
    Bayes(BayesArgs),
    /// Expected failure count and expected test duration for a scheme
    Expect(ExpectArgs),
    /// Goodness-of-fit comparison of the Weibull, Lindley and inverse Weibull models
    Gof(GofArgs),
    /// Seeded Monte Carlo study of estimator bias, MSE/risk and coverage
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input data: a text file with one value per line (optional header;
    /// comma-delimited columns accepted), or `builtin:precipitation`
    #[arg(long)]
    pub input: String,
    /// 1-based column to read from comma-delimited files
    #[arg(long, default_value_t = 1)]
    pub column: usize,
}

#[derive(Debug, Args)]
pub struct CensorArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Minimum number of failures m
    #[arg(long)]
    pub m: usize,
    /// Supplementary observation time s
    #[arg(long)]
    pub s: f64,
    /// Path for the censored-sample record (JSON)
    #[arg(long)]
    pub output: std::path::PathBuf,
}

#[derive(Debug, Args)]
pub struct SchemeInputArgs {
    /// Raw data (see `censor --help` for the format); censored with --m/--s
    /// when given, fitted as a complete sample otherwise
    #[arg(long, conflicts_with = "censored", required_unless_present = "censored")]
    pub input: Option<String>,
    /// 1-based column to read from comma-delimited files
    #[arg(long, default_value_t = 1)]
    pub column: usize,
    /// Minimum number of failures m (with --input)
    #[arg(long, requires = "input", requires = "s")]
    pub m: Option<usize>,
    /// Supplementary observation time s (with --input)
    #[arg(long, requires = "input", requires = "m")]
    pub s: Option<f64>,
    /// A censored-sample record produced by `censor`
    #[arg(long)]
    pub censored: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: SchemeInputArgs,
    /// Interval level is 1 - alpha
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Starting value of the shape iteration
    #[arg(long, default_value_t = 1.0)]
    pub gamma_init: f64,
    /// Convergence tolerance on successive shape iterates
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Clip negative interval lower bounds at zero
    #[arg(long)]
    pub clip_intervals: bool,
    /// Write the machine-readable report (JSON) here
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct BayesArgs {
    #[command(flatten)]
    pub data: SchemeInputArgs,
    /// Gamma-prior shape on the Weibull shape parameter
    #[arg(long, default_value_t = 0.0)]
    pub alpha1: f64,
    /// Gamma-prior rate on the Weibull shape parameter
    #[arg(long, default_value_t = 0.0)]
    pub beta1: f64,
    /// Gamma-prior shape on the Weibull rate parameter
    #[arg(long, default_value_t = 0.0)]
    pub alpha2: f64,
    /// Gamma-prior rate on the Weibull rate parameter
    #[arg(long, default_value_t = 0.0)]
    pub beta2: f64,
    /// Total chain length N
    #[arg(long, default_value_t = 11_000)]
    pub chain_length: usize,
    /// Discarded initial states M
    #[arg(long, default_value_t = 1_000)]
    pub burn_in: usize,
    /// Random-walk proposal standard deviation (default: half the MLE
    /// standard error of the shape)
    #[arg(long)]
    pub proposal_sd: Option<f64>,
    /// Chain seed (default: MIXCENS_SEED environment variable, else 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// LINEX loss parameters, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = vec![-1.0, 1.0])]
    pub d: Vec<f64>,
    /// Interval level is 1 - alpha
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Export the retained chains as two-column CSV
    #[arg(long)]
    pub save_chains: Option<std::path::PathBuf>,
    /// Write the machine-readable report (JSON) here
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExpectMethod {
    Quad,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProductShiftArg {
    Plus,
    Minus,
}

#[derive(Debug, Args)]
pub struct ExpectArgs {
    /// Units on test n
    #[arg(long)]
    pub n: usize,
    /// Minimum number of failures m
    #[arg(long)]
    pub m: usize,
    /// Supplementary observation time s
    #[arg(long)]
    pub s: f64,
    /// Weibull shape
    #[arg(long)]
    pub gamma: f64,
    /// Weibull rate
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = ExpectMethod::Quad)]
    pub method: ExpectMethod,
    /// Monte Carlo replications (with --method mc)
    #[arg(long, default_value_t = 1_000_000)]
    pub replications: usize,
    /// Monte Carlo seed (default: MIXCENS_SEED environment variable, else 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also verify the scale-invariance properties at this factor
    #[arg(long)]
    pub alpha_scale: Option<f64>,
    /// Also print the naive independent-product approximation with the
    /// censor clock shifted forward (plus) or backward (minus)
    #[arg(long, value_enum)]
    pub product_approx: Option<ProductShiftArg>,
    /// Write the machine-readable report (JSON) here
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Directory for the plot point files (density.csv, cdf.csv, pp.csv, qq.csv)
    #[arg(long)]
    pub plot_dir: Option<std::path::PathBuf>,
    /// Write the machine-readable report (JSON) here
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Study configuration (TOML)
    #[arg(long)]
    pub config: std::path::PathBuf,
    /// Directory for the result tables
    #[arg(long)]
    pub output_dir: std::path::PathBuf,
}

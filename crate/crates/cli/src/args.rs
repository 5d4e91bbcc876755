//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ibf", version, about = "Intrinsic and expected-posterior Bayes factors")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed of the random streams.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of random training samples (or study replicates).
    #[arg(long = "L", global = true)]
    pub l: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long, global = true, value_enum)]
    pub combiner: Option<CombinerArg>,
    /// Null value of the parameter.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta0: Option<f64>,
    /// Relative tolerance of numerical integration.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Input data file.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    /// Prior odds of M1 to M0 for the posterior probability.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub prior_odds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Mts,
    RandomMts,
    Smts,
    InfoWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CombinerArg {
    Arith,
    Geom,
    Median,
    Ep,
    Intrinsic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    ExpSmts,
    ExpMtsImproper,
    BernoulliHaldaneMts,
    BernoulliSmts,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OhaganMode {
    Mts,
    SmtsExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CovariateArg {
    /// d_i = i^{-1/2}
    InvSqrt,
    /// d_i = i
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudyArg {
    Gprior,
    Example16,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-sample censored exponential comparison (Gehan data by default).
    Gehan,
    /// One censored exponential sample against `θ = θ0`.
    OneSampleExp {
        /// Group to use when the data hold several (default: the only group).
        #[arg(long)]
        group: Option<String>,
    },
    /// Bernoulli sequence against `θ = θ0` under the Haldane prior.
    Bernoulli {
        /// Comma- or space-separated 0/1 values (alternative to --data).
        #[arg(long)]
        bits: Option<String>,
        /// Substitute for a boundary `θ0` in a limit study.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Poisson count against `θ = θ0` with imaginary training samples.
    Poisson {
        #[arg(long)]
        count: u64,
        #[arg(long)]
        exposure: f64,
    },
    /// IBF for one 1 among `n` Bernoulli trials with tiny `θ0`.
    Ohagan {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "smts-exact")]
        mode: OhaganMode,
    },
    /// Intrinsic prior queries: density, cdf, quantile and propriety.
    Intrinsic {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        quantile: Option<f64>,
        #[arg(long)]
        cdf: Option<f64>,
        #[arg(long)]
        density: Option<f64>,
        /// Censoring bound of the exponential MTS family.
        #[arg(long)]
        r: Option<f64>,
    },
    /// Nested normal linear models from a CSV with a header row.
    Linreg {
        /// Response column.
        #[arg(long, default_value = "y")]
        response: String,
        /// Comma-separated predictor columns of the simple model.
        #[arg(long, default_value = "")]
        simple: String,
        /// Comma-separated predictor columns of the complex model.
        #[arg(long)]
        complex: String,
        /// Leave out the intercept column.
        #[arg(long)]
        no_intercept: bool,
        /// Keep only the most informative training samples.
        #[arg(long)]
        truncate: Option<usize>,
        /// Also report the g-prior Bayes factor with this `g`.
        #[arg(long)]
        g: Option<f64>,
    },
    /// Known-variance regression through the origin: one dataset (`--data`
    /// with columns x,d) or a consistency study.
    Findley {
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        theta: f64,
        /// Comma-separated sample sizes.
        #[arg(long, default_value = "100,1000,10000,100000")]
        grid: String,
        #[arg(long, value_enum, default_value = "inv-sqrt")]
        covariate: CovariateArg,
        #[arg(long)]
        truncate: Option<usize>,
    },
    /// Growth of the g-prior Bayes factor (or of the IBF) on the
    /// two-cluster design.
    GpriorStudy {
        #[arg(long, value_enum, default_value = "gprior")]
        study: StudyArg,
        /// Comma-separated sample sizes (`m` for the example16 study).
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        beta0: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        beta1: f64,
    },
    /// Constants of the Jeffreys-rule intrinsic prior for censored data.
    Appendix {
        #[arg(long, default_value_t = 1e-3)]
        r: f64,
    },
}

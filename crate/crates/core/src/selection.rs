//! Intrinsic, expected-posterior and intrinsic-prior Bayes factors built
//! from the formal Bayes factors in [`crate::marginals`].

use serde::{Deserialize, Serialize};

use crate::data::{bernoulli_summary, group_stats, BernoulliSummary, GroupStats, PoissonObservation, SurvivalDataset};
use crate::error::{Error, Result};
use crate::marginals::{
    bernoulli_bf10, bernoulli_ts_bf01, exp_bf10, exp_ts_bf01, poisson_bf10, poisson_ts_bf01, twoexp_bf10,
    twoexp_ts_bf01,
};
use crate::numerics::{
    integrate, integrate_quadrant, integrate_semi_infinite, ln_gamma_pos, map_streams, mc_summary, weighted_median,
    QuadOptions, RngStream,
};
use crate::training::{
    draw_smts, enumerate_mts, poisson_imaginary_draw, smts_exact_distribution, SampleSummary, SchemeSpec,
    TrainingData, TrainingSample,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Combiner {
    Arithmetic,
    Geometric,
    Median,
    /// Expected-posterior prior.
    Ep,
    IntrinsicPrior,
}

impl Combiner {
    pub fn label(&self) -> &'static str {
        match self {
            Combiner::Arithmetic => "arith",
            Combiner::Geometric => "geom",
            Combiner::Median => "median",
            Combiner::Ep => "ep",
            Combiner::IntrinsicPrior => "intrinsic",
        }
    }
}

/// Averaging rule for training-sample Bayes factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AverageMode {
    Arithmetic,
    Geometric,
    Median,
}

impl From<AverageMode> for Combiner {
    fn from(m: AverageMode) -> Self {
        match m {
            AverageMode::Arithmetic => Combiner::Arithmetic,
            AverageMode::Geometric => Combiner::Geometric,
            AverageMode::Median => Combiner::Median,
        }
    }
}

/// A Bayes factor of `M1` against `M0`, in log scale, with its Monte Carlo
/// standard error on the same log scale (0 for deterministic evaluations).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesFactorEstimate {
    pub log_bf10: f64,
    pub mc_std_error: f64,
    /// Number of training samples averaged.
    pub l: usize,
    pub scheme: Option<SchemeSpec>,
    pub seed: Option<u64>,
    pub combiner: Combiner,
    /// Degenerate training samples left out of the average.
    pub skipped: usize,
}

impl BayesFactorEstimate {
    fn deterministic(log_bf10: f64, combiner: Combiner) -> Self {
        Self {
            log_bf10,
            mc_std_error: 0.0,
            l: 0,
            scheme: None,
            seed: None,
            combiner,
            skipped: 0,
        }
    }

    pub fn bf10(&self) -> f64 {
        self.log_bf10.exp()
    }

    pub fn with_scheme(mut self, scheme: SchemeSpec, seed: Option<u64>) -> Self {
        self.scheme = Some(scheme);
        self.seed = seed;
        self
    }
}

fn check_finite(log_bf: f64, what: &str) -> Result<f64> {
    if log_bf.is_finite() {
        Ok(log_bf)
    } else {
        Err(Error::domain(format!("{what} is not finite")))
    }
}

fn combine_core(mode: AverageMode, log_bf10_full: f64, b01: &[f64], weights: &[f64]) -> Result<f64> {
    if b01.is_empty() || b01.len() != weights.len() {
        return Err(Error::domain("b01 values and weights must be nonempty and match in length"));
    }
    if b01.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
        return Err(Error::domain("training-sample Bayes factors must be finite and nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|w| *w < 0.0) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::domain("weights must be a probability vector"));
    }
    let term = match mode {
        AverageMode::Arithmetic => b01.iter().zip(weights).map(|(b, w)| b * w).sum::<f64>().ln(),
        AverageMode::Geometric => {
            if b01.iter().zip(weights).any(|(b, w)| *b == 0.0 && *w > 0.0) {
                return Err(Error::domain("geometric average of a zero training-sample Bayes factor is -inf"));
            }
            b01.iter()
                .zip(weights)
                .filter(|(_, w)| **w > 0.0)
                .map(|(b, w)| w * b.ln())
                .sum()
        }
        AverageMode::Median => weighted_median(b01, weights)?.ln(),
    };
    check_finite(log_bf10_full + term, "combined Bayes factor")
}

/// Weighted combination of training-sample `B01` values with the full-data
/// log Bayes factor. Deterministic: the standard error is 0.
pub fn combine(mode: AverageMode, log_bf10_full: f64, b01: &[f64], weights: &[f64]) -> Result<BayesFactorEstimate> {
    let log_bf10 = combine_core(mode, log_bf10_full, b01, weights)?;
    let mut est = BayesFactorEstimate::deterministic(log_bf10, mode.into());
    est.l = b01.len();
    Ok(est)
}

/// Equal-weight combination of `L` random training-sample draws, with a
/// Monte Carlo standard error for the log Bayes factor.
pub fn combine_draws(mode: AverageMode, log_bf10_full: f64, b01: &[f64]) -> Result<BayesFactorEstimate> {
    let n = b01.len();
    if n == 0 {
        return Err(Error::NoTrainingSample("no training samples drawn".into()));
    }
    let weights = vec![1.0 / n as f64; n];
    let log_bf10 = combine_core(mode, log_bf10_full, b01, &weights)?;
    let se = match mode {
        AverageMode::Arithmetic => {
            let s = mc_summary(b01)?;
            s.std_error / s.mean
        }
        AverageMode::Geometric => mc_summary(&b01.iter().map(|b| b.ln()).collect::<Vec<_>>())?.std_error,
        AverageMode::Median => median_log_se(b01),
    };
    Ok(BayesFactorEstimate {
        log_bf10,
        mc_std_error: se,
        l: n,
        scheme: None,
        seed: None,
        combiner: mode.into(),
        skipped: 0,
    })
}

/// Order-statistic standard error of a sample median on the log scale: the
/// half-width of the distribution-free 95% interval divided by 1.96.
fn median_log_se(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    logs.sort_by(f64::total_cmp);
    let half = 1.96 * (n as f64).sqrt() / 2.0;
    let lo = ((n as f64 / 2.0 - half).floor().max(0.0)) as usize;
    let hi = ((n as f64 / 2.0 + half).ceil() as usize).min(n - 1);
    let se = (logs[hi] - logs[lo]) / (2.0 * 1.96);
    if se.is_finite() {
        se
    } else {
        0.0
    }
}

/// Posterior probability of `M1` given `B10` and prior odds `P(M1)/P(M0)`.
pub fn posterior_prob_m1(bf10: f64, prior_odds: f64) -> Result<f64> {
    if !(bf10 >= 0.0) || !(prior_odds > 0.0) {
        return Err(Error::domain("bf10 must be nonnegative and prior odds positive"));
    }
    if bf10.is_infinite() {
        return Ok(1.0);
    }
    let o = prior_odds * bf10;
    Ok(o / (1.0 + o))
}

/// [`posterior_prob_m1`] from a log Bayes factor, stable for huge values.
pub fn posterior_prob_m1_log(log_bf10: f64, prior_odds: f64) -> Result<f64> {
    if !(prior_odds > 0.0) || log_bf10.is_nan() {
        return Err(Error::domain("prior odds must be positive"));
    }
    let z = log_bf10 + prior_odds.ln();
    Ok(if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        z.exp() / (1.0 + z.exp())
    })
}

/// Training-sample scheme for the limit comparison with one 1 among `n`
/// Bernoulli trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OhaganScheme {
    Mts,
    SmtsExact,
}

/// Arithmetic IBF for data with a single 1 among `n` trials and a small
/// null value `θ0`, returned on the linear scale.
pub fn ohagan_ibf(n: usize, theta0: f64, scheme: OhaganScheme) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("need n >= 2"));
    }
    let mut bits = vec![0u8; n - 1];
    bits.push(1);
    let est = bernoulli_ibf(&bits, theta0, scheme_for_ohagan(scheme), AverageMode::Arithmetic, 0)?;
    Ok(est.log_bf10.exp())
}

fn scheme_for_ohagan(s: OhaganScheme) -> BernoulliScheme {
    match s {
        OhaganScheme::Mts => BernoulliScheme::Mts,
        OhaganScheme::SmtsExact => BernoulliScheme::SmtsExact,
    }
}

/// Training-sample scheme for Bernoulli data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BernoulliScheme {
    /// All `{0, 1}` pairs.
    Mts,
    /// Exact without-replacement SMTS distribution.
    SmtsExact,
    /// `L` random SMTS draws.
    Smts { l: usize },
}

/// Intrinsic Bayes factor for a Bernoulli sequence under the Haldane prior.
pub fn bernoulli_ibf(
    bits: &[u8],
    theta0: f64,
    scheme: BernoulliScheme,
    mode: AverageMode,
    seed: u64,
) -> Result<BayesFactorEstimate> {
    let summary = bernoulli_summary(bits)?;
    let full = bernoulli_bf10(&summary, theta0)?;
    let data = TrainingData::Bernoulli(bits);
    let b01_of = |s: &TrainingSample| match s.summary {
        SampleSummary::Bernoulli { kind, count } => bernoulli_ts_bf01(kind, count, theta0),
        _ => Err(Error::domain("expected a Bernoulli training sample")),
    };
    match scheme {
        BernoulliScheme::Mts => {
            let set = enumerate_mts(data)?;
            let b01 = set.samples.iter().map(b01_of).collect::<Result<Vec<_>>>()?;
            let w = vec![1.0 / b01.len() as f64; b01.len()];
            Ok(combine(mode, full, &b01, &w)?.with_scheme(SchemeSpec::ExhaustiveMts, None))
        }
        BernoulliScheme::SmtsExact => {
            let set = smts_exact_distribution(data)?;
            let b01 = set.samples.iter().map(b01_of).collect::<Result<Vec<_>>>()?;
            combine(mode, full, &b01, &set.probabilities)
        }
        BernoulliScheme::Smts { l } => {
            let draws = map_streams(seed, 0, l, |_, mut rng| draw_smts(data, &mut rng));
            let samples = draws.into_iter().collect::<Result<Vec<_>>>()?;
            let b01 = samples.iter().map(b01_of).collect::<Result<Vec<_>>>()?;
            Ok(combine_draws(mode, full, &b01)?.with_scheme(SchemeSpec::Smts { l }, Some(seed)))
        }
    }
}

fn stats_of(dataset: &SurvivalDataset) -> Result<Vec<GroupStats>> {
    let stats: Vec<GroupStats> = group_stats(dataset)?.into_iter().map(|(_, s)| s).collect();
    if let Some(i) = stats.iter().position(|s| s.n_u == 0) {
        return Err(Error::domain(format!(
            "group {} has no uncensored observation; no proper training sample exists",
            i + 1
        )));
    }
    Ok(stats)
}

/// Training samples for censored data under `scheme`, with their weights.
/// Random schemes use stream `l` of `seed` for draw `l`.
pub fn censored_training_samples(
    dataset: &SurvivalDataset,
    scheme: SchemeSpec,
    seed: u64,
) -> Result<(Vec<TrainingSample>, Vec<f64>)> {
    scheme.validate()?;
    let data = TrainingData::Censored(dataset);
    let samples = match scheme {
        SchemeSpec::ExhaustiveMts => {
            let set = enumerate_mts(data)?;
            if !set.exists {
                return Err(Error::NoTrainingSample("no minimal training sample".into()));
            }
            set.samples
        }
        SchemeSpec::RandomMts { l } => {
            let set = enumerate_mts(data)?;
            if !set.exists {
                return Err(Error::NoTrainingSample("no minimal training sample".into()));
            }
            let picks = map_streams(seed, 0, l, |_, mut rng| rng.index(set.samples.len()));
            picks.into_iter().map(|i| set.samples[i].clone()).collect()
        }
        SchemeSpec::Smts { l } => map_streams(seed, 0, l, |_, mut rng| draw_smts(data, &mut rng))
            .into_iter()
            .collect::<Result<Vec<_>>>()?,
        other => {
            return Err(Error::Unsupported(format!(
                "scheme {} does not apply to censored exponential data",
                other.label()
            )))
        }
    };
    let w = vec![1.0 / samples.len() as f64; samples.len()];
    Ok((samples, w))
}

fn exposures(sample: &TrainingSample) -> Result<&[f64]> {
    sample
        .exposures()
        .ok_or_else(|| Error::domain("expected a censored-data training sample"))
}

/// Intrinsic or EP Bayes factor for censored exponential data: one group
/// tests `θ = θ0`, two groups test equal rates.
pub fn censored_bf(
    dataset: &SurvivalDataset,
    theta0: Option<f64>,
    scheme: SchemeSpec,
    combiner: Combiner,
    seed: u64,
    tol: f64,
) -> Result<BayesFactorEstimate> {
    let stats = stats_of(dataset)?;
    let theta = || theta0.ok_or_else(|| Error::domain("one-sample comparison needs θ0"));
    if combiner == Combiner::IntrinsicPrior {
        return match stats.as_slice() {
            [s] => exp_intrinsic_bf(s, theta()?, tol),
            [s1, s2] => twoexp_intrinsic_bf(s1, s2, tol),
            _ => Err(Error::Unsupported("only one- and two-group data are supported".into())),
        };
    }
    let (samples, weights) = censored_training_samples(dataset, scheme, seed)?;
    let random = !scheme.is_exhaustive();
    let finish = |est: BayesFactorEstimate| est.with_scheme(scheme, random.then_some(seed));
    if combiner == Combiner::Ep {
        let [s1, s2] = stats.as_slice() else {
            return Err(Error::Unsupported(
                "the expected-posterior Bayes factor is implemented for the two-sample comparison".into(),
            ));
        };
        let pairs = samples
            .iter()
            .map(|s| exposures(s).map(|t| (t[0], t[1])))
            .collect::<Result<Vec<_>>>()?;
        return Ok(finish(twoexp_ep_from_pairs(s1, s2, &pairs, random)?));
    }
    let mode = match combiner {
        Combiner::Arithmetic => AverageMode::Arithmetic,
        Combiner::Geometric => AverageMode::Geometric,
        _ => AverageMode::Median,
    };
    let (full, b01) = match stats.as_slice() {
        [s] => {
            let t0 = theta()?;
            let b01 = samples
                .iter()
                .map(|s| exposures(s).and_then(|t| exp_ts_bf01(t[0], t0)))
                .collect::<Result<Vec<_>>>()?;
            (exp_bf10(s, t0)?, b01)
        }
        [s1, s2] => {
            let b01 = samples
                .iter()
                .map(|s| exposures(s).and_then(|t| twoexp_ts_bf01(t[0], t[1])))
                .collect::<Result<Vec<_>>>()?;
            (twoexp_bf10(s1, s2)?, b01)
        }
        _ => return Err(Error::Unsupported("only one- and two-group data are supported".into())),
    };
    let est = if random {
        combine_draws(mode, full, &b01)?
    } else {
        combine(mode, full, &b01, &weights)?
    };
    Ok(finish(est))
}

/// Arithmetic IBF for two censored exponential groups from `L` random SMTS.
pub fn gehan_arithmetic_ibf(dataset: &SurvivalDataset, l: usize, seed: u64) -> Result<BayesFactorEstimate> {
    two_groups(dataset)?;
    censored_bf(dataset, None, SchemeSpec::Smts { l }, Combiner::Arithmetic, seed, 0.0)
}

/// Expected-posterior-prior Bayes factor from the same `L` SMTS draws that
/// [`gehan_arithmetic_ibf`] uses for the same seed.
pub fn gehan_ep_bf(dataset: &SurvivalDataset, l: usize, seed: u64) -> Result<BayesFactorEstimate> {
    two_groups(dataset)?;
    censored_bf(dataset, None, SchemeSpec::Smts { l }, Combiner::Ep, seed, 0.0)
}

fn two_groups(dataset: &SurvivalDataset) -> Result<()> {
    if dataset.num_groups() != 2 {
        return Err(Error::domain(format!("expected two groups, found {}", dataset.num_groups())));
    }
    Ok(())
}

/// EP Bayes factor from per-group training-sample times `(T1(l), T2(l))`.
pub fn twoexp_ep_from_pairs(
    s1: &GroupStats,
    s2: &GroupStats,
    pairs: &[(f64, f64)],
    with_error: bool,
) -> Result<BayesFactorEstimate> {
    if pairs.is_empty() {
        return Err(Error::NoTrainingSample("no training samples".into()));
    }
    if s1.n_u == 0 || s2.n_u == 0 {
        return Err(Error::ImproperMarginal("a group has no uncensored observation".into()));
    }
    let (n1, n2) = (s1.n_u as f64, s2.n_u as f64);
    let (t1, t2) = (s1.total_time, s2.total_time);
    let front = ln_gamma_pos(n1 + 1.0) + ln_gamma_pos(n2 + 1.0) - ln_gamma_pos(n1 + n2 + 2.0);
    // Terms in logs, shifted by the smallest totals so they stay representable.
    let ln_num: Vec<f64> = pairs
        .iter()
        .map(|&(a, b)| a.ln() + b.ln() - (n1 + 1.0) * (t1 + a).ln() - (n2 + 1.0) * (t2 + b).ln())
        .collect();
    let ln_den: Vec<f64> = pairs
        .iter()
        .map(|&(a, b)| 2.0 * (a + b).ln() - (n1 + n2 + 2.0) * (t1 + t2 + a + b).ln())
        .collect();
    let mn = ln_num.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let md = ln_den.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let a: Vec<f64> = ln_num.iter().map(|v| (v - mn).exp()).collect();
    let b: Vec<f64> = ln_den.iter().map(|v| (v - md).exp()).collect();
    let (sa, sb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    let log_bf10 = check_finite(front + mn - md + sa.ln() - sb.ln(), "EP Bayes factor")?;
    let n = pairs.len() as f64;
    let mc_std_error = if with_error && pairs.len() > 1 {
        // Delta method for the log of a ratio of means.
        let (ma, mb) = (sa / n, sb / n);
        let var = |x: &[f64], mx: f64, y: &[f64], my: f64| {
            x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum::<f64>() / (n - 1.0)
        };
        let v = var(&a, ma, &a, ma) / (ma * ma) + var(&b, mb, &b, mb) / (mb * mb)
            - 2.0 * var(&a, ma, &b, mb) / (ma * mb);
        (v.max(0.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(BayesFactorEstimate {
        log_bf10,
        mc_std_error,
        l: pairs.len(),
        scheme: None,
        seed: None,
        combiner: Combiner::Ep,
        skipped: 0,
    })
}

/// Bayes factor for equal against distinct exponential rates under the
/// intrinsic prior `θ0/(θ+θ0)^2` on each rate, with an integration over the
/// training-sample times of both groups.
pub fn twoexp_intrinsic_bf(stats1: &GroupStats, stats2: &GroupStats, tol: f64) -> Result<BayesFactorEstimate> {
    if stats1.n_u == 0 || stats2.n_u == 0 {
        return Err(Error::ImproperMarginal("a group has no uncensored observation".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let (n1, n2) = (stats1.n_u as f64, stats2.n_u as f64);
    let (t1, t2) = (stats1.total_time, stats2.total_time);
    // With t_j = T_j s_j the integral becomes T1^{-n1} T2^{-n2} times an
    // integral over s whose scale no longer depends on the data totals.
    let front = ln_gamma_pos(n1 + 1.0) + ln_gamma_pos(n2 + 1.0) - ln_gamma_pos(n1 + n2) + (n1 + n2) * (t1 + t2).ln()
        - n1 * t1.ln()
        - n2 * t2.ln();
    let integrand = |s1: f64, s2: f64| {
        let (a, b) = (t1 * s1, t2 * s2);
        if a == 0.0 || b == 0.0 {
            return 0.0;
        }
        let r = a / (a + b);
        r * (1.0 - r) * (-(n1 + 1.0) * s1.ln_1p() - (n2 + 1.0) * s2.ln_1p()).exp()
    };
    let q = integrate_quadrant(integrand, QuadOptions::relative(tol))?;
    Ok(BayesFactorEstimate::deterministic(
        check_finite(front + q.value.ln(), "intrinsic Bayes factor")?,
        Combiner::IntrinsicPrior,
    ))
}

/// `ln ∫_0^∞ exp(log_f(θ)) dθ`, integrating in `θ = scale · s`.
fn log_integral_positive<F: Fn(f64) -> f64>(log_f: F, scale: f64, shift: f64, tol: f64) -> Result<f64> {
    let q = integrate_semi_infinite(
        |s| {
            let v = log_f(scale * s) - shift;
            if v.is_nan() {
                0.0
            } else {
                v.exp()
            }
        },
        0.0,
        QuadOptions::relative(tol),
    )?;
    check_finite(scale.ln() + q.value.ln() + shift, "marginal integral")
}

/// One-sample censored exponential against `θ = θ0` under the intrinsic
/// prior `θ0/(θ+θ0)^2`.
pub fn exp_intrinsic_bf(stats: &GroupStats, theta0: f64, tol: f64) -> Result<BayesFactorEstimate> {
    if !(theta0 > 0.0) {
        return Err(Error::domain("θ0 must be positive"));
    }
    let (n, t) = (stats.n_u as f64, stats.total_time);
    let log_lik = |th: f64| n * th.ln() - th * t;
    let mode = if n > 0.0 { n / t } else { theta0 };
    let log_f = |th: f64| log_lik(th) + theta0.ln() - 2.0 * (th + theta0).ln();
    let num = log_integral_positive(log_f, mode, log_f(mode), tol)?;
    Ok(BayesFactorEstimate::deterministic(
        check_finite(num - log_lik(theta0), "intrinsic Bayes factor")?,
        Combiner::IntrinsicPrior,
    ))
}

/// Poisson count against `θ = θ0` under the intrinsic prior
/// `3θ0√θ / (2(θ+θ0)^{5/2})`.
pub fn poisson_intrinsic_bf(obs: &PoissonObservation, theta0: f64, tol: f64) -> Result<BayesFactorEstimate> {
    if !(theta0 > 0.0) {
        return Err(Error::domain("θ0 must be positive"));
    }
    let (x, t) = (obs.count as f64, obs.exposure);
    let log_lik = |th: f64| x * th.ln() - th * t;
    let log_prior = |th: f64| (1.5 * theta0).ln() + 0.5 * th.ln() - 2.5 * (th + theta0).ln();
    let mode = ((x + 0.5) / t).max(f64::MIN_POSITIVE);
    let log_f = |th: f64| log_lik(th) + log_prior(th);
    let num = log_integral_positive(log_f, mode, log_f(mode), tol)?;
    Ok(BayesFactorEstimate::deterministic(
        check_finite(num - log_lik(theta0), "intrinsic Bayes factor")?,
        Combiner::IntrinsicPrior,
    ))
}

/// Bernoulli Bayes factor under the SMTS intrinsic prior
/// `θ0(1-θ0)[(1-(1-θ)(1-θ0))^{-2} + (1-θθ0)^{-2}]`.
pub fn bernoulli_intrinsic_bf(summary: &BernoulliSummary, theta0: f64, tol: f64) -> Result<BayesFactorEstimate> {
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(Error::domain(format!(
            "θ0 = {theta0} must lie in (0, 1); the boundary is a limit statement"
        )));
    }
    if !summary.has_mts() {
        return Err(Error::ImproperMarginal(format!("{summary}: need 1 <= S <= n-1")));
    }
    let (n, s) = (summary.n as f64, summary.ones as f64);
    let phat = s / n;
    let shift = s * phat.ln() + (n - s) * (-phat).ln_1p();
    let f = |th: f64| {
        if th <= 0.0 || th >= 1.0 {
            return 0.0;
        }
        let k = (s * th.ln() + (n - s) * (-th).ln_1p() - shift).exp();
        let a = th + theta0 - th * theta0;
        let b = 1.0 - th * theta0;
        k * (1.0 / (a * a) + 1.0 / (b * b))
    };
    // The bracket peaks on the scale of θ0 near 0 and of 1-θ0 near 1.
    let mut cuts = vec![0.0, 1.0, phat];
    let mut h = theta0;
    while h < 1.0 {
        cuts.push(h);
        cuts.push(1.0 - h);
        h *= 8.0;
    }
    let mut h = 1.0 - theta0;
    while h < 1.0 && h > 0.0 {
        cuts.push(h);
        cuts.push(1.0 - h);
        h *= 8.0;
    }
    cuts.retain(|c| (0.0..=1.0).contains(c));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let panels: Vec<(f64, f64)> = cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect();
    let mut rough = 0.0;
    for &(a, b) in &panels {
        rough += integrate(f, a, b, QuadOptions::relative(1e-4))?.value;
    }
    // Panel errors are controlled against the total, not each panel.
    let opts = QuadOptions {
        rel_tol: tol,
        abs_tol: tol * rough / panels.len() as f64,
        ..QuadOptions::default()
    };
    let mut total = 0.0;
    for &(a, b) in &panels {
        total += integrate(f, a, b, opts)?.value;
    }
    let log_bf = shift + total.ln() - (s - 1.0) * theta0.ln() - (n - s - 1.0) * (-theta0).ln_1p();
    Ok(BayesFactorEstimate::deterministic(
        check_finite(log_bf, "intrinsic Bayes factor")?,
        Combiner::IntrinsicPrior,
    ))
}

/// Arithmetic, geometric or median IBF for a Poisson count from `L`
/// imaginary exponential training samples.
pub fn poisson_ibf(obs: &PoissonObservation, theta0: f64, l: usize, mode: AverageMode, seed: u64) -> Result<BayesFactorEstimate> {
    if l == 0 {
        return Err(Error::domain("need L >= 1"));
    }
    let full = poisson_bf10(obs, theta0)?;
    let b01 = map_streams(seed, 0, l, |_, mut rng: RngStream| {
        poisson_imaginary_draw(obs, &mut rng).and_then(|x| poisson_ts_bf01(x, theta0))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(combine_draws(mode, full, &b01)?.with_scheme(SchemeSpec::Imaginary { l }, Some(seed)))
}

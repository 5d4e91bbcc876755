//! Known-variance regression through the origin, `X_i = d_i θ + ε_i`.

use serde::{Deserialize, Serialize};

use super::Weighting;
use crate::error::{Error, Result};
use crate::numerics::log_weighted_sum_exp;
use crate::selection::{BayesFactorEstimate, Combiner};
use crate::training::SchemeSpec;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Covariate patterns used in the studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindleyCovariate {
    /// `d_i = i^{-1/2}`: information decays along the sample.
    InverseSqrt,
    /// `d_i = i`: information grows along the sample.
    Linear,
}

pub fn findley_design(n: usize, covariate: FindleyCovariate) -> Vec<f64> {
    (1..=n)
        .map(|i| match covariate {
            FindleyCovariate::InverseSqrt => 1.0 / (i as f64).sqrt(),
            FindleyCovariate::Linear => i as f64,
        })
        .collect()
}

/// Pieces of the known-variance IBF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindleyIbf {
    pub estimate: BayesFactorEstimate,
    pub log_full: f64,
    pub log_training_average: f64,
}

fn check(x: &[f64], d: &[f64]) -> Result<()> {
    if x.is_empty() || x.len() != d.len() {
        return Err(Error::domain("x and d must be nonempty and of equal length"));
    }
    if d.iter().all(|v| *v == 0.0) {
        return Err(Error::domain("all covariates are zero"));
    }
    if x.iter().chain(d).any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite input"));
    }
    Ok(())
}

/// Indices kept by a top-`n0` information truncation, or all of them.
fn kept(d: &[f64], truncate: Option<usize>) -> Result<Vec<usize>> {
    let mut idx: Vec<usize> = (0..d.len()).collect();
    if let Some(n0) = truncate {
        if n0 == 0 {
            return Err(Error::domain("truncation must keep at least one sample"));
        }
        idx.sort_by(|&a, &b| (d[b] * d[b]).total_cmp(&(d[a] * d[a])).then(a.cmp(&b)));
        idx.truncate(n0);
        idx.sort_unstable();
    }
    Ok(idx)
}

fn weights(d: &[f64], idx: &[usize], weighting: Weighting) -> Vec<f64> {
    match weighting {
        Weighting::Uniform => vec![1.0 / idx.len() as f64; idx.len()],
        Weighting::Information => {
            let ss: f64 = idx.iter().map(|&i| d[i] * d[i]).sum();
            idx.iter().map(|&i| d[i] * d[i] / ss).collect()
        }
    }
}

/// `√(2π)/‖d‖ exp((Σx_i d_i)^2 / (2‖d‖^2)) Σ p_i |d_i|/√(2π) e^{-x_i^2/2}`
/// with `p_i = 1/n` or `p_i = d_i^2/‖d‖^2`.
pub fn findley_ibf(x: &[f64], d: &[f64], weighting: Weighting) -> Result<BayesFactorEstimate> {
    Ok(findley_ibf_truncated(x, d, weighting, None)?.estimate)
}

/// [`findley_ibf`] restricted to the `n0` most informative training samples.
pub fn findley_ibf_truncated(x: &[f64], d: &[f64], weighting: Weighting, truncate: Option<usize>) -> Result<FindleyIbf> {
    check(x, d)?;
    let ss: f64 = d.iter().map(|v| v * v).sum();
    let sxd: f64 = x.iter().zip(d).map(|(a, b)| a * b).sum();
    let log_full = LN_SQRT_2PI - 0.5 * ss.ln() + sxd * sxd / (2.0 * ss);
    let idx = kept(d, truncate)?;
    let w = weights(d, &idx, weighting);
    let logs: Vec<f64> = idx
        .iter()
        .map(|&i| d[i].abs().ln() - LN_SQRT_2PI - 0.5 * x[i] * x[i])
        .collect();
    let log_training_average = log_weighted_sum_exp(&logs, &w);
    let log_bf10 = log_full + log_training_average;
    if !log_bf10.is_finite() {
        return Err(Error::domain("Bayes factor is not finite"));
    }
    let scheme = match weighting {
        Weighting::Uniform => SchemeSpec::ExhaustiveMts,
        Weighting::Information => SchemeSpec::InfoWeightedExhaustive,
    };
    Ok(FindleyIbf {
        estimate: BayesFactorEstimate {
            log_bf10,
            mc_std_error: 0.0,
            l: idx.len(),
            scheme: Some(scheme),
            seed: None,
            combiner: Combiner::Arithmetic,
            skipped: 0,
        },
        log_full,
        log_training_average,
    })
}

/// Moments of the weighted expected-posterior prior, a mixture of
/// `N(x_i/d_i, 1/d_i^2)` components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpPriorStats {
    pub total_mass: f64,
    pub mean: f64,
    pub variance: f64,
}

pub fn findley_ep_prior_stats(
    x: &[f64],
    d: &[f64],
    weighting: Weighting,
    truncate: Option<usize>,
) -> Result<EpPriorStats> {
    check(x, d)?;
    if d.contains(&0.0) {
        return Err(Error::domain("a zero covariate gives an improper posterior component"));
    }
    let idx = kept(d, truncate)?;
    let w = weights(d, &idx, weighting);
    let total_mass: f64 = w.iter().sum();
    let mean = idx.iter().zip(&w).map(|(&i, p)| p * x[i] / d[i]).sum::<f64>() / total_mass;
    let variance = idx
        .iter()
        .zip(&w)
        .map(|(&i, p)| p * (1.0 / (d[i] * d[i]) + (x[i] / d[i] - mean).powi(2)))
        .sum::<f64>()
        / total_mass;
    Ok(EpPriorStats {
        total_mass,
        mean,
        variance,
    })
}

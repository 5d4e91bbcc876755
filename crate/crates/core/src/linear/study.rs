//! Growth of log Bayes factors with the sample size.

use serde::{Deserialize, Serialize};

use super::{example16_design, findley_design, findley_ibf_truncated, gprior_bf, linear_ibf};
use super::{FindleyCovariate, LinearComparison, SampleSource, Weighting};
use crate::error::{Error, Result};
use crate::numerics::{fit_slope, map_streams, median, RngStream};

/// Which study to run. Data are generated from `y = β0 + β1 x + ε` (or
/// `x_i = θ d_i + ε_i` for regression through the origin) with standard normal errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "study")]
pub enum StudyKind {
    /// Grid entries are `n`.
    Findley {
        covariate: FindleyCovariate,
        theta: f64,
        weighting: Weighting,
        truncate: Option<usize>,
    },
    /// Grid entries are `n`, rounded down to odd `2m + 1`; `g = n`.
    Gprior { beta: [f64; 2], delta: f64 },
    /// Grid entries are `m`; exhaustive IBF on `2m + 1` rows.
    Example16 {
        beta: [f64; 2],
        delta: f64,
        weighting: Weighting,
        truncate: Option<usize>,
    },
}

impl StudyKind {
    pub fn label(&self) -> &'static str {
        match self {
            StudyKind::Findley { .. } => "findley",
            StudyKind::Gprior { .. } => "gprior",
            StudyKind::Example16 { .. } => "example16",
        }
    }

    fn param(&self) -> String {
        match self {
            StudyKind::Findley {
                theta,
                weighting,
                truncate,
                ..
            } => {
                let mut s = format!("theta={theta};weighting={}", weighting.label());
                if let Some(n0) = truncate {
                    s.push_str(&format!(";truncate={n0}"));
                }
                s
            }
            StudyKind::Gprior { beta, delta } => format!("beta1={};delta={delta}", beta[1]),
            StudyKind::Example16 {
                beta, delta, weighting, ..
            } => format!("beta1={};delta={delta};weighting={}", beta[1], weighting.label()),
        }
    }
}

/// Study grid and replication. Replicate `r` draws its data from stream `r`
/// of `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub kind: StudyKind,
    pub grid: Vec<usize>,
    pub seed: u64,
    pub replicates: usize,
}

/// One grid point of a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n_or_m: usize,
    pub param: String,
    pub median_log_bf: f64,
    /// Slope of median log BF on ln n over the grid up to this row.
    pub slope_to_here: Option<f64>,
    pub seeds: usize,
    /// Per-replicate log BFs in replicate order.
    pub log_bfs: Vec<f64>,
}

/// The last row's error is drawn first so that it is shared across the grid.
fn linear_data(mut rng: RngStream, x: &nalgebra::DMatrix<f64>, beta: [f64; 2]) -> Vec<f64> {
    let n = x.nrows();
    let last = rng.standard_normal();
    (0..n)
        .map(|r| {
            let e = if r + 1 == n { last } else { rng.standard_normal() };
            beta[0] + beta[1] * x[(r, 1)] + e
        })
        .collect()
}

/// Sample size behind a grid entry.
fn sample_size(kind: &StudyKind, g: usize) -> usize {
    match kind {
        StudyKind::Findley { .. } => g,
        StudyKind::Gprior { .. } => 2 * ((g - 1) / 2) + 1,
        StudyKind::Example16 { .. } => 2 * g + 1,
    }
}

fn replicate(kind: &StudyKind, grid: &[usize], rng: RngStream) -> Result<Vec<f64>> {
    match kind {
        StudyKind::Findley {
            covariate,
            theta,
            weighting,
            truncate,
        } => {
            let n_max = *grid.iter().max().unwrap();
            let d = findley_design(n_max, *covariate);
            let mut rng = rng;
            let x: Vec<f64> = d.iter().map(|di| theta * di + rng.standard_normal()).collect();
            grid.iter()
                .map(|&n| Ok(findley_ibf_truncated(&x[..n], &d[..n], *weighting, *truncate)?.estimate.log_bf10))
                .collect()
        }
        StudyKind::Gprior { beta, delta } => grid
            .iter()
            .map(|&g| {
                let n = sample_size(kind, g);
                let (x1, x2) = example16_design((n - 1) / 2, *delta)?;
                let y = linear_data(rng.clone(), &x2, *beta);
                gprior_bf(&LinearComparison::new(y, x1, x2)?, n as f64)
            })
            .collect(),
        StudyKind::Example16 {
            beta,
            delta,
            weighting,
            truncate,
        } => grid
            .iter()
            .map(|&m| {
                let (x1, x2) = example16_design(m, *delta)?;
                let y = linear_data(rng.clone(), &x2, *beta);
                let cmp = LinearComparison::new(y, x1, x2)?;
                Ok(linear_ibf(&cmp, *weighting, SampleSource::Exhaustive, *truncate)?.estimate.log_bf10)
            })
            .collect(),
    }
}

pub fn consistency_study(config: &StudyConfig) -> Result<Vec<StudyRow>> {
    if config.grid.is_empty() || config.replicates == 0 {
        return Err(Error::domain("study needs a nonempty grid and at least one replicate"));
    }
    let min = match config.kind {
        StudyKind::Findley { .. } => 1,
        StudyKind::Gprior { .. } => 3,
        StudyKind::Example16 { .. } => 1,
    };
    if config.grid.iter().any(|&g| g < min) || config.grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!("grid must be strictly increasing with entries >= {min}")));
    }
    if let StudyKind::Findley { theta, .. } | StudyKind::Gprior { beta: [_, theta], .. } = &config.kind {
        if !theta.is_finite() {
            return Err(Error::domain("non-finite parameter"));
        }
    }
    let per_rep = map_streams(config.seed, 0, config.replicates, |_, rng| replicate(&config.kind, &config.grid, rng))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let param = config.kind.param();
    let mut rows = Vec::with_capacity(config.grid.len());
    let mut ln_n = Vec::new();
    let mut medians = Vec::new();
    for (j, &g) in config.grid.iter().enumerate() {
        let log_bfs: Vec<f64> = per_rep.iter().map(|r| r[j]).collect();
        let med = median(&log_bfs)?;
        ln_n.push((sample_size(&config.kind, g) as f64).ln());
        medians.push(med);
        rows.push(StudyRow {
            n_or_m: g,
            param: param.clone(),
            median_log_bf: med,
            slope_to_here: fit_slope(&ln_n, &medians).ok(),
            seeds: config.replicates,
            log_bfs,
        });
    }
    Ok(rows)
}

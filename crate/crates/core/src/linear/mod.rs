//! Normal linear models: arithmetic and information-weighted IBFs over
//! row subsets, known-variance regression through the origin, the g-prior, and
//! consistency studies.

pub(crate) mod algebra;
mod findley;
mod gprior;
mod study;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ln_gamma_pos, log_binomial, map_streams, RngStream};
use crate::selection::{BayesFactorEstimate, Combiner};
use crate::training::{singular_threshold, SchemeSpec};
use algebra::Factored;

pub use algebra::{gram_determinant, rss};
pub use findley::{
    findley_design, findley_ep_prior_stats, findley_ibf, findley_ibf_truncated, EpPriorStats, FindleyCovariate, FindleyIbf,
};
pub use gprior::{example16_design, gprior_bf, gprior_limit_approximation};
pub use study::{consistency_study, StudyConfig, StudyKind, StudyRow};

/// Training-sample weighting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// Equal weight on every minimal training sample.
    Uniform,
    /// Weight proportional to the moment-matrix determinant of the sample.
    Information,
}

impl Weighting {
    pub fn label(&self) -> &'static str {
        match self {
            Weighting::Uniform => "uniform",
            Weighting::Information => "information",
        }
    }
}

/// Where the training samples come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleSource {
    /// Every row subset of the minimal size.
    Exhaustive,
    /// `L` uniformly drawn nonsingular subsets; information weights enter as
    /// self-normalized importance weights.
    Sampled { l: usize, seed: u64 },
}

/// Nested comparison of a simple design `X_i` within a complex design `X_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearComparison {
    pub y: Vec<f64>,
    pub x_simple: DMatrix<f64>,
    pub x_complex: DMatrix<f64>,
    /// Known error variance, when the variance is not a model parameter.
    pub known_variance: Option<f64>,
}

impl LinearComparison {
    pub fn new(y: Vec<f64>, x_simple: DMatrix<f64>, x_complex: DMatrix<f64>) -> Result<Self> {
        let n = y.len();
        if x_simple.nrows() != n || x_complex.nrows() != n {
            return Err(Error::domain("designs and response differ in row count"));
        }
        let (ki, kj) = (x_simple.ncols(), x_complex.ncols());
        if ki == 0 || kj <= ki {
            return Err(Error::domain(format!("need 0 < k_i < k_j, got k_i = {ki}, k_j = {kj}")));
        }
        if kj + 1 > n {
            return Err(Error::NoTrainingSample(format!("need at least {} rows", kj + 1)));
        }
        for x in [&x_simple, &x_complex] {
            if Factored::new(x).is_rank_deficient(1e-12) {
                return Err(Error::RankDeficient("design is not of full column rank".into()));
            }
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("response contains non-finite values"));
        }
        Ok(Self {
            y,
            x_simple,
            x_complex,
            known_variance: None,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn k_simple(&self) -> usize {
        self.x_simple.ncols()
    }

    pub fn k_complex(&self) -> usize {
        self.x_complex.ncols()
    }

    /// `ln C` with `C = Γ((n-k_j)/2)Γ((k_j-k_i+1)/2) / [Γ((n-k_i)/2)Γ(1/2)]`.
    pub fn log_c(&self) -> f64 {
        let (n, ki, kj) = (self.n() as f64, self.k_simple() as f64, self.k_complex() as f64);
        ln_gamma_pos((n - kj) / 2.0) + ln_gamma_pos((kj - ki + 1.0) / 2.0)
            - ln_gamma_pos((n - ki) / 2.0)
            - ln_gamma_pos(0.5)
    }

    /// Log of the full-data factor
    /// `|X_i'X_i|^{1/2} R_i^{(n-k_i)/2} / (|X_j'X_j|^{1/2} R_j^{(n-k_j)/2})`.
    pub fn log_full_factor(&self) -> Result<f64> {
        let (n, ki, kj) = (self.n() as f64, self.k_simple() as f64, self.k_complex() as f64);
        let y = DVector::from_column_slice(&self.y);
        let fi = Factored::new(&self.x_simple);
        let fj = Factored::new(&self.x_complex);
        let (ri, rj) = (fi.residual_ss(&y), fj.residual_ss(&y));
        if !(ri > 0.0 && rj > 0.0) {
            return Err(Error::domain("a full-data residual sum of squares is zero"));
        }
        Ok(0.5 * fi.log_gram_det() + 0.5 * (n - ki) * ri.ln() - 0.5 * fj.log_gram_det() - 0.5 * (n - kj) * rj.ln())
    }

    /// Determinants and residual sums of squares on a row subset.
    pub fn training_term(&self, rows: &[usize]) -> TrainingTerm {
        let y = DVector::from_iterator(rows.len(), rows.iter().map(|&r| self.y[r]));
        let fi = Factored::new(&self.x_simple.select_rows(rows));
        let fj = Factored::new(&self.x_complex.select_rows(rows));
        // Residuals at rounding level of y are exact fits.
        let floor = 64.0 * f64::EPSILON * f64::EPSILON * y.norm_squared();
        let clean = |r: f64| if r <= floor { 0.0 } else { r };
        TrainingTerm {
            indices: rows.to_vec(),
            det_simple: fi.gram_det(),
            det_complex: fj.gram_det(),
            rss_simple: clean(fi.residual_ss(&y)),
            rss_complex: clean(fj.residual_ss(&y)),
        }
    }

    fn thresholds(&self) -> (f64, f64) {
        let s = self.k_complex() + 1;
        let n = self.n();
        (
            singular_threshold(Factored::new(&self.x_simple).gram_det(), s, n),
            singular_threshold(Factored::new(&self.x_complex).gram_det(), s, n),
        )
    }
}

/// Per-subset ingredients of the training-sample average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTerm {
    pub indices: Vec<usize>,
    pub det_simple: f64,
    pub det_complex: f64,
    pub rss_simple: f64,
    pub rss_complex: f64,
}

impl TrainingTerm {
    /// `ln[|X_j(l)'X_j(l)|^{1/2} R_j(l)^{1/2} / (|X_i(l)'X_i(l)|^{1/2} R_i(l)^{(k_j-k_i+1)/2})]`,
    /// or `None` when `R_i(l) = 0`.
    pub fn log_ratio(&self, k_simple: usize, k_complex: usize) -> Option<f64> {
        if !(self.rss_simple > 0.0) {
            return None;
        }
        let e = (k_complex - k_simple + 1) as f64 / 2.0;
        Some(
            0.5 * self.det_complex.ln() + 0.5 * self.rss_complex.ln()
                - 0.5 * self.det_simple.ln()
                - e * self.rss_simple.ln(),
        )
    }
}

/// Result of [`linear_ibf`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearIbf {
    /// Complex model over simple model.
    pub estimate: BayesFactorEstimate,
    pub log_full_factor: f64,
    /// Log of the weighted average of `C ×` the per-sample ratio.
    pub log_training_average: f64,
    /// Samples entering the average.
    pub used: usize,
    /// Nonsingular samples whose determinant falls below the threshold.
    pub singular: usize,
    /// Threshold applied to `|X_j(l)'X_j(l)|`.
    pub threshold: f64,
}

impl LinearIbf {
    pub fn skipped_fraction(&self) -> f64 {
        let total = self.used + self.estimate.skipped;
        if total == 0 {
            0.0
        } else {
            self.estimate.skipped as f64 / total as f64
        }
    }
}

/// Arithmetic IBF of the complex over the simple design, with uniform or
/// information weights over minimal training samples of size `k_j + 1`.
///
/// `truncate` keeps only the `n0` most informative samples.
pub fn linear_ibf(
    cmp: &LinearComparison,
    weighting: Weighting,
    source: SampleSource,
    truncate: Option<usize>,
) -> Result<LinearIbf> {
    let (ki, kj) = (cmp.k_simple(), cmp.k_complex());
    let n = cmp.n();
    let size = kj + 1;
    let (thr_i, thr_j) = cmp.thresholds();
    let proper = |t: &TrainingTerm| t.det_simple > thr_i && t.det_complex > thr_j;
    let log_full = cmp.log_full_factor()?;
    let log_c = cmp.log_c();

    let (mut terms, singular, random) = match source {
        SampleSource::Exhaustive => {
            let mut singular = 0;
            let terms: Vec<TrainingTerm> = (0..n)
                .combinations(size)
                .map(|rows| cmp.training_term(&rows))
                .filter(|t| {
                    let ok = proper(t);
                    singular += usize::from(!ok);
                    ok
                })
                .collect();
            (terms, singular, false)
        }
        SampleSource::Sampled { l, seed } => {
            if l == 0 {
                return Err(Error::domain("need L >= 1"));
            }
            // Rejection of singular subsets; give up when almost none are proper.
            let max_tries = 10_000usize.max(100 * size);
            let draws = map_streams(seed, 0, l, |_, mut rng: RngStream| {
                for _ in 0..max_tries {
                    let rows = random_subset(n, size, &mut rng);
                    let t = cmp.training_term(&rows);
                    if proper(&t) {
                        return Ok(t);
                    }
                }
                Err(Error::NoTrainingSample("no nonsingular subset found by sampling".into()))
            });
            (draws.into_iter().collect::<Result<Vec<_>>>()?, 0, true)
        }
    };
    if terms.is_empty() {
        return Err(Error::NoTrainingSample("no nonsingular training sample".into()));
    }
    if let Some(n0) = truncate {
        if n0 == 0 {
            return Err(Error::domain("truncation must keep at least one sample"));
        }
        terms.sort_by(|a, b| b.det_complex.total_cmp(&a.det_complex));
        terms.truncate(n0);
    }

    let mut log_terms = Vec::with_capacity(terms.len());
    let mut log_w = Vec::with_capacity(terms.len());
    let mut skipped = 0;
    for t in &terms {
        match t.log_ratio(ki, kj) {
            Some(v) => {
                log_terms.push(log_c + v);
                log_w.push(match weighting {
                    Weighting::Uniform => 0.0,
                    Weighting::Information => t.det_complex.ln(),
                });
            }
            None => skipped += 1,
        }
    }
    if log_terms.is_empty() {
        return Err(Error::NoTrainingSample("every training sample is degenerate".into()));
    }
    // Exhaustive information weights are normalized exactly by
    // (n - k_j)|X_j'X_j|; otherwise weights are self-normalized.
    let exact_norm = !random && truncate.is_none() && skipped == 0 && weighting == Weighting::Information;
    let log_norm = if exact_norm {
        log_binomial((n - kj) as f64, 1.0) + Factored::new(&cmp.x_complex).log_gram_det()
    } else {
        crate::numerics::log_sum_exp(&log_w)
    };
    let log_avg = crate::numerics::log_sum_exp(
        &log_terms.iter().zip(&log_w).map(|(t, w)| t + w).collect::<Vec<_>>(),
    ) - log_norm;

    let mc_std_error = if random && log_terms.len() > 1 {
        ratio_log_se(&log_terms, &log_w)
    } else {
        0.0
    };
    let scheme = match (weighting, source) {
        (Weighting::Uniform, SampleSource::Exhaustive) => SchemeSpec::ExhaustiveMts,
        (Weighting::Uniform, SampleSource::Sampled { l, .. }) => SchemeSpec::RandomMts { l },
        (Weighting::Information, SampleSource::Exhaustive) => SchemeSpec::InfoWeightedExhaustive,
        (Weighting::Information, SampleSource::Sampled { l, .. }) => SchemeSpec::InfoWeightedRandom { l },
    };
    let seed = match source {
        SampleSource::Sampled { seed, .. } => Some(seed),
        SampleSource::Exhaustive => None,
    };
    let log_bf10 = log_full + log_avg;
    if !log_bf10.is_finite() {
        return Err(Error::domain("linear IBF is not finite"));
    }
    Ok(LinearIbf {
        estimate: BayesFactorEstimate {
            log_bf10,
            mc_std_error,
            l: log_terms.len(),
            scheme: Some(scheme),
            seed,
            combiner: Combiner::Arithmetic,
            skipped,
        },
        log_full_factor: log_full,
        log_training_average: log_avg,
        used: log_terms.len(),
        singular,
        threshold: thr_j,
    })
}

/// Delta-method standard error of `ln(Σ w t / Σ w)` for i.i.d. draws.
fn ratio_log_se(log_terms: &[f64], log_w: &[f64]) -> f64 {
    let m = log_terms
        .iter()
        .zip(log_w)
        .map(|(t, w)| t + w)
        .fold(f64::NEG_INFINITY, f64::max);
    let mw = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let a: Vec<f64> = log_terms.iter().zip(log_w).map(|(t, w)| (t + w - m).exp()).collect();
    let b: Vec<f64> = log_w.iter().map(|w| (w - mw).exp()).collect();
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov = |x: &[f64], mx: f64, y: &[f64], my: f64| {
        x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum::<f64>() / (n - 1.0)
    };
    let v = cov(&a, ma, &a, ma) / (ma * ma) + cov(&b, mb, &b, mb) / (mb * mb) - 2.0 * cov(&a, ma, &b, mb) / (ma * mb);
    (v.max(0.0) / n).sqrt()
}

/// Uniformly random `size`-subset of `0..n`, ascending.
fn random_subset(n: usize, size: usize, rng: &mut RngStream) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(size);
    for _ in 0..size {
        out.push(pool.swap_remove(rng.index(pool.len())));
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::training::binet_cauchy_weights;
    use approx::assert_relative_eq;

    fn small() -> LinearComparison {
        let y = vec![1.2, 0.3, 2.9, 2.2, 4.8, 3.1];
        let xs = DMatrix::from_element(6, 1, 1.0);
        let xc = DMatrix::from_fn(6, 2, |r, c| if c == 0 { 1.0 } else { r as f64 * 0.7 + (r % 2) as f64 });
        LinearComparison::new(y, xs, xc).unwrap()
    }

    /// Direct evaluation with explicit normal equations.
    fn brute(cmp: &LinearComparison, info: bool) -> f64 {
        let n = cmp.n();
        let (ki, kj) = (1.0, 2.0);
        let det = |x: &DMatrix<f64>| (x.transpose() * x).determinant();
        let res = |x: &DMatrix<f64>, y: &DVector<f64>| {
            let b = (x.transpose() * x).try_inverse().unwrap() * x.transpose() * y;
            (y - x * b).norm_squared()
        };
        let y = DVector::from_column_slice(&cmp.y);
        let full = det(&cmp.x_simple).sqrt() * res(&cmp.x_simple, &y).powf((n as f64 - ki) / 2.0)
            / (det(&cmp.x_complex).sqrt() * res(&cmp.x_complex, &y).powf((n as f64 - kj) / 2.0));
        let c = cmp.log_c().exp();
        let subsets: Vec<Vec<usize>> = (0..n).combinations(3).collect();
        let mut acc = 0.0;
        for rows in &subsets {
            let xi = cmp.x_simple.select_rows(rows);
            let xj = cmp.x_complex.select_rows(rows);
            let yl = DVector::from_iterator(3, rows.iter().map(|&r| cmp.y[r]));
            let term = det(&xj).sqrt() * res(&xj, &yl).sqrt() / (det(&xi).sqrt() * res(&xi, &yl).powf(1.0));
            let w = if info {
                det(&xj) / ((n as f64 - kj) * det(&cmp.x_complex))
            } else {
                1.0 / subsets.len() as f64
            };
            acc += w * c * term;
        }
        (full * acc).ln()
    }

    #[test]
    fn matches_brute_force() {
        let cmp = small();
        let u = linear_ibf(&cmp, Weighting::Uniform, SampleSource::Exhaustive, None).unwrap();
        assert_relative_eq!(u.estimate.log_bf10, brute(&cmp, false), max_relative = 1e-10);
        let w = linear_ibf(&cmp, Weighting::Information, SampleSource::Exhaustive, None).unwrap();
        assert_relative_eq!(w.estimate.log_bf10, brute(&cmp, true), max_relative = 1e-10);
    }

    #[test]
    fn weighted_equals_substituted_weights() {
        let cmp = small();
        let w = binet_cauchy_weights(&cmp.x_complex, 3).unwrap();
        let log_c = cmp.log_c();
        let avg: f64 = w
            .samples
            .iter()
            .zip(&w.probabilities)
            .map(|(s, p)| p * (log_c + cmp.training_term(&s.indices[0]).log_ratio(1, 2).unwrap()).exp())
            .sum();
        let direct = linear_ibf(&cmp, Weighting::Information, SampleSource::Exhaustive, None).unwrap();
        assert_relative_eq!(direct.log_training_average, avg.ln(), max_relative = 1e-12);
    }

    #[test]
    fn sampled_approaches_exhaustive() {
        let cmp = small();
        for wt in [Weighting::Uniform, Weighting::Information] {
            let ex = linear_ibf(&cmp, wt, SampleSource::Exhaustive, None).unwrap();
            let s = linear_ibf(&cmp, wt, SampleSource::Sampled { l: 4000, seed: 3 }, None).unwrap();
            let se = s.estimate.mc_std_error;
            assert!(se > 0.0);
            assert!((s.estimate.log_bf10 - ex.estimate.log_bf10).abs() < 4.0 * se, "{wt:?}");
        }
    }

    #[test]
    fn truncation_keeps_top_samples() {
        let cmp = small();
        let t = linear_ibf(&cmp, Weighting::Uniform, SampleSource::Exhaustive, Some(5)).unwrap();
        assert_eq!(t.used, 5);
    }

    #[test]
    fn degenerate_samples_are_counted() {
        // Three identical responses give R_i(l) = 0 on that subset.
        let y = vec![1.0, 1.0, 1.0, 2.5, 0.2];
        let xs = DMatrix::from_element(5, 1, 1.0);
        let xc = DMatrix::from_fn(5, 2, |r, c| if c == 0 { 1.0 } else { r as f64 });
        let cmp = LinearComparison::new(y, xs, xc).unwrap();
        let r = linear_ibf(&cmp, Weighting::Uniform, SampleSource::Exhaustive, None).unwrap();
        assert_eq!(r.estimate.skipped, 1);
        assert_eq!(r.used, 9);
        assert!(r.skipped_fraction() > 0.0);
    }

    #[test]
    fn rejects_bad_shapes() {
        let xs = DMatrix::from_element(3, 1, 1.0);
        assert!(LinearComparison::new(vec![1.0, 2.0, 3.0], xs.clone(), xs.clone()).is_err());
        let xc = DMatrix::from_fn(3, 2, |_, _| 1.0);
        assert!(matches!(
            LinearComparison::new(vec![1.0, 2.0, 3.0], xs, xc),
            Err(Error::RankDeficient(_))
        ));
    }
}

//! Training-sample construction: minimal, sequential minimal, information
//! weighted and imaginary schemes.

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::{CensoredObservation, PoissonObservation, SurvivalDataset};
use crate::error::{Error, Result};
use crate::linear::algebra::Factored;
use crate::numerics::{log_binomial, ln_gamma_pos, RngStream};

/// Largest group accepted by [`smts_exact_distribution`].
pub const EXACT_SMTS_MAX_GROUP: usize = 25;
/// Largest number of distinct outcomes per group that exact enumeration
/// will materialize.
pub const EXACT_SMTS_MAX_OUTCOMES: usize = 1 << 22;
/// Relative factor in the nonsingularity threshold for subset moment matrices.
pub const SINGULAR_REL: f64 = 1e-12;

/// Data a training sample is drawn from, tagged by model family.
#[derive(Debug, Clone, Copy)]
pub enum TrainingData<'a> {
    /// Right-censored exponential data with one group (one-sample test) or
    /// two groups (equality of rates).
    Censored(&'a SurvivalDataset),
    /// Bernoulli trials under the Haldane prior.
    Bernoulli(&'a [u8]),
    /// Normal linear models; every design must share the row count.
    Linear(&'a [DMatrix<f64>]),
}

/// Shape of a Bernoulli training sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BernoulliTsKind {
    /// `(0, ..., 0, 1)`; the count is the number of zeros.
    ZerosThenOne,
    /// `(1, ..., 1, 0)`; the count is the number of ones.
    OnesThenZero,
    /// An unordered `{0, 1}` pair.
    MtsPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SampleSummary {
    /// Accumulated time per group: censored times plus the terminal
    /// uncensored time.
    Exposure(Vec<f64>),
    Bernoulli { kind: BernoulliTsKind, count: usize },
    /// A single imaginary observation.
    Imaginary(f64),
    /// Linear-model subsets carry only their row indices.
    Rows,
}

/// One training sample: ordered indices per group plus its summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSample {
    pub indices: Vec<Vec<usize>>,
    pub summary: SampleSummary,
}

impl TrainingSample {
    pub fn size(&self) -> usize {
        self.indices.iter().map(Vec::len).sum()
    }

    /// Per-group accumulated times, when the sample is from censored data.
    pub fn exposures(&self) -> Option<&[f64]> {
        match &self.summary {
            SampleSummary::Exposure(t) => Some(t),
            _ => None,
        }
    }
}

/// Training samples with a probability vector (a randomized or weighted
/// scheme).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSampleSet {
    pub samples: Vec<TrainingSample>,
    pub probabilities: Vec<f64>,
}

impl WeightedSampleSet {
    pub fn new(samples: Vec<TrainingSample>, probabilities: Vec<f64>) -> Result<Self> {
        if samples.len() != probabilities.len() {
            return Err(Error::domain("samples and probabilities differ in length"));
        }
        if probabilities.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::domain("probabilities must be nonnegative"));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self {
            samples,
            probabilities,
        })
    }

    /// Equal weights over `samples`.
    pub fn uniform(samples: Vec<TrainingSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::NoTrainingSample("empty sample set".into()));
        }
        let p = 1.0 / samples.len() as f64;
        let probabilities = vec![p; samples.len()];
        Ok(Self {
            samples,
            probabilities,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn total_probability(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Result of minimal-training-sample enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct MtsSet {
    pub samples: Vec<TrainingSample>,
    /// False when the data admit no minimal training sample at all.
    pub exists: bool,
}

/// Training-sample scheme and its draw count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "variant")]
pub enum SchemeSpec {
    ExhaustiveMts,
    RandomMts { l: usize },
    Smts { l: usize },
    InfoWeightedExhaustive,
    InfoWeightedRandom { l: usize },
    Imaginary { l: usize },
}

impl SchemeSpec {
    /// Number of draws, or `None` for exhaustive schemes.
    pub fn draws(&self) -> Option<usize> {
        match *self {
            SchemeSpec::ExhaustiveMts | SchemeSpec::InfoWeightedExhaustive => None,
            SchemeSpec::RandomMts { l }
            | SchemeSpec::Smts { l }
            | SchemeSpec::InfoWeightedRandom { l }
            | SchemeSpec::Imaginary { l } => Some(l),
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        self.draws().is_none()
    }

    pub fn validate(&self) -> Result<()> {
        match self.draws() {
            Some(0) => Err(Error::domain("random schemes need L >= 1")),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SchemeSpec::ExhaustiveMts => "mts",
            SchemeSpec::RandomMts { .. } => "random-mts",
            SchemeSpec::Smts { .. } => "smts",
            SchemeSpec::InfoWeightedExhaustive => "info-weighted",
            SchemeSpec::InfoWeightedRandom { .. } => "info-weighted-random",
            SchemeSpec::Imaginary { .. } => "imaginary",
        }
    }
}

/// Default number of random training samples: minimal size times sample size.
pub fn default_draws(minimal_size: usize, n: usize) -> usize {
    (minimal_size * n).max(1)
}

fn censored_groups(dataset: &SurvivalDataset) -> Result<Vec<&[CensoredObservation]>> {
    let groups: Vec<&[CensoredObservation]> = dataset.groups().map(|(_, g)| g).collect();
    match groups.len() {
        1 | 2 => Ok(groups),
        0 => Err(Error::domain("dataset has no groups")),
        k => Err(Error::Unsupported(format!("{k} groups; only one- and two-group comparisons are supported"))),
    }
}

/// Nonsingularity threshold for `s`-row subsets of a design with full-data
/// moment determinant `full_det` over `n` rows.
pub fn singular_threshold(full_det: f64, subset_size: usize, n: usize) -> f64 {
    SINGULAR_REL * full_det.powf(subset_size as f64 / n as f64)
}

struct LinearCheck<'a> {
    designs: &'a [DMatrix<f64>],
    thresholds: Vec<f64>,
    size: usize,
}

impl<'a> LinearCheck<'a> {
    fn new(designs: &'a [DMatrix<f64>]) -> Result<Self> {
        let first = designs
            .first()
            .ok_or_else(|| Error::domain("no designs supplied"))?;
        let n = first.nrows();
        if designs.iter().any(|x| x.nrows() != n) {
            return Err(Error::domain("designs differ in row count"));
        }
        let kmax = designs.iter().map(|x| x.ncols()).max().unwrap_or(0);
        let size = kmax + 1;
        if size > n {
            return Err(Error::NoTrainingSample(format!("need {size} rows, have {n}")));
        }
        let thresholds = designs
            .iter()
            .map(|x| singular_threshold(Factored::new(x).gram_det(), size, n))
            .collect();
        Ok(Self {
            designs,
            thresholds,
            size,
        })
    }

    fn is_proper(&self, rows: &[usize]) -> bool {
        rows.len() >= self.size
            && self
                .designs
                .iter()
                .zip(&self.thresholds)
                .all(|(x, thr)| Factored::new(&x.select_rows(rows)).gram_det() > *thr)
    }
}

/// Every minimal training sample of the data.
///
/// * one censored group: single uncensored observations;
/// * two censored groups: one uncensored observation from each group;
/// * Bernoulli: one 0 and one 1;
/// * linear: `max k + 1` rows with every subset moment matrix nonsingular.
pub fn enumerate_mts(data: TrainingData<'_>) -> Result<MtsSet> {
    let samples = match data {
        TrainingData::Censored(ds) => {
            let groups = censored_groups(ds)?;
            let uncensored: Vec<Vec<usize>> = groups
                .iter()
                .map(|g| (0..g.len()).filter(|&i| g[i].is_observed()).collect())
                .collect();
            uncensored
                .iter()
                .map(|v| v.iter().copied())
                .multi_cartesian_product()
                .map(|pick| TrainingSample {
                    summary: SampleSummary::Exposure(
                        pick.iter().zip(&groups).map(|(&i, g)| g[i].value).collect(),
                    ),
                    indices: pick.iter().map(|&i| vec![i]).collect(),
                })
                .collect::<Vec<_>>()
        }
        TrainingData::Bernoulli(bits) => {
            let zeros: Vec<usize> = (0..bits.len()).filter(|&i| bits[i] == 0).collect();
            let ones: Vec<usize> = (0..bits.len()).filter(|&i| bits[i] == 1).collect();
            zeros
                .iter()
                .cartesian_product(ones.iter())
                .map(|(&z, &o)| TrainingSample {
                    indices: vec![vec![z, o]],
                    summary: SampleSummary::Bernoulli {
                        kind: BernoulliTsKind::MtsPair,
                        count: 1,
                    },
                })
                .collect()
        }
        TrainingData::Linear(designs) => {
            let check = LinearCheck::new(designs)?;
            let n = designs[0].nrows();
            (0..n)
                .combinations(check.size)
                .filter(|rows| check.is_proper(rows))
                .map(|rows| TrainingSample {
                    indices: vec![rows],
                    summary: SampleSummary::Rows,
                })
                .collect()
        }
    };
    let exists = !samples.is_empty();
    Ok(MtsSet { samples, exists })
}

/// Checks propriety of a training sample analytically for its family.
pub fn is_proper(data: TrainingData<'_>, sample: &TrainingSample) -> Result<bool> {
    Ok(match data {
        TrainingData::Censored(ds) => {
            let groups = censored_groups(ds)?;
            groups.len() == sample.indices.len()
                && groups
                    .iter()
                    .zip(&sample.indices)
                    .all(|(g, idx)| idx.iter().any(|&i| g[i].is_observed()))
        }
        TrainingData::Bernoulli(bits) => {
            let idx = sample.indices.concat();
            idx.iter().any(|&i| bits[i] == 0) && idx.iter().any(|&i| bits[i] == 1)
        }
        TrainingData::Linear(designs) => LinearCheck::new(designs)?.is_proper(&sample.indices.concat()),
    })
}

/// Draws a sequential minimal training sample: observations are drawn
/// without replacement until the sample first becomes proper. Groups of
/// censored data are sampled independently.
pub fn draw_smts(data: TrainingData<'_>, rng: &mut RngStream) -> Result<TrainingSample> {
    match data {
        TrainingData::Censored(ds) => {
            let groups = censored_groups(ds)?;
            let mut indices = Vec::with_capacity(groups.len());
            let mut times = Vec::with_capacity(groups.len());
            for g in &groups {
                let (idx, t) = smts_censored_group(g, rng)?;
                indices.push(idx);
                times.push(t);
            }
            Ok(TrainingSample {
                indices,
                summary: SampleSummary::Exposure(times),
            })
        }
        TrainingData::Bernoulli(bits) => {
            if !(bits.contains(&0) && bits.contains(&1)) {
                return Err(Error::NoTrainingSample("Bernoulli data need both a 0 and a 1".into()));
            }
            let mut pool: Vec<usize> = (0..bits.len()).collect();
            let mut drawn = Vec::new();
            loop {
                let i = pool.swap_remove(rng.index(pool.len()));
                drawn.push(i);
                let first = bits[drawn[0]];
                if bits[i] != first {
                    let count = drawn.len() - 1;
                    let kind = if first == 0 {
                        BernoulliTsKind::ZerosThenOne
                    } else {
                        BernoulliTsKind::OnesThenZero
                    };
                    return Ok(TrainingSample {
                        indices: vec![drawn],
                        summary: SampleSummary::Bernoulli { kind, count },
                    });
                }
            }
        }
        TrainingData::Linear(designs) => {
            let check = LinearCheck::new(designs)?;
            let n = designs[0].nrows();
            let mut pool: Vec<usize> = (0..n).collect();
            let mut drawn = Vec::new();
            while !pool.is_empty() {
                drawn.push(pool.swap_remove(rng.index(pool.len())));
                if check.is_proper(&drawn) {
                    return Ok(TrainingSample {
                        indices: vec![drawn],
                        summary: SampleSummary::Rows,
                    });
                }
            }
            Err(Error::NoTrainingSample("no proper subset of the rows".into()))
        }
    }
}

fn smts_censored_group(group: &[CensoredObservation], rng: &mut RngStream) -> Result<(Vec<usize>, f64)> {
    if !group.iter().any(|o| o.is_observed()) {
        return Err(Error::NoTrainingSample(
            "a group with only censored observations has no proper training sample".into(),
        ));
    }
    let mut pool: Vec<usize> = (0..group.len()).collect();
    let mut drawn = Vec::new();
    let mut total = 0.0;
    loop {
        let i = pool.swap_remove(rng.index(pool.len()));
        drawn.push(i);
        total += group[i].value;
        if group[i].is_observed() {
            return Ok((drawn, total));
        }
    }
}

/// Exact distribution of one censored group's SMTS: every set of censored
/// observations followed by an uncensored one. Orderings of the censored
/// prefix are merged (they leave every Bayes factor unchanged); the indices
/// list the prefix in ascending order.
fn exact_censored_group(group: &[CensoredObservation]) -> Result<Vec<(Vec<usize>, f64, f64)>> {
    let n = group.len();
    if n > EXACT_SMTS_MAX_GROUP {
        return Err(Error::Size(format!(
            "group of {n} exceeds the exact-enumeration limit of {EXACT_SMTS_MAX_GROUP}; use draw_smts"
        )));
    }
    let censored: Vec<usize> = (0..n).filter(|&i| !group[i].is_observed()).collect();
    let uncensored: Vec<usize> = (0..n).filter(|&i| group[i].is_observed()).collect();
    if uncensored.is_empty() {
        return Err(Error::NoTrainingSample("group has no uncensored observation".into()));
    }
    let outcomes = (1usize << censored.len()).saturating_mul(uncensored.len());
    if outcomes > EXACT_SMTS_MAX_OUTCOMES {
        return Err(Error::Size(format!(
            "{outcomes} outcomes exceed the exact-enumeration limit; use draw_smts"
        )));
    }
    let ln_n_fact = ln_gamma_pos(n as f64 + 1.0);
    let mut out = Vec::with_capacity(outcomes);
    for mask in 0u64..(1u64 << censored.len()) {
        let prefix: Vec<usize> = censored
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        let j = prefix.len() as f64;
        // j! orderings, each with probability (n - j - 1)! / n!
        let p = (ln_gamma_pos(j + 1.0) + ln_gamma_pos(n as f64 - j) - ln_n_fact).exp();
        let prefix_time: f64 = prefix.iter().map(|&i| group[i].value).sum();
        for &u in &uncensored {
            let mut idx = prefix.clone();
            idx.push(u);
            out.push((idx, prefix_time + group[u].value, p));
        }
    }
    Ok(out)
}

/// Exact SMTS distribution under sampling without replacement.
///
/// Bernoulli outcomes are identified by their value pattern `(0,...,0,1)` or
/// `(1,...,1,0)`; the indices returned are a representative draw.
pub fn smts_exact_distribution(data: TrainingData<'_>) -> Result<WeightedSampleSet> {
    match data {
        TrainingData::Censored(ds) => {
            let groups = censored_groups(ds)?;
            let per_group = groups
                .iter()
                .map(|g| exact_censored_group(g))
                .collect::<Result<Vec<_>>>()?;
            let total: usize = per_group.iter().map(Vec::len).product();
            if total > EXACT_SMTS_MAX_OUTCOMES {
                return Err(Error::Size(format!(
                    "{total} joint outcomes exceed the exact-enumeration limit; use draw_smts"
                )));
            }
            let mut samples = Vec::with_capacity(total);
            let mut probabilities = Vec::with_capacity(total);
            for combo in per_group.iter().map(|v| v.iter()).multi_cartesian_product() {
                probabilities.push(combo.iter().map(|c| c.2).product());
                samples.push(TrainingSample {
                    indices: combo.iter().map(|c| c.0.clone()).collect(),
                    summary: SampleSummary::Exposure(combo.iter().map(|c| c.1).collect()),
                });
            }
            renormalized(samples, probabilities)
        }
        TrainingData::Bernoulli(bits) => {
            let n = bits.len();
            if n > EXACT_SMTS_MAX_GROUP {
                return Err(Error::Size(format!(
                    "{n} trials exceed the exact-enumeration limit of {EXACT_SMTS_MAX_GROUP}; use draw_smts"
                )));
            }
            let zeros: Vec<usize> = (0..n).filter(|&i| bits[i] == 0).collect();
            let ones: Vec<usize> = (0..n).filter(|&i| bits[i] == 1).collect();
            if zeros.is_empty() || ones.is_empty() {
                return Err(Error::NoTrainingSample("Bernoulli data need both a 0 and a 1".into()));
            }
            let mut samples = Vec::new();
            let mut probabilities = Vec::new();
            for (lead, other, kind) in [
                (&zeros, &ones, BernoulliTsKind::ZerosThenOne),
                (&ones, &zeros, BernoulliTsKind::OnesThenZero),
            ] {
                for j in 1..=lead.len() {
                    // j leading values drawn first, then one of the other kind.
                    let ln_p = log_falling(lead.len(), j) - log_falling(n, j) + (other.len() as f64).ln()
                        - ((n - j) as f64).ln();
                    let mut idx = lead[..j].to_vec();
                    idx.push(other[0]);
                    samples.push(TrainingSample {
                        indices: vec![idx],
                        summary: SampleSummary::Bernoulli { kind, count: j },
                    });
                    probabilities.push(ln_p.exp());
                }
            }
            renormalized(samples, probabilities)
        }
        TrainingData::Linear(_) => Err(Error::Unsupported(
            "exact SMTS distribution is implemented for censored and Bernoulli data".into(),
        )),
    }
}

/// `ln(m (m-1) ... (m-j+1))`
fn log_falling(m: usize, j: usize) -> f64 {
    ln_gamma_pos(m as f64 + 1.0) - ln_gamma_pos((m - j) as f64 + 1.0)
}

fn renormalized(samples: Vec<TrainingSample>, mut probabilities: Vec<f64>) -> Result<WeightedSampleSet> {
    // Probabilities are exact up to rounding; absorb the rounding residue.
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!("exact SMTS probabilities sum to {total}")));
    }
    probabilities.iter_mut().for_each(|p| *p /= total);
    WeightedSampleSet::new(samples, probabilities)
}

/// Information weights `p(l) = |X(l)'X(l)| / (C(n-k, s-k) |X'X|)` over all
/// `subset_size`-row subsets. With `s = k + 1` the normalizer is
/// `(n - k) |X'X|`, by the Binet–Cauchy identity. Subsets whose moment
/// determinant falls below [`singular_threshold`] get weight 0.
pub fn binet_cauchy_weights(design: &DMatrix<f64>, subset_size: usize) -> Result<WeightedSampleSet> {
    let (n, k) = design.shape();
    if subset_size < k || subset_size > n {
        return Err(Error::domain(format!(
            "subset size {subset_size} must lie between k = {k} and n = {n}"
        )));
    }
    let full = Factored::new(design);
    if full.is_rank_deficient(1e-12) {
        return Err(Error::RankDeficient("full design is not of full column rank".into()));
    }
    let full_det = full.gram_det();
    let threshold = singular_threshold(full_det, subset_size, n);
    let log_norm = log_binomial((n - k) as f64, (subset_size - k) as f64) + full_det.ln();
    let mut samples = Vec::new();
    let mut probabilities = Vec::new();
    for rows in (0..n).combinations(subset_size) {
        let det = Factored::new(&design.select_rows(&rows)).gram_det();
        let p = if det > threshold { (det.ln() - log_norm).exp() } else { 0.0 };
        samples.push(TrainingSample {
            indices: vec![rows],
            summary: SampleSummary::Rows,
        });
        probabilities.push(p);
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!("information weights sum to {total}")));
    }
    WeightedSampleSet::new(samples, probabilities)
}

/// Surrogate normal data with the given mean and sum of squared deviations:
/// `X*_i = (Z_i - Z̄) s / s_Z + x̄` with standard normal `Z_i`.
pub fn normal_surrogate(xbar: f64, s2: f64, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::domain("surrogate data need n >= 3"));
    }
    if !(s2 > 0.0) || !s2.is_finite() || !xbar.is_finite() {
        return Err(Error::domain("surrogate data need finite mean and positive s2"));
    }
    loop {
        let z: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let zbar = z.iter().sum::<f64>() / n as f64;
        let sz2: f64 = z.iter().map(|v| (v - zbar).powi(2)).sum();
        if sz2 > 0.0 {
            let scale = (s2 / sz2).sqrt();
            let mut x: Vec<f64> = z.iter().map(|v| (v - zbar) * scale + xbar).collect();
            // Re-center once so the mean is exact to rounding.
            let shift = x.iter().sum::<f64>() / n as f64 - xbar;
            x.iter_mut().for_each(|v| *v -= shift);
            return Ok(x);
        }
    }
}

/// Inverse-transform draw of one latent exponential inter-arrival time given
/// the Poisson count: `T (1 - U^{1/X})`.
pub fn poisson_imaginary_from_uniform(obs: &PoissonObservation, u: f64) -> Result<f64> {
    if obs.count == 0 {
        return Err(Error::domain("X = 0 leaves no latent inter-arrival time to draw"));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain("uniform draw must lie in (0, 1)"));
    }
    // 1 - U^{1/X} = -expm1(ln U / X), accurate when U is near 1.
    Ok(-obs.exposure * (u.ln() / obs.count as f64).exp_m1())
}

pub fn poisson_imaginary_draw(obs: &PoissonObservation, rng: &mut RngStream) -> Result<f64> {
    if obs.count == 0 {
        return Err(Error::domain("X = 0 leaves no latent inter-arrival time to draw"));
    }
    poisson_imaginary_from_uniform(obs, rng.uniform())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{parse_survival_csv, CensoredObservation as Obs};

    fn pair_dataset() -> SurvivalDataset {
        let mut d = SurvivalDataset::new();
        d.insert_group("g", vec![Obs::censored(5.0).unwrap(), Obs::observed(2.0).unwrap()]);
        d
    }

    #[test]
    fn gehan_two_group_mts_count() {
        let d = SurvivalDataset::gehan();
        let set = enumerate_mts(TrainingData::Censored(&d)).unwrap();
        assert!(set.exists);
        assert_eq!(set.samples.len(), 21 * 9);
        for s in &set.samples {
            assert!(is_proper(TrainingData::Censored(&d), s).unwrap());
        }
    }

    #[test]
    fn bernoulli_mts_pairs() {
        let mut bits = vec![0u8; 9];
        bits.push(1);
        let set = enumerate_mts(TrainingData::Bernoulli(&bits)).unwrap();
        assert_eq!(set.samples.len(), 9);
        let none = enumerate_mts(TrainingData::Bernoulli(&[1, 1, 1])).unwrap();
        assert!(!none.exists && none.samples.is_empty());
    }

    #[test]
    fn all_censored_group_has_no_mts() {
        let d = parse_survival_csv("g,1,cens\ng,2,cens\n").unwrap();
        let set = enumerate_mts(TrainingData::Censored(&d)).unwrap();
        assert!(!set.exists);
        let mut rng = RngStream::new(1, 0);
        assert!(matches!(
            draw_smts(TrainingData::Censored(&d), &mut rng),
            Err(Error::NoTrainingSample(_))
        ));
    }

    #[test]
    fn uncensored_group_smts_is_single_observation() {
        let d = parse_survival_csv("g,1,obs\ng,4,obs\ng,9,obs\n").unwrap();
        for s in 0..50 {
            let mut rng = RngStream::new(3, s);
            let ts = draw_smts(TrainingData::Censored(&d), &mut rng).unwrap();
            assert_eq!(ts.size(), 1);
        }
    }

    #[test]
    fn censored_pair_exact_distribution() {
        let d = pair_dataset();
        let set = smts_exact_distribution(TrainingData::Censored(&d)).unwrap();
        assert_eq!(set.len(), 2);
        for (s, p) in set.samples.iter().zip(&set.probabilities) {
            assert!((p - 0.5).abs() < 1e-15);
            match s.indices[0].as_slice() {
                [1] => assert_eq!(s.exposures().unwrap(), &[2.0]),
                [0, 1] => assert_eq!(s.exposures().unwrap(), &[7.0]),
                other => panic!("unexpected outcome {other:?}"),
            }
        }
    }

    #[test]
    fn censored_pair_draw_frequencies() {
        let d = pair_dataset();
        let long = (0..10_000u64)
            .filter(|&s| {
                let mut rng = RngStream::new(11, s);
                draw_smts(TrainingData::Censored(&d), &mut rng).unwrap().size() == 2
            })
            .count();
        let freq = long as f64 / 10_000.0;
        assert!((freq - 0.5).abs() <= 0.02, "{freq}");
    }

    #[test]
    fn bernoulli_exact_distribution_is_uniform_in_position() {
        let mut bits = vec![0u8; 9];
        bits.push(1);
        let set = smts_exact_distribution(TrainingData::Bernoulli(&bits)).unwrap();
        assert_eq!(set.len(), 10);
        for (s, p) in set.samples.iter().zip(&set.probabilities) {
            assert!((p - 0.1).abs() < 1e-14, "{s:?} {p}");
            if let SampleSummary::Bernoulli { kind: BernoulliTsKind::OnesThenZero, count } = s.summary {
                assert_eq!(count, 1);
            }
        }
        assert!((set.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bernoulli_draw_shapes() {
        let bits = [0u8, 0, 1, 0, 1, 1, 0];
        for s in 0..200 {
            let mut rng = RngStream::new(5, s);
            let ts = draw_smts(TrainingData::Bernoulli(&bits), &mut rng).unwrap();
            let vals: Vec<u8> = ts.indices[0].iter().map(|&i| bits[i]).collect();
            let (last, body) = vals.split_last().unwrap();
            assert!(body.iter().all(|v| v != last));
            let SampleSummary::Bernoulli { count, .. } = ts.summary else { panic!() };
            assert_eq!(count, body.len());
        }
    }

    #[test]
    fn exact_guard() {
        let bits = vec![0u8; 30];
        assert!(matches!(
            smts_exact_distribution(TrainingData::Bernoulli(&bits)),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn gehan_exact_distribution_sums_to_one() {
        let d = SurvivalDataset::gehan();
        let set = smts_exact_distribution(TrainingData::Censored(&d)).unwrap();
        assert_eq!(set.len(), 21 * (1 << 12) * 9);
        assert!((set.total_probability() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn findley_singleton_weights() {
        let d = DMatrix::from_column_slice(3, 1, &[1.0, 0.5f64.sqrt(), (1.0f64 / 3.0).sqrt()]);
        let w = binet_cauchy_weights(&d, 1).unwrap();
        let want = [6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0];
        for (p, q) in w.probabilities.iter().zip(want) {
            assert!((p - q).abs() < 1e-14);
        }
    }

    #[test]
    fn surrogate_matches_statistics() {
        let mut rng = RngStream::new(8, 0);
        let x = normal_surrogate(3.5, 12.0, 7, &mut rng).unwrap();
        let mean = x.iter().sum::<f64>() / 7.0;
        let ss: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
        assert!((mean - 3.5).abs() <= 1e-12 * 3.5);
        assert!((ss - 12.0).abs() <= 1e-12 * 12.0);
        let mut other = RngStream::new(8, 1);
        let y = normal_surrogate(3.5, 12.0, 7, &mut other).unwrap();
        assert_ne!(x, y);
        assert!(normal_surrogate(0.0, 1.0, 2, &mut rng).is_err());
    }

    #[test]
    fn poisson_inverse_transform() {
        let obs = PoissonObservation::new(1, 10.0).unwrap();
        assert!((poisson_imaginary_from_uniform(&obs, 0.5).unwrap() - 5.0).abs() < 1e-12);
        let tiny = poisson_imaginary_from_uniform(&obs, 1.0 - 1e-12).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-10);
        let none = PoissonObservation::new(0, 10.0).unwrap();
        assert!(poisson_imaginary_draw(&none, &mut RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn poisson_draws_follow_latent_cdf() {
        let obs = PoissonObservation::new(4, 10.0).unwrap();
        let mut rng = RngStream::new(77, 0);
        let mut xs: Vec<f64> = (0..100_000).map(|_| poisson_imaginary_draw(&obs, &mut rng).unwrap()).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let sup = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = 1.0 - (1.0 - x / 10.0).powi(4);
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(sup <= 0.01, "{sup}");
    }
}

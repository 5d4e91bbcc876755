//! Data containers, CSV ingestion and sufficient-statistic reduction.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The bundled Gehan (1965) remission times, control and 6-MP groups.
pub const GEHAN_CSV: &str = include_str!("../data/gehan.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Observed,
    Censored,
}

impl Status {
    fn token(self) -> &'static str {
        match self {
            Status::Observed => "obs",
            Status::Censored => "cens",
        }
    }
}

/// A right-censored time: the event time when observed, the censoring time
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensoredObservation {
    pub value: f64,
    pub status: Status,
}

impl CensoredObservation {
    pub fn new(value: f64, status: Status) -> Result<Self> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::domain(format!("observation time must be positive, got {value}")));
        }
        Ok(Self { value, status })
    }

    pub fn observed(value: f64) -> Result<Self> {
        Self::new(value, Status::Observed)
    }

    pub fn censored(value: f64) -> Result<Self> {
        Self::new(value, Status::Censored)
    }

    pub fn is_observed(&self) -> bool {
        self.status == Status::Observed
    }
}

/// Groups of censored observations, in order of first appearance.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SurvivalDataset {
    groups: Vec<(String, Vec<CensoredObservation>)>,
}

impl SurvivalDataset {
    pub fn new() -> Self {
        Self::default()
    }

    /// The embedded Gehan data.
    pub fn gehan() -> Self {
        parse_survival_csv(GEHAN_CSV).expect("bundled fixture parses")
    }

    pub fn push(&mut self, group: &str, obs: CensoredObservation) {
        match self.groups.iter_mut().find(|(g, _)| g == group) {
            Some((_, v)) => v.push(obs),
            None => self.groups.push((group.to_string(), vec![obs])),
        }
    }

    pub fn insert_group(&mut self, group: &str, obs: Vec<CensoredObservation>) {
        match self.groups.iter_mut().find(|(g, _)| g == group) {
            Some((_, v)) => *v = obs,
            None => self.groups.push((group.to_string(), obs)),
        }
    }

    pub fn groups(&self) -> impl Iterator<Item = (&str, &[CensoredObservation])> {
        self.groups.iter().map(|(g, v)| (g.as_str(), v.as_slice()))
    }

    pub fn group(&self, label: &str) -> Option<&[CensoredObservation]> {
        self.groups.iter().find(|(g, _)| g == label).map(|(_, v)| v.as_slice())
    }

    pub fn group_labels(&self) -> Vec<&str> {
        self.groups.iter().map(|(g, _)| g.as_str()).collect()
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// CSV text (with header) that parses back to this dataset.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("group,time,status\n");
        for (g, obs) in &self.groups {
            for o in obs {
                out.push_str(&format!("{},{},{}\n", g, o.value, o.status.token()));
            }
        }
        out
    }
}

/// Parses `group,time,status` rows. The header row is optional; status tokens
/// are `obs` and `cens`, case-insensitive.
pub fn parse_survival_csv(text: &str) -> Result<SurvivalDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut dataset = SurvivalDataset::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let is_header = first
            && record.len() == 3
            && record[0].eq_ignore_ascii_case("group")
            && record[1].eq_ignore_ascii_case("time")
            && record[2].eq_ignore_ascii_case("status");
        first = false;
        if is_header {
            continue;
        }
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let group = &record[0];
        if group.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty group label".into(),
            });
        }
        let time: f64 = record[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid time {:?}", &record[1]),
        })?;
        if !(time > 0.0) || !time.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("time must be positive, got {time}"),
            });
        }
        let status = match record[2].to_ascii_lowercase().as_str() {
            "obs" => Status::Observed,
            "cens" => Status::Censored,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown status token {other:?} (expected obs or cens)"),
                })
            }
        };
        dataset.push(group, CensoredObservation { value: time, status });
    }
    if dataset.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no observations".into(),
        });
    }
    Ok(dataset)
}

/// Sufficient statistics of one exponential group under right censoring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    /// Uncensored count.
    pub n_u: usize,
    /// Censored count.
    pub n_c: usize,
    /// Total time on test: all observed and censored times summed.
    pub total_time: f64,
}

impl GroupStats {
    pub fn from_observations(obs: &[CensoredObservation]) -> Result<Self> {
        if obs.is_empty() {
            return Err(Error::domain("empty group"));
        }
        let n_u = obs.iter().filter(|o| o.is_observed()).count();
        Ok(Self {
            n_u,
            n_c: obs.len() - n_u,
            total_time: obs.iter().map(|o| o.value).sum(),
        })
    }

    pub fn size(&self) -> usize {
        self.n_u + self.n_c
    }
}

/// Per-group sufficient statistics, in dataset order.
pub fn group_stats(dataset: &SurvivalDataset) -> Result<Vec<(String, GroupStats)>> {
    if dataset.is_empty() {
        return Err(Error::domain("dataset has no groups"));
    }
    dataset
        .groups()
        .map(|(g, obs)| {
            GroupStats::from_observations(obs)
                .map(|s| (g.to_string(), s))
                .map_err(|_| Error::domain(format!("group {g:?} is empty")))
        })
        .collect()
}

/// Counts of a Bernoulli sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BernoulliSummary {
    pub n: usize,
    /// Number of ones.
    pub ones: usize,
}

impl BernoulliSummary {
    pub fn new(n: usize, ones: usize) -> Result<Self> {
        if n == 0 || ones > n {
            return Err(Error::domain(format!("invalid Bernoulli counts n={n}, S={ones}")));
        }
        Ok(Self { n, ones })
    }

    pub fn zeros(&self) -> usize {
        self.n - self.ones
    }

    /// Under the Haldane prior a minimal training sample needs one 0 and one 1.
    pub fn has_mts(&self) -> bool {
        self.ones >= 1 && self.ones < self.n
    }
}

impl fmt::Display for BernoulliSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, S={}", self.n, self.ones)
    }
}

pub fn bernoulli_summary(bits: &[u8]) -> Result<BernoulliSummary> {
    if bits.is_empty() {
        return Err(Error::domain("empty Bernoulli sequence"));
    }
    if let Some(b) = bits.iter().find(|b| **b > 1) {
        return Err(Error::domain(format!("Bernoulli values must be 0 or 1, got {b}")));
    }
    let ones = bits.iter().filter(|b| **b == 1).count();
    BernoulliSummary::new(bits.len(), ones)
}

/// A Poisson count observed over exposure `exposure`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonObservation {
    pub count: u64,
    pub exposure: f64,
}

impl PoissonObservation {
    pub fn new(count: u64, exposure: f64) -> Result<Self> {
        if !(exposure > 0.0) || !exposure.is_finite() {
            return Err(Error::domain(format!("exposure must be positive, got {exposure}")));
        }
        Ok(Self { count, exposure })
    }
}

/// Response vector with named candidate designs sharing its row count.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDataset {
    pub y: Vec<f64>,
    designs: Vec<(String, DMatrix<f64>)>,
}

impl RegressionDataset {
    pub fn new(y: Vec<f64>) -> Self {
        Self { y, designs: Vec::new() }
    }

    /// Adds a design; it must have `y.len()` rows and full column rank `k < n`.
    pub fn with_design(mut self, label: &str, x: DMatrix<f64>) -> Result<Self> {
        let n = self.y.len();
        if x.nrows() != n {
            return Err(Error::domain(format!(
                "design {label:?} has {} rows, response has {n}",
                x.nrows()
            )));
        }
        if x.ncols() >= n {
            return Err(Error::RankDeficient(format!("design {label:?} needs fewer columns than rows")));
        }
        let rank = x.clone().svd(false, false).rank(1e-12 * x.norm().max(1.0));
        if rank < x.ncols() {
            return Err(Error::RankDeficient(format!("design {label:?} has rank {rank} < {}", x.ncols())));
        }
        self.designs.push((label.to_string(), x));
        Ok(self)
    }

    pub fn design(&self, label: &str) -> Option<&DMatrix<f64>> {
        self.designs.iter().find(|(l, _)| l == label).map(|(_, x)| x)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }
}

//! Machine-readable output: single reports and study tables.

use ibf_core::linear::StudyRow;
use serde::Serialize;
use serde_json::{Map, Value};

/// `bf10` is clamped to this range for display; `log_bf10` is exact.
pub const BF_DISPLAY_LIMIT: f64 = 1e300;

/// Result of one pipeline run. Fields irrelevant to the command (for
/// example the Bayes factor of a prior-density query) are `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub log_bf10: Option<f64>,
    pub bf10: Option<f64>,
    pub mc_std_error: Option<f64>,
    pub posterior_prob_m1: Option<f64>,
    pub scheme: String,
    #[serde(rename = "L")]
    pub l: usize,
    pub seed: u64,
    pub skipped_samples: usize,
    pub warnings: Vec<String>,
    /// Command-specific outputs such as quantiles or appendix constants.
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub values: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, scheme: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            parameters: Map::new(),
            log_bf10: None,
            bf10: None,
            mc_std_error: None,
            posterior_prob_m1: None,
            scheme: scheme.to_string(),
            l: 0,
            seed,
            skipped_samples: 0,
            warnings: Vec::new(),
            values: Map::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn value(&mut self, key: &str, value: impl Into<Value>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn set_bf(&mut self, log_bf10: f64, mc_std_error: f64, posterior: f64) {
        self.log_bf10 = Some(log_bf10);
        self.bf10 = Some(clamped_bf(log_bf10));
        self.mc_std_error = Some(mc_std_error);
        self.posterior_prob_m1 = Some(posterior);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            "command",
            "log_bf10",
            "bf10",
            "mc_std_error",
            "posterior_prob_m1",
            "scheme",
            "L",
            "seed",
            "skipped_samples",
            "warnings",
        ])
        .expect("in-memory write");
        w.write_record([
            self.command.clone(),
            opt(self.log_bf10),
            opt(self.bf10),
            opt(self.mc_std_error),
            opt(self.posterior_prob_m1),
            self.scheme.clone(),
            self.l.to_string(),
            self.seed.to_string(),
            self.skipped_samples.to_string(),
            self.warnings.join("; "),
        ])
        .expect("in-memory write");
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

pub fn clamped_bf(log_bf10: f64) -> f64 {
    let lim = BF_DISPLAY_LIMIT.ln();
    if log_bf10 >= lim {
        BF_DISPLAY_LIMIT
    } else if log_bf10 <= -lim {
        1.0 / BF_DISPLAY_LIMIT
    } else {
        log_bf10.exp()
    }
}

pub const STUDY_HEADER: [&str; 5] = ["n_or_m", "param", "median_log_bf", "slope_to_here", "seeds"];

#[derive(Serialize)]
struct StudyRecord<'a> {
    n_or_m: usize,
    param: &'a str,
    median_log_bf: f64,
    slope_to_here: Option<f64>,
    seeds: usize,
}

fn record(r: &StudyRow) -> StudyRecord<'_> {
    StudyRecord {
        n_or_m: r.n_or_m,
        param: &r.param,
        median_log_bf: r.median_log_bf,
        slope_to_here: r.slope_to_here,
        seeds: r.seeds,
    }
}

pub fn study_csv(rows: &[StudyRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(STUDY_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.n_or_m.to_string(),
            r.param.clone(),
            r.median_log_bf.to_string(),
            r.slope_to_here.map(|s| s.to_string()).unwrap_or_default(),
            r.seeds.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn study_json(rows: &[StudyRow]) -> String {
    let recs: Vec<StudyRecord> = rows.iter().map(record).collect();
    serde_json::to_string_pretty(&recs).expect("rows serialize")
}

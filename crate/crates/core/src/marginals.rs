//! Closed-form formal Bayes factors for full data (log scale) and for
//! training samples (linear scale).

use serde::{Deserialize, Serialize};

use crate::data::{BernoulliSummary, GroupStats, PoissonObservation};
use crate::error::{Error, Result};
use crate::numerics::ln_gamma_pos;
pub use crate::training::BernoulliTsKind;

/// Model family of a nested comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Exp1Sample,
    Exp2Sample,
    Bernoulli,
    Poisson,
}

/// Null hypothesis of a nested comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullSpec {
    Point(f64),
    /// `θ1 = θ2` in the two-sample exponential comparison.
    EqualRates,
}

/// A nested comparison `M0` within `M1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPair {
    pub family: Family,
    pub null: NullSpec,
    /// Censoring bound, where the family uses one.
    pub censoring_bound: Option<f64>,
    /// Replacement for a boundary Bernoulli null in limit studies.
    pub limit_epsilon: Option<f64>,
}

impl ModelPair {
    pub fn new(family: Family, null: NullSpec) -> Result<Self> {
        let pair = Self {
            family,
            null,
            censoring_bound: None,
            limit_epsilon: None,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn with_censoring_bound(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::domain("censoring bound must be positive"));
        }
        self.censoring_bound = Some(r);
        Ok(self)
    }

    pub fn with_limit_epsilon(mut self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::domain("limit epsilon must lie in (0, 0.5)"));
        }
        self.limit_epsilon = Some(eps);
        Ok(self)
    }

    /// True when the null sits on the boundary of the Bernoulli parameter
    /// space, where no training sample is proper under the null.
    pub fn violates_assumption0(&self) -> bool {
        matches!((self.family, self.null), (Family::Bernoulli, NullSpec::Point(t)) if t == 0.0 || t == 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.family, self.null) {
            (Family::Exp2Sample, NullSpec::EqualRates) => Ok(()),
            (Family::Exp2Sample, _) => Err(Error::domain("two-sample comparison tests equal rates")),
            (_, NullSpec::EqualRates) => Err(Error::domain("equal-rates null needs two samples")),
            (Family::Bernoulli, NullSpec::Point(t)) if (0.0..=1.0).contains(&t) => Ok(()),
            (Family::Bernoulli, NullSpec::Point(t)) => Err(Error::domain(format!("θ0 = {t} outside [0, 1]"))),
            (_, NullSpec::Point(t)) if t > 0.0 && t.is_finite() => Ok(()),
            (_, NullSpec::Point(t)) => Err(Error::domain(format!("θ0 = {t} must be positive"))),
        }
    }

    /// The null value used in computation: boundary Bernoulli nulls are
    /// replaced by the limit epsilon, or rejected when none is set.
    pub fn effective_theta0(&self) -> Result<f64> {
        let NullSpec::Point(t) = self.null else {
            return Err(Error::domain("equal-rates null has no point value"));
        };
        if self.violates_assumption0() {
            let eps = self.limit_epsilon.ok_or_else(|| {
                Error::domain("θ0 on the boundary requires limit-study mode with an explicit epsilon")
            })?;
            return Ok(if t == 0.0 { eps } else { 1.0 - eps });
        }
        Ok(t)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `ln[Γ(n_u) (Tθ0)^{-n_u} e^{Tθ0}]`: one-sample exponential, prior `1/θ`.
pub fn exp_bf10(stats: &GroupStats, theta0: f64) -> Result<f64> {
    positive("θ0", theta0)?;
    positive("total time", stats.total_time)?;
    if stats.n_u == 0 {
        return Err(Error::ImproperMarginal("no uncensored observation".into()));
    }
    let nu = stats.n_u as f64;
    let tt = stats.total_time * theta0;
    Ok(ln_gamma_pos(nu) - nu * tt.ln() + tt)
}

/// `θ0 T_l e^{-θ0 T_l}` for a training sample with accumulated time `T_l`.
pub fn exp_ts_bf01(t_l: f64, theta0: f64) -> Result<f64> {
    positive("T_l", t_l)?;
    positive("θ0", theta0)?;
    let x = theta0 * t_l;
    Ok(x * (-x).exp())
}

/// Log of `Γ(n1)Γ(n2)/Γ(n1+n2) · (T1+T2)^{n1+n2} / (T1^{n1} T2^{n2})`,
/// with `n_j` the uncensored counts: equal rates against distinct rates,
/// prior `1/(θ1θ2)` against `1/θ`.
pub fn twoexp_bf10(stats1: &GroupStats, stats2: &GroupStats) -> Result<f64> {
    if stats1.n_u == 0 || stats2.n_u == 0 {
        return Err(Error::ImproperMarginal("a group has no uncensored observation".into()));
    }
    positive("T1", stats1.total_time)?;
    positive("T2", stats2.total_time)?;
    let (n1, n2) = (stats1.n_u as f64, stats2.n_u as f64);
    let (t1, t2) = (stats1.total_time, stats2.total_time);
    Ok(ln_gamma_pos(n1) + ln_gamma_pos(n2) - ln_gamma_pos(n1 + n2) + (n1 + n2) * (t1 + t2).ln()
        - n1 * t1.ln()
        - n2 * t2.ln())
}

/// `T1l T2l / (T1l + T2l)^2`.
pub fn twoexp_ts_bf01(t1l: f64, t2l: f64) -> Result<f64> {
    positive("T1l", t1l)?;
    positive("T2l", t2l)?;
    let r = t1l / (t1l + t2l);
    Ok(r * (1.0 - r))
}

/// `ln[Γ(S)Γ(n-S) / (Γ(n) θ0^S (1-θ0)^{n-S})]` under the Haldane prior.
pub fn bernoulli_bf10(summary: &BernoulliSummary, theta0: f64) -> Result<f64> {
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(Error::domain(format!(
            "θ0 = {theta0} must lie in (0, 1); boundary nulls need limit-study mode"
        )));
    }
    if !summary.has_mts() {
        return Err(Error::ImproperMarginal(format!("{summary}: the Haldane marginal diverges")));
    }
    let (n, s) = (summary.n as f64, summary.ones as f64);
    Ok(ln_gamma_pos(s) + ln_gamma_pos(n - s) - ln_gamma_pos(n) - s * theta0.ln() - (n - s) * (-theta0).ln_1p())
}

/// [`bernoulli_bf10`] for a [`ModelPair`], honoring limit-study mode.
pub fn bernoulli_bf10_pair(summary: &BernoulliSummary, pair: &ModelPair) -> Result<f64> {
    if pair.family != Family::Bernoulli {
        return Err(Error::domain("not a Bernoulli comparison"));
    }
    bernoulli_bf10(summary, pair.effective_theta0()?)
}

/// Training-sample `B01`: `N0 θ0 (1-θ0)^{N0}`, `N1 (1-θ0) θ0^{N1}`, or
/// `θ0 (1-θ0)` for a `{0, 1}` pair.
pub fn bernoulli_ts_bf01(kind: BernoulliTsKind, count: usize, theta0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta0) {
        return Err(Error::domain(format!("θ0 = {theta0} outside [0, 1]")));
    }
    let c = count as f64;
    match kind {
        BernoulliTsKind::ZerosThenOne | BernoulliTsKind::OnesThenZero if count == 0 => {
            Err(Error::domain("sequential samples need count >= 1"))
        }
        BernoulliTsKind::ZerosThenOne => Ok(c * theta0 * (1.0 - theta0).powf(c)),
        BernoulliTsKind::OnesThenZero => Ok(c * (1.0 - theta0) * theta0.powf(c)),
        BernoulliTsKind::MtsPair => Ok(theta0 * (1.0 - theta0)),
    }
}

/// `ln[Γ(X+1/2) / (T^{X+1/2} θ0^X e^{-Tθ0})]` under the prior `θ^{-1/2}`.
pub fn poisson_bf10(obs: &PoissonObservation, theta0: f64) -> Result<f64> {
    positive("θ0", theta0)?;
    positive("T", obs.exposure)?;
    let a = obs.count as f64 + 0.5;
    Ok(ln_gamma_pos(a) - a * obs.exposure.ln() - obs.count as f64 * theta0.ln() + obs.exposure * theta0)
}

/// `θ0/Γ(3/2) · x^{3/2} e^{-θ0 x}` for one imaginary exponential observation.
pub fn poisson_ts_bf01(x_star: f64, theta0: f64) -> Result<f64> {
    positive("x*", x_star)?;
    positive("θ0", theta0)?;
    let ln = theta0.ln() - ln_gamma_pos(1.5) + 1.5 * x_star.ln() - theta0 * x_star;
    Ok(ln.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn stats(n_u: usize, t: f64) -> GroupStats {
        GroupStats {
            n_u,
            n_c: 0,
            total_time: t,
        }
    }

    #[test]
    fn one_sample_exponential() {
        assert_relative_eq!(exp_bf10(&stats(1, 1.0), 1.0).unwrap().exp(), std::f64::consts::E, max_relative = 1e-14);
        assert_relative_eq!(
            exp_bf10(&stats(2, 3.0), 0.5).unwrap().exp(),
            1.5f64.powi(-2) * 1.5f64.exp(),
            max_relative = 1e-14
        );
        assert!(exp_bf10(&stats(2, 3.0), 0.0).is_err());
        assert!(matches!(exp_bf10(&stats(0, 3.0), 1.0), Err(Error::ImproperMarginal(_))));
        assert_relative_eq!(exp_ts_bf01(2.0, 0.5).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(exp_ts_bf01(1.0 / 3.0, 3.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        assert!(exp_ts_bf01(1e4, 1.0).unwrap() < 1e-300);
    }

    #[test]
    fn two_sample_exponential() {
        assert_relative_eq!(twoexp_bf10(&stats(1, 1.0), &stats(1, 1.0)).unwrap().exp(), 4.0, max_relative = 1e-14);
        let c = GroupStats {
            n_u: 21,
            n_c: 0,
            total_time: 182.0,
        };
        let t = GroupStats {
            n_u: 9,
            n_c: 12,
            total_time: 359.0,
        };
        // 50-digit reference value
        assert_relative_eq!(twoexp_bf10(&c, &t).unwrap(), 8.25171683671794, max_relative = 1e-10);
        assert_relative_eq!(twoexp_bf10(&c, &t).unwrap(), twoexp_bf10(&t, &c).unwrap(), max_relative = 1e-15);
        assert_eq!(twoexp_ts_bf01(2.0, 2.0).unwrap(), 0.25);
        assert_relative_eq!(twoexp_ts_bf01(1.0, 3.0).unwrap(), 3.0 / 16.0, max_relative = 1e-15);
    }

    #[test]
    fn bernoulli() {
        let s = BernoulliSummary::new(2, 1).unwrap();
        assert_relative_eq!(bernoulli_bf10(&s, 0.5).unwrap().exp(), 4.0, max_relative = 1e-14);
        let s = BernoulliSummary::new(10, 1).unwrap();
        let t: f64 = 1e-6;
        assert_relative_eq!(
            bernoulli_bf10(&s, t).unwrap().exp(),
            1.0 / (9.0 * t * (1.0 - t).powi(9)),
            max_relative = 1e-12
        );
        assert!(bernoulli_bf10(&BernoulliSummary::new(5, 0).unwrap(), 0.5).is_err());
        assert!(bernoulli_bf10(&s, 0.0).is_err());
        assert_eq!(bernoulli_ts_bf01(BernoulliTsKind::ZerosThenOne, 1, 0.5).unwrap(), 0.25);
        assert_eq!(bernoulli_ts_bf01(BernoulliTsKind::OnesThenZero, 2, 0.5).unwrap(), 0.25);
        assert_relative_eq!(bernoulli_ts_bf01(BernoulliTsKind::MtsPair, 0, 0.3).unwrap(), 0.21, max_relative = 1e-15);
    }

    #[test]
    fn bernoulli_limit_mode() {
        let pair = ModelPair::new(Family::Bernoulli, NullSpec::Point(0.0)).unwrap();
        assert!(pair.violates_assumption0());
        let s = BernoulliSummary::new(10, 1).unwrap();
        assert!(bernoulli_bf10_pair(&s, &pair).is_err());
        let limit = pair.with_limit_epsilon(1e-8).unwrap();
        assert_eq!(bernoulli_bf10_pair(&s, &limit).unwrap(), bernoulli_bf10(&s, 1e-8).unwrap());
        assert!(ModelPair::new(Family::Poisson, NullSpec::Point(-1.0)).is_err());
        assert!(ModelPair::new(Family::Exp1Sample, NullSpec::EqualRates).is_err());
    }

    #[test]
    fn poisson() {
        let o = PoissonObservation::new(0, 1.0).unwrap();
        assert_relative_eq!(
            poisson_bf10(&o, 1.0).unwrap().exp(),
            std::f64::consts::PI.sqrt() * std::f64::consts::E,
            max_relative = 1e-13
        );
        let o = PoissonObservation::new(1, 2.0).unwrap();
        assert_relative_eq!(poisson_bf10(&o, 0.5).unwrap().exp(), 1.70343052240777, max_relative = 1e-12);
        assert!(poisson_bf10(&o, 0.0).is_err());
        assert_relative_eq!(
            poisson_ts_bf01(1.0, 1.0).unwrap(),
            (-1.0f64).exp() / (std::f64::consts::PI.sqrt() / 2.0),
            max_relative = 1e-13
        );
        let peak = poisson_ts_bf01(1.5 / 2.0, 2.0).unwrap();
        assert!(poisson_ts_bf01(1.5 / 2.0 * 1.01, 2.0).unwrap() < peak);
        assert!(poisson_ts_bf01(1.5 / 2.0 * 0.99, 2.0).unwrap() < peak);
        assert!(poisson_ts_bf01(1e-12, 2.0).unwrap() < 1e-17);
    }

    #[test]
    fn training_sample_as_full_data_is_neutral() {
        // Single uncensored observation: one-sample exponential.
        for (x, t0) in [(0.7, 1.3), (5.0, 0.1)] {
            let b10 = exp_bf10(&stats(1, x), t0).unwrap();
            assert_relative_eq!(b10.exp() * exp_ts_bf01(x, t0).unwrap(), 1.0, max_relative = 1e-13);
        }
        // One uncensored observation per group.
        let b10 = twoexp_bf10(&stats(1, 2.0), &stats(1, 5.0)).unwrap();
        assert_relative_eq!(b10.exp() * twoexp_ts_bf01(2.0, 5.0).unwrap(), 1.0, max_relative = 1e-13);
        // A {0, 1} pair.
        let b10 = bernoulli_bf10(&BernoulliSummary::new(2, 1).unwrap(), 0.3).unwrap();
        assert_relative_eq!(
            b10.exp() * bernoulli_ts_bf01(BernoulliTsKind::MtsPair, 1, 0.3).unwrap(),
            1.0,
            max_relative = 1e-13
        );
    }
}

//! Closed-form intrinsic priors, their Monte Carlo counterparts, and the
//! censored-exponential Jeffreys-rule median study.

use serde::{Deserialize, Serialize};

use crate::data::PoissonObservation;
use crate::error::{Error, Result};
use crate::marginals::{bernoulli_ts_bf01, exp_ts_bf01, poisson_ts_bf01, BernoulliTsKind};
use crate::numerics::{
    integrate, integrate_semi_infinite, ln_gamma_pos, map_streams, mc_summary, quantile_solve, McSummary, QuadOptions,
    RngStream,
};
use crate::training::poisson_imaginary_draw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntrinsicFamily {
    /// Censored exponential, sequential minimal training samples.
    ExpSmts,
    /// Censored exponential, minimal training samples with bound `r`.
    ExpMtsImproper,
    /// Bernoulli with the Haldane prior and `{0, 1}` pairs.
    BernoulliHaldaneMts,
    /// Bernoulli with sequential minimal training samples.
    BernoulliSmts,
    /// Poisson count with imaginary exponential training samples.
    PoissonImaginary,
}

impl IntrinsicFamily {
    pub const ALL: [IntrinsicFamily; 5] = [
        IntrinsicFamily::ExpSmts,
        IntrinsicFamily::ExpMtsImproper,
        IntrinsicFamily::BernoulliHaldaneMts,
        IntrinsicFamily::BernoulliSmts,
        IntrinsicFamily::PoissonImaginary,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            IntrinsicFamily::ExpSmts => "exp-smts",
            IntrinsicFamily::ExpMtsImproper => "exp-mts-improper",
            IntrinsicFamily::BernoulliHaldaneMts => "bernoulli-haldane-mts",
            IntrinsicFamily::BernoulliSmts => "bernoulli-smts",
            IntrinsicFamily::PoissonImaginary => "poisson-imaginary",
        }
    }

    fn unit_interval(&self) -> bool {
        matches!(self, IntrinsicFamily::BernoulliHaldaneMts | IntrinsicFamily::BernoulliSmts)
    }
}

/// `θ0/(θ+θ0)^2`
pub fn exp_smts_intrinsic_density(theta: f64, theta0: f64) -> f64 {
    theta0 / ((theta + theta0) * (theta + theta0))
}

/// `1 - e^{-z}(1 + z)`, accurate for small `z`.
fn one_minus_exp_poly(z: f64) -> f64 {
    if z < 0.5 {
        // Σ_{m>=2} (-1)^m (m-1) z^m / m!
        let mut term = z * z / 2.0;
        let mut sum = 0.0f64;
        let mut m = 2.0;
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += (m - 1.0) * term;
            m += 1.0;
            term *= -z / m;
            if m > 60.0 {
                break;
            }
        }
        sum
    } else {
        1.0 - (-z).exp() * (1.0 + z)
    }
}

/// `θ0/(1-e^{-rθ}) [1/(θ+θ0)^2 - e^{-(θ+θ0)r}(r/(θ+θ0) + 1/(θ+θ0)^2)]`
pub fn exp_mts_improper_density(theta: f64, theta0: f64, r: f64) -> f64 {
    let s = theta + theta0;
    theta0 * one_minus_exp_poly(s * r) / (s * s * -(-r * theta).exp_m1())
}

/// `θ0(1-θ0)/(θ(1-θ))`
pub fn bernoulli_haldane_mts_intrinsic(theta: f64, theta0: f64) -> f64 {
    theta0 * (1.0 - theta0) / (theta * (1.0 - theta))
}

/// `θ0(1-θ0)[(1-(1-θ)(1-θ0))^{-2} + (1-θθ0)^{-2}]`
pub fn bernoulli_smts_intrinsic(theta: f64, theta0: f64) -> f64 {
    let a = theta + theta0 - theta * theta0;
    let b = 1.0 - theta * theta0;
    theta0 * (1.0 - theta0) * (1.0 / (a * a) + 1.0 / (b * b))
}

/// `3θ0√θ / (2(θ+θ0)^{5/2})`
pub fn poisson_intrinsic_density(theta: f64, theta0: f64) -> f64 {
    1.5 * theta0 * theta.sqrt() / (theta + theta0).powf(2.5)
}

/// A family-tagged intrinsic prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicPriorSpec {
    pub family: IntrinsicFamily,
    pub theta0: f64,
    /// Censoring bound, used by [`IntrinsicFamily::ExpMtsImproper`] only.
    pub r: Option<f64>,
}

impl IntrinsicPriorSpec {
    pub fn new(family: IntrinsicFamily, theta0: f64, r: Option<f64>) -> Result<Self> {
        if family.unit_interval() {
            if !(theta0 > 0.0 && theta0 < 1.0) {
                return Err(Error::domain(format!("θ0 = {theta0} must lie in (0, 1)")));
            }
        } else if !(theta0 > 0.0 && theta0.is_finite()) {
            return Err(Error::domain(format!("θ0 = {theta0} must be positive")));
        }
        let r = match (family, r) {
            (IntrinsicFamily::ExpMtsImproper, Some(r)) if r > 0.0 && r.is_finite() => Some(r),
            (IntrinsicFamily::ExpMtsImproper, _) => {
                return Err(Error::domain("the minimal-training-sample prior needs a positive bound r"))
            }
            _ => None,
        };
        Ok(Self { family, theta0, r })
    }

    /// Support `(lower, upper)`.
    pub fn support(&self) -> (f64, f64) {
        if self.family.unit_interval() {
            (0.0, 1.0)
        } else {
            (0.0, f64::INFINITY)
        }
    }

    pub fn density(&self, theta: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        if !(theta > lo && theta < hi) {
            return Err(Error::domain(format!("θ = {theta} outside the support")));
        }
        let t0 = self.theta0;
        Ok(match self.family {
            IntrinsicFamily::ExpSmts => exp_smts_intrinsic_density(theta, t0),
            IntrinsicFamily::ExpMtsImproper => exp_mts_improper_density(theta, t0, self.r.unwrap_or(1.0)),
            IntrinsicFamily::BernoulliHaldaneMts => bernoulli_haldane_mts_intrinsic(theta, t0),
            IntrinsicFamily::BernoulliSmts => bernoulli_smts_intrinsic(theta, t0),
            IntrinsicFamily::PoissonImaginary => poisson_intrinsic_density(theta, t0),
        })
    }

    /// Known propriety of the closed form.
    pub fn is_proper(&self) -> bool {
        !matches!(
            self.family,
            IntrinsicFamily::ExpMtsImproper | IntrinsicFamily::BernoulliHaldaneMts
        )
    }

    /// Analytic cumulative distribution function; improper priors have none.
    pub fn cdf(&self, theta: f64) -> Result<f64> {
        let t0 = self.theta0;
        let (lo, hi) = self.support();
        if theta <= lo {
            return Ok(0.0);
        }
        if theta >= hi {
            return Ok(1.0);
        }
        match self.family {
            IntrinsicFamily::ExpSmts => Ok(theta / (theta + t0)),
            IntrinsicFamily::PoissonImaginary => Ok((theta / (theta + t0)).powf(1.5)),
            IntrinsicFamily::BernoulliSmts => {
                let a = theta + t0 - theta * t0;
                Ok((1.0 - t0) * theta / a + t0 * (1.0 - t0) * theta / (1.0 - theta * t0))
            }
            _ => Err(Error::ImproperMarginal(format!(
                "the {} intrinsic prior is improper and has no cdf",
                self.family.label()
            ))),
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("probability {p} must lie in (0, 1)")));
        }
        let t0 = self.theta0;
        match self.family {
            IntrinsicFamily::ExpSmts => Ok(t0 * p / (1.0 - p)),
            IntrinsicFamily::PoissonImaginary => {
                let q = p.powf(2.0 / 3.0);
                Ok(t0 * q / (1.0 - q))
            }
            IntrinsicFamily::BernoulliSmts => quantile_solve(|t| self.cdf(t).unwrap_or(f64::NAN), p, 0.0, 1.0),
            _ => Err(Error::ImproperMarginal(format!(
                "the {} intrinsic prior is improper and has no quantiles",
                self.family.label()
            ))),
        }
    }

    /// Total mass by quadrature (meaningful for proper priors).
    pub fn total_mass(&self, tol: f64) -> Result<f64> {
        let opts = QuadOptions::relative(tol);
        if self.family.unit_interval() {
            Ok(integrate(|t| self.density(t).unwrap_or(0.0), 0.0, 1.0, opts)?.value)
        } else {
            // θ = θ0 s puts the bulk of the mass near s = 1.
            let t0 = self.theta0;
            Ok(integrate_semi_infinite(|s| if s > 0.0 { t0 * self.density(t0 * s).unwrap_or(0.0) } else { 0.0 }, 0.0, opts)?.value)
        }
    }

    /// Density on the unit interval given both `θ` and `1 - θ`, so that
    /// neither end loses precision.
    fn unit_density(&self, theta: f64, comp: f64) -> f64 {
        let t0 = self.theta0;
        match self.family {
            IntrinsicFamily::BernoulliHaldaneMts => t0 * (1.0 - t0) / (theta * comp),
            _ => {
                let a = theta + t0 - theta * t0;
                let b = (1.0 - t0) + t0 * comp;
                t0 * (1.0 - t0) * (1.0 / (a * a) + 1.0 / (b * b))
            }
        }
    }

    /// Mass of the density between `a` and `b` (inside the support),
    /// integrating in `ln θ`, or in `logit θ` on the unit interval.
    pub fn mass_between(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        if !(a > lo && b < hi && a < b) {
            return Err(Error::domain("interval must lie strictly inside the support"));
        }
        let opts = QuadOptions::relative(tol);
        if self.family.unit_interval() {
            let logit = |t: f64| t.ln() - (-t).ln_1p();
            let f = |u: f64| {
                let theta = 1.0 / (1.0 + (-u).exp());
                let comp = 1.0 / (1.0 + u.exp());
                self.unit_density(theta, comp) * theta * comp
            };
            return Ok(integrate(f, logit(a), logit(b), opts)?.value);
        }
        let f = |u: f64| {
            let t = u.exp();
            self.density(t).map(|d| d * t).unwrap_or(0.0)
        };
        Ok(integrate(f, a.ln(), b.ln(), opts)?.value)
    }

    /// Truncated-mass diagnostic: masses on nested truncations of the
    /// support, shrinking the cut by a factor 10^3 each step. A proper
    /// density's masses settle; an improper one keeps gaining roughly the
    /// same amount per step.
    pub fn truncated_mass_test(&self) -> Result<TruncationDiagnostic> {
        let t0 = self.theta0;
        let masses = [1e-3, 1e-6, 1e-9, 1e-12]
            .iter()
            .map(|&eps| {
                if self.family.unit_interval() {
                    self.mass_between(eps, 1.0 - eps, 1e-10)
                } else {
                    self.mass_between(t0 * eps, t0 / eps, 1e-10)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let last = masses[3] - masses[2];
        let prev = masses[2] - masses[1];
        let improper = last > 1e-4 && last > 0.1 * prev;
        Ok(TruncationDiagnostic { masses, improper })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationDiagnostic {
    /// Masses on truncations with cut 1e-3, 1e-6, 1e-9 and 1e-12.
    pub masses: Vec<f64>,
    pub improper: bool,
}

/// Family-specific settings of the Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    /// Censoring bound for the exponential family.
    pub r: f64,
    /// Count `X` of the synthetic Poisson observation; the exposure is
    /// `X/θ` at each grid point.
    pub poisson_count: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            r: 1.0,
            poisson_count: 200,
        }
    }
}

/// Monte Carlo estimate of `π^N(θ) E_θ[B01(X(l))]` at each grid point from
/// `L` simulated training samples. Grid point `i` uses streams
/// `i·L .. (i+1)·L` of `seed`.
pub fn mc_intrinsic_estimate(
    family: IntrinsicFamily,
    grid: &[f64],
    theta0: f64,
    l: usize,
    seed: u64,
    settings: McSettings,
) -> Result<Vec<McSummary>> {
    if l < 2 {
        return Err(Error::domain("need L >= 2 for a standard error"));
    }
    IntrinsicPriorSpec::new(family, theta0, Some(settings.r))?;
    grid.iter()
        .enumerate()
        .map(|(i, &theta)| {
            let first = (i * l) as u64;
            let (prior, draws): (f64, Vec<Result<f64>>) = match family {
                IntrinsicFamily::ExpSmts => {
                    if !(theta > 0.0) {
                        return Err(Error::domain("θ must be positive"));
                    }
                    let r = settings.r;
                    let draws = map_streams(seed, first, l, |_, mut rng| {
                        exp_ts_bf01(simulate_censored_smts(theta, r, &mut rng), theta0)
                    });
                    (1.0 / theta, draws)
                }
                IntrinsicFamily::BernoulliSmts => {
                    if !(theta > 0.0 && theta < 1.0) {
                        return Err(Error::domain("θ must lie in (0, 1)"));
                    }
                    let draws = map_streams(seed, first, l, |_, mut rng| {
                        let (kind, count) = simulate_bernoulli_smts(theta, &mut rng);
                        bernoulli_ts_bf01(kind, count, theta0)
                    });
                    (1.0 / (theta * (1.0 - theta)), draws)
                }
                IntrinsicFamily::PoissonImaginary => {
                    if !(theta > 0.0) {
                        return Err(Error::domain("θ must be positive"));
                    }
                    let x = settings.poisson_count;
                    let obs = PoissonObservation::new(x, x as f64 / theta)?;
                    let draws = map_streams(seed, first, l, |_, mut rng| {
                        poisson_imaginary_draw(&obs, &mut rng).and_then(|x| poisson_ts_bf01(x, theta0))
                    });
                    (1.0 / theta.sqrt(), draws)
                }
                other => {
                    return Err(Error::Unsupported(format!(
                        "{} has no simulable training-sample space",
                        other.label()
                    )))
                }
            };
            let vals = draws
                .into_iter()
                .map(|d| d.map(|v| v * prior))
                .collect::<Result<Vec<_>>>()?;
            mc_summary(&vals)
        })
        .collect()
}

/// Accumulated time of one sequential minimal training sample from an
/// infinite censored-exponential population: censored values `r` until the
/// first uncensored draw.
fn simulate_censored_smts(theta: f64, r: f64, rng: &mut RngStream) -> f64 {
    let mut total = 0.0;
    loop {
        // Exponential draw by inversion; values beyond r are censored.
        let x = -rng.uniform().ln() / theta;
        if x < r {
            return total + x;
        }
        total += r;
    }
}

fn simulate_bernoulli_smts(theta: f64, rng: &mut RngStream) -> (BernoulliTsKind, usize) {
    let first = rng.bernoulli(theta);
    let mut count = 1;
    while rng.bernoulli(theta) == first {
        count += 1;
    }
    if first {
        (BernoulliTsKind::OnesThenZero, count)
    } else {
        (BernoulliTsKind::ZerosThenOne, count)
    }
}

/// Probability that a training sample from the scheme's sample space is
/// proper, under parameter `θ`.
pub fn assumption0_probability(family: IntrinsicFamily, theta: f64, r: Option<f64>) -> Result<f64> {
    match family {
        IntrinsicFamily::ExpMtsImproper => {
            let r = r.ok_or_else(|| Error::domain("censoring bound r is required"))?;
            if !(theta > 0.0 && r > 0.0) {
                return Err(Error::domain("θ and r must be positive"));
            }
            Ok(-(-r * theta).exp_m1())
        }
        IntrinsicFamily::BernoulliHaldaneMts => {
            if !(0.0..=1.0).contains(&theta) {
                return Err(Error::domain("θ must lie in [0, 1]"));
            }
            Ok(2.0 * theta * (1.0 - theta))
        }
        IntrinsicFamily::BernoulliSmts => {
            if !(0.0..=1.0).contains(&theta) {
                return Err(Error::domain("θ must lie in [0, 1]"));
            }
            Ok(if theta > 0.0 && theta < 1.0 { 1.0 } else { 0.0 })
        }
        IntrinsicFamily::ExpSmts | IntrinsicFamily::PoissonImaginary => {
            if !(theta > 0.0) {
                return Err(Error::domain("θ must be positive"));
            }
            Ok(1.0)
        }
    }
}

/// Exponent of `1 - e^{-y}` in the Jeffreys-rule prior for censored
/// exponential data.
pub const JEFFREYS_EXPONENT: f64 = 0.5;

/// Outcome of the Jeffreys-rule median study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianStudy {
    /// Exponent of `1 - e^{-y}` used in the integrand.
    pub exponent: f64,
    /// `∫_0^∞ y^{-1}(1-e^{-y})^{1/2} e^{-y} dy`
    pub normalizer: f64,
    /// Solves `∫_0^c … dy = normalizer / 2`; the median is about `c / r`.
    pub c: f64,
    /// Solution when the half-mass target is taken as `0.7907` instead.
    pub c_at_fixed_target: f64,
    /// Whether the integral diverges with exponent `-1/2`.
    pub negative_exponent_diverges: bool,
}

fn appendix_integrand(y: f64, exponent: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    (-(-y).exp_m1()).powf(exponent) * (-y).exp() / y
}

/// `∫_0^c y^{-1}(1-e^{-y})^{a} e^{-y} dy`, splitting at `min(c, 1)`.
fn appendix_partial(c: f64, exponent: f64, tol: f64) -> Result<f64> {
    let opts = QuadOptions::relative(tol);
    let f = |y: f64| appendix_integrand(y, exponent);
    if c.is_infinite() {
        let head = integrate(f, 0.0, 1.0, opts)?.value;
        let tail = integrate_semi_infinite(f, 1.0, opts)?.value;
        Ok(head + tail)
    } else {
        Ok(integrate(f, 0.0, c, opts)?.value)
    }
}

/// Normalizing constant and median constant of the Jeffreys-rule
/// intrinsic prior's dominant term as the censoring bound shrinks.
pub fn jeffreys_censored_median_study(tol: f64) -> Result<MedianStudy> {
    let normalizer = appendix_partial(f64::INFINITY, JEFFREYS_EXPONENT, tol)?;
    let solve = |target: f64| {
        quantile_solve(
            |c| appendix_partial(c, JEFFREYS_EXPONENT, tol).unwrap_or(f64::NAN) / normalizer,
            target / normalizer,
            0.0,
            1.0,
        )
    };
    let c = solve(0.5 * normalizer)?;
    let c_at_fixed_target = solve(0.7907)?;
    // With exponent -1/2 the integrand behaves like y^{-3/2} at 0.
    let near = |eps: f64| integrate(|y| appendix_integrand(y, -0.5), eps, 1.0, QuadOptions::relative(1e-8));
    let negative_exponent_diverges = match (near(1e-4), near(1e-8)) {
        (Ok(a), Ok(b)) => b.value > 10.0 * a.value,
        _ => true,
    };
    Ok(MedianStudy {
        exponent: JEFFREYS_EXPONENT,
        normalizer,
        c,
        c_at_fixed_target,
        negative_exponent_diverges,
    })
}

/// `∫ π^J(θ) e^{-rθ} dθ` for the Jeffreys-rule prior
/// `θ^{-1}(1-e^{-rθ})^{1/2}`, computed in `θ` directly.
pub fn jeffreys_second_term_normalizer(r: f64, tol: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain("r must be positive"));
    }
    let f = |t: f64| {
        if t <= 0.0 {
            0.0
        } else {
            (-(-r * t).exp_m1()).sqrt() * (-r * t).exp() / t
        }
    };
    let opts = QuadOptions::relative(tol);
    let head = integrate(f, 0.0, 1.0 / r, opts)?.value;
    let tail = integrate_semi_infinite(f, 1.0 / r, opts)?.value;
    Ok(head + tail)
}

/// Mass of the uncensored-observation term of the Jeffreys-rule intrinsic
/// prior, integrating its density over `θ`.
pub fn jeffreys_first_term_mass(r: f64, theta0: f64, tol: f64) -> Result<f64> {
    if !(r > 0.0 && theta0 > 0.0) {
        return Err(Error::domain("r and θ0 must be positive"));
    }
    // ∫ π^J(θ) θ e^{-θx} dθ = B(x/r, 3/2) / r
    let ln_marg = |x: f64| ln_gamma_pos(x / r) + ln_gamma_pos(1.5) - ln_gamma_pos(x / r + 1.5) - r.ln();
    let inner_opts = QuadOptions::relative(tol * 0.1);
    let density = |theta: f64| -> f64 {
        if theta <= 0.0 {
            return 0.0;
        }
        let prior = (-(-r * theta).exp_m1()).sqrt() / theta;
        let inner = integrate(
            |x| {
                if x <= 0.0 {
                    0.0
                } else {
                    (theta0.ln() - theta0 * x - ln_marg(x) + theta.ln() - theta * x).exp()
                }
            },
            0.0,
            r,
            inner_opts,
        );
        inner.map(|q| prior * q.value).unwrap_or(f64::NAN)
    };
    // θ = s / r puts the mass on the unit scale.
    let q = integrate_semi_infinite(|s| density(s / r) / r, 0.0, QuadOptions::relative(tol))?;
    if q.value.is_nan() {
        return Err(Error::domain("inner quadrature failed"));
    }
    Ok(q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(f: IntrinsicFamily, t0: f64) -> IntrinsicPriorSpec {
        IntrinsicPriorSpec::new(f, t0, Some(1.0)).unwrap()
    }

    #[test]
    fn exp_smts_closed_form() {
        assert_relative_eq!(exp_smts_intrinsic_density(2.0, 2.0), 1.0 / 8.0);
        let s = spec(IntrinsicFamily::ExpSmts, 3.0);
        assert_relative_eq!(s.total_mass(1e-10).unwrap(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(s.quantile(0.5).unwrap(), 3.0);
        assert_relative_eq!(s.cdf(3.0).unwrap(), 0.5);
    }

    #[test]
    fn exp_mts_improper_shape() {
        let (t0, r) = (1.0, 1.0);
        let v: Vec<f64> = [1e-3, 1e-4, 1e-5].iter().map(|t| t * exp_mts_improper_density(*t, t0, r)).collect();
        assert!((v[1] / v[0] - 1.0).abs() < 0.01 && (v[2] / v[1] - 1.0).abs() < 0.01, "{v:?}");
        let big = 1e6;
        assert_relative_eq!(big * big * exp_mts_improper_density(big, t0, r) / t0, 1.0, max_relative = 1e-5);
        let s = spec(IntrinsicFamily::ExpMtsImproper, t0);
        let m2 = s.mass_between(1e-2, 1.0, 1e-10).unwrap();
        let m4 = s.mass_between(1e-4, 1.0, 1e-10).unwrap();
        let c = v[2];
        assert_relative_eq!((m4 - m2) / (c * (100f64).ln()), 1.0, max_relative = 0.02);
        // Definition as an integral over the uncensored training value.
        let theta = 0.7;
        let q = integrate(
            |x| x * t0 * (-t0 * x).exp() * (-theta * x).exp() / -(-r * theta).exp_m1(),
            0.0,
            r,
            QuadOptions::relative(1e-12),
        )
        .unwrap();
        assert_relative_eq!(exp_mts_improper_density(theta, t0, r), q.value, max_relative = 1e-10);
    }

    #[test]
    fn small_argument_series() {
        for z in [1e-8f64, 1e-3, 0.1, 0.49, 0.51, 2.0] {
            let direct = 1.0 - (-z).exp() * (1.0 + z);
            let tol = if z < 1e-2 { 1e-6 } else { 1e-12 };
            assert_relative_eq!(one_minus_exp_poly(z), direct, max_relative = tol);
        }
        assert_relative_eq!(one_minus_exp_poly(1e-8), 0.5e-16, max_relative = 1e-7);
    }

    #[test]
    fn haldane_intrinsic() {
        assert_relative_eq!(bernoulli_haldane_mts_intrinsic(0.3, 0.3), 1.0, max_relative = 1e-15);
        let s = spec(IntrinsicFamily::BernoulliHaldaneMts, 0.2);
        let ratio = |t: f64| bernoulli_haldane_mts_intrinsic(t, 0.2) * t * (1.0 - t);
        assert_relative_eq!(ratio(0.1), 0.16, max_relative = 1e-14);
        assert_relative_eq!(ratio(0.9), 0.16, max_relative = 1e-14);
        let m = |e: f64| s.mass_between(e, 1.0 - e, 1e-10).unwrap();
        let slope = (m(1e-6) - m(1e-3)) / (1e3f64).ln();
        assert_relative_eq!(slope, 2.0 * 0.16, max_relative = 1e-3);
        assert!(s.cdf(0.5).is_err());
    }

    #[test]
    fn bernoulli_smts_intrinsic_properties() {
        for t0 in [0.05, 0.3, 0.7] {
            let s = spec(IntrinsicFamily::BernoulliSmts, t0);
            assert_relative_eq!(s.total_mass(1e-12).unwrap(), 1.0, max_relative = 1e-9);
            for t in [0.01, 0.2, 0.5, 0.93] {
                assert_relative_eq!(
                    bernoulli_smts_intrinsic(1.0 - t, 1.0 - t0),
                    bernoulli_smts_intrinsic(t, t0),
                    max_relative = 1e-12
                );
                let num = integrate(|x| bernoulli_smts_intrinsic(x, t0), 0.0, t, QuadOptions::relative(1e-12))
                    .unwrap()
                    .value;
                assert_relative_eq!(s.cdf(t).unwrap(), num, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn bernoulli_smts_mass_below_null() {
        // P(θ < θ0) = (1-θ0)/(2-θ0) + θ0^2/(1+θ0); 43/90 at θ0 = 0.2
        let s = spec(IntrinsicFamily::BernoulliSmts, 0.2);
        assert_relative_eq!(s.cdf(0.2).unwrap(), 43.0 / 90.0, max_relative = 1e-14);
        assert_relative_eq!(spec(IntrinsicFamily::BernoulliSmts, 0.5).cdf(0.5).unwrap(), 0.5, max_relative = 1e-14);
        let lowest = (1..1000)
            .map(|k| {
                let t0 = k as f64 / 1000.0;
                spec(IntrinsicFamily::BernoulliSmts, t0).cdf(t0).unwrap()
            })
            .fold(f64::MAX, f64::min);
        assert!(lowest > 0.477 && lowest < 0.478, "{lowest}");
    }

    #[test]
    fn poisson_closed_form() {
        let s = spec(IntrinsicFamily::PoissonImaginary, 2.0);
        assert_relative_eq!(s.total_mass(1e-12).unwrap(), 1.0, max_relative = 1e-9);
        let med = s.quantile(0.5).unwrap();
        assert!((med / 2.0 - 1.70).abs() <= 0.02);
        let num = integrate(|x| poisson_intrinsic_density(x, 2.0), 0.0, med, QuadOptions::relative(1e-12)).unwrap();
        assert_relative_eq!(num.value, 0.5, max_relative = 1e-10);
        let g = |u: f64| poisson_intrinsic_density(u, 1.0);
        for t0 in [0.5, 4.0] {
            assert_relative_eq!(poisson_intrinsic_density(1.3 * t0, t0), g(1.3) / t0, max_relative = 1e-13);
        }
    }

    #[test]
    fn truncation_flags() {
        for f in IntrinsicFamily::ALL {
            let t0 = if f.unit_interval() { 0.3 } else { 1.5 };
            let d = spec(f, t0).truncated_mass_test().unwrap();
            assert_eq!(d.improper, !spec(f, t0).is_proper(), "{f:?} {:?}", d.masses);
        }
    }

    #[test]
    fn assumption0_links_to_propriety() {
        for f in IntrinsicFamily::ALL {
            let theta = if f.unit_interval() { 0.4 } else { 0.8 };
            let p = assumption0_probability(f, theta, Some(1.0)).unwrap();
            assert_eq!(p < 1.0, !spec(f, 0.3).is_proper(), "{f:?}");
        }
        assert_relative_eq!(
            assumption0_probability(IntrinsicFamily::ExpMtsImproper, 2.0, Some(0.5)).unwrap(),
            1.0 - (-1.0f64).exp()
        );
        assert_relative_eq!(assumption0_probability(IntrinsicFamily::BernoulliHaldaneMts, 0.3, None).unwrap(), 0.42);
    }

    #[test]
    fn mc_matches_closed_form_small() {
        for (fam, t0, grid) in [
            (IntrinsicFamily::ExpSmts, 1.0, vec![0.5, 1.0, 2.0]),
            (IntrinsicFamily::BernoulliSmts, 0.3, vec![0.15, 0.3, 0.6]),
        ] {
            let s = spec(fam, t0);
            let est = mc_intrinsic_estimate(fam, &grid, t0, 4000, 5, McSettings::default()).unwrap();
            for (t, e) in grid.iter().zip(&est) {
                let want = s.density(*t).unwrap();
                assert!((e.mean - want).abs() <= 4.0 * e.std_error, "{fam:?} {t}: {} vs {want}", e.mean);
            }
        }
        assert!(mc_intrinsic_estimate(IntrinsicFamily::BernoulliHaldaneMts, &[0.5], 0.3, 100, 0, McSettings::default()).is_err());
    }

    #[test]
    fn appendix_constants() {
        let m = jeffreys_censored_median_study(1e-10).unwrap();
        // 30-digit reference quadrature
        assert_relative_eq!(m.normalizer, 1.601_402_243_549_887_6, max_relative = 1e-9);
        assert_relative_eq!(m.c, 0.186_257_615_849_38, max_relative = 1e-7);
        assert!(m.negative_exponent_diverges);
        for r in [0.1, 1.0, 10.0] {
            assert_relative_eq!(jeffreys_second_term_normalizer(r, 1e-10).unwrap(), m.normalizer, max_relative = 1e-7);
        }
    }

    #[test]
    fn first_term_mass() {
        let m = jeffreys_first_term_mass(1e-3, 1.0, 1e-8).unwrap();
        assert!((m - (1.0 - (-1e-3f64).exp())).abs() < 1e-6, "{m}");
    }
}

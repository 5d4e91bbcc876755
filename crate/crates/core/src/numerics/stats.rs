use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample mean with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

/// Mean and standard error (sample sd over sqrt(count)). A single value has
/// standard error zero.
pub fn mc_summary(values: &[f64]) -> Result<McSummary> {
    if values.is_empty() {
        return Err(Error::domain("mc_summary of an empty sequence"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std_error = if values.len() < 2 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1.0)).sqrt() / n.sqrt()
    };
    Ok(McSummary {
        mean,
        std_error,
        count: values.len(),
    })
}

/// Weighted median: the smallest value whose cumulative weight reaches one
/// half, averaged with the next value when the half is hit exactly.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.is_empty() || values.len() != weights.len() {
        return Err(Error::domain("weighted_median needs matching nonempty slices"));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::domain("weights must have positive total"));
    }
    let mut pairs: Vec<(f64, f64)> = values
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(v, w)| (*v, *w / total))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cum = 0.0;
    for (i, (v, w)) in pairs.iter().enumerate() {
        cum += w;
        if (cum - 0.5).abs() <= 1e-12 {
            return Ok(match pairs.get(i + 1) {
                Some((next, _)) => 0.5 * (v + next),
                None => *v,
            });
        }
        if cum > 0.5 {
            return Ok(*v);
        }
    }
    Ok(pairs.last().map(|p| p.0).unwrap_or(f64::NAN))
}

/// Plain median (midpoint for even counts).
pub fn median(values: &[f64]) -> Result<f64> {
    let w = vec![1.0; values.len()];
    weighted_median(values, &w)
}

/// Least-squares slope of `y` on `x`. Needs at least two distinct `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::domain("fit_slope needs at least two points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("fit_slope needs distinct abscissae"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

/// Solves `cdf(θ) = p` for a nondecreasing continuous `cdf` on `[lo, hi]`.
///
/// When `hi` is infinite the upper bracket is found by doubling from
/// `max(lo, 0) + 1`. The returned point satisfies `|cdf(θ) - p| <= 1e-8`.
pub fn quantile_solve<F: Fn(f64) -> f64>(cdf: F, p: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    let mut a = lo;
    let mut b = if hi.is_finite() { hi } else { lo.max(0.0) + 1.0 };
    if !hi.is_finite() {
        let mut doublings = 0;
        while cdf(b) < p {
            b = 2.0 * b + 1.0;
            doublings += 1;
            if doublings > 1100 || !b.is_finite() {
                return Err(Error::domain(format!("probability {p} above the cdf range")));
            }
        }
    }
    let (fa, fb) = (cdf(a) - p, cdf(b) - p);
    if fa.abs() <= 1e-8 {
        return Ok(a);
    }
    if fb.abs() <= 1e-8 {
        return Ok(b);
    }
    if fa > 0.0 || fb < 0.0 {
        return Err(Error::domain(format!("probability {p} outside the cdf range on the bracket")));
    }
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        let fm = cdf(mid) - p;
        if fm.abs() <= 1e-10 || mid <= a || mid >= b {
            return Ok(mid);
        }
        if fm < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_examples() {
        let s = mc_summary(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((s.mean, s.std_error, s.count), (1.0, 0.0, 3));
        let s = mc_summary(&[0.0, 2.0]).unwrap();
        assert!((s.mean - 1.0).abs() < 1e-15 && (s.std_error - 1.0).abs() < 1e-15);
        assert!(mc_summary(&[]).is_err());
    }

    #[test]
    fn uniform_draws_mean() {
        let mut r = crate::numerics::RngStream::new(2024, 0);
        let v: Vec<f64> = (0..100_000).map(|_| r.uniform()).collect();
        let s = mc_summary(&v).unwrap();
        assert!((s.mean - 0.5).abs() <= 3.0 * s.std_error, "{s:?}");
    }

    #[test]
    fn weighted_median_conventions() {
        assert_eq!(weighted_median(&[1.0, 1.0, 100.0], &[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(weighted_median(&[1.0, 3.0], &[0.5, 0.5]).unwrap(), 2.0);
        assert_eq!(weighted_median(&[5.0, 1.0, 3.0], &[0.1, 0.1, 0.8]).unwrap(), 3.0);
        assert!(weighted_median(&[], &[]).is_err());
    }

    #[test]
    fn slope_of_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        assert!((fit_slope(&x, &y).unwrap() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn quantile_examples() {
        let theta0 = 3.0;
        let q = quantile_solve(|t| t / (t + theta0), 0.5, 0.0, f64::INFINITY).unwrap();
        assert!((q - 3.0).abs() < 1e-7);
        let q = quantile_solve(|t| t, 0.25, 0.0, 1.0).unwrap();
        assert!((q - 0.25).abs() < 1e-8);
        assert!(quantile_solve(|t| 0.5 * t, 0.9, 0.0, 1.0).is_err());
        assert!(quantile_solve(|t| t, 1.5, 0.0, 1.0).is_err());
    }
}

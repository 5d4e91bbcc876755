//! g-prior Bayes factor for nested normal linear models.

use nalgebra::{DMatrix, DVector};

use super::algebra::Factored;
use super::LinearComparison;
use crate::error::{Error, Result};

/// Design with `m` zeros, `m` values `δ` and a final 1 in the slope
/// column, `n = 2m + 1` rows; returns `(constant-only, constant + slope)`.
pub fn example16_design(m: usize, delta: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if m == 0 {
        return Err(Error::domain("need m >= 1"));
    }
    let n = 2 * m + 1;
    let x1 = DMatrix::from_element(n, 1, 1.0);
    let x2 = DMatrix::from_fn(n, 2, |r, c| match (c, r) {
        (0, _) => 1.0,
        (_, r) if r < m => 0.0,
        (_, r) if r < 2 * m => delta,
        _ => 1.0,
    });
    Ok((x1, x2))
}

/// Log Bayes factor of the complex over the simple design when both carry
/// g-priors `N(0, gσ²(X'X)^{-1})` and `π(σ²) = 1/σ²`:
/// `(g+1)^{-(k_j-k_i)/2} (S_j/S_i)^{-n/2}` with
/// `S = y'y - g/(g+1) y'X(X'X)^{-1}X'y`.
pub fn gprior_bf(cmp: &LinearComparison, g: f64) -> Result<f64> {
    if !(g >= 0.0) || !g.is_finite() {
        return Err(Error::domain("g must be finite and nonnegative"));
    }
    let y = DVector::from_column_slice(&cmp.y);
    let s = |x: &DMatrix<f64>| {
        let f = Factored::new(x);
        // Residual plus shrunken fit, which avoids the cancellation in y'y - c y'Py.
        f.residual_ss(&y) + f.projected_ss(&y) / (g + 1.0)
    };
    let (si, sj) = (s(&cmp.x_simple), s(&cmp.x_complex));
    if !(si > 0.0 && sj > 0.0) {
        return Err(Error::domain("a quadratic form is zero"));
    }
    let dk = (cmp.k_complex() - cmp.k_simple()) as f64;
    Ok(-0.5 * dk * g.ln_1p() - 0.5 * cmp.n() as f64 * (sj.ln() - si.ln()))
}

/// `ln[(1/√n) exp(n(ȳ - y_n)^2 / (2S^2))]`, the large-`n`, tiny-`δ`
/// behavior of [`gprior_bf`] with `g = n` on the design of
/// [`example16_design`], where `S^2` is the sum of squared deviations.
pub fn gprior_limit_approximation(y: &[f64]) -> Result<f64> {
    let n = y.len();
    if n < 2 {
        return Err(Error::domain("need at least two observations"));
    }
    let nf = n as f64;
    let mean = y.iter().sum::<f64>() / nf;
    let s2: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let diff = mean - y[n - 1];
    Ok(-0.5 * nf.ln() + nf * diff * diff / (2.0 * s2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use approx::assert_relative_eq;

    fn cmp_for(y: Vec<f64>, m: usize, delta: f64) -> LinearComparison {
        let (x1, x2) = example16_design(m, delta).unwrap();
        LinearComparison::new(y, x1, x2).unwrap()
    }

    #[test]
    fn zero_g_is_neutral() {
        let c = cmp_for(vec![0.3, 1.2, -0.4, 2.0, 0.9], 2, 0.5);
        assert!(gprior_bf(&c, 0.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn printed_expression_small_case() {
        let y = vec![0.3, 1.2, -0.4, 2.0, 0.9];
        let c = cmp_for(y.clone(), 2, 0.5);
        let g = 5.0;
        let yv = DVector::from_column_slice(&y);
        let quad = |x: &DMatrix<f64>| {
            let p = x * (x.transpose() * x).try_inverse().unwrap() * x.transpose();
            yv.dot(&yv) - g / (g + 1.0) * (yv.transpose() * p * &yv)[(0, 0)]
        };
        let want = (1.0 / (g + 1.0).sqrt()) * quad(&c.x_complex).powf(-2.5) / quad(&c.x_simple).powf(-2.5);
        assert_relative_eq!(gprior_bf(&c, g).unwrap().exp(), want, max_relative = 1e-12);
    }

    #[test]
    fn tracks_limit_formula() {
        let m = 5000;
        let n = 2 * m + 1;
        let mut rng = RngStream::new(21, 0);
        let (_, x2) = example16_design(m, 1e-6).unwrap();
        let y: Vec<f64> = (0..n).map(|r| 1.0 + 2.0 * x2[(r, 1)] + rng.standard_normal()).collect();
        let c = cmp_for(y.clone(), m, 1e-6);
        let exact = gprior_bf(&c, n as f64).unwrap();
        let approx = gprior_limit_approximation(&y).unwrap();
        assert!((exact - approx).abs() < 0.1, "{exact} {approx}");
    }
}

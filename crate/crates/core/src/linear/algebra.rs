//! Orthogonal-decomposition helpers for small dense designs.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// QR factors of a tall design with the diagonal of `R` exposed.
pub(crate) struct Factored {
    q: DMatrix<f64>,
    r_diag: Vec<f64>,
}

impl Factored {
    pub(crate) fn new(x: &DMatrix<f64>) -> Self {
        let qr = x.clone().qr();
        let r = qr.r();
        let r_diag = (0..x.ncols().min(x.nrows())).map(|i| r[(i, i)]).collect();
        Self { q: qr.q(), r_diag }
    }

    /// `|X'X|` as the product of squared diagonal entries of `R`.
    pub(crate) fn gram_det(&self) -> f64 {
        self.r_diag.iter().map(|d| d * d).product()
    }

    pub(crate) fn log_gram_det(&self) -> f64 {
        self.r_diag.iter().map(|d| 2.0 * d.abs().ln()).sum()
    }

    /// True when some pivot is negligible relative to the largest one.
    pub(crate) fn is_rank_deficient(&self, rel: f64) -> bool {
        let max = self.r_diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        max == 0.0 || self.r_diag.iter().any(|d| d.abs() <= rel * max)
    }

    /// Squared norm of the residual `(I - QQ')y`.
    pub(crate) fn residual_ss(&self, y: &DVector<f64>) -> f64 {
        let fitted = &self.q * (self.q.transpose() * y);
        (y - fitted).norm_squared()
    }

    /// `y'X(X'X)^{-1}X'y`, the squared norm of the projection of `y`.
    pub(crate) fn projected_ss(&self, y: &DVector<f64>) -> f64 {
        (self.q.transpose() * y).norm_squared()
    }
}

/// `|X'X|` for an `n x k` matrix with `n >= k`.
pub fn gram_determinant(x: &DMatrix<f64>) -> f64 {
    if x.nrows() < x.ncols() {
        return 0.0;
    }
    Factored::new(x).gram_det()
}

/// Residual sum of squares of the least-squares fit of `y` on `x`.
pub fn rss(y: &[f64], x: &DMatrix<f64>) -> Result<f64> {
    if x.nrows() != y.len() {
        return Err(Error::domain(format!("design has {} rows, y has {}", x.nrows(), y.len())));
    }
    if x.nrows() < x.ncols() {
        return Err(Error::RankDeficient("more columns than rows".into()));
    }
    let f = Factored::new(x);
    if f.is_rank_deficient(1e-12) {
        return Err(Error::RankDeficient("design is not of full column rank".into()));
    }
    Ok(f.residual_ss(&DVector::from_column_slice(y)))
}

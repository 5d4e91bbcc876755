//! Numerical building blocks shared by every other module.

mod quadrature;
mod rng;
mod special;
mod stats;

pub use quadrature::{
    integrate, integrate_quadrant, integrate_semi_infinite, QuadOptions, QuadratureResult, DEFAULT_TOL_1D,
    DEFAULT_TOL_2D,
};
pub use rng::{map_streams, RngStream};
pub use special::{log_binomial, log_gamma, log_sum_exp, log_weighted_sum_exp};
pub(crate) use special::ln_gamma_pos;
pub use stats::{fit_slope, mc_summary, median, quantile_solve, weighted_median, McSummary};

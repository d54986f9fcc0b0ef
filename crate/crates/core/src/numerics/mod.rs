//! Numerical kernels shared by the problem modules.

mod optimize;
mod quadrature;
mod special;
mod stats;

pub use optimize::{minimize_scalar, solve_root, Minimum, DEFAULT_TOL};
pub use quadrature::{
    integrate_interval, integrate_real_line, Integrator, QuadratureResult, Symmetry,
    DEFAULT_MAX_EVALS, DEFAULT_REL_TOL,
};
pub use special::{normal_cdf, normal_pdf, normal_quantile};
pub use stats::{mean_sd, quantile_sorted, quantile_type7, summarize, SummaryStats};

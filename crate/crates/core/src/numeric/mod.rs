//! Log-domain arithmetic, special functions and quadrature shared by the
//! measure and bound modules.

mod betainc;
mod logvalue;
mod quadrature;
mod special;

pub use betainc::reg_incomplete_beta;
pub use logvalue::{log_sum_exp, LogValue};
pub use quadrature::{integrate, integrate_adaptive, QuadOptions, QuadResult};
pub use special::{log_binomial, log_gamma, log_gamma_binomial, log_unit_ball_volume, LN_SQRT_2PI};

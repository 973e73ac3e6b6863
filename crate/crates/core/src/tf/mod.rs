//! Polynomial and transfer-function algebra: exact transport-delay frequency
//! response, Pade-2 rationalization, simultaneous-iteration root finding and
//! the Routh stability criterion.

pub mod expr;
pub mod poly;
pub mod rational;
pub mod response;
pub mod roots;
pub mod routh;

pub use expr::TfExpr;
pub use poly::Polynomial;
pub use rational::{pade2, pade2_polys, Rational};
pub use response::{freq_response, log_space, principal_angle, FrequencyResponse};
pub use roots::{max_real_part, max_real_part_with_bound, poly_roots, poly_roots_with_bound};
pub use routh::{routh_stable, RouthReport};

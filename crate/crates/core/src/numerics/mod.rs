//! Numerical foundation: special functions, quadrature, finite differences,
//! root finding and seedable random streams.

mod diff;
mod quadrature;
mod rng;
mod roots;
mod special;

pub use diff::{default_step, derivative2, try_derivative2};
pub use quadrature::{
    integrate, integrate_oscillatory, integrate_partitioned, Kernel, QuadratureSpec,
};
pub use rng::RandomSource;
pub use roots::{find_root, find_root_system, RootSpec, RootStart};
pub use special::{gauss_q, gauss_q_inverse, ln_beta, ln_gamma};

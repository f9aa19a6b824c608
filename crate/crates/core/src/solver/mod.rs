//! Small dense numeric kernels shared by the filtration and transport
//! modules: a scalar abstraction so the same pivoting code runs on `f64`
//! and on exact rationals, Gaussian elimination, a dense simplex method,
//! and a transportation-specific network simplex.

pub mod linalg;
pub mod lp;
pub mod scalar;
pub mod transport_simplex;

pub use lp::max_min_over_simplex;
pub use scalar::Scalar;

//! Shared numerical substrate: Talbot Laplace inversion (one- and
//! two-dimensional), complex lower incomplete gamma, adaptive
//! Gauss–Kronrod quadrature, and the double-double path used by the
//! high-order accuracy tests.

pub mod dd;
pub mod gamma;
pub mod quad;
pub mod scaled;
pub mod talbot;

pub use gamma::{gamma, lower_incomplete_gamma};
pub use quad::{gauss_legendre, integrate, integrate_complex, integrate_to_inf, QuadResult};
pub use scaled::ScaledComplex;
pub use talbot::{talbot_invert, talbot_invert_2d, talbot_nodes, EvalCounter, TalbotNodes};

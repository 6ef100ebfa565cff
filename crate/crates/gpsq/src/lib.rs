//! Stationary performance analysis of M^X/G/1 queues under
//! attained-service-dependent (Grishechkin) processor-sharing policies.
//!
//! The crate computes the Laplace transform of the stationary system
//! size two ways — through the resolvent-form solution of the governing
//! integral equation and through direct fixed-point iteration — inverts
//! transforms numerically on the Talbot contour, extracts exact queue
//! length probabilities, solves the egalitarian-sharing sojourn-time
//! pipeline, and validates everything against a built-in discrete-event
//! simulator.
//!
//! Modules:
//! * [`model`] — arrival/service/policy problem instances,
//! * [`numerics`] — Talbot inversion, incomplete gamma, quadrature,
//! * [`grid`] — tabulated functions with monotone cubic interpolation,
//! * [`policies`] — EPS, DPS and the SRPT/FB/TFS limit families,
//! * [`resolvent`] — the convolution-resolvent machinery,
//! * [`transform`] — the two stationary-transform pipelines, sojourn
//!   times, density inversion and PMF extraction,
//! * [`sim`] — the event-driven simulator (both engines),
//! * [`report`], [`cli`] — run orchestration, cross-check logs, output.

pub mod cli;
pub mod error;
pub mod grid;
pub mod model;
pub mod numerics;
pub mod policies;
pub mod report;
pub mod resolvent;
pub mod sim;
pub mod transform;

pub use error::{Error, Result};

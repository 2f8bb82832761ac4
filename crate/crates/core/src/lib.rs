//! Nonholonomic source seeking with gradient and Newton extremum-seeking
//! controllers.
//!
//! * [`model`]: field, unicycle and parameter types
//! * [`seekers`]: closed-loop and averaged right-hand sides in every frame
//! * [`ode`]: fixed-step RK4 integration and trajectory CSV
//! * [`averaging`]: numerical Lie bracket averaging for control-affine systems
//! * [`stability`]: linearization, Lyapunov certificate and ISS checks
//! * [`experiments`]: scenario configuration and the reproduction studies

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod error;
pub mod experiments;
pub mod model;
pub mod ode;
pub mod seekers;
pub mod stability;

pub use error::{Error, Result};

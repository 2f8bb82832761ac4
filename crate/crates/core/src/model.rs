//! Vehicle, signal field and controller parameter types.
//!
//! The field is quadratic in the distance to the source,
//!
//! ```text
//! F(x) = F* - H/2 |x - x*|^2,   H > 0,
//! ```
//!
//! and the vehicle is a unicycle driven by a forward speed `u1` and a turning
//! rate `u2`. Units are carried in documentation only; every quantity is a
//! plain `f64`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadratic, radially symmetric signal field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    /// Peak value `F*` at the source.
    pub f_star: f64,
    /// Scalar curvature `H > 0`.
    pub hessian: f64,
    /// Source position `x*`.
    pub source: [f64; 2],
}

impl Default for FieldParams {
    fn default() -> Self {
        Self {
            f_star: 5.0,
            hessian: 0.01,
            source: [1.0, -1.0],
        }
    }
}

impl FieldParams {
    pub fn validate(&self) -> Result<()> {
        if !self.f_star.is_finite() {
            return Err(Error::invalid("f_star", "must be finite"));
        }
        if !(self.hessian.is_finite() && self.hessian > 0.0) {
            return Err(Error::invalid(
                "hessian",
                format!("must be finite and > 0, got {}", self.hessian),
            ));
        }
        if !self.source.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("source", "must be finite"));
        }
        Ok(())
    }

    /// Field value at `x`.
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        eval_field(x, self)
    }

    /// Field value as a function of the offset `z = x - x*` (or any rotation
    /// of it, since the field is radial).
    pub fn eval_offset(&self, z: [f64; 2]) -> f64 {
        self.f_star - 0.5 * self.hessian * (z[0] * z[0] + z[1] * z[1])
    }

    /// Exact gradient `-H (x - x*)`.
    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        [
            -self.hessian * (x[0] - self.source[0]),
            -self.hessian * (x[1] - self.source[1]),
        ]
    }

    pub fn inverse_hessian(&self) -> f64 {
        1.0 / self.hessian
    }
}

/// `F* - H/2 |x - x*|^2`.
pub fn eval_field(x: [f64; 2], field: &FieldParams) -> f64 {
    let dx = x[0] - field.source[0];
    let dy = x[1] - field.source[1];
    field.f_star - 0.5 * field.hessian * (dx * dx + dy * dy)
}

/// Planar unicycle pose. Headings are kept unwrapped.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleState {
    pub position: [f64; 2],
    pub heading: f64,
}

impl VehicleState {
    pub fn new(position: [f64; 2], heading: f64) -> Self {
        Self { position, heading }
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|v| v.is_finite()) && self.heading.is_finite()
    }
}

/// Unicycle kinematics: `x' = u1 (cos θ, sin θ)`, `θ' = u2`.
///
/// The derivative is returned in the same layout as the state.
pub fn unicycle_rhs(state: &VehicleState, u1: f64, u2: f64) -> VehicleState {
    let (s, c) = state.heading.sin_cos();
    VehicleState {
        position: [u1 * c, u1 * s],
        heading: u2,
    }
}

/// Gains and frequencies shared by the gradient and Newton seekers.
///
/// The velocity gain `c = ω^(1-p)` and dither amplitude `α̃ = α ω^p` are
/// derived on demand and never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeekerParams {
    /// Dither frequency ω.
    pub omega: f64,
    /// Constant turning rate ω0.
    pub omega0: f64,
    /// Amplitude scale α.
    pub alpha: f64,
    /// Gain split exponent p, strictly inside (0.5, 1).
    pub p_exp: f64,
    /// High-pass filter gain h.
    pub h_gain: f64,
    /// Riccati filter gain ω_d (Newton scheme only).
    pub omega_d: f64,
}

impl Default for SeekerParams {
    fn default() -> Self {
        Self {
            omega: 15.0,
            omega0: 1.0,
            alpha: 2.0,
            p_exp: 0.61,
            h_gain: 1.0,
            omega_d: 0.3,
        }
    }
}

impl SeekerParams {
    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 5] = [
            ("omega", self.omega),
            ("omega0", self.omega0),
            ("alpha", self.alpha),
            ("h_gain", self.h_gain),
            ("omega_d", self.omega_d),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.p_exp > 0.5 && self.p_exp < 1.0) {
            return Err(Error::invalid(
                "p_exp",
                format!("must lie strictly inside (0.5, 1), got {}", self.p_exp),
            ));
        }
        Ok(())
    }

    /// Velocity gain `c = ω^(1-p)`.
    pub fn c(&self) -> f64 {
        self.omega.powf(1.0 - self.p_exp)
    }

    /// Dither amplitude `α̃ = α ω^p`.
    pub fn alpha_tilde(&self) -> f64 {
        self.alpha * self.omega.powf(self.p_exp)
    }

    /// Riccati demodulation gain `8 ω² / α̃²`.
    pub fn demod_gain(&self) -> f64 {
        let at = self.alpha_tilde();
        8.0 * self.omega * self.omega / (at * at)
    }

    /// Amplitude `α̃/ω` of the position dither around the averaged path.
    pub fn dither_radius(&self) -> f64 {
        self.alpha_tilde() / self.omega
    }

    /// Returns a copy with a different dither frequency.
    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }
}

/// Full closed-loop state of a seeker in the original frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeekerState {
    pub position: [f64; 2],
    pub heading: f64,
    /// High-pass filter state ν.
    pub nu: f64,
    /// Riccati state d; `None` for the gradient scheme.
    pub dee: Option<f64>,
}

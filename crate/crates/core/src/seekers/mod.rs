//! Closed-loop gradient and Newton source seekers in every coordinate frame,
//! and their closed-form averaged systems.
//!
//! The heading is eliminated analytically (`θ = ω0 t`) everywhere except in
//! the [`Frame::Original`] closed loop, which integrates the raw unicycle and
//! keeps θ as a state. State layouts:
//!
//! | scheme   | frame          | state                 |
//! |----------|----------------|-----------------------|
//! | gradient | Original       | `x1, x2, θ, ν`        |
//! | newton   | Original       | `x1, x2, θ, d, ν`     |
//! | gradient | RotatingZ      | `z1, z2, ν`           |
//! | newton   | RotatingZ      | `z1, z2, d, ν`        |
//! | newton   | RotatingZLogD  | `z1, z2, ln d, ν`     |
//!
//! Averaged layouts are listed on [`AveragedScheme`].

mod averaged;
mod control;
mod rotation;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{unicycle_rhs, FieldParams, SeekerParams, VehicleState};

pub use averaged::{averaged_rhs, cascade_rhs, cascade_to_exp, exp_to_cascade, AveragedScheme, AveragedSystem};
pub use control::{gradient_control, newton_control, Gains, GradientControl, NewtonControl};
pub use rotation::{from_rotating_frame, j0, to_rotating_frame, RotationY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Gradient,
    Newton,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Gradient => "gradient",
            Scheme::Newton => "newton",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Original,
    RotatingZ,
    RotatingZLogD,
    CascadeShifted,
    AveragedGradient,
    AveragedNewton,
    AveragedNewtonExp,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Original => "original",
            Frame::RotatingZ => "rotating_z",
            Frame::RotatingZLogD => "rotating_z_log_d",
            Frame::CascadeShifted => "cascade_shifted",
            Frame::AveragedGradient => "averaged_gradient",
            Frame::AveragedNewton => "averaged_newton",
            Frame::AveragedNewtonExp => "averaged_newton_exp",
        })
    }
}

impl Frame {
    /// Whether the frame exists for `scheme` at all (closed loop or averaged).
    pub fn supports(&self, scheme: Scheme) -> bool {
        match self {
            Frame::Original | Frame::RotatingZ => true,
            Frame::AveragedGradient => scheme == Scheme::Gradient,
            Frame::RotatingZLogD | Frame::CascadeShifted | Frame::AveragedNewton | Frame::AveragedNewtonExp => {
                scheme == Scheme::Newton
            }
        }
    }

    pub fn is_closed_loop(&self) -> bool {
        matches!(self, Frame::Original | Frame::RotatingZ | Frame::RotatingZLogD)
    }
}

/// Component indices of a closed-loop state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub dim: usize,
    pub heading: Option<usize>,
    /// Riccati state (`d`, or `ln d` in the log frame).
    pub riccati: Option<usize>,
    pub filter: usize,
}

pub fn layout(scheme: Scheme, frame: Frame) -> Result<Layout> {
    let incompatible = || Error::IncompatibleFrame {
        scheme: scheme.to_string(),
        frame: frame.to_string(),
    };
    if !frame.is_closed_loop() || !frame.supports(scheme) {
        return Err(incompatible());
    }
    Ok(match (scheme, frame) {
        (Scheme::Gradient, Frame::Original) => Layout {
            dim: 4,
            heading: Some(2),
            riccati: None,
            filter: 3,
        },
        (Scheme::Newton, Frame::Original) => Layout {
            dim: 5,
            heading: Some(2),
            riccati: Some(3),
            filter: 4,
        },
        (Scheme::Gradient, Frame::RotatingZ) => Layout {
            dim: 3,
            heading: None,
            riccati: None,
            filter: 2,
        },
        (Scheme::Newton, Frame::RotatingZ | Frame::RotatingZLogD) => Layout {
            dim: 4,
            heading: None,
            riccati: Some(2),
            filter: 3,
        },
        _ => return Err(incompatible()),
    })
}

/// A closed-loop seeker right-hand side with gains resolved at construction.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    pub scheme: Scheme,
    pub frame: Frame,
    pub params: SeekerParams,
    pub field: FieldParams,
    pub layout: Layout,
    gains: Gains,
}

impl ClosedLoop {
    pub fn new(scheme: Scheme, frame: Frame, params: SeekerParams, field: FieldParams) -> Result<Self> {
        params.validate()?;
        field.validate()?;
        let layout = layout(scheme, frame)?;
        Ok(Self {
            scheme,
            frame,
            params,
            field,
            layout,
            gains: Gains::from(&params),
        })
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn gains(&self) -> &Gains {
        &self.gains
    }

    /// Checked evaluation.
    pub fn rhs(&self, t: f64, state: &[f64], out: &mut [f64]) -> Result<()> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: state.len(),
            });
        }
        if out.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: out.len(),
            });
        }
        self.eval(t, state, out);
        Ok(())
    }

    /// Unchecked evaluation; slices must have length [`Self::dim`].
    pub fn eval(&self, t: f64, s: &[f64], out: &mut [f64]) {
        let g = &self.gains;
        match (self.scheme, self.frame) {
            (Scheme::Gradient, Frame::Original) => {
                let y = self.field.eval([s[0], s[1]]);
                let u = g.gradient(t, y, s[3]);
                let d = unicycle_rhs(&VehicleState::new([s[0], s[1]], s[2]), u.u1, u.u2);
                out[0] = d.position[0];
                out[1] = d.position[1];
                out[2] = d.heading;
                out[3] = u.nu_dot;
            }
            (Scheme::Newton, Frame::Original) => {
                let y = self.field.eval([s[0], s[1]]);
                let u = g.newton(t, y, s[4], s[3]);
                let d = unicycle_rhs(&VehicleState::new([s[0], s[1]], s[2]), u.u1, u.u2);
                out[0] = d.position[0];
                out[1] = d.position[1];
                out[2] = d.heading;
                out[3] = u.dee_dot;
                out[4] = u.nu_dot;
            }
            (Scheme::Gradient, Frame::RotatingZ) => {
                let y = self.field.eval_offset([s[0], s[1]]);
                let u = g.gradient(t, y, s[2]);
                out[0] = g.omega0 * s[1];
                out[1] = -g.omega0 * s[0] + u.u1;
                out[2] = u.nu_dot;
            }
            (Scheme::Newton, Frame::RotatingZ) => {
                let y = self.field.eval_offset([s[0], s[1]]);
                let u = g.newton(t, y, s[3], s[2]);
                out[0] = g.omega0 * s[1];
                out[1] = -g.omega0 * s[0] + u.u1;
                out[2] = u.dee_dot;
                out[3] = u.nu_dot;
            }
            (Scheme::Newton, Frame::RotatingZLogD) => {
                let y = self.field.eval_offset([s[0], s[1]]);
                let dee = s[2].exp();
                let u = g.newton(t, y, s[3], dee);
                out[0] = g.omega0 * s[1];
                out[1] = -g.omega0 * s[0] + u.u1;
                // (ln d)' = d'/d, written without the division
                out[2] = g.omega_d * (1.0 - dee * g.riccati_input(t, y - s[3]));
                out[3] = u.nu_dot;
            }
            _ => unreachable!("layout() rejects other combinations"),
        }
    }

    /// Position offset `x - x*` in original coordinates.
    pub fn position_offset(&self, t: f64, state: &[f64]) -> [f64; 2] {
        match self.frame {
            Frame::Original => [state[0] - self.field.source[0], state[1] - self.field.source[1]],
            _ => RotationY::new(t, self.params.omega0).apply([state[0], state[1]]),
        }
    }

    /// Riccati estimate `d` (exponentiated in the log frame).
    pub fn riccati_estimate(&self, state: &[f64]) -> Option<f64> {
        let i = self.layout.riccati?;
        Some(if self.frame == Frame::RotatingZLogD {
            state[i].exp()
        } else {
            state[i]
        })
    }
}

/// Right-hand side of the closed loop for `scheme` in `frame`.
#[allow(clippy::too_many_arguments)]
pub fn closed_loop_rhs(
    scheme: Scheme,
    frame: Frame,
    t: f64,
    state: &[f64],
    params: &SeekerParams,
    field: &FieldParams,
    out: &mut [f64],
) -> Result<()> {
    ClosedLoop::new(scheme, frame, *params, *field)?.rhs(t, state, out)
}

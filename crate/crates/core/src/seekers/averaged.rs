//! Closed-form averaged systems.
//!
//! With `Λ = diag(0, -αH/2)` and `Λ̃ = Λ/H = diag(0, -α/2)`:
//!
//! * gradient `(z̄, ν̄)`: `z̄' = (J0 + Λ) z̄`, `ν̄' = h (F(z̄) - ν̄)`
//! * Newton `(z̄, d̄, ν̄)`: `z̄' = (J0 + Λ d̄) z̄`, `d̄' = ω_d d̄ (1 - H d̄)`
//! * Newton-exp `(z̄, d̃, ν̄)`: as Newton with `d̄ = e^d̃`, `d̃' = ω_d (1 - H e^d̃)`
//! * cascade `(r, z̄, d̂)` with `d̂ = d̃ + ln H`, `r = ν̄ - F(z̄)`:
//!   `r' = -h r + H z̄ᵀ(J0 + Λ̃ e^d̂) z̄`, `z̄' = (J0 + Λ̃ e^d̂) z̄`,
//!   `d̂' = -ω_d (e^d̂ - 1)`

use serde::{Deserialize, Serialize};

use super::{Frame, Scheme};
use crate::error::{Error, Result};
use crate::model::{FieldParams, SeekerParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AveragedScheme {
    /// `z̄1, z̄2, ν̄`
    Gradient,
    /// `z̄1, z̄2, d̄, ν̄`
    Newton,
    /// `z̄1, z̄2, d̃, ν̄`
    NewtonExp,
    /// `r, z̄1, z̄2, d̂`
    NewtonCascade,
}

impl AveragedScheme {
    pub fn dim(&self) -> usize {
        match self {
            AveragedScheme::Gradient => 3,
            _ => 4,
        }
    }

    pub fn frame(&self) -> Frame {
        match self {
            AveragedScheme::Gradient => Frame::AveragedGradient,
            AveragedScheme::Newton => Frame::AveragedNewton,
            AveragedScheme::NewtonExp => Frame::AveragedNewtonExp,
            AveragedScheme::NewtonCascade => Frame::CascadeShifted,
        }
    }

    pub fn scheme(&self) -> Scheme {
        match self {
            AveragedScheme::Gradient => Scheme::Gradient,
            _ => Scheme::Newton,
        }
    }

    /// Indices of `z̄` in the state vector.
    pub fn z_indices(&self) -> [usize; 2] {
        match self {
            AveragedScheme::NewtonCascade => [1, 2],
            _ => [0, 1],
        }
    }
}

/// Averaged right-hand side with parameters captured.
#[derive(Debug, Clone, Copy)]
pub struct AveragedSystem {
    pub scheme: AveragedScheme,
    pub params: SeekerParams,
    pub field: FieldParams,
}

impl AveragedSystem {
    pub fn new(scheme: AveragedScheme, params: SeekerParams, field: FieldParams) -> Result<Self> {
        params.validate()?;
        field.validate()?;
        Ok(Self { scheme, params, field })
    }

    pub fn dim(&self) -> usize {
        self.scheme.dim()
    }

    pub fn rhs(&self, state: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.dim();
        for len in [state.len(), out.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        self.eval(state, out);
        Ok(())
    }

    /// Unchecked evaluation.
    pub fn eval(&self, s: &[f64], out: &mut [f64]) {
        let p = &self.params;
        let hess = self.field.hessian;
        let w0 = p.omega0;
        match self.scheme {
            AveragedScheme::Gradient => {
                out[0] = w0 * s[1];
                out[1] = -w0 * s[0] - 0.5 * p.alpha * hess * s[1];
                out[2] = p.h_gain * (self.field.eval_offset([s[0], s[1]]) - s[2]);
            }
            AveragedScheme::Newton | AveragedScheme::NewtonExp => {
                let dee = if self.scheme == AveragedScheme::Newton {
                    s[2]
                } else {
                    s[2].exp()
                };
                out[0] = w0 * s[1];
                out[1] = -w0 * s[0] - 0.5 * p.alpha * hess * dee * s[1];
                out[2] = if self.scheme == AveragedScheme::Newton {
                    p.omega_d * dee * (1.0 - hess * dee)
                } else {
                    p.omega_d * (1.0 - hess * dee)
                };
                out[3] = p.h_gain * (self.field.eval_offset([s[0], s[1]]) - s[3]);
            }
            AveragedScheme::NewtonCascade => {
                let d = cascade_rhs(s[0], [s[1], s[2]], s[3], p.alpha, w0, p.omega_d, p.h_gain, hess);
                out.copy_from_slice(&d);
            }
        }
    }
}

/// Closed-form averaged right-hand side for `scheme`.
pub fn averaged_rhs(
    scheme: AveragedScheme,
    state: &[f64],
    params: &SeekerParams,
    field: &FieldParams,
    out: &mut [f64],
) -> Result<()> {
    AveragedSystem::new(scheme, *params, *field)?.rhs(state, out)
}

/// Shifted cascade `(r, z̄, d̂)`; returns `[r', z̄1', z̄2', d̂']`.
#[allow(clippy::too_many_arguments)]
pub fn cascade_rhs(
    r: f64,
    z: [f64; 2],
    d_hat: f64,
    alpha: f64,
    omega0: f64,
    omega_d: f64,
    h: f64,
    hessian: f64,
) -> [f64; 4] {
    let scale = d_hat.exp();
    // (J0 + Λ̃ e^d̂) z̄
    let zd = [omega0 * z[1], -omega0 * z[0] - 0.5 * alpha * scale * z[1]];
    let quad = z[0] * zd[0] + z[1] * zd[1];
    [-h * r + hessian * quad, zd[0], zd[1], -omega_d * d_hat.exp_m1()]
}

/// `(z̄, d̃, ν̄)` → `(r, z̄, d̂)`.
pub fn exp_to_cascade(state: &[f64], field: &FieldParams) -> [f64; 4] {
    let z = [state[0], state[1]];
    [
        state[3] - field.eval_offset(z),
        z[0],
        z[1],
        state[2] + field.hessian.ln(),
    ]
}

/// `(r, z̄, d̂)` → `(z̄, d̃, ν̄)`.
pub fn cascade_to_exp(state: &[f64], field: &FieldParams) -> [f64; 4] {
    let z = [state[1], state[2]];
    [
        z[0],
        z[1],
        state[3] - field.hessian.ln(),
        state[0] + field.eval_offset(z),
    ]
}

//! Input-affine decompositions of the two seekers in the rotating frame.
//!
//! Gradient, state `(z1, z2, ν)`:
//!
//! ```text
//! f0 = (ω0 z2, -ω0 z1, h(F - ν))
//! f1 = (0, F - ν, 0)      u1 = ω^{1-p} sin(ωt)
//! f2 = (0, α, 0)          u2 = ω^p cos(ωt)
//! ```
//!
//! Newton, state `(z1, z2, d, ν)`, with `κ = 8 ω_d / α²`:
//!
//! ```text
//! f0 = (ω0 z2, -ω0 z1, ω_d d, h(F - ν))
//! f1 = (0, d(F - ν), 0, 0)        u1 = ω^{1-p} sin(ωt)
//! f2 = (0, α, 0, 0)               u2 = ω^p cos(ωt)
//! f3 = (0, 0, κ d² (ν - F), 0)    u3 = ω^{2-2p} cos(2ωt)
//! ```

use super::input::{FrequencyRatio, OscillatoryInput, Waveform};
use super::system::{vector_field, ControlAffineSystem};
use crate::error::Result;
use crate::model::{FieldParams, SeekerParams};

fn inputs(params: &SeekerParams, newton: bool) -> Result<Vec<OscillatoryInput>> {
    let one = FrequencyRatio::integer(1)?;
    let p = params.p_exp;
    let mut v = vec![
        OscillatoryInput::new(Waveform::Sin, one, 1.0 - p)?,
        OscillatoryInput::new(Waveform::Cos, one, p)?,
    ];
    if newton {
        v.push(OscillatoryInput::new(
            Waveform::Cos,
            FrequencyRatio::integer(2)?,
            2.0 - 2.0 * p,
        )?);
    }
    Ok(v)
}

pub fn gradient_system(params: &SeekerParams, field: &FieldParams) -> Result<ControlAffineSystem> {
    params.validate()?;
    field.validate()?;
    let (w0, h, alpha) = (params.omega0, params.h_gain, params.alpha);
    let fld = *field;
    let u = inputs(params, false)?;
    let drift = vector_field(move |x| vec![w0 * x[1], -w0 * x[0], h * (fld.eval_offset([x[0], x[1]]) - x[2])]);
    let f1 = vector_field(move |x| vec![0.0, fld.eval_offset([x[0], x[1]]) - x[2], 0.0]);
    let f2 = vector_field(move |_| vec![0.0, alpha, 0.0]);
    Ok(ControlAffineSystem::new(3, drift)
        .with_channel(f1, u[0].clone())
        .with_channel(f2, u[1].clone()))
}

pub fn newton_system(params: &SeekerParams, field: &FieldParams) -> Result<ControlAffineSystem> {
    params.validate()?;
    field.validate()?;
    let (w0, h, alpha, wd) = (params.omega0, params.h_gain, params.alpha, params.omega_d);
    let kappa = 8.0 * wd / (alpha * alpha);
    let fld = *field;
    let u = inputs(params, true)?;
    let drift = vector_field(move |x| {
        vec![
            w0 * x[1],
            -w0 * x[0],
            wd * x[2],
            h * (fld.eval_offset([x[0], x[1]]) - x[3]),
        ]
    });
    let f1 = vector_field(move |x| vec![0.0, x[2] * (fld.eval_offset([x[0], x[1]]) - x[3]), 0.0, 0.0]);
    let f2 = vector_field(move |_| vec![0.0, alpha, 0.0, 0.0]);
    let f3 = vector_field(move |x| {
        vec![
            0.0,
            0.0,
            kappa * x[2] * x[2] * (x[3] - fld.eval_offset([x[0], x[1]])),
            0.0,
        ]
    });
    Ok(ControlAffineSystem::new(4, drift)
        .with_channel(f1, u[0].clone())
        .with_channel(f2, u[1].clone())
        .with_channel(f3, u[2].clone()))
}

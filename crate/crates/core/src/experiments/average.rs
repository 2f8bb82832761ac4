use serde::Serialize;

use super::check::{all_pass, Check};
use super::config::Config;
use super::simulate::initial_state;
use crate::averaging::{
    averaging_report, check_assumptions, default_omega_grid, gradient_system, newton_system, AveragingEngine,
};
use crate::error::Result;
use crate::seekers::{AveragedScheme, AveragedSystem, Frame, Scheme};

/// Relative tolerance between the engine and the closed-form averaged field.
pub const CLOSED_FORM_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct AverageOutcome {
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Structured γ/bracket report.
    #[serde(skip)]
    pub text: String,
}

/// Runs the averaging engine on the configured scheme at the initial state
/// and compares with the closed-form averaged system.
pub fn run_average(config: &Config) -> Result<AverageOutcome> {
    config.validate()?;
    let scheme = config.scenario.scheme;
    let mut c = config.clone();
    let (frame, avg) = match scheme {
        Scheme::Gradient => (Frame::AveragedGradient, AveragedScheme::Gradient),
        Scheme::Newton => (Frame::AveragedNewton, AveragedScheme::Newton),
    };
    c.scenario.frame = frame;
    let sc = c.scenario_for(scheme)?;
    let system = match scheme {
        Scheme::Gradient => gradient_system(&sc.params, &sc.field)?,
        Scheme::Newton => newton_system(&sc.params, &sc.field)?,
    };
    let grid = default_omega_grid(sc.params.omega);
    let assumptions = check_assumptions(&system, &grid);
    let engine = AveragingEngine::new(system, &grid)?;
    let probe = initial_state(&sc);
    let mut closed = vec![0.0; probe.len()];
    AveragedSystem::new(avg, sc.params, sc.field)?.rhs(&probe, &mut closed)?;
    let averaged = engine.averaged_field(&probe)?;
    let err = averaged
        .iter()
        .zip(&closed)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max);
    let text = averaging_report(&scheme.to_string(), &engine, &probe, Some(&closed), &assumptions)?;
    let checks = vec![
        Check::new(
            "closed_form_agreement",
            err <= CLOSED_FORM_TOL,
            format!("largest scaled difference {err:.3e} (tolerance {CLOSED_FORM_TOL:e})"),
        ),
        Check::new(
            "assumptions",
            assumptions.all_pass(),
            assumptions
                .failures()
                .map(|f| format!("{} {:?}", f.clause, f.indices))
                .collect::<Vec<_>>()
                .join("; "),
        ),
    ];
    Ok(AverageOutcome {
        passed: all_pass(&checks),
        checks,
        text,
    })
}

use serde::Serialize;

use super::check::Check;
use super::config::Scenario;
use crate::error::{Error, Result};
use crate::model::{FieldParams, SeekerParams};
use crate::ode::{first_entry_time, integrate_guarded, Trajectory, TrajectoryMeta};
use crate::seekers::{
    exp_to_cascade, from_rotating_frame, to_rotating_frame, AveragedScheme, AveragedSystem, ClosedLoop, Frame, Scheme,
};

/// Parameters as run, with the derived gains.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResolvedParams {
    pub omega: f64,
    pub omega0: f64,
    pub alpha: f64,
    pub p_exp: f64,
    pub h_gain: f64,
    pub omega_d: f64,
    pub c: f64,
    pub alpha_tilde: f64,
    pub demod_gain: f64,
    pub dither_radius: f64,
    pub f_star: f64,
    pub hessian: f64,
    pub source: [f64; 2],
}

impl ResolvedParams {
    pub fn new(p: &SeekerParams, f: &FieldParams) -> Self {
        Self {
            omega: p.omega,
            omega0: p.omega0,
            alpha: p.alpha,
            p_exp: p.p_exp,
            h_gain: p.h_gain,
            omega_d: p.omega_d,
            c: p.c(),
            alpha_tilde: p.alpha_tilde(),
            demod_gain: p.demod_gain(),
            dither_radius: p.dither_radius(),
            f_star: f.f_star,
            hessian: f.hessian,
            source: f.source,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scheme: Scheme,
    pub frame: Frame,
    pub t_end: f64,
    pub samples: usize,
    pub final_distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_dee: Option<f64>,
    /// Mean of d over the trailing window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dee_trailing_mean: Option<f64>,
    pub ball_radius: f64,
    /// Earliest time after which the position stays in the ball.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_entry_time: Option<f64>,
    /// The same for the position averaged over one dither period.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothed_entry_time: Option<f64>,
    /// Largest distance over the trailing window.
    pub trailing_max_distance: f64,
    pub resolved: ResolvedParams,
}

impl RunSummary {
    /// Newton runs: trailing mean of `d` near `1/H` and ball entry.
    /// Gradient runs carry no checks.
    pub fn checks(&self, dee_tolerance: f64) -> Vec<Check> {
        let Some(err) = self.dee_error() else {
            return Vec::new();
        };
        vec![
            Check::new(
                "dee_trailing_mean",
                err <= dee_tolerance,
                format!(
                    "mean {:.6} vs 1/H = {:.6}, relative error {err:.4} (tolerance {dee_tolerance})",
                    self.dee_trailing_mean.unwrap_or(f64::NAN),
                    1.0 / self.resolved.hessian
                ),
            ),
            Check::new(
                "newton_enters_ball",
                self.first_entry_time.is_some(),
                match self.first_entry_time {
                    Some(t) => format!("entry time {t:.4} within t_end = {}", self.t_end),
                    None => format!(
                        "does not stay inside radius {} by t_end = {}",
                        self.ball_radius, self.t_end
                    ),
                },
            ),
        ]
    }

    /// Relative error of the trailing mean of d against `1/H`.
    pub fn dee_error(&self) -> Option<f64> {
        self.dee_trailing_mean.map(|m| (m * self.resolved.hessian - 1.0).abs())
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub trajectory: Trajectory,
    /// Absolute positions at the recorded times.
    pub positions: Vec<[f64; 2]>,
    pub dee: Option<Vec<f64>>,
    pub summary: RunSummary,
}

pub fn averaged_scheme_for(frame: Frame) -> Option<AveragedScheme> {
    match frame {
        Frame::AveragedGradient => Some(AveragedScheme::Gradient),
        Frame::AveragedNewton => Some(AveragedScheme::Newton),
        Frame::AveragedNewtonExp => Some(AveragedScheme::NewtonExp),
        Frame::CascadeShifted => Some(AveragedScheme::NewtonCascade),
        _ => None,
    }
}

/// Initial state vector of `scenario` in its frame.
pub fn initial_state(sc: &Scenario) -> Vec<f64> {
    let i = &sc.initial;
    let src = sc.field.source;
    let z = to_rotating_frame(0.0, i.position, src, sc.params.omega0);
    let newton = sc.scheme == Scheme::Newton;
    match sc.frame {
        Frame::Original if newton => vec![i.position[0], i.position[1], i.heading, i.dee, i.nu],
        Frame::Original => vec![i.position[0], i.position[1], i.heading, i.nu],
        Frame::RotatingZ | Frame::AveragedNewton if newton => vec![z[0], z[1], i.dee, i.nu],
        Frame::RotatingZ | Frame::AveragedGradient => vec![z[0], z[1], i.nu],
        Frame::RotatingZLogD | Frame::AveragedNewtonExp => vec![z[0], z[1], i.dee.ln(), i.nu],
        Frame::CascadeShifted => exp_to_cascade(&[z[0], z[1], i.dee.ln(), i.nu], &sc.field).to_vec(),
        Frame::AveragedNewton => unreachable!("validated: averaged Newton frame needs the Newton scheme"),
    }
}

/// Absolute position and Riccati estimate encoded in a state of `scenario`.
pub fn decode(sc: &Scenario, t: f64, s: &[f64]) -> ([f64; 2], Option<f64>) {
    let rot = |z: [f64; 2]| from_rotating_frame(t, z, sc.field.source, sc.params.omega0);
    let newton = sc.scheme == Scheme::Newton;
    match sc.frame {
        Frame::Original => ([s[0], s[1]], newton.then(|| s[3])),
        Frame::RotatingZ | Frame::AveragedNewton | Frame::AveragedGradient => (rot([s[0], s[1]]), newton.then(|| s[2])),
        Frame::RotatingZLogD | Frame::AveragedNewtonExp => (rot([s[0], s[1]]), Some(s[2].exp())),
        Frame::CascadeShifted => (rot([s[1], s[2]]), Some(s[3].exp() / sc.field.hessian)),
    }
}

/// Integrates the scenario in its frame. Non-log Newton frames abort if the
/// Riccati state leaves `d > 0`.
pub fn integrate_scenario(sc: &Scenario) -> Result<Trajectory> {
    sc.validate()?;
    let cfg = sc.integrator_config()?;
    let x0 = initial_state(sc);
    let riccati = match (sc.scheme, sc.frame) {
        (Scheme::Newton, Frame::Original) => Some(3),
        (Scheme::Newton, Frame::RotatingZ | Frame::AveragedNewton) => Some(2),
        _ => None,
    };
    let guard = |_: f64, s: &[f64]| match riccati {
        Some(i) if !(s[i] > 0.0) => Err(format!("Riccati state left d > 0 (d = {})", s[i])),
        _ => Ok(()),
    };
    let traj = if let Some(avg) = averaged_scheme_for(sc.frame) {
        let sys = AveragedSystem::new(avg, sc.params, sc.field)?;
        integrate_guarded(|_, s, out| sys.eval(s, out), &x0, 0.0, sc.t_end, &cfg, guard)?
    } else {
        let cl = ClosedLoop::new(sc.scheme, sc.frame, sc.params, sc.field)?;
        integrate_guarded(|t, s, out| cl.eval(t, s, out), &x0, 0.0, sc.t_end, &cfg, guard)?
    };
    Ok(traj.with_meta(TrajectoryMeta {
        scheme: Some(sc.scheme),
        frame: Some(sc.frame),
        params: Some(sc.params),
        field: Some(sc.field),
    }))
}

fn entry_time(times: &[f64], positions: &[[f64; 2]], center: [f64; 2], radius: f64) -> Result<Option<f64>> {
    let traj = Trajectory {
        times: times.to_vec(),
        states: positions.iter().map(|p| p.to_vec()).collect(),
        meta: TrajectoryMeta::default(),
    };
    first_entry_time(&traj, &center, radius, &[0, 1])
}

/// Entry time of the position averaged over a trailing window of one
/// `period`, which removes the dither oscillation.
pub fn smoothed_entry_time(
    times: &[f64],
    positions: &[[f64; 2]],
    center: [f64; 2],
    radius: f64,
    period: f64,
) -> Result<Option<f64>> {
    if times.len() < 2 {
        return Ok(None);
    }
    let step = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let w = ((period / step).round() as usize).max(1);
    if w >= positions.len() {
        return Ok(None);
    }
    let mut sum = [0.0, 0.0];
    let mut avg = Vec::with_capacity(positions.len() - w + 1);
    for (i, p) in positions.iter().enumerate() {
        sum[0] += p[0];
        sum[1] += p[1];
        if i >= w {
            sum[0] -= positions[i - w][0];
            sum[1] -= positions[i - w][1];
        }
        if i + 1 >= w {
            avg.push([sum[0] / w as f64, sum[1] / w as f64]);
        }
    }
    entry_time(&times[w - 1..], &avg, center, radius)
}

pub fn run_simulate(sc: &Scenario) -> Result<Simulation> {
    let trajectory = integrate_scenario(sc)?;
    let mut positions = Vec::with_capacity(trajectory.len());
    let mut dee = Vec::new();
    for (t, s) in trajectory.times.iter().zip(&trajectory.states) {
        let (p, d) = decode(sc, *t, s);
        positions.push(p);
        if let Some(d) = d {
            dee.push(d);
        }
    }
    let dee = (sc.scheme == Scheme::Newton).then_some(dee);
    let src = sc.field.source;
    let dist = |p: &[f64; 2]| (p[0] - src[0]).hypot(p[1] - src[1]);
    let th = &sc.thresholds;
    let t_trail = sc.t_end - th.trailing_window;
    let trailing: Vec<usize> = (0..trajectory.len())
        .filter(|&i| trajectory.times[i] >= t_trail)
        .collect();
    let dee_trailing_mean = dee
        .as_ref()
        .map(|d| trailing.iter().map(|&i| d[i]).sum::<f64>() / trailing.len().max(1) as f64);
    let summary = RunSummary {
        scheme: sc.scheme,
        frame: sc.frame,
        t_end: sc.t_end,
        samples: trajectory.len(),
        final_distance: dist(
            positions
                .last()
                .ok_or_else(|| Error::Rejected("empty trajectory".into()))?,
        ),
        final_dee: dee.as_ref().and_then(|d| d.last().copied()),
        dee_trailing_mean,
        ball_radius: th.ball_radius,
        first_entry_time: entry_time(&trajectory.times, &positions, src, th.ball_radius)?,
        smoothed_entry_time: smoothed_entry_time(
            &trajectory.times,
            &positions,
            src,
            th.ball_radius,
            std::f64::consts::TAU / sc.params.omega,
        )?,
        trailing_max_distance: trailing.iter().map(|&i| dist(&positions[i])).fold(0.0, f64::max),
        resolved: ResolvedParams::new(&sc.params, &sc.field),
    };
    Ok(Simulation {
        trajectory,
        positions,
        dee,
        summary,
    })
}

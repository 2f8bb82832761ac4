//! Fixed-step classical Runge–Kutta integration and sampled trajectories.
//!
//! Step sizes are tied to the fastest forcing frequency through
//! [`IntegratorConfig`]: a step never exceeds `2π / (ω_max · samples_per_period)`.
//! The step count is rounded up so that the horizon is hit exactly with a
//! uniform step, and further up to a multiple of the output stride so that
//! recorded samples are uniformly spaced as well.

mod csv_io;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FieldParams, SeekerParams};
use crate::seekers::{Frame, Scheme};

pub use csv_io::{read_csv, write_csv};

/// Lowest admissible resolution of the fastest oscillation.
pub const MIN_SAMPLES_PER_PERIOD: usize = 40;
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Maximum step size.
    pub dt: f64,
    pub samples_per_period: usize,
    /// Record every `output_stride`-th step.
    pub output_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        // fastest input of the default Newton seeker is cos(2ωt) with ω = 15
        Self::for_frequency(30.0, DEFAULT_SAMPLES_PER_PERIOD, 1).expect("default integrator configuration is valid")
    }
}

impl IntegratorConfig {
    /// Largest step resolving `omega_max` with `samples_per_period` points.
    pub fn for_frequency(omega_max: f64, samples_per_period: usize, output_stride: usize) -> Result<Self> {
        if !(omega_max.is_finite() && omega_max > 0.0) {
            return Err(Error::invalid("omega_max", "must be finite and > 0"));
        }
        let cfg = Self {
            dt: TAU / (omega_max * samples_per_period as f64),
            samples_per_period,
            output_stride,
        };
        cfg.validate(Some(omega_max))?;
        Ok(cfg)
    }

    /// Checks the resolution invariants; `omega_max` adds the step bound.
    pub fn validate(&self, omega_max: Option<f64>) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be finite and > 0, got {}", self.dt)));
        }
        if self.samples_per_period < MIN_SAMPLES_PER_PERIOD {
            return Err(Error::invalid(
                "samples_per_period",
                format!("must be >= {MIN_SAMPLES_PER_PERIOD}, got {}", self.samples_per_period),
            ));
        }
        if self.output_stride == 0 {
            return Err(Error::invalid("output_stride", "must be >= 1"));
        }
        if let Some(w) = omega_max {
            let bound = TAU / (w * self.samples_per_period as f64);
            if self.dt > bound * (1.0 + 1e-12) {
                return Err(Error::invalid(
                    "dt",
                    format!(
                        "{} exceeds 2π/(ω_max·samples_per_period) = {bound} for ω_max = {w}",
                        self.dt
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Number of steps used to cover `span`, and the resulting uniform step.
    pub fn steps_for(&self, span: f64) -> (usize, f64) {
        let raw = (span / self.dt - 1e-9).ceil().max(1.0) as usize;
        let stride = self.output_stride.max(1);
        let n = raw.div_ceil(stride) * stride;
        (n, span / n as f64)
    }
}

/// Metadata identifying what produced a trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub scheme: Option<Scheme>,
    pub frame: Option<Frame>,
    pub params: Option<SeekerParams>,
    pub field: Option<FieldParams>,
}

/// Time-stamped state samples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn last_state(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    pub fn final_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    /// One state component across all samples.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }

    /// Euclidean norm of the selected components at every sample.
    pub fn norm_of(&self, components: &[usize]) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| components.iter().map(|&i| s[i] * s[i]).sum::<f64>().sqrt())
            .collect()
    }

    pub fn with_meta(mut self, meta: TrajectoryMeta) -> Self {
        self.meta = meta;
        self
    }
}

/// Integrates `x' = rhs(t, x)` from `t0` to `t1` with classical RK4.
///
/// `rhs` writes the derivative into its third argument.
pub fn integrate<F>(rhs: F, x0: &[f64], t0: f64, t1: f64, config: &IntegratorConfig) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    integrate_guarded(rhs, x0, t0, t1, config, |_, _| Ok(()))
}

/// [`integrate`] with a state guard checked after every step. A guard
/// failure aborts with [`Error::GuardViolation`].
pub fn integrate_guarded<F, G>(
    mut rhs: F,
    x0: &[f64],
    t0: f64,
    t1: f64,
    config: &IntegratorConfig,
    mut guard: G,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    G: FnMut(f64, &[f64]) -> std::result::Result<(), String>,
{
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::Rejected(format!("need finite t1 > t0, got [{t0}, {t1}]")));
    }
    config.validate(None)?;
    if x0.is_empty() {
        return Err(Error::Rejected("empty initial state".into()));
    }
    if !x0.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteState { last_valid_time: t0 });
    }

    let n = x0.len();
    let (steps, h) = config.steps_for(t1 - t0);
    let stride = config.output_stride;

    let mut traj = Trajectory {
        times: Vec::with_capacity(steps / stride + 1),
        states: Vec::with_capacity(steps / stride + 1),
        meta: TrajectoryMeta::default(),
    };
    traj.times.push(t0);
    traj.states.push(x0.to_vec());

    let mut x = x0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let half = 0.5 * h;

    for step in 0..steps {
        let t = t0 + step as f64 * h;

        rhs(t, &x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + half * k1[i];
        }
        rhs(t + half, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + half * k2[i];
        }
        rhs(t + half, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        rhs(t + h, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let t_next = if step + 1 == steps {
            t1
        } else {
            t0 + (step + 1) as f64 * h
        };
        if !tmp.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteState { last_valid_time: t });
        }
        if let Err(reason) = guard(t_next, &tmp) {
            return Err(Error::GuardViolation { time: t_next, reason });
        }
        std::mem::swap(&mut x, &mut tmp);

        if (step + 1) % stride == 0 {
            traj.times.push(t_next);
            traj.states.push(x.clone());
        }
    }
    Ok(traj)
}

/// Earliest recorded time after which the selected components stay inside
/// the ball of `radius` around `center` through the end of the trajectory.
///
/// `center` is indexed like `components`.
pub fn first_entry_time(traj: &Trajectory, center: &[f64], radius: f64, components: &[usize]) -> Result<Option<f64>> {
    if components.is_empty() {
        return Err(Error::Rejected("empty component set".into()));
    }
    if center.len() != components.len() {
        return Err(Error::DimensionMismatch {
            expected: components.len(),
            got: center.len(),
        });
    }
    if !(radius > 0.0) {
        return Err(Error::invalid("radius", "must be > 0"));
    }
    let dim = traj.dim();
    if let Some(&bad) = components.iter().find(|&&c| c >= dim) {
        return Err(Error::Rejected(format!(
            "component {bad} out of range for dimension {dim}"
        )));
    }
    let inside = |s: &[f64]| {
        let d2: f64 = components
            .iter()
            .zip(center)
            .map(|(&i, &c)| (s[i] - c) * (s[i] - c))
            .sum();
        d2.sqrt() <= radius
    };
    let last_outside = traj.states.iter().rposition(|s| !inside(s));
    Ok(match last_outside {
        None => traj.times.first().copied(),
        Some(i) => traj.times.get(i + 1).copied(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(dt: f64) -> IntegratorConfig {
        IntegratorConfig {
            dt,
            samples_per_period: 60,
            output_stride: 1,
        }
    }

    #[test]
    fn zero_field_gives_constant_trajectory() {
        let traj = integrate(|_, _, d| d.fill(0.0), &[1.0, -2.0, 3.5], 0.0, 2.0, &cfg(0.1)).unwrap();
        assert!(traj.states.iter().all(|s| s == &[1.0, -2.0, 3.5]));
        assert_eq!(traj.final_time(), Some(2.0));
    }

    #[test]
    fn exponential_decay_matches_analytic() {
        let traj = integrate(|_, x, d| d[0] = -x[0], &[1.0], 0.0, 1.0, &cfg(0.01)).unwrap();
        let x1 = traj.last_state().unwrap()[0];
        assert!((x1 - (-1f64).exp()).abs() < 1e-8);
        assert_eq!(traj.final_time(), Some(1.0));
        assert_eq!(traj.len(), 101);
    }

    #[test]
    fn rotation_returns_after_one_period() {
        // x' = J0 x with ω0 = 1
        let traj = integrate(
            |_, x, d| {
                d[0] = x[1];
                d[1] = -x[0];
            },
            &[1.0, 0.5],
            0.0,
            TAU,
            &cfg(TAU / 600.0),
        )
        .unwrap();
        let x = traj.last_state().unwrap();
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn uniform_spacing_with_stride() {
        let c = IntegratorConfig {
            dt: 0.03,
            samples_per_period: 60,
            output_stride: 7,
        };
        let traj = integrate(|_, x, d| d[0] = x[0], &[1.0], 0.0, 1.0, &c).unwrap();
        let dts: Vec<f64> = traj.times.windows(2).map(|w| w[1] - w[0]).collect();
        for d in &dts {
            assert_relative_eq!(*d, dts[0], max_relative = 1e-9);
        }
        assert_eq!(traj.final_time(), Some(1.0));
        let (n, h) = c.steps_for(1.0);
        assert_eq!(n % 7, 0);
        assert!(h <= 0.03);
    }

    #[test]
    fn non_finite_state_aborts_with_last_valid_time() {
        // blows up in finite time at t = 1
        let err = integrate(|_, x, d| d[0] = x[0] * x[0], &[1.0], 0.0, 2.0, &cfg(0.01)).unwrap_err();
        match err {
            Error::NonFiniteState { last_valid_time } => assert!(last_valid_time < 1.05),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn guard_violation_is_reported() {
        let err = integrate_guarded(
            |_, _, d| d[0] = -1.0,
            &[0.5],
            0.0,
            1.0,
            &cfg(0.01),
            |_, x| if x[0] > 0.0 { Ok(()) } else { Err("d <= 0".into()) },
        )
        .unwrap_err();
        assert!(matches!(err, Error::GuardViolation { time, .. } if (time - 0.5).abs() < 0.011));
    }

    #[test]
    fn rejects_bad_interval_and_config() {
        assert!(integrate(|_, _, d| d.fill(0.0), &[1.0], 1.0, 1.0, &cfg(0.1)).is_err());
        let bad = IntegratorConfig {
            dt: 0.1,
            samples_per_period: 10,
            output_stride: 1,
        };
        assert!(integrate(|_, _, d| d.fill(0.0), &[1.0], 0.0, 1.0, &bad).is_err());
        assert!(IntegratorConfig::for_frequency(30.0, 39, 1).is_err());
        let c = IntegratorConfig::for_frequency(30.0, 60, 1).unwrap();
        assert!(c.validate(Some(60.0)).is_err());
    }

    fn spiral() -> Trajectory {
        let times: Vec<f64> = (0..400).map(|i| i as f64 * 0.05).collect();
        let states = times
            .iter()
            .map(|&t| {
                let r = 2.0 * (-0.2 * t).exp();
                vec![r * (3.0 * t).cos(), r * (3.0 * t).sin(), t]
            })
            .collect();
        Trajectory {
            times,
            states,
            meta: Default::default(),
        }
    }

    #[test]
    fn entry_time_matches_brute_force() {
        let traj = spiral();
        let got = first_entry_time(&traj, &[0.0, 0.0], 0.5, &[0, 1]).unwrap();
        let inside = |s: &Vec<f64>| s[0].hypot(s[1]) <= 0.5;
        let brute = (0..traj.len())
            .find(|&i| traj.states[i..].iter().all(inside))
            .map(|i| traj.times[i]);
        assert_eq!(got, brute);
        assert!(got.is_some());
    }

    #[test]
    fn entry_time_edge_cases() {
        let stay = Trajectory {
            times: vec![3.0, 4.0, 5.0],
            states: vec![vec![1.0, 1.0]; 3],
            meta: Default::default(),
        };
        assert_eq!(first_entry_time(&stay, &[1.0, 1.0], 0.1, &[0, 1]).unwrap(), Some(3.0));
        assert_eq!(first_entry_time(&stay, &[9.0, 9.0], 0.1, &[0, 1]).unwrap(), None);
        assert!(first_entry_time(&stay, &[], 0.1, &[]).is_err());
        assert!(first_entry_time(&stay, &[1.0], 0.1, &[5]).is_err());
    }
}

use rayon::prelude::*;
use serde::Serialize;

use super::check::{all_pass, Check};
use super::config::{Config, Scenario};
use super::simulate::{initial_state, integrate_scenario};
use crate::error::Result;
use crate::ode::{IntegratorConfig, Trajectory};
use crate::seekers::{Frame, Scheme};

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub omega: f64,
    /// `sup_t |z(t) - z̄(t)|` over the horizon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    /// `max |z|` over the tail of the horizon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub averaged_residual_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaSweepReport {
    pub passed: bool,
    pub t_end: f64,
    pub tail_fraction: f64,
    pub slack: f64,
    pub dt: f64,
    pub checks: Vec<Check>,
    pub rows: Vec<SweepRow>,
}

impl OmegaSweepReport {
    pub fn rows_for(&self, scheme: Scheme) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }
}

struct RowRun {
    row: SweepRow,
    averaged: Option<Trajectory>,
}

fn averaged_frame(scheme: Scheme) -> Frame {
    match scheme {
        Scheme::Gradient => Frame::AveragedGradient,
        Scheme::Newton => Frame::AveragedNewton,
    }
}

fn scenario(base: &Scenario, frame: Frame, omega: f64, t_end: f64, cfg: &IntegratorConfig) -> Scenario {
    let mut sc = *base;
    sc.frame = frame;
    sc.params.omega = omega;
    sc.t_end = t_end;
    sc.integrator.samples_per_period = cfg.samples_per_period;
    sc.integrator.output_stride = 1;
    sc.integrator.dt = Some(cfg.dt);
    sc
}

fn run_row(base: &Scenario, omega: f64, t_end: f64, tail: f64, cfg: &IntegratorConfig) -> RowRun {
    let scheme = base.scheme;
    let result = (|| -> Result<(SweepRow, Trajectory)> {
        let full_sc = scenario(base, Frame::RotatingZ, omega, t_end, cfg);
        let avg_sc = scenario(base, averaged_frame(scheme), omega, t_end, cfg);
        debug_assert_eq!(initial_state(&full_sc)[..2], initial_state(&avg_sc)[..2]);
        let full = integrate_scenario(&full_sc)?;
        let avg = integrate_scenario(&avg_sc)?;
        let t_tail = t_end * (1.0 - tail);
        let mut deviation = 0.0f64;
        let mut residual = 0.0f64;
        let mut avg_residual = 0.0f64;
        for ((t, z), zb) in full.times.iter().zip(&full.states).zip(&avg.states) {
            deviation = deviation.max((z[0] - zb[0]).hypot(z[1] - zb[1]));
            if *t >= t_tail {
                residual = residual.max(z[0].hypot(z[1]));
                avg_residual = avg_residual.max(zb[0].hypot(zb[1]));
            }
        }
        let row = SweepRow {
            scheme,
            omega,
            deviation: Some(deviation),
            residual_radius: Some(residual),
            averaged_residual_radius: Some(avg_residual),
            error: None,
        };
        Ok((row, avg))
    })();
    match result {
        Ok((row, avg)) => RowRun {
            row,
            averaged: Some(avg),
        },
        Err(e) => RowRun {
            row: SweepRow {
                scheme,
                omega,
                deviation: None,
                residual_radius: None,
                averaged_residual_radius: None,
                error: Some(e.to_string()),
            },
            averaged: None,
        },
    }
}

/// `values[k+1] <= (1 + slack) values[k]` for every consecutive pair.
pub fn non_increasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= (1.0 + slack) * w[0])
}

fn column(rows: &[&SweepRow], f: impl Fn(&SweepRow) -> Option<f64>) -> Option<Vec<f64>> {
    rows.iter().map(|r| f(r)).collect()
}

fn fmt_column(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>().join(", ")
}

/// Full rotating-frame closed loop against its averaged system for every
/// `ω` of the sweep and both schemes. All runs share one step size, fine
/// enough for the largest `ω`, so the averaged runs see the same grid.
pub fn run_omega_sweep(config: &Config) -> Result<OmegaSweepReport> {
    config.validate()?;
    let s = &config.sweep_omega;
    let omega_max = s.omegas.iter().copied().fold(0.0, f64::max);
    let cfg = IntegratorConfig::for_frequency(2.0 * omega_max, config.integrator.samples_per_period, 1)?;
    let mut bases = Vec::new();
    for scheme in [Scheme::Gradient, Scheme::Newton] {
        let mut c = config.clone();
        c.scenario.frame = Frame::RotatingZ;
        bases.push(c.scenario_for(scheme)?);
    }
    let jobs: Vec<(usize, f64)> = (0..bases.len())
        .flat_map(|b| s.omegas.iter().map(move |&w| (b, w)))
        .collect();
    let runs: Vec<RowRun> = jobs
        .par_iter()
        .map(|&(b, w)| run_row(&bases[b], w, s.t_end, s.tail_fraction, &cfg))
        .collect();

    let mut checks = Vec::new();
    for (b, base) in bases.iter().enumerate() {
        let scheme = base.scheme;
        let mine: Vec<&RowRun> = runs
            .iter()
            .zip(&jobs)
            .filter(|(_, j)| j.0 == b)
            .map(|(r, _)| r)
            .collect();
        let rows: Vec<&SweepRow> = mine.iter().map(|r| &r.row).collect();
        for r in rows.iter().filter(|r| r.error.is_some()) {
            checks.push(Check::new(
                format!("{scheme}_run_omega_{}", r.omega),
                false,
                r.error.clone().unwrap_or_default(),
            ));
        }
        for (name, col) in [
            ("deviation", column(&rows, |r| r.deviation)),
            ("residual_radius", column(&rows, |r| r.residual_radius)),
        ] {
            let check = match col {
                Some(v) => Check::new(
                    format!("{scheme}_{name}_non_increasing"),
                    non_increasing(&v, s.slack),
                    format!("[{}] with slack {}", fmt_column(&v), s.slack),
                ),
                None => Check::new(format!("{scheme}_{name}_non_increasing"), false, "missing rows"),
            };
            checks.push(check);
        }
        let avg: Vec<&Trajectory> = mine.iter().filter_map(|r| r.averaged.as_ref()).collect();
        let identical = avg.len() == mine.len() && avg.windows(2).all(|w| w[0].states == w[1].states);
        checks.push(Check::new(
            format!("{scheme}_averaged_omega_independent"),
            identical,
            format!("{} averaged runs compared bit for bit", avg.len()),
        ));
    }
    Ok(OmegaSweepReport {
        passed: all_pass(&checks),
        t_end: s.t_end,
        tail_fraction: s.tail_fraction,
        slack: s.slack,
        dt: cfg.dt,
        checks,
        rows: runs.into_iter().map(|r| r.row).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_rule() {
        assert!(non_increasing(&[3.0, 2.0, 1.0], 0.0));
        assert!(non_increasing(&[1.0, 1.15, 1.3], 0.2));
        assert!(!non_increasing(&[1.0, 1.25], 0.2));
        assert!(non_increasing(&[], 0.0));
    }

    #[test]
    fn short_sweep_rows_and_identity() {
        let text = "[sweep_omega]\nomegas = [10.0, 20.0, 40.0]\nt_end = 2.0\n";
        let r = run_omega_sweep(&Config::from_toml_str(text).unwrap()).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert!(r.rows.iter().all(|r| r.error.is_none()));
        for scheme in ["gradient", "newton"] {
            let c = r
                .checks
                .iter()
                .find(|c| c.name == format!("{scheme}_averaged_omega_independent"));
            assert!(c.unwrap().passed);
        }
    }
}

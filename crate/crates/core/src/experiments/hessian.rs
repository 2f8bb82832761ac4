use rayon::prelude::*;
use serde::Serialize;

use super::check::{all_pass, Check};
use super::config::Config;
use super::rate::estimate_rate;
use super::simulate::initial_state;
use crate::error::{Error, Result};
use crate::model::{FieldParams, SeekerParams};
use crate::ode::{integrate, IntegratorConfig, MIN_SAMPLES_PER_PERIOD};
use crate::seekers::{AveragedScheme, AveragedSystem, Frame, Scheme};

#[derive(Debug, Clone, Serialize)]
pub struct RateRow {
    pub scheme: Scheme,
    pub hessian: f64,
    pub alpha: f64,
    pub window: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
    /// Fit `R² >= 0.9`.
    pub reliable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HessianReport {
    pub passed: bool,
    pub dt: f64,
    pub checks: Vec<Check>,
    pub rows: Vec<RateRow>,
    /// Newton rows at fixed `H` for the two values of `α`.
    pub alpha_rows: Vec<RateRow>,
}

/// Decay rate of `|z̄|` for one averaged system.
pub fn averaged_rate(
    scheme: AveragedScheme,
    params: SeekerParams,
    field: FieldParams,
    x0: &[f64],
    window: [f64; 2],
    dt: f64,
) -> Result<(f64, f64)> {
    let sys = AveragedSystem::new(scheme, params, field)?;
    let cfg = IntegratorConfig {
        dt,
        samples_per_period: MIN_SAMPLES_PER_PERIOD,
        output_stride: 1,
    };
    cfg.validate(None)?;
    let traj = integrate(|_, s, out| sys.eval(s, out), x0, 0.0, window[1], &cfg)?;
    let [i, j] = scheme.z_indices();
    let norm: Vec<f64> = traj.states.iter().map(|s| s[i].hypot(s[j])).collect();
    let fit = estimate_rate(&traj.times, &norm, window)?;
    Ok((fit.rate, fit.r_squared))
}

fn row(config: &Config, scheme: Scheme, hessian: f64, alpha: f64) -> RateRow {
    let h = &config.sweep_hessian;
    let window = match scheme {
        Scheme::Newton => h.newton_window,
        Scheme::Gradient => h.gradient_window,
    };
    let result = (|| -> Result<(f64, f64)> {
        let mut c = config.clone();
        c.scenario.frame = match scheme {
            Scheme::Newton => Frame::AveragedNewton,
            Scheme::Gradient => Frame::AveragedGradient,
        };
        c.field.hessian = hessian;
        c.params.alpha = alpha;
        let sc = c.scenario_for(scheme)?;
        let avg = match scheme {
            Scheme::Newton => AveragedScheme::Newton,
            Scheme::Gradient => AveragedScheme::Gradient,
        };
        averaged_rate(avg, sc.params, sc.field, &initial_state(&sc), window, h.dt)
    })();
    let (rate, r_squared, error) = match result {
        Ok((r, q)) => (Some(r), Some(q), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    RateRow {
        scheme,
        hessian,
        alpha,
        window,
        rate,
        r_squared,
        reliable: r_squared.is_some_and(|q| q >= super::rate::RELIABLE_R_SQUARED),
        error,
    }
}

fn rates(rows: &[&RateRow]) -> Option<Vec<f64>> {
    rows.iter().map(|r| r.rate.filter(|v| *v > 0.0)).collect()
}

fn fmt_rates(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
}

/// Averaged decay rates of both schemes across the Hessian list.
pub fn run_hessian_invariance(config: &Config) -> Result<HessianReport> {
    config.validate()?;
    let h = &config.sweep_hessian;
    let alpha = config.params.alpha;
    let jobs: Vec<(Scheme, f64, f64)> = [Scheme::Newton, Scheme::Gradient]
        .into_iter()
        .flat_map(|s| h.hessians.iter().map(move |&v| (s, v, alpha)))
        .chain(h.alpha_pair.iter().map(|&a| (Scheme::Newton, config.field.hessian, a)))
        .collect();
    let mut all: Vec<RateRow> = jobs.par_iter().map(|&(s, v, a)| row(config, s, v, a)).collect();
    let alpha_rows = all.split_off(2 * h.hessians.len());
    let rows = all;

    let mut checks = Vec::new();
    for r in rows.iter().chain(&alpha_rows) {
        let label = format!("{}_h{}_alpha{}", r.scheme, r.hessian, r.alpha);
        if let Some(e) = &r.error {
            checks.push(Check::new(format!("{label}_fit"), false, e.clone()));
        } else if !r.reliable {
            checks.push(Check::new(
                format!("{label}_fit"),
                false,
                format!(
                    "R² = {:.4} below {}",
                    r.r_squared.unwrap_or(f64::NAN),
                    super::rate::RELIABLE_R_SQUARED
                ),
            ));
        }
    }
    let newton: Vec<&RateRow> = rows.iter().filter(|r| r.scheme == Scheme::Newton).collect();
    checks.push(match rates(&newton) {
        Some(v) => {
            let (lo, hi) = v
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
            let spread = hi / lo - 1.0;
            Check::new(
                "newton_rates_hessian_invariant",
                spread <= h.newton_tolerance,
                format!(
                    "rates [{}], spread {spread:.4} (tolerance {})",
                    fmt_rates(&v),
                    h.newton_tolerance
                ),
            )
        }
        None => Check::new("newton_rates_hessian_invariant", false, "missing or non-positive rates"),
    });
    let gradient: Vec<&RateRow> = rows.iter().filter(|r| r.scheme == Scheme::Gradient).collect();
    checks.push(match rates(&gradient) {
        Some(v) => {
            let worst = v
                .iter()
                .zip(&gradient)
                .map(|(r, row)| ((r / v[0]) / (row.hessian / gradient[0].hessian) - 1.0).abs())
                .fold(0.0, f64::max);
            Check::new(
                "gradient_rates_scale_with_hessian",
                worst <= h.gradient_tolerance,
                format!(
                    "rates [{}], worst deviation of rate ratio from H ratio {worst:.4} (tolerance {})",
                    fmt_rates(&v),
                    h.gradient_tolerance
                ),
            )
        }
        None => Check::new(
            "gradient_rates_scale_with_hessian",
            false,
            "missing or non-positive rates",
        ),
    });
    let a_rows: Vec<&RateRow> = alpha_rows.iter().collect();
    checks.push(match rates(&a_rows) {
        Some(v) => {
            let expected = h.alpha_pair[1] / h.alpha_pair[0];
            let dev = (v[1] / v[0] / expected - 1.0).abs();
            Check::new(
                "newton_rate_scales_with_alpha",
                dev <= h.newton_tolerance,
                format!(
                    "rates [{}] for α = {:?}, ratio {:.4} vs {expected}",
                    fmt_rates(&v),
                    h.alpha_pair,
                    v[1] / v[0]
                ),
            )
        }
        None => Check::new("newton_rate_scales_with_alpha", false, "missing or non-positive rates"),
    });
    if rows.is_empty() {
        return Err(Error::Config("no Hessian values to sweep".into()));
    }
    Ok(HessianReport {
        passed: all_pass(&checks),
        dt: h.dt,
        checks,
        rows,
        alpha_rows,
    })
}

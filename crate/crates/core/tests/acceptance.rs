//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srcseek::averaging::{
    default_omega_grid, gamma_pair, gamma_triple, gradient_system, newton_system, AveragingEngine, ControlAffineSystem,
};
use srcseek::experiments::simulate::initial_state;
use srcseek::experiments::{run_hessian_invariance, run_omega_sweep, run_simulate, Config};
use srcseek::model::{FieldParams, SeekerParams};
use srcseek::ode::{integrate, IntegratorConfig};
use srcseek::seekers::{averaged_rhs, AveragedScheme, ClosedLoop, Scheme};
use srcseek::stability::{
    build_certificate, eigenvalues, grid_margins, iss_bound_check, linearize_averaged, position_block,
    spectrum_residual,
};

struct Outcome {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn report(id: &'static str, passed: bool, detail: String) -> Outcome {
    Outcome { id, passed, detail }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn params(omega: f64) -> SeekerParams {
    SeekerParams {
        omega,
        ..Default::default()
    }
}

fn gamma_oracle() -> Outcome {
    let (result, elapsed) = timed(|| -> srcseek::Result<(f64, f64, f64)> {
        let (mut abs_err, mut rel_err, mut zero) = (0.0f64, 0.0f64, 0.0f64);
        for w in [10.0, 15.0, 40.0] {
            let sys = newton_system(&params(w), &FieldParams::default())?;
            let p = params(w).p_exp;
            let g2 = |i, j| gamma_pair(i, j, &sys, w);
            let g3 = |i, j, m| gamma_triple(i, j, m, &sys, w);
            abs_err = abs_err.max((g2(0, 1)? + 0.5).abs());
            abs_err = abs_err.max((g3(1, 2, 1)? - 0.125).abs());
            let g121 = 0.5 / w.powf(p);
            let g131 = -1.0 / (8.0 * w.powf(4.0 * p - 2.0));
            rel_err = rel_err.max(((g3(0, 1, 0)? - g121) / g121).abs());
            rel_err = rel_err.max(((g3(0, 2, 0)? - g131) / g131).abs());
            for v in [
                g2(0, 2)?,
                g2(1, 2)?,
                g3(0, 1, 1)?,
                g3(0, 1, 2)?,
                g3(0, 2, 1)?,
                g3(0, 2, 2)?,
                g3(1, 2, 0)?,
                g3(1, 2, 2)?,
            ] {
                zero = zero.max(v.abs());
            }
        }
        Ok((abs_err, rel_err, zero))
    });
    match result {
        Ok((a, r, z)) => report(
            "1",
            a <= 1e-6 && r <= 1e-6 && z < 1e-8 && elapsed < Duration::from_secs(30),
            format!(
                "g12/g232 abs err {a:.2e}, g121/g131 rel err {r:.2e}, largest zero case {z:.2e}, {:.2}s",
                elapsed.as_secs_f64()
            ),
        ),
        Err(e) => report("1", false, e.to_string()),
    }
}

fn engine_worst(scheme: AveragedScheme, sys: ControlAffineSystem, seed: u64) -> srcseek::Result<f64> {
    let p = SeekerParams::default();
    let f = FieldParams::default();
    let engine = AveragingEngine::new(sys, &default_omega_grid(p.omega))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (z1, z2, nu) = (
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(0.0..6.0),
        );
        let x = match scheme {
            AveragedScheme::Gradient => vec![z1, z2, nu],
            _ => vec![z1, z2, rng.gen_range(0.1..200.0), nu],
        };
        let got = engine.averaged_field(&x)?;
        let mut want = vec![0.0; x.len()];
        averaged_rhs(scheme, &x, &p, &f, &mut want)?;
        for (g, e) in got.iter().zip(&want) {
            worst = worst.max((g - e).abs() / e.abs().max(1.0));
        }
    }
    Ok(worst)
}

fn engine_equivalence() -> Outcome {
    let (result, elapsed) = timed(|| -> srcseek::Result<(f64, f64)> {
        let p = SeekerParams::default();
        let f = FieldParams::default();
        Ok((
            engine_worst(AveragedScheme::Gradient, gradient_system(&p, &f)?, 101)?,
            engine_worst(AveragedScheme::Newton, newton_system(&p, &f)?, 102)?,
        ))
    });
    match result {
        Ok((g, n)) => report(
            "2",
            g <= 1e-4 && n <= 1e-4 && elapsed < Duration::from_secs(120),
            format!(
                "worst scaled error gradient {g:.2e}, newton {n:.2e} over 50 states each, {:.2}s",
                elapsed.as_secs_f64()
            ),
        ),
        Err(e) => report("2", false, e.to_string()),
    }
}

fn reproduction() -> Vec<Outcome> {
    let (result, elapsed) = timed(|| -> srcseek::Result<_> {
        let config = Config::default();
        let newton = run_simulate(&config.scenario_for(Scheme::Newton)?)?;
        let gradient = run_simulate(&config.scenario_for(Scheme::Gradient)?)?;
        Ok((config, newton.summary, gradient.summary))
    });
    let (config, n, g) = match result {
        Ok(v) => v,
        Err(e) => {
            return ["3a", "3b", "3c"]
                .into_iter()
                .map(|id| report(id, false, e.to_string()))
                .collect()
        }
    };
    let fast = elapsed < Duration::from_secs(60);
    let secs = elapsed.as_secs_f64();
    let th = config.thresholds;
    let fmt = |t: Option<f64>| t.map_or("never".to_string(), |t| format!("{t:.3}"));
    let dee_err = n.dee_error().unwrap_or(f64::INFINITY);
    let ordered = match (n.first_entry_time, g.first_entry_time) {
        (Some(a), Some(b)) => a < b,
        (Some(_), None) => true,
        _ => false,
    };
    vec![
        report(
            "3a",
            dee_err <= th.dee_tolerance && fast,
            format!(
                "trailing mean of d {:.4}, relative error {dee_err:.4} (tolerance {}), {secs:.2}s",
                n.dee_trailing_mean.unwrap_or(f64::NAN),
                th.dee_tolerance
            ),
        ),
        report(
            "3b",
            n.first_entry_time.is_some() && fast,
            format!(
                "newton entry into the {}-ball: {}; largest distance over the trailing window {:.4}; dither radius {:.4}; one-period average enters at {}",
                th.ball_radius,
                fmt(n.first_entry_time),
                n.trailing_max_distance,
                n.resolved.dither_radius,
                fmt(n.smoothed_entry_time)
            ),
        ),
        report(
            "3c",
            ordered && fast,
            format!(
                "entry times newton {} vs gradient {} (one-period averages {} vs {})",
                fmt(n.first_entry_time),
                fmt(g.first_entry_time),
                fmt(n.smoothed_entry_time),
                fmt(g.smoothed_entry_time)
            ),
        ),
    ]
}

fn named<'a>(checks: &'a [srcseek::experiments::Check], name: &str) -> Option<&'a srcseek::experiments::Check> {
    checks.iter().find(|c| c.name == name)
}

fn hessian_invariance() -> Outcome {
    match run_hessian_invariance(&Config::default()) {
        Ok(r) => {
            let n = named(&r.checks, "newton_rates_hessian_invariant");
            let g = named(&r.checks, "gradient_rates_scale_with_hessian");
            let reliable = r.rows.iter().all(|row| row.reliable);
            let passed = n.is_some_and(|c| c.passed) && g.is_some_and(|c| c.passed) && reliable;
            let detail = format!(
                "newton: {}; gradient: {}; all fits R² >= 0.9: {reliable}",
                n.map_or("missing", |c| &c.detail),
                g.map_or("missing", |c| &c.detail)
            );
            report("4", passed, detail)
        }
        Err(e) => report("4", false, e.to_string()),
    }
}

fn certificate() -> Outcome {
    let (result, elapsed) = timed(|| -> srcseek::Result<_> {
        let cert = build_certificate(2.0, 1.0, 0.3, 0.01)?;
        let expected = [[1.5, 0.5], [0.5, 1.0]];
        let mut p_err = 0.0f64;
        for (i, row) in expected.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                p_err = p_err.max((cert.p[(i, j)] - v).abs());
            }
        }
        let checks = cert.checks();
        let grid = grid_margins(&cert, 40, 5.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        let iss = (0..1000)
            .map(|_| {
                iss_bound_check(
                    rng.gen_range(-10.0..10.0),
                    [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
                    rng.gen_range(-2.0..2.0),
                    0.01,
                    1.0,
                    &cert,
                )
            })
            .fold(f64::INFINITY, f64::min);
        Ok((p_err, checks.lyapunov_residual, grid.max_vdot_margin, iss))
    });
    match result {
        Ok((p_err, res, vdot, iss)) => report(
            "5",
            p_err < 1e-12 && res < 1e-10 && vdot <= 1e-9 && iss >= -1e-9 && elapsed < Duration::from_secs(30),
            format!(
                "P error {p_err:.1e}, Lyapunov residual {res:.1e}, max vdot margin {vdot:.3e}, min ISS margin {iss:.3e}, {:.2}s",
                elapsed.as_secs_f64()
            ),
        ),
        Err(e) => report("5", false, e.to_string()),
    }
}

fn practical_stability() -> Outcome {
    let (result, elapsed) = timed(|| run_omega_sweep(&Config::default()));
    match result {
        Ok(r) => {
            let lines: Vec<String> = r
                .checks
                .iter()
                .filter(|c| c.name.ends_with("non_increasing"))
                .map(|c| format!("{} {}", c.name, c.detail))
                .collect();
            let passed = r.passed && elapsed < Duration::from_secs(300);
            report(
                "6",
                passed,
                format!("{}; {:.2}s", lines.join("; "), elapsed.as_secs_f64()),
            )
        }
        Err(e) => report("6", false, e.to_string()),
    }
}

fn rk4_reduction(scheme: Scheme) -> srcseek::Result<f64> {
    let config = Config::default();
    let sc = config.scenario_for(scheme)?;
    let cl = ClosedLoop::new(sc.scheme, sc.frame, sc.params, sc.field)?;
    let x0 = initial_state(&sc);
    let end = |h: f64| -> srcseek::Result<Vec<f64>> {
        let cfg = IntegratorConfig {
            dt: h,
            samples_per_period: 60,
            output_stride: 1,
        };
        let traj = integrate(|t, s, o| cl.eval(t, s, o), &x0, 0.0, 2.0, &cfg)?;
        Ok(traj.last_state().unwrap_or_default().to_vec())
    };
    let reference = end(0.01 / 16.0)?;
    let err = |h: f64| -> srcseek::Result<f64> {
        Ok(end(h)?
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    };
    Ok(err(0.01)? / err(0.005)?)
}

fn hygiene() -> Outcome {
    let result = (|| -> srcseek::Result<(f64, f64, f64)> {
        let g = rk4_reduction(Scheme::Gradient)?;
        let n = rk4_reduction(Scheme::Newton)?;
        let p = SeekerParams::default();
        let mut worst = 0.0f64;
        for h in [0.01, 0.1, 1.0] {
            let f = FieldParams {
                hessian: h,
                ..Default::default()
            };
            for scheme in [AveragedScheme::Gradient, AveragedScheme::Newton] {
                let lin = linearize_averaged(scheme, &p, &f)?;
                let r = spectrum_residual(&lin.jacobian, &lin.eigenvalues);
                worst = worst.max(r.trace).max(r.determinant);
                let block = position_block(scheme, &p, &f)?;
                let r = spectrum_residual(&block, &eigenvalues(&block)?);
                worst = worst.max(r.trace).max(r.determinant);
            }
        }
        Ok((g, n, worst))
    })();
    match result {
        Ok((g, n, worst)) => {
            let band = 12.0..=20.0;
            report(
                "7",
                band.contains(&g) && band.contains(&n) && worst < 1e-8,
                format!("RK4 error reduction gradient {g:.2}, newton {n:.2}; worst eigenvalue residual {worst:.1e}"),
            )
        }
        Err(e) => report("7", false, e.to_string()),
    }
}

fn main() -> ExitCode {
    let mut outcomes = vec![gamma_oracle(), engine_equivalence()];
    outcomes.extend(reproduction());
    outcomes.extend([hessian_invariance(), certificate(), practical_stability(), hygiene()]);
    for o in &outcomes {
        println!(
            "{} criterion {}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.detail
        );
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

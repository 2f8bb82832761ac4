use proptest::prelude::*;
use srcseek::experiments::simulate::{decode, integrate_scenario};
use srcseek::experiments::{estimate_rate, run_compare, run_simulate, Config, Scenario};
use srcseek::ode::{integrate, IntegratorConfig};
use srcseek::seekers::ClosedLoop;

fn scenario(text: &str) -> Scenario {
    Config::from_toml_str(text).unwrap().scenario().unwrap()
}

fn positions(sc: &Scenario) -> Vec<[f64; 2]> {
    let traj = integrate_scenario(sc).unwrap();
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| decode(sc, *t, s).0)
        .collect()
}

fn max_gap(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(p, q)| (p[0] - q[0]).hypot(p[1] - q[1]))
        .fold(0.0, f64::max)
}

#[test]
fn closed_loop_frames_trace_the_same_path() {
    for scheme in ["gradient", "newton"] {
        let base = format!("[scenario]\nscheme = \"{scheme}\"\nt_end = 10.0\nframe = ");
        let original = positions(&scenario(&format!("{base}\"original\"\n")));
        let rotating = positions(&scenario(&format!("{base}\"rotating_z\"\n")));
        let gap = max_gap(&original, &rotating);
        assert!(gap < 1e-6, "{scheme}: {gap}");
        if scheme == "newton" {
            // The log frame discretizes d differently: the gap is truncation
            // error and must fall at fourth order.
            let gap = |spp: usize| {
                let tail = format!("[integrator]\nsamples_per_period = {spp}\n");
                let a = positions(&scenario(&format!("{base}\"original\"\n{tail}")));
                let b = positions(&scenario(&format!("{base}\"rotating_z_log_d\"\n{tail}")));
                max_gap(&a, &b)
            };
            let (coarse, fine) = (gap(60), gap(120));
            assert!(coarse < 1e-4 && coarse / fine > 12.0, "{coarse} {fine}");
        }
    }
}

#[test]
fn averaged_newton_frames_trace_the_same_path() {
    let base = "[scenario]\nt_end = 30.0\nframe = ";
    let plain = positions(&scenario(&format!("{base}\"averaged_newton\"\n")));
    for frame in ["averaged_newton_exp", "cascade_shifted"] {
        let other = positions(&scenario(&format!("{base}\"{frame}\"\n")));
        assert!(max_gap(&plain, &other) < 1e-8, "{frame}");
    }
}

/// Error against a reference at dt/8, at dt and at dt/2.
fn rk4_reduction(sc: &Scenario, dt: f64) -> f64 {
    let cl = ClosedLoop::new(sc.scheme, sc.frame, sc.params, sc.field).unwrap();
    let x0 = srcseek::experiments::simulate::initial_state(sc);
    let end = |h: f64| {
        let cfg = IntegratorConfig {
            dt: h,
            samples_per_period: 60,
            output_stride: 1,
        };
        integrate(|t, s, o| cl.eval(t, s, o), &x0, 0.0, 2.0, &cfg)
            .unwrap()
            .last_state()
            .unwrap()
            .to_vec()
    };
    let reference = end(dt / 8.0);
    let err = |h: f64| {
        end(h)
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    err(dt) / err(dt / 2.0)
}

#[test]
fn rk4_error_falls_by_sixteen_on_the_closed_loop() {
    for scheme in ["gradient", "newton"] {
        let sc = scenario(&format!("[scenario]\nscheme = \"{scheme}\"\n"));
        let ratio = rk4_reduction(&sc, 0.01);
        assert!((12.0..=20.0).contains(&ratio), "{scheme}: {ratio}");
    }
}

#[test]
fn nominal_riccati_estimate_settles_at_the_inverse_hessian() {
    let sim = run_simulate(&scenario("")).unwrap();
    let err = sim.summary.dee_error().unwrap();
    assert!(err < 0.1, "{err}");
}

#[test]
fn unit_hessian_entry_times_are_comparable() {
    let c = Config::from_toml_str("[field]\nhessian = 1.0\n[thresholds]\nball_radius = 1.0\n").unwrap();
    let r = run_compare(&c).unwrap().report;
    let ratio = r.entry_ratio.expect("both schemes enter");
    assert!((0.5..=2.0).contains(&ratio), "{ratio}");
}

#[test]
fn compare_reports_are_reproducible() {
    let c = Config::from_toml_str("[scenario]\nt_end = 15.0\n").unwrap();
    let a = toml::to_string(&run_compare(&c).unwrap().report).unwrap();
    let b = toml::to_string(&run_compare(&c).unwrap().report).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rate_of_damped_oscillation_is_recovered(rate in 0.05f64..0.5, freq in 2.0f64..8.0, amp in 0.3f64..0.6) {
        let times: Vec<f64> = (0..=20_000).map(|i| i as f64 * 1e-3).collect();
        let s: Vec<f64> = times
            .iter()
            .map(|t| (-rate * t).exp() * (1.0 + amp * (freq * t).cos()))
            .collect();
        let fit = estimate_rate(&times, &s, [0.0, 20.0]).unwrap();
        prop_assert!(fit.envelope);
        prop_assert!((fit.rate - rate).abs() < 1e-3 * rate.max(1.0), "{} vs {}", fit.rate, rate);
        prop_assert!(fit.reliable());
    }

    #[test]
    fn config_round_trips(omega in 5.0f64..50.0, h in 1e-3f64..10.0, t_end in 1.0f64..100.0, r in 0.1f64..2.0) {
        let text = format!(
            "[scenario]\nt_end = {t_end}\n[params]\nomega = {omega}\n[field]\nhessian = {h}\n[thresholds]\nball_radius = {r}\n"
        );
        let c = Config::from_toml_str(&text).unwrap();
        let back = Config::from_toml_str(&c.to_toml().unwrap()).unwrap();
        prop_assert_eq!(c, back);
    }
}

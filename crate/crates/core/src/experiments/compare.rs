use serde::Serialize;

use super::check::{all_pass, Check};
use super::config::Config;
use super::simulate::{run_simulate, RunSummary, Simulation};
use crate::error::Result;
use crate::seekers::{Frame, Scheme};

/// Outcome of one scheme; a failed run does not abort the comparison.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeOutcome {
    pub scheme: Scheme,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<RunSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub passed: bool,
    pub ball_radius: f64,
    /// Newton entry time over gradient entry time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothed_entry_ratio: Option<f64>,
    pub checks: Vec<Check>,
    pub gradient: SchemeOutcome,
    pub newton: SchemeOutcome,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub report: CompareReport,
    pub gradient: Option<Simulation>,
    pub newton: Option<Simulation>,
}

/// The frame of `scheme` that corresponds to `frame`.
pub fn counterpart(frame: Frame, scheme: Scheme) -> Frame {
    match (scheme, frame) {
        (_, Frame::Original) => Frame::Original,
        (Scheme::Gradient, Frame::RotatingZ | Frame::RotatingZLogD) => Frame::RotatingZ,
        (Scheme::Newton, Frame::RotatingZ) => Frame::RotatingZ,
        (Scheme::Gradient, _) => Frame::AveragedGradient,
        (Scheme::Newton, Frame::AveragedGradient) => Frame::AveragedNewton,
        (Scheme::Newton, f) => f,
    }
}

fn run(config: &Config, scheme: Scheme) -> (SchemeOutcome, Option<Simulation>) {
    let mut c = config.clone();
    c.scenario.frame = counterpart(c.scenario.frame, scheme);
    match c.scenario_for(scheme).and_then(|sc| run_simulate(&sc)) {
        Ok(sim) => (
            SchemeOutcome {
                scheme,
                summary: Some(sim.summary.clone()),
                error: None,
            },
            Some(sim),
        ),
        Err(e) => (
            SchemeOutcome {
                scheme,
                summary: None,
                error: Some(e.to_string()),
            },
            None,
        ),
    }
}

fn ratio(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    }
}

fn fmt_time(t: Option<f64>) -> String {
    t.map_or_else(|| "never".to_string(), |t| format!("{t:.4}"))
}

/// Gradient and Newton seekers on identical field, parameters and start.
pub fn run_compare(config: &Config) -> Result<Comparison> {
    config.validate()?;
    let ((gradient, g_sim), (newton, n_sim)) =
        rayon::join(|| run(config, Scheme::Gradient), || run(config, Scheme::Newton));
    let th = config.thresholds;
    let g = gradient.summary.as_ref();
    let n = newton.summary.as_ref();
    let g_entry = g.and_then(|s| s.first_entry_time);
    let n_entry = n.and_then(|s| s.first_entry_time);

    let mut checks = Vec::new();
    if let Some(err) = &gradient.error {
        checks.push(Check::new("gradient_run", false, err.clone()));
    }
    if let Some(err) = &newton.error {
        checks.push(Check::new("newton_run", false, err.clone()));
    }
    if let Some(n) = n {
        checks.extend(n.checks(th.dee_tolerance));
    }
    if n.is_some() && g.is_some() {
        let faster = match (n_entry, g_entry) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            _ => false,
        };
        checks.push(Check::new(
            "newton_faster",
            faster,
            format!("newton {} vs gradient {}", fmt_time(n_entry), fmt_time(g_entry)),
        ));
    }
    let report = CompareReport {
        passed: all_pass(&checks),
        ball_radius: th.ball_radius,
        entry_ratio: ratio(n_entry, g_entry),
        smoothed_entry_ratio: ratio(
            n.and_then(|s| s.smoothed_entry_time),
            g.and_then(|s| s.smoothed_entry_time),
        ),
        checks,
        gradient,
        newton,
    };
    Ok(Comparison {
        report,
        gradient: g_sim,
        newton: n_sim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterparts_are_supported() {
        use Frame::*;
        for f in [
            Original,
            RotatingZ,
            RotatingZLogD,
            CascadeShifted,
            AveragedGradient,
            AveragedNewton,
            AveragedNewtonExp,
        ] {
            for s in [Scheme::Gradient, Scheme::Newton] {
                assert!(counterpart(f, s).supports(s), "{f} {s}");
            }
            if f.supports(Scheme::Newton) {
                assert_eq!(counterpart(f, Scheme::Newton), f);
            }
        }
    }

    #[test]
    fn averaged_comparison_is_deterministic() {
        let text = "[scenario]\nframe = \"averaged_newton\"\nt_end = 20.0\n[field]\nhessian = 1.0\n";
        let c = Config::from_toml_str(text).unwrap();
        let a = run_compare(&c).unwrap();
        let b = run_compare(&c).unwrap();
        assert_eq!(toml::to_string(&a.report).unwrap(), toml::to_string(&b.report).unwrap());
        assert!(a.report.gradient.error.is_none() && a.report.newton.error.is_none());
    }
}

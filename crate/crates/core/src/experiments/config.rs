//! TOML run configuration. Every key is optional and defaults to the nominal
//! scenario: ω = 15, ω0 = 1, α = 2, p = 0.61, h = 1, ω_d = 0.3, F* = 5,
//! H = 0.01, x* = (1, −1), x(0) = (4, −4), ν(0) = 0, d(0) = 1.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FieldParams, SeekerParams};
use crate::ode::{IntegratorConfig, DEFAULT_SAMPLES_PER_PERIOD};
use crate::seekers::{Frame, Scheme};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub scheme: Scheme,
    pub frame: Frame,
    pub t_end: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            scheme: Scheme::Newton,
            frame: Frame::Original,
            t_end: 50.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialState {
    pub position: [f64; 2],
    pub heading: f64,
    pub nu: f64,
    pub dee: f64,
}

impl Default for InitialState {
    fn default() -> Self {
        Self {
            position: [4.0, -4.0],
            heading: 0.0,
            nu: 0.0,
            dee: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub samples_per_period: usize,
    pub output_stride: usize,
    /// Explicit step; must resolve the fastest oscillation.
    pub dt: Option<f64>,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            samples_per_period: DEFAULT_SAMPLES_PER_PERIOD,
            output_stride: 10,
            dt: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Radius of the convergence ball around the source.
    pub ball_radius: f64,
    /// Relative tolerance of the trailing mean of d against 1/H.
    pub dee_tolerance: f64,
    /// Length of the trailing window for the mean of d.
    pub trailing_window: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            ball_radius: 0.5,
            dee_tolerance: 0.1,
            trailing_window: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OmegaSweepSection {
    pub omegas: Vec<f64>,
    pub t_end: f64,
    /// Fraction of the horizon used for the residual-ball radius.
    pub tail_fraction: f64,
    /// Allowed relative increase between successive rows.
    pub slack: f64,
}

impl Default for OmegaSweepSection {
    fn default() -> Self {
        Self {
            omegas: vec![20.0, 40.0, 80.0],
            t_end: 30.0,
            tail_fraction: 0.25,
            slack: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HessianSweepSection {
    pub hessians: Vec<f64>,
    /// Fit window for the Newton rates, after the Riccati transient.
    pub newton_window: [f64; 2],
    pub gradient_window: [f64; 2],
    pub dt: f64,
    pub newton_tolerance: f64,
    pub gradient_tolerance: f64,
    /// Two amplitudes for the Newton α-scaling check.
    pub alpha_pair: [f64; 2],
}

impl Default for HessianSweepSection {
    fn default() -> Self {
        Self {
            hessians: vec![0.01, 0.1, 1.0],
            newton_window: [40.0, 80.0],
            gradient_window: [0.0, 600.0],
            dt: 0.01,
            newton_tolerance: 0.1,
            gradient_tolerance: 0.15,
            alpha_pair: [1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioSection,
    pub field: FieldSection,
    pub params: ParamsSection,
    pub initial: InitialState,
    pub integrator: IntegratorSection,
    pub thresholds: Thresholds,
    pub sweep_omega: OmegaSweepSection,
    pub sweep_hessian: HessianSweepSection,
}

/// [`FieldParams`] with per-key defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSection {
    pub f_star: f64,
    pub hessian: f64,
    pub source: [f64; 2],
}

impl Default for FieldSection {
    fn default() -> Self {
        let f = FieldParams::default();
        Self {
            f_star: f.f_star,
            hessian: f.hessian,
            source: f.source,
        }
    }
}

impl From<FieldSection> for FieldParams {
    fn from(s: FieldSection) -> Self {
        FieldParams {
            f_star: s.f_star,
            hessian: s.hessian,
            source: s.source,
        }
    }
}

/// [`SeekerParams`] with per-key defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub omega: f64,
    pub omega0: f64,
    pub alpha: f64,
    pub p_exp: f64,
    pub h_gain: f64,
    pub omega_d: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        let p = SeekerParams::default();
        Self {
            omega: p.omega,
            omega0: p.omega0,
            alpha: p.alpha,
            p_exp: p.p_exp,
            h_gain: p.h_gain,
            omega_d: p.omega_d,
        }
    }
}

impl From<ParamsSection> for SeekerParams {
    fn from(s: ParamsSection) -> Self {
        SeekerParams {
            omega: s.omega,
            omega0: s.omega0,
            alpha: s.alpha,
            p_exp: s.p_exp,
            h_gain: s.h_gain,
            omega_d: s.omega_d,
        }
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("`{name}` must be finite and > 0, got {v}")))
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn field_params(&self) -> FieldParams {
        self.field.into()
    }

    pub fn seeker_params(&self) -> SeekerParams {
        self.params.into()
    }

    /// Checks every section; all failures map to [`Error::Config`].
    pub fn validate(&self) -> Result<()> {
        self.scenario_for(self.scenario.scheme)?;
        let t = &self.thresholds;
        positive("thresholds.ball_radius", t.ball_radius)?;
        positive("thresholds.dee_tolerance", t.dee_tolerance)?;
        positive("thresholds.trailing_window", t.trailing_window)?;

        let s = &self.sweep_omega;
        if s.omegas.len() < 3 {
            return Err(Error::Config(format!(
                "`sweep_omega.omegas` needs at least 3 entries, got {}",
                s.omegas.len()
            )));
        }
        for w in &s.omegas {
            positive("sweep_omega.omegas", *w)?;
        }
        if s.omegas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("`sweep_omega.omegas` must be strictly increasing".into()));
        }
        positive("sweep_omega.t_end", s.t_end)?;
        if !(s.tail_fraction > 0.0 && s.tail_fraction <= 1.0) {
            return Err(Error::Config("`sweep_omega.tail_fraction` must lie in (0, 1]".into()));
        }
        if !(s.slack >= 0.0) {
            return Err(Error::Config("`sweep_omega.slack` must be >= 0".into()));
        }

        let h = &self.sweep_hessian;
        if h.hessians.len() < 2 {
            return Err(Error::Config(
                "`sweep_hessian.hessians` needs at least 2 entries".into(),
            ));
        }
        for v in &h.hessians {
            positive("sweep_hessian.hessians", *v)?;
        }
        let (lo, hi) = h
            .hessians
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        if hi / lo < 100.0 * (1.0 - 1e-12) {
            return Err(Error::Config(format!(
                "`sweep_hessian.hessians` must span at least two decades, got {lo}..{hi}"
            )));
        }
        for (name, w) in [
            ("newton_window", h.newton_window),
            ("gradient_window", h.gradient_window),
        ] {
            if !(w[0] >= 0.0 && w[1] > w[0] && w[1].is_finite()) {
                return Err(Error::Config(format!(
                    "`sweep_hessian.{name}` must satisfy 0 <= start < end"
                )));
            }
        }
        positive("sweep_hessian.dt", h.dt)?;
        positive("sweep_hessian.newton_tolerance", h.newton_tolerance)?;
        positive("sweep_hessian.gradient_tolerance", h.gradient_tolerance)?;
        for a in h.alpha_pair {
            positive("sweep_hessian.alpha_pair", a)?;
        }
        Ok(())
    }

    /// The configured scenario with its scheme replaced by `scheme`.
    pub fn scenario_for(&self, scheme: Scheme) -> Result<Scenario> {
        let sc = Scenario {
            scheme,
            frame: self.scenario.frame,
            field: self.field_params(),
            params: self.seeker_params(),
            initial: self.initial,
            t_end: self.scenario.t_end,
            integrator: self.integrator,
            thresholds: self.thresholds,
        };
        sc.validate().map_err(config_err)?;
        Ok(sc)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        self.scenario_for(self.scenario.scheme)
    }
}

/// One fully resolved closed-loop or averaged run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub scheme: Scheme,
    pub frame: Frame,
    pub field: FieldParams,
    pub params: SeekerParams,
    pub initial: InitialState,
    pub t_end: f64,
    pub integrator: IntegratorSection,
    pub thresholds: Thresholds,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.field.validate()?;
        if !self.frame.supports(self.scheme) {
            return Err(Error::IncompatibleFrame {
                scheme: self.scheme.to_string(),
                frame: self.frame.to_string(),
            });
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::invalid(
                "t_end",
                format!("horizon must be finite and > 0, got {}", self.t_end),
            ));
        }
        let i = &self.initial;
        if !(i.position.iter().all(|v| v.is_finite()) && i.heading.is_finite() && i.nu.is_finite()) {
            return Err(Error::invalid("initial", "initial state must be finite"));
        }
        if self.scheme == Scheme::Newton && !(i.dee.is_finite() && i.dee > 0.0) {
            return Err(Error::invalid(
                "initial.dee",
                format!(
                    "the Newton scheme requires d(0) > 0 (the Riccati estimate converges to 1/H only from the d > 0 basin), got {}",
                    i.dee
                ),
            ));
        }
        if self.frame != Frame::Original && i.heading != 0.0 {
            return Err(Error::invalid(
                "initial.heading",
                "frames other than `original` eliminate the heading as θ = ω0 t and need θ(0) = 0",
            ));
        }
        self.integrator_config()?;
        Ok(())
    }

    /// Fastest oscillation in the closed loop: `2ω` with the Riccati
    /// demodulation, `ω` otherwise.
    pub fn omega_max(&self) -> f64 {
        match self.scheme {
            Scheme::Newton => 2.0 * self.params.omega,
            Scheme::Gradient => self.params.omega,
        }
    }

    pub fn integrator_config(&self) -> Result<IntegratorConfig> {
        let s = &self.integrator;
        let mut cfg = IntegratorConfig::for_frequency(self.omega_max(), s.samples_per_period, s.output_stride)?;
        if let Some(dt) = s.dt {
            cfg.dt = dt;
            cfg.validate(Some(self.omega_max()))?;
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_nominal_defaults() {
        let c = Config::from_toml_str("").unwrap();
        assert_eq!(c.seeker_params(), SeekerParams::default());
        assert_eq!(c.field_params(), FieldParams::default());
        assert_eq!(c.initial.position, [4.0, -4.0]);
        assert_eq!(c.initial.dee, 1.0);
        assert_eq!(c.thresholds.ball_radius, 0.5);
        assert_eq!(c.sweep_omega.omegas, vec![20.0, 40.0, 80.0]);
    }

    #[test]
    fn round_trip() {
        let c = Config::default();
        let back = Config::from_toml_str(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let c = Config::from_toml_str("[params]\nomega = 40.0\n[field]\nhessian = 1.0\n").unwrap();
        assert_eq!(c.params.omega, 40.0);
        assert_eq!(c.params.alpha, 2.0);
        assert_eq!(c.field.hessian, 1.0);
        assert_eq!(c.field.f_star, 5.0);
    }

    #[test]
    fn rejections_name_the_field() {
        let cases = [
            ("[initial]\ndee = 0.0\n", "initial.dee"),
            ("[initial]\ndee = -1.0\n", "d(0) > 0"),
            ("[scenario]\nt_end = 0.0\n", "t_end"),
            ("[params]\np_exp = 0.4\n", "p_exp"),
            ("[field]\nhessian = -1.0\n", "hessian"),
            (
                "[scenario]\nscheme = \"gradient\"\nframe = \"cascade_shifted\"\n",
                "cascade_shifted",
            ),
            ("[sweep_omega]\nomegas = [20.0, 10.0, 80.0]\n", "increasing"),
            ("[sweep_omega]\nomegas = [20.0, 40.0]\n", "at least 3"),
            ("[sweep_hessian]\nhessians = [0.1, 1.0]\n", "two decades"),
            ("[integrator]\nsamples_per_period = 10\n", "samples_per_period"),
            ("[integrator]\ndt = 0.1\n", "dt"),
            ("[params]\nomgea = 3.0\n", "omgea"),
            (
                "[scenario]\nframe = \"rotating_z\"\n[initial]\nheading = 0.3\n",
                "heading",
            ),
            ("not toml at all = = =", ""),
        ];
        for (text, needle) in cases {
            match Config::from_toml_str(text) {
                Err(Error::Config(msg)) => assert!(msg.contains(needle), "{text:?}: {msg}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn gradient_ignores_dee() {
        let c = Config::from_toml_str("[scenario]\nscheme = \"gradient\"\n[initial]\ndee = 0.0\n").unwrap();
        assert_eq!(c.scenario().unwrap().scheme, Scheme::Gradient);
        assert!(c.scenario_for(Scheme::Newton).is_err());
    }
}

//! Linearizations of the averaged seekers, the Lyapunov certificate of the
//! Newton cascade and the filter-error ISS bound.

mod certificate;
mod linearize;

use nalgebra::{DMatrix, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use certificate::{
    build_certificate, cascade_matrix, filter_error_rate, g_norm_sq_closed_form, grid_margins, iss_bound_check,
    iss_gain, lambda_min_closed_form, lambda_tilde, lyapunov_v, lyapunov_vdot, vdot_bound, vdot_margin,
    CertificateChecks, GridMargins, LyapunovCertificate,
};
pub use linearize::{eigenvalues, linearize, spectrum_residual, Linearization, SpectrumResidual};

use crate::averaging::FdStep;
use crate::error::{Error, Result};
use crate::model::{FieldParams, SeekerParams};
use crate::seekers::{AveragedScheme, AveragedSystem};

/// Equilibrium of the averaged system: the source, `d̄ = 1/H`, `ν̄ = F*`.
pub fn averaged_equilibrium(scheme: AveragedScheme, field: &FieldParams) -> Result<Vec<f64>> {
    match scheme {
        AveragedScheme::Gradient => Ok(vec![0.0, 0.0, field.f_star]),
        AveragedScheme::Newton => Ok(vec![0.0, 0.0, field.inverse_hessian(), field.f_star]),
        AveragedScheme::NewtonExp => Ok(vec![0.0, 0.0, -field.hessian.ln(), field.f_star]),
        AveragedScheme::NewtonCascade => Ok(vec![0.0; 4]),
    }
}

/// Analytic Jacobian of the averaged gradient or Newton system at `state`.
pub fn averaged_jacobian(
    scheme: AveragedScheme,
    state: &[f64],
    params: &SeekerParams,
    field: &FieldParams,
) -> Result<DMatrix<f64>> {
    let (w0, a, h, hs) = (params.omega0, params.alpha, params.h_gain, field.hessian);
    match scheme {
        AveragedScheme::Gradient => {
            let (z1, z2) = (state[0], state[1]);
            Ok(DMatrix::from_row_slice(
                3,
                3,
                &[0.0, w0, 0.0, -w0, -a * hs / 2.0, 0.0, -h * hs * z1, -h * hs * z2, -h],
            ))
        }
        AveragedScheme::Newton => {
            let (z1, z2, d) = (state[0], state[1], state[2]);
            #[rustfmt::skip]
            let m = DMatrix::from_row_slice(4, 4, &[
                0.0, w0, 0.0, 0.0,
                -w0, -a * hs * d / 2.0, -a * hs * z2 / 2.0, 0.0,
                0.0, 0.0, params.omega_d * (1.0 - 2.0 * hs * d), 0.0,
                -h * hs * z1, -h * hs * z2, 0.0, -h,
            ]);
            Ok(m)
        }
        other => Err(Error::IncompatibleFrame {
            scheme: other.scheme().to_string(),
            frame: other.frame().to_string(),
        }),
    }
}

/// Finite-difference linearization of an averaged system at its equilibrium.
pub fn linearize_averaged(scheme: AveragedScheme, params: &SeekerParams, field: &FieldParams) -> Result<Linearization> {
    let sys = AveragedSystem::new(scheme, *params, *field)?;
    let f = move |x: &[f64]| {
        let mut out = vec![0.0; x.len()];
        sys.eval(x, &mut out);
        out
    };
    linearize(&f, &averaged_equilibrium(scheme, field)?, FdStep::Optimal)
}

/// Position block `[[0, ω0], [−ω0, −αH d̄/2]]` of the averaged linearization.
pub fn position_block(scheme: AveragedScheme, params: &SeekerParams, field: &FieldParams) -> Result<DMatrix<f64>> {
    let eq = averaged_equilibrium(scheme, field)?;
    let j = averaged_jacobian(scheme, &eq, params, field)?;
    Ok(j.view((0, 0), (2, 2)).into_owned())
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearizationRow {
    pub scheme: String,
    pub equilibrium: Vec<f64>,
    pub jacobian: Vec<Vec<f64>>,
    pub eigenvalues: Vec<[f64; 2]>,
    pub trace_residual: f64,
    pub determinant_residual: f64,
    pub spectral_abscissa: f64,
    /// Real part of the position block from its trace.
    pub block_real_part: f64,
    /// Commonly quoted closed form `−αH/2` (gradient) or `−α/2` (Newton).
    pub quoted_real_part: f64,
    pub quoted_consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HessianRow {
    pub hessian: f64,
    pub gradient_abscissa: f64,
    pub newton_block_eigenvalues: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSection {
    pub alpha: f64,
    pub omega0: f64,
    pub omega_d: f64,
    pub p: [[f64; 2]; 2],
    pub g: [[f64; 2]; 2],
    pub b: f64,
    pub lambda_min_p: f64,
    pub g_norm_sq: f64,
    pub checks: CertificateChecks,
}

#[derive(Debug, Clone, Serialize)]
pub struct IssSection {
    pub points: usize,
    pub min_margin: f64,
    pub gain_monotone: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SoundnessSection {
    pub trials: usize,
    pub all_pass: bool,
    pub worst_vdot_margin: f64,
}

/// Structured summary of every stability check at one parameter set.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub passed: bool,
    pub certificate: CertificateSection,
    pub grid: GridMargins,
    pub iss: IssSection,
    pub soundness: SoundnessSection,
    pub linearization: Vec<LinearizationRow>,
    pub hessian_sweep: Vec<HessianRow>,
    /// Spread of Newton block eigenvalues across the sweep.
    pub newton_block_spread: f64,
    /// Largest deviation of gradient abscissa ratios from Hessian ratios.
    pub gradient_ratio_error: f64,
}

impl StabilityReport {
    pub fn to_text(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Seed of the sampled checks when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed;
pub const GRID_POINTS: usize = 40;
pub const GRID_Z: f64 = 5.0;
pub const GRID_D: f64 = 2.0;
pub const VDOT_TOL: f64 = 1e-9;
pub const ISS_TOL: f64 = 1e-9;
pub const ISS_SAMPLES: usize = 1000;
pub const SOUNDNESS_TRIALS: usize = 20;
pub const HESSIAN_RATIO_TOL: f64 = 0.05;

fn rows(m: &Matrix2<f64>) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn linearization_row(scheme: AveragedScheme, params: &SeekerParams, field: &FieldParams) -> Result<LinearizationRow> {
    let lin = linearize_averaged(scheme, params, field)?;
    let res = spectrum_residual(&lin.jacobian, &lin.eigenvalues);
    let block = position_block(scheme, params, field)?;
    let block_real_part = block.trace() / 2.0;
    let quoted_real_part = match scheme {
        AveragedScheme::Gradient => -params.alpha * field.hessian / 2.0,
        _ => -params.alpha / 2.0,
    };
    Ok(LinearizationRow {
        scheme: format!("{:?}", scheme).to_lowercase(),
        equilibrium: lin.equilibrium.clone(),
        jacobian: lin.jacobian.row_iter().map(|r| r.iter().copied().collect()).collect(),
        eigenvalues: lin.eigen_pairs(),
        trace_residual: res.trace,
        determinant_residual: res.determinant,
        spectral_abscissa: lin.spectral_abscissa(),
        block_real_part,
        quoted_real_part,
        quoted_consistent: (quoted_real_part - block_real_part).abs() <= 1e-9 * block_real_part.abs().max(1e-12),
    })
}

/// Runs the certificate, grid, ISS, soundness, linearization and Hessian
/// checks at `params`, using `hessians` for the Hessian sweep.
pub fn certify(params: &SeekerParams, field: &FieldParams, hessians: &[f64], seed: u64) -> Result<StabilityReport> {
    params.validate()?;
    field.validate()?;
    let cert = build_certificate(params.alpha, params.omega0, params.omega_d, field.hessian)?;
    let checks = cert.checks();
    let grid = grid_margins(&cert, GRID_POINTS, GRID_Z, GRID_D);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_margin = f64::INFINITY;
    for _ in 0..ISS_SAMPLES {
        let r = rng.gen_range(-20.0..20.0);
        let z = [rng.gen_range(-GRID_Z..GRID_Z), rng.gen_range(-GRID_Z..GRID_Z)];
        let d = rng.gen_range(-GRID_D..GRID_D);
        min_margin = min_margin.min(iss_bound_check(r, z, d, field.hessian, params.h_gain, &cert));
    }
    let gains: Vec<f64> = (0..200).map(|i| iss_gain(i as f64 * 0.05, &cert)).collect();
    let gain_monotone = gains[0] == 0.0 && gains.windows(2).all(|w| w[1] > w[0]);
    let iss = IssSection {
        points: ISS_SAMPLES,
        min_margin,
        gain_monotone,
    };

    let mut all_pass = true;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..SOUNDNESS_TRIALS {
        let (a, w0, wd) = (
            rng.gen_range(0.5..5.0),
            rng.gen_range(0.5..5.0),
            rng.gen_range(0.5..5.0),
        );
        let c = build_certificate(a, w0, wd, field.hessian)?;
        let m = grid_margins(&c, GRID_POINTS, GRID_Z, GRID_D);
        worst = worst.max(m.max_vdot_margin);
        all_pass &= c.checks().pass() && m.max_vdot_margin <= VDOT_TOL;
    }
    let soundness = SoundnessSection {
        trials: SOUNDNESS_TRIALS,
        all_pass,
        worst_vdot_margin: worst,
    };

    let linearization = vec![
        linearization_row(AveragedScheme::Gradient, params, field)?,
        linearization_row(AveragedScheme::Newton, params, field)?,
    ];

    let mut hessian_sweep = Vec::new();
    for &h in hessians {
        let f = FieldParams { hessian: h, ..*field };
        f.validate()?;
        let g = eigenvalues(&position_block(AveragedScheme::Gradient, params, &f)?)?;
        let n = eigenvalues(&position_block(AveragedScheme::Newton, params, &f)?)?;
        hessian_sweep.push(HessianRow {
            hessian: h,
            gradient_abscissa: g.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max),
            newton_block_eigenvalues: n.iter().map(|l| [l.re, l.im]).collect(),
        });
    }
    let mut newton_block_spread = 0.0f64;
    let mut gradient_ratio_error = 0.0f64;
    if let Some(first) = hessian_sweep.first() {
        for row in &hessian_sweep {
            for (a, b) in row.newton_block_eigenvalues.iter().zip(&first.newton_block_eigenvalues) {
                newton_block_spread = newton_block_spread.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
            }
            let ratio = row.gradient_abscissa / first.gradient_abscissa;
            let expected = row.hessian / first.hessian;
            gradient_ratio_error = gradient_ratio_error.max((ratio / expected - 1.0).abs());
        }
    }

    let linear_ok = linearization.iter().all(|l| l.spectral_abscissa < 0.0);
    let passed = checks.pass()
        && grid.max_vdot_margin <= VDOT_TOL
        && grid.max_vdot_nonzero < 0.0
        && grid.min_v_nonzero > 0.0
        && iss.min_margin >= -ISS_TOL
        && iss.gain_monotone
        && soundness.all_pass
        && linear_ok
        && newton_block_spread <= 1e-12
        && gradient_ratio_error <= HESSIAN_RATIO_TOL;

    Ok(StabilityReport {
        passed,
        certificate: CertificateSection {
            alpha: cert.alpha,
            omega0: cert.omega0,
            omega_d: cert.omega_d,
            p: rows(&cert.p),
            g: rows(&cert.g),
            b: cert.b,
            lambda_min_p: cert.lambda_min_p,
            g_norm_sq: cert.g_norm_sq,
            checks,
        },
        grid,
        iss,
        soundness,
        linearization,
        hessian_sweep,
        newton_block_spread,
        gradient_ratio_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let p = SeekerParams::default();
        let f = FieldParams::default();
        for scheme in [AveragedScheme::Gradient, AveragedScheme::Newton] {
            let lin = linearize_averaged(scheme, &p, &f).unwrap();
            let exact = averaged_jacobian(scheme, &lin.equilibrium, &p, &f).unwrap();
            assert!((lin.jacobian - exact).abs().max() < 1e-6);
        }
    }

    #[test]
    fn cascade_has_no_analytic_jacobian_here() {
        let p = SeekerParams::default();
        let f = FieldParams::default();
        assert!(averaged_jacobian(AveragedScheme::NewtonCascade, &[0.0; 4], &p, &f).is_err());
    }
}

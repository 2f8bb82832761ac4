//! Lyapunov certificate for the shifted Newton cascade
//!
//! ```text
//! z̄' = (J0 + Λ̃ e^d̂) z̄,   d̂' = -ω_d (e^d̂ - 1),   Λ̃ = diag(0, -α/2)
//! V  = ln(1 + z̄ᵀPz̄) + (b/ω_d)(e^d̂ - d̂ - 1)
//! ```
//!
//! with `P(J0 + Λ̃) + (J0 + Λ̃)ᵀP = -I`, `G = PΛ̃ + Λ̃P` and
//! `b = ‖G‖² / (2 λ_min(P))`.

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};

pub const LYAPUNOV_TOL: f64 = 1e-10;
pub const CLOSED_FORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovCertificate {
    pub p: Matrix2<f64>,
    pub g: Matrix2<f64>,
    pub b: f64,
    pub alpha: f64,
    pub omega0: f64,
    pub omega_d: f64,
    pub hessian: f64,
    pub lambda_min_p: f64,
    pub g_norm_sq: f64,
}

/// Residuals of the certificate invariants.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CertificateChecks {
    pub lyapunov_residual: f64,
    pub symmetry_residual: f64,
    pub lambda_min_closed_form: f64,
    pub lambda_min_error: f64,
    pub g_norm_sq_closed_form: f64,
    pub g_norm_sq_error: f64,
}

impl CertificateChecks {
    pub fn pass(&self) -> bool {
        self.lyapunov_residual < LYAPUNOV_TOL
            && self.symmetry_residual == 0.0
            && self.lambda_min_error < CLOSED_FORM_TOL * self.lambda_min_closed_form.max(1.0)
            && self.g_norm_sq_error < CLOSED_FORM_TOL * self.g_norm_sq_closed_form.max(1.0) * 10.0
    }
}

pub fn lambda_tilde(alpha: f64) -> Matrix2<f64> {
    Matrix2::new(0.0, 0.0, 0.0, -alpha / 2.0)
}

/// `J0 + Λ̃`.
pub fn cascade_matrix(alpha: f64, omega0: f64) -> Matrix2<f64> {
    Matrix2::new(0.0, omega0, -omega0, -alpha / 2.0)
}

/// `2/α + α/(8ω0²) − (1/(2ω0²)) √(α²/16 + ω0²)`.
pub fn lambda_min_closed_form(alpha: f64, omega0: f64) -> f64 {
    let w2 = omega0 * omega0;
    2.0 / alpha + alpha / (8.0 * w2) - (alpha * alpha / 16.0 + w2).sqrt() / (2.0 * w2)
}

/// `2 + α²/(16ω0²) + (1/(2ω0)) √(α² + 16ω0²)`.
pub fn g_norm_sq_closed_form(alpha: f64, omega0: f64) -> f64 {
    2.0 + alpha * alpha / (16.0 * omega0 * omega0) + (alpha * alpha + 16.0 * omega0 * omega0).sqrt() / (2.0 * omega0)
}

fn spectral_norm_sym(m: &Matrix2<f64>) -> f64 {
    let e = SymmetricEigen::new(*m).eigenvalues;
    e[0].abs().max(e[1].abs())
}

pub fn build_certificate(alpha: f64, omega0: f64, omega_d: f64, hessian: f64) -> Result<LyapunovCertificate> {
    for (name, v) in [
        ("alpha", alpha),
        ("omega0", omega0),
        ("omega_d", omega_d),
        ("hessian", hessian),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
        }
    }
    let w2 = omega0 * omega0;
    let off = 1.0 / (2.0 * omega0);
    let p = Matrix2::new(alpha / (4.0 * w2) + 2.0 / alpha, off, off, 2.0 / alpha);
    let lt = lambda_tilde(alpha);
    let g = p * lt + lt * p;
    let eig = SymmetricEigen::new(p).eigenvalues;
    let lambda_min_p = eig[0].min(eig[1]);
    if !(lambda_min_p > 0.0) {
        return Err(Error::Rejected(format!(
            "P is not positive definite (λ_min = {lambda_min_p:e})"
        )));
    }
    let gn = spectral_norm_sym(&g);
    let g_norm_sq = gn * gn;
    Ok(LyapunovCertificate {
        p,
        g,
        b: g_norm_sq / (2.0 * lambda_min_p),
        alpha,
        omega0,
        omega_d,
        hessian,
        lambda_min_p,
        g_norm_sq,
    })
}

impl LyapunovCertificate {
    pub fn checks(&self) -> CertificateChecks {
        let a = cascade_matrix(self.alpha, self.omega0);
        let res = self.p * a + a.transpose() * self.p + Matrix2::identity();
        let lm = lambda_min_closed_form(self.alpha, self.omega0);
        let gs = g_norm_sq_closed_form(self.alpha, self.omega0);
        CertificateChecks {
            lyapunov_residual: res.abs().max(),
            symmetry_residual: (self.p - self.p.transpose()).abs().max(),
            lambda_min_closed_form: lm,
            lambda_min_error: (lm - self.lambda_min_p).abs(),
            g_norm_sq_closed_form: gs,
            g_norm_sq_error: (gs - self.g_norm_sq).abs(),
        }
    }

    fn quad(&self, z: [f64; 2]) -> f64 {
        let v = Vector2::new(z[0], z[1]);
        (v.transpose() * self.p * v)[(0, 0)]
    }
}

pub fn lyapunov_v(z_bar: [f64; 2], d_hat: f64, cert: &LyapunovCertificate) -> f64 {
    // e^d̂ - d̂ - 1 without cancellation near zero
    let tail = d_hat.exp_m1() - d_hat;
    cert.quad(z_bar).ln_1p() + cert.b / cert.omega_d * tail
}

/// `V̇` along the cascade by the chain rule.
pub fn lyapunov_vdot(z_bar: [f64; 2], d_hat: f64, cert: &LyapunovCertificate) -> f64 {
    let z = Vector2::new(z_bar[0], z_bar[1]);
    let e = d_hat.exp_m1();
    let zdot = (cascade_matrix(cert.alpha, cert.omega0) + lambda_tilde(cert.alpha) * e) * z;
    let quad_dot = 2.0 * (z.transpose() * cert.p * zdot)[(0, 0)];
    let d_dot = -cert.omega_d * e;
    quad_dot / (1.0 + cert.quad(z_bar)) + cert.b / cert.omega_d * e * d_dot
}

/// `(−½|z̄|² − b(e^d̂ − 1)²) / (1 + z̄ᵀPz̄)`.
pub fn vdot_bound(z_bar: [f64; 2], d_hat: f64, cert: &LyapunovCertificate) -> f64 {
    let e = d_hat.exp_m1();
    let zz = z_bar[0] * z_bar[0] + z_bar[1] * z_bar[1];
    (-0.5 * zz - cert.b * e * e) / (1.0 + cert.quad(z_bar))
}

/// `V̇ − bound`; non-positive wherever the certificate holds.
pub fn vdot_margin(z_bar: [f64; 2], d_hat: f64, cert: &LyapunovCertificate) -> f64 {
    lyapunov_vdot(z_bar, d_hat, cert) - vdot_bound(z_bar, d_hat, cert)
}

/// Gain `ρ₂(s) = H (2s)² (‖J0‖ + e^{2s} ‖Λ̃‖)` of the filter-error bound.
pub fn iss_gain(s: f64, cert: &LyapunovCertificate) -> f64 {
    cert.hessian * (2.0 * s).powi(2) * (cert.omega0 + (2.0 * s).exp() * cert.alpha / 2.0)
}

/// `ṙ = −h r + H z̄ᵀ(J0 + Λ̃ e^d̂) z̄`.
pub fn filter_error_rate(r: f64, z_bar: [f64; 2], d_hat: f64, h: f64, cert: &LyapunovCertificate) -> f64 {
    // the skew part of J0 drops out of the quadratic form
    -h * r + cert.hessian * (-0.5 * cert.alpha * d_hat.exp() * z_bar[1] * z_bar[1])
}

/// `(−h|r| + ρ₂(|g|)) − d|r|/dt` with `g = (z̄, d̂)`. At `r = 0` the
/// one-sided derivative `|ṙ|` is used.
pub fn iss_bound_check(r: f64, z_bar: [f64; 2], d_hat: f64, hessian: f64, h: f64, cert: &LyapunovCertificate) -> f64 {
    let cert = LyapunovCertificate { hessian, ..*cert };
    let rdot = filter_error_rate(r, z_bar, d_hat, h, &cert);
    let abs_rate = if r > 0.0 {
        rdot
    } else if r < 0.0 {
        -rdot
    } else {
        rdot.abs()
    };
    let g = (z_bar[0] * z_bar[0] + z_bar[1] * z_bar[1] + d_hat * d_hat).sqrt();
    -h * r.abs() + iss_gain(g, &cert) - abs_rate
}

/// Extremes of the certificate margins over a grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridMargins {
    pub points: usize,
    /// Largest `V̇ − bound`.
    pub max_vdot_margin: f64,
    /// Largest `V̇` away from the origin.
    pub max_vdot_nonzero: f64,
    pub min_v_nonzero: f64,
}

/// Evaluates the certificate on `n` points per axis over `z̄ ∈ [−z_max, z_max]²`
/// and `d̂ ∈ [−d_max, d_max]`.
pub fn grid_margins(cert: &LyapunovCertificate, n: usize, z_max: f64, d_max: f64) -> GridMargins {
    let axis = |lim: f64| -> Vec<f64> { (0..n).map(|i| -lim + 2.0 * lim * i as f64 / (n - 1) as f64).collect() };
    let (zs, ds) = (axis(z_max), axis(d_max));
    let mut out = GridMargins {
        points: 0,
        max_vdot_margin: f64::NEG_INFINITY,
        max_vdot_nonzero: f64::NEG_INFINITY,
        min_v_nonzero: f64::INFINITY,
    };
    for &z1 in &zs {
        for &z2 in &zs {
            for &d in &ds {
                out.points += 1;
                out.max_vdot_margin = out.max_vdot_margin.max(vdot_margin([z1, z2], d, cert));
                if z1 != 0.0 || z2 != 0.0 || d != 0.0 {
                    out.max_vdot_nonzero = out.max_vdot_nonzero.max(lyapunov_vdot([z1, z2], d, cert));
                    out.min_v_nonzero = out.min_v_nonzero.min(lyapunov_v([z1, z2], d, cert));
                }
            }
        }
    }
    out
}

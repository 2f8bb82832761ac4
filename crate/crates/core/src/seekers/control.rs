use crate::model::SeekerParams;

/// Gains resolved once from [`SeekerParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    pub omega: f64,
    pub omega0: f64,
    pub c: f64,
    pub alpha_tilde: f64,
    pub demod: f64,
    pub h: f64,
    pub omega_d: f64,
}

impl From<&SeekerParams> for Gains {
    fn from(p: &SeekerParams) -> Self {
        Self {
            omega: p.omega,
            omega0: p.omega0,
            c: p.c(),
            alpha_tilde: p.alpha_tilde(),
            demod: p.demod_gain(),
            h: p.h_gain,
            omega_d: p.omega_d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientControl {
    pub u1: f64,
    pub u2: f64,
    pub nu_dot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonControl {
    pub u1: f64,
    pub u2: f64,
    pub dee_dot: f64,
    pub nu_dot: f64,
}

impl Gains {
    pub fn gradient(&self, t: f64, y: f64, nu: f64) -> GradientControl {
        let (s, c) = (self.omega * t).sin_cos();
        let e = y - nu;
        GradientControl {
            u1: self.c * e * s + self.alpha_tilde * c,
            u2: self.omega0,
            nu_dot: self.h * e,
        }
    }

    pub fn newton(&self, t: f64, y: f64, nu: f64, dee: f64) -> NewtonControl {
        let (s, c) = (self.omega * t).sin_cos();
        let e = y - nu;
        NewtonControl {
            u1: self.c * dee * e * s + self.alpha_tilde * c,
            u2: self.omega0,
            dee_dot: self.omega_d * dee * (1.0 - dee * self.riccati_input(t, e)),
            nu_dot: self.h * e,
        }
    }

    /// Demodulated curvature estimate `8ω²/α̃² (y - ν) cos 2ωt`.
    pub fn riccati_input(&self, t: f64, filtered: f64) -> f64 {
        self.demod * filtered * (2.0 * self.omega * t).cos()
    }
}

/// Gradient seeker: forward speed from the high-passed measurement
/// demodulated by `sin ωt`, plus the `cos ωt` dither; constant turning rate.
pub fn gradient_control(t: f64, y: f64, nu: f64, params: &SeekerParams) -> GradientControl {
    Gains::from(params).gradient(t, y, nu)
}

/// Newton seeker: the gradient law scaled by the Riccati inverse-Hessian
/// estimate `d`, with `d' = ω_d d (1 - d · 8ω²/α̃² (y - ν) cos 2ωt)`.
pub fn newton_control(t: f64, y: f64, nu: f64, dee: f64, params: &SeekerParams) -> NewtonControl {
    Gains::from(params).newton(t, y, nu, dee)
}

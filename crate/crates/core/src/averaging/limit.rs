use serde::Serialize;

use crate::error::{Error, Result};

/// Magnitudes below this count as exact zeros.
pub const ZERO_FLOOR: f64 = 1e-8;
/// Exponents within `±FLAT` of zero are treated as a finite limit.
pub const FLAT: f64 = 0.05;
pub const MIN_R_SQUARED: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LimitClass {
    Zero,
    Finite(f64),
    /// Carries the fitted exponent `q > 0`.
    Divergent(f64),
}

impl LimitClass {
    pub fn name(&self) -> &'static str {
        match self {
            LimitClass::Zero => "zero",
            LimitClass::Finite(_) => "finite",
            LimitClass::Divergent(_) => "divergent",
        }
    }

    /// Limit value, zero for [`LimitClass::Zero`], `None` when divergent.
    pub fn limit(&self) -> Option<f64> {
        match self {
            LimitClass::Zero => Some(0.0),
            LimitClass::Finite(v) => Some(*v),
            LimitClass::Divergent(_) => None,
        }
    }
}

/// A limit class with its fit diagnostics. `exponent` and `r_squared` are
/// `None` when the zero filter decided the class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub class: LimitClass,
    pub exponent: Option<f64>,
    pub r_squared: Option<f64>,
}

/// Classifies `lim_{ω→∞} γ(ω)` from samples on a geometric grid by fitting
/// `|γ| = c ω^q` in log-log coordinates.
pub fn classify_limit(omegas: &[f64], values: &[f64]) -> Result<Classification> {
    if omegas.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: omegas.len(),
            got: values.len(),
        });
    }
    if omegas.len() < 4 {
        return Err(Error::Unclassifiable {
            reason: format!("need at least 4 samples, got {}", omegas.len()),
        });
    }
    for w in omegas.windows(2) {
        if !(w[0] > 0.0 && w[1] >= 2.0 * w[0] * (1.0 - 1e-12)) {
            return Err(Error::Unclassifiable {
                reason: "omega grid must be positive with successive ratios >= 2".into(),
            });
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Unclassifiable {
            reason: "non-finite sample".into(),
        });
    }

    let kept: Vec<(f64, f64)> = omegas
        .iter()
        .zip(values)
        .filter(|(_, v)| v.abs() >= ZERO_FLOOR)
        .map(|(w, v)| (w.ln(), v.abs().ln()))
        .collect();
    if kept.len() < 2 {
        return Ok(Classification {
            class: LimitClass::Zero,
            exponent: None,
            r_squared: None,
        });
    }

    let n = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / n;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = kept.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = kept.iter().map(|p| (p.1 - my).powi(2)).sum();
    let q = sxy / sxx;
    let ss_res: f64 = kept.iter().map(|p| (p.1 - my - q * (p.0 - mx)).powi(2)).sum();
    // a flat series is explained perfectly by a zero slope
    let r2 = if syy <= 1e-24 { 1.0 } else { 1.0 - ss_res / syy };
    if r2 < MIN_R_SQUARED {
        return Err(Error::Unclassifiable {
            reason: format!("log-log fit R² = {r2:.3} with exponent {q:.3}"),
        });
    }

    let class = if q < -FLAT {
        LimitClass::Zero
    } else if q <= FLAT {
        LimitClass::Finite(values.iter().sum::<f64>() / values.len() as f64)
    } else {
        LimitClass::Divergent(q)
    };
    Ok(Classification {
        class,
        exponent: Some(q),
        r_squared: Some(r2),
    })
}

/// `{ω, 2ω, 4ω, 8ω}`.
pub fn default_omega_grid(omega: f64) -> Vec<f64> {
    (0..4).map(|i| omega * f64::from(1u32 << i)).collect()
}

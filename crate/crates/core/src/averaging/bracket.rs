use crate::error::{Error, Result};

/// Central-difference step rule, `h_k = base · max(1, |x_k|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FdStep {
    /// `base = ε^{1/3}`, optimal for exact function values.
    Optimal,
    /// Five-point stencil with `base = ε^{2/15}`, for differentiating a field
    /// that is itself a finite-difference bracket with noise of order `ε^{2/3}`.
    Nested,
    Base(f64),
}

impl FdStep {
    pub fn base(&self) -> f64 {
        match self {
            FdStep::Optimal => f64::EPSILON.cbrt(),
            FdStep::Nested => f64::EPSILON.powf(2.0 / 15.0),
            FdStep::Base(b) => *b,
        }
    }

    fn five_point(&self) -> bool {
        matches!(self, FdStep::Nested)
    }
}

fn checked(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64]) -> Result<Vec<f64>> {
    let v = f(x);
    if v.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: v.len(),
        });
    }
    if !v.iter().all(|c| c.is_finite()) {
        return Err(Error::NonFiniteField { point: x.to_vec() });
    }
    Ok(v)
}

/// Jacobian `∂f/∂x` by central differences, row-major `J[i][k] = ∂fᵢ/∂x_k`.
pub fn jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], step: FdStep) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    let base = step.base();
    let mut jac = vec![vec![0.0; n]; n];
    let mut xp = x.to_vec();
    for k in 0..n {
        let h = base * x[k].abs().max(1.0);
        let mut at = |offset: f64| -> Result<Vec<f64>> {
            xp[k] = x[k] + offset;
            let v = checked(f, &xp);
            xp[k] = x[k];
            v
        };
        let (fp, fm) = (at(h)?, at(-h)?);
        if step.five_point() {
            let (fpp, fmm) = (at(2.0 * h)?, at(-2.0 * h)?);
            for i in 0..n {
                jac[i][k] = (8.0 * (fp[i] - fm[i]) - (fpp[i] - fmm[i])) / (12.0 * h);
            }
        } else {
            for i in 0..n {
                jac[i][k] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
    }
    Ok(jac)
}

/// `[f, g](x) = (∂g/∂x) f(x) − (∂f/∂x) g(x)`.
pub fn lie_bracket(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    g: &dyn Fn(&[f64]) -> Vec<f64>,
    x: &[f64],
    step: FdStep,
) -> Result<Vec<f64>> {
    let fx = checked(f, x)?;
    let gx = checked(g, x)?;
    let jf = jacobian(f, x, step)?;
    let jg = jacobian(g, x, step)?;
    let n = x.len();
    Ok((0..n)
        .map(|i| (0..n).map(|k| jg[i][k] * fx[k] - jf[i][k] * gx[k]).sum())
        .collect())
}

/// `[[f, g], m](x)` with the inner bracket differentiated at the nested step.
/// Non-finite inner evaluations surface as NaN and are reported at `x`.
pub fn nested_bracket(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    g: &dyn Fn(&[f64]) -> Vec<f64>,
    m: &dyn Fn(&[f64]) -> Vec<f64>,
    x: &[f64],
) -> Result<Vec<f64>> {
    let inner =
        |y: &[f64]| -> Vec<f64> { lie_bracket(f, g, y, FdStep::Optimal).unwrap_or_else(|_| vec![f64::NAN; y.len()]) };
    lie_bracket(&inner, m, x, FdStep::Nested).map_err(|e| match e {
        Error::NonFiniteField { .. } => Error::NonFiniteField { point: x.to_vec() },
        other => other,
    })
}

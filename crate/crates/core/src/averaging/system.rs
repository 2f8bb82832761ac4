use std::fmt;
use std::sync::Arc;

use super::input::OscillatoryInput;
use crate::error::{Error, Result};

/// A reentrant vector field `x ↦ f(x)` on `ℝⁿ`.
pub type VectorField = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

pub fn vector_field(f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> VectorField {
    Arc::new(f)
}

#[derive(Clone)]
pub struct Channel {
    pub field: VectorField,
    pub input: OscillatoryInput,
}

/// `ẋ = f₀(x) + Σᵢ fᵢ(x) ω^{pᵢ} uᵢ(kᵢ ω t)`.
#[derive(Clone)]
pub struct ControlAffineSystem {
    pub drift: VectorField,
    pub channels: Vec<Channel>,
    pub dim: usize,
    /// Declared flatness of the fourth-order terms; not checked numerically.
    pub fourth_order_declared: Option<bool>,
}

impl fmt::Debug for ControlAffineSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlAffineSystem")
            .field("dim", &self.dim)
            .field("inputs", &self.channels.iter().map(|c| &c.input).collect::<Vec<_>>())
            .finish()
    }
}

impl ControlAffineSystem {
    pub fn new(dim: usize, drift: VectorField) -> Self {
        Self {
            drift,
            channels: Vec::new(),
            dim,
            fourth_order_declared: None,
        }
    }

    pub fn with_channel(mut self, field: VectorField, input: OscillatoryInput) -> Self {
        self.channels.push(Channel { field, input });
        self
    }

    pub fn inputs(&self) -> Vec<OscillatoryInput> {
        self.channels.iter().map(|c| c.input.clone()).collect()
    }

    /// Checks dimensions and finiteness of every field at `points`.
    pub fn validate(&self, points: &[Vec<f64>]) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::invalid("dim", "system dimension must be positive"));
        }
        let fields = std::iter::once(&self.drift).chain(self.channels.iter().map(|c| &c.field));
        for f in fields {
            for x in points {
                if x.len() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        got: x.len(),
                    });
                }
                let v = f(x);
                if v.len() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        got: v.len(),
                    });
                }
                if !v.iter().all(|c| c.is_finite()) {
                    return Err(Error::NonFiniteField { point: x.clone() });
                }
            }
        }
        Ok(())
    }

    /// Full time-varying right-hand side at frequency `omega`.
    pub fn eval(&self, t: f64, x: &[f64], omega: f64) -> Vec<f64> {
        let mut out = (self.drift)(x);
        for ch in &self.channels {
            let u = ch.input.eval(t, omega);
            for (o, v) in out.iter_mut().zip((ch.field)(x)) {
                *o += u * v;
            }
        }
        out
    }
}
